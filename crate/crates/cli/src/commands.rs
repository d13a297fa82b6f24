use rmframe_core::{
    arclength_reparametrize, frenet_frame, g_arclength_reparametrize, normal_basis, normal_holonomy,
    normal_parallel_transport, rm_frame_manifold, rm_transport, ruled_surface, sample_curve, ChartCatalogEntry,
    CurveSamples, MetricChart, NormalField, Vector,
};
use serde::Serialize;

use crate::config::{FieldKind, Format, RunConfig};
use crate::error::{CliError, Result};
use crate::output;

/// Chart and unit-speed samples of the configured curve.
pub struct Prepared {
    pub entry: ChartCatalogEntry,
    pub curve: CurveSamples,
}

impl Prepared {
    pub fn chart(&self) -> &MetricChart {
        &self.entry.chart
    }

    /// Unit tangent in the chart metric at sample `i`.
    pub fn tangent(&self, i: usize) -> Vector {
        let x = &self.curve.positions()[i];
        let u = &self.curve.velocities()[i];
        u / self.chart().norm(x, u)
    }

    pub fn transport(&self, v0: &Vector) -> Result<NormalField> {
        if self.chart().is_flat() {
            Ok(rm_transport(&self.curve, v0)?)
        } else {
            Ok(normal_parallel_transport(&self.curve, self.chart(), v0)?)
        }
    }

    fn require_flat_3d(&self, what: &str) -> Result<()> {
        if self.chart().is_flat() && self.chart().dim() == 3 {
            Ok(())
        } else {
            Err(CliError::Validation(format!(
                "{what} needs a flat three-dimensional chart, got {}",
                self.entry.name
            )))
        }
    }
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    let entry = config.chart_entry()?;
    let spec = config.curve_spec()?;
    if spec.dim() != entry.chart.dim() {
        return Err(CliError::Validation(format!(
            "curve has dimension {} but chart {} has dimension {}",
            spec.dim(),
            entry.name,
            entry.chart.dim()
        )));
    }
    let raw = sample_curve(&spec, config.n)?;
    let curve = if entry.chart.is_flat() {
        arclength_reparametrize(&raw)?
    } else {
        g_arclength_reparametrize(&raw, &entry.chart)?
    };
    Ok(Prepared { entry, curve })
}

/// The configured seeds followed by a `g`-orthonormal completion to a basis
/// of the normal space at the first sample.
pub fn seeds(p: &Prepared, given: &[Vec<f64>]) -> Result<Vec<Vector>> {
    let chart = p.chart();
    let n = chart.dim();
    if given.len() > n - 1 {
        return Err(CliError::Validation(format!(
            "{} seeds given, the normal space has dimension {}",
            given.len(),
            n - 1
        )));
    }
    if let Some(bad) = given.iter().find(|v| v.len() != n) {
        return Err(CliError::Validation(format!("seed {bad:?} does not have {n} components")));
    }
    let x0 = &p.curve.positions()[0];
    let mut out: Vec<Vector> = given.iter().map(|v| Vector::from_vec(v.clone())).collect();
    let mut orthonormal: Vec<Vector> = Vec::new();
    for v in &out {
        let mut w = v.clone();
        for o in &orthonormal {
            w -= o * chart.inner(x0, &w, o);
        }
        let norm = chart.norm(x0, &w);
        if norm > 0.0 {
            orthonormal.push(w / norm);
        }
    }
    for b in normal_basis(chart, x0, &p.tangent(0)) {
        if out.len() == n - 1 {
            break;
        }
        let mut w = b.clone();
        for o in &orthonormal {
            w -= o * chart.inner(x0, &w, o);
        }
        let norm = chart.norm(x0, &w);
        if norm > 1e-6 {
            let w = w / norm;
            orthonormal.push(w.clone());
            out.push(w);
        }
    }
    Ok(out)
}

/// The field selected by `--field`.
pub fn selected_field(p: &Prepared, kind: FieldKind, seeds: &[Vector]) -> Result<NormalField> {
    match kind {
        FieldKind::Rm => p.transport(&seeds[0]),
        FieldKind::FrenetNormal | FieldKind::FrenetBinormal => {
            p.require_flat_3d("a Frenet field")?;
            let frenet = frenet_frame(&p.curve)?;
            let vectors = if kind == FieldKind::FrenetNormal {
                frenet.normals
            } else {
                frenet.binormals
            };
            Ok(NormalField::from_vectors(&p.curve, vectors)?)
        }
    }
}

fn to_vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

#[derive(Serialize)]
struct FrameSample {
    s: f64,
    x: Vec<f64>,
    t: Vec<f64>,
    normals: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct FramesDocument {
    chart: String,
    dim: usize,
    samples: Vec<FrameSample>,
}

pub fn frames(config: &RunConfig) -> Result<String> {
    let p = prepare(config)?;
    let seeds = seeds(&p, &config.v0)?;
    let framed = rm_frame_manifold(&p.curve, p.chart(), &seeds)?;
    let dim = p.chart().dim();
    let s = p.curve.params();
    let x = p.curve.positions();
    Ok(match config.format {
        Format::Json => {
            let samples = framed
                .frames
                .iter()
                .enumerate()
                .map(|(i, f)| FrameSample {
                    s: s[i],
                    x: to_vec(&x[i]),
                    t: to_vec(&f[0]),
                    normals: f[1..].iter().map(to_vec).collect(),
                })
                .collect();
            json(&FramesDocument {
                chart: p.entry.name.clone(),
                dim,
                samples,
            })
        }
        _ => {
            let rows: Vec<Vec<f64>> = framed
                .frames
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let mut row = vec![s[i]];
                    row.extend(x[i].iter());
                    for v in f {
                        row.extend(v.iter());
                    }
                    row
                })
                .collect();
            output::csv(&output::table_header(dim, true, dim - 1), &rows)
        }
    })
}

#[derive(Serialize)]
struct TransportSample {
    s: f64,
    x: Vec<f64>,
    v: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct TransportDocument {
    chart: String,
    dim: usize,
    field: FieldKind,
    seeds: Vec<Vec<f64>>,
    max_step_drift: Vec<f64>,
    samples: Vec<TransportSample>,
}

pub fn transport(config: &RunConfig) -> Result<String> {
    let p = prepare(config)?;
    let fields = match config.field {
        FieldKind::Rm if !config.v0.is_empty() => config
            .v0
            .iter()
            .map(|v| {
                if v.len() != p.chart().dim() {
                    return Err(CliError::Validation(format!(
                        "seed {v:?} does not have {} components",
                        p.chart().dim()
                    )));
                }
                p.transport(&Vector::from_vec(v.clone()))
            })
            .collect::<Result<Vec<_>>>()?,
        kind => vec![selected_field(&p, kind, &seeds(&p, &[])?)?],
    };
    let dim = p.chart().dim();
    let s = p.curve.params();
    let x = p.curve.positions();
    Ok(match config.format {
        Format::Json => {
            let samples = (0..p.curve.len())
                .map(|i| TransportSample {
                    s: s[i],
                    x: to_vec(&x[i]),
                    v: fields.iter().map(|f| to_vec(&f.vectors[i])).collect(),
                })
                .collect();
            json(&TransportDocument {
                chart: p.entry.name.clone(),
                dim,
                field: config.field,
                seeds: fields.iter().map(|f| to_vec(&f.vectors[0])).collect(),
                max_step_drift: fields.iter().map(NormalField::max_step_drift).collect(),
                samples,
            })
        }
        _ => {
            let rows: Vec<Vec<f64>> = (0..p.curve.len())
                .map(|i| {
                    let mut row = vec![s[i]];
                    row.extend(x[i].iter());
                    for f in &fields {
                        row.extend(f.vectors[i].iter());
                    }
                    row
                })
                .collect();
            output::csv(&output::table_header(dim, false, fields.len()), &rows)
        }
    })
}

pub fn surface(config: &RunConfig) -> Result<String> {
    let p = prepare(config)?;
    p.require_flat_3d("a ruled surface")?;
    let seeds = seeds(&p, &config.v0)?;
    let field = selected_field(&p, config.field, &seeds)?;
    let mesh = ruled_surface(&p.curve, &field, config.lambda_min, config.lambda_max, config.rulings)?;
    Ok(output::obj(&mesh))
}

#[derive(Serialize)]
struct HolonomyDocument {
    matrix: Vec<Vec<f64>>,
    angle: Option<f64>,
    orthogonality_residual: f64,
}

pub fn holonomy(config: &RunConfig) -> Result<String> {
    let p = prepare(config)?;
    let h = normal_holonomy(&p.curve, p.chart())?;
    let matrix = h.matrix.row_iter().map(|r| r.iter().copied().collect()).collect();
    Ok(json(&HolonomyDocument {
        matrix,
        angle: h.angle,
        orthogonality_residual: h.orthogonality_residual,
    }))
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents contain only finite numbers and strings");
    text.push('\n');
    text
}
