//! Invariant suite run by `rmframe report`.

use std::fmt::Write as _;

use rmframe_core::{
    arclength_reparametrize, developability_residual, g_arclength_reparametrize, is_rm, normal_connection_check,
    normal_parallel_transport, pushforward_field, sample_curve, CurveSpec, GeometryError, NormalField, Vector,
};
use serde::Serialize;

use crate::commands::{prepare, seeds, selected_field, Prepared};
use crate::config::{FieldKind, RunConfig};
use crate::error::Result;

pub const IS_RM_TOL: f64 = 1e-6;
pub const DEVELOPABILITY_TOL: f64 = 1e-6;
pub const FLAT_AGREEMENT_TOL: f64 = 1e-8;
pub const EQUIVARIANCE_TOL: f64 = 1e-7;
pub const MIN_ORDER: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::Below,
            passed: value < threshold,
            note: None,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtLeast,
            passed: value >= threshold,
            note: None,
        }
    }

    fn errored(name: impl Into<String>, threshold: f64, err: &GeometryError) -> Self {
        Check {
            name: name.into(),
            value: f64::INFINITY,
            threshold,
            comparison: Comparison::Below,
            passed: false,
            note: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftStatistics {
    pub max_step_drift: f64,
    pub mean_step_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub passed: bool,
    pub chart: String,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
    pub drift: DriftStatistics,
    pub convergence_order: Option<f64>,
    pub provenance: Provenance,
}

impl Report {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn text(&self) -> String {
        let mut out = format!("report for {} samples on {}\n", self.samples, self.chart);
        for c in &self.checks {
            let op = match c.comparison {
                Comparison::Below => "<",
                Comparison::AtLeast => ">=",
            };
            let _ = write!(
                out,
                "{} {:<44} {:>12.3e} {op} {:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
            if let Some(note) = &c.note {
                let _ = write!(out, "  ({note})");
            }
            out.push('\n');
        }
        for s in &self.skipped {
            let _ = writeln!(out, "SKIP {:<44} {}", s.name, s.reason);
        }
        let _ = writeln!(
            out,
            "step drift: max {:.3e}, mean {:.3e}",
            self.drift.max_step_drift, self.drift.mean_step_drift
        );
        let _ = writeln!(
            out,
            "{}: {} of {} checks failed",
            if self.passed { "PASS" } else { "FAIL" },
            self.failed(),
            self.checks.len()
        );
        out
    }
}

fn norm_drift(p: &Prepared, fields: &[NormalField]) -> f64 {
    let chart = p.chart();
    let x = p.curve.positions();
    let mut worst = 0.0f64;
    for f in fields {
        let n0 = chart.norm(&x[0], &f.vectors[0]);
        let scale = if n0 > 0.0 { n0 } else { 1.0 };
        for (xi, v) in x.iter().zip(&f.vectors) {
            worst = worst.max((chart.norm(xi, v) - n0).abs() / scale);
        }
    }
    worst
}

/// Largest change of the cosine of the angle between any two fields.
fn angle_drift(p: &Prepared, fields: &[NormalField]) -> f64 {
    let chart = p.chart();
    let x = p.curve.positions();
    let cosine = |i: usize, a: &Vector, b: &Vector| {
        chart.inner(&x[i], a, b) / (chart.norm(&x[i], a) * chart.norm(&x[i], b))
    };
    let mut worst = 0.0f64;
    for (k, a) in fields.iter().enumerate() {
        for b in &fields[k + 1..] {
            let c0 = cosine(0, &a.vectors[0], &b.vectors[0]);
            for i in 0..x.len() {
                worst = worst.max((cosine(i, &a.vectors[i], &b.vectors[i]) - c0).abs());
            }
        }
    }
    worst
}

/// Observed order of the transport under step halving, from the values at a
/// quarter of the curve on grids of 32 to 512 intervals. The finest triple of
/// grids whose differences stay clear of rounding is used. On closed loops
/// the endpoint errors cancel, so the endpoint is not used. `None` when even
/// the coarsest differences are at rounding level.
fn convergence_order(p: &Prepared, spec: &CurveSpec, seed: &Vector) -> Result<Option<f64>> {
    let mut values = Vec::new();
    for intervals in [32, 64, 128, 256, 512] {
        let raw = sample_curve(spec, intervals + 1)?;
        let curve = if p.chart().is_flat() {
            arclength_reparametrize(&raw)?
        } else {
            g_arclength_reparametrize(&raw, p.chart())?
        };
        let field = normal_parallel_transport(&curve, p.chart(), seed)?;
        values.push(field.vectors[intervals / 4].clone());
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| (&w[0] - &w[1]).norm()).collect();
    let scale = seed.norm().max(1.0);
    if diffs[1] <= 1e-13 * scale {
        return Ok(None);
    }
    let k = (2..diffs.len()).rev().find(|&k| diffs[k] > 1e-11 * scale).unwrap_or(1);
    Ok(Some((diffs[k - 1] / diffs[k]).log2()))
}

pub fn build(config: &RunConfig) -> Result<Report> {
    let p = prepare(config)?;
    let chart = p.chart();
    let flat3 = chart.is_flat() && chart.dim() == 3;
    let seeds = seeds(&p, &config.v0)?;
    let fields = seeds.iter().map(|s| p.transport(s)).collect::<Result<Vec<_>>>()?;
    let selected = match config.field {
        FieldKind::Rm => fields[0].clone(),
        kind => selected_field(&p, kind, &seeds)?,
    };
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let mut skip = |name: &str, reason: &str| {
        skipped.push(Skipped {
            name: name.into(),
            reason: reason.into(),
        })
    };

    checks.push(Check::below("norm_drift", norm_drift(&p, &fields), config.tol));
    if fields.len() > 1 {
        checks.push(Check::below("angle_drift", angle_drift(&p, &fields), config.tol));
    } else {
        skip("angle_drift", "only one normal direction");
    }

    if p.curve.len() >= 11 {
        let check = normal_connection_check(&p.curve, &selected, chart)?;
        let mut c = Check::below("normal_connection_residual_ratio", check.max_ratio, 1.0);
        c.note = Some(format!("max residual {:e}", check.max_residual));
        checks.push(c);
    } else {
        skip("normal_connection_residual_ratio", "needs at least 11 samples");
    }

    if flat3 {
        let verdict = is_rm(&p.curve, &selected, IS_RM_TOL)?;
        checks.push(Check::below("is_rm", verdict.max_residual, IS_RM_TOL));
        checks.push(Check::below(
            "developability_residual",
            developability_residual(&p.curve, &selected)?,
            DEVELOPABILITY_TOL,
        ));
    } else {
        skip("is_rm", "needs a flat three-dimensional chart");
        skip("developability_residual", "needs a flat three-dimensional chart");
    }

    if chart.is_flat() {
        let mut worst = 0.0f64;
        for (seed, f) in seeds.iter().zip(&fields) {
            let via_chart = normal_parallel_transport(&p.curve, chart, seed)?;
            worst = worst.max(via_chart.sup_distance(f));
        }
        checks.push(Check::below("flat_chart_agreement", worst, FLAT_AGREEMENT_TOL));
    } else {
        skip("flat_chart_agreement", "chart is not flat");
    }

    if p.entry.isometries.is_empty() {
        skip("isometry_equivariance", "chart has no catalogued isometries");
    }
    let x0 = &p.curve.positions()[0];
    for iso in &p.entry.isometries {
        let name = format!("isometry_equivariance/{}", iso.name());
        if !p.curve.positions().iter().all(|x| iso.is_defined_at(x)) {
            skip(&name, "curve leaves the domain of the isometry");
            continue;
        }
        let outcome = pushforward_field(iso, &p.curve, &fields[0]).and_then(|pushed| {
            let direct = normal_parallel_transport(&pushed.curve, chart, &iso.push(x0, &seeds[0]))?;
            Ok(direct.sup_distance(&pushed.field))
        });
        checks.push(match outcome {
            Ok(diff) => Check::below(name, diff, EQUIVARIANCE_TOL),
            Err(e) => Check::errored(name, EQUIVARIANCE_TOL, &e),
        });
    }

    let spec = config.curve_spec()?;
    let mut order = None;
    if matches!(spec, CurveSpec::Polyline { .. }) {
        skip("convergence_order", "polyline vertices fix the samples");
    } else {
        match convergence_order(&p, &spec, &seeds[0])? {
            Some(o) => {
                order = Some(o);
                checks.push(Check::at_least("convergence_order", o, MIN_ORDER));
            }
            None => skip("convergence_order", "transport is exact to rounding on this curve"),
        }
    }

    let drifts: Vec<f64> = fields.iter().flat_map(|f| f.step_drift.iter().copied()).collect();
    let drift = DriftStatistics {
        max_step_drift: drifts.iter().copied().fold(0.0, f64::max),
        mean_step_drift: drifts.iter().sum::<f64>() / drifts.len().max(1) as f64,
    };
    Ok(Report {
        passed: checks.iter().all(|c| c.passed),
        chart: p.entry.name.clone(),
        samples: p.curve.len(),
        checks,
        skipped,
        drift,
        convergence_order: order,
        provenance: Provenance {
            tool: "rmframe",
            version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
        },
    })
}
