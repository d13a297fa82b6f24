use std::sync::Arc;

use super::chart::MetricChart;
use crate::curve::{arclength_reparametrize_with, CurveSamples, Jet, CLOSED_TOL};
use crate::error::{GeometryError, Result};
use crate::euclidean::{
    field_derivative, integrate_transport, normal_seed, FramedCurve, NormalField, TransportModel, TransportOptions,
};
use crate::numeric::{self, DiffOrder};
use crate::{Matrix, Vector};

/// Normal-connection transport in a chart.
///
/// With `t = γ'/|γ'|` and `∇` the Levi-Civita connection, the field obeys
/// `v' = -Γ(γ', v) + μ γ'` where `μ = -g(∇_{γ'}γ', v) / g(γ', γ')`. The
/// multiplier follows from differentiating `g(v, γ') = 0` with the metric
/// compatibility of `∇` and keeps `v` normal.
struct ChartModel<'a> {
    chart: &'a MetricChart,
}

impl ChartModel<'_> {
    fn geodesic_curvature_vector(&self, jet: &Jet) -> Result<Vector> {
        let x = &jet.position;
        if !self.chart.contains(x) {
            return Err(GeometryError::PointOutsideDomain(format!("{:?}", x.as_slice())));
        }
        let gamma = self.chart.christoffel(x)?;
        Ok(&jet.acceleration + gamma.contract(&jet.velocity, &jet.velocity))
    }
}

impl TransportModel for ChartModel<'_> {
    fn inner(&self, x: &Vector, a: &Vector, b: &Vector) -> f64 {
        self.chart.inner(x, a, b)
    }

    fn rhs(&self, jet: &Jet, v: &Vector) -> Result<Vector> {
        let x = &jet.position;
        if !self.chart.contains(x) {
            return Err(GeometryError::PointOutsideDomain(format!("{:?}", x.as_slice())));
        }
        let gamma = self.chart.christoffel(x)?;
        let u = &jet.velocity;
        let accel = &jet.acceleration + gamma.contract(u, u);
        let mu = -self.chart.inner(x, &accel, v) / self.chart.inner(x, u, u);
        Ok(u * mu - gamma.contract(u, v))
    }

    fn multiplier(&self, jet: &Jet, v: &Vector) -> Result<f64> {
        let accel = self.geodesic_curvature_vector(jet)?;
        let x = &jet.position;
        Ok(-self.chart.inner(x, &accel, v) / self.chart.inner(x, &jet.velocity, &jet.velocity))
    }
}

fn check_samples(c: &CurveSamples, chart: &MetricChart) -> Result<()> {
    if c.dim() != chart.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: chart.dim(),
            found: c.dim(),
        });
    }
    match c.positions().iter().position(|x| !chart.contains(x)) {
        Some(index) => Err(GeometryError::OutsideDomain { index }),
        None => Ok(()),
    }
}

fn check_grid(c: &CurveSamples, f: &NormalField) -> Result<()> {
    if !c.same_grid(&f.params) || f.vectors.len() != c.len() {
        return Err(GeometryError::MismatchedGrids);
    }
    Ok(())
}

/// Reparametrizes by arclength measured in the chart metric.
pub fn g_arclength_reparametrize(c: &CurveSamples, chart: &MetricChart) -> Result<CurveSamples> {
    check_samples(c, chart)?;
    arclength_reparametrize_with(c, Arc::new(chart.clone()))
}

/// Parallel transport of `v0` in the normal bundle of a curve that has unit
/// speed in the chart metric.
pub fn normal_parallel_transport(c: &CurveSamples, chart: &MetricChart, v0: &Vector) -> Result<NormalField> {
    normal_parallel_transport_with(c, chart, v0, &TransportOptions::default())
}

pub fn normal_parallel_transport_with(
    c: &CurveSamples,
    chart: &MetricChart,
    v0: &Vector,
    opts: &TransportOptions,
) -> Result<NormalField> {
    check_samples(c, chart)?;
    if v0.len() != chart.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: chart.dim(),
            found: v0.len(),
        });
    }
    let deviation = (0..c.len())
        .map(|i| (chart.norm(&c.positions()[i], &c.velocities()[i]) - 1.0).abs())
        .fold(0.0, f64::max);
    if !(deviation <= opts.unit_speed_tol) {
        return Err(GeometryError::ReparametrizationRequired { deviation });
    }
    let model = ChartModel { chart };
    let (seed, projection) = normal_seed(&model, c, v0, opts)?;
    integrate_transport(&model, c, seed, projection)
}

/// `(∇_{γ'} v)^k = dv^k/ds + Γ^k_ij γ'^i v^j` at each sample, with `dv/ds`
/// by fourth-order differencing.
pub fn covariant_derivative_along(c: &CurveSamples, f: &NormalField, chart: &MetricChart) -> Result<Vec<Vector>> {
    check_grid(c, f)?;
    check_samples(c, chart)?;
    let dv = field_derivative(c, &f.vectors);
    covariant_from(c, f, chart, dv)
}

fn covariant_from(c: &CurveSamples, f: &NormalField, chart: &MetricChart, dv: Vec<Vector>) -> Result<Vec<Vector>> {
    dv.into_iter()
        .enumerate()
        .map(|(i, d)| {
            if chart.is_flat() {
                return Ok(d);
            }
            let gamma = chart.christoffel(&c.positions()[i])?;
            Ok(d + gamma.contract(&c.velocities()[i], &f.vectors[i]))
        })
        .collect()
}

/// Splitting of an ambient vector at a curve point into its components
/// along and normal to the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientDecomposition {
    pub tangent: Vector,
    pub normal: Vector,
}

/// Splits `u` into `g(u, t) t` and the `g`-normal remainder.
pub fn decompose(chart: &MetricChart, x: &Vector, t: &Vector, u: &Vector) -> Result<AmbientDecomposition> {
    let norm = chart.norm(x, t);
    if !((norm - 1.0).abs() <= 1e-8) {
        return Err(GeometryError::NonUnitTangent { norm });
    }
    let tangent = t * chart.inner(x, u, t);
    let normal = u - &tangent;
    Ok(AmbientDecomposition { tangent, normal })
}

fn unit_tangent(chart: &MetricChart, c: &CurveSamples, i: usize) -> Vector {
    let u = &c.velocities()[i];
    u / chart.norm(&c.positions()[i], u)
}

fn normal_parts(c: &CurveSamples, chart: &MetricChart, vectors: &[Vector]) -> Result<Vec<f64>> {
    vectors
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let x = &c.positions()[i];
            let speed = chart.norm(x, &c.velocities()[i]);
            let parts = decompose(chart, x, &unit_tangent(chart, c, i), w)?;
            Ok(chart.norm(x, &parts.normal) / speed)
        })
        .collect()
}

fn max_field_norm(c: &CurveSamples, f: &NormalField, chart: &MetricChart) -> f64 {
    f.vectors
        .iter()
        .zip(c.positions())
        .map(|(v, x)| chart.norm(x, v))
        .fold(0.0, f64::max)
}

/// Normal part of `∇_t v` at each sample, relative to the largest `g`-norm of
/// the field. It vanishes for fields parallel in the normal bundle.
pub fn normal_connection_residual(c: &CurveSamples, f: &NormalField, chart: &MetricChart) -> Result<Vec<f64>> {
    let cov = covariant_derivative_along(c, f, chart)?;
    let scale = max_field_norm(c, f, chart);
    let raw = normal_parts(c, chart, &cov)?;
    Ok(raw.into_iter().map(|r| if scale > 0.0 { r / scale } else { 0.0 }).collect())
}

/// Residual of a transported field against what its integration and the
/// residual's own differencing can resolve.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCheck {
    /// Relative normal-connection residual per sample.
    pub residuals: Vec<f64>,
    /// Per-sample allowance: ten times the integration drift per unit length
    /// plus the estimated differencing error, plus a rounding floor.
    pub bounds: Vec<f64>,
    pub max_residual: f64,
    /// Largest `residual / bound`.
    pub max_ratio: f64,
    pub passed: bool,
}

/// Compares the normal-connection residual of a transported field with its
/// recorded per-step drift.
///
/// The derivative of the field is differenced, so the residual carries the
/// stencil's truncation error as well. That error is estimated per sample by
/// Richardson comparison of the stride-1 and stride-2 stencils.
pub fn normal_connection_check(c: &CurveSamples, f: &NormalField, chart: &MetricChart) -> Result<ResidualCheck> {
    check_grid(c, f)?;
    check_samples(c, chart)?;
    let n = c.len();
    if n < 11 {
        return Err(GeometryError::InvalidArgument(format!(
            "the residual check needs at least 11 samples, got {n}"
        )));
    }
    let residuals = normal_connection_residual(c, f, chart)?;
    let scale = max_field_norm(c, f, chart);
    let params = c.params();
    let fine = numeric::derivative(params, &f.vectors, false, DiffOrder::Fourth);
    let coarse = numeric::derivative_strided(params, &f.vectors, false, DiffOrder::Fourth, 2);
    let differences: Vec<Vector> = fine.iter().zip(&coarse).map(|(a, b)| (a - b) / 15.0).collect();
    let truncation = normal_parts(c, chart, &differences)?;
    let h_min = params.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let h_max = params.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let floor = 64.0 * f64::EPSILON / h_min;
    let mut bounds = Vec::with_capacity(n);
    for (i, t) in truncation.iter().enumerate() {
        let lo = i.saturating_sub(2);
        let hi = (i + 3).min(n);
        let drift = f.step_drift[lo..hi].iter().copied().fold(0.0, f64::max);
        let est = if scale > 0.0 { t / scale } else { 0.0 };
        bounds.push(10.0 * (drift / h_max + est) + floor);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let max_ratio = residuals
        .iter()
        .zip(&bounds)
        .map(|(r, b)| r / b)
        .fold(0.0, f64::max);
    Ok(ResidualCheck {
        residuals,
        bounds,
        max_residual,
        max_ratio,
        passed: max_ratio < 1.0,
    })
}

fn gram(chart: &MetricChart, x: &Vector, vectors: &[Vector]) -> Matrix {
    let k = vectors.len();
    Matrix::from_fn(k, k, |a, b| chart.inner(x, &vectors[a], &vectors[b]))
}

/// Frame `{t, v_1, .., v_{n-1}}` with every normal vector transported in the
/// normal bundle.
pub fn rm_frame_manifold(c: &CurveSamples, chart: &MetricChart, initial: &[Vector]) -> Result<FramedCurve> {
    check_samples(c, chart)?;
    let n = chart.dim();
    if initial.len() + 1 != n {
        return Err(GeometryError::InvalidArgument(format!(
            "a frame in dimension {n} needs {} normal vectors, got {}",
            n - 1,
            initial.len()
        )));
    }
    if let Some(v) = initial.iter().find(|v| v.len() != n) {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let x0 = &c.positions()[0];
    let mut seed = vec![unit_tangent(chart, c, 0)];
    seed.extend(initial.iter().cloned());
    let g = gram(chart, x0, &seed);
    if (&g - Matrix::identity(n, n)).amax() > 1e-8 {
        return Err(GeometryError::NonOrthonormalFrame {
            gram: g.row_iter().map(|r| r.iter().copied().collect()).collect(),
        });
    }
    let fields: Vec<NormalField> = initial
        .iter()
        .map(|v| normal_parallel_transport(c, chart, v))
        .collect::<Result<_>>()?;
    let frames = (0..c.len())
        .map(|i| {
            let mut frame = vec![unit_tangent(chart, c, i)];
            frame.extend(fields.iter().map(|f| f.vectors[i].clone()));
            frame
        })
        .collect();
    Ok(FramedCurve {
        params: c.params().to_vec(),
        frames,
    })
}

/// Loop transport of the normal space at the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy {
    /// `matrix[(j, k)] = g(e_j, P e_k)` for the basis `e` and loop transport `P`.
    pub matrix: Matrix,
    /// `g`-orthonormal basis of the normal space at the base point, oriented
    /// so that `{t, e_1, .., e_{n-1}}` is positive in the coordinates.
    pub basis: Vec<Vector>,
    /// Rotation angle from `e_1` towards `e_2`, when the normal space is a
    /// plane.
    pub angle: Option<f64>,
    /// `max |MᵀM - I|`.
    pub orthogonality_residual: f64,
}

/// `g`-orthonormal basis of the normal space at `x` for the unit tangent
/// `t`: Gram-Schmidt of the coordinate axes, oriented so that `(t, basis)`
/// is positive.
pub fn normal_basis(chart: &MetricChart, x: &Vector, t: &Vector) -> Vec<Vector> {
    let n = chart.dim();
    let mut basis: Vec<Vector> = vec![t.clone()];
    for axis in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = Vector::zeros(n);
        e[axis] = 1.0;
        let mut w = e.clone();
        for b in &basis {
            let ip = chart.inner(x, &w, b);
            w -= b * ip;
        }
        let norm = chart.norm(x, &w);
        if norm > 1e-6 * chart.norm(x, &e) {
            basis.push(w / norm);
        }
    }
    let frame = Matrix::from_columns(&basis);
    if frame.determinant() < 0.0 {
        let last = basis.len() - 1;
        basis[last] = -&basis[last];
    }
    basis.remove(0);
    basis
}

fn closes_up(c: &CurveSamples, chart: &MetricChart) -> bool {
    if c.is_closed() {
        return true;
    }
    let Some(periods) = chart.periods() else {
        return false;
    };
    let first = &c.positions()[0];
    let last = &c.positions()[c.len() - 1];
    let gap = (0..first.len())
        .map(|k| {
            let d = last[k] - first[k];
            let p = periods[k];
            if p > 0.0 {
                d - p * (d / p).round()
            } else {
                d
            }
        })
        .fold(0.0f64, |acc, d| acc.max(d.abs()));
    gap <= CLOSED_TOL * c.scale()
}

/// Holonomy of the normal connection around a closed unit-speed curve.
pub fn normal_holonomy(c: &CurveSamples, chart: &MetricChart) -> Result<Holonomy> {
    check_samples(c, chart)?;
    if !closes_up(c, chart) {
        return Err(GeometryError::OpenCurve);
    }
    let x0 = &c.positions()[0];
    let basis = normal_basis(chart, x0, &unit_tangent(chart, c, 0));
    let end = c.len() - 1;
    let xe = &c.positions()[end];
    let images: Vec<Vector> = basis
        .iter()
        .map(|e| normal_parallel_transport(c, chart, e).map(|f| f.vectors[end].clone()))
        .collect::<Result<_>>()?;
    let k = basis.len();
    let matrix = Matrix::from_fn(k, k, |a, b| chart.inner(xe, &basis[a], &images[b]));
    let orthogonality_residual = (matrix.transpose() * &matrix - Matrix::identity(k, k)).amax();
    let angle = (k == 2).then(|| matrix[(1, 0)].atan2(matrix[(0, 0)]));
    Ok(Holonomy {
        matrix,
        basis,
        angle,
        orthogonality_residual,
    })
}
