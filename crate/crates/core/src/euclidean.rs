//! Rotation-minimizing fields and frames in flat space.
//!
//! A normal field `v` along `γ` is rotation minimizing when `v'` is a
//! multiple of `γ'`. Differentiating `<v, t> = 0` fixes the multiple, giving
//! the transport equation `v' = λ t` with `λ = -<v, t'>` for a unit-speed
//! curve. It is integrated with the classical fourth-order Runge-Kutta
//! method over the sample grid; after each step `v` is projected back onto
//! the normal plane and rescaled to its initial norm, and the size of that
//! correction is recorded as the step drift.

use crate::curve::{frenet_frame, CurveSamples, Jet};
use crate::error::{GeometryError, Result};
use crate::numeric::{self, DiffOrder};
use crate::{cross3, Vector};
use std::f64::consts::{PI, TAU};

/// Knobs shared by the flat and chart transports.
#[derive(Debug, Clone, Copy)]
pub struct TransportOptions {
    /// Largest accepted `|<v0, t>| / |v0|`; smaller components are projected
    /// out and reported.
    pub normality_tol: f64,
    /// Largest accepted `|speed - 1|`.
    pub unit_speed_tol: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self {
            normality_tol: 1e-8,
            unit_speed_tol: 1e-6,
        }
    }
}

/// A vector field along sampled curve, normal to it at every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    pub params: Vec<f64>,
    pub vectors: Vec<Vector>,
    /// Multiplier of the velocity in `v' = λ γ'`, recorded by transports.
    pub lambda: Option<Vec<f64>>,
    /// Relative correction applied after each integration step (zero at the
    /// seed sample).
    pub step_drift: Vec<f64>,
    /// Tangential component removed from the seed vector.
    pub seed_projection: f64,
}

impl NormalField {
    /// Wraps precomputed vectors, e.g. a Frenet normal, as a field over `c`.
    pub fn from_vectors(c: &CurveSamples, vectors: Vec<Vector>) -> Result<Self> {
        if vectors.len() != c.len() {
            return Err(GeometryError::MismatchedGrids);
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != c.dim()) {
            return Err(GeometryError::DimensionMismatch {
                expected: c.dim(),
                found: v.len(),
            });
        }
        Ok(Self {
            params: c.params().to_vec(),
            step_drift: vec![0.0; vectors.len()],
            vectors,
            lambda: None,
            seed_projection: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn max_step_drift(&self) -> f64 {
        self.step_drift.iter().copied().fold(0.0, f64::max)
    }

    /// Largest coordinate-wise distance to another field on the same grid.
    pub fn sup_distance(&self, other: &NormalField) -> f64 {
        self.vectors
            .iter()
            .zip(&other.vectors)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }

    /// `α self + β other`.
    pub fn combine(&self, alpha: f64, other: &NormalField, beta: f64) -> NormalField {
        NormalField {
            params: self.params.clone(),
            vectors: self
                .vectors
                .iter()
                .zip(&other.vectors)
                .map(|(a, b)| a * alpha + b * beta)
                .collect(),
            lambda: None,
            step_drift: vec![0.0; self.len()],
            seed_projection: 0.0,
        }
    }
}

/// The pieces of a transport equation `v' = F(γ, v)` that differ between
/// flat space and a chart.
pub(crate) trait TransportModel {
    fn inner(&self, x: &Vector, a: &Vector, b: &Vector) -> f64;

    /// Right-hand side of the transport equation at a curve jet.
    fn rhs(&self, jet: &Jet, v: &Vector) -> Result<Vector>;

    /// Multiplier `λ` of the velocity in the tangential part of `v'`.
    fn multiplier(&self, jet: &Jet, v: &Vector) -> Result<f64>;
}

struct Flat;

impl TransportModel for Flat {
    fn inner(&self, _x: &Vector, a: &Vector, b: &Vector) -> f64 {
        a.dot(b)
    }

    fn rhs(&self, jet: &Jet, v: &Vector) -> Result<Vector> {
        Ok(&jet.velocity * self.multiplier(jet, v)?)
    }

    fn multiplier(&self, jet: &Jet, v: &Vector) -> Result<f64> {
        Ok(-v.dot(&jet.acceleration) / jet.velocity.norm_squared())
    }
}

/// Projects `v0` onto the normal space at the first sample, rejecting seeds
/// whose tangential component exceeds the tolerance.
pub(crate) fn normal_seed(
    model: &impl TransportModel,
    c: &CurveSamples,
    v0: &Vector,
    opts: &TransportOptions,
) -> Result<(Vector, f64)> {
    let x = &c.positions()[0];
    let u = &c.velocities()[0];
    let t = u / model.inner(x, u, u).sqrt();
    let norm = model.inner(x, v0, v0).sqrt();
    let ip = model.inner(x, v0, &t);
    if ip.abs() > opts.normality_tol * norm.max(f64::MIN_POSITIVE) {
        return Err(GeometryError::NonNormalSeed { inner: ip });
    }
    Ok((v0 - &t * ip, ip))
}

/// RK4 over the sample grid with per-step projection onto the normal space
/// and norm restoration in the model's inner product.
pub(crate) fn integrate_transport(
    model: &impl TransportModel,
    c: &CurveSamples,
    seed: Vector,
    seed_projection: f64,
) -> Result<NormalField> {
    let n = c.len();
    let params = c.params();
    let x0 = &c.positions()[0];
    let target = model.inner(x0, &seed, &seed).sqrt();
    let scale = if target > 0.0 { target } else { 1.0 };
    let mut vectors = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut step_drift = Vec::with_capacity(n);
    let mut v = seed;
    lambda.push(model.multiplier(&c.jet(0), &v)?);
    step_drift.push(0.0);
    vectors.push(v.clone());
    let mut start = c.jet(0);
    for i in 0..n - 1 {
        let h = params[i + 1] - params[i];
        let mid = c.jet_at(params[i] + 0.5 * h);
        let end = c.jet(i + 1);
        let k1 = model.rhs(&start, &v)?;
        let k2 = model.rhs(&mid, &(&v + &k1 * (0.5 * h)))?;
        let k3 = model.rhs(&mid, &(&v + &k2 * (0.5 * h)))?;
        let k4 = model.rhs(&end, &(&v + &k3 * h))?;
        v += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);

        let x = &end.position;
        let u = &end.velocity;
        let t = u / model.inner(x, u, u).sqrt();
        let ip = model.inner(x, &v, &t);
        v -= &t * ip;
        let norm = model.inner(x, &v, &v).sqrt();
        let mut drift = ip.abs() / scale;
        if target > 0.0 {
            drift = drift.max((norm - target).abs() / scale);
            v *= target / norm;
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(GeometryError::NonFinite(format!("transport at sample {}", i + 1)));
        }
        lambda.push(model.multiplier(&end, &v)?);
        step_drift.push(drift);
        vectors.push(v.clone());
        start = end;
    }
    Ok(NormalField {
        params: params.to_vec(),
        vectors,
        lambda: Some(lambda),
        step_drift,
        seed_projection,
    })
}

fn require_unit_speed(c: &CurveSamples, speed: impl Fn(usize) -> f64, tol: f64) -> Result<()> {
    let deviation = (0..c.len()).map(|i| (speed(i) - 1.0).abs()).fold(0.0, f64::max);
    if !(deviation <= tol) {
        return Err(GeometryError::ReparametrizationRequired { deviation });
    }
    Ok(())
}

/// Rotation-minimizing transport of `v0` along a unit-speed curve.
pub fn rm_transport(c: &CurveSamples, v0: &Vector) -> Result<NormalField> {
    rm_transport_with(c, v0, &TransportOptions::default())
}

pub fn rm_transport_with(c: &CurveSamples, v0: &Vector, opts: &TransportOptions) -> Result<NormalField> {
    if v0.len() != c.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: c.dim(),
            found: v0.len(),
        });
    }
    require_unit_speed(c, |i| c.velocities()[i].norm(), opts.unit_speed_tol)?;
    let (seed, projection) = normal_seed(&Flat, c, v0, opts)?;
    integrate_transport(&Flat, c, seed, projection)
}

/// Verdict of the rotation-minimizing test.
#[derive(Debug, Clone, PartialEq)]
pub struct RmVerdict {
    pub verdict: bool,
    pub max_residual: f64,
    pub residuals: Vec<f64>,
}

fn check_grid(c: &CurveSamples, f: &NormalField) -> Result<()> {
    if !c.same_grid(&f.params) || f.vectors.len() != c.len() {
        return Err(GeometryError::MismatchedGrids);
    }
    Ok(())
}

/// Derivative of a field along the samples; fourth order when the grid is
/// long enough. A field on a closed curve need not close up (holonomy), so
/// the stencils never wrap around.
pub(crate) fn field_derivative(c: &CurveSamples, vectors: &[Vector]) -> Vec<Vector> {
    let order = if c.len() >= 5 { DiffOrder::Fourth } else { DiffOrder::Second };
    numeric::derivative(c.params(), vectors, false, order)
}

fn derivative_guard(c: &CurveSamples, f: &NormalField) -> f64 {
    let vmax = f.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let h_min = c.params().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    // differencing leaves rounding noise of order ε |v| / h
    (1e-12 * c.scale()).max(1e3 * f64::EPSILON / h_min) * vmax.max(f64::MIN_POSITIVE)
}

/// Tests whether `v'` is parallel to the tangent: the residual at each
/// sample is the component of `v'` normal to the curve relative to `|v'|`.
///
/// `|v'|` vanishes where an RM field is orthogonal to the curvature, so the
/// denominator is floored by `|t'| |v|`, the size of the tangential part of
/// `v'` that normality of `v` forces.
pub fn is_rm(c: &CurveSamples, f: &NormalField, tol: f64) -> Result<RmVerdict> {
    check_grid(c, f)?;
    let dv = field_derivative(c, &f.vectors);
    let eps = derivative_guard(c, f);
    let residuals: Vec<f64> = dv
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let t = c.unit_tangent(i);
            let a = &c.accelerations()[i];
            let turning = (a - &t * a.dot(&t)).norm() / c.velocities()[i].norm();
            let normal_part = d - &t * d.dot(&t);
            normal_part.norm() / d.norm().max(turning * f.vectors[i].norm()).max(eps)
        })
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(RmVerdict {
        verdict: max_residual < tol,
        max_residual,
        residuals,
    })
}

/// Moving frame along a curve, tangent first.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedCurve {
    pub params: Vec<f64>,
    /// `frames[i][k]` is the `k`-th frame vector at sample `i`.
    pub frames: Vec<Vec<Vector>>,
}

impl FramedCurve {
    /// Field of the `k`-th frame vector.
    pub fn column(&self, k: usize) -> Vec<Vector> {
        self.frames.iter().map(|f| f[k].clone()).collect()
    }

    /// Largest deviation of the Euclidean Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        self.gram_defect(|_, a, b| a.dot(b))
    }

    /// Largest deviation of the Gram matrix in the inner product `inner(i, a, b)`
    /// from the identity.
    pub fn gram_defect(&self, inner: impl Fn(usize, &Vector, &Vector) -> f64) -> f64 {
        let mut worst = 0.0f64;
        for (i, frame) in self.frames.iter().enumerate() {
            for (a, u) in frame.iter().enumerate() {
                for (b, w) in frame.iter().enumerate().skip(a) {
                    let expected = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((inner(i, u, w) - expected).abs());
                }
            }
        }
        worst
    }
}

/// Unit normal built from the coordinate axis least aligned with `t`
/// (lowest index on ties).
pub fn default_normal(t: &Vector) -> Vector {
    let mut best = 0;
    for j in 1..t.len() {
        if t[j].abs() < t[best].abs() {
            best = j;
        }
    }
    let mut e = Vector::zeros(t.len());
    e[best] = 1.0;
    (&e - t * t.dot(&e)).normalize()
}

/// Rotation-minimizing frame `{t, u, t × u}` along a unit-speed space curve.
pub fn rm_frame(c: &CurveSamples, u0: Option<&Vector>) -> Result<FramedCurve> {
    if c.dim() != 3 {
        return Err(GeometryError::UnsupportedDimension {
            expected: 3,
            found: c.dim(),
        });
    }
    let u0 = match u0 {
        Some(u) => {
            if (u.norm() - 1.0).abs() > 1e-8 {
                return Err(GeometryError::InvalidArgument(format!(
                    "frame seed must be a unit vector, norm is {}",
                    u.norm()
                )));
            }
            u.clone()
        }
        None => default_normal(&c.unit_tangent(0)),
    };
    let u = rm_transport(c, &u0)?;
    let frames = u
        .vectors
        .iter()
        .enumerate()
        .map(|(i, ui)| {
            let t = c.unit_tangent(i);
            let w = cross3(&t, ui);
            vec![t, ui.clone(), w]
        })
        .collect();
    Ok(FramedCurve {
        params: u.params,
        frames,
    })
}

/// Sampled ruled surface `f(t, λ) = γ(t) + λ v(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuledSurfaceMesh {
    pub lambdas: Vec<f64>,
    /// Number of curve samples per row.
    pub columns: usize,
    /// Row-major grid: row `j` holds `γ(t_i) + λ_j v(t_i)` for every `i`.
    pub points: Vec<Vector>,
    /// Quads as zero-based indices into `points`, counter-clockwise in
    /// `(i, j)`.
    pub quads: Vec<[usize; 4]>,
}

impl RuledSurfaceMesh {
    pub fn row(&self, j: usize) -> &[Vector] {
        &self.points[j * self.columns..(j + 1) * self.columns]
    }
}

pub fn ruled_surface(
    c: &CurveSamples,
    f: &NormalField,
    lambda_min: f64,
    lambda_max: f64,
    n_rulings: usize,
) -> Result<RuledSurfaceMesh> {
    check_grid(c, f)?;
    if !(lambda_min < lambda_max) || !lambda_min.is_finite() || !lambda_max.is_finite() {
        return Err(GeometryError::InvalidArgument(format!(
            "ruling range [{lambda_min}, {lambda_max}] is empty"
        )));
    }
    if n_rulings < 2 {
        return Err(GeometryError::InvalidArgument(format!(
            "need at least 2 rulings, got {n_rulings}"
        )));
    }
    let lambdas: Vec<f64> = (0..n_rulings)
        .map(|j| {
            if j == n_rulings - 1 {
                lambda_max
            } else {
                lambda_min + (lambda_max - lambda_min) * j as f64 / (n_rulings - 1) as f64
            }
        })
        .collect();
    let columns = c.len();
    let mut points = Vec::with_capacity(columns * n_rulings);
    for &l in &lambdas {
        for (p, v) in c.positions().iter().zip(&f.vectors) {
            points.push(if l == 0.0 { p.clone() } else { p + v * l });
        }
    }
    let mut quads = Vec::with_capacity((columns - 1) * (n_rulings - 1));
    for j in 0..n_rulings - 1 {
        for i in 0..columns - 1 {
            let a = j * columns + i;
            quads.push([a, a + 1, a + 1 + columns, a + columns]);
        }
    }
    Ok(RuledSurfaceMesh {
        lambdas,
        columns,
        points,
        quads,
    })
}

/// Normalized triple product `|[γ', v, v']|`, maximized over the samples.
/// It vanishes exactly when the ruled surface swept by `v` is developable.
pub fn developability_residual(c: &CurveSamples, f: &NormalField) -> Result<f64> {
    if c.dim() != 3 {
        return Err(GeometryError::UnsupportedDimension {
            expected: 3,
            found: c.dim(),
        });
    }
    check_grid(c, f)?;
    let dv = field_derivative(c, &f.vectors);
    let eps = derivative_guard(c, f);
    let mut worst = 0.0f64;
    for ((u, a), (v, dv)) in c.velocities().iter().zip(c.accelerations()).zip(f.vectors.iter().zip(&dv)) {
        let vn = v.norm();
        if vn <= eps {
            continue;
        }
        let un = u.norm();
        // same floor on |v'| as in is_rm
        let turning = (a - u * (a.dot(u) / (un * un))).norm() / un;
        let det = cross3(u, v).dot(dv);
        worst = worst.max(det.abs() / (un * vn * dv.norm().max(turning * vn).max(eps)));
    }
    Ok(worst)
}

/// Angle from the Frenet normal to the RM field seeded with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Twist {
    /// Unwrapped signed angle, measured in the normal plane oriented by `(n, b)`.
    pub theta: Vec<f64>,
    pub total_twist: f64,
}

pub fn frenet_rm_twist(c: &CurveSamples) -> Result<Twist> {
    let frenet = frenet_frame(c)?;
    let u = rm_transport(c, &frenet.normals[0])?;
    let mut theta = Vec::with_capacity(c.len());
    let mut previous = 0.0f64;
    for i in 0..c.len() {
        let raw = u.vectors[i].dot(&frenet.binormals[i]).atan2(u.vectors[i].dot(&frenet.normals[i]));
        let value = if i == 0 {
            raw
        } else {
            let delta = (raw - previous + PI).rem_euclid(TAU) - PI;
            previous + delta
        };
        theta.push(value);
        previous = value;
    }
    let total_twist = theta[theta.len() - 1] - theta[0];
    Ok(Twist { theta, total_twist })
}
