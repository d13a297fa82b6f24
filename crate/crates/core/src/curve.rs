//! Curves: analytic specs and polylines, sampling, arclength
//! reparametrization and Frenet data.

use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{GeometryError, Result};
use crate::expr::Expr;
use crate::numeric::{self, DiffOrder};
use crate::{cross3, Vector};

/// Tolerance on `|speed - 1|` after arclength reparametrization.
pub const UNIT_SPEED_TOL: f64 = 1e-9;

/// Relative tolerance on the gap between the endpoints of a closed curve.
pub const CLOSED_TOL: f64 = 1e-9;

pub type VectorFn = Arc<dyn Fn(f64) -> Vector + Send + Sync>;

/// Position and first two derivatives at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub position: Vector,
    pub velocity: Vector,
    pub acceleration: Vector,
}

/// Anything that can be evaluated with two derivatives at an arbitrary
/// parameter. Transports use it to evaluate the curve between samples.
pub trait CurveSource: Send + Sync {
    fn jet(&self, param: f64) -> Jet;

    /// Tabulated sources only interpolate sample data; arclength
    /// reparametrization of those keeps the sample points.
    fn is_tabulated(&self) -> bool {
        false
    }
}

/// The quadratic form used to measure speed.
pub trait SpeedMetric: Send + Sync {
    fn speed_squared(&self, x: &Vector, v: &Vector) -> f64;

    /// Half the parameter derivative of `speed_squared` along a curve with
    /// position `x`, velocity `v` and coordinate acceleration `a`.
    fn speed_squared_rate(&self, x: &Vector, v: &Vector, a: &Vector) -> f64;
}

/// The standard inner product of the coordinates.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl SpeedMetric for Euclidean {
    fn speed_squared(&self, _x: &Vector, v: &Vector) -> f64 {
        v.norm_squared()
    }

    fn speed_squared_rate(&self, _x: &Vector, v: &Vector, a: &Vector) -> f64 {
        v.dot(a)
    }
}

/// A parametric curve given by closed-form functions on `[t0, t1]`.
#[derive(Clone)]
pub struct AnalyticCurve {
    dim: usize,
    t0: f64,
    t1: f64,
    closed: bool,
    position: VectorFn,
    velocity: Option<VectorFn>,
    acceleration: Option<VectorFn>,
}

impl fmt::Debug for AnalyticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticCurve")
            .field("dim", &self.dim)
            .field("t0", &self.t0)
            .field("t1", &self.t1)
            .field("closed", &self.closed)
            .field("has_derivatives", &self.velocity.is_some())
            .finish()
    }
}

impl AnalyticCurve {
    /// A curve with only its position known; derivatives fall back to
    /// fourth-order finite differences.
    pub fn new(dim: usize, t0: f64, t1: f64, position: VectorFn) -> Self {
        Self {
            dim,
            t0,
            t1,
            closed: false,
            position,
            velocity: None,
            acceleration: None,
        }
    }

    pub fn with_derivatives(mut self, velocity: VectorFn, acceleration: VectorFn) -> Self {
        self.velocity = Some(velocity);
        self.acceleration = Some(acceleration);
        self
    }

    pub fn closed(mut self, closed: bool) -> Self {
        self.closed = closed;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// `(a cos t, a sin t, b t)`.
    pub fn helix(a: f64, b: f64, t0: f64, t1: f64) -> Self {
        Self::new(3, t0, t1, Arc::new(move |t: f64| Vector::from_vec(vec![a * t.cos(), a * t.sin(), b * t])))
            .with_derivatives(
                Arc::new(move |t: f64| Vector::from_vec(vec![-a * t.sin(), a * t.cos(), b])),
                Arc::new(move |t: f64| Vector::from_vec(vec![-a * t.cos(), -a * t.sin(), 0.0])),
            )
    }

    /// Circle of the given radius in the `xy`-plane, closed when the
    /// interval spans a whole number of turns.
    pub fn circle(radius: f64, t0: f64, t1: f64) -> Self {
        let turns = (t1 - t0) / std::f64::consts::TAU;
        let closed = turns >= 1.0 - 1e-12 && (turns - turns.round()).abs() < 1e-12;
        Self::new(3, t0, t1, Arc::new(move |t: f64| Vector::from_vec(vec![radius * t.cos(), radius * t.sin(), 0.0])))
            .with_derivatives(
                Arc::new(move |t: f64| Vector::from_vec(vec![-radius * t.sin(), radius * t.cos(), 0.0])),
                Arc::new(move |t: f64| Vector::from_vec(vec![-radius * t.cos(), -radius * t.sin(), 0.0])),
            )
            .closed(closed)
    }

    /// `origin + t * direction`.
    pub fn line(origin: Vector, direction: Vector, t0: f64, t1: f64) -> Self {
        let dim = origin.len();
        let d = direction.clone();
        Self::new(dim, t0, t1, Arc::new(move |t: f64| &origin + &direction * t)).with_derivatives(
            Arc::new(move |_| d.clone()),
            Arc::new(move |_| Vector::zeros(dim)),
        )
    }

    /// Curve whose coordinates are calculator expressions in `t`; the
    /// derivatives are obtained symbolically.
    pub fn from_expressions(exprs: &[String], t0: f64, t1: f64, closed: bool) -> Result<Self> {
        if exprs.len() < 2 {
            return Err(GeometryError::InvalidSpec(format!(
                "an analytic curve needs at least 2 coordinates, got {}",
                exprs.len()
            )));
        }
        let position: Vec<Expr> = exprs.iter().map(|s| Expr::parse(s, &["t"])).collect::<Result<_>>()?;
        let velocity: Vec<Expr> = position.iter().map(|e| e.derivative(0)).collect();
        let acceleration: Vec<Expr> = velocity.iter().map(|e| e.derivative(0)).collect();
        let lift = |exprs: Vec<Expr>| -> VectorFn {
            Arc::new(move |t: f64| Vector::from_iterator(exprs.len(), exprs.iter().map(|e| e.eval(&[t]))))
        };
        Ok(Self::new(exprs.len(), t0, t1, lift(position))
            .with_derivatives(lift(velocity), lift(acceleration))
            .closed(closed))
    }

    pub fn position(&self, t: f64) -> Vector {
        (self.position)(t)
    }

    fn fd_step(&self) -> f64 {
        (1e-3f64).min((self.t1 - self.t0).abs() / 10.0).max(1e-6)
    }

    fn fd_velocity(&self, f: &VectorFn, t: f64) -> Vector {
        let h = self.fd_step();
        (f(t - 2.0 * h) - f(t + 2.0 * h) + (f(t + h) - f(t - h)) * 8.0) / (12.0 * h)
    }

    fn fd_acceleration(&self, t: f64) -> Vector {
        let h = self.fd_step();
        let p = &self.position;
        ((p(t + h) + p(t - h)) * 16.0 - p(t + 2.0 * h) - p(t - 2.0 * h) - p(t) * 30.0) / (12.0 * h * h)
    }

    /// Checks supplied derivative functions against finite differences of
    /// the position at the given parameters.
    pub fn check_derivatives(&self, params: &[f64]) -> Result<()> {
        let (Some(vel), Some(acc)) = (&self.velocity, &self.acceleration) else {
            return Ok(());
        };
        for &t in params {
            let v = vel(t);
            let fd_v = self.fd_velocity(&self.position, t);
            let scale = 1.0 + v.norm() + self.position(t).norm();
            if (&v - &fd_v).norm() > 1e-6 * scale {
                return Err(GeometryError::InvalidSpec(format!(
                    "velocity function disagrees with finite differences at t = {t}"
                )));
            }
            let a = acc(t);
            let fd_a = self.fd_velocity(vel, t);
            if (&a - &fd_a).norm() > 1e-6 * (scale + a.norm()) {
                return Err(GeometryError::InvalidSpec(format!(
                    "acceleration function disagrees with finite differences at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

impl CurveSource for AnalyticCurve {
    fn jet(&self, t: f64) -> Jet {
        let position = self.position(t);
        let velocity = match &self.velocity {
            Some(v) => v(t),
            None => self.fd_velocity(&self.position, t),
        };
        let acceleration = match &self.acceleration {
            Some(a) => a(t),
            None => self.fd_acceleration(t),
        };
        Jet {
            position,
            velocity,
            acceleration,
        }
    }
}

/// Input description of a curve.
#[derive(Debug, Clone)]
pub enum CurveSpec {
    Analytic(AnalyticCurve),
    Polyline { points: Vec<Vector>, closed: bool },
}

impl From<AnalyticCurve> for CurveSpec {
    fn from(c: AnalyticCurve) -> Self {
        CurveSpec::Analytic(c)
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum CurveDocument {
    Analytic {
        expr: Vec<String>,
        t0: f64,
        t1: f64,
        #[serde(default)]
        closed: bool,
    },
    Polyline {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        closed: bool,
    },
}

impl CurveSpec {
    /// Reads the JSON curve document:
    /// `{"kind": "analytic", "expr": [...], "t0": .., "t1": .., "closed": ..}` or
    /// `{"kind": "polyline", "points": [[x, y, z], ...], "closed": ..}`.
    pub fn from_json_str(src: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(src).map_err(|e| GeometryError::InvalidSpec(e.to_string()))?;
        Self::from_json_value(value)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let doc: CurveDocument =
            serde_json::from_value(value).map_err(|e| GeometryError::InvalidSpec(e.to_string()))?;
        match doc {
            CurveDocument::Analytic { expr, t0, t1, closed } => {
                Ok(AnalyticCurve::from_expressions(&expr, t0, t1, closed)?.into())
            }
            CurveDocument::Polyline { points, closed } => {
                let dim = points.first().map(Vec::len).unwrap_or(0);
                if dim < 2 || points.iter().any(|p| p.len() != dim) {
                    return Err(GeometryError::InvalidSpec(
                        "polyline points must share one dimension of at least 2".into(),
                    ));
                }
                Ok(CurveSpec::Polyline {
                    points: points.into_iter().map(Vector::from_vec).collect(),
                    closed,
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CurveSpec::Analytic(c) => c.dim,
            CurveSpec::Polyline { points, .. } => points.first().map(|p| p.len()).unwrap_or(0),
        }
    }
}

/// Piecewise quintic Hermite interpolation of a sample table.
#[derive(Debug, Clone)]
pub struct TableSource {
    params: Vec<f64>,
    positions: Vec<Vector>,
    velocities: Vec<Vector>,
    accelerations: Vec<Vector>,
}

impl TableSource {
    pub fn new(params: Vec<f64>, positions: Vec<Vector>, velocities: Vec<Vector>, accelerations: Vec<Vector>) -> Self {
        Self {
            params,
            positions,
            velocities,
            accelerations,
        }
    }
}

fn locate(params: &[f64], x: f64) -> usize {
    let k = params.partition_point(|&p| p <= x);
    k.saturating_sub(1).min(params.len() - 2)
}

impl CurveSource for TableSource {
    fn jet(&self, param: f64) -> Jet {
        let k = locate(&self.params, param);
        let h = self.params[k + 1] - self.params[k];
        let u = (param - self.params[k]) / h;
        let (position, velocity, acceleration) = numeric::hermite5(
            &self.positions[k],
            &self.velocities[k],
            &self.accelerations[k],
            &self.positions[k + 1],
            &self.velocities[k + 1],
            &self.accelerations[k + 1],
            h,
            u,
        );
        Jet {
            position,
            velocity,
            acceleration,
        }
    }

    fn is_tabulated(&self) -> bool {
        true
    }
}

/// Reparametrization of a smooth source by arclength in a given metric.
struct ArcLengthSource {
    base: Arc<dyn CurveSource>,
    base_params: Vec<f64>,
    cumulative: Vec<f64>,
    metric: Arc<dyn SpeedMetric>,
}

impl ArcLengthSource {
    fn speed(&self, t: f64) -> f64 {
        let jet = self.base.jet(t);
        self.metric.speed_squared(&jet.position, &jet.velocity).sqrt()
    }

    fn base_param(&self, s: f64) -> f64 {
        let k = locate(&self.cumulative, s);
        let (ta, tb) = (self.base_params[k], self.base_params[k + 1]);
        let (sa, sb) = (self.cumulative[k], self.cumulative[k + 1]);
        if s <= sa {
            return ta;
        }
        if s >= sb {
            return tb;
        }
        let target = s - sa;
        let mut t = ta + (tb - ta) * target / (sb - sa);
        let tol = 1e-15 * (sb - sa).max(1e-300);
        for _ in 0..40 {
            let f = numeric::integrate(|x| self.speed(x), ta, t, tol) - target;
            let step = f / self.speed(t);
            let next = (t - step).clamp(ta, tb);
            let done = (next - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(tb - ta);
            t = next;
            if done {
                break;
            }
        }
        t
    }
}

impl CurveSource for ArcLengthSource {
    fn jet(&self, s: f64) -> Jet {
        let t = self.base_param(s);
        let base = self.base.jet(t);
        let speed_sq = self.metric.speed_squared(&base.position, &base.velocity);
        let rate = self
            .metric
            .speed_squared_rate(&base.position, &base.velocity, &base.acceleration);
        let speed = speed_sq.sqrt();
        let velocity = &base.velocity / speed;
        let acceleration = &base.acceleration / speed_sq - &base.velocity * (rate / (speed_sq * speed_sq));
        Jet {
            position: base.position,
            velocity,
            acceleration,
        }
    }
}

/// The same curve traversed backwards.
struct ReversedSource {
    base: Arc<dyn CurveSource>,
    pivot: f64,
}

impl CurveSource for ReversedSource {
    fn jet(&self, param: f64) -> Jet {
        let jet = self.base.jet(self.pivot - param);
        Jet {
            position: jet.position,
            velocity: -jet.velocity,
            acceleration: jet.acceleration,
        }
    }

    fn is_tabulated(&self) -> bool {
        self.base.is_tabulated()
    }
}

/// A curve sampled on a strictly increasing parameter grid.
///
/// Speeds and arclengths are measured in the metric the samples were built
/// with (Euclidean unless reparametrized in a chart metric). The last sample
/// of a closed curve repeats the first.
#[derive(Clone)]
pub struct CurveSamples {
    params: Vec<f64>,
    positions: Vec<Vector>,
    velocities: Vec<Vector>,
    accelerations: Vec<Vector>,
    speeds: Vec<f64>,
    cumulative_arclength: Vec<f64>,
    closed: bool,
    source: Arc<dyn CurveSource>,
}

impl fmt::Debug for CurveSamples {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveSamples")
            .field("len", &self.params.len())
            .field("dim", &self.dim())
            .field("length", &self.length())
            .field("closed", &self.closed)
            .finish()
    }
}

impl CurveSamples {
    /// Assembles samples from jets evaluated elsewhere, checking the sample
    /// invariants.
    pub fn from_parts(
        params: Vec<f64>,
        jets: Vec<Jet>,
        speeds: Vec<f64>,
        cumulative_arclength: Vec<f64>,
        closed: bool,
        source: Arc<dyn CurveSource>,
    ) -> Result<Self> {
        let n = params.len();
        if n < 2 || jets.len() != n || speeds.len() != n || cumulative_arclength.len() != n {
            return Err(GeometryError::InvalidArgument("inconsistent sample table lengths".into()));
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::InvalidArgument("sample parameters must increase strictly".into()));
        }
        if let Some(i) = speeds.iter().position(|s| !(*s > 0.0)) {
            return Err(GeometryError::DegenerateCurve { param: params[i] });
        }
        if cumulative_arclength[0] != 0.0 {
            return Err(GeometryError::InconsistentArclength { index: 0 });
        }
        if let Some(i) = cumulative_arclength.windows(2).position(|w| !(w[1] >= w[0])) {
            return Err(GeometryError::InconsistentArclength { index: i + 1 });
        }
        let mut positions = Vec::with_capacity(n);
        let mut velocities = Vec::with_capacity(n);
        let mut accelerations = Vec::with_capacity(n);
        for jet in jets {
            positions.push(jet.position);
            velocities.push(jet.velocity);
            accelerations.push(jet.acceleration);
        }
        Ok(Self {
            params,
            positions,
            velocities,
            accelerations,
            speeds,
            cumulative_arclength,
            closed,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn positions(&self) -> &[Vector] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vector] {
        &self.velocities
    }

    pub fn accelerations(&self) -> &[Vector] {
        &self.accelerations
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn cumulative_arclength(&self) -> &[f64] {
        &self.cumulative_arclength
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        *self.cumulative_arclength.last().unwrap()
    }

    pub fn source(&self) -> &Arc<dyn CurveSource> {
        &self.source
    }

    /// Evaluates the underlying curve between samples.
    pub fn jet_at(&self, param: f64) -> Jet {
        self.source.jet(param)
    }

    pub fn jet(&self, i: usize) -> Jet {
        Jet {
            position: self.positions[i].clone(),
            velocity: self.velocities[i].clone(),
            acceleration: self.accelerations[i].clone(),
        }
    }

    /// Euclidean unit tangent at sample `i`.
    pub fn unit_tangent(&self, i: usize) -> Vector {
        self.velocities[i].normalize()
    }

    /// Largest `|speed - 1|` over the samples.
    pub fn max_speed_deviation(&self) -> f64 {
        self.speeds.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Length-like scale used to normalize tolerances.
    pub fn scale(&self) -> f64 {
        let extent = self
            .positions
            .iter()
            .map(|p| p.norm())
            .fold(0.0, f64::max);
        extent.max(self.length()).max(1.0)
    }

    /// The same point set traversed in the opposite direction.
    pub fn reversed(&self) -> CurveSamples {
        let pivot = self.params[0] + self.params[self.len() - 1];
        let total = self.length();
        Self {
            params: self.params.iter().rev().map(|p| pivot - p).collect(),
            positions: self.positions.iter().rev().cloned().collect(),
            velocities: self.velocities.iter().rev().map(|v| -v).collect(),
            accelerations: self.accelerations.iter().rev().cloned().collect(),
            speeds: self.speeds.iter().rev().copied().collect(),
            cumulative_arclength: self.cumulative_arclength.iter().rev().map(|c| total - c).collect(),
            closed: self.closed,
            source: Arc::new(ReversedSource {
                base: self.source.clone(),
                pivot,
            }),
        }
    }

    pub(crate) fn same_grid(&self, params: &[f64]) -> bool {
        self.params.len() == params.len() && self.params.iter().zip(params).all(|(a, b)| a == b)
    }
}

/// Samples a curve spec.
///
/// Analytic curves are evaluated at `n_samples` uniformly spaced parameters
/// with their closed-form derivatives. Polylines keep their vertices,
/// parametrized by cumulative chord length, with derivatives from local
/// quadratics through consecutive points.
pub fn sample_curve(spec: &CurveSpec, n_samples: usize) -> Result<CurveSamples> {
    if n_samples < 4 {
        return Err(GeometryError::InvalidArgument(format!(
            "n_samples must be at least 4, got {n_samples}"
        )));
    }
    match spec {
        CurveSpec::Analytic(curve) => sample_analytic(curve, n_samples),
        CurveSpec::Polyline { points, closed } => sample_polyline(points, *closed),
    }
}

fn sample_analytic(curve: &AnalyticCurve, n: usize) -> Result<CurveSamples> {
    if !(curve.t1 > curve.t0) || !curve.t0.is_finite() || !curve.t1.is_finite() {
        return Err(GeometryError::InvalidSpec(format!(
            "parameter interval [{}, {}] is empty",
            curve.t0, curve.t1
        )));
    }
    let span = curve.t1 - curve.t0;
    let params: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                curve.t1
            } else {
                curve.t0 + span * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    curve.check_derivatives(&params)?;
    let jets: Vec<Jet> = params.iter().map(|&t| curve.jet(t)).collect();
    for (jet, t) in jets.iter().zip(&params) {
        if jet.position.len() != curve.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: curve.dim,
                found: jet.position.len(),
            });
        }
        if jet.position.iter().chain(jet.velocity.iter()).any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite(format!("curve evaluation at t = {t}")));
        }
    }
    let speeds: Vec<f64> = jets.iter().map(|j| j.velocity.norm()).collect();
    let max_speed = speeds.iter().copied().fold(0.0, f64::max);
    if let Some(i) = speeds.iter().position(|&s| s <= 1e-12 * max_speed.max(1.0)) {
        return Err(GeometryError::DegenerateCurve { param: params[i] });
    }
    let source: Arc<dyn CurveSource> = Arc::new(curve.clone());
    let cumulative = cumulative_length(source.as_ref(), &Euclidean, &params);
    check_closure(&jets[0].position, &jets[n - 1].position, curve.closed, cumulative[n - 1])?;
    CurveSamples::from_parts(params, jets, speeds, cumulative, curve.closed, source)
}

fn check_closure(first: &Vector, last: &Vector, closed: bool, length: f64) -> Result<()> {
    if closed {
        let gap = (last - first).norm();
        let tolerance = CLOSED_TOL * length.max(f64::MIN_POSITIVE);
        if gap > tolerance {
            return Err(GeometryError::NotClosed { gap, tolerance });
        }
    }
    Ok(())
}

fn cumulative_length(source: &dyn CurveSource, metric: &dyn SpeedMetric, params: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(params.len());
    let mut total = 0.0;
    out.push(0.0);
    for w in params.windows(2) {
        let piece = numeric::integrate(
            |t| {
                let jet = source.jet(t);
                metric.speed_squared(&jet.position, &jet.velocity).sqrt()
            },
            w[0],
            w[1],
            1e-15 * (w[1] - w[0]),
        );
        total += piece;
        out.push(total);
    }
    out
}

fn sample_polyline(points: &[Vector], closed: bool) -> Result<CurveSamples> {
    let n = points.len();
    let dim = points.first().map(|p| p.len()).unwrap_or(0);
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(GeometryError::DimensionMismatch { expected: dim, found: p.len() });
    }
    if dim < 2 {
        return Err(GeometryError::InvalidSpec("polyline dimension must be at least 2".into()));
    }
    if points.iter().flat_map(|p| p.iter()).any(|x| !x.is_finite()) {
        return Err(GeometryError::NonFinite("polyline coordinates".into()));
    }
    for i in 0..n.saturating_sub(1) {
        if points[i] == points[i + 1] {
            return Err(GeometryError::DuplicatePoints { first: i, second: i + 1 });
        }
    }
    let distinct = if closed { n.saturating_sub(1) } else { n };
    if distinct < 3 || (closed && n < 4) {
        return Err(GeometryError::InvalidSpec(format!(
            "a polyline needs at least 3 distinct points, got {distinct}"
        )));
    }
    let mut params = Vec::with_capacity(n);
    params.push(0.0);
    for w in points.windows(2) {
        params.push(params.last().unwrap() + (&w[1] - &w[0]).norm());
    }
    check_closure(&points[0], &points[n - 1], closed, params[n - 1])?;
    let velocities = numeric::derivative(&params, points, closed, DiffOrder::Second);
    let accelerations = quadratic_second_derivatives(&params, points, closed);
    let speeds: Vec<f64> = velocities.iter().map(|v| v.norm()).collect();
    if let Some(i) = speeds.iter().position(|&s| s <= 1e-12) {
        return Err(GeometryError::DegenerateCurve { param: params[i] });
    }
    let source = Arc::new(TableSource::new(
        params.clone(),
        points.to_vec(),
        velocities.clone(),
        accelerations.clone(),
    ));
    let jets = points
        .iter()
        .zip(velocities)
        .zip(accelerations)
        .map(|((p, v), a)| Jet {
            position: p.clone(),
            velocity: v,
            acceleration: a,
        })
        .collect();
    let cumulative = params.clone();
    CurveSamples::from_parts(params, jets, speeds, cumulative, closed, source)
}

/// Second derivative of the quadratic through three consecutive samples.
fn quadratic_second_derivatives(params: &[f64], points: &[Vector], closed: bool) -> Vec<Vector> {
    let n = points.len();
    let period = params[n - 1] - params[0];
    let second = |x: [f64; 3], p: [&Vector; 3]| -> Vector {
        let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
        ((p[2] - p[1]) / h1 - (p[1] - p[0]) / h0) * (2.0 / (h0 + h1))
    };
    (0..n)
        .map(|i| {
            if closed && (i == 0 || i == n - 1) {
                let x = [params[n - 2] - period, params[0], params[1]];
                second(x, [&points[n - 2], &points[0], &points[1]])
            } else {
                let c = i.clamp(1, n - 2);
                second(
                    [params[c - 1], params[c], params[c + 1]],
                    [&points[c - 1], &points[c], &points[c + 1]],
                )
            }
        })
        .collect()
}

/// Reparametrizes by Euclidean arclength.
pub fn arclength_reparametrize(c: &CurveSamples) -> Result<CurveSamples> {
    arclength_reparametrize_with(c, Arc::new(Euclidean))
}

/// Reparametrizes by arclength measured in `metric`.
///
/// Smooth sources are resampled at uniformly spaced arclength values (the
/// inverse arclength map is solved by Newton iteration on Gauss-Legendre
/// quadrature). Tabulated sources keep their vertices and take chord
/// lengths as arclength.
pub fn arclength_reparametrize_with(c: &CurveSamples, metric: Arc<dyn SpeedMetric>) -> Result<CurveSamples> {
    if let Some(i) = c.speeds.iter().position(|s| !(*s > 0.0)) {
        return Err(GeometryError::DegenerateCurve { param: c.params[i] });
    }
    if let Some(i) = c.cumulative_arclength.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(GeometryError::InconsistentArclength { index: i + 1 });
    }
    let n = c.len();
    let samples = if c.source.is_tabulated() {
        reparametrize_table(c, metric.as_ref())?
    } else {
        let cumulative = cumulative_length(c.source.as_ref(), metric.as_ref(), &c.params);
        if let Some(i) = cumulative.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(GeometryError::InconsistentArclength { index: i + 1 });
        }
        let total = cumulative[n - 1];
        let source = Arc::new(ArcLengthSource {
            base: c.source.clone(),
            base_params: c.params.clone(),
            cumulative,
            metric: metric.clone(),
        });
        let params: Vec<f64> = (0..n)
            .map(|i| if i == n - 1 { total } else { total * i as f64 / (n - 1) as f64 })
            .collect();
        let jets: Vec<Jet> = params.iter().map(|&s| source.jet(s)).collect();
        let speeds: Vec<f64> = jets
            .iter()
            .map(|j| metric.speed_squared(&j.position, &j.velocity).sqrt())
            .collect();
        CurveSamples::from_parts(params.clone(), jets, speeds, params, c.closed, source)?
    };
    let deviation = samples.max_speed_deviation();
    if !(deviation < UNIT_SPEED_TOL) {
        return Err(GeometryError::InconsistentArclength {
            index: samples
                .speeds
                .iter()
                .position(|s| !((s - 1.0).abs() < UNIT_SPEED_TOL))
                .unwrap_or(0),
        });
    }
    Ok(samples)
}

fn reparametrize_table(c: &CurveSamples, metric: &dyn SpeedMetric) -> Result<CurveSamples> {
    let n = c.len();
    let mut params = Vec::with_capacity(n);
    params.push(0.0);
    for i in 0..n - 1 {
        let chord = &c.positions[i + 1] - &c.positions[i];
        let mid = (&c.positions[i + 1] + &c.positions[i]) * 0.5;
        let piece = metric.speed_squared(&mid, &chord).sqrt();
        if !(piece > 0.0) {
            return Err(GeometryError::InconsistentArclength { index: i + 1 });
        }
        params.push(params[i] + piece);
    }
    let mut jets = Vec::with_capacity(n);
    for i in 0..n {
        let (x, v, a) = (&c.positions[i], &c.velocities[i], &c.accelerations[i]);
        let speed_sq = metric.speed_squared(x, v);
        let rate = metric.speed_squared_rate(x, v, a);
        let speed = speed_sq.sqrt();
        jets.push(Jet {
            position: x.clone(),
            velocity: v / speed,
            acceleration: a / speed_sq - v * (rate / (speed_sq * speed_sq)),
        });
    }
    let speeds = vec![1.0; n];
    let source = Arc::new(TableSource::new(
        params.clone(),
        c.positions.clone(),
        jets.iter().map(|j| j.velocity.clone()).collect(),
        jets.iter().map(|j| j.acceleration.clone()).collect(),
    ));
    CurveSamples::from_parts(params.clone(), jets, speeds, params, c.closed, source)
}

/// Frenet apparatus of a space curve at each sample.
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub tangents: Vec<Vector>,
    pub normals: Vec<Vector>,
    pub binormals: Vec<Vector>,
    pub curvature: Vec<f64>,
    pub torsion: Vec<f64>,
    /// Per-sample `max(|n' + κt - τb|, |b' + τn|)` with derivatives by
    /// second-order differencing in arclength.
    pub serret_residual: Vec<f64>,
}

impl FrenetData {
    pub fn max_serret_residual(&self) -> f64 {
        self.serret_residual.iter().copied().fold(0.0, f64::max)
    }
}

/// Frenet frame with the default curvature threshold `1e-8 / length`.
pub fn frenet_frame(c: &CurveSamples) -> Result<FrenetData> {
    frenet_frame_with(c, 1e-8 / c.length())
}

/// Frenet frame, curvature and torsion. Curvature comes from the first two
/// derivatives; torsion is `<n', b>` with `n'` differenced along the samples.
pub fn frenet_frame_with(c: &CurveSamples, kappa_min: f64) -> Result<FrenetData> {
    if c.dim() != 3 {
        return Err(GeometryError::UnsupportedDimension { expected: 3, found: c.dim() });
    }
    if c.len() < 3 {
        return Err(GeometryError::InvalidArgument("Frenet frame needs at least 3 samples".into()));
    }
    let n = c.len();
    let mut tangents = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut binormals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut flat = Vec::new();
    for i in 0..n {
        let v = &c.velocities[i];
        let a = &c.accelerations[i];
        let speed = v.norm();
        let t = v / speed;
        let kappa = cross3(v, a).norm() / speed.powi(3);
        if !(kappa > kappa_min) {
            flat.push(i);
            continue;
        }
        let normal = (a - &t * t.dot(a)).normalize();
        let binormal = cross3(&t, &normal);
        tangents.push(t);
        normals.push(normal);
        binormals.push(binormal);
        curvature.push(kappa);
    }
    if !flat.is_empty() {
        return Err(GeometryError::FrenetUndefined {
            samples: flat,
            threshold: kappa_min,
        });
    }
    let per_arclength = |d: Vec<Vector>| -> Vec<Vector> {
        d.into_iter().zip(&c.speeds).map(|(v, s)| v / *s).collect()
    };
    let dn = per_arclength(numeric::derivative(&c.params, &normals, c.closed, DiffOrder::Second));
    let db = per_arclength(numeric::derivative(&c.params, &binormals, c.closed, DiffOrder::Second));
    let torsion: Vec<f64> = dn.iter().zip(&binormals).map(|(d, b)| d.dot(b)).collect();
    let serret_residual = (0..n)
        .map(|i| {
            let r1 = &dn[i] + &tangents[i] * curvature[i] - &binormals[i] * torsion[i];
            let r2 = &db[i] + &normals[i] * torsion[i];
            r1.norm().max(r2.norm())
        })
        .collect();
    Ok(FrenetData {
        tangents,
        normals,
        binormals,
        curvature,
        torsion,
        serret_residual,
    })
}
