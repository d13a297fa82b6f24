use std::fmt;
use std::sync::Arc;

use crate::curve::SpeedMetric;
use crate::error::{GeometryError, Result};
use crate::expr::Expr;
use crate::{Matrix, Vector};

pub type MetricFn = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;
pub type ChristoffelFn = Arc<dyn Fn(&Vector) -> Christoffel + Send + Sync>;
pub type DomainFn = Arc<dyn Fn(&Vector) -> bool + Send + Sync>;

/// Largest accepted condition number of the metric.
pub const MAX_CONDITION: f64 = 1e12;

/// Christoffel symbols `Γ^k_ij` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    out.data[(k * dim + i) * dim + j] = f(k, i, j);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = value;
    }

    /// `Γ^k_ij u^i w^j`.
    pub fn contract(&self, u: &Vector, w: &Vector) -> Vector {
        let n = self.dim;
        Vector::from_fn(n, |k, _| {
            let mut acc = 0.0;
            for i in 0..n {
                if u[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    acc += self.data[(k * n + i) * n + j] * u[i] * w[j];
                }
            }
            acc
        })
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Γ^k_ij - Γ^k_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// A coordinate chart of a Riemannian manifold.
#[derive(Clone)]
pub struct MetricChart {
    name: String,
    dim: usize,
    metric: MetricFn,
    christoffel: Option<ChristoffelFn>,
    domain: DomainFn,
    periods: Option<Vec<f64>>,
    flat: bool,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("closed_form_christoffel", &self.christoffel.is_some())
            .field("periods", &self.periods)
            .field("flat", &self.flat)
            .finish()
    }
}

impl MetricChart {
    /// Chart on all of `R^n` with the given metric; Christoffel symbols come
    /// from finite differences until [`with_christoffel`](Self::with_christoffel)
    /// supplies a closed form.
    pub fn new(name: impl Into<String>, dim: usize, metric: MetricFn) -> Self {
        Self {
            name: name.into(),
            dim,
            metric,
            christoffel: None,
            domain: Arc::new(|_| true),
            periods: None,
            flat: false,
        }
    }

    /// The identity metric on `R^n`.
    pub fn flat(dim: usize) -> Self {
        let mut chart = Self::new(format!("euclidean{dim}"), dim, Arc::new(move |_| Matrix::identity(dim, dim)))
            .with_christoffel(Arc::new(move |_| Christoffel::zeros(dim)));
        chart.flat = true;
        chart
    }

    pub fn with_christoffel(mut self, christoffel: ChristoffelFn) -> Self {
        self.christoffel = Some(christoffel);
        self
    }

    pub fn with_domain(mut self, domain: DomainFn) -> Self {
        self.domain = domain;
        self
    }

    /// Declares the coordinates periodic (a flat torus and the like).
    pub fn with_periods(mut self, periods: Vec<f64>) -> Self {
        self.periods = Some(periods);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Chart from calculator expressions in `x1..xn`.
    ///
    /// `domain` lists expressions that must evaluate to a positive number
    /// inside the chart.
    pub fn from_expressions(
        name: impl Into<String>,
        metric: &[Vec<String>],
        christoffel: Option<&[Vec<Vec<String>>]>,
        domain: &[String],
    ) -> Result<Self> {
        let dim = metric.len();
        if dim == 0 || metric.iter().any(|row| row.len() != dim) {
            return Err(GeometryError::InvalidSpec("metric must be a square matrix of expressions".into()));
        }
        let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        let vars: Vec<&str> = names.iter().map(String::as_str).collect();
        let parse_all = |rows: &[Vec<String>]| -> Result<Vec<Vec<Expr>>> {
            rows.iter()
                .map(|row| row.iter().map(|s| Expr::parse(s, &vars)).collect())
                .collect()
        };
        let g = parse_all(metric)?;
        let mut chart = Self::new(
            name,
            dim,
            Arc::new(move |x: &Vector| Matrix::from_fn(dim, dim, |i, j| g[i][j].eval(x.as_slice()))),
        );
        if let Some(symbols) = christoffel {
            if symbols.len() != dim || symbols.iter().any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim)) {
                return Err(GeometryError::InvalidSpec(
                    "christoffel must be an n x n x n array of expressions indexed [k][i][j]".into(),
                ));
            }
            let gamma: Vec<Vec<Vec<Expr>>> = symbols.iter().map(|m| parse_all(m)).collect::<Result<_>>()?;
            chart = chart.with_christoffel(Arc::new(move |x: &Vector| {
                Christoffel::from_fn(dim, |k, i, j| gamma[k][i][j].eval(x.as_slice()))
            }));
        }
        let conditions: Vec<Expr> = domain.iter().map(|s| Expr::parse(s, &vars)).collect::<Result<_>>()?;
        if !conditions.is_empty() {
            chart = chart.with_domain(Arc::new(move |x: &Vector| {
                conditions.iter().all(|c| c.eval(x.as_slice()) > 0.0)
            }));
        }
        Ok(chart)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub fn periods(&self) -> Option<&[f64]> {
        self.periods.as_deref()
    }

    pub fn has_closed_form_christoffel(&self) -> bool {
        self.christoffel.is_some()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.len() == self.dim && x.iter().all(|c| c.is_finite()) && (self.domain)(x)
    }

    /// Metric matrix at `x`, unchecked.
    pub fn metric(&self, x: &Vector) -> Matrix {
        (self.metric)(x)
    }

    /// Metric matrix at `x` after the domain, symmetry and conditioning
    /// checks.
    pub fn checked_metric(&self, x: &Vector) -> Result<Matrix> {
        if !self.contains(x) {
            return Err(GeometryError::PointOutsideDomain(format!("{:?}", x.as_slice())));
        }
        let g = self.metric(x);
        check_metric(&g)?;
        Ok(g)
    }

    pub fn inner(&self, x: &Vector, a: &Vector, b: &Vector) -> f64 {
        if self.flat {
            a.dot(b)
        } else {
            a.dot(&((self.metric)(x) * b))
        }
    }

    pub fn norm(&self, x: &Vector, a: &Vector) -> f64 {
        self.inner(x, a, a).sqrt()
    }

    /// Christoffel symbols at `x`: the closed form when available, centered
    /// differences otherwise.
    pub fn christoffel(&self, x: &Vector) -> Result<Christoffel> {
        match &self.christoffel {
            Some(f) => {
                if !self.contains(x) {
                    return Err(GeometryError::PointOutsideDomain(format!("{:?}", x.as_slice())));
                }
                Ok(f(x))
            }
            None => christoffel_fd(self, x, default_step(x)),
        }
    }

    /// Largest `|∂_k g_ij - Γ^l_ki g_lj - Γ^l_kj g_il|` at `x` relative to
    /// `max(1, max |∂g|)`, with the metric derivative taken by centered
    /// differences.
    pub fn compatibility_residual(&self, x: &Vector) -> Result<f64> {
        let n = self.dim;
        let h = default_step(x);
        let g = self.checked_metric(x)?;
        let gamma = self.christoffel(x)?;
        let dg = metric_derivatives(self, x, h)?;
        let mut worst = 0.0f64;
        for (k, dgk) in dg.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let mut r = dgk[(i, j)];
                    for l in 0..n {
                        r -= gamma.get(l, k, i) * g[(l, j)] + gamma.get(l, k, j) * g[(i, l)];
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
        let scale = dg.iter().map(|m| m.amax()).fold(1.0, f64::max);
        Ok(worst / scale)
    }
}

impl SpeedMetric for MetricChart {
    fn speed_squared(&self, x: &Vector, v: &Vector) -> f64 {
        self.inner(x, v, v)
    }

    fn speed_squared_rate(&self, x: &Vector, v: &Vector, a: &Vector) -> f64 {
        if self.flat {
            return v.dot(a);
        }
        match self.christoffel(x) {
            Ok(gamma) => self.inner(x, &(a + gamma.contract(v, v)), v),
            Err(_) => f64::NAN,
        }
    }
}

pub(crate) fn default_step(x: &Vector) -> f64 {
    1e-5 * x.amax().max(1.0)
}

fn check_metric(g: &Matrix) -> Result<()> {
    let scale = g.amax().max(f64::MIN_POSITIVE);
    let asymmetry = (g - g.transpose()).amax();
    if asymmetry > 1e-12 * scale.max(1.0) {
        return Err(GeometryError::AsymmetricMetric { asymmetry });
    }
    if !g.iter().all(|v| v.is_finite()) {
        return Err(GeometryError::SingularMetric { condition: f64::INFINITY });
    }
    let eigen = g.clone().symmetric_eigenvalues();
    let lo = eigen.min();
    let hi = eigen.max();
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(GeometryError::SingularMetric { condition });
    }
    Ok(())
}

fn metric_derivatives(chart: &MetricChart, x: &Vector, h: f64) -> Result<Vec<Matrix>> {
    (0..chart.dim)
        .map(|l| {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[l] += h;
            minus[l] -= h;
            if !chart.contains(&plus) || !chart.contains(&minus) {
                return Err(GeometryError::PointOutsideDomain(format!(
                    "{:?} is within {h} of the chart boundary",
                    x.as_slice()
                )));
            }
            Ok((chart.metric(&plus) - chart.metric(&minus)) / (2.0 * h))
        })
        .collect()
}

/// Christoffel symbols of the metric by centered differences of step `h`:
/// `Γ^k_ij = ½ g^{kl} (∂_i g_lj + ∂_j g_li - ∂_l g_ij)`.
pub fn christoffel_fd(chart: &MetricChart, x: &Vector, h: f64) -> Result<Christoffel> {
    if x.len() != chart.dim {
        return Err(GeometryError::DimensionMismatch {
            expected: chart.dim,
            found: x.len(),
        });
    }
    if !(h > 0.0) {
        return Err(GeometryError::InvalidArgument(format!("difference step must be positive, got {h}")));
    }
    let n = chart.dim;
    let g = chart.checked_metric(x)?;
    let ginv = g
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(GeometryError::SingularMetric { condition: f64::INFINITY })?;
    let dg = metric_derivatives(chart, x, h)?;
    let mut lowered = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                lowered[(l * n + i) * n + j] = 0.5 * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
            }
        }
    }
    Ok(Christoffel::from_fn(n, |k, i, j| {
        // average the (i, j) and (j, i) sums so the result is exactly symmetric
        let mut a = 0.0;
        let mut b = 0.0;
        for l in 0..n {
            a += ginv[(k, l)] * lowered[(l * n + i) * n + j];
            b += ginv[(k, l)] * lowered[(l * n + j) * n + i];
        }
        0.5 * (a + b)
    }))
}
