use std::fmt;
use std::sync::Arc;

use super::chart::{DomainFn, MetricChart};
use crate::curve::{CurveSamples, CurveSource, Jet};
use crate::error::{GeometryError, Result};
use crate::euclidean::NormalField;
use crate::{Matrix, Vector};

pub type MapFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type DifferentialFn = Arc<dyn Fn(&Vector, &Vector) -> Vector + Send + Sync>;

/// A metric-preserving map of a chart to itself.
#[derive(Clone)]
pub struct Isometry {
    name: String,
    map: MapFn,
    differential: Option<DifferentialFn>,
    affine: bool,
    domain: Option<DomainFn>,
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Isometry")
            .field("name", &self.name)
            .field("closed_form_differential", &self.differential.is_some())
            .field("affine", &self.affine)
            .finish()
    }
}

impl Isometry {
    /// Map whose differential is taken by finite differences.
    pub fn new(name: impl Into<String>, map: MapFn) -> Self {
        Self {
            name: name.into(),
            map,
            differential: None,
            affine: false,
            domain: None,
        }
    }

    /// `x ↦ A x + b`.
    pub fn affine(name: impl Into<String>, linear: Matrix, offset: Vector) -> Self {
        let a = linear.clone();
        Self {
            name: name.into(),
            map: Arc::new(move |x: &Vector| &a * x + &offset),
            differential: Some(Arc::new(move |_: &Vector, u: &Vector| &linear * u)),
            affine: true,
            domain: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::affine("identity", Matrix::identity(dim, dim), Vector::zeros(dim))
    }

    pub fn with_differential(mut self, differential: DifferentialFn) -> Self {
        self.differential = Some(differential);
        self
    }

    pub fn with_domain(mut self, domain: DomainFn) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn is_defined_at(&self, x: &Vector) -> bool {
        self.domain.as_ref().is_none_or(|d| d(x))
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        (self.map)(x)
    }

    fn step(x: &Vector) -> f64 {
        1e-6 * x.amax().max(1.0)
    }

    /// Differential `μ_*` at `x` applied to `u`.
    pub fn push(&self, x: &Vector, u: &Vector) -> Vector {
        match &self.differential {
            Some(d) => d(x, u),
            None => self.jacobian(x) * u,
        }
    }

    /// Jacobian matrix at `x`, by centered differences when no closed form
    /// was given.
    pub fn jacobian(&self, x: &Vector) -> Matrix {
        let n = x.len();
        let mut columns = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = Vector::zeros(n);
            e[k] = 1.0;
            columns.push(match &self.differential {
                Some(d) => d(x, &e),
                None => {
                    let h = Self::step(x);
                    (self.apply(&(x + &e * h)) - self.apply(&(x - &e * h))) / (2.0 * h)
                }
            });
        }
        Matrix::from_columns(&columns)
    }

    /// Second derivative of `μ ∘ γ` from the jet of `γ`: `μ_* a + D²μ(u, u)`.
    /// The quadratic term vanishes for affine maps and is differenced
    /// otherwise.
    fn push_acceleration(&self, x: &Vector, u: &Vector, a: &Vector) -> Vector {
        let linear = self.push(x, a);
        if self.affine {
            return linear;
        }
        let speed = u.norm();
        if speed == 0.0 {
            return linear;
        }
        let eps = 1e-4 * x.amax().max(1.0) / speed;
        let plus = self.apply(&(x + u * eps));
        let minus = self.apply(&(x - u * eps));
        linear + (plus - self.apply(x) * 2.0 + minus) / (eps * eps)
    }

    /// Largest `|g_{μx}(μ_*u, μ_*w) - g_x(u, w)|` over the given triples.
    pub fn metric_defect(&self, chart: &MetricChart, samples: &[(Vector, Vector, Vector)]) -> f64 {
        samples
            .iter()
            .map(|(x, u, w)| {
                let y = self.apply(x);
                (chart.inner(&y, &self.push(x, u), &self.push(x, w)) - chart.inner(x, u, w)).abs()
            })
            .fold(0.0, f64::max)
    }
}

struct PushedSource {
    base: Arc<dyn CurveSource>,
    isometry: Isometry,
}

impl CurveSource for PushedSource {
    fn jet(&self, param: f64) -> Jet {
        let jet = self.base.jet(param);
        self.isometry.push_jet(&jet)
    }

    fn is_tabulated(&self) -> bool {
        self.base.is_tabulated()
    }
}

impl Isometry {
    fn push_jet(&self, jet: &Jet) -> Jet {
        Jet {
            position: self.apply(&jet.position),
            velocity: self.push(&jet.position, &jet.velocity),
            acceleration: self.push_acceleration(&jet.position, &jet.velocity, &jet.acceleration),
        }
    }
}

/// Image of a curve and a field along it under an isometry.
#[derive(Debug, Clone)]
pub struct PushForward {
    pub curve: CurveSamples,
    pub field: NormalField,
}

/// Maps the curve through `μ` and the field through `μ_*`, on the same
/// parameter grid. Speeds and arclengths carry over unchanged since `μ`
/// preserves the metric they were measured in.
pub fn pushforward_field(isometry: &Isometry, c: &CurveSamples, f: &NormalField) -> Result<PushForward> {
    if !c.same_grid(&f.params) || f.vectors.len() != c.len() {
        return Err(GeometryError::MismatchedGrids);
    }
    if let Some(index) = c.positions().iter().position(|x| !isometry.is_defined_at(x)) {
        return Err(GeometryError::OutsideDomain { index });
    }
    let jets: Vec<Jet> = (0..c.len()).map(|i| isometry.push_jet(&c.jet(i))).collect();
    let source = Arc::new(PushedSource {
        base: c.source().clone(),
        isometry: isometry.clone(),
    });
    let curve = CurveSamples::from_parts(
        c.params().to_vec(),
        jets,
        c.speeds().to_vec(),
        c.cumulative_arclength().to_vec(),
        c.is_closed(),
        source,
    )?;
    let vectors = f
        .vectors
        .iter()
        .zip(c.positions())
        .map(|(v, x)| isometry.push(x, v))
        .collect();
    Ok(PushForward {
        curve,
        field: NormalField {
            params: f.params.clone(),
            vectors,
            lambda: f.lambda.clone(),
            step_drift: f.step_drift.clone(),
            seed_projection: f.seed_projection,
        },
    })
}
