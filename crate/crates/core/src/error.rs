use thiserror::Error;

/// Errors raised by curve sampling, framing and transport.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid curve specification: {0}")]
    InvalidSpec(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("polyline points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("curve is flagged closed but its endpoints are {gap} apart (tolerance {tolerance})")]
    NotClosed { gap: f64, tolerance: f64 },

    #[error("curve is degenerate: zero speed at parameter {param}")]
    DegenerateCurve { param: f64 },

    #[error("cumulative arclength is not monotone near sample {index}")]
    InconsistentArclength { index: usize },

    #[error("Frenet frame undefined: curvature below {threshold} at samples {samples:?}")]
    FrenetUndefined { samples: Vec<usize>, threshold: f64 },

    #[error("unsupported dimension {found}, expected {expected}")]
    UnsupportedDimension { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field and curve are sampled on different grids")]
    MismatchedGrids,

    #[error("seed vector is not normal to the curve: inner product with the tangent is {inner}")]
    NonNormalSeed { inner: f64 },

    #[error("initial frame is not orthonormal, Gram matrix {gram:?}")]
    NonOrthonormalFrame { gram: Vec<Vec<f64>> },

    #[error("tangent is not unit length (norm {norm})")]
    NonUnitTangent { norm: f64 },

    #[error("curve is not unit speed (max deviation {deviation}); reparametrize by arclength first")]
    ReparametrizationRequired { deviation: f64 },

    #[error("curve is open; a closed loop is required")]
    OpenCurve,

    #[error("sample {index} lies outside the chart domain")]
    OutsideDomain { index: usize },

    #[error("point outside the chart domain: {0}")]
    PointOutsideDomain(String),

    #[error("metric is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularMetric { condition: f64 },

    #[error("metric is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricMetric { asymmetry: f64 },

    #[error("unknown chart '{name}', available: {available:?}")]
    UnknownChart { name: String, available: Vec<String> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

impl GeometryError {
    /// True when the error comes from malformed input rather than from a
    /// numerical breakdown of a well-formed problem.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            GeometryError::DegenerateCurve { .. }
                | GeometryError::InconsistentArclength { .. }
                | GeometryError::FrenetUndefined { .. }
                | GeometryError::OutsideDomain { .. }
                | GeometryError::PointOutsideDomain(_)
                | GeometryError::SingularMetric { .. }
                | GeometryError::NonFinite(_)
        )
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
