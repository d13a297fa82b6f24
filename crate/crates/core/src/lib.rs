//! Rotation-minimizing normal fields and frames along curves.
//!
//! The crate computes rotation-minimizing (RM) fields two ways: in flat
//! space from the classical condition that `v'` stays parallel to the
//! tangent ([`euclidean`]), and in an arbitrary Riemannian chart as parallel
//! transport for the normal connection of the curve ([`riemannian`]). On a
//! flat chart the two agree; [`manifolds`] ships model charts used to check
//! invariance and holonomy on curved spaces.

// `!(x > 0.0)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod euclidean;
pub mod expr;
pub mod manifolds;
pub mod numeric;
pub mod riemannian;

pub use curve::{
    arclength_reparametrize, arclength_reparametrize_with, frenet_frame, frenet_frame_with, sample_curve,
    AnalyticCurve, CurveSamples, CurveSource, CurveSpec, Euclidean, FrenetData, Jet, SpeedMetric,
};
pub use error::{GeometryError, Result};
pub use euclidean::{
    default_normal, developability_residual, frenet_rm_twist, is_rm, rm_frame, rm_transport, rm_transport_with,
    ruled_surface, FramedCurve, NormalField, RmVerdict, RuledSurfaceMesh, TransportOptions, Twist,
};
pub use manifolds::{
    chart_from_json, chart_from_str, embedding_oracle_transport, get_chart, ChartCatalogEntry, CHART_NAMES,
};
pub use riemannian::{
    christoffel_fd, covariant_derivative_along, decompose, g_arclength_reparametrize, normal_connection_check,
    normal_basis, normal_connection_residual, normal_holonomy, normal_parallel_transport, pushforward_field, rm_frame_manifold,
    AmbientDecomposition, Christoffel, Holonomy, Isometry, MetricChart, PushForward, ResidualCheck,
};

/// Column vector of chart coordinates.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix, used for metrics and holonomies.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Cross product of two 3-vectors.
pub fn cross3(a: &Vector, b: &Vector) -> Vector {
    Vector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}
