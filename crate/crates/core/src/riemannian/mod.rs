//! Riemannian charts and transport in the normal bundle of a curve.
//!
//! A [`MetricChart`] bundles a metric `g(x)`, its Levi-Civita Christoffel
//! symbols (closed form, or centered differences of the metric) and a domain
//! predicate. Normal fields are transported by the normal connection: the
//! normal part of the ambient covariant derivative is required to vanish.

mod chart;
mod isometry;
mod transport;

pub use chart::{christoffel_fd, Christoffel, ChristoffelFn, DomainFn, MetricChart, MetricFn};
pub use isometry::{pushforward_field, Isometry, PushForward};
pub use transport::{
    covariant_derivative_along, decompose, g_arclength_reparametrize, normal_connection_check,
    normal_basis, normal_connection_residual, normal_holonomy, normal_parallel_transport, normal_parallel_transport_with,
    rm_frame_manifold, AmbientDecomposition, Holonomy, ResidualCheck,
};
