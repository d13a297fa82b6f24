//! Geodesics of the upper half-space `z > 0` with metric `δ_ij / z²`.

use std::sync::Arc;

use crate::curve::AnalyticCurve;
use crate::Vector;

/// `(x, y, z0 e^s)`, unit speed.
pub fn vertical_geodesic(x: f64, y: f64, z0: f64, s0: f64, s1: f64) -> AnalyticCurve {
    AnalyticCurve::new(3, s0, s1, Arc::new(move |s: f64| Vector::from_vec(vec![x, y, z0 * s.exp()])))
        .with_derivatives(
            Arc::new(move |s: f64| Vector::from_vec(vec![0.0, 0.0, z0 * s.exp()])),
            Arc::new(move |s: f64| Vector::from_vec(vec![0.0, 0.0, z0 * s.exp()])),
        )
}

/// Unit-speed half circle of Euclidean radius `radius` centered at `(cx, cy, 0)`
/// in the vertical plane with horizontal direction `(cos φ, sin φ)`; it
/// reaches its top at `s = 0`.
pub fn semicircle_geodesic(cx: f64, cy: f64, phi: f64, radius: f64, s0: f64, s1: f64) -> AnalyticCurve {
    let (ex, ey) = (phi.cos(), phi.sin());
    let lift = move |r: f64, z: f64, cx: f64, cy: f64| Vector::from_vec(vec![cx + r * ex, cy + r * ey, z]);
    AnalyticCurve::new(
        3,
        s0,
        s1,
        Arc::new(move |s: f64| lift(radius * s.tanh(), radius / s.cosh(), cx, cy)),
    )
    .with_derivatives(
        Arc::new(move |s: f64| {
            let sech = 1.0 / s.cosh();
            lift(radius * sech * sech, -radius * sech * s.tanh(), 0.0, 0.0)
        }),
        Arc::new(move |s: f64| {
            let (sech, tanh) = (1.0 / s.cosh(), s.tanh());
            lift(
                -2.0 * radius * sech * sech * tanh,
                radius * sech * (tanh * tanh - sech * sech),
                0.0,
                0.0,
            )
        }),
    )
}

/// Point at arclength `s` on the geodesic from `x` with initial direction
/// `d` (any nonzero length).
pub fn geodesic_point(x: &Vector, d: &Vector, s: f64) -> Vector {
    let z0 = x[2];
    let horizontal = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let norm = d.norm();
    let vertical = d[2] / norm;
    if horizontal <= 1e-15 * norm {
        return Vector::from_vec(vec![x[0], x[1], z0 * (s * vertical.signum()).exp()]);
    }
    let (ex, ey) = (d[0] / horizontal, d[1] / horizontal);
    let a = horizontal / norm;
    // the geodesic is r = R tanh(s + σ), z = R sech(s + σ) about a center on
    // the boundary, with sech σ = a and tanh σ = -vertical
    let sigma = (-vertical).atanh();
    let radius = z0 / a;
    let r0 = radius * sigma.tanh();
    let r = radius * (s + sigma).tanh() - r0;
    Vector::from_vec(vec![x[0] + r * ex, x[1] + r * ey, radius / (s + sigma).cosh()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSource;

    #[test]
    fn geodesic_points_match_the_semicircle() {
        let c = semicircle_geodesic(0.5, -1.0, 0.3, 2.0, -3.0, 3.0);
        let s0 = -0.7;
        let jet = c.jet(s0);
        for s in [-1.0, 0.0, 0.4, 2.0] {
            let p = geodesic_point(&jet.position, &jet.velocity, s);
            assert!((p - c.position(s0 + s)).amax() < 1e-12);
        }
    }

    #[test]
    fn semicircle_has_unit_speed() {
        let c = semicircle_geodesic(0.0, 0.0, 1.1, 3.0, -2.0, 2.0);
        for s in [-1.5, 0.0, 0.8] {
            let jet = c.jet(s);
            assert!((jet.velocity.norm() / jet.position[2] - 1.0).abs() < 1e-14);
        }
        c.check_derivatives(&[-1.0, 0.3, 1.7]).unwrap();
    }
}
