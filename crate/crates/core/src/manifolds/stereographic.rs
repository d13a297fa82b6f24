//! The unit sphere `S³ ⊂ R⁴` and its stereographic chart from the north
//! pole `(0, 0, 0, 1)`, with an embedding-based transport used as an
//! independent check of the chart transport.

use std::sync::Arc;

use crate::curve::{AnalyticCurve, CurveSamples, Jet};
use crate::error::{GeometryError, Result};
use crate::euclidean::NormalField;
use crate::Vector;

/// Chart points at or beyond this radius are treated as outside the chart.
pub const CHART_RADIUS: f64 = 1e3;

pub fn in_chart(x: &Vector) -> bool {
    x.len() == 3 && x.iter().all(|c| c.is_finite()) && x.norm() < CHART_RADIUS
}

/// Point of `S³` with chart coordinates `x`: `(2x, |x|² - 1) / (1 + |x|²)`.
pub fn to_sphere(x: &Vector) -> Vector {
    let r2 = x.norm_squared();
    let q = 1.0 + r2;
    Vector::from_vec(vec![2.0 * x[0] / q, 2.0 * x[1] / q, 2.0 * x[2] / q, (r2 - 1.0) / q])
}

/// Differential of [`to_sphere`] at `x` applied to `u`.
pub fn to_sphere_push(x: &Vector, u: &Vector) -> Vector {
    let q = 1.0 + x.norm_squared();
    let xu = x.dot(u);
    let mut out = Vector::zeros(4);
    for i in 0..3 {
        out[i] = 2.0 * u[i] / q - 4.0 * x[i] * xu / (q * q);
    }
    out[3] = 4.0 * xu / (q * q);
    out
}

/// Chart coordinates of a point of `S³` other than the north pole.
pub fn to_chart(p: &Vector) -> Vector {
    let d = 1.0 - p[3];
    Vector::from_vec(vec![p[0] / d, p[1] / d, p[2] / d])
}

/// Differential of [`to_chart`] at `p` applied to `w`.
pub fn to_chart_push(p: &Vector, w: &Vector) -> Vector {
    let d = 1.0 - p[3];
    Vector::from_fn(3, |i, _| w[i] / d + p[i] * w[3] / (d * d))
}

/// Second differential of [`to_chart`] at `p` on `(w, w)`.
pub fn to_chart_second(p: &Vector, w: &Vector) -> Vector {
    let d = 1.0 - p[3];
    Vector::from_fn(3, |i, _| 2.0 * w[i] * w[3] / (d * d) + 2.0 * p[i] * w[3] * w[3] / (d * d * d))
}

/// Chart jet of a curve on the sphere given by its position, velocity and
/// acceleration in `R⁴`.
pub fn chart_jet(p: &Vector, w: &Vector, a: &Vector) -> Jet {
    Jet {
        position: to_chart(p),
        velocity: to_chart_push(p, w),
        acceleration: to_chart_push(p, a) + to_chart_second(p, w),
    }
}

type EmbeddedJet = Arc<dyn Fn(f64) -> (Vector, Vector, Vector) + Send + Sync>;

/// Chart image of a curve on `S³` whose `R⁴` jet is known in closed form.
pub fn embedded_curve(jet: EmbeddedJet, t0: f64, t1: f64, closed: bool) -> AnalyticCurve {
    let (j1, j2, j3) = (jet.clone(), jet.clone(), jet);
    AnalyticCurve::new(
        3,
        t0,
        t1,
        Arc::new(move |t| {
            let (p, _, _) = j1(t);
            to_chart(&p)
        }),
    )
    .with_derivatives(
        Arc::new(move |t| {
            let (p, w, _) = j2(t);
            to_chart_push(&p, &w)
        }),
        Arc::new(move |t| {
            let (p, w, a) = j3(t);
            to_chart_push(&p, &a) + to_chart_second(&p, &w)
        }),
    )
    .closed(closed)
}

fn orthonormal_pair(p: &Vector, q: &Vector) -> Result<(Vector, Vector)> {
    if p.len() != 4 || q.len() != 4 {
        return Err(GeometryError::DimensionMismatch {
            expected: 4,
            found: if p.len() != 4 { p.len() } else { q.len() },
        });
    }
    let p = p.normalize();
    let q = q - &p * p.dot(q);
    if !(q.norm() > 1e-12) {
        return Err(GeometryError::InvalidArgument("great circle directions are parallel".into()));
    }
    Ok((p, q.normalize()))
}

/// `cos s · p + sin s · q` for `s ∈ [s0, s1]`, with `q` made orthonormal to
/// `p`. It has unit speed in the sphere metric.
pub fn great_circle(p: &Vector, q: &Vector, s0: f64, s1: f64) -> Result<AnalyticCurve> {
    let (p, q) = orthonormal_pair(p, q)?;
    let turns = (s1 - s0) / std::f64::consts::TAU;
    let closed = turns >= 1.0 - 1e-12 && (turns - turns.round()).abs() < 1e-12;
    Ok(embedded_curve(
        Arc::new(move |s: f64| {
            let (c, n) = (s.cos(), s.sin());
            let x = &p * c + &q * n;
            let w = &q * c - &p * n;
            let a = -&x;
            (x, w, a)
        }),
        s0,
        s1,
        closed,
    ))
}

/// Circle of geodesic radius `radius` about `center`, in the plane spanned
/// by `p` and `q` (made orthonormal to `center`), traversed `turns` times.
/// Parametrized by angle, so its speed is `sin(radius)`.
pub fn geodesic_circle(center: &Vector, p: &Vector, q: &Vector, radius: f64, turns: u32) -> Result<AnalyticCurve> {
    let c = center.normalize();
    let p = p - &c * c.dot(p);
    let (p, q) = orthonormal_pair(&p, &(q - &c * c.dot(q)))?;
    let (cr, sr) = (radius.cos(), radius.sin());
    Ok(embedded_curve(
        Arc::new(move |t: f64| {
            let (ct, st) = (t.cos(), t.sin());
            let x = &c * cr + (&p * ct + &q * st) * sr;
            let w = (&q * ct - &p * st) * sr;
            let a = -(&p * ct + &q * st) * sr;
            (x, w, a)
        }),
        0.0,
        std::f64::consts::TAU * turns as f64,
        turns > 0,
    ))
}

/// Point at arclength `s` on the geodesic from chart point `x` with chart
/// direction `d`.
pub fn geodesic_point(x: &Vector, d: &Vector, s: f64) -> Vector {
    let p = to_sphere(x);
    let w = to_sphere_push(x, d).normalize();
    to_chart(&(p * s.cos() + w * s.sin()))
}

/// Transport along a curve in the chart computed on the sphere in `R⁴`:
/// at each sample the previous vector is projected onto the orthogonal
/// complement of the position and tangent, rescaled to the initial length,
/// and mapped back to the chart.
pub fn embedding_oracle_transport(c: &CurveSamples, v0: &Vector) -> Result<NormalField> {
    let vectors = embedding_oracle_transport_points(c.positions(), c.velocities(), v0)?;
    Ok(NormalField {
        params: c.params().to_vec(),
        step_drift: vec![0.0; vectors.len()],
        vectors,
        lambda: None,
        seed_projection: 0.0,
    })
}

/// [`embedding_oracle_transport`] on bare sample tables. A single sample
/// returns `v0`.
pub fn embedding_oracle_transport_points(
    positions: &[Vector],
    velocities: &[Vector],
    v0: &Vector,
) -> Result<Vec<Vector>> {
    if positions.len() != velocities.len() {
        return Err(GeometryError::MismatchedGrids);
    }
    if let Some(index) = positions.iter().position(|x| !in_chart(x)) {
        return Err(GeometryError::OutsideDomain { index });
    }
    if v0.len() != 3 {
        return Err(GeometryError::DimensionMismatch {
            expected: 3,
            found: v0.len(),
        });
    }
    let Some(x0) = positions.first() else {
        return Ok(Vec::new());
    };
    let mut v = to_sphere_push(x0, v0);
    let length = v.norm();
    let mut out = Vec::with_capacity(positions.len());
    out.push(v0.clone());
    for (x, u) in positions.iter().zip(velocities).skip(1) {
        let p = to_sphere(x);
        let t = to_sphere_push(x, u).normalize();
        v -= &p * v.dot(&p);
        v -= &t * v.dot(&t);
        let norm = v.norm();
        if norm > 0.0 {
            v *= length / norm;
        }
        out.push(to_chart_push(&p, &v));
    }
    Ok(out)
}
