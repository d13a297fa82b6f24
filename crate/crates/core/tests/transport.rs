use std::f64::consts::TAU;
use std::sync::Arc;

use rmframe_core::manifolds::{hyperbolic, rotation_matrix, stereographic};
use rmframe_core::numeric::{self, DiffOrder};
use rmframe_core::*;

fn v(x: &[f64]) -> Vector {
    Vector::from_vec(x.to_vec())
}

fn unit(spec: impl Into<CurveSpec>, n: usize) -> CurveSamples {
    arclength_reparametrize(&sample_curve(&spec.into(), n).unwrap()).unwrap()
}

fn expr_curve(x: &str, y: &str, z: &str, t0: f64, t1: f64, closed: bool) -> AnalyticCurve {
    AnalyticCurve::from_expressions(&[x.into(), y.into(), z.into()], t0, t1, closed).unwrap()
}

/// Unit `g`-normal built from a coordinate axis at the first sample.
fn normal_seed(chart: &MetricChart, c: &CurveSamples, axis: usize) -> Vector {
    let x = &c.positions()[0];
    let u = &c.velocities()[0];
    let mut w = Vector::zeros(chart.dim());
    w[axis] = 1.0;
    let w = &w - u * (chart.inner(x, &w, u) / chart.inner(x, u, u));
    &w / chart.norm(x, &w)
}

fn hyperbolic_wiggle(n: usize) -> (MetricChart, CurveSamples) {
    let chart = get_chart("hyperbolic3_halfspace").unwrap().chart;
    let spec: CurveSpec = expr_curve("cos(t)", "sin(t)", "1.5 + 0.5*sin(2*t)", 0.0, 3.0, false).into();
    let c = g_arclength_reparametrize(&sample_curve(&spec, n).unwrap(), &chart).unwrap();
    (chart, c)
}

#[test]
fn flat_chart_transport_equals_rm_transport() {
    let c = unit(expr_curve("cos(t) + 0.2*t", "sin(2*t)", "t^2/4", 0.0, 4.0, false), 1000);
    let chart = MetricChart::flat(3);
    let v0 = normal_seed(&chart, &c, 2) * 1.7;
    let a = rm_transport(&c, &v0).unwrap();
    let b = normal_parallel_transport(&c, &chart, &v0).unwrap();
    assert!(a.sup_distance(&b) < 1e-8);
    let frame_flat = rm_frame(&c, Some(&normal_seed(&chart, &c, 2))).unwrap();
    let frame_chart = rm_frame_manifold(
        &c,
        &chart,
        &[frame_flat.frames[0][1].clone(), frame_flat.frames[0][2].clone()],
    )
    .unwrap();
    // the flat frame takes its last column as t × u, the chart frame
    // transports it, so they agree to the integration error
    for (f, g) in frame_flat.frames.iter().zip(&frame_chart.frames) {
        for k in 0..3 {
            assert!((&f[k] - &g[k]).amax() < 1e-7, "{k}: {:e}", (&f[k] - &g[k]).amax());
        }
    }
}

#[test]
fn straight_line_fields_are_constant() {
    let chart = MetricChart::flat(3);
    let c = unit(AnalyticCurve::line(v(&[1.0, 2.0, 3.0]), v(&[1.0, -1.0, 0.5]), 0.0, 2.0), 200);
    let v0 = normal_seed(&chart, &c, 0);
    for f in [rm_transport(&c, &v0).unwrap(), normal_parallel_transport(&c, &chart, &v0).unwrap()] {
        assert!(f.vectors.iter().all(|w| (w - &v0).amax() < 1e-12));
    }
}

#[test]
fn transports_are_linear_in_the_seed() {
    let c = unit(AnalyticCurve::helix(1.0, 0.5, 0.0, 5.0), 400);
    let chart = MetricChart::flat(3);
    let a0 = normal_seed(&chart, &c, 0);
    let b0 = normal_seed(&chart, &c, 2);
    let a = rm_transport(&c, &a0).unwrap();
    let b = rm_transport(&c, &b0).unwrap();
    let combined = rm_transport(&c, &(&a0 * 2.0 - &b0 * 0.5)).unwrap();
    assert!(combined.sup_distance(&a.combine(2.0, &b, -0.5)) < 1e-10);
}

#[test]
fn norms_and_angles_are_constant() {
    let (chart, c) = hyperbolic_wiggle(1000);
    assert!(c.length() < 10.0);
    let a0 = normal_seed(&chart, &c, 2);
    let x0 = &c.positions()[0];
    let t0 = &c.velocities()[0];
    let b0 = {
        let raw = normal_seed(&chart, &c, 0);
        let w = &raw - &a0 * chart.inner(x0, &raw, &a0);
        let w = &w - t0 * chart.inner(x0, &w, t0);
        &w / chart.norm(x0, &w)
    };
    let mixed = (&a0 * 0.6 + &b0 * 0.8) * 3.0;
    let a = normal_parallel_transport(&c, &chart, &a0).unwrap();
    let m = normal_parallel_transport(&c, &chart, &mixed).unwrap();
    let angle0 = chart.inner(x0, &a0, &mixed);
    for (i, x) in c.positions().iter().enumerate() {
        assert!((chart.norm(x, &a.vectors[i]) - 1.0).abs() < 1e-12);
        assert!((chart.norm(x, &m.vectors[i]) - 3.0).abs() < 1e-11);
        assert!((chart.inner(x, &a.vectors[i], &m.vectors[i]) - angle0).abs() < 1e-8);
    }
}

#[test]
fn inner_products_of_transported_fields_have_zero_derivative() {
    let (chart, c) = hyperbolic_wiggle(1000);
    let a = normal_parallel_transport(&c, &chart, &normal_seed(&chart, &c, 2)).unwrap();
    let b = normal_parallel_transport(&c, &chart, &normal_seed(&chart, &c, 0)).unwrap();
    let products: Vec<f64> = c
        .positions()
        .iter()
        .enumerate()
        .map(|(i, x)| chart.inner(x, &a.vectors[i], &b.vectors[i]))
        .collect();
    let rate = numeric::derivative_scalar(c.params(), &products, false, DiffOrder::Fourth);
    assert!(rate.iter().all(|r| r.abs() < 1e-8), "{:e}", rate.iter().fold(0.0f64, |m, r| m.max(r.abs())));
}

#[test]
fn normal_connection_residual_is_explained_by_drift_and_differencing() {
    let (chart, c) = hyperbolic_wiggle(1000);
    let f = normal_parallel_transport(&c, &chart, &normal_seed(&chart, &c, 2)).unwrap();
    let check = normal_connection_check(&c, &f, &chart).unwrap();
    assert!(check.passed, "ratio {}", check.max_ratio);
    assert!(check.max_residual < 1e-6);

    let helix = unit(AnalyticCurve::helix(1.0, 1.0, 0.0, TAU), 2000);
    let flat = MetricChart::flat(3);
    let f = rm_transport(&helix, &normal_seed(&flat, &helix, 0)).unwrap();
    let check = normal_connection_check(&helix, &f, &flat).unwrap();
    assert!(check.passed, "ratio {}", check.max_ratio);
}

#[test]
fn non_parallel_fields_fail_the_residual_check() {
    let helix = unit(AnalyticCurve::helix(1.0, 1.0, 0.0, TAU), 1000);
    let normals = frenet_frame(&helix).unwrap().normals;
    let f = NormalField::from_vectors(&helix, normals).unwrap();
    let check = normal_connection_check(&helix, &f, &MetricChart::flat(3)).unwrap();
    assert!(!check.passed);
    // |τ b| for τ = 1/2
    assert!((check.max_residual - 0.5).abs() < 1e-4);
}

#[test]
fn halving_the_step_converges_at_fourth_order() {
    let (chart, _) = hyperbolic_wiggle(8);
    let ends: Vec<Vector> = [64, 128, 256]
        .iter()
        .map(|&intervals| {
            let (_, c) = hyperbolic_wiggle(intervals + 1);
            let f = normal_parallel_transport(&c, &chart, &normal_seed(&chart, &c, 2)).unwrap();
            f.vectors[intervals].clone()
        })
        .collect();
    let e1 = (&ends[0] - &ends[1]).norm();
    let e2 = (&ends[1] - &ends[2]).norm();
    assert!((e1 / e2).log2() >= 3.5, "order {}", (e1 / e2).log2());
}

#[test]
fn vertical_geodesic_matches_closed_form() {
    let chart = get_chart("hyperbolic3_halfspace").unwrap().chart;
    let c = sample_curve(&hyperbolic::vertical_geodesic(0.0, 0.0, 1.0, 0.0, 2.5).into(), 500).unwrap();
    // (z, 0, 0) has zero covariant derivative along the vertical geodesic
    let field = NormalField::from_vectors(&c, c.positions().iter().map(|x| v(&[x[2], 0.0, 0.0])).collect()).unwrap();
    let cov = covariant_derivative_along(&c, &field, &chart).unwrap();
    assert!(cov.iter().all(|w| w.amax() < 1e-8));
    let frame = rm_frame_manifold(&c, &chart, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
    let defect = frame.gram_defect(|i, a, b| chart.inner(&c.positions()[i], a, b));
    assert!(defect < 1e-9);
    for (f, x) in frame.frames.iter().zip(c.positions()) {
        assert!((&f[1] - v(&[x[2], 0.0, 0.0])).amax() < 1e-9 * x[2]);
        assert!((&f[2] - v(&[0.0, x[2], 0.0])).amax() < 1e-9 * x[2]);
    }
}

#[test]
fn frame_seeds_must_be_orthonormal() {
    let chart = get_chart("hyperbolic3_halfspace").unwrap().chart;
    let c = sample_curve(&hyperbolic::vertical_geodesic(0.0, 0.0, 2.0, 0.0, 1.0).into(), 50).unwrap();
    // at z = 2 the coordinate axes have g-norm 1/2
    match rm_frame_manifold(&c, &chart, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]) {
        Err(GeometryError::NonOrthonormalFrame { gram }) => assert!((gram[1][1] - 0.25).abs() < 1e-15),
        other => panic!("{other:?}"),
    }
}

#[test]
fn two_dimensional_frames_have_one_normal() {
    let chart = MetricChart::flat(2);
    let spec = CurveSpec::from_json_str(r#"{"kind":"analytic","expr":["cos(t)","2*sin(t)"],"t0":0,"t1":2}"#).unwrap();
    let c = arclength_reparametrize(&sample_curve(&spec, 300).unwrap()).unwrap();
    let t0 = c.unit_tangent(0);
    let n0 = v(&[-t0[1], t0[0]]);
    let frame = rm_frame_manifold(&c, &chart, &[n0]).unwrap();
    for (i, f) in frame.frames.iter().enumerate() {
        let t = c.unit_tangent(i);
        assert!((&f[1] - v(&[-t[1], t[0]])).amax() < 1e-9);
    }
}

#[test]
fn decomposition_reconstructs_the_input() {
    let chart = get_chart("sphere3_stereographic").unwrap().chart;
    let x = v(&[0.3, -0.2, 0.5]);
    let t = v(&[1.0, 2.0, -1.0]);
    let t = &t / chart.norm(&x, &t);
    let u = v(&[0.4, 0.1, 2.0]);
    let parts = decompose(&chart, &x, &t, &u).unwrap();
    assert!((&parts.tangent + &parts.normal - &u).amax() < 1e-12);
    assert!(chart.inner(&x, &parts.normal, &t).abs() < 1e-12);
    let flat = MetricChart::flat(3);
    let parts = decompose(&flat, &Vector::zeros(3), &v(&[1.0, 0.0, 0.0]), &v(&[1.0, 2.0, 3.0])).unwrap();
    assert_eq!(parts.tangent, v(&[1.0, 0.0, 0.0]));
    assert_eq!(parts.normal, v(&[0.0, 2.0, 3.0]));
    assert!(matches!(
        decompose(&flat, &Vector::zeros(3), &v(&[2.0, 0.0, 0.0]), &u),
        Err(GeometryError::NonUnitTangent { .. })
    ));
}

#[test]
fn transport_checks_its_preconditions() {
    let chart = get_chart("hyperbolic3_halfspace").unwrap().chart;
    let raw = sample_curve(&expr_curve("t", "0", "2", 0.0, 1.0, false).into(), 20).unwrap();
    assert!(matches!(
        normal_parallel_transport(&raw, &chart, &v(&[0.0, 1.0, 0.0])),
        Err(GeometryError::ReparametrizationRequired { .. })
    ));
    let below = sample_curve(&expr_curve("0", "0", "t", -1.0, 1.0, false).into(), 20).unwrap();
    assert!(matches!(
        normal_parallel_transport(&below, &chart, &v(&[0.0, 1.0, 0.0])),
        Err(GeometryError::OutsideDomain { index: 0 })
    ));
}

#[test]
fn sphere_transport_agrees_with_the_embedding() {
    let chart = get_chart("sphere3_stereographic").unwrap().chart;
    // tilted great circle that stays away from the pole of the chart
    let gc = stereographic::great_circle(&v(&[0.6, 0.0, 0.0, -0.8]), &v(&[0.0, 0.6, 0.8, 0.0]), 0.0, TAU).unwrap();
    let c = sample_curve(&gc.into(), 2000).unwrap();
    let v0 = normal_seed(&chart, &c, 2);
    let f = normal_parallel_transport(&c, &chart, &v0).unwrap();
    let oracle = embedding_oracle_transport(&c, &v0).unwrap();
    assert!(f.sup_distance(&oracle) < 1e-7);
    // a great circle's normal bundle has trivial holonomy
    assert!((&f.vectors[1999] - &v0).amax() < 1e-9);
    let half = sample_curve(
        &stereographic::great_circle(&v(&[0.6, 0.0, 0.0, -0.8]), &v(&[0.0, 0.6, 0.8, 0.0]), 0.0, TAU / 2.0)
            .unwrap()
            .into(),
        1000,
    )
    .unwrap();
    let o = embedding_oracle_transport(&half, &v0).unwrap();
    let last = half.len() - 1;
    let ratio = chart.norm(&half.positions()[last], &o.vectors[last]) / chart.norm(&half.positions()[0], &v0);
    assert!((ratio - 1.0).abs() < 1e-7);
}

fn trefoil(t1: f64) -> AnalyticCurve {
    expr_curve(
        "(2 + cos(3*t))*cos(2*t)",
        "(2 + cos(3*t))*sin(2*t)",
        "sin(3*t)",
        0.0,
        t1,
        true,
    )
}

/// Torsion times speed of the trefoil, from closed-form derivatives.
fn trefoil_torsion_density(t: f64) -> f64 {
    let (c2, s2, c3, s3) = ((2.0 * t).cos(), (2.0 * t).sin(), (3.0 * t).cos(), (3.0 * t).sin());
    let (r, r1, r2, r3) = (2.0 + c3, -3.0 * s3, -9.0 * c3, 27.0 * s3);
    let d1 = v(&[r1 * c2 - 2.0 * r * s2, r1 * s2 + 2.0 * r * c2, 3.0 * c3]);
    let d2 = v(&[
        r2 * c2 - 4.0 * r1 * s2 - 4.0 * r * c2,
        r2 * s2 + 4.0 * r1 * c2 - 4.0 * r * s2,
        -9.0 * s3,
    ]);
    let d3 = v(&[
        r3 * c2 - 6.0 * r2 * s2 - 12.0 * r1 * c2 + 8.0 * r * s2,
        r3 * s2 + 6.0 * r2 * c2 - 12.0 * r1 * s2 - 8.0 * r * c2,
        -27.0 * c3,
    ]);
    let cross = cross3(&d1, &d2);
    cross.dot(&d3) / cross.norm_squared() * d1.norm()
}

#[test]
fn flat_holonomy_is_the_total_torsion() {
    let c = unit(trefoil(TAU), 4001);
    let hol = normal_holonomy(&c, &MetricChart::flat(3)).unwrap();
    assert!(hol.orthogonality_residual < 1e-10);
    let total_torsion = numeric::integrate(trefoil_torsion_density, 0.0, TAU, 1e-13);
    // about -15.59, far from a multiple of 2π
    assert!((total_torsion + 15.5934).abs() < 1e-3);
    let expected = (-total_torsion).rem_euclid(TAU);
    let got = hol.angle.unwrap().rem_euclid(TAU);
    let diff = (got - expected).abs().min(TAU - (got - expected).abs());
    assert!(diff < 1e-8, "holonomy {got} vs {expected}");
}

#[test]
fn planar_loops_have_trivial_flat_holonomy_and_loops_compose() {
    let flat = MetricChart::flat(3);
    let once = unit(AnalyticCurve::circle(1.0, 0.0, TAU), 1001);
    let h1 = normal_holonomy(&once, &flat).unwrap();
    assert!((&h1.matrix - Matrix::identity(2, 2)).amax() < 1e-8);

    let h1 = normal_holonomy(&unit(trefoil(TAU), 2001), &flat).unwrap();
    let h2 = normal_holonomy(&unit(trefoil(2.0 * TAU), 4001), &flat).unwrap();
    assert!((&h1.matrix - Matrix::identity(2, 2)).amax() > 0.1);
    assert!((&h2.matrix - &h1.matrix * &h1.matrix).amax() < 1e-8);
}

#[test]
fn fields_that_do_not_close_up_pass_the_checks_on_closed_loops() {
    let c = unit(trefoil(TAU), 2001);
    assert!(c.is_closed());
    // the seed is orthogonal to the curvature at the start, so v' vanishes there
    let t = c.unit_tangent(0);
    let seed = (v(&[0.0, 0.0, 1.0]) - &t * t[2]).normalize();
    assert!(seed.dot(&c.accelerations()[0]).abs() < 1e-12);
    let f = rm_transport(&c, &seed).unwrap();
    let n = c.len();
    assert!((&f.vectors[n - 1] - &f.vectors[0]).norm() > 0.1);

    let check = normal_connection_check(&c, &f, &MetricChart::flat(3)).unwrap();
    assert!(check.passed, "ratio {}", check.max_ratio);
    let verdict = is_rm(&c, &f, 1e-6).unwrap();
    assert!(verdict.verdict, "is_rm residual {}", verdict.max_residual);
    assert!(developability_residual(&c, &f).unwrap() < 1e-6);
}

#[test]
fn torus_loops_close_up_to_a_period() {
    let torus = get_chart("flat_torus3").unwrap().chart;
    let c = unit(AnalyticCurve::line(v(&[0.1, 0.2, 0.3]), v(&[1.0, 0.0, 0.0]), 0.0, TAU), 200);
    assert!(!c.is_closed());
    let hol = normal_holonomy(&c, &torus).unwrap();
    assert!((&hol.matrix - Matrix::identity(2, 2)).amax() < 1e-12);
    let f = normal_parallel_transport(&c, &torus, &v(&[0.0, 0.6, 0.8])).unwrap();
    assert!((&f.vectors[199] - v(&[0.0, 0.6, 0.8])).amax() < 1e-12);
    assert!(matches!(normal_holonomy(&c, &MetricChart::flat(3)), Err(GeometryError::OpenCurve)));
}

fn sphere_knot_holonomy(intervals: usize) -> f64 {
    let chart = get_chart("sphere3_stereographic").unwrap().chart;
    let a: f64 = 0.5;
    let (ca, sa) = (a.cos(), a.sin());
    // (2, 1) curve on a torus in S³, kept away from the pole of the chart
    let curve = stereographic::embedded_curve(
        Arc::new(move |t: f64| {
            let x = v(&[ca * t.cos(), ca * t.sin(), sa * (2.0 * t).cos(), -0.0 - sa * (2.0 * t).sin()]);
            let rot = |p: Vector| v(&[p[0], p[1], 0.6 * p[2] - 0.8 * p[3], 0.8 * p[2] + 0.6 * p[3]]);
            let w = v(&[-ca * t.sin(), ca * t.cos(), -2.0 * sa * (2.0 * t).sin(), -2.0 * sa * (2.0 * t).cos()]);
            let acc = v(&[-ca * t.cos(), -ca * t.sin(), -4.0 * sa * (2.0 * t).cos(), 4.0 * sa * (2.0 * t).sin()]);
            (rot(x), rot(w), rot(acc))
        }),
        0.0,
        TAU,
        true,
    );
    let c = g_arclength_reparametrize(&sample_curve(&curve.into(), intervals + 1).unwrap(), &chart).unwrap();
    let hol = normal_holonomy(&c, &chart).unwrap();
    assert!(hol.orthogonality_residual < 1e-9);
    hol.angle.unwrap()
}

#[test]
fn sphere_holonomy_matches_a_finer_run() {
    let coarse = sphere_knot_holonomy(400);
    let fine = sphere_knot_holonomy(4000);
    assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
    assert!(fine.abs() > 1e-3);
}

#[test]
fn small_circles_in_a_totally_geodesic_sphere_have_trivial_holonomy() {
    let chart = get_chart("sphere3_stereographic").unwrap().chart;
    let circle = stereographic::geodesic_circle(
        &v(&[0.0, 0.0, 0.0, -1.0]),
        &v(&[1.0, 0.0, 0.0, 0.0]),
        &v(&[0.0, 1.0, 0.0, 0.0]),
        0.5,
        1,
    )
    .unwrap();
    let c = g_arclength_reparametrize(&sample_curve(&circle.into(), 1001).unwrap(), &chart).unwrap();
    let hol = normal_holonomy(&c, &chart).unwrap();
    assert!(hol.angle.unwrap().abs() < 1e-8);
}

#[test]
fn pushforward_by_identity_changes_nothing() {
    let c = unit(AnalyticCurve::helix(1.0, 1.0, 0.0, 3.0), 100);
    let f = rm_transport(&c, &normal_seed(&MetricChart::flat(3), &c, 0)).unwrap();
    let pushed = pushforward_field(&Isometry::identity(3), &c, &f).unwrap();
    assert_eq!(pushed.field, f);
    assert_eq!(pushed.curve.positions(), c.positions());
    assert_eq!(pushed.curve.velocities(), c.velocities());
}

#[test]
fn rotated_cone_field_stays_rm() {
    let c = unit(AnalyticCurve::circle(1.0, 0.0, TAU), 1000);
    let f = rm_transport(&c, &v(&[-1.0, 0.0, 0.75])).unwrap();
    let motion = Isometry::affine("motion", rotation_matrix(&v(&[0.3, -1.0, 2.0]), 2.1), v(&[4.0, 0.0, -1.0]));
    let pushed = pushforward_field(&motion, &c, &f).unwrap();
    let verdict = is_rm(&pushed.curve, &pushed.field, 1e-6).unwrap();
    assert!(verdict.max_residual < 1e-8, "{}", verdict.max_residual);
}

#[test]
fn transport_commutes_with_isometries() {
    let (chart, c) = hyperbolic_wiggle(1000);
    let entry = get_chart("hyperbolic3_halfspace").unwrap();
    let v0 = normal_seed(&chart, &c, 2);
    let f = normal_parallel_transport(&c, &chart, &v0).unwrap();
    for iso in &entry.isometries {
        let pushed = pushforward_field(iso, &c, &f).unwrap();
        let seed = iso.push(&c.positions()[0], &v0);
        let direct = normal_parallel_transport(&pushed.curve, &chart, &seed).unwrap();
        let diff = direct.sup_distance(&pushed.field);
        assert!(diff < 1e-7, "{}: {diff}", iso.name());
        let residual = normal_connection_check(&pushed.curve, &pushed.field, &chart).unwrap();
        assert!(residual.max_residual < 1e-6, "{}", iso.name());
    }
}

#[test]
fn reversal_transports_back() {
    let c = unit(AnalyticCurve::helix(1.0, 1.0, 0.0, 4.0), 800);
    let flat = MetricChart::flat(3);
    let f = rm_transport(&c, &normal_seed(&flat, &c, 0)).unwrap();
    let back = rm_transport(&c.reversed(), &f.vectors[799]).unwrap();
    assert!((&back.vectors[799] - &f.vectors[0]).amax() < 1e-10);
}

#[test]
fn polyline_transport_matches_flat_chart() {
    let points: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            let t = i as f64 * 0.03;
            vec![t.cos(), t.sin(), 0.3 * t]
        })
        .collect();
    let doc = serde_json::json!({"kind": "polyline", "points": points});
    let c = arclength_reparametrize(&sample_curve(&CurveSpec::from_json_value(doc).unwrap(), 4).unwrap()).unwrap();
    let flat = MetricChart::flat(3);
    let v0 = normal_seed(&flat, &c, 2);
    let a = rm_transport(&c, &v0).unwrap();
    let b = normal_parallel_transport(&c, &flat, &v0).unwrap();
    assert!(a.sup_distance(&b) < 1e-12);
    // the spline through the vertices is only C², so drift is larger than on analytic curves
    assert!(a.max_step_drift() < 1e-5, "{:e}", a.max_step_drift());
}
