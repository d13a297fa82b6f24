//! Acceptance criteria AC-1..AC-10. Prints one PASS/FAIL line per criterion
//! and exits non-zero when any fails.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmframe_cli::commands::{prepare, seeds};
use rmframe_cli::output::parse_csv;
use rmframe_cli::{ConfigLayer, Operation, RunConfig};
use rmframe_core::manifolds::{rotation_matrix, stereographic};
use rmframe_core::numeric::{self, DiffOrder};
use rmframe_core::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn v(x: &[f64]) -> Vector {
    Vector::from_vec(x.to_vec())
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn helix(n: usize) -> CurveSamples {
    arclength_reparametrize(&sample_curve(&AnalyticCurve::helix(1.0, 1.0, 0.0, TAU).into(), n).unwrap()).unwrap()
}

fn chart(name: &str) -> MetricChart {
    get_chart(name).unwrap().chart
}

fn on_chart(spec: CurveSpec, chart: &MetricChart, n: usize) -> CurveSamples {
    g_arclength_reparametrize(&sample_curve(&spec, n).unwrap(), chart).unwrap()
}

fn hyperbolic_wiggle(n: usize) -> CurveSamples {
    let spec = AnalyticCurve::from_expressions(
        &["cos(t)".into(), "sin(t)".into(), "1.5 + 0.5*sin(2*t)".into()],
        0.0,
        3.0,
        false,
    )
    .unwrap();
    on_chart(spec.into(), &chart("hyperbolic3_halfspace"), n)
}

/// (2, 1) torus knot on `S³`, rotated off the pole of the chart.
fn sphere_knot(n: usize) -> CurveSamples {
    let (ca, sa) = (0.5f64.cos(), 0.5f64.sin());
    let curve = stereographic::embedded_curve(
        Arc::new(move |t: f64| {
            let rot = |p: Vector| v(&[p[0], p[1], 0.6 * p[2] - 0.8 * p[3], 0.8 * p[2] + 0.6 * p[3]]);
            let (c1, s1, c2, s2) = (t.cos(), t.sin(), (2.0 * t).cos(), (2.0 * t).sin());
            let x = v(&[ca * c1, ca * s1, sa * c2, -sa * s2]);
            let w = v(&[-ca * s1, ca * c1, -2.0 * sa * s2, -2.0 * sa * c2]);
            let a = v(&[-ca * c1, -ca * s1, -4.0 * sa * c2, 4.0 * sa * s2]);
            (rot(x), rot(w), rot(a))
        }),
        0.0,
        TAU,
        true,
    );
    on_chart(curve.into(), &chart("sphere3_stereographic"), n)
}

fn basis_fields(c: &CurveSamples, chart: &MetricChart) -> Vec<NormalField> {
    normal_basis(chart, &c.positions()[0], &c.velocities()[0])
        .iter()
        .map(|b| normal_parallel_transport(c, chart, b).unwrap())
        .collect()
}

/// Largest norm drift and largest change of the inner product of the first
/// two fields.
fn drifts(c: &CurveSamples, chart: &MetricChart, fields: &[NormalField]) -> (f64, f64) {
    let (mut norm, mut angle) = (0.0f64, 0.0f64);
    let x = c.positions();
    let (a, b) = (&fields[0].vectors, &fields[1].vectors);
    let ip0 = chart.inner(&x[0], &a[0], &b[0]);
    for i in 0..c.len() {
        for f in fields {
            norm = norm.max((chart.norm(&x[i], &f.vectors[i]) - chart.norm(&x[0], &f.vectors[0])).abs());
        }
        angle = angle.max((chart.inner(&x[i], &a[i], &b[i]) - ip0).abs());
    }
    (norm, angle)
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let c = helix(2000);
    let flat = chart("euclidean3");
    let v0 = normal_basis(&flat, &c.positions()[0], &c.velocities()[0])[0].clone();
    let rm = rm_transport(&c, &v0).map_err(|e| e.to_string())?;
    let parallel = normal_parallel_transport(&c, &flat, &v0).map_err(|e| e.to_string())?;
    let diff = rm.sup_distance(&parallel);
    let elapsed = start.elapsed().as_secs_f64();
    let length_ok = (c.length() - TAU * SQRT_2).abs() < 1e-9;
    check(
        diff < 1e-8 && elapsed < 1.0 && length_ok,
        format!("sup difference {diff:.2e} (< 1e-8), runtime {elapsed:.3} s (< 1 s), L = {:.12}", c.length()),
    )
}

fn ac2() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let cases: [(&str, CurveSamples, f64); 3] = [
        ("euclidean3", helix(2000), 1e-9),
        ("hyperbolic3_halfspace", hyperbolic_wiggle(2000), 1e-8),
        ("sphere3_stereographic", sphere_knot(2000), 1e-8),
    ];
    for (name, c, limit) in cases {
        let chart = chart(name);
        let (norm, angle) = drifts(&c, &chart, &basis_fields(&c, &chart));
        ok &= norm < limit && angle < limit && c.length() <= 10.0;
        lines.push(format!("{name}: L {:.3}, norm {norm:.1e}, angle {angle:.1e} (< {limit:.0e})", c.length()));
    }
    check(ok, lines.join("; "))
}

fn order(samples: impl Fn(usize) -> CurveSamples, chart: &MetricChart) -> f64 {
    let ends: Vec<Vector> = [64, 128, 256]
        .iter()
        .map(|&m| {
            let c = samples(m + 1);
            let v0 = normal_basis(chart, &c.positions()[0], &c.velocities()[0])[0].clone();
            normal_parallel_transport(&c, chart, &v0).unwrap().vectors[m].clone()
        })
        .collect();
    ((&ends[0] - &ends[1]).norm() / (&ends[1] - &ends[2]).norm()).log2()
}

fn ac3() -> Outcome {
    let flat = order(helix, &chart("euclidean3"));
    let hyperbolic = order(hyperbolic_wiggle, &chart("hyperbolic3_halfspace"));
    check(
        flat >= 3.5 && hyperbolic >= 3.5,
        format!("observed order helix {flat:.3}, hyperbolic curve {hyperbolic:.3} (>= 3.5)"),
    )
}

fn ac4() -> Outcome {
    let sphere = chart("sphere3_stereographic");
    let arcs = [
        // through the chart origin
        stereographic::great_circle(&v(&[0.0, 0.0, 0.0, -1.0]), &v(&[1.0, 0.0, 0.0, 0.0]), -2.0, 2.0),
        // a whole great circle tilted away from the pole
        stereographic::great_circle(&v(&[0.6, 0.0, 0.0, -0.8]), &v(&[0.0, 0.6, 0.8, 0.0]), 0.0, TAU),
    ];
    let mut worst = 0.0f64;
    for arc in arcs {
        let c = sample_curve(&arc.unwrap().into(), 2000).unwrap();
        let v0 = normal_basis(&sphere, &c.positions()[0], &c.velocities()[0])[0].clone();
        let chart_field = normal_parallel_transport(&c, &sphere, &v0).unwrap();
        let oracle = embedding_oracle_transport(&c, &v0).unwrap();
        worst = worst.max(chart_field.sup_distance(&oracle));
    }
    check(worst < 1e-7, format!("sup difference to the R^4 oracle {worst:.2e} (< 1e-7)"))
}

fn equivariance(c: &CurveSamples, chart: &MetricChart, iso: &Isometry) -> f64 {
    let x0 = &c.positions()[0];
    let v0 = normal_basis(chart, x0, &c.velocities()[0])[0].clone();
    let field = normal_parallel_transport(c, chart, &v0).unwrap();
    let pushed = pushforward_field(iso, c, &field).unwrap();
    let direct = normal_parallel_transport(&pushed.curve, chart, &iso.push(x0, &v0)).unwrap();
    direct.sup_distance(&pushed.field)
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let axis = v(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
    let angle = rng.random_range(0.0..PI);
    let shift = v(&[rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]);
    let motion = Isometry::affine("rigid motion", rotation_matrix(&axis, angle), shift);
    let rigid = equivariance(&helix(2000), &chart("euclidean3"), &motion);
    let dilation = Isometry::affine("dilation", Matrix::identity(3, 3) * 2.0, Vector::zeros(3));
    let scaled = equivariance(&hyperbolic_wiggle(2000), &chart("hyperbolic3_halfspace"), &dilation);
    check(
        rigid < 1e-7 && scaled < 1e-7,
        format!("rigid motion {rigid:.2e}, half-space dilation {scaled:.2e} (< 1e-7)"),
    )
}

fn ac6() -> Outcome {
    let circle = arclength_reparametrize(&sample_curve(&AnalyticCurve::circle(1.0, 0.0, TAU).into(), 1000).unwrap())
        .unwrap();
    let cone = rm_transport(&circle, &v(&[-1.0, 0.0, 1.0])).unwrap();
    let cone_residual = developability_residual(&circle, &cone).unwrap();
    let h = helix(1000);
    let normals = NormalField::from_vectors(&h, frenet_frame(&h).unwrap().normals).unwrap();
    let helicoid_residual = developability_residual(&h, &normals).unwrap();
    check(
        cone_residual < 1e-8 && helicoid_residual > 0.1,
        format!("cone {cone_residual:.2e} (< 1e-8), helix Frenet normal {helicoid_residual:.3} (> 0.1)"),
    )
}

fn ac7() -> Outcome {
    let line = arclength_reparametrize(
        &sample_curve(&AnalyticCurve::line(v(&[1.0, -2.0, 0.5]), v(&[2.0, 1.0, -1.0]), 0.0, 3.0).into(), 1000)
            .unwrap(),
    )
    .unwrap();
    let seed = v(&[1.0, -2.0, 0.0]) / 5f64.sqrt();
    let constant = rm_transport(&line, &seed).unwrap();
    let line_dev = constant.vectors.iter().map(|w| (w - &seed).amax()).fold(0.0, f64::max);

    let circle = arclength_reparametrize(&sample_curve(&AnalyticCurve::circle(1.0, 0.0, TAU).into(), 1000).unwrap())
        .unwrap();
    let apex = 0.7;
    let cone = rm_transport(&circle, &v(&[-1.0, 0.0, apex])).unwrap();
    let cone_dev = circle
        .params()
        .iter()
        .zip(&cone.vectors)
        .map(|(s, w)| (w - v(&[-s.cos(), -s.sin(), apex])).amax())
        .fold(0.0, f64::max);

    let ellipse = AnalyticCurve::from_expressions(&["2*cos(t)".into(), "sin(t)".into(), "0".into()], 0.0, TAU, true)
        .unwrap();
    let ellipse = arclength_reparametrize(&sample_curve(&ellipse.into(), 1000).unwrap()).unwrap();
    let planar = NormalField::from_vectors(&ellipse, frenet_frame(&ellipse).unwrap().normals).unwrap();
    let planar_verdict = is_rm(&ellipse, &planar, 1e-6).unwrap();

    let h = helix(1000);
    let helical = NormalField::from_vectors(&h, frenet_frame(&h).unwrap().normals).unwrap();
    let helix_verdict = is_rm(&h, &helical, 1e-6).unwrap();
    check(
        line_dev < 1e-12 && cone_dev < 1e-8 && planar_verdict.verdict && !helix_verdict.verdict,
        format!(
            "line {line_dev:.1e} (< 1e-12), cone {cone_dev:.1e} (< 1e-8), ellipse normal is_rm {} ({:.1e}), \
             helix normal is_rm {} ({:.3})",
            planar_verdict.verdict, planar_verdict.max_residual, helix_verdict.verdict, helix_verdict.max_residual
        ),
    )
}

fn ac8() -> Outcome {
    let c = helix(2000);
    let twist = frenet_rm_twist(&c).unwrap();
    let expected = -c.length() / 2.0;
    let total_err = (twist.total_twist - expected).abs();
    // torsion of the helix with a = b = 1 is 1/2
    let rate = numeric::derivative_scalar(c.params(), &twist.theta, false, DiffOrder::Fourth);
    let rate_err = rate.iter().map(|r| (r + 0.5).abs()).fold(0.0, f64::max);
    check(
        total_err < 1e-6 && rate_err < 1e-6,
        format!(
            "total twist {:.12} vs {expected:.12} (error {total_err:.1e}), max |theta' + tau| {rate_err:.1e}",
            twist.total_twist
        ),
    )
}

fn ac9() -> Outcome {
    let flat = chart("euclidean3");
    let loop_samples = |spec: CurveSpec, n| arclength_reparametrize(&sample_curve(&spec, n).unwrap()).unwrap();
    let once = normal_holonomy(&loop_samples(AnalyticCurve::circle(1.0, 0.0, TAU).into(), 1000), &flat).unwrap();
    let identity = (&once.matrix - Matrix::identity(2, 2)).amax();
    // trefoil knot, whose total torsion is not a multiple of 2π
    let space_loop = |t1: f64| -> CurveSpec {
        let expr = ["(2 + cos(3*t))*cos(2*t)".into(), "(2 + cos(3*t))*sin(2*t)".into(), "sin(3*t)".into()];
        AnalyticCurve::from_expressions(&expr, 0.0, t1, true).unwrap().into()
    };
    let single = normal_holonomy(&loop_samples(space_loop(TAU), 2001), &flat).unwrap();
    let double = normal_holonomy(&loop_samples(space_loop(2.0 * TAU), 4001), &flat).unwrap();
    let composition = (&double.matrix - &single.matrix * &single.matrix).amax();
    check(
        identity < 1e-8 && composition < 1e-8,
        format!(
            "circle holonomy - I {identity:.1e}, double loop - square {composition:.1e} (< 1e-8), \
             trefoil angle {:.6}",
            single.angle.unwrap()
        ),
    )
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rmframe")
}

fn curve_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../curves").join(name)
}

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(bin()).args(args).output().unwrap();
    (out.status.code().unwrap(), out.stdout)
}

fn ac10() -> Outcome {
    let helix_file = curve_path("helix.json");
    let helix_arg = helix_file.to_str().unwrap();
    let mut notes = Vec::new();
    let mut ok = true;

    for format in ["csv", "json"] {
        let args = ["frames", "--curve", helix_arg, "--n", "500", "--format", format];
        let (c1, first) = run(&args);
        let (c2, second) = run(&args);
        let same = c1 == 0 && c2 == 0 && first == second;
        ok &= same;
        notes.push(format!("{format} byte-identical {same}"));
    }
    let report_args = ["report", "--curve", helix_arg, "--n", "200"];
    let identical_report = run(&report_args) == run(&report_args);
    ok &= identical_report;
    notes.push(format!("report byte-identical {identical_report}"));

    let layer = ConfigLayer {
        curve: Some(serde_json::Value::String(helix_arg.into())),
        n: Some(500),
        ..Default::default()
    };
    let config = RunConfig::resolve(Operation::Frames, layer).unwrap();
    let p = prepare(&config).unwrap();
    let framed = rm_frame_manifold(&p.curve, p.chart(), &seeds(&p, &[]).unwrap()).unwrap();
    let (_, csv) = run(&["frames", "--curve", helix_arg, "--n", "500"]);
    let (_, rows) = parse_csv(&String::from_utf8(csv).unwrap()).unwrap();
    let exact = rows.len() == p.curve.len()
        && rows.iter().enumerate().all(|(i, row)| {
            let mut expected = vec![p.curve.params()[i]];
            expected.extend(p.curve.positions()[i].iter());
            for w in &framed.frames[i] {
                expected.extend(w.iter());
            }
            expected.iter().zip(row).all(|(a, b)| a.to_bits() == b.to_bits())
        });
    ok &= exact;
    notes.push(format!("CSV reload exact {exact}"));

    let line = r#"{"kind": "analytic", "expr": ["t", "0", "0"], "t0": 0, "t1": 1}"#;
    let codes = [
        run(&["frames", "--curve", helix_arg]).0,
        run(&["report", "--curve", helix_arg, "--field", "frenet-normal"]).0,
        run(&["frames", "--curve", "missing.json"]).0,
        run(&["transport", "--curve", line, "--field", "frenet-normal"]).0,
    ];
    let codes_ok = codes == [0, 1, 2, 3];
    ok &= codes_ok;
    notes.push(format!("exit codes {codes:?} (expected [0, 1, 2, 3])"));
    check(ok, notes.join(", "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
        ("AC-7", ac7),
        ("AC-8", ac8),
        ("AC-9", ac9),
        ("AC-10", ac10),
    ];
    let mut failed = 0;
    for (id, criterion) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("{id:<6} PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id:<6} FAIL  {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
