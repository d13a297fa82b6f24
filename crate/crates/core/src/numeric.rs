//! Small numerical kernels shared by the geometry modules: Gauss-Legendre
//! quadrature, finite-difference stencils on sampled grids and quintic
//! Hermite interpolation.

use crate::Vector;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre5(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Adaptive Gauss-Legendre quadrature with bisection until two levels agree
/// within `tol` (absolute).
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gauss_legendre5(&mut f, a, b);
    adaptive(&mut f, a, b, whole, tol, 0)
}

fn adaptive(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = gauss_legendre5(f, a, mid);
    let right = gauss_legendre5(f, mid, b);
    let refined = left + right;
    let diff = (refined - whole).abs();
    if depth >= 12 || diff <= tol || diff <= 8.0 * f64::EPSILON * refined.abs() {
        return refined;
    }
    adaptive(f, a, mid, left, 0.5 * tol, depth + 1) + adaptive(f, mid, b, right, 0.5 * tol, depth + 1)
}

/// Weights of the first derivative of the Lagrange interpolant through
/// `nodes`, evaluated at `nodes[at]`.
pub fn first_derivative_weights(nodes: &[f64], at: usize) -> Vec<f64> {
    let x0 = nodes[at];
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            if j == at {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != at)
                    .map(|(_, &xm)| 1.0 / (x0 - xm))
                    .sum()
            } else {
                let mut w = 1.0 / (xj - x0);
                for (m, &xm) in nodes.iter().enumerate() {
                    if m != j && m != at {
                        w *= (x0 - xm) / (xj - xm);
                    }
                }
                w
            }
        })
        .collect()
}

/// Accuracy order of a finite-difference derivative on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    /// Three-point stencils.
    Second,
    /// Five-point stencils.
    Fourth,
}

impl DiffOrder {
    fn half_width(self) -> usize {
        match self {
            DiffOrder::Second => 1,
            DiffOrder::Fourth => 2,
        }
    }
}

/// Finite-difference derivative of tabulated vectors with respect to the
/// sample parameter.
///
/// Interior samples use centered stencils. Open ends use one-sided stencils of
/// the same order; closed curves (whose last sample repeats the first) wrap
/// around the seam.
pub fn derivative(params: &[f64], values: &[Vector], closed: bool, order: DiffOrder) -> Vec<Vector> {
    derivative_strided(params, values, closed, order, 1)
}

/// [`derivative`] with stencils that use every `stride`-th sample, for
/// Richardson-style error estimates.
pub fn derivative_strided(
    params: &[f64],
    values: &[Vector],
    closed: bool,
    order: DiffOrder,
    stride: usize,
) -> Vec<Vector> {
    let n = params.len();
    let half = order.half_width();
    let width = 2 * half + 1;
    assert_eq!(n, values.len());
    assert!(stride >= 1);
    assert!(
        (0..n).all(|i| i / stride + (n - 1 - i) / stride >= width - 1),
        "too few samples for a {width}-point stencil with stride {stride}"
    );
    let period = params[n - 1] - params[0];
    let unique = n - 1;
    let mut out = Vec::with_capacity(n);
    let mut nodes = vec![0.0; width];
    let mut idx = vec![0usize; width];
    for i in 0..n {
        let at;
        if closed && unique > (width - 1) * stride {
            // position of sample i within the unique loop [0, unique)
            let base = if i == n - 1 { unique } else { i };
            for (slot, offset) in (0..width).enumerate() {
                let k = base as isize + (offset as isize - half as isize) * stride as isize;
                let wraps = k.div_euclid(unique as isize);
                let j = k.rem_euclid(unique as isize) as usize;
                idx[slot] = j;
                nodes[slot] = params[j] + wraps as f64 * period;
            }
            at = half;
        } else {
            // slot of sample i: as central as the ends allow
            let before = i / stride;
            let after = (n - 1 - i) / stride;
            let a = half.min(before).max((width - 1).saturating_sub(after));
            for slot in 0..width {
                let j = i + slot * stride - a * stride;
                idx[slot] = j;
                nodes[slot] = params[j];
            }
            at = a;
        }
        let weights = first_derivative_weights(&nodes, at);
        // the weights sum to zero, so differencing against the centre value
        // makes constants exact
        let centre = &values[idx[at]];
        let mut acc = Vector::zeros(centre.len());
        for (slot, (w, &j)) in weights.iter().zip(idx.iter()).enumerate() {
            if slot != at {
                acc.axpy(*w, &(&values[j] - centre), 1.0);
            }
        }
        out.push(acc);
    }
    out
}

/// Scalar version of [`derivative`].
pub fn derivative_scalar(params: &[f64], values: &[f64], closed: bool, order: DiffOrder) -> Vec<f64> {
    let lifted: Vec<Vector> = values.iter().map(|&v| Vector::from_element(1, v)).collect();
    derivative(params, &lifted, closed, order)
        .into_iter()
        .map(|v| v[0])
        .collect()
}

/// Quintic Hermite interpolation on one interval of length `h`, matching
/// value, first and second derivative at both ends. Returns the value and
/// its first two derivatives with respect to the original parameter at the
/// normalized position `u` in `[0, 1]`.
#[allow(clippy::too_many_arguments)]
pub fn hermite5(
    p0: &Vector,
    v0: &Vector,
    a0: &Vector,
    p1: &Vector,
    v1: &Vector,
    a1: &Vector,
    h: f64,
    u: f64,
) -> (Vector, Vector, Vector) {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let b = [
        1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5,
        u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5,
        0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5,
        0.5 * u3 - u4 + 0.5 * u5,
        -4.0 * u3 + 7.0 * u4 - 3.0 * u5,
        10.0 * u3 - 15.0 * u4 + 6.0 * u5,
    ];
    let db = [
        -30.0 * u2 + 60.0 * u3 - 30.0 * u4,
        1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4,
        u - 4.5 * u2 + 6.0 * u3 - 2.5 * u4,
        1.5 * u2 - 4.0 * u3 + 2.5 * u4,
        -12.0 * u2 + 28.0 * u3 - 15.0 * u4,
        30.0 * u2 - 60.0 * u3 + 30.0 * u4,
    ];
    let ddb = [
        -60.0 * u + 180.0 * u2 - 120.0 * u3,
        -36.0 * u + 96.0 * u2 - 60.0 * u3,
        1.0 - 9.0 * u + 18.0 * u2 - 10.0 * u3,
        3.0 * u - 12.0 * u2 + 10.0 * u3,
        -24.0 * u + 84.0 * u2 - 60.0 * u3,
        60.0 * u - 180.0 * u2 + 120.0 * u3,
    ];
    let combine = |c: &[f64; 6], scale: f64| -> Vector {
        (p0 * c[0] + v0 * (h * c[1]) + a0 * (h * h * c[2]) + a1 * (h * h * c[3]) + v1 * (h * c[4]) + p1 * c[5])
            * scale
    };
    (combine(&b, 1.0), combine(&db, 1.0 / h), combine(&ddb, 1.0 / (h * h)))
}
