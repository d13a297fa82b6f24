//! Built-in charts with closed-form metrics, Christoffel symbols, geodesics
//! and isometries.
//!
//! The sphere has radius 1 and the hyperbolic space curvature -1; other
//! radii follow by scaling the metric by a constant, which leaves the
//! Christoffel symbols and hence all transports unchanged.

pub mod hyperbolic;
pub mod stereographic;

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{GeometryError, Result};
use crate::riemannian::{Christoffel, Isometry, MetricChart};
use crate::{Matrix, Vector};

pub use stereographic::{embedding_oracle_transport, embedding_oracle_transport_points};

pub const CHART_NAMES: [&str; 5] = [
    "euclidean3",
    "sphere3_stereographic",
    "hyperbolic3_halfspace",
    "flat_torus3",
    "warped_product_demo",
];

/// `(point, direction, s) ↦ point` at arclength `s` along the geodesic, or
/// `None` for directions the closed form does not cover.
pub type GeodesicFn = Arc<dyn Fn(&Vector, &Vector, f64) -> Option<Vector> + Send + Sync>;

/// A chart with its closed-form extras.
#[derive(Clone)]
pub struct ChartCatalogEntry {
    pub name: String,
    pub chart: MetricChart,
    pub geodesic: Option<GeodesicFn>,
    pub isometries: Vec<Isometry>,
    pub doc: String,
}

impl fmt::Debug for ChartCatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartCatalogEntry")
            .field("name", &self.name)
            .field("chart", &self.chart)
            .field("geodesic", &self.geodesic.is_some())
            .field("isometries", &self.isometries)
            .finish()
    }
}

impl ChartCatalogEntry {
    pub fn geodesic_point(&self, x: &Vector, d: &Vector, s: f64) -> Option<Vector> {
        self.geodesic.as_ref().and_then(|g| g(x, d, s))
    }
}

/// Looks up a built-in chart by name.
pub fn get_chart(name: &str) -> Result<ChartCatalogEntry> {
    match name {
        "euclidean3" => Ok(euclidean3()),
        "sphere3_stereographic" => Ok(sphere3()),
        "hyperbolic3_halfspace" => Ok(hyperbolic3()),
        "flat_torus3" => Ok(flat_torus3()),
        "warped_product_demo" => Ok(warped_product()),
        _ => Err(GeometryError::UnknownChart {
            name: name.to_string(),
            available: CHART_NAMES.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

/// Christoffel symbols of `e^{2φ} δ_ij` from the gradient of `φ`.
pub fn conformal_christoffel(grad: &[f64]) -> Christoffel {
    let n = grad.len();
    Christoffel::from_fn(n, |k, i, j| {
        let mut value = 0.0;
        if k == i {
            value += grad[j];
        }
        if k == j {
            value += grad[i];
        }
        if i == j {
            value -= grad[k];
        }
        value
    })
}

/// Rotation by `angle` about `axis` (Rodrigues' formula).
pub fn rotation_matrix(axis: &Vector, angle: f64) -> Matrix {
    let k = axis.normalize();
    let cross = Matrix::from_row_slice(3, 3, &[0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0]);
    Matrix::identity(3, 3) + &cross * angle.sin() + &cross * &cross * (1.0 - angle.cos())
}

fn v3(x: f64, y: f64, z: f64) -> Vector {
    Vector::from_vec(vec![x, y, z])
}

fn diagonal(entries: [f64; 3]) -> Matrix {
    Matrix::from_diagonal(&Vector::from_vec(entries.to_vec()))
}

fn straight_line() -> GeodesicFn {
    Arc::new(|x, d, s| Some(x + d.normalize() * s))
}

/// `x ↦ x / |x|²` with its closed-form differential.
fn inversion(name: &str, min_radius: f64) -> Isometry {
    Isometry::new(name, Arc::new(|x: &Vector| x / x.norm_squared()))
        .with_differential(Arc::new(|x: &Vector, u: &Vector| {
            let r2 = x.norm_squared();
            u / r2 - x * (2.0 * x.dot(u) / (r2 * r2))
        }))
        .with_domain(Arc::new(move |x: &Vector| x.norm() > min_radius))
}

fn euclidean3() -> ChartCatalogEntry {
    ChartCatalogEntry {
        name: "euclidean3".into(),
        chart: MetricChart::flat(3),
        geodesic: Some(straight_line()),
        isometries: vec![
            Isometry::affine(
                "screw_motion",
                rotation_matrix(&v3(1.0, 2.0, 2.0), 0.8),
                v3(1.0, -2.0, 0.5),
            ),
            Isometry::affine("translation", Matrix::identity(3, 3), v3(-0.3, 4.0, 1.5)),
            Isometry::affine("reflection_z", diagonal([1.0, 1.0, -1.0]), Vector::zeros(3)),
        ],
        doc: "Flat R^3 with the identity metric; all Christoffel symbols vanish.".into(),
    }
}

fn sphere3() -> ChartCatalogEntry {
    let chart = MetricChart::new(
        "sphere3_stereographic",
        3,
        Arc::new(|x: &Vector| {
            let q = 1.0 + x.norm_squared();
            Matrix::identity(3, 3) * (4.0 / (q * q))
        }),
    )
    .with_christoffel(Arc::new(|x: &Vector| {
        let q = 1.0 + x.norm_squared();
        let grad: Vec<f64> = x.iter().map(|c| -2.0 * c / q).collect();
        conformal_christoffel(&grad)
    }))
    .with_domain(Arc::new(stereographic::in_chart));
    ChartCatalogEntry {
        name: "sphere3_stereographic".into(),
        chart,
        geodesic: Some(Arc::new(|x, d, s| Some(stereographic::geodesic_point(x, d, s)))),
        isometries: vec![
            Isometry::affine("rotation", rotation_matrix(&v3(0.0, 1.0, 1.0), 1.2), Vector::zeros(3)),
            Isometry::affine("reflection_x", diagonal([-1.0, 1.0, 1.0]), Vector::zeros(3)),
            inversion("inversion", 1e-3),
        ],
        doc: "Unit S^3 in stereographic coordinates from the north pole, g = 4 δ / (1 + |x|^2)^2, |x| < 1e3."
            .into(),
    }
}

fn hyperbolic3() -> ChartCatalogEntry {
    let chart = MetricChart::new(
        "hyperbolic3_halfspace",
        3,
        Arc::new(|x: &Vector| Matrix::identity(3, 3) / (x[2] * x[2])),
    )
    .with_christoffel(Arc::new(|x: &Vector| conformal_christoffel(&[0.0, 0.0, -1.0 / x[2]])))
    .with_domain(Arc::new(|x: &Vector| x[2] > 0.0));
    ChartCatalogEntry {
        name: "hyperbolic3_halfspace".into(),
        chart,
        geodesic: Some(Arc::new(|x, d, s| Some(hyperbolic::geodesic_point(x, d, s)))),
        isometries: vec![
            Isometry::affine("dilation", Matrix::identity(3, 3) * 2.0, Vector::zeros(3)),
            Isometry::affine("horizontal_translation", Matrix::identity(3, 3), v3(1.5, -0.5, 0.0)),
            Isometry::affine("vertical_axis_rotation", rotation_matrix(&v3(0.0, 0.0, 1.0), 0.9), Vector::zeros(3)),
            inversion("inversion", 0.0),
        ],
        doc: "Upper half-space model of hyperbolic 3-space, g = δ / z^2, z > 0.".into(),
    }
}

fn flat_torus3() -> ChartCatalogEntry {
    let chart = MetricChart::flat(3).with_name("flat_torus3").with_periods(vec![TAU; 3]);
    let quarter_turn = rotation_matrix(&v3(0.0, 0.0, 1.0), FRAC_PI_2);
    ChartCatalogEntry {
        name: "flat_torus3".into(),
        chart,
        geodesic: Some(straight_line()),
        isometries: vec![
            Isometry::affine("translation", Matrix::identity(3, 3), v3(0.5, std::f64::consts::PI, -1.0)),
            Isometry::affine("quarter_turn", quarter_turn, Vector::zeros(3)),
        ],
        doc: "Flat metric on R^3 / (2π Z)^3; loops may close up to a period.".into(),
    }
}

fn warp(u: f64) -> f64 {
    1.0 + 0.25 * u * u
}

fn warped_product() -> ChartCatalogEntry {
    let chart = MetricChart::new(
        "warped_product_demo",
        3,
        Arc::new(|x: &Vector| {
            let w = warp(x[0]);
            diagonal([1.0, 1.0, w * w])
        }),
    )
    .with_christoffel(Arc::new(|x: &Vector| {
        let w = warp(x[0]);
        let dw = 0.5 * x[0];
        let mut gamma = Christoffel::zeros(3);
        gamma.set(0, 2, 2, -w * dw);
        gamma.set(2, 0, 2, dw / w);
        gamma.set(2, 2, 0, dw / w);
        gamma
    }));
    ChartCatalogEntry {
        name: "warped_product_demo".into(),
        chart,
        // slices x3 = const are fixed by the reflection in x3, hence totally
        // geodesic and flat; other geodesics have no closed form
        geodesic: Some(Arc::new(|x, d, s| (d[2] == 0.0).then(|| x + d.normalize() * s))),
        isometries: vec![
            Isometry::affine("translation_x2", Matrix::identity(3, 3), v3(0.0, 1.3, 0.0)),
            Isometry::affine("translation_x3", Matrix::identity(3, 3), v3(0.0, 0.0, -0.7)),
            Isometry::affine("reflection_x1", diagonal([-1.0, 1.0, 1.0]), Vector::zeros(3)),
        ],
        doc: "g = diag(1, 1, w(x1)^2) with w(u) = 1 + u^2 / 4.".into(),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChartDocument {
    Builtin {
        builtin: String,
    },
    Expressions {
        #[serde(default)]
        name: Option<String>,
        metric: Vec<Vec<String>>,
        #[serde(default)]
        christoffel: Option<Vec<Vec<Vec<String>>>>,
        #[serde(default)]
        domain: Vec<String>,
        #[serde(default)]
        periods: Option<Vec<f64>>,
    },
}

/// Reads a chart document: `{"builtin": "<name>"}`, or
/// `{"metric": [[..]], "christoffel": [[[..]]], "domain": [..], "periods": [..]}`
/// with calculator expressions in `x1..xn`. Christoffel symbols are indexed
/// `[k][i][j]`; each domain expression must be positive inside the chart.
pub fn chart_from_json(value: serde_json::Value) -> Result<ChartCatalogEntry> {
    let doc: ChartDocument = serde_json::from_value(value).map_err(|e| GeometryError::InvalidSpec(e.to_string()))?;
    match doc {
        ChartDocument::Builtin { builtin } => get_chart(&builtin),
        ChartDocument::Expressions {
            name,
            metric,
            christoffel,
            domain,
            periods,
        } => {
            let name = name.unwrap_or_else(|| "custom".to_string());
            let mut chart = MetricChart::from_expressions(name.clone(), &metric, christoffel.as_deref(), &domain)?;
            if let Some(p) = periods {
                if p.len() != chart.dim() {
                    return Err(GeometryError::InvalidSpec("one period per coordinate is required".into()));
                }
                chart = chart.with_periods(p);
            }
            Ok(ChartCatalogEntry {
                name,
                chart,
                geodesic: None,
                isometries: Vec::new(),
                doc: "chart read from metric expressions".into(),
            })
        }
    }
}

/// Reads a chart document from a string, accepting a bare built-in name too.
pub fn chart_from_str(src: &str) -> Result<ChartCatalogEntry> {
    let trimmed = src.trim();
    if !trimmed.starts_with('{') {
        return get_chart(trimmed);
    }
    let value = serde_json::from_str(trimmed).map_err(|e| GeometryError::InvalidSpec(e.to_string()))?;
    chart_from_json(value)
}
