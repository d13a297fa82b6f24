//! Run configuration: defaults, then the JSON config file, then command-line
//! flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rmframe_core::{chart_from_str, get_chart, ChartCatalogEntry, CurveSpec, CHART_NAMES};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Obj,
}

/// Which normal field a command acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// Transported from the first seed.
    Rm,
    FrenetNormal,
    FrenetBinormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Frames,
    Transport,
    Surface,
    Report,
    Holonomy,
}

impl Operation {
    fn default_format(self) -> Format {
        match self {
            Operation::Frames | Operation::Transport => Format::Csv,
            Operation::Surface => Format::Obj,
            Operation::Report | Operation::Holonomy => Format::Json,
        }
    }

    fn accepts(self, format: Format) -> bool {
        match self {
            Operation::Frames | Operation::Transport => format != Format::Obj,
            Operation::Surface => format == Format::Obj,
            Operation::Report | Operation::Holonomy => format == Format::Json,
        }
    }
}

/// One layer of settings; unset fields fall through to the layer below.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    /// Inline curve document, or a string holding a path or inline JSON.
    pub curve: Option<Value>,
    /// Chart name, inline chart document, or a string holding a path or JSON.
    pub chart: Option<Value>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub v0: Option<Vec<Vec<f64>>>,
    pub field: Option<FieldKind>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub rulings: Option<usize>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            what: "config file",
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid config file {}: {e}", path.display())))
    }

    /// `self` with unset fields taken from `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            curve: self.curve.or(lower.curve),
            chart: self.chart.or(lower.chart),
            n: self.n.or(lower.n),
            tol: self.tol.or(lower.tol),
            out: self.out.or(lower.out),
            format: self.format.or(lower.format),
            v0: self.v0.or(lower.v0),
            field: self.field.or(lower.field),
            lambda_min: self.lambda_min.or(lower.lambda_min),
            lambda_max: self.lambda_max.or(lower.lambda_max),
            rulings: self.rulings.or(lower.rulings),
        }
    }
}

/// Effective configuration of one run. Echoed verbatim in reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub operation: Operation,
    pub curve: Value,
    pub chart: Value,
    pub n: usize,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub v0: Vec<Vec<f64>>,
    pub field: FieldKind,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub rulings: usize,
}

pub const DEFAULT_N: usize = 1000;
pub const DEFAULT_TOL: f64 = 1e-8;

impl RunConfig {
    pub fn resolve(operation: Operation, layer: ConfigLayer) -> Result<Self> {
        let curve = layer
            .curve
            .ok_or_else(|| CliError::Validation("no curve given (use --curve or the config file)".into()))?;
        let config = RunConfig {
            operation,
            curve,
            chart: layer.chart.unwrap_or_else(|| Value::String("euclidean3".into())),
            n: layer.n.unwrap_or(DEFAULT_N),
            tol: layer.tol.unwrap_or(DEFAULT_TOL),
            out: layer.out,
            format: layer.format.unwrap_or(operation.default_format()),
            v0: layer.v0.unwrap_or_default(),
            field: layer.field.unwrap_or(FieldKind::Rm),
            lambda_min: layer.lambda_min.unwrap_or(0.0),
            lambda_max: layer.lambda_max.unwrap_or(1.0),
            rulings: layer.rulings.unwrap_or(11),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(CliError::Validation(format!("--n must be at least 4, got {}", self.n)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Validation(format!("--tol must be positive, got {}", self.tol)));
        }
        if !self.operation.accepts(self.format) {
            return Err(CliError::Validation(format!(
                "format {:?} is not available for {:?}",
                self.format, self.operation
            )));
        }
        if let Some(v) = self.v0.iter().find(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(CliError::Validation(format!("seed {v:?} is not finite")));
        }
        Ok(())
    }

    pub fn curve_spec(&self) -> Result<CurveSpec> {
        let doc = match &self.curve {
            Value::String(s) => inline_or_file(s, "curve file")?,
            other => other.clone(),
        };
        Ok(CurveSpec::from_json_value(doc)?)
    }

    pub fn chart_entry(&self) -> Result<ChartCatalogEntry> {
        match &self.chart {
            Value::String(s) => {
                let s = s.trim();
                if s.starts_with('{') || CHART_NAMES.contains(&s) {
                    Ok(chart_from_str(s)?)
                } else if Path::new(s).is_file() {
                    let text = read(Path::new(s), "chart file")?;
                    Ok(chart_from_str(&text)?)
                } else {
                    Ok(get_chart(s)?)
                }
            }
            other => Ok(rmframe_core::chart_from_json(other.clone())?),
        }
    }
}

fn read(path: &Path, what: &'static str) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        what,
        path: path.to_path_buf(),
        source,
    })
}

fn inline_or_file(s: &str, what: &'static str) -> Result<Value> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        read(Path::new(s), what)?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("invalid JSON in {s}: {e}")))
}

/// Parses a seed given as comma-separated components.
pub fn parse_vector(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad component '{c}': {e}")))
        .collect()
}
