//! `rmframe`: rotation-minimizing frames, normal transport, ruled surfaces
//! and verification reports from the command line.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

pub use config::{ConfigLayer, FieldKind, Format, Operation, RunConfig};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "rmframe", version, about = "Rotation-minimizing frames and normal transport along curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Write the rotation-minimizing frame at every sample.
    Frames,
    /// Transport seed vectors through the normal bundle.
    Transport,
    /// Write the ruled surface swept by a normal field as OBJ.
    Surface,
    /// Run the invariant suite and write a pass/fail report.
    Report,
    /// Holonomy of the normal bundle around a closed curve.
    Holonomy,
}

impl From<Command> for Operation {
    fn from(c: Command) -> Self {
        match c {
            Command::Frames => Operation::Frames,
            Command::Transport => Operation::Transport,
            Command::Surface => Operation::Surface,
            Command::Report => Operation::Report,
            Command::Holonomy => Operation::Holonomy,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Curve JSON file, or an inline JSON document.
    #[arg(long, global = true)]
    pub curve: Option<String>,
    /// Chart name, chart JSON file, or inline JSON document.
    #[arg(long, global = true)]
    pub chart: Option<String>,
    /// Number of samples.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Drift tolerance used by the report.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with default values for any of these flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed normal vector at the first sample, as comma-separated components.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = config::parse_vector)]
    pub v0: Vec<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub field: Option<FieldKind>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
    /// Number of rulings (rows) in the surface mesh.
    #[arg(long, global = true)]
    pub rulings: Option<usize>,
}

impl Flags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            curve: self.curve.clone().map(Value::String),
            chart: self.chart.clone().map(Value::String),
            n: self.n,
            tol: self.tol,
            out: self.out.clone(),
            format: self.format,
            v0: (!self.v0.is_empty()).then(|| self.v0.clone()),
            field: self.field,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            rulings: self.rulings,
        }
    }

    /// Flags over the config file over defaults.
    pub fn resolve(&self, command: Command) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => ConfigLayer::from_file(path)?,
            None => ConfigLayer::default(),
        };
        RunConfig::resolve(command.into(), self.layer().over(file))
    }
}

/// Runs one command and writes its output.
pub fn run(config: &RunConfig) -> Result<()> {
    let out = config.out.as_deref();
    match config.operation {
        Operation::Frames => output::emit(out, &commands::frames(config)?),
        Operation::Transport => output::emit(out, &commands::transport(config)?),
        Operation::Surface => output::emit(out, &commands::surface(config)?),
        Operation::Holonomy => output::emit(out, &commands::holonomy(config)?),
        Operation::Report => {
            let report = report::build(config)?;
            let json = commands::json(&report);
            if out.is_some() {
                output::emit(out, &json)?;
                print!("{}", report.text());
            } else {
                eprint!("{}", report.text());
                output::emit(None, &json)?;
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::ChecksFailed {
                    failed: report.failed(),
                    total: report.checks.len(),
                })
            }
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.flags.resolve(cli.command).and_then(|config| run(&config)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rmframe: {e}");
            e.exit_code()
        }
    }
}
