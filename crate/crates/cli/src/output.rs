//! Plain-text output formats. Numbers are written in the shortest decimal
//! form that reads back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rmframe_core::RuledSurfaceMesh;

use crate::error::{CliError, Result};

pub fn number(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

/// Coordinate column names: `x, y, z` up to three dimensions, `x1..xn` beyond.
pub fn coordinate_names(dim: usize) -> Vec<String> {
    if dim <= 3 {
        ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

/// Header of a per-sample table: `s`, the position, optionally the tangent
/// `t1..tn`, and `fields` vectors named `vk_1..vk_n`.
pub fn table_header(dim: usize, tangent: bool, fields: usize) -> Vec<String> {
    let mut header = vec!["s".to_string()];
    header.extend(coordinate_names(dim));
    if tangent {
        header.extend((1..=dim).map(|j| format!("t{j}")));
    }
    for k in 1..=fields {
        header.extend((1..=dim).map(|j| format!("v{k}_{j}")));
    }
    header
}

pub fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    let mut buf = ryu::Buffer::new();
    for row in rows {
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(buf.format(*x));
        }
        out.push('\n');
    }
    out
}

/// Reads a table written by [`csv`].
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Validation("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| CliError::Validation(format!("CSV row {}: {e}", i + 1)))?;
            if row.len() != header.len() {
                return Err(CliError::Validation(format!(
                    "CSV row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                )));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

/// Wavefront OBJ with `v` records in mesh order and one-based quad faces.
pub fn obj(mesh: &RuledSurfaceMesh) -> String {
    let mut out = String::new();
    let mut buf = ryu::Buffer::new();
    for p in &mesh.points {
        out.push('v');
        for x in p.iter() {
            out.push(' ');
            out.push_str(buf.format(*x));
        }
        out.push('\n');
    }
    for q in &mesh.quads {
        let _ = writeln!(out, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1);
    }
    out
}

/// Writes to `path`, or to standard output without one.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, content).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
