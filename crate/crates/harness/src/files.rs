//! File schemas for signals, matrices, and bits.
//!
//! Matrices: one row per line, comma-separated decimals (17+ significant
//! digits). Signals and thresholds: a single line of n values. Bits: a single
//! line of `+1`/`-1` tokens.

use std::fs;
use std::path::Path;

use onebit_core::model::{SensingEnsemble, Sign};
use onebit_core::Real;

use crate::csvio::{fmt_f64, parse_f64};
use crate::error::{HarnessError, Result};

pub fn matrix_to_string(a: &SensingEnsemble<Real>) -> String {
    let mut s = String::new();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn vector_to_string(v: &[Real]) -> String {
    let row: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
    format!("{}\n", row.join(","))
}

pub fn bits_to_string(bits: &[Sign]) -> String {
    let row: Vec<&str> = bits
        .iter()
        .map(|b| match b {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
        .collect();
    format!("{}\n", row.join(","))
}

fn parse_row(path: &str, line: &str) -> Result<Vec<Real>> {
    line.split(',')
        .map(|tok| {
            parse_f64(tok.trim()).ok_or_else(|| HarnessError::Parse {
                path: path.to_string(),
                detail: format!("bad number {tok:?}"),
            })
        })
        .collect()
}

pub fn read_matrix(path: &Path) -> Result<SensingEnsemble<Real>> {
    let text =
        fs::read_to_string(path).map_err(|e| HarnessError::io(path.display().to_string(), e))?;
    let name = path.display().to_string();
    let mut rows: Vec<Vec<Real>> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_row(&name, line)?);
    }
    let m = rows.len();
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    if m == 0 || n == 0 {
        return Err(HarnessError::Parse {
            path: name,
            detail: "empty matrix".into(),
        });
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(HarnessError::Parse {
            path: name,
            detail: "ragged matrix rows".into(),
        });
    }
    let entries: Vec<Real> = rows.into_iter().flatten().collect();
    Ok(SensingEnsemble::from_entries(m, n, entries, 0)?)
}

pub fn read_vector(path: &Path) -> Result<Vec<Real>> {
    let text =
        fs::read_to_string(path).map_err(|e| HarnessError::io(path.display().to_string(), e))?;
    let name = path.display().to_string();
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| HarnessError::Parse {
            path: name.clone(),
            detail: "empty vector file".into(),
        })?;
    parse_row(&name, line)
}

pub fn read_bits(path: &Path) -> Result<Vec<Sign>> {
    let text =
        fs::read_to_string(path).map_err(|e| HarnessError::io(path.display().to_string(), e))?;
    let name = path.display().to_string();
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| HarnessError::Parse {
            path: name.clone(),
            detail: "empty bits file".into(),
        })?;
    line.split(',')
        .map(|tok| match tok.trim() {
            "+1" | "1" => Ok(Sign::Plus),
            "-1" => Ok(Sign::Minus),
            other => Err(HarnessError::Parse {
                path: name.clone(),
                detail: format!("bad bit token {other:?}"),
            }),
        })
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| HarnessError::io(path.display().to_string(), e))
}
