//! CSV and JSON output of sweep rows.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{SpectrumRow, SweepRow, WitnessRow};
use crate::error::{Error, Result};
use crate::value::Extended;

pub const CSV_HEADER: [&str; 27] = [
    "nuT",
    "T",
    "configVariant",
    "b",
    "S1x",
    "S2x",
    "S1y",
    "S2y",
    "ENx",
    "ENy",
    "SV1x",
    "SV1y",
    "SV2x",
    "SV2y",
    "SV3x",
    "SV3y",
    "U",
    "bound",
    "Tc",
    "witnessTriggered",
    "SV1xDivergent",
    "SV1yDivergent",
    "SV2xDivergent",
    "SV2yDivergent",
    "SV3xDivergent",
    "SV3yDivergent",
    "error",
];

/// Decimal rendering with 12 significant digits, like C's `%.12g`.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(v: Option<f64>) -> String {
    v.map(format_g12).unwrap_or_default()
}

fn ext(v: Option<Extended>) -> String {
    match v {
        Some(Extended::Finite(x)) => format_g12(x),
        Some(Extended::Infinite(_)) => "inf".into(),
        None => String::new(),
    }
}

fn flag(v: bool) -> String {
    v.to_string()
}

fn text(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

impl Tabular for SweepRow {
    const HEADER: &'static [&'static str] = &CSV_HEADER;

    fn cells(&self) -> Vec<String> {
        let r = self;
        vec![
            format_g12(r.nu_t),
            format_g12(r.temperature),
            text(&r.config_variant),
            num(r.b),
            ext(r.s1x),
            ext(r.s2x),
            ext(r.s1y),
            ext(r.s2y),
            num(r.en_x),
            num(r.en_y),
            ext(r.sv1x),
            ext(r.sv1y),
            ext(r.sv2x),
            ext(r.sv2y),
            ext(r.sv3x),
            ext(r.sv3y),
            num(r.internal_energy),
            num(r.bound),
            num(r.tc),
            r.witness_triggered.map(flag).unwrap_or_default(),
            flag(r.sv1x_divergent),
            flag(r.sv1y_divergent),
            flag(r.sv2x_divergent),
            flag(r.sv2y_divergent),
            flag(r.sv3x_divergent),
            flag(r.sv3y_divergent),
            opt_text(&r.error),
        ]
    }
}

impl Tabular for SpectrumRow {
    const HEADER: &'static [&'static str] = &["nuT", "configVariant", "l", "omega1", "omega2"];

    fn cells(&self) -> Vec<String> {
        vec![
            format_g12(self.nu_t),
            text(&self.config_variant),
            self.l.to_string(),
            format_g12(self.omega_1),
            format_g12(self.omega_2),
        ]
    }
}

impl Tabular for WitnessRow {
    const HEADER: &'static [&'static str] = &[
        "nuT",
        "T",
        "configVariant",
        "OmegaX",
        "OmegaY",
        "OmegaXY",
        "OmegaXYAbs",
        "U",
        "U0",
        "bound",
        "boundAbs",
        "Tc",
        "TcAbs",
        "witnessTriggered",
        "error",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            format_g12(self.nu_t),
            format_g12(self.temperature),
            text(&self.config_variant),
            num(self.omega_x),
            num(self.omega_y),
            num(self.omega_xy),
            num(self.omega_xy_abs),
            num(self.internal_energy),
            num(self.ground_energy),
            num(self.bound),
            num(self.bound_abs),
            num(self.tc),
            num(self.tc_abs),
            self.witness_triggered.map(flag).unwrap_or_default(),
            opt_text(&self.error),
        ]
    }
}

/// A record with a fixed column layout, emitted as one CSV line or one
/// JSON object whose keys are the header names.
pub trait Tabular: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn opt_text(s: &Option<String>) -> String {
    s.as_deref().map(text).unwrap_or_default()
}

pub fn emit_csv<R: Tabular>(rows: &[R]) -> String {
    let mut out = R::HEADER.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.cells().join(","));
    }
    out
}

pub fn emit_json<R: Tabular>(rows: &[R]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::NumericalFailure(e.to_string()))
}

pub fn write_csv<R: Tabular>(rows: &[R], path: &Path) -> Result<()> {
    std::fs::write(path, emit_csv(rows)).map_err(Error::from)
}

pub fn write_json<R: Tabular>(rows: &[R], path: &Path) -> Result<()> {
    std::fs::write(path, emit_json(rows)? + "\n").map_err(Error::from)
}

/// A parsed sweep CSV, kept as text cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric cell; `inf` maps to +∞, an empty cell to `None`.
    pub fn number(&self, row: usize, name: &str) -> Option<f64> {
        let cell = &self.rows[row][self.column(name)?];
        match cell.as_str() {
            "" => None,
            "inf" => Some(f64::INFINITY),
            s => s.parse().ok(),
        }
    }
}

pub fn parse_csv(input: &str) -> Result<CsvTable> {
    let mut lines = input.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?
        .split(',')
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row: Vec<String> = line.split(',').map(String::from).collect();
        if row.len() != header.len() {
            return Err(Error::Config(format!("CSV row {} has {} fields, expected {}", k + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}
