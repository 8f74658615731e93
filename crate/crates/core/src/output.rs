//! Tabular output in CSV or JSON, with fixed six-decimal floats, and
//! atomic file writes.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::Result;
use crate::game::Outcome;
use crate::sweep::{CellValue, CurveTable, SweepCell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// JSON for `play`, CSV for sweeps.
    #[default]
    Auto,
    Csv,
    Json,
}

impl Format {
    /// Concrete format for a subcommand whose natural format is `natural`.
    pub fn or(self, natural: Format) -> Format {
        match self {
            Format::Auto => natural,
            f => f,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Auto => "auto",
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Format::Auto),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("must be one of auto, csv, json (got `{other}`)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Float(f64),
    Flag(bool),
    Text(String),
    Empty,
}

/// Formats a float with six decimals; never prints a negative zero.
pub fn fmt_float(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Float(v) => fmt_float(*v),
            Field::Flag(b) => if *b { "1" } else { "0" }.to_string(),
            Field::Text(t) => t.clone(),
            Field::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Float(v) if v.is_finite() => {
                Value::Number(fmt_float(*v).parse::<Number>().expect("formatted float is valid JSON"))
            }
            Field::Float(_) | Field::Empty => Value::Null,
            Field::Flag(b) => Value::Bool(*b),
            Field::Text(t) => Value::String(t.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Auto | Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Field::csv))?;
                }
                Ok(w.into_inner().map_err(|e| e.into_error())?)
            }
            Format::Json => {
                let mut out = Vec::new();
                let objects: Vec<String> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, f)| (c.to_string(), f.json()))
                            .collect();
                        Value::Object(obj).to_string()
                    })
                    .collect();
                if self.rows.len() == 1 && self.columns == OUTCOME_COLUMNS {
                    writeln!(out, "{}", objects[0])?;
                } else {
                    writeln!(out, "[")?;
                    for (i, o) in objects.iter().enumerate() {
                        let sep = if i + 1 < objects.len() { "," } else { "" };
                        writeln!(out, "{o}{sep}")?;
                    }
                    writeln!(out, "]")?;
                }
                Ok(out)
            }
        }
    }
}

pub const OUTCOME_COLUMNS: [&str; 6] = [
    "proposed_split",
    "accepted",
    "payoff_allocator",
    "payoff_recipient",
    "util_allocator",
    "util_recipient",
];

pub fn outcome_table(o: &Outcome) -> Table {
    Table {
        columns: OUTCOME_COLUMNS.to_vec(),
        rows: vec![vec![
            Field::Float(o.proposed_split.own_share()),
            Field::Flag(o.accepted),
            Field::Float(o.payoff_allocator),
            Field::Float(o.payoff_recipient),
            Field::Float(o.util_allocator),
            Field::Float(o.util_recipient),
        ]],
    }
}

pub const ENVELOPE_MIN: &str = "envelope_min";
pub const ENVELOPE_MAX: &str = "envelope_max";

/// Curve cells followed by the envelope, as `envelope_min`/`envelope_max`
/// rows with an empty `curve_value`.
pub fn curve_table(t: &CurveTable) -> Table {
    let name = t.param.to_string();
    let mut rows: Vec<Vec<Field>> = t
        .cells
        .iter()
        .map(|c| {
            let m = c.markers.unwrap_or_default();
            vec![
                Field::Text(name.clone()),
                Field::Float(c.coordinates[0].1),
                Field::Float(c.coordinates[1].1),
                Field::Float(c.real().unwrap_or(f64::NAN)),
                Field::Flag(m.is_best_split),
                Field::Flag(m.is_min_acceptable),
            ]
        })
        .collect();
    for (label, pick) in [(ENVELOPE_MIN, false), (ENVELOPE_MAX, true)] {
        rows.extend(t.envelope.iter().map(|e| {
            vec![
                Field::Text(label.to_string()),
                Field::Empty,
                Field::Float(e.split),
                Field::Float(if pick { e.max } else { e.min }),
                Field::Flag(false),
                Field::Flag(false),
            ]
        }));
    }
    Table {
        columns: vec![
            "curve_param",
            "curve_value",
            "split",
            "utility",
            "is_best_split",
            "is_min_acceptable",
        ],
        rows,
    }
}

pub fn matrix_table(cells: &[SweepCell]) -> Table {
    Table {
        columns: vec!["d", "split", "accepted"],
        rows: cells
            .iter()
            .map(|c| {
                vec![
                    Field::Float(c.coordinates[0].1),
                    Field::Float(c.coordinates[1].1),
                    Field::Flag(c.flag().unwrap_or(false)),
                ]
            })
            .collect(),
    }
}

pub fn tau_table(cells: &[SweepCell]) -> Table {
    Table {
        columns: vec!["gamma", "d", "tau"],
        rows: cells
            .iter()
            .map(|c| {
                vec![
                    Field::Float(c.coordinates[0].1),
                    Field::Float(c.coordinates[1].1),
                    Field::Float(c.real().unwrap_or(f64::NAN)),
                ]
            })
            .collect(),
    }
}

pub fn game_grid_table(cells: &[SweepCell]) -> Table {
    Table {
        columns: vec!["axis1", "axis2", "proposed_split", "accepted"],
        rows: cells
            .iter()
            .map(|c| {
                let (split, accepted) = match c.value {
                    CellValue::Game {
                        proposed_split,
                        accepted,
                    } => (proposed_split, accepted),
                    _ => (f64::NAN, false),
                };
                vec![
                    Field::Float(c.coordinates[0].1),
                    Field::Float(c.coordinates[1].1),
                    Field::Float(split),
                    Field::Flag(accepted),
                ]
            })
            .collect(),
    }
}

/// Writes `bytes` to `path` via a temporary file in the same directory and
/// a rename; `-` writes to stdout.
pub fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    if path.as_os_str() == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes)?;
        stdout.flush()?;
        return Ok(());
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        Table {
            columns: vec!["d", "split", "accepted"],
            rows: vec![
                vec![Field::Float(0.0), Field::Float(0.5), Field::Flag(true)],
                vec![Field::Float(-1e-12), Field::Float(1.0 / 3.0), Field::Flag(false)],
            ],
        }
    }

    #[test]
    fn csv_uses_six_decimals_and_binary_flags() {
        let text = String::from_utf8(sample().render(Format::Csv).unwrap()).unwrap();
        assert_eq!(
            text,
            "d,split,accepted\n0.000000,0.500000,1\n0.000000,0.333333,0\n"
        );
    }

    #[test]
    fn json_mirrors_columns() {
        let text = String::from_utf8(sample().render(Format::Json).unwrap()).unwrap();
        assert!(text.contains(r#"{"d":0.000000,"split":0.500000,"accepted":true}"#), "{text}");
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 2);
        assert_eq!(parsed[1]["split"].as_f64(), Some(0.333333));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        write_output(&path, b"new").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
