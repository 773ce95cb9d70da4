//! Machine-readable report documents.

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Significant digits of every real number in a report.
pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Closed-form expression.
    Formula,
    /// Direct output of a discrete computation.
    Computed,
    /// Limit of a sequence of computations.
    Extrapolated,
}

/// A real number with its source tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tagged {
    pub value: f64,
    pub source: Source,
}

pub fn formula(value: f64) -> Tagged {
    Tagged { value, source: Source::Formula }
}

pub fn computed(value: f64) -> Tagged {
    Tagged { value, source: Source::Computed }
}

pub fn extrapolated(value: f64) -> Tagged {
    Tagged { value, source: Source::Extrapolated }
}

/// Sampled profile `(x_i, y_i)` with one source tag for the whole series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub results: Value,
    /// Solver and harness diagnostics; free of wall-clock data so that equal
    /// inputs give byte-identical reports.
    pub diagnostics: Value,
    /// Files written next to the report.
    pub artifacts: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: &str, config: &RunConfig, results: impl Serialize, diagnostics: impl Serialize) -> Result<Self, CliError> {
        let ser = |e: serde_json::Error| CliError::Output(e.to_string());
        Ok(Self {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: "hardy",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: config.clone(),
            results: serde_json::to_value(results).map_err(ser)?,
            diagnostics: serde_json::to_value(diagnostics).map_err(ser)?,
            artifacts: Vec::new(),
        })
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut v = serde_json::to_value(self).map_err(|e| CliError::Output(e.to_string()))?;
        round_reals(&mut v);
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Output(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// `path,value` rows for every leaf of the results, depth first.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut v = self.results.clone();
        round_reals(&mut v);
        let mut rows = Vec::new();
        flatten("", &v, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path", "value"]).map_err(|e| CliError::Output(e.to_string()))?;
        for (k, val) in rows {
            w.write_record([k, val]).map_err(|e| CliError::Output(e.to_string()))?;
        }
        String::from_utf8(w.into_inner().map_err(|e| CliError::Output(e.to_string()))?)
            .map_err(|e| CliError::Output(e.to_string()))
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_reals(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(m) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = m;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_reals),
        Value::Object(map) => map.values_mut().for_each(round_reals),
        _ => {}
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn json(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
