//! CSV datasets and model files.
//!
//! Model files are line oriented:
//!
//! ```text
//! target = dw/dt
//! threshold = 0.1
//! iterations = 2
//! converged = true
//! r_percent = ...
//! nrmse = ...
//! r2 = ...
//! fit_seconds = ...
//! simulate_seconds = ...
//! terms = 1, u, w, ...
//! 0.25<TAB>u'
//! 0.4<TAB>|u'|*u
//! dw/dt = 0.25*u' + 0.4*|u'|*u
//! ```
//!
//! `terms` lists the full library in column order; the tab-separated lines
//! give the nonzero coefficients. The last line is the rendered equation and
//! is informational only. Numbers use shortest round-trip formatting.
//!
//! Only `target` and the coefficient lines are required. Without `terms`
//! the library is the listed terms; `threshold` defaults to 0.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{render_equation, FitReport, Metrics, ModelTarget, SparseModel};
use crate::series::TimeSeries;
use crate::simulate::Prediction;
use crate::term::TermDescriptor;

/// Digits used for the equation line of model files.
pub const EQUATION_PRECISION: usize = 6;

/// Column layout of an input CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    /// `None` synthesizes `t = i·dt` from [`CsvSchema::dt`].
    pub time_col: Option<usize>,
    pub input_col: usize,
    pub output_col: usize,
    pub has_header: bool,
    pub delimiter: u8,
    pub dt: Option<f64>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            time_col: Some(0),
            input_col: 1,
            output_col: 2,
            has_header: true,
            delimiter: b',',
            dt: None,
        }
    }
}

impl CsvSchema {
    pub fn validate(&self) -> Result<()> {
        if self.input_col == self.output_col || self.time_col.is_some_and(|c| c == self.input_col || c == self.output_col)
        {
            return Err(Error::InvalidParameter("CSV column indices must be distinct".into()));
        }
        match (self.time_col, self.dt) {
            (None, None) => Err(Error::InvalidParameter(
                "a time column or a constant dt is required".into(),
            )),
            (_, Some(dt)) if !(dt > 0.0) || !dt.is_finite() => {
                Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")))
            }
            _ => Ok(()),
        }
    }
}

fn check_exists(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::FileNotFound(path.to_path_buf()))
    }
}

/// Reads a uniformly sampled series, keeping the first `max_points` rows
/// when given.
pub fn read_csv(path: impl AsRef<Path>, schema: &CsvSchema, max_points: Option<usize>) -> Result<TimeSeries> {
    let path = path.as_ref();
    schema.validate()?;
    check_exists(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .delimiter(schema.delimiter)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;

    let header_rows = usize::from(schema.has_header);
    let (mut t, mut u, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for (index, record) in reader.records().enumerate() {
        if max_points.is_some_and(|m| index >= m) {
            break;
        }
        // 1-based row number in the file
        let row = index + 1 + header_rows;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        let cell = |col: usize| -> Result<f64> {
            let raw = record.get(col).ok_or_else(|| Error::Parse {
                row,
                column: col,
                message: format!("row has only {} columns", record.len()),
            })?;
            raw.parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: col,
                message: format!("`{raw}` is not a number"),
            })
        };
        t.push(match schema.time_col {
            Some(c) => cell(c)?,
            None => index as f64 * schema.dt.unwrap_or(1.0),
        });
        u.push(cell(schema.input_col)?);
        w.push(cell(schema.output_col)?);
    }
    TimeSeries::new(t, u, w)
}

/// Writes `t,u,w` and, with a prediction, `w_pred,abs_err`.
pub fn write_series_csv(path: impl AsRef<Path>, ts: &TimeSeries, prediction: Option<&Prediction>) -> Result<()> {
    fs::write(path, format_series_csv(ts, prediction)?)?;
    Ok(())
}

pub fn format_series_csv(ts: &TimeSeries, prediction: Option<&Prediction>) -> Result<String> {
    if let Some(p) = prediction {
        if p.w_pred.len() != ts.len() {
            return Err(Error::LengthMismatch {
                what: "prediction",
                expected: ts.len(),
                found: p.w_pred.len(),
            });
        }
    }
    let mut out = String::with_capacity(ts.len() * 64);
    out.push_str(if prediction.is_some() { "t,u,w,w_pred,abs_err\n" } else { "t,u,w\n" });
    for i in 0..ts.len() {
        let _ = write!(out, "{},{},{}", ts.t()[i], ts.u()[i], ts.w()[i]);
        if let Some(p) = prediction {
            let _ = write!(out, ",{},{}", p.w_pred[i], (ts.w()[i] - p.w_pred[i]).abs());
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_model(path: impl AsRef<Path>, report: &FitReport) -> Result<()> {
    fs::write(path, format_model(report))?;
    Ok(())
}

pub fn format_model(report: &FitReport) -> String {
    let m = &report.model;
    let mut out = String::new();
    let _ = writeln!(out, "target = {}", m.target.label());
    let _ = writeln!(out, "threshold = {}", m.threshold);
    let _ = writeln!(out, "iterations = {}", m.iterations);
    let _ = writeln!(out, "converged = {}", m.converged);
    let _ = writeln!(out, "r_percent = {}", report.metrics.r_percent);
    let _ = writeln!(out, "nrmse = {}", report.metrics.nrmse);
    let _ = writeln!(out, "r2 = {}", report.metrics.r2);
    let _ = writeln!(out, "fit_seconds = {}", report.fit_seconds);
    let _ = writeln!(out, "simulate_seconds = {}", report.simulate_seconds);
    let names: Vec<String> = m.terms.iter().map(|t| t.name()).collect();
    let _ = writeln!(out, "terms = {}", names.join(", "));
    for (term, coef) in m.nonzero_terms() {
        let _ = writeln!(out, "{coef}\t{}", term.name());
    }
    let _ = writeln!(out, "{}", render_equation(m, EQUATION_PRECISION));
    out
}

pub fn read_model(path: impl AsRef<Path>) -> Result<FitReport> {
    let path = path.as_ref();
    check_exists(path)?;
    parse_model(&fs::read_to_string(path)?)
}

pub fn parse_model(text: &str) -> Result<FitReport> {
    let mut target = None;
    let mut threshold = None;
    let mut iterations = 0usize;
    let mut converged = true;
    let mut metrics = Metrics::default();
    let (mut fit_seconds, mut simulate_seconds) = (0.0, 0.0);
    let mut terms: Option<Vec<TermDescriptor>> = None;
    let mut coefficients: Vec<(usize, TermDescriptor, f64)> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let err = |message: String| Error::ModelFormat { line: line_no, message };
        let line = raw.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((coef, name)) = line.split_once('\t') {
            let coef: f64 = coef.trim().parse().map_err(|_| err(format!("bad coefficient `{coef}`")))?;
            let term: TermDescriptor = name.parse().map_err(|e: Error| err(e.to_string()))?;
            if coefficients.iter().any(|(_, t, _)| *t == term) {
                return Err(err(format!("term `{term}` listed twice")));
            }
            coefficients.push((line_no, term, coef));
            continue;
        }
        let Some((key, value)) = line.split_once(" = ") else {
            return Err(err(format!("unrecognized line `{line}`")));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| err(format!("bad number `{v}` for `{key}`")));
        match key.trim() {
            "target" => {
                target = Some(ModelTarget::from_label(value).ok_or_else(|| err(format!("unknown target `{value}`")))?)
            }
            "threshold" => threshold = Some(num(value)?),
            "iterations" => {
                iterations = value.trim().parse().map_err(|_| err(format!("bad iteration count `{value}`")))?
            }
            "converged" => {
                converged = value.trim().parse().map_err(|_| err(format!("bad flag `{value}`")))?
            }
            "r_percent" => metrics.r_percent = num(value)?,
            "nrmse" => metrics.nrmse = num(value)?,
            "r2" => metrics.r2 = num(value)?,
            "fit_seconds" => fit_seconds = num(value)?,
            "simulate_seconds" => simulate_seconds = num(value)?,
            "terms" => {
                let parsed = value
                    .split(',')
                    .map(|n| n.trim().parse::<TermDescriptor>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| err(e.to_string()))?;
                terms = Some(parsed);
            }
            // rendered equation
            "dw/dt" | "dy/dt" => {}
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }

    let missing = |what: &str| Error::ModelFormat {
        line: 0,
        message: format!("missing `{what}`"),
    };
    let target = target.ok_or_else(|| missing("target"))?;
    let terms = match terms {
        Some(t) => t,
        None => {
            let mut listed: Vec<TermDescriptor> = coefficients.iter().map(|(_, t, _)| *t).collect();
            listed.sort();
            listed.dedup();
            listed
        }
    };
    let mut coefs = vec![0.0; terms.len()];
    for (line, term, c) in coefficients {
        let j = terms.iter().position(|t| *t == term).ok_or_else(|| Error::ModelFormat {
            line,
            message: format!("term `{term}` is not in the library"),
        })?;
        coefs[j] = c;
    }
    let mut model = SparseModel::new(coefs, terms, threshold.unwrap_or(0.0), target)?;
    model.iterations = iterations;
    model.converged = converged;
    Ok(FitReport {
        model,
        metrics,
        fit_seconds,
        simulate_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::DerivFactor;

    fn actuator_model() -> SparseModel {
        let terms = vec![
            TermDescriptor::CONSTANT,
            TermDescriptor::new(DerivFactor::None, 1, 0, 0, 0),
            TermDescriptor::new(DerivFactor::Signed, 0, 0, 0, 0),
            TermDescriptor::new(DerivFactor::Absolute, 0, 0, 0, 0),
            TermDescriptor::new(DerivFactor::None, 0, 1, 0, 0),
            TermDescriptor::new(DerivFactor::None, 0, 1, 1, 0),
        ];
        SparseModel::new(vec![-0.17, -2.38, 0.58, 0.12, 0.0, -0.07], terms, 0.01, ModelTarget::Output).unwrap()
    }

    fn report(model: SparseModel) -> FitReport {
        FitReport {
            model,
            metrics: Metrics {
                r_percent: 1.5,
                nrmse: 0.23,
                r2: 0.99,
            },
            fit_seconds: 0.018,
            simulate_seconds: 4.5e-4,
        }
    }

    #[test]
    fn actuator_equation_line() {
        let text = format_model(&report(actuator_model()));
        assert_eq!(
            text.lines().last().unwrap(),
            "dw/dt = -0.17 - 2.38*u + 0.58*u' + 0.12*|u'| - 0.07*w*|w|"
        );
        assert_eq!(text.lines().filter(|l| l.contains('\t')).count(), 5);
    }

    #[test]
    fn zero_model_file() {
        let m = SparseModel::zero(actuator_model().terms, ModelTarget::Output);
        let text = format_model(&report(m.clone()));
        assert_eq!(text.lines().filter(|l| l.contains('\t')).count(), 0);
        assert_eq!(text.lines().last().unwrap(), "dw/dt = 0");
        assert_eq!(parse_model(&text).unwrap().model, SparseModel { threshold: 0.0, ..m });
    }

    #[test]
    fn model_round_trip() {
        let r = report(actuator_model());
        let back = parse_model(&format_model(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn malformed_model_lines() {
        assert!(matches!(parse_model("target = dq/dt\n"), Err(Error::ModelFormat { line: 1, .. })));
        assert!(matches!(
            parse_model("target = dw/dt\nthreshold = 0.1\nterms = 1\nabc\t1\n"),
            Err(Error::ModelFormat { line: 4, .. })
        ));
        assert!(matches!(parse_model("threshold = 0.1\n"), Err(Error::ModelFormat { .. })));
    }

    #[test]
    fn schema_validation() {
        let s = CsvSchema { input_col: 2, ..Default::default() };
        assert!(s.validate().is_err());
        let s = CsvSchema { time_col: None, ..Default::default() };
        assert!(s.validate().is_err());
        let s = CsvSchema { time_col: None, dt: Some(0.1), ..Default::default() };
        assert!(s.validate().is_ok());
    }
}
