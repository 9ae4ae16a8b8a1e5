//! Discovered sparse models and their reports.

use std::fmt;

use crate::error::{Error, Result};
use crate::term::{Sample, TermDescriptor};

/// Which rate a model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelTarget {
    /// `dw/dt`, the measured output.
    Output,
    /// `dy/dt`, the auxiliary state of a two-stage butterfly model. Its
    /// terms use the `w` slot for `y`.
    Aux,
}

impl ModelTarget {
    pub fn label(self) -> &'static str {
        match self {
            ModelTarget::Output => "dw/dt",
            ModelTarget::Aux => "dy/dt",
        }
    }

    pub fn state_symbol(self) -> &'static str {
        match self {
            ModelTarget::Output => "w",
            ModelTarget::Aux => "y",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s.trim() {
            "dw/dt" => Some(ModelTarget::Output),
            "dy/dt" => Some(ModelTarget::Aux),
            _ => None,
        }
    }
}

impl fmt::Display for ModelTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Sparse coefficient vector over a term library.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseModel {
    pub coefficients: Vec<f64>,
    pub terms: Vec<TermDescriptor>,
    pub threshold: f64,
    /// Number of least-squares fits performed.
    pub iterations: usize,
    /// False when the sweep limit was hit before the support settled.
    pub converged: bool,
    pub target: ModelTarget,
}

impl SparseModel {
    pub fn new(
        coefficients: Vec<f64>,
        terms: Vec<TermDescriptor>,
        threshold: f64,
        target: ModelTarget,
    ) -> Result<Self> {
        if coefficients.len() != terms.len() {
            return Err(Error::LengthMismatch {
                what: "coefficients",
                expected: terms.len(),
                found: coefficients.len(),
            });
        }
        if let Some(index) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                signal: "coefficients",
                index,
            });
        }
        Ok(SparseModel {
            coefficients,
            terms,
            threshold,
            iterations: 0,
            converged: true,
            target,
        })
    }

    pub fn zero(terms: Vec<TermDescriptor>, target: ModelTarget) -> Self {
        SparseModel {
            coefficients: vec![0.0; terms.len()],
            terms,
            threshold: 0.0,
            iterations: 0,
            converged: true,
            target,
        }
    }

    /// Indices of nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn support_terms(&self) -> Vec<TermDescriptor> {
        self.support().into_iter().map(|j| self.terms[j]).collect()
    }

    /// Nonzero `(term, coefficient)` pairs in canonical term order.
    pub fn nonzero_terms(&self) -> Vec<(TermDescriptor, f64)> {
        let mut out: Vec<_> = self
            .terms
            .iter()
            .zip(&self.coefficients)
            .filter(|(_, c)| **c != 0.0)
            .map(|(t, c)| (*t, *c))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn coefficient_of(&self, term: &TermDescriptor) -> f64 {
        self.terms
            .iter()
            .position(|t| t == term)
            .map_or(0.0, |j| self.coefficients[j])
    }

    pub fn uses_aux(&self) -> bool {
        self.terms
            .iter()
            .zip(&self.coefficients)
            .any(|(t, c)| *c != 0.0 && t.uses_aux())
    }

    /// Right-hand side evaluated at one sample.
    pub fn rate(&self, s: &Sample) -> f64 {
        self.terms
            .iter()
            .zip(&self.coefficients)
            .filter(|(_, c)| **c != 0.0)
            .map(|(t, c)| c * t.evaluate(s))
            .sum()
    }
}

/// Trajectory error metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    /// Relative percent error `100 · ‖w* − w‖₂ / ‖w‖₂`.
    pub r_percent: f64,
    pub nrmse: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: SparseModel,
    pub metrics: Metrics,
    pub fit_seconds: f64,
    pub simulate_seconds: f64,
}

/// Rounds to `digits` significant digits.
pub(crate) fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = digits.max(1);
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Human-readable equation listing the nonzero terms in canonical order,
/// e.g. `dw/dt = -0.17 - 2.38*u + 0.58*u'`.
pub fn render_equation(model: &SparseModel, precision: usize) -> String {
    let state = model.target.state_symbol();
    let mut out = format!("{} =", model.target.label());
    let terms = model.nonzero_terms();
    if terms.is_empty() {
        out.push_str(" 0");
        return out;
    }
    for (i, (term, coef)) in terms.iter().enumerate() {
        let c = round_significant(*coef, precision);
        let magnitude = c.abs();
        let body = if *term == TermDescriptor::CONSTANT {
            format!("{magnitude}")
        } else {
            format!("{magnitude}*{}", term.name_with_state(state))
        };
        match (i, c < 0.0) {
            (0, false) => out.push_str(&format!(" {body}")),
            (0, true) => out.push_str(&format!(" -{body}")),
            (_, false) => out.push_str(&format!(" + {body}")),
            (_, true) => out.push_str(&format!(" - {body}")),
        }
    }
    out
}
