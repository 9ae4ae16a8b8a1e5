//! Candidate term libraries.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::series::{DerivedSeries, TimeSeries};
use crate::term::{DerivFactor, Sample, TermDescriptor};

pub const MAX_POLY_DEGREE: u8 = 4;

pub const PRESET_DEFAULT: &str = "duhem-bouc-wen-poly";
pub const PRESET_BUTTERFLY: &str = "butterfly-aux";

/// Term grammar: every derivative factor in `deriv_factors` times every
/// monomial in `u`, `w`, `|w|` up to `max_poly_degree`, optionally times `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LibrarySpec {
    pub max_poly_degree: u8,
    pub deriv_factors: BTreeSet<DerivFactor>,
    /// Adds a `y`-multiplied copy of every term.
    pub include_aux: bool,
    /// Allows the `|w|` factor. Off for outputs that are never negative,
    /// where `|w|` duplicates `w`.
    pub include_abs_w: bool,
    pub preset_name: String,
}

impl LibrarySpec {
    /// Degree 2, all derivative factors, no auxiliary signal.
    pub fn duhem_bouc_wen_poly() -> Self {
        LibrarySpec {
            max_poly_degree: 2,
            deriv_factors: DerivFactor::ALL.into_iter().collect(),
            include_aux: false,
            include_abs_w: true,
            preset_name: PRESET_DEFAULT.to_string(),
        }
    }

    /// Default grammar with `y` copies, for the outer butterfly stage.
    /// `w = y² + c ≥ 0` there, so `|w|` is left out.
    pub fn butterfly_aux() -> Self {
        LibrarySpec {
            include_aux: true,
            include_abs_w: false,
            preset_name: PRESET_BUTTERFLY.to_string(),
            ..Self::duhem_bouc_wen_poly()
        }
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        match name {
            PRESET_DEFAULT => Ok(Self::duhem_bouc_wen_poly()),
            PRESET_BUTTERFLY => Ok(Self::butterfly_aux()),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_poly_degree > MAX_POLY_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "max_poly_degree {} exceeds {MAX_POLY_DEGREE}",
                self.max_poly_degree
            )));
        }
        if self.deriv_factors.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one derivative factor must be enabled".into(),
            ));
        }
        Ok(())
    }
}

impl Default for LibrarySpec {
    fn default() -> Self {
        Self::duhem_bouc_wen_poly()
    }
}

/// All canonical terms of `spec`, deduplicated, in canonical order.
pub fn enumerate_terms(spec: &LibrarySpec) -> Result<Vec<TermDescriptor>> {
    spec.validate()?;
    let max = spec.max_poly_degree;
    let max_abs = if spec.include_abs_w { max } else { 0 };
    let max_y = u8::from(spec.include_aux);
    let mut set = BTreeSet::new();
    for &deriv in &spec.deriv_factors {
        for pow_u in 0..=max {
            for pow_w in 0..=max - pow_u {
                for pow_abs_w in 0..=max_abs.min(max - pow_u - pow_w) {
                    for pow_y in 0..=max_y {
                        set.insert(TermDescriptor::new(deriv, pow_u, pow_w, pow_abs_w, pow_y));
                    }
                }
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// The three terms of a Bouc-Wen model with `n = 1`: `u̇`, `|u̇|w`, `u̇|w|`.
pub fn bouc_wen_terms() -> Vec<TermDescriptor> {
    vec![
        TermDescriptor::new(DerivFactor::Signed, 0, 0, 0, 0),
        TermDescriptor::new(DerivFactor::Absolute, 0, 1, 0, 0),
        TermDescriptor::new(DerivFactor::Signed, 0, 0, 1, 0),
    ]
}

/// Term evaluations (rows = samples, columns = terms).
#[derive(Debug, Clone, PartialEq)]
pub struct LibraryMatrix {
    values: DMatrix<f64>,
    terms: Vec<TermDescriptor>,
}

impl LibraryMatrix {
    pub fn new(values: DMatrix<f64>, terms: Vec<TermDescriptor>) -> Result<Self> {
        if values.ncols() != terms.len() {
            return Err(Error::LengthMismatch {
                what: "library terms",
                expected: values.ncols(),
                found: terms.len(),
            });
        }
        if terms.iter().collect::<BTreeSet<_>>().len() != terms.len() {
            return Err(Error::InvalidParameter("duplicate library terms".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                signal: "library",
                index,
            });
        }
        Ok(LibraryMatrix { values, terms })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn terms(&self) -> &[TermDescriptor] {
        &self.terms
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_of(&self, term: &TermDescriptor) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }
}

/// Evaluates `terms` on the samples of `ts`. `aux` supplies `y` when any
/// term needs it.
pub fn build_library_from_terms(
    terms: Vec<TermDescriptor>,
    ts: &TimeSeries,
    ds: &DerivedSeries,
    aux: Option<&[f64]>,
) -> Result<LibraryMatrix> {
    ds.check_parent(ts)?;
    if let Some(y) = aux {
        if y.len() != ts.len() {
            return Err(Error::LengthMismatch {
                what: "aux",
                expected: ts.len(),
                found: y.len(),
            });
        }
    } else if terms.iter().any(|t| t.uses_aux()) {
        return Err(Error::MissingAux);
    }
    let n = ts.len();
    let (u, w, du) = (ts.u(), ts.w(), ds.du());
    let values = DMatrix::from_fn(n, terms.len(), |i, j| {
        let s = Sample {
            u: u[i],
            du: du[i],
            w: w[i],
            y: aux.map_or(0.0, |y| y[i]),
        };
        terms[j].evaluate(&s)
    });
    LibraryMatrix::new(values, terms)
}

pub fn build_library(
    spec: &LibrarySpec,
    ts: &TimeSeries,
    ds: &DerivedSeries,
    aux: Option<&[f64]>,
) -> Result<LibraryMatrix> {
    if spec.include_aux && aux.is_none() {
        return Err(Error::MissingAux);
    }
    let aux = if spec.include_aux { aux } else { None };
    build_library_from_terms(enumerate_terms(spec)?, ts, ds, aux)
}
