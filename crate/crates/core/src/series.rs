//! Uniformly sampled input/output records.

use crate::error::{Error, Result};

/// Minimum number of samples; second-order boundary stencils need three
/// points plus one interior point.
pub const MIN_SAMPLES: usize = 4;

/// Relative tolerance on the sample spacing.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Excitation `u`, response `w` and their common time stamps `t`.
///
/// Construction goes through [`validate_series`], so every value of this type
/// is long enough, finite and sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    u: Vec<f64>,
    w: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, u: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        validate_series(TimeSeries { t, u, w })
    }

    /// Builds a series on the grid `t_i = t0 + i * dt`.
    pub fn uniform(t0: f64, dt: f64, u: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let t = (0..u.len()).map(|i| t0 + i as f64 * dt).collect();
        Self::new(t, u, w)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    /// Same time stamps and input, different output.
    pub fn with_output(&self, w: Vec<f64>) -> Result<Self> {
        Self::new(self.t.clone(), self.u.clone(), w)
    }

    /// Keeps the first `n` samples.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let n = n.min(self.len());
        Self::new(
            self.t[..n].to_vec(),
            self.u[..n].to_vec(),
            self.w[..n].to_vec(),
        )
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (self.t, self.u, self.w)
    }
}

/// Checks every [`TimeSeries`] invariant and hands the series back unchanged.
pub fn validate_series(ts: TimeSeries) -> Result<TimeSeries> {
    let n = ts.t.len();
    for (what, len) in [("u", ts.u.len()), ("w", ts.w.len())] {
        if len != n {
            return Err(Error::LengthMismatch {
                what,
                expected: n,
                found: len,
            });
        }
    }
    if n < MIN_SAMPLES {
        return Err(Error::TooShort {
            len: n,
            min: MIN_SAMPLES,
        });
    }
    for (signal, values) in [("t", &ts.t), ("u", &ts.u), ("w", &ts.w)] {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { signal, index });
        }
    }

    let dt = ts.t[1] - ts.t[0];
    if !(dt > 0.0) {
        return Err(Error::NonUniformGrid {
            index: 1,
            spacing: dt,
            expected: dt,
        });
    }
    for i in 1..n {
        let spacing = ts.t[i] - ts.t[i - 1];
        // slack for the rounding of large time stamps
        let slack = GRID_TOLERANCE * dt + 4.0 * f64::EPSILON * ts.t[i].abs();
        if (spacing - dt).abs() > slack {
            return Err(Error::NonUniformGrid {
                index: i,
                spacing,
                expected: dt,
            });
        }
    }
    Ok(ts)
}

/// Time derivatives of the input and output of a [`TimeSeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSeries {
    du: Vec<f64>,
    dw: Vec<f64>,
}

impl DerivedSeries {
    pub fn new(du: Vec<f64>, dw: Vec<f64>) -> Result<Self> {
        if du.len() != dw.len() {
            return Err(Error::LengthMismatch {
                what: "dw",
                expected: du.len(),
                found: dw.len(),
            });
        }
        for (signal, values) in [("du", &du), ("dw", &dw)] {
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { signal, index });
            }
        }
        Ok(DerivedSeries { du, dw })
    }

    pub fn du(&self) -> &[f64] {
        &self.du
    }

    pub fn dw(&self) -> &[f64] {
        &self.dw
    }

    pub fn len(&self) -> usize {
        self.du.len()
    }

    pub fn is_empty(&self) -> bool {
        self.du.is_empty()
    }

    pub(crate) fn check_parent(&self, ts: &TimeSeries) -> Result<()> {
        if self.len() != ts.len() {
            return Err(Error::LengthMismatch {
                what: "derived series",
                expected: ts.len(),
                found: self.len(),
            });
        }
        Ok(())
    }
}
