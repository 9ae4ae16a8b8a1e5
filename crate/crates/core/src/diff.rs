//! Second-order finite differences on a uniform grid.

use crate::error::{Error, Result};
use crate::series::{DerivedSeries, TimeSeries, MIN_SAMPLES};

/// Central differences inside, second-order one-sided stencils at both ends.
pub fn central_difference(values: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooShort {
            len: n,
            min: MIN_SAMPLES,
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let inv = 1.0 / (2.0 * dt);
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv);
    out.extend(values.windows(3).map(|w| (w[2] - w[0]) * inv));
    out.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv);
    Ok(out)
}

pub fn differentiate_series(ts: &TimeSeries) -> Result<DerivedSeries> {
    let dt = ts.dt();
    DerivedSeries::new(central_difference(ts.u(), dt)?, central_difference(ts.w(), dt)?)
}
