//! Synthetic hysteresis data: Duhem, Bouc-Wen and butterfly models driven by
//! a harmonic excitation, integrated with fixed-step RK4.
//!
//! The input and its derivative are evaluated analytically at every RK4
//! stage, including the half steps.
//!
//! The butterfly generator integrates an inner loop of Duhem form
//! `ẏ = α|u̇|u − β|u̇|y + γu̇` and reports `w = y² + c`. The source material
//! calls this inner loop a Bouc-Wen model, but its algebraic form is Duhem's.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ode;
use crate::series::{TimeSeries, MIN_SAMPLES};

/// Default number of excitation periods covered by a generated record.
pub const DEFAULT_PERIODS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuhemParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DuhemParams {
    /// Single-loop Duhem experiment: α = 0.4, β = 0.5, γ = 0.25.
    pub const REFERENCE: DuhemParams = DuhemParams {
        alpha: 0.4,
        beta: 0.5,
        gamma: 0.25,
    };

    /// Inner loop of the butterfly experiment: α = 3.2, β = 1.7, γ = 0.4.
    pub const BUTTERFLY_INNER: DuhemParams = DuhemParams {
        alpha: 3.2,
        beta: 1.7,
        gamma: 0.4,
    };

    pub fn validate(&self) -> Result<()> {
        if [self.alpha, self.beta, self.gamma].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("Duhem parameters must be finite".into()))
        }
    }

    /// `ẇ = α|u̇|u − β|u̇|w + γu̇`
    pub fn rate(&self, u: f64, du: f64, w: f64) -> f64 {
        self.alpha * du.abs() * u - self.beta * du.abs() * w + self.gamma * du
    }
}

impl Default for DuhemParams {
    fn default() -> Self {
        Self::REFERENCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoucWenParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: u32,
}

impl BoucWenParams {
    /// Bouc-Wen recovery experiment: α = 5, β = 0.25, γ = 0.5, n = 1.
    pub const REFERENCE: BoucWenParams = BoucWenParams {
        alpha: 5.0,
        beta: 0.25,
        gamma: 0.5,
        n: 1,
    };

    /// Training-size comparison: α = 1, β = 0.5, γ = 2, n = 1.
    pub const DATA_SIZE_STUDY: BoucWenParams = BoucWenParams {
        alpha: 1.0,
        beta: 0.5,
        gamma: 2.0,
        n: 1,
    };

    /// Noise comparison: α = 0.4, β = 0.5, γ = 0.25, n = 1.
    pub const NOISE_STUDY: BoucWenParams = BoucWenParams {
        alpha: 0.4,
        beta: 0.5,
        gamma: 0.25,
        n: 1,
    };

    pub fn validate(&self) -> Result<()> {
        if ![self.alpha, self.beta, self.gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("Bouc-Wen parameters must be finite".into()));
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter("Bouc-Wen exponent n must be >= 1".into()));
        }
        Ok(())
    }

    /// `ẇ = αu̇ − β|u̇||w|^(n−1)w − γu̇|w|^n`
    pub fn rate(&self, du: f64, w: f64) -> f64 {
        let abs_w = w.abs();
        // |w|^0 · w = w, also at w = 0
        let shaped = if self.n == 1 {
            w
        } else {
            abs_w.powi(self.n as i32 - 1) * w
        };
        self.alpha * du - self.beta * du.abs() * shaped - self.gamma * du * abs_w.powi(self.n as i32)
    }
}

impl Default for BoucWenParams {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// `u(t) = A · exp(−decay·t) · sin(2πf·t + φ)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicExcitation {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    pub decay: f64,
}

impl Default for HarmonicExcitation {
    fn default() -> Self {
        HarmonicExcitation {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
            decay: 0.0,
        }
    }
}

impl HarmonicExcitation {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::InvalidExcitation(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !(self.frequency > 0.0) || !self.frequency.is_finite() {
            return Err(Error::InvalidExcitation(format!(
                "frequency must be positive, got {}",
                self.frequency
            )));
        }
        if !(self.decay >= 0.0) || !self.decay.is_finite() || !self.phase.is_finite() {
            return Err(Error::InvalidExcitation(
                "decay must be non-negative and phase finite".into(),
            ));
        }
        Ok(())
    }

    /// `(u(t), u̇(t))`, both analytic.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let omega = 2.0 * PI * self.frequency;
        let envelope = self.amplitude * (-self.decay * t).exp();
        let (s, c) = (omega * t + self.phase).sin_cos();
        (envelope * s, envelope * (omega * c - self.decay * s))
    }

    /// Step that spreads `n_points` samples over [`DEFAULT_PERIODS`] periods.
    pub fn default_dt(&self, n_points: usize) -> f64 {
        DEFAULT_PERIODS / (self.frequency * (n_points.max(2) - 1) as f64)
    }
}

fn check_grid(n_points: usize, dt: f64) -> Result<()> {
    if n_points < MIN_SAMPLES {
        return Err(Error::TooShort {
            len: n_points,
            min: MIN_SAMPLES,
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    Ok(())
}

/// Samples `u` and `u̇` on `t_i = i·dt`.
pub fn excitation_signal(
    exc: &HarmonicExcitation,
    n_points: usize,
    dt: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    exc.validate()?;
    check_grid(n_points, dt)?;
    Ok((0..n_points).map(|i| exc.eval(i as f64 * dt)).unzip())
}

/// Integrates `ẇ = rate(u, u̇, w)` under `exc` and packages the result.
fn simulate_scalar<F>(
    rate: F,
    exc: &HarmonicExcitation,
    n_points: usize,
    dt: f64,
    w0: f64,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, f64, f64) -> f64,
{
    exc.validate()?;
    check_grid(n_points, dt)?;
    if !w0.is_finite() {
        return Err(Error::InvalidParameter("initial value must be finite".into()));
    }
    let traj = ode::integrate(
        |t, s: &[f64; 1]| {
            let (u, du) = exc.eval(t);
            [rate(u, du, s[0])]
        },
        0.0,
        dt,
        n_points,
        [w0],
    )
    .map_err(|step| Error::DivergedSimulation {
        step,
        time: step as f64 * dt,
    })?;
    let u = (0..n_points).map(|i| exc.eval(i as f64 * dt).0).collect();
    Ok((u, traj.into_iter().map(|s| s[0]).collect()))
}

pub fn simulate_duhem(
    p: &DuhemParams,
    exc: &HarmonicExcitation,
    n_points: usize,
    dt: f64,
    w0: f64,
) -> Result<TimeSeries> {
    p.validate()?;
    let p = *p;
    let (u, w) = simulate_scalar(move |u, du, w| p.rate(u, du, w), exc, n_points, dt, w0)?;
    TimeSeries::uniform(0.0, dt, u, w)
}

pub fn simulate_bouc_wen(
    p: &BoucWenParams,
    exc: &HarmonicExcitation,
    n_points: usize,
    dt: f64,
    w0: f64,
) -> Result<TimeSeries> {
    p.validate()?;
    let p = *p;
    let (u, w) = simulate_scalar(move |_, du, w| p.rate(du, w), exc, n_points, dt, w0)?;
    TimeSeries::uniform(0.0, dt, u, w)
}

/// Butterfly record: `series.w = y² + offset`, with `y` kept for two-stage
/// fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyData {
    pub series: TimeSeries,
    pub y: Vec<f64>,
    pub offset: f64,
}

impl ButterflyData {
    /// The inner loop as its own series `(t, u, y)`.
    pub fn aux_series(&self) -> TimeSeries {
        self.series
            .with_output(self.y.clone())
            .expect("y shares the validated grid")
    }
}

pub fn simulate_butterfly(
    p: &DuhemParams,
    exc: &HarmonicExcitation,
    n_points: usize,
    dt: f64,
    y0: f64,
    offset: f64,
) -> Result<ButterflyData> {
    p.validate()?;
    if !offset.is_finite() {
        return Err(Error::InvalidParameter("offset must be finite".into()));
    }
    let p = *p;
    let (u, y) = simulate_scalar(move |u, du, y| p.rate(u, du, y), exc, n_points, dt, y0)?;
    let w = y.iter().map(|v| v * v + offset).collect();
    Ok(ButterflyData {
        series: TimeSeries::uniform(0.0, dt, u, w)?,
        y,
        offset,
    })
}

/// Population standard deviation.
pub(crate) fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Adds `N(0, σ²)` noise to `w` with `σ = percent/100 · std(w)`.
pub fn add_gaussian_noise(ts: &TimeSeries, percent: f64, seed: u64) -> Result<TimeSeries> {
    if !(percent >= 0.0) || !percent.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise percent must be non-negative, got {percent}"
        )));
    }
    if percent == 0.0 {
        return Ok(ts.clone());
    }
    let sigma = percent / 100.0 * std_dev(ts.w());
    if sigma == 0.0 {
        return Ok(ts.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = ts.w().iter().map(|w| w + normal.sample(&mut rng)).collect();
    ts.with_output(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excitation_at_origin() {
        let exc = HarmonicExcitation::default();
        let (u, du) = exc.eval(0.0);
        assert_eq!(u, 0.0);
        assert!((du - 2.0 * PI).abs() < 1e-15);

        let cosine = HarmonicExcitation {
            phase: PI / 2.0,
            ..exc
        };
        let (u, du) = cosine.eval(0.0);
        assert!((u - 1.0).abs() < 1e-15);
        assert!(du.abs() < 1e-14);
    }

    #[test]
    fn invalid_excitation_is_rejected() {
        let bad = HarmonicExcitation {
            amplitude: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            excitation_signal(&bad, 10, 0.1),
            Err(Error::InvalidExcitation(_))
        ));
        let bad = HarmonicExcitation {
            frequency: -1.0,
            ..Default::default()
        };
        assert!(matches!(
            excitation_signal(&bad, 10, 0.1),
            Err(Error::InvalidExcitation(_))
        ));
    }

    #[test]
    fn too_few_points() {
        let r = simulate_duhem(&DuhemParams::REFERENCE, &HarmonicExcitation::default(), 3, 0.1, 0.0);
        assert!(matches!(r, Err(Error::TooShort { len: 3, .. })));
    }

    #[test]
    fn zero_dynamics_keep_initial_value() {
        let p = DuhemParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        };
        let ts = simulate_duhem(&p, &HarmonicExcitation::default(), 100, 0.01, 0.7).unwrap();
        assert!(ts.w().iter().all(|w| *w == 0.7));
    }

    #[test]
    fn bouc_wen_n1_at_zero_state() {
        let p = BoucWenParams::REFERENCE;
        assert_eq!(p.rate(2.0, 0.0), 10.0);
        let p2 = BoucWenParams { n: 2, ..p };
        assert_eq!(p2.rate(1.0, -2.0), 5.0 - 0.25 * 2.0 * -2.0 - 0.5 * 4.0);
    }

    #[test]
    fn bouc_wen_exponent_zero_is_invalid() {
        let p = BoucWenParams { n: 0, ..BoucWenParams::REFERENCE };
        assert!(p.validate().is_err());
    }

    #[test]
    fn divergence_is_detected() {
        // negative β makes the |u̇|w term explode
        let p = DuhemParams {
            alpha: 0.0,
            beta: -200.0,
            gamma: 1.0,
        };
        let r = simulate_duhem(&p, &HarmonicExcitation::default(), 2000, 1e-3, 1.0);
        assert!(matches!(r, Err(Error::DivergedSimulation { .. })));
    }

    #[test]
    fn zero_noise_is_identity() {
        let ts = simulate_duhem(&DuhemParams::REFERENCE, &HarmonicExcitation::default(), 100, 0.03, 0.0).unwrap();
        assert_eq!(add_gaussian_noise(&ts, 0.0, 1).unwrap(), ts);
        assert!(add_gaussian_noise(&ts, -1.0, 1).is_err());
    }
}
