//! Forward simulation of discovered models and trajectory metrics.

use crate::error::{Error, Result};
use crate::generators::HarmonicExcitation;
use crate::model::{Metrics, ModelTarget, SparseModel};
use crate::ode;
use crate::series::{DerivedSeries, TimeSeries};
use crate::term::{Sample, TermDescriptor};

/// Exogenous input `(u, u̇)` available at any time inside the record.
pub trait InputSignal {
    fn at(&self, t: f64) -> (f64, f64);
}

impl InputSignal for HarmonicExcitation {
    fn at(&self, t: f64) -> (f64, f64) {
        self.eval(t)
    }
}

/// Sampled input, linearly interpolated between grid points.
#[derive(Debug, Clone, Copy)]
pub struct SampledInput<'a> {
    t0: f64,
    dt: f64,
    u: &'a [f64],
    du: &'a [f64],
}

impl<'a> SampledInput<'a> {
    pub fn new(ts: &'a TimeSeries, ds: &'a DerivedSeries) -> Result<Self> {
        ds.check_parent(ts)?;
        Ok(SampledInput {
            t0: ts.t()[0],
            dt: ts.dt(),
            u: ts.u(),
            du: ds.du(),
        })
    }
}

impl InputSignal for SampledInput<'_> {
    fn at(&self, t: f64) -> (f64, f64) {
        let x = ((t - self.t0) / self.dt).max(0.0);
        let last = self.u.len() - 1;
        let i = (x.floor() as usize).min(last - 1);
        let frac = (x - i as f64).min(1.0);
        let lerp = |v: &[f64]| v[i] + frac * (v[i + 1] - v[i]);
        (lerp(self.u), lerp(self.du))
    }
}

/// Model output along a record.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub w_pred: Vec<f64>,
    /// `|w − w_pred|`
    pub abs_err: Vec<f64>,
    /// Auxiliary state of a coupled two-stage model.
    pub y_pred: Option<Vec<f64>>,
}

/// Auxiliary model driving the `y` factor of the main model.
#[derive(Debug, Clone, Copy)]
pub struct AuxModel<'a> {
    pub model: &'a SparseModel,
    pub y0: f64,
}

fn active_terms(model: &SparseModel) -> Vec<(TermDescriptor, f64)> {
    model.nonzero_terms()
}

fn rate(terms: &[(TermDescriptor, f64)], s: &Sample) -> f64 {
    terms.iter().map(|(t, c)| c * t.evaluate(s)).sum()
}

/// Integrated states: `w`, and `y` when an auxiliary model is coupled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub w: Vec<f64>,
    pub y: Option<Vec<f64>>,
}

/// RK4 on the grid `t0 + i·dt`, `i < n_points`, with `input` queried at
/// every stage.
pub fn integrate_with<I: InputSignal>(
    model: &SparseModel,
    input: &I,
    t0: f64,
    dt: f64,
    n_points: usize,
    w0: f64,
    aux: Option<AuxModel<'_>>,
) -> Result<Trajectory> {
    let main = active_terms(model);
    let needs_aux = main.iter().any(|(t, _)| t.uses_aux());
    let diverged = |step: usize| Error::DivergedSimulation {
        step,
        time: t0 + step as f64 * dt,
    };
    match (needs_aux, aux) {
        (true, None) => Err(Error::MissingAuxModel),
        (true, Some(aux)) => {
            let inner = active_terms(aux.model);
            if inner.iter().any(|(t, _)| t.uses_aux()) {
                return Err(Error::InvalidParameter(
                    "auxiliary model may not depend on y".into(),
                ));
            }
            let traj = ode::integrate(
                |t, s: &[f64; 2]| {
                    let (u, du) = input.at(t);
                    let outer = Sample { u, du, w: s[0], y: s[1] };
                    // the inner model's state slot is y
                    let inner_sample = Sample { u, du, w: s[1], y: 0.0 };
                    [rate(&main, &outer), rate(&inner, &inner_sample)]
                },
                t0,
                dt,
                n_points,
                [w0, aux.y0],
            )
            .map_err(diverged)?;
            let (w, y) = traj.into_iter().map(|s| (s[0], s[1])).unzip();
            Ok(Trajectory { w, y: Some(y) })
        }
        (false, _) => {
            let traj = ode::integrate(
                |t, s: &[f64; 1]| {
                    let (u, du) = input.at(t);
                    [rate(&main, &Sample { u, du, w: s[0], y: 0.0 })]
                },
                t0,
                dt,
                n_points,
                [w0],
            )
            .map_err(diverged)?;
            Ok(Trajectory {
                w: traj.into_iter().map(|s| s[0]).collect(),
                y: None,
            })
        }
    }
}

/// Predicts the output of `ts` from its measured input. For an auxiliary
/// model (`dy/dt`) the reference is still `ts.w()`, which then holds `y`.
pub fn integrate_model(
    model: &SparseModel,
    ts: &TimeSeries,
    ds: &DerivedSeries,
    w0: f64,
    aux: Option<AuxModel<'_>>,
) -> Result<Prediction> {
    if model.target == ModelTarget::Aux && model.uses_aux() {
        return Err(Error::InvalidParameter("auxiliary model may not depend on y".into()));
    }
    let input = SampledInput::new(ts, ds)?;
    let traj = integrate_with(model, &input, ts.t()[0], ts.dt(), ts.len(), w0, aux)?;
    let abs_err = ts.w().iter().zip(&traj.w).map(|(w, p)| (w - p).abs()).collect();
    Ok(Prediction {
        w_pred: traj.w,
        abs_err,
        y_pred: traj.y,
    })
}

fn check_lengths(w: &[f64], w_pred: &[f64]) -> Result<()> {
    if w.len() != w_pred.len() {
        return Err(Error::LengthMismatch {
            what: "prediction",
            expected: w.len(),
            found: w_pred.len(),
        });
    }
    Ok(())
}

/// `100 · ‖w_pred − w‖₂ / ‖w‖₂`
pub fn relative_percent_error(w: &[f64], w_pred: &[f64]) -> Result<f64> {
    check_lengths(w, w_pred)?;
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    let diff = w
        .iter()
        .zip(w_pred)
        .map(|(a, b)| (b - a).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(diff / norm * 100.0)
}

/// Root-mean-square error divided by the range of `w`.
pub fn nrmse(w: &[f64], w_pred: &[f64]) -> Result<f64> {
    check_lengths(w, w_pred)?;
    let (min, max) = w
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if !(max > min) {
        return Err(Error::ConstantReference);
    }
    let mse = w.iter().zip(w_pred).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / w.len() as f64;
    Ok(mse.sqrt() / (max - min))
}

/// Coefficient of determination.
pub fn r2_score(w: &[f64], w_pred: &[f64]) -> Result<f64> {
    check_lengths(w, w_pred)?;
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let total: f64 = w.iter().map(|v| (v - mean).powi(2)).sum();
    if total == 0.0 {
        return Err(Error::ConstantReference);
    }
    let residual: f64 = w.iter().zip(w_pred).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - residual / total)
}

/// All three metrics at once.
pub fn metrics(w: &[f64], w_pred: &[f64]) -> Result<Metrics> {
    Ok(Metrics {
        r_percent: relative_percent_error(w, w_pred)?,
        nrmse: nrmse(w, w_pred)?,
        r2: r2_score(w, w_pred)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::DerivFactor;

    #[test]
    fn metric_identities() {
        let w = [1.0, 2.0, 3.0];
        assert_eq!(relative_percent_error(&w, &w).unwrap(), 0.0);
        assert_eq!(nrmse(&w, &w).unwrap(), 0.0);
        assert_eq!(r2_score(&w, &w).unwrap(), 1.0);
        let doubled = [2.0, 4.0, 6.0];
        assert!((relative_percent_error(&w, &doubled).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(r2_score(&w, &[2.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn nrmse_hand_case() {
        assert!((nrmse(&[0.0, 2.0], &[1.0, 1.0]).unwrap() - 0.5).abs() < 1e-15);
        let w = [0.0, 1.0, 4.0];
        let shifted: Vec<f64> = w.iter().map(|v| v + 0.3).collect();
        assert!((nrmse(&w, &shifted).unwrap() - 0.3 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn metric_errors() {
        assert!(matches!(relative_percent_error(&[0.0; 3], &[1.0; 3]), Err(Error::ZeroReference)));
        assert!(matches!(nrmse(&[1.0; 3], &[1.0; 3]), Err(Error::ConstantReference)));
        assert!(matches!(r2_score(&[1.0; 3], &[1.0; 3]), Err(Error::ConstantReference)));
        assert!(matches!(nrmse(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn sampled_input_interpolates_and_clamps() {
        let ts = TimeSeries::uniform(1.0, 0.5, vec![0.0, 1.0, 4.0, 9.0], vec![0.0; 4]).unwrap();
        let ds = DerivedSeries::new(vec![0.0, 2.0, 4.0, 6.0], vec![0.0; 4]).unwrap();
        let input = SampledInput::new(&ts, &ds).unwrap();
        assert_eq!(input.at(1.25), (0.5, 1.0));
        assert_eq!(input.at(2.5), (9.0, 6.0));
        assert_eq!(input.at(2.25), (6.5, 5.0));
    }

    #[test]
    fn zero_model_holds_initial_value() {
        let ts = TimeSeries::uniform(0.0, 0.1, vec![0.0, 1.0, 0.0, -1.0, 0.0], vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        let ds = crate::diff::differentiate_series(&ts).unwrap();
        let model = SparseModel::zero(vec![TermDescriptor::new(DerivFactor::Signed, 0, 0, 0, 0)], ModelTarget::Output);
        let p = integrate_model(&model, &ts, &ds, 0.25, None).unwrap();
        assert!(p.w_pred.iter().all(|v| *v == 0.25));
        assert_eq!(p.abs_err[2], 1.75);
    }

    #[test]
    fn y_terms_need_aux_model() {
        let ts = TimeSeries::uniform(0.0, 0.1, vec![0.0; 5], vec![1.0; 5]).unwrap();
        let ds = crate::diff::differentiate_series(&ts).unwrap();
        let model = SparseModel::new(
            vec![1.0],
            vec![TermDescriptor::new(DerivFactor::Signed, 0, 0, 0, 1)],
            0.1,
            ModelTarget::Output,
        )
        .unwrap();
        assert!(matches!(integrate_model(&model, &ts, &ds, 0.0, None), Err(Error::MissingAuxModel)));
    }
}
