//! End-to-end pipelines: fit a record, the two-stage butterfly fit, and the
//! baseline comparison sweeps.

use std::time::Instant;

use crate::diff::differentiate_series;
use crate::error::{Error, Result};
use crate::features::{build_library, build_library_from_terms, bouc_wen_terms, LibrarySpec};
use crate::generators::{
    add_gaussian_noise, simulate_bouc_wen, simulate_duhem, BoucWenParams, DuhemParams, HarmonicExcitation,
};
use crate::model::{FitReport, ModelTarget, SparseModel};
use crate::regress::{self, stlsq, StlsqConfig};
use crate::series::{DerivedSeries, TimeSeries};
use crate::simulate::{integrate_model, metrics, relative_percent_error, AuxModel, Prediction};
use crate::term::TermDescriptor;

/// Threshold used for simulated records.
pub const SIMULATED_THRESHOLD: f64 = 0.1;
/// Threshold used for the measured actuator record.
pub const MEASURED_THRESHOLD: f64 = 0.01;
/// Rows of the actuator record used for fitting.
pub const ACTUATOR_POINTS: usize = 15_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub library: LibrarySpec,
    pub stlsq: StlsqConfig,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            library: LibrarySpec::default(),
            stlsq: StlsqConfig::with_threshold(SIMULATED_THRESHOLD),
        }
    }
}

impl FitOptions {
    pub fn with_threshold(threshold: f64) -> Self {
        FitOptions {
            stlsq: StlsqConfig::with_threshold(threshold),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub report: FitReport,
    pub derived: DerivedSeries,
    pub prediction: Prediction,
}

/// Differentiate, build the library, run STLSQ, integrate the discovered
/// model from the first measured sample and score it against the record.
pub fn fit_series(ts: &TimeSeries, opts: &FitOptions) -> Result<FitOutcome> {
    fit_series_as(ts, opts, ModelTarget::Output)
}

fn fit_series_as(ts: &TimeSeries, opts: &FitOptions, target: ModelTarget) -> Result<FitOutcome> {
    if opts.library.include_aux {
        return Err(Error::MissingAux);
    }
    let derived = differentiate_series(ts)?;
    let library = build_library(&opts.library, ts, &derived, None)?;
    let start = Instant::now();
    let model = stlsq(&library, derived.dw(), &opts.stlsq, target)?;
    let fit_seconds = start.elapsed().as_secs_f64();
    evaluate(model, ts, derived, None, fit_seconds)
}

/// Integrates `model` over `ts` and bundles the metrics.
pub fn evaluate(
    model: SparseModel,
    ts: &TimeSeries,
    derived: DerivedSeries,
    aux: Option<AuxModel<'_>>,
    fit_seconds: f64,
) -> Result<FitOutcome> {
    let start = Instant::now();
    let prediction = integrate_model(&model, ts, &derived, ts.w()[0], aux)?;
    let simulate_seconds = start.elapsed().as_secs_f64();
    let metrics = metrics(ts.w(), &prediction.w_pred)?;
    Ok(FitOutcome {
        report: FitReport {
            model,
            metrics,
            fit_seconds,
            simulate_seconds,
        },
        derived,
        prediction,
    })
}

/// Result of the two-stage butterfly fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyOutcome {
    /// `dy/dt` model of the single inner loop.
    pub inner: FitOutcome,
    /// `dw/dt` model over the `y`-augmented library, scored with `y`
    /// integrated alongside `w`.
    pub outer: FitOutcome,
}

impl ButterflyOutcome {
    /// `outer / inner` coefficient ratios for the matched term pairs:
    /// `(|u̇|u·y, |u̇|u)`, `(|u̇|w, |u̇|y)`, `(u̇·y, u̇)`.
    pub fn coefficient_ratios(&self) -> [f64; 3] {
        butterfly_term_pairs().map(|(outer, inner)| {
            self.outer.report.model.coefficient_of(&outer) / self.inner.report.model.coefficient_of(&inner)
        })
    }
}

/// Outer-stage terms paired with the inner-stage terms they double.
///
/// With `w = y²`, `ẇ = 2yẏ`, so an inner term `θ` maps to `2·θ·y`; for the
/// `|u̇|y` term that product is `|u̇|y² = |u̇|w`.
pub fn butterfly_term_pairs() -> [(TermDescriptor, TermDescriptor); 3] {
    use crate::term::DerivFactor::{Absolute, Signed};
    [
        (TermDescriptor::new(Absolute, 1, 0, 0, 1), TermDescriptor::new(Absolute, 1, 0, 0, 0)),
        (TermDescriptor::new(Absolute, 0, 1, 0, 0), TermDescriptor::new(Absolute, 0, 1, 0, 0)),
        (TermDescriptor::new(Signed, 0, 0, 0, 1), TermDescriptor::new(Signed, 0, 0, 0, 0)),
    ]
}

/// Stage 1 fits `ẏ` on `(u, y)` with `inner`; stage 2 fits `ẇ` on the
/// butterfly library with the measured `y` as auxiliary signal. The outer
/// model is then integrated jointly with the inner one.
pub fn fit_butterfly(
    series: &TimeSeries,
    y: &[f64],
    inner: &FitOptions,
    outer: &FitOptions,
) -> Result<ButterflyOutcome> {
    if y.len() != series.len() {
        return Err(Error::LengthMismatch {
            what: "aux",
            expected: series.len(),
            found: y.len(),
        });
    }
    let aux_series = series.with_output(y.to_vec())?;
    let inner_fit = fit_series_as(&aux_series, inner, ModelTarget::Aux)?;

    let derived = differentiate_series(series)?;
    let library = build_library(&outer.library, series, &derived, Some(y))?;
    let start = Instant::now();
    let model = stlsq(&library, derived.dw(), &outer.stlsq, ModelTarget::Output)?;
    let fit_seconds = start.elapsed().as_secs_f64();
    let aux = AuxModel {
        model: &inner_fit.report.model,
        y0: y[0],
    };
    let outer_fit = evaluate(model, series, derived, Some(aux), fit_seconds)?;
    Ok(ButterflyOutcome {
        inner: inner_fit,
        outer: outer_fit,
    })
}

/// Default options of the butterfly stages.
pub fn butterfly_options() -> (FitOptions, FitOptions) {
    (
        FitOptions::default(),
        FitOptions {
            library: LibrarySpec::butterfly_aux(),
            ..Default::default()
        },
    )
}

// ---------------------------------------------------------------------------
// Baseline comparison

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Stlsq,
    Ols,
    Ridge,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Stlsq => "stlsq",
            Method::Ols => "ols",
            Method::Ridge => "ridge",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "stlsq" => Ok(Method::Stlsq),
            "ols" => Ok(Method::Ols),
            "ridge" => Ok(Method::Ridge),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Generating system of a comparison study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Study {
    /// Training-size sweep on Bouc-Wen (1, 0.5, 2, n = 1) records.
    DataSize,
    /// Noise sweep on Bouc-Wen (0.4, 0.5, 0.25, n = 1) records.
    Noise,
    /// Duhem (0.4, 0.5, 0.25) records; baselines only see Bouc-Wen terms.
    Mismatched,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::DataSize => "size",
            Study::Noise => "noise",
            Study::Mismatched => "mismatch",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "size" => Ok(Study::DataSize),
            "noise" => Ok(Study::Noise),
            "mismatch" => Ok(Study::Mismatched),
            other => Err(Error::InvalidParameter(format!("unknown study `{other}`"))),
        }
    }

    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            Study::DataSize => vec![1000, 5000, 10000],
            _ => vec![10000],
        }
    }

    pub fn default_noise(self) -> Vec<f64> {
        match self {
            Study::Noise => vec![1.0, 5.0],
            _ => vec![0.0],
        }
    }

    /// Record layout used by the study unless overridden.
    ///
    /// Size records span two periods, which keeps the second-order stencil
    /// bias below the size-study targets. Noise records span fifty periods
    /// of a slowly decaying input so the loops nest instead of retracing
    /// one closed curve.
    pub fn record_setup(self) -> RecordSetup {
        match self {
            Study::DataSize => RecordSetup {
                excitation: HarmonicExcitation::default(),
                periods: 2.0,
            },
            Study::Noise => RecordSetup {
                excitation: HarmonicExcitation {
                    decay: 0.06,
                    ..HarmonicExcitation::default()
                },
                periods: 50.0,
            },
            Study::Mismatched => RecordSetup::default(),
        }
    }

    /// Terms of the generating system.
    pub fn true_support(self) -> Vec<TermDescriptor> {
        match self {
            Study::DataSize | Study::Noise => bouc_wen_terms(),
            Study::Mismatched => duhem_terms(),
        }
    }

    /// Clean record of `n_points` samples.
    pub fn generate(self, setup: &RecordSetup, n_points: usize) -> Result<TimeSeries> {
        let dt = setup.dt(n_points);
        match self {
            Study::DataSize => simulate_bouc_wen(&BoucWenParams::DATA_SIZE_STUDY, &setup.excitation, n_points, dt, 0.0),
            Study::Noise => simulate_bouc_wen(&BoucWenParams::NOISE_STUDY, &setup.excitation, n_points, dt, 0.0),
            Study::Mismatched => simulate_duhem(&DuhemParams::REFERENCE, &setup.excitation, n_points, dt, 0.0),
        }
    }
}

/// `|u̇|u`, `|u̇|w`, `u̇`
pub fn duhem_terms() -> Vec<TermDescriptor> {
    use crate::term::DerivFactor::{Absolute, Signed};
    vec![
        TermDescriptor::new(Absolute, 1, 0, 0, 0),
        TermDescriptor::new(Absolute, 0, 1, 0, 0),
        TermDescriptor::new(Signed, 0, 0, 0, 0),
    ]
}

/// Excitation and sampling of generated records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordSetup {
    pub excitation: HarmonicExcitation,
    /// Excitation periods covered by each record, whatever its length.
    pub periods: f64,
}

impl RecordSetup {
    pub fn dt(&self, n_points: usize) -> f64 {
        self.periods / (self.excitation.frequency * (n_points.max(2) - 1) as f64)
    }
}

impl Default for RecordSetup {
    fn default() -> Self {
        RecordSetup {
            excitation: HarmonicExcitation::default(),
            periods: crate::generators::DEFAULT_PERIODS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub study: Study,
    pub sizes: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: usize,
    pub base_seed: u64,
    pub threshold: f64,
    pub ridge_penalty: f64,
    pub setup: RecordSetup,
}

impl BenchConfig {
    pub fn new(study: Study) -> Self {
        BenchConfig {
            study,
            sizes: study.default_sizes(),
            noise_levels: study.default_noise(),
            methods: vec![Method::Stlsq, Method::Ols, Method::Ridge],
            seeds: 5,
            base_seed: 0,
            threshold: SIMULATED_THRESHOLD,
            ridge_penalty: DEFAULT_RIDGE_PENALTY,
            setup: study.record_setup(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("at least one method is required".into()));
        }
        if self.sizes.is_empty() || self.noise_levels.is_empty() {
            return Err(Error::InvalidParameter("empty sweep".into()));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidParameter("at least one seed is required".into()));
        }
        Ok(())
    }
}

/// Penalty of the ridge baseline.
pub const DEFAULT_RIDGE_PENALTY: f64 = 1.0;

/// One fitted cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub size: usize,
    pub noise: f64,
    pub threshold: f64,
    pub seed: u64,
    /// Relative percent error against the clean record; infinite when the
    /// fitted model blows up.
    pub r_percent: f64,
    pub fit_seconds: f64,
    /// Whether the fitted support equals the generating support.
    pub support_recovered: bool,
}

/// Baseline feature set: an intercept plus the Bouc-Wen terms.
pub fn baseline_terms() -> Vec<TermDescriptor> {
    let mut terms = vec![TermDescriptor::CONSTANT];
    terms.extend(bouc_wen_terms());
    terms
}

fn fit_method(method: Method, cfg: &BenchConfig, noisy: &TimeSeries) -> Result<(SparseModel, DerivedSeries, f64)> {
    let derived = differentiate_series(noisy)?;
    let (model, seconds) = match method {
        Method::Stlsq => {
            let lib = build_library(&LibrarySpec::default(), noisy, &derived, None)?;
            let start = Instant::now();
            let m = stlsq(&lib, derived.dw(), &StlsqConfig::with_threshold(cfg.threshold), ModelTarget::Output)?;
            (m, start.elapsed().as_secs_f64())
        }
        Method::Ols | Method::Ridge => {
            let lib = build_library_from_terms(baseline_terms(), noisy, &derived, None)?;
            let start = Instant::now();
            let coef = match method {
                Method::Ols => regress::ols(lib.values(), derived.dw())?,
                _ => regress::ridge(lib.values(), derived.dw(), cfg.ridge_penalty)?,
            };
            let seconds = start.elapsed().as_secs_f64();
            (SparseModel::new(coef, lib.terms().to_vec(), 0.0, ModelTarget::Output)?, seconds)
        }
    };
    Ok((model, derived, seconds))
}

/// Runs one sweep cell: generate, corrupt, fit, integrate, score against
/// the clean record.
pub fn run_cell(cfg: &BenchConfig, method: Method, size: usize, noise: f64, seed: u64) -> Result<BenchRow> {
    let clean = cfg.study.generate(&cfg.setup, size)?;
    let noisy = add_gaussian_noise(&clean, noise, seed)?;
    let (model, derived, fit_seconds) = fit_method(method, cfg, &noisy)?;
    let r_percent = match integrate_model(&model, &noisy, &derived, noisy.w()[0], None) {
        Ok(prediction) => relative_percent_error(clean.w(), &prediction.w_pred)?,
        Err(Error::DivergedSimulation { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let mut support = model.support_terms();
    support.sort();
    let mut truth = cfg.study.true_support();
    truth.sort();
    Ok(BenchRow {
        method,
        size,
        noise,
        threshold: if method == Method::Stlsq { cfg.threshold } else { 0.0 },
        seed,
        r_percent,
        fit_seconds,
        support_recovered: support == truth,
    })
}

/// Every `(method, size, noise, seed)` cell. Seeds run from `base_seed`
/// upwards, shared across methods so each method sees the same records.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &size in &cfg.sizes {
        for &noise in &cfg.noise_levels {
            for &method in &cfg.methods {
                for k in 0..cfg.seeds {
                    rows.push(run_cell(cfg, method, size, noise, cfg.base_seed + k as u64)?);
                }
            }
        }
    }
    Ok(rows)
}

/// Seed-averaged cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub method: Method,
    pub size: usize,
    pub noise: f64,
    pub threshold: f64,
    pub r_percent: f64,
    pub fit_seconds: f64,
    /// Fraction of seeds whose support matched the generating system.
    pub recovery_rate: f64,
}

/// Averages rows over seeds, keeping first-appearance order.
pub fn summarize(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut out: Vec<(BenchSummary, usize)> = Vec::new();
    for r in rows {
        match out
            .iter_mut()
            .find(|(s, _)| s.method == r.method && s.size == r.size && s.noise == r.noise)
        {
            Some((s, count)) => {
                s.r_percent += r.r_percent;
                s.fit_seconds += r.fit_seconds;
                s.recovery_rate += f64::from(u8::from(r.support_recovered));
                *count += 1;
            }
            None => out.push((
                BenchSummary {
                    method: r.method,
                    size: r.size,
                    noise: r.noise,
                    threshold: r.threshold,
                    r_percent: r.r_percent,
                    fit_seconds: r.fit_seconds,
                    recovery_rate: f64::from(u8::from(r.support_recovered)),
                },
                1,
            )),
        }
    }
    out.into_iter()
        .map(|(mut s, n)| {
            let n = n as f64;
            s.r_percent /= n;
            s.fit_seconds /= n;
            s.recovery_rate /= n;
            s
        })
        .collect()
}

/// `method,size,noise,threshold,R_percent,fit_seconds`, one row per cell.
pub fn format_bench_csv(summary: &[BenchSummary]) -> String {
    let mut out = String::from("method,size,noise,threshold,R_percent,fit_seconds\n");
    for s in summary {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.method.name(),
            s.size,
            s.noise,
            s.threshold,
            s.r_percent,
            s.fit_seconds
        ));
    }
    out
}
