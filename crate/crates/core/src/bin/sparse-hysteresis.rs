use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_hysteresis::experiments::{
    butterfly_options, fit_butterfly, fit_series, run_bench, summarize, format_bench_csv, BenchConfig, FitOptions,
    Method, RecordSetup, Study, ACTUATOR_POINTS, MEASURED_THRESHOLD, SIMULATED_THRESHOLD,
};
use sparse_hysteresis::features::LibrarySpec;
use sparse_hysteresis::generators::{
    add_gaussian_noise, simulate_bouc_wen, simulate_butterfly, simulate_duhem, BoucWenParams, DuhemParams,
    HarmonicExcitation,
};
use sparse_hysteresis::io::{read_csv, read_model, write_model, write_series_csv, CsvSchema, EQUATION_PRECISION};
use sparse_hysteresis::model::render_equation;
use sparse_hysteresis::regress::StlsqConfig;
use sparse_hysteresis::simulate::{integrate_model, metrics, AuxModel};
use sparse_hysteresis::diff::differentiate_series;
use sparse_hysteresis::series::TimeSeries;
use sparse_hysteresis::{Error, Result};

const DEFAULT_POINTS: usize = 10_000;

/// Sparse identification of hysteresis models.
#[derive(Parser, Debug)]
#[command(name = "sparse-hysteresis", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed of the noise generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// STLSQ threshold λ.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Library preset.
    #[arg(long, global = true)]
    library: Option<String>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Sampling step. For CSV input it replaces the time column.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Gaussian noise in percent of std(w).
    #[arg(long, global = true)]
    noise: Option<f64>,
    /// Keep only the first rows of an input CSV.
    #[arg(long, global = true)]
    max_points: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a hysteresis model and write its record.
    Gen(GenArgs),
    /// Discover a sparse model from a CSV record.
    Fit(FitArgs),
    /// Integrate a model file along a CSV record.
    Predict(PredictArgs),
    /// Compare STLSQ with least-squares baselines.
    Bench(BenchArgs),
    /// Two-stage fit of butterfly-shaped hysteresis.
    Butterfly(ButterflyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum GenModel {
    Duhem,
    BoucWen,
    Butterfly,
}

/// Named parameter sets of the reference experiments.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Experiment {
    Duhem,
    BoucWen,
    Size,
    Noise,
    Mismatch,
    Butterfly,
    Actuator,
}

impl Experiment {
    fn model(self) -> Option<GenModel> {
        match self {
            Experiment::Duhem | Experiment::Mismatch => Some(GenModel::Duhem),
            Experiment::BoucWen | Experiment::Size | Experiment::Noise => Some(GenModel::BoucWen),
            Experiment::Butterfly => Some(GenModel::Butterfly),
            Experiment::Actuator => None,
        }
    }

    fn setup(self) -> RecordSetup {
        match self {
            Experiment::Size => Study::DataSize.record_setup(),
            Experiment::Noise => Study::Noise.record_setup(),
            _ => RecordSetup::default(),
        }
    }

    fn bouc_wen(self) -> BoucWenParams {
        match self {
            Experiment::Size => BoucWenParams::DATA_SIZE_STUDY,
            Experiment::Noise => BoucWenParams::NOISE_STUDY,
            _ => BoucWenParams::REFERENCE,
        }
    }

    fn duhem(self) -> DuhemParams {
        match self {
            Experiment::Butterfly => DuhemParams::BUTTERFLY_INNER,
            _ => DuhemParams::REFERENCE,
        }
    }

    fn threshold(self) -> f64 {
        match self {
            Experiment::Actuator => MEASURED_THRESHOLD,
            _ => SIMULATED_THRESHOLD,
        }
    }
}

#[derive(Args, Debug)]
struct ModelParams {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Bouc-Wen exponent.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    frequency: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phase: Option<f64>,
    #[arg(long)]
    decay: Option<f64>,
    /// Excitation periods covered when --dt is not given.
    #[arg(long)]
    periods: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    w0: f64,
    /// Constant added to a butterfly output.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    offset: f64,
}

#[derive(Args, Debug)]
struct GenArgs {
    model: Option<GenModel>,
    #[arg(long, value_enum)]
    defaults_from: Option<Experiment>,
    #[command(flatten)]
    params: ModelParams,
    /// Output file name inside --out-dir.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args, Debug)]
struct SchemaArgs {
    #[arg(long, default_value_t = 0)]
    time_col: usize,
    #[arg(long, default_value_t = 1)]
    input_col: usize,
    #[arg(long, default_value_t = 2)]
    output_col: usize,
    #[arg(long)]
    no_header: bool,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Args, Debug)]
struct FitArgs {
    csv: PathBuf,
    #[arg(long, value_enum)]
    defaults_from: Option<Experiment>,
    #[command(flatten)]
    schema: SchemaArgs,
    #[arg(long, default_value = "model.txt")]
    model_out: String,
}

#[derive(Args, Debug)]
struct PredictArgs {
    csv: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Inner model of a two-stage fit.
    #[arg(long)]
    aux_model: Option<PathBuf>,
    /// `t,u,y` record of the auxiliary state.
    #[arg(long)]
    aux_csv: Option<PathBuf>,
    #[command(flatten)]
    schema: SchemaArgs,
    #[arg(long, default_value = "prediction.csv")]
    output: String,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value = "size")]
    study: String,
    /// Comma-separated subset of stlsq, ols, ridge.
    #[arg(long, default_value = "stlsq,ols,ridge")]
    methods: String,
    /// Comma-separated record sizes.
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated noise levels in percent.
    #[arg(long)]
    noise_levels: Option<String>,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long)]
    ridge_penalty: Option<f64>,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args, Debug)]
struct ButterflyArgs {
    /// Butterfly record; generated from the default parameters when omitted.
    csv: Option<PathBuf>,
    /// `t,u,y` record of the inner loop.
    #[arg(long)]
    aux_csv: Option<PathBuf>,
    #[command(flatten)]
    params: ModelParams,
    #[command(flatten)]
    schema: SchemaArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(&cli.global, a),
        Command::Fit(a) => cmd_fit(&cli.global, a),
        Command::Predict(a) => cmd_predict(&cli.global, a),
        Command::Bench(a) => cmd_bench(&cli.global, a),
        Command::Butterfly(a) => cmd_butterfly(&cli.global, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn out_path(g: &Global, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&g.out_dir)?;
    Ok(g.out_dir.join(name))
}

fn schema(g: &Global, a: &SchemaArgs) -> CsvSchema {
    CsvSchema {
        time_col: if g.dt.is_some() { None } else { Some(a.time_col) },
        input_col: a.input_col,
        output_col: a.output_col,
        has_header: !a.no_header,
        delimiter: a.delimiter as u8,
        dt: g.dt,
    }
}

fn excitation(p: &ModelParams, base: HarmonicExcitation) -> Result<HarmonicExcitation> {
    let exc = HarmonicExcitation {
        amplitude: p.amplitude.unwrap_or(base.amplitude),
        frequency: p.frequency.unwrap_or(base.frequency),
        phase: p.phase.unwrap_or(base.phase),
        decay: p.decay.unwrap_or(base.decay),
    };
    exc.validate()?;
    Ok(exc)
}

fn sampling(g: &Global, p: &ModelParams, setup: &RecordSetup) -> Result<(usize, f64, HarmonicExcitation)> {
    let n = g.points.unwrap_or(DEFAULT_POINTS);
    let exc = excitation(p, setup.excitation)?;
    let setup = RecordSetup {
        excitation: exc,
        periods: p.periods.unwrap_or(setup.periods),
    };
    let dt = g.dt.unwrap_or_else(|| setup.dt(n));
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(usage(format!("dt must be positive, got {dt}")));
    }
    Ok((n, dt, exc))
}

fn threshold(g: &Global, exp: Option<Experiment>) -> f64 {
    g.threshold
        .unwrap_or_else(|| exp.map_or(SIMULATED_THRESHOLD, Experiment::threshold))
}

fn fit_options(g: &Global, exp: Option<Experiment>) -> Result<FitOptions> {
    let library = match &g.library {
        Some(name) => LibrarySpec::from_preset(name)?,
        None => LibrarySpec::default(),
    };
    let stlsq = StlsqConfig::with_threshold(threshold(g, exp));
    stlsq.validate()?;
    Ok(FitOptions { library, stlsq })
}

fn cmd_gen(g: &Global, a: &GenArgs) -> Result<()> {
    let implied = a.defaults_from.and_then(Experiment::model);
    let model = match (a.model, implied) {
        (Some(m), Some(i)) if m != i => {
            return Err(usage(format!("--defaults-from does not generate {m:?} data")));
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => return Err(usage("a model (duhem, bouc-wen, butterfly) is required")),
    };
    let exp = a.defaults_from.unwrap_or(match model {
        GenModel::Duhem => Experiment::Duhem,
        GenModel::BoucWen => Experiment::BoucWen,
        GenModel::Butterfly => Experiment::Butterfly,
    });
    let p = &a.params;
    let (n, dt, exc) = sampling(g, p, &exp.setup())?;
    let noise = g.noise.unwrap_or(0.0);
    let name = a.output.clone().unwrap_or_else(|| {
        match model {
            GenModel::Duhem => "duhem.csv",
            GenModel::BoucWen => "bouc_wen.csv",
            GenModel::Butterfly => "butterfly.csv",
        }
        .to_string()
    });
    let duhem = |base: DuhemParams| DuhemParams {
        alpha: p.alpha.unwrap_or(base.alpha),
        beta: p.beta.unwrap_or(base.beta),
        gamma: p.gamma.unwrap_or(base.gamma),
    };
    let path = out_path(g, &name)?;
    let series = match model {
        GenModel::Duhem => simulate_duhem(&duhem(exp.duhem()), &exc, n, dt, p.w0)?,
        GenModel::BoucWen => {
            let base = exp.bouc_wen();
            let params = BoucWenParams {
                alpha: p.alpha.unwrap_or(base.alpha),
                beta: p.beta.unwrap_or(base.beta),
                gamma: p.gamma.unwrap_or(base.gamma),
                n: p.n.unwrap_or(base.n),
            };
            simulate_bouc_wen(&params, &exc, n, dt, p.w0)?
        }
        GenModel::Butterfly => {
            let data = simulate_butterfly(&duhem(exp.duhem()), &exc, n, dt, p.w0, p.offset)?;
            let aux_path = path.with_file_name(aux_name(&name));
            write_series_csv(&aux_path, &data.aux_series(), None)?;
            println!("wrote {} auxiliary rows to {}", n, aux_path.display());
            data.series
        }
    };
    let series = add_gaussian_noise(&series, noise, g.seed)?;
    write_series_csv(&path, &series, None)?;
    println!("wrote {} rows to {} (dt = {dt}, noise = {noise}%)", series.len(), path.display());
    Ok(())
}

fn aux_name(name: &str) -> String {
    match name.strip_suffix(".csv") {
        Some(stem) => format!("{stem}_aux.csv"),
        None => format!("{name}_aux"),
    }
}

fn read_input(g: &Global, path: &Path, s: &SchemaArgs, default_max: Option<usize>) -> Result<TimeSeries> {
    let schema = schema(g, s);
    schema.validate()?;
    read_csv(path, &schema, g.max_points.or(default_max))
}

fn cmd_fit(g: &Global, a: &FitArgs) -> Result<()> {
    let default_max = (a.defaults_from == Some(Experiment::Actuator)).then_some(ACTUATOR_POINTS);
    let opts = fit_options(g, a.defaults_from)?;
    if opts.library.include_aux {
        return Err(Error::MissingAux);
    }
    let ts = read_input(g, &a.csv, &a.schema, default_max)?;
    let outcome = fit_series(&ts, &opts)?;
    let path = out_path(g, &a.model_out)?;
    write_model(&path, &outcome.report)?;
    println!("{}", render_equation(&outcome.report.model, EQUATION_PRECISION));
    let m = outcome.report.metrics;
    println!("R = {}%  NRMSE = {}  R2 = {}", m.r_percent, m.nrmse, m.r2);
    println!("model written to {}", path.display());
    Ok(())
}

fn cmd_predict(g: &Global, a: &PredictArgs) -> Result<()> {
    let report = read_model(&a.model)?;
    let ts = read_input(g, &a.csv, &a.schema, None)?;
    let derived = differentiate_series(&ts)?;
    let inner;
    let aux = if report.model.uses_aux() {
        let (Some(model_path), Some(csv_path)) = (&a.aux_model, &a.aux_csv) else {
            return Err(Error::MissingAuxModel);
        };
        inner = read_model(model_path)?;
        let aux_ts = read_input(g, csv_path, &a.schema, None)?;
        Some(AuxModel {
            model: &inner.model,
            y0: aux_ts.w()[0],
        })
    } else {
        None
    };
    let prediction = integrate_model(&report.model, &ts, &derived, ts.w()[0], aux)?;
    let m = metrics(ts.w(), &prediction.w_pred)?;
    let path = out_path(g, &a.output)?;
    write_series_csv(&path, &ts, Some(&prediction))?;
    println!("R = {}%  NRMSE = {}  R2 = {}", m.r_percent, m.nrmse, m.r2);
    println!("prediction written to {}", path.display());
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| usage(format!("invalid {what} `{v}`"))))
        .collect()
}

fn cmd_bench(g: &Global, a: &BenchArgs) -> Result<()> {
    let study = Study::parse(&a.study)?;
    let mut cfg = BenchConfig::new(study);
    cfg.methods = a
        .methods
        .split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(Method::parse)
        .collect::<Result<_>>()?;
    if let Some(s) = &a.sizes {
        cfg.sizes = parse_list(s, "size")?;
    } else if let Some(n) = g.points {
        cfg.sizes = vec![n];
    }
    if let Some(s) = &a.noise_levels {
        cfg.noise_levels = parse_list(s, "noise level")?;
    } else if let Some(noise) = g.noise {
        cfg.noise_levels = vec![noise];
    }
    cfg.seeds = a.seeds;
    cfg.base_seed = g.seed;
    cfg.threshold = g.threshold.unwrap_or(SIMULATED_THRESHOLD);
    if let Some(p) = a.ridge_penalty {
        cfg.ridge_penalty = p;
    }
    cfg.validate()?;
    let rows = run_bench(&cfg)?;
    let csv = format_bench_csv(&summarize(&rows));
    let name = a.output.clone().unwrap_or_else(|| format!("bench_{}.csv", study.name()));
    let path = out_path(g, &name)?;
    std::fs::write(&path, &csv)?;
    print!("{csv}");
    println!("results written to {}", path.display());
    Ok(())
}

fn cmd_butterfly(g: &Global, a: &ButterflyArgs) -> Result<()> {
    let (series, y) = match &a.csv {
        Some(path) => {
            let aux_path = a.aux_csv.as_ref().ok_or(Error::MissingAux)?;
            let series = read_input(g, path, &a.schema, None)?;
            let aux = read_input(g, aux_path, &a.schema, None)?;
            (series, aux.w().to_vec())
        }
        None => {
            let p = &a.params;
            let (n, dt, exc) = sampling(g, p, &RecordSetup::default())?;
            let base = DuhemParams::BUTTERFLY_INNER;
            let params = DuhemParams {
                alpha: p.alpha.unwrap_or(base.alpha),
                beta: p.beta.unwrap_or(base.beta),
                gamma: p.gamma.unwrap_or(base.gamma),
            };
            let data = simulate_butterfly(&params, &exc, n, dt, p.w0, p.offset)?;
            (data.series, data.y)
        }
    };
    let (mut inner, mut outer) = butterfly_options();
    if let Some(t) = g.threshold {
        inner.stlsq = StlsqConfig::with_threshold(t);
        outer.stlsq = StlsqConfig::with_threshold(t);
        inner.stlsq.validate()?;
    }
    let outcome = fit_butterfly(&series, &y, &inner, &outer)?;
    let inner_path = out_path(g, "butterfly_inner.txt")?;
    let outer_path = out_path(g, "butterfly_outer.txt")?;
    write_model(&inner_path, &outcome.inner.report)?;
    write_model(&outer_path, &outcome.outer.report)?;
    println!("{}", render_equation(&outcome.inner.report.model, EQUATION_PRECISION));
    println!("{}", render_equation(&outcome.outer.report.model, EQUATION_PRECISION));
    println!("R = {}%", outcome.outer.report.metrics.r_percent);
    let [a1, a2, a3] = outcome.coefficient_ratios();
    println!("outer/inner ratios = {a1:.4}, {a2:.4}, {a3:.4}");
    println!("models written to {} and {}", inner_path.display(), outer_path.display());
    Ok(())
}
