//! Bouc-Wen records corrupted with 1 % and 5 % Gaussian noise.
//!
//! Pass noise levels as arguments to override, e.g. `-- 0.5 1 2`.

use sparse_hysteresis::experiments::{run_bench, summarize, BenchConfig, Study};

fn main() -> sparse_hysteresis::Result<()> {
    let mut cfg = BenchConfig::new(Study::Noise);
    let levels: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if !levels.is_empty() {
        cfg.noise_levels = levels;
    }

    let rows = run_bench(&cfg)?;
    for r in &rows {
        println!(
            "{:<6} noise {:>4}% seed {} R {:>10.4} % support {}",
            r.method.name(),
            r.noise,
            r.seed,
            r.r_percent,
            if r.support_recovered { "ok" } else { "-" }
        );
    }
    println!();
    for s in summarize(&rows) {
        println!("{:<6} {:>4}%  mean R {:.4} %", s.method.name(), s.noise, s.r_percent);
    }
    Ok(())
}
