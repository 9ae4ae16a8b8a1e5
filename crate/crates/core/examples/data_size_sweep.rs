//! STLSQ against least-squares baselines as the record grows.

use sparse_hysteresis::experiments::{run_bench, summarize, BenchConfig, Study};

fn main() -> sparse_hysteresis::Result<()> {
    let cfg = BenchConfig::new(Study::DataSize);
    let summary = summarize(&run_bench(&cfg)?);

    println!("{:<6} {:>6} {:>12} {:>9}", "method", "size", "R %", "support");
    for s in &summary {
        println!(
            "{:<6} {:>6} {:>12.3e} {:>8.0}%",
            s.method.name(),
            s.size,
            s.r_percent,
            s.recovery_rate * 100.0
        );
    }
    Ok(())
}
