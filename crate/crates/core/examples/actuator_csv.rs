//! Fit a measured voltage/displacement record.
//!
//! ```text
//! cargo run --release --example actuator_csv -- data.csv [time_col input_col output_col]
//! ```
//!
//! Only the first 15000 rows are used, with λ = 0.01.

use sparse_hysteresis::experiments::{fit_series, FitOptions, ACTUATOR_POINTS, MEASURED_THRESHOLD};
use sparse_hysteresis::io::{read_csv, CsvSchema};
use sparse_hysteresis::model::render_equation;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().ok_or("usage: actuator_csv <file.csv> [time input output]")?;
    let cols: Vec<usize> = args.map(|a| a.parse()).collect::<Result<_, _>>()?;

    let mut schema = CsvSchema::default();
    if let [t, i, o] = cols[..] {
        schema.time_col = Some(t);
        schema.input_col = i;
        schema.output_col = o;
    }
    let ts = read_csv(&path, &schema, Some(ACTUATOR_POINTS))?;

    let fit = fit_series(&ts, &FitOptions::with_threshold(MEASURED_THRESHOLD))?;
    let r = &fit.report;
    println!("{}", render_equation(&r.model, 2));
    println!("terms: {}", r.model.support().len());
    println!("R2 = {:.4}  NRMSE = {:.4}  R = {:.3} %", r.metrics.r2, r.metrics.nrmse, r.metrics.r_percent);
    println!("train {:.2e} s, test {:.2e} s", r.fit_seconds, r.simulate_seconds);
    Ok(())
}
