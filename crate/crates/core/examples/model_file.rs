//! Write a fitted model to disk, read it back and replay it on a fresh
//! record driven by a different input.

use sparse_hysteresis::io::{format_model, read_model, write_model, write_series_csv};
use sparse_hysteresis::prelude::*;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("sparse-hysteresis-example");
    std::fs::create_dir_all(&dir)?;

    let exc = HarmonicExcitation::default();
    let n = 5_000;
    let train = simulate_duhem(&DuhemParams::REFERENCE, &exc, n, exc.default_dt(n), 0.0)?;
    let fit = fit_series(&train, &FitOptions::default())?;

    let path = dir.join("duhem.model");
    write_model(&path, &fit.report)?;
    print!("{}", format_model(&fit.report));
    let model = read_model(&path)?.model;

    let test_exc = HarmonicExcitation { amplitude: 1.5, frequency: 2.0, decay: 0.3, ..exc };
    let test = simulate_duhem(&DuhemParams::REFERENCE, &test_exc, n, test_exc.default_dt(n), 0.1)?;
    let derived = differentiate_series(&test)?;
    let pred = integrate_model(&model, &test, &derived, test.w()[0], None)?;

    let out = dir.join("replay.csv");
    write_series_csv(&out, &test, Some(&pred))?;
    println!(
        "replay R = {:.2e} %, NRMSE = {:.2e}, written to {}",
        relative_percent_error(test.w(), &pred.w_pred)?,
        nrmse(test.w(), &pred.w_pred)?,
        out.display()
    );
    Ok(())
}
