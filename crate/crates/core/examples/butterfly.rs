//! Two-stage fit of a butterfly loop `w = y²`, where `y` follows a
//! Duhem loop. The outer coefficients come out as twice the inner ones.

use sparse_hysteresis::experiments::{butterfly_options, butterfly_term_pairs, fit_butterfly};
use sparse_hysteresis::prelude::*;

fn main() -> Result<()> {
    let exc = HarmonicExcitation::default();
    let n = 10_000;
    let data = simulate_butterfly(&DuhemParams::BUTTERFLY_INNER, &exc, n, exc.default_dt(n), 0.0, 0.0)?;

    let (inner, outer) = butterfly_options();
    let fit = fit_butterfly(&data.series, &data.y, &inner, &outer)?;

    println!("{}", render_equation(&fit.inner.report.model, 4));
    println!("{}", render_equation(&fit.outer.report.model, 4));
    for ((o, i), ratio) in butterfly_term_pairs().iter().zip(fit.coefficient_ratios()) {
        println!("{:>10} / {:<8} = {ratio:.4}", o.name(), i.name_with_state("y"));
    }
    println!("coupled R = {:.2e} %", fit.outer.report.metrics.r_percent);
    Ok(())
}
