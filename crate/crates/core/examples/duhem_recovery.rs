//! Recover the Duhem rate equation from a clean simulated loop.
//!
//! ```text
//! cargo run --release --example duhem_recovery
//! ```

use sparse_hysteresis::prelude::*;

fn main() -> Result<()> {
    let exc = HarmonicExcitation::default();
    let n = 10_000;
    let ts = simulate_duhem(&DuhemParams::REFERENCE, &exc, n, exc.default_dt(n), 0.0)?;

    let outcome = fit_series(&ts, &FitOptions::default())?;
    let report = &outcome.report;

    println!("{}", render_equation(&report.model, 4));
    println!(
        "{} sweeps, converged: {}, R = {:.2e} %",
        report.model.iterations, report.model.converged, report.metrics.r_percent
    );
    println!("fit {:.1} ms, simulate {:.1} ms", report.fit_seconds * 1e3, report.simulate_seconds * 1e3);
    Ok(())
}
