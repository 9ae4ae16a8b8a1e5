//! Bouc-Wen (n = 1) recovery, plus a look at what STLSQ threw away.

use sparse_hysteresis::prelude::*;

fn main() -> Result<()> {
    let exc = HarmonicExcitation::default();
    let n = 10_000;
    let ts = simulate_bouc_wen(&BoucWenParams::REFERENCE, &exc, n, exc.default_dt(n), 0.0)?;

    let derived = differentiate_series(&ts)?;
    let library = build_library(&LibrarySpec::default(), &ts, &derived, None)?;
    println!("{} candidate terms", library.ncols());

    let dense = ols(library.values(), derived.dw())?;
    let model = stlsq(&library, derived.dw(), &StlsqConfig::default(), ModelTarget::Output)?;

    println!("{:>14} {:>12} {:>12}", "term", "ols", "stlsq");
    for (j, term) in library.terms().iter().enumerate() {
        println!("{:>14} {:>12.4e} {:>12.4}", term.name(), dense[j], model.coefficients[j]);
    }
    println!("{}", render_equation(&model, 4));

    let pred = integrate_model(&model, &ts, &derived, ts.w()[0], None)?;
    println!("R = {:.2e} %", relative_percent_error(ts.w(), &pred.w_pred)?);
    Ok(())
}
