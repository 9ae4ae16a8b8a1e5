//! Sparse discovery of white-box hysteresis models.
//!
//! Given a sampled excitation `u(t)` and response `w(t)`, the crate
//! differentiates both signals, evaluates a library of candidate terms
//! (`u`, `w`, `|w|` monomials times `1`, `u̇` or `|u̇|`), and runs
//! sequentially thresholded least squares to find a sparse rate equation
//! `ẇ = Σ ξⱼ θⱼ(u, u̇, w)`. The discovered equation is integrated forward to
//! validate it against the record.
//!
//! ```no_run
//! use sparse_hysteresis::prelude::*;
//!
//! let exc = HarmonicExcitation::default();
//! let n = 10_000;
//! let ts = simulate_duhem(&DuhemParams::REFERENCE, &exc, n, exc.default_dt(n), 0.0).unwrap();
//! let outcome = fit_series(&ts, &FitOptions::default()).unwrap();
//! println!("{}", render_equation(&outcome.report.model, 4));
//! ```

pub mod diff;
pub mod error;
pub mod experiments;
pub mod features;
pub mod generators;
pub mod io;
pub mod model;
pub mod ode;
pub mod regress;
pub mod series;
pub mod simulate;
pub mod term;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::diff::{central_difference, differentiate_series};
    pub use crate::error::{Error, Result};
    pub use crate::experiments::{fit_butterfly, fit_series, FitOptions, FitOutcome};
    pub use crate::features::{build_library, enumerate_terms, LibraryMatrix, LibrarySpec};
    pub use crate::generators::{
        add_gaussian_noise, simulate_bouc_wen, simulate_butterfly, simulate_duhem, BoucWenParams, DuhemParams,
        HarmonicExcitation,
    };
    pub use crate::model::{render_equation, FitReport, Metrics, ModelTarget, SparseModel};
    pub use crate::regress::{ols, ridge, stlsq, StlsqConfig};
    pub use crate::series::{DerivedSeries, TimeSeries};
    pub use crate::simulate::{integrate_model, nrmse, r2_score, relative_percent_error, AuxModel, Prediction};
    pub use crate::term::{DerivFactor, TermDescriptor};
}
