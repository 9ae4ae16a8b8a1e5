//! Least-squares solvers: ordinary, ridge, and sequentially thresholded
//! least squares (STLSQ).
//!
//! All solvers go through a column-pivoted Householder QR. Rank-deficient
//! systems get the minimum-norm solution via a complete orthogonal
//! decomposition, so correlated libraries never abort a fit.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::LibraryMatrix;
use crate::model::{ModelTarget, SparseModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlsqConfig {
    /// Coefficients with magnitude strictly below this are zeroed. Applied
    /// in the library's own (unnormalized) units.
    pub threshold: f64,
    pub max_sweeps: usize,
    pub ridge_penalty: f64,
    /// Scale columns to unit 2-norm before each fit.
    pub normalize_columns: bool,
}

impl StlsqConfig {
    pub fn with_threshold(threshold: f64) -> Self {
        StlsqConfig {
            threshold,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0) || !self.threshold.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "threshold must be non-negative, got {}",
                self.threshold
            )));
        }
        if self.max_sweeps < 1 {
            return Err(Error::InvalidParameter("max_sweeps must be at least 1".into()));
        }
        if !(self.ridge_penalty >= 0.0) || !self.ridge_penalty.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ridge penalty must be non-negative, got {}",
                self.ridge_penalty
            )));
        }
        Ok(())
    }
}

impl Default for StlsqConfig {
    fn default() -> Self {
        StlsqConfig {
            threshold: 0.1,
            max_sweeps: 10,
            ridge_penalty: 0.0,
            normalize_columns: true,
        }
    }
}

/// Householder reflector `I − τ v vᵀ` (with `v[0] = 1`) that maps `x` onto
/// `α e₁`. Returns `(v, τ, α)`; `τ = 0` when `x` is already zero.
fn householder(x: &[f64]) -> (Vec<f64>, f64, f64) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (vec![0.0; x.len()], 0.0, 0.0);
    }
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    let v0 = x[0] - alpha;
    let mut v: Vec<f64> = x.iter().map(|xi| xi / v0).collect();
    v[0] = 1.0;
    let tau = -v0 / alpha;
    (v, tau, alpha)
}

/// Applies `I − τ v vᵀ` to rows `k..` of columns `cols` of `m`.
fn reflect_columns(m: &mut DMatrix<f64>, k: usize, cols: std::ops::Range<usize>, v: &[f64], tau: f64) {
    if tau == 0.0 {
        return;
    }
    for j in cols {
        let mut col = m.column_mut(j);
        let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * col[k + i]).sum();
        let s = tau * dot;
        for (i, vi) in v.iter().enumerate() {
            col[k + i] -= s * vi;
        }
    }
}

fn reflect_vector(x: &mut [f64], k: usize, v: &[f64], tau: f64) {
    if tau == 0.0 {
        return;
    }
    let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * x[k + i]).sum();
    let s = tau * dot;
    for (i, vi) in v.iter().enumerate() {
        x[k + i] -= s * vi;
    }
}

/// Minimum-norm solution of `min ‖a x − b‖₂`.
pub fn lstsq(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::ShapeMismatch {
            rows: m,
            target: b.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);

    for k in 0..steps {
        let pivot = (k..n)
            .map(|j| (j, r.view((k, j), (m - k, 1)).norm_squared()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        if pivot != k {
            r.swap_columns(k, pivot);
            perm.swap(k, pivot);
        }
        let x: Vec<f64> = r.view((k, k), (m - k, 1)).iter().copied().collect();
        let (v, tau, alpha) = householder(&x);
        if tau == 0.0 {
            // the remaining columns are all zero
            break;
        }
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)] = 0.0;
        }
        reflect_columns(&mut r, k, k + 1..n, &v, tau);
        reflect_vector(&mut rhs, k, &v, tau);
    }

    let r00 = r[(0, 0)].abs();
    let tol = m.max(n) as f64 * f64::EPSILON * r00;
    let rank = (0..steps).take_while(|&k| r[(k, k)].abs() > tol).count();

    let mut y = vec![0.0; n];
    if rank == n {
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| r[(i, j)] * y[j]).sum();
            y[i] = (rhs[i] - s) / r[(i, i)];
        }
    } else if rank > 0 {
        // R₁ = R[..rank, ..] is rank × n with full row rank. Factor
        // R₁ᵀ = Z T; the minimum-norm solution of R₁ y = c is Z T⁻ᵀ c.
        let mut rt = r.view((0, 0), (rank, n)).transpose();
        let mut reflectors = Vec::with_capacity(rank);
        for k in 0..rank {
            let x: Vec<f64> = rt.view((k, k), (n - k, 1)).iter().copied().collect();
            let (v, tau, alpha) = householder(&x);
            rt[(k, k)] = alpha;
            for i in k + 1..n {
                rt[(i, k)] = 0.0;
            }
            reflect_columns(&mut rt, k, k + 1..rank, &v, tau);
            reflectors.push((v, tau));
        }
        // Tᵀ z = c, forward substitution
        for i in 0..rank {
            let s: f64 = (0..i).map(|j| rt[(j, i)] * y[j]).sum();
            y[i] = (rhs[i] - s) / rt[(i, i)];
        }
        for (k, (v, tau)) in reflectors.iter().enumerate().rev() {
            reflect_vector(&mut y, k, v, *tau);
        }
    }

    let mut x = vec![0.0; n];
    for (j, &p) in perm.iter().enumerate() {
        x[p] = y[j];
    }
    Ok(x)
}

/// Ordinary least squares, minimum-norm on rank-deficient input.
pub fn ols(theta: &DMatrix<f64>, target: &[f64]) -> Result<Vec<f64>> {
    lstsq(theta, target)
}

/// Minimizes `‖Θξ − target‖² + penalty·‖ξ‖²` by least squares on the
/// augmented system `[Θ; √p·I] ξ ≈ [target; 0]`.
pub fn ridge(theta: &DMatrix<f64>, target: &[f64], penalty: f64) -> Result<Vec<f64>> {
    if !(penalty >= 0.0) || !penalty.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ridge penalty must be non-negative, got {penalty}"
        )));
    }
    if penalty == 0.0 {
        return ols(theta, target);
    }
    let (m, n) = theta.shape();
    if target.len() != m {
        return Err(Error::ShapeMismatch {
            rows: m,
            target: target.len(),
        });
    }
    let root = penalty.sqrt();
    let augmented = DMatrix::from_fn(m + n, n, |i, j| {
        if i < m {
            theta[(i, j)]
        } else if i - m == j {
            root
        } else {
            0.0
        }
    });
    let mut rhs = target.to_vec();
    rhs.resize(m + n, 0.0);
    lstsq(&augmented, &rhs)
}

/// Raw STLSQ output on a bare matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StlsqFit {
    pub coefficients: Vec<f64>,
    /// Least-squares fits performed.
    pub iterations: usize,
    pub converged: bool,
    /// Support size after each threshold application.
    pub support_history: Vec<usize>,
}

/// Fits on the columns in `active`, returning coefficients in original
/// units for every column (zero outside `active`).
fn fit_on_support(
    theta: &DMatrix<f64>,
    target: &[f64],
    active: &[usize],
    scale: &[f64],
    ridge_penalty: f64,
) -> Result<Vec<f64>> {
    let mut coef = vec![0.0; theta.ncols()];
    if active.is_empty() {
        return Ok(coef);
    }
    let sub = DMatrix::from_fn(theta.nrows(), active.len(), |i, k| {
        theta[(i, active[k])] / scale[active[k]]
    });
    let xi = ridge(&sub, target, ridge_penalty)?;
    for (k, &j) in active.iter().enumerate() {
        coef[j] = xi[k] / scale[j];
    }
    Ok(coef)
}

pub fn stlsq_matrix(theta: &DMatrix<f64>, target: &[f64], cfg: &StlsqConfig) -> Result<StlsqFit> {
    cfg.validate()?;
    let (m, n) = theta.shape();
    if target.len() != m {
        return Err(Error::ShapeMismatch {
            rows: m,
            target: target.len(),
        });
    }
    let norms: Vec<f64> = theta.column_iter().map(|c| c.norm()).collect();
    let (scale, mut active): (Vec<f64>, Vec<usize>) = if cfg.normalize_columns {
        (
            norms.iter().map(|v| if *v > 0.0 { *v } else { 1.0 }).collect(),
            (0..n).filter(|&j| norms[j] > 0.0).collect(),
        )
    } else {
        (vec![1.0; n], (0..n).collect())
    };

    let mut coef = fit_on_support(theta, target, &active, &scale, cfg.ridge_penalty)?;
    let mut iterations = 1;
    let mut history = Vec::new();
    let converged = loop {
        // strict comparison: |ξ| == λ survives
        let survivors: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&j| coef[j].abs() >= cfg.threshold)
            .collect();
        history.push(survivors.len());
        if survivors.len() == active.len() {
            break true;
        }
        active = survivors;
        if active.is_empty() {
            coef.iter_mut().for_each(|c| *c = 0.0);
            break true;
        }
        if iterations >= cfg.max_sweeps {
            let keep: Vec<bool> = (0..n).map(|j| active.contains(&j)).collect();
            for (c, k) in coef.iter_mut().zip(keep) {
                if !k {
                    *c = 0.0;
                }
            }
            break false;
        }
        coef = fit_on_support(theta, target, &active, &scale, cfg.ridge_penalty)?;
        iterations += 1;
    };
    // columns never in the support are exact zeros
    for (j, c) in coef.iter_mut().enumerate() {
        if !active.contains(&j) {
            *c = 0.0;
        }
    }
    Ok(StlsqFit {
        coefficients: coef,
        iterations,
        converged,
        support_history: history,
    })
}

/// Sequentially thresholded least squares on a term library.
pub fn stlsq(
    theta: &LibraryMatrix,
    target: &[f64],
    cfg: &StlsqConfig,
    model_target: ModelTarget,
) -> Result<SparseModel> {
    let fit = stlsq_matrix(theta.values(), target, cfg)?;
    Ok(SparseModel {
        coefficients: fit.coefficients,
        terms: theta.terms().to_vec(),
        threshold: cfg.threshold,
        iterations: fit.iterations,
        converged: fit.converged,
        target: model_target,
    })
}

/// Re-applies the threshold rule to `coefficients` and reports whether the
/// support survives it unchanged.
pub fn is_support_fixed_point(
    theta: &DMatrix<f64>,
    target: &[f64],
    coefficients: &[f64],
    cfg: &StlsqConfig,
) -> Result<bool> {
    let active: Vec<usize> = (0..coefficients.len()).filter(|&j| coefficients[j] != 0.0).collect();
    let scale: Vec<f64> = if cfg.normalize_columns {
        theta
            .column_iter()
            .map(|c| c.norm())
            .map(|v| if v > 0.0 { v } else { 1.0 })
            .collect()
    } else {
        vec![1.0; theta.ncols()]
    };
    let refit = fit_on_support(theta, target, &active, &scale, cfg.ridge_penalty)?;
    Ok(active.iter().all(|&j| refit[j].abs() >= cfg.threshold))
}

/// `Θ ξ`
pub fn predict_rates(theta: &DMatrix<f64>, coefficients: &[f64]) -> Vec<f64> {
    let xi = DVector::from_column_slice(coefficients);
    (theta * xi).iter().copied().collect()
}
