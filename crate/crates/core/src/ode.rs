//! Classical fixed-step fourth-order Runge–Kutta.

/// Magnitude beyond which a trajectory is treated as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Advances `state` from `t` by `h`; `rhs(t, state)` returns the rate.
pub fn rk4_step<const N: usize, F>(rhs: &mut F, t: f64, state: [f64; N], h: f64) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let shifted = |s: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *s;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = rhs(t, &state);
    let k2 = rhs(t + 0.5 * h, &shifted(&state, &k1, 0.5 * h));
    let k3 = rhs(t + 0.5 * h, &shifted(&state, &k2, 0.5 * h));
    let k4 = rhs(t + h, &shifted(&state, &k3, h));
    let mut next = state;
    for i in 0..N {
        next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    next
}

/// Integrates over `n_points` grid points `t0 + i·h` and returns one state
/// per point, the first being `initial`. Returns the failing step index when
/// the state leaves `±DIVERGENCE_LIMIT` or stops being finite.
pub fn integrate<const N: usize, F>(
    mut rhs: F,
    t0: f64,
    h: f64,
    n_points: usize,
    initial: [f64; N],
) -> Result<Vec<[f64; N]>, usize>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(n_points);
    if n_points == 0 {
        return Ok(out);
    }
    out.push(initial);
    let mut state = initial;
    for i in 1..n_points {
        let t = t0 + (i - 1) as f64 * h;
        state = rk4_step(&mut rhs, t, state, h);
        if state.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
            return Err(i);
        }
        out.push(state);
    }
    Ok(out)
}
