//! Composite quadrature and tail estimation on the half line.

use alloc::vec::Vec;
use libm::ceil;

/// Simpson rule on a single cell.
#[inline]
pub fn simpson_cell<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

/// Composite Simpson over `[a, b]` with cells of width at most `step`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, step: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let cells = ceil((b - a) / step) as usize;
    let cells = cells.max(1);
    let h = (b - a) / cells as f64;
    let mut total = 0.0;
    for k in 0..cells {
        let lo = a + k as f64 * h;
        total += simpson_cell(f, lo, lo + h);
    }
    total
}

/// Cumulative integral of `f` from `grid[0]` at every grid node,
/// cell-by-cell Simpson. The grid must be increasing.
pub fn cumulative<F: Fn(f64) -> f64>(f: &F, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        acc += simpson_cell(f, w[0], w[1]);
        out.push(acc);
    }
    out
}

/// Verdict of the segment-ratio tail test for `∫_lo^∞ f`.
#[derive(Debug, Clone, Copy)]
pub struct TailEstimate {
    /// Estimated value of the tail integral beyond the truncation radius.
    pub tail: f64,
    /// Ratio of the last two segment integrals.
    pub ratio: f64,
}

/// Estimates `∫_{r_max}^∞ f` by geometric extrapolation of the last two
/// segment integrals of width `seg` before `r_max`. Returns `None` when the
/// segments do not contract (ratio >= `ratio_cap`), i.e. when the partial
/// integrals are not Cauchy at this truncation.
pub fn geometric_tail<F: Fn(f64) -> f64>(
    f: &F,
    r_max: f64,
    seg: f64,
    step: f64,
    ratio_cap: f64,
) -> Option<TailEstimate> {
    let s0 = integrate(f, r_max - 2.0 * seg, r_max - seg, step);
    let s1 = integrate(f, r_max - seg, r_max, step);
    if !(s0.is_finite() && s1.is_finite()) || s0 <= 0.0 {
        return None;
    }
    let q = s1 / s0;
    if !(q < ratio_cap) {
        return None;
    }
    let tail = s1 * q / (1.0 - q);
    Some(TailEstimate { tail, ratio: q })
}

/// Checks that successive equal-width segment integrals of `f` on
/// `[lo, r_max]` contract, which certifies integrability of the tail at the
/// resolution of the probe. Returns the segment integrals on failure.
pub fn cauchy_tail_test<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    r_max: f64,
    segments: usize,
    step: f64,
    ratio_cap: f64,
) -> Result<(), Vec<f64>> {
    let seg = (r_max - lo) / segments as f64;
    let mut parts = Vec::with_capacity(segments);
    for k in 0..segments {
        let a = lo + k as f64 * seg;
        parts.push(integrate(f, a, a + seg, step));
    }
    // Only the outer half of the range is probed: the head may grow.
    let start = segments / 2;
    let contracting = parts[start..]
        .windows(2)
        .all(|w| w[1].is_finite() && w[1] < ratio_cap * w[0]);
    if contracting {
        Ok(())
    } else {
        Err(parts)
    }
}

/// Integer power by repeated squaring; exact for the small exponents used
/// for `xi^(n-1)` weights.
#[inline]
pub fn powi(base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}
