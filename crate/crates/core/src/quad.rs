//! Adaptive Simpson quadrature.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Accumulated local error estimate.
    pub residual: f64,
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Fails if the recursion depth is exhausted before the local error
/// estimates fit the budget.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<QuadResult> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut residual = 0.0;
    let value = recurse(
        &f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        tol,
        max_depth,
        &mut residual,
    )?;
    Ok(QuadResult { value, residual })
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    residual: &mut f64,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        *residual += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature {
            residual: delta.abs() / 15.0,
        });
    }
    let lv = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, residual)?;
    let rv = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, residual)?;
    Ok(lv + rv)
}

/// Simpson rule on a fixed uniform grid with `n` panels (`n` even).
pub fn simpson_uniform<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2 && n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomial_exactly() {
        // Simpson is exact on cubics.
        let r = adaptive_simpson(|x| x * x * x - x, 0.0, 2.0, 1e-12, 20).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn integrates_gaussian_tail() {
        let r = adaptive_simpson(|x| (-x * x / 2.0).exp(), 0.0, 8.0, 1e-12, 40).unwrap();
        assert_relative_eq!(r.value, (std::f64::consts::PI / 2.0).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn reports_failure_when_depth_exhausted() {
        let r = adaptive_simpson(|x| 1.0 / x.abs().max(1e-300).sqrt(), -1.0, 1.0, 1e-14, 4);
        assert!(r.is_err());
    }

    #[test]
    fn fixed_grid_simpson() {
        let v = simpson_uniform(|x| x.sin(), 0.0, std::f64::consts::PI, 256);
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
    }
}
