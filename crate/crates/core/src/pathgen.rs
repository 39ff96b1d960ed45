//! Generators for the driving stochastic processes: Brownian bridge,
//! normalized excursion (Vervaat construction), integer-dimension Bessel
//! processes, height-conditioned excursions (Williams construction) and the
//! duration law of the excursion measure.
//!
//! All generators are exact at grid points except where noted: the
//! height-conditioned excursion detects first passage on the grid (the
//! junction value is clamped to the target height) and is re-gridded by
//! linear interpolation to a uniform step.

use rand::Rng;

use crate::path::{ExcursionGrid, PathGrid};
use crate::scalar::{cst, normal_draw, Scalar};
use crate::{param_err, Result};

/// Brownian bridge from `a` to `b` over `[0, total]`, sampled sequentially
/// so that grid-point marginals carry the exact bridge law.
pub fn brownian_bridge<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    total: T,
    a: T,
    b: T,
    rng: &mut R,
) -> Result<PathGrid<T>> {
    if n < 1 {
        return Err(param_err("n", "need at least one step"));
    }
    if !(total > T::zero()) || !total.is_finite() {
        return Err(param_err("total", "duration must be positive and finite"));
    }
    let dt = total / cst::<T>(n as f64);
    let mut values = Vec::with_capacity(n + 1);
    values.push(a);
    let mut x = a;
    for i in 1..n {
        // Conditional law of the bridge at the next grid point.
        let remaining = total - cst::<T>((i - 1) as f64) * dt;
        let mean = x + (b - x) * dt / remaining;
        let var = dt * (remaining - dt) / remaining;
        x = normal_draw(mean, var, rng);
        values.push(x);
    }
    values.push(b);
    PathGrid::from_values(dt, values)
}

/// Normalized Brownian excursion of duration exactly one, built as the
/// Vervaat transform of a standard bridge: cyclically shift the bridge so
/// its (earliest) minimum moves to time zero, then re-center.
pub fn normalized_excursion<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<ExcursionGrid<T>> {
    if n < 2 {
        return Err(param_err("n", "need at least two steps"));
    }
    let bridge = brownian_bridge(n, T::one(), T::zero(), T::zero(), rng)?;
    let dt = bridge.dt();
    let b = bridge.values();
    // argmin over one period; b[n] duplicates b[0]
    let mut k = 0;
    for i in 1..n {
        if b[i] < b[k] {
            k = i;
        }
    }
    let low = b[k];
    let mut values = Vec::with_capacity(n + 1);
    values.push(T::zero());
    for i in 1..n {
        let j = if k + i < n { k + i } else { k + i - n };
        values.push(b[j] - low);
    }
    values.push(T::zero());
    ExcursionGrid::from_values(dt, values)
}

const MAX_BESSEL_DIM: u32 = 16;

/// Bessel process of integer dimension, realized as the Euclidean norm of a
/// `dim`-dimensional Brownian motion started at `(x0, 0, ..., 0)`; grid
/// marginals are exact.
pub fn bessel_exact<T: Scalar, R: Rng + ?Sized>(
    dim: u32,
    x0: T,
    n: usize,
    total: T,
    rng: &mut R,
) -> Result<PathGrid<T>> {
    if dim < 1 || dim > MAX_BESSEL_DIM {
        return Err(param_err(
            "dim",
            format!("only integer dimensions 1..={MAX_BESSEL_DIM} are sampled exactly, got {dim}"),
        ));
    }
    if !(x0 >= T::zero()) {
        return Err(param_err("x0", "start must be nonnegative"));
    }
    if n < 1 {
        return Err(param_err("n", "need at least one step"));
    }
    if !(total > T::zero()) || !total.is_finite() {
        return Err(param_err("total", "duration must be positive and finite"));
    }
    let dt = total / cst::<T>(n as f64);
    let sdt = dt.sqrt();
    let mut coords = [T::zero(); MAX_BESSEL_DIM as usize];
    coords[0] = x0;
    let d = dim as usize;
    let mut values = Vec::with_capacity(n + 1);
    values.push(x0);
    for _ in 0..n {
        let mut norm2 = T::zero();
        for c in coords.iter_mut().take(d) {
            *c += sdt * T::std_normal(rng);
            norm2 += *c * *c;
        }
        values.push(norm2.sqrt());
    }
    PathGrid::from_values(dt, values)
}

/// One Bessel(3) first-passage leg: run from zero until the first grid value
/// reaching `h` (clamped to `h` there), at internal step `dt`.
fn bessel3_first_passage<T: Scalar, R: Rng + ?Sized>(
    h: T,
    dt: T,
    cap: usize,
    rng: &mut R,
) -> Vec<T> {
    let sdt = dt.sqrt();
    let mut coords = [T::zero(); 3];
    let mut values = vec![T::zero()];
    for _ in 0..cap {
        let mut norm2 = T::zero();
        for c in coords.iter_mut() {
            *c += sdt * T::std_normal(rng);
            norm2 += *c * *c;
        }
        let r = norm2.sqrt();
        if r >= h {
            values.push(h);
            return values;
        }
        values.push(r);
    }
    // Unreachable in practice: cap is dozens of mean passage times.
    values.push(h);
    values
}

/// Brownian excursion conditioned to have height exactly `h`, via the
/// Williams decomposition: two independent Bessel(3) first-passage paths to
/// `h`, the second time-reversed, concatenated at the apex and re-gridded to
/// `n` uniform steps. The total duration is random; the apex value is `h`
/// exactly at a single interior grid index.
pub fn excursion_with_height<T: Scalar, R: Rng + ?Sized>(
    h: T,
    n: usize,
    rng: &mut R,
) -> Result<ExcursionGrid<T>> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(param_err("h", "height must be positive and finite"));
    }
    if n < 4 {
        return Err(param_err("n", "need at least four steps"));
    }
    // Mean passage time of Bessel(3) from 0 to h is h^2/3, so 2h^2/(3n)
    // puts about n/2 internal points on each leg.
    let dt_int = cst::<T>(2.0 / 3.0) * h * h / cst::<T>(n as f64);
    let cap = 64 * n;
    let up = bessel3_first_passage(h, dt_int, cap, rng);
    let down = bessel3_first_passage(h, dt_int, cap, rng);

    let m1 = up.len() - 1;
    let m2 = down.len() - 1;
    let total_steps = m1 + m2;
    // concatenated[i] for i in 0..=total_steps, junction at index m1
    let concat = |i: usize| -> T {
        if i <= m1 {
            up[i]
        } else {
            down[total_steps - i]
        }
    };

    let total = cst::<T>(total_steps as f64) * dt_int;
    let dt_out = total / cst::<T>(n as f64);
    let mut values = Vec::with_capacity(n + 1);
    values.push(T::zero());
    for j in 1..n {
        let pos = cst::<T>(j as f64) * dt_out / dt_int;
        let lo = pos.floor().to_usize().unwrap_or(0).min(total_steps - 1);
        let frac = pos - cst::<T>(lo as f64);
        values.push(concat(lo) + frac * (concat(lo + 1) - concat(lo)));
    }
    values.push(T::zero());
    // Pin the apex to an interior grid point so max == h exactly.
    let alpha = cst::<T>(m1 as f64) * dt_int;
    let j_star = (alpha / dt_out)
        .round()
        .to_usize()
        .unwrap_or(1)
        .clamp(1, n - 1);
    values[j_star] = h;
    ExcursionGrid::from_values(dt_out, values)
}

/// A draw from the duration law of the excursion measure restricted to
/// `[s_min, inf)`, together with the total unnormalized mass of that tail.
#[derive(Debug, Clone, Copy)]
pub struct SigmaDraw<T> {
    pub sigma: T,
    /// Tail mass `(2 pi s_min)^{-1/2}` of the restriction.
    pub tail_mass: T,
}

/// Inverse-CDF draw from the density `(8 pi)^{-1/2} s^{-3/2}` restricted to
/// `[s_min, inf)` and normalized.
pub fn sigma_tail_sample<T: Scalar, R: Rng + ?Sized>(s_min: T, rng: &mut R) -> Result<SigmaDraw<T>> {
    if !(s_min > T::zero()) || !s_min.is_finite() {
        return Err(param_err("s_min", "lower truncation must be positive"));
    }
    let u = T::unit_open(rng);
    let sigma = s_min / ((T::one() - u) * (T::one() - u));
    let tail_mass = (cst::<T>(2.0 * std::f64::consts::PI) * s_min).sqrt().recip();
    Ok(SigmaDraw { sigma, tail_mass })
}

/// Tail mass of the duration law: mass of `(s, inf)` is `(2 pi s)^{-1/2}`.
pub fn sigma_tail_mass(s: f64) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * s).sqrt()
}
