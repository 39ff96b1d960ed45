//! The re-rooting transform and tour-based path reconstruction.
//!
//! Re-rooting at a grid time `s` re-codes the tree carried by the lifetime
//! excursion with the vertex visited at `s` as the new root:
//!
//! * `zeta'[r] = zeta[s] + zeta[s + r] - 2 * min over [s, s + r] of zeta`,
//! * `head'[r] = head[s + r] - head[s]`,
//!
//! where `s + r` wraps around the duration and the interval between two
//! times is the plain (unordered) interval between them. All index
//! arithmetic is done on integer grid indices so the transform is exact;
//! interval minima come from a sparse-table range-minimum structure built
//! once per call (`O(n log n)` build, `O(1)` query).

use rand::Rng;
#[cfg(test)]
use rand::RngExt as _;

use crate::path::{ExcursionGrid, PathGrid};
use crate::scalar::{cst, Scalar};
use crate::snake::{simulate_head, SnakeConfig, SnakeSample};
use crate::{param_err, pathgen, Result};

/// Immutable sparse table answering range-minimum queries in O(1).
pub struct RangeMin<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> RangeMin<T> {
    pub fn new(values: &[T]) -> Self {
        assert!(!values.is_empty());
        let n = values.len();
        let levels = usize::BITS - n.leading_zeros();
        let mut rows = Vec::with_capacity(levels as usize);
        rows.push(values.to_vec());
        let mut width = 1usize;
        while 2 * width <= n {
            let prev = rows.last().unwrap();
            let row: Vec<T> = (0..=n - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            rows.push(row);
            width *= 2;
        }
        Self { rows }
    }

    /// Minimum over the inclusive index range `[lo, hi]`.
    pub fn min(&self, lo: usize, hi: usize) -> T {
        debug_assert!(lo <= hi && hi < self.rows[0].len());
        if lo == hi {
            return self.rows[0][lo];
        }
        let span = hi - lo + 1;
        let level = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let width = 1usize << level;
        self.rows[level][lo].min(self.rows[level][hi + 1 - width])
    }
}

/// Wrapping index addition on a grid with `n` steps: times `0` and `n`
/// denote the same tree vertex.
#[inline]
fn wrap(s: usize, k: usize, n: usize) -> usize {
    let t = s + k;
    if t <= n {
        t
    } else {
        t - n
    }
}

/// Exact evaluation of the re-rooted lifetime on the grid.
pub fn reroot_lifetimes<T: Scalar>(zeta: &ExcursionGrid<T>, s_index: usize) -> Result<ExcursionGrid<T>> {
    let rmq = RangeMin::new(zeta.values());
    reroot_lifetimes_with(zeta, s_index, &rmq)
}

/// As [`reroot_lifetimes`], reusing a prebuilt range-minimum structure.
pub fn reroot_lifetimes_with<T: Scalar>(
    zeta: &ExcursionGrid<T>,
    s_index: usize,
    rmq: &RangeMin<T>,
) -> Result<ExcursionGrid<T>> {
    let n = zeta.steps();
    if s_index >= n {
        return Err(param_err(
            "s_index",
            format!("re-rooting time must be a grid index in [0, {n}), got {s_index}"),
        ));
    }
    let z = zeta.values();
    let zs = z[s_index];
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::zero());
    for k in 1..n {
        let u = wrap(s_index, k, n);
        let (lo, hi) = if u < s_index { (u, s_index) } else { (s_index, u) };
        let m = rmq.min(lo, hi);
        out.push(zs + z[u] - m - m);
    }
    out.push(T::zero());
    ExcursionGrid::from_values(zeta.dt(), out)
}

/// Snap a time to the nearest grid index; the flag reports whether snapping
/// moved the requested time.
pub fn snap_to_grid<T: Scalar>(path: &PathGrid<T>, t: T) -> (usize, bool) {
    let rel = (t - path.t0()) / path.dt();
    let idx = rel
        .round()
        .to_usize()
        .unwrap_or(0)
        .min(path.steps());
    let exact = (rel - cst::<T>(idx as f64)).abs() < cst::<T>(1e-9);
    (idx, !exact)
}

/// A re-rooted snake together with its origin in the source sample.
#[derive(Debug, Clone)]
pub struct RerootedSample<T> {
    pub snake: SnakeSample<T>,
    /// Grid index in the source sample at which the snake was re-rooted.
    pub origin_index: usize,
    pub origin_time: T,
}

impl<T> std::ops::Deref for RerootedSample<T> {
    type Target = SnakeSample<T>;

    fn deref(&self) -> &SnakeSample<T> {
        &self.snake
    }
}

/// Re-root the whole snake at grid index `s_index`.
pub fn reroot_head<T: Scalar>(sample: &SnakeSample<T>, s_index: usize) -> Result<RerootedSample<T>> {
    let zeta = reroot_lifetimes(&sample.lifetime, s_index)?;
    let n = sample.head.steps();
    let h = sample.head.values();
    let hs = h[s_index];
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::zero());
    for k in 1..n {
        out.push(h[wrap(s_index, k, n)] - hs);
    }
    out.push(T::zero());
    let head = PathGrid::new(sample.head.t0(), sample.head.dt(), out)?;
    let mut snake = SnakeSample::new(zeta, head)?;
    snake.provenance = sample.provenance;
    Ok(RerootedSample {
        origin_time: sample.head.time_at(s_index),
        origin_index: s_index,
        snake,
    })
}

/// Reconstruct the historical path at tour time `r_index`: for each height
/// `t` on the `dh`-grid below the lifetime (plus the tip height), the value
/// of the head at the last time `u <= r` at which the linearly interpolated
/// lifetime equals `t`. Returns `(height, value)` knots from the root up.
pub fn reconstruct_path<T: Scalar>(
    sample: &SnakeSample<T>,
    r_index: usize,
    dh: T,
) -> Result<Vec<(T, T)>> {
    if !(dh > T::zero()) || !dh.is_finite() {
        return Err(param_err("dh", "height spacing must be positive"));
    }
    let z = sample.lifetime.values();
    let h = sample.head.values();
    if r_index >= z.len() {
        return Err(param_err("r_index", "tour time outside the grid"));
    }
    let zr = z[r_index];
    let mut heights: Vec<T> = Vec::new();
    let mut k = 0u64;
    loop {
        let t = cst::<T>(k as f64) * dh;
        if t >= zr {
            break;
        }
        heights.push(t);
        k += 1;
    }
    heights.push(zr);

    let mut out = Vec::with_capacity(heights.len());
    for &t in &heights {
        let value = if t == zr {
            h[r_index]
        } else {
            // scan right-to-left for the last segment whose range covers t
            let mut found = None;
            for j in (0..r_index).rev() {
                let (a, b) = (z[j], z[j + 1]);
                if a.min(b) <= t && t <= a.max(b) {
                    // last crossing within the segment; constant segments
                    // exit at their right endpoint
                    let val = if a == b {
                        h[j + 1]
                    } else {
                        let f = (t - a) / (b - a);
                        h[j] + f * (h[j + 1] - h[j])
                    };
                    found = Some(val);
                    break;
                }
            }
            found.expect("height below the lifetime at r is always crossed")
        };
        out.push((t, value));
    }
    Ok(out)
}

/// Exact (up to discretization) draw from the law of the snake conditioned
/// to stay positive, realized by re-rooting an unconditioned normalized
/// snake at the time of its head minimum. The head minimum of the output is
/// exactly zero, attained at the endpoints.
pub fn exact_conditioned_sample<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    cfg: &SnakeConfig<T>,
    rng: &mut R,
) -> Result<RerootedSample<T>> {
    let e = pathgen::normalized_excursion(n, rng)?;
    let sample = simulate_head(&e, cfg, rng)?;
    reroot_head(&sample, sample.argmin_index)
}
