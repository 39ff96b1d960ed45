//! Uniformly sampled paths and excursions.

use crate::scalar::{cst, Scalar};
use crate::{param_err, Error, Result};

/// A real-valued path sampled on a uniform time grid.
///
/// `values[i]` is the path value at time `t0 + i * dt`; the grid covers
/// `[t0, t0 + (len - 1) * dt]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid<T> {
    t0: T,
    dt: T,
    values: Vec<T>,
}

impl<T: Scalar> PathGrid<T> {
    pub fn new(t0: T, dt: T, values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(param_err("values", "path must contain at least one value"));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(param_err("dt", "time step must be positive and finite"));
        }
        Ok(Self { t0, dt, values })
    }

    /// Path starting at time zero.
    pub fn from_values(dt: T, values: Vec<T>) -> Result<Self> {
        Self::new(T::zero(), dt, values)
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[allow(clippy::len_without_is_empty)] // paths are never empty by invariant
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Number of grid steps (`len - 1`).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Exact duration `(len - 1) * dt`.
    pub fn duration(&self) -> T {
        cst::<T>(self.steps() as f64) * self.dt
    }

    pub fn time_at(&self, index: usize) -> T {
        self.t0 + cst::<T>(index as f64) * self.dt
    }

    /// Linear interpolation at an arbitrary time inside the grid span.
    pub fn at_time(&self, t: T) -> T {
        let rel = (t - self.t0) / self.dt;
        let max_idx = self.steps();
        if rel <= T::zero() {
            return self.values[0];
        }
        let lo = rel.floor();
        let i = (lo.to_usize().unwrap_or(0)).min(max_idx);
        if i >= max_idx {
            return self.values[max_idx];
        }
        let frac = rel - lo;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Earliest index attaining the minimum value.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Earliest index attaining the maximum value.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// A `PathGrid` satisfying the excursion contract: both endpoints are
/// exactly zero and every interior value is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionGrid<T> {
    path: PathGrid<T>,
}

impl<T: Scalar> ExcursionGrid<T> {
    pub fn new(path: PathGrid<T>) -> Result<Self> {
        let v = path.values();
        let last = v.len() - 1;
        if last == 0 {
            return Err(Error::ExcursionContract(
                "an excursion needs at least two grid points".into(),
            ));
        }
        if v[0] != T::zero() || v[last] != T::zero() {
            return Err(Error::ExcursionContract(format!(
                "endpoints must be exactly zero (got {} and {})",
                v[0], v[last]
            )));
        }
        for (i, &x) in v.iter().enumerate().take(last).skip(1) {
            if !(x > T::zero()) {
                return Err(Error::ExcursionContract(format!(
                    "interior value at index {i} is {x}, expected > 0"
                )));
            }
        }
        Ok(Self { path })
    }

    pub fn from_values(dt: T, values: Vec<T>) -> Result<Self> {
        Self::new(PathGrid::from_values(dt, values)?)
    }

    pub fn path(&self) -> &PathGrid<T> {
        &self.path
    }

    pub fn into_path(self) -> PathGrid<T> {
        self.path
    }

    /// Height of the excursion (maximum value).
    pub fn height(&self) -> T {
        self.path.max()
    }
}

impl<T> std::ops::Deref for ExcursionGrid<T> {
    type Target = PathGrid<T>;

    fn deref(&self) -> &PathGrid<T> {
        &self.path
    }
}
