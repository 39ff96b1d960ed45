//! Estimation helpers: moment accumulators, Kolmogorov-Smirnov tests,
//! empirical distribution utilities, bootstrap and least-squares fits.

use rand::{Rng, RngExt};

/// Streaming mean/variance accumulator (Welford), mergeable across batches.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Merge another accumulator; used to combine per-batch results in a
    /// fixed order so thread count cannot change the outcome.
    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n1 = self.n as f64;
        let n2 = other.n as f64;
        let d = other.mean - self.mean;
        let n = n1 + n2;
        self.mean += d * n2 / n;
        self.m2 += other.m2 + d * d * n1 * n2 / n;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n as f64 - 1.0)
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Accumulator for self-normalized importance-sampling estimates.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeightedMoments {
    n: u64,
    sum_w: f64,
    sum_w2: f64,
    sum_wx: f64,
    sum_wx2: f64,
}

impl WeightedMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, w: f64, x: f64) {
        self.n += 1;
        self.sum_w += w;
        self.sum_w2 += w * w;
        self.sum_wx += w * x;
        self.sum_wx2 += w * x * x;
    }

    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sum_w += other.sum_w;
        self.sum_w2 += other.sum_w2;
        self.sum_wx += other.sum_wx;
        self.sum_wx2 += other.sum_wx2;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn sum_weights(&self) -> f64 {
        self.sum_w
    }

    /// Self-normalized mean `sum(w x) / sum(w)`.
    pub fn mean(&self) -> f64 {
        self.sum_wx / self.sum_w
    }

    /// Effective sample size `(sum w)^2 / sum w^2`.
    pub fn ess(&self) -> f64 {
        if self.sum_w2 == 0.0 {
            return 0.0;
        }
        self.sum_w * self.sum_w / self.sum_w2
    }

    /// Delta-method standard error of the self-normalized mean.
    pub fn se(&self) -> f64 {
        if self.n == 0 || self.sum_w == 0.0 {
            return f64::INFINITY;
        }
        let mu = self.mean();
        // var over weighted draws of x around mu, scaled by the ESS
        let var_x = (self.sum_wx2 / self.sum_w - mu * mu).max(0.0);
        (var_x / self.ess()).sqrt()
    }
}

/// Standard error of a binomial proportion.
pub fn proportion_se(p_hat: f64, n: u64) -> f64 {
    ((p_hat * (1.0 - p_hat)).max(0.0) / n as f64).sqrt()
}

pub fn sort_unstable(xs: &mut [f64]) {
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
}

/// Fraction of the sorted sample strictly greater than `x`.
pub fn empirical_survival(sorted: &[f64], x: f64) -> f64 {
    let idx = sorted.partition_point(|&v| v <= x);
    (sorted.len() - idx) as f64 / sorted.len() as f64
}

/// Fraction of the sorted sample less than or equal to `x`.
pub fn empirical_cdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Two-sample Kolmogorov-Smirnov statistic; both inputs are sorted in place.
pub fn ks_statistic_two_sample(xs: &mut [f64], ys: &mut [f64]) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty());
    sort_unstable(xs);
    sort_unstable(ys);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        let t = x.min(y);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// One-sample KS statistic against a CDF; the sample is sorted in place.
pub fn ks_statistic_one_sample<F: Fn(f64) -> f64>(xs: &mut [f64], cdf: F) -> f64 {
    assert!(!xs.is_empty());
    sort_unstable(xs);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = sign * (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of the two-sample KS statistic `d`.
pub fn ks_two_sample_pvalue(d: f64, n: usize, m: usize) -> f64 {
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    kolmogorov_sf(ne.sqrt() * d)
}

/// Asymptotic p-value of the one-sample KS statistic `d`.
pub fn ks_one_sample_pvalue(d: f64, n: usize) -> f64 {
    kolmogorov_sf((n as f64).sqrt() * d)
}

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz band at confidence `1 - alpha`.
pub fn dkw_band(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Bootstrap standard error of the two-sample KS distance.
pub fn ks_distance_bootstrap_se<R: Rng + ?Sized>(
    xs: &[f64],
    ys: &[f64],
    n_boot: usize,
    rng: &mut R,
) -> f64 {
    let mut acc = RunningMoments::new();
    let mut bx = vec![0.0; xs.len()];
    let mut by = vec![0.0; ys.len()];
    for _ in 0..n_boot {
        for v in bx.iter_mut() {
            *v = xs[rng.random_range(0..xs.len())];
        }
        for v in by.iter_mut() {
            *v = ys[rng.random_range(0..ys.len())];
        }
        acc.push(ks_statistic_two_sample(&mut bx, &mut by));
    }
    acc.variance().sqrt()
}

/// Ordinary least squares fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
