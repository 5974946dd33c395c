//! Small statistical helpers shared by the samplers and their tests.

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A point estimate with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCi {
    pub mean: f64,
    pub ci_halfwidth_95: f64,
    pub n_trials: u64,
}

impl EstimateWithCi {
    /// Estimate of a success probability from `successes` out of `n`.
    pub fn bernoulli(successes: u64, n: u64) -> Self {
        let mean = if n == 0 { 0.0 } else { successes as f64 / n as f64 };
        Self {
            mean,
            ci_halfwidth_95: bernoulli_halfwidth(mean, n),
            n_trials: n,
        }
    }

    /// Estimate of a mean from its running sum and sum of squares.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        if n == 0 {
            return Self {
                mean: 0.0,
                ci_halfwidth_95: 0.0,
                n_trials: 0,
            };
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            mean,
            ci_halfwidth_95: Z95 * (var / nf).sqrt(),
            n_trials: n,
        }
    }

    pub fn contains(&self, value: f64, widen: f64) -> bool {
        (value - self.mean).abs() <= widen * self.ci_halfwidth_95
    }

    /// Affine map `a·X + b` of the estimate.
    pub fn scaled(&self, a: f64, b: f64) -> Self {
        Self {
            mean: a * self.mean + b,
            ci_halfwidth_95: a.abs() * self.ci_halfwidth_95,
            n_trials: self.n_trials,
        }
    }
}

pub fn bernoulli_halfwidth(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Kolmogorov–Smirnov statistic of a sample against a continuous CDF.
/// Sorts `xs` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(xs: &mut [f64], cdf: F) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let lo = f - i as f64 / n;
        let hi = (i + 1) as f64 / n - f;
        d.max(lo).max(hi)
    })
}

/// Asymptotic one-sample KS critical value at significance 0.01.
pub fn ks_critical_001(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_interval() {
        let e = EstimateWithCi::bernoulli(400, 1000);
        assert_eq!(e.mean, 0.4);
        let expected = 1.96 * (0.4f64 * 0.6 / 1000.0).sqrt();
        assert!((e.ci_halfwidth_95 - expected).abs() < 1e-4);
        assert_eq!(EstimateWithCi::bernoulli(0, 0).mean, 0.0);
    }

    #[test]
    fn moments_constant_sample_has_zero_width() {
        let e = EstimateWithCi::from_moments(5.0, 5.0, 5);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.ci_halfwidth_95, 0.0);
    }

    #[test]
    fn ks_uniform_grid_is_small() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.0005).abs() < 1e-12);
    }
}
