//! Monte Carlo point estimates with confidence half-widths.

use serde::{Deserialize, Serialize};

/// Half-widths are reported at this many standard errors.
pub const HALF_WIDTH_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub samples: u64,
    pub value: f64,
    pub std_err: f64,
    /// `HALF_WIDTH_SIGMAS * std_err`.
    pub half_width: f64,
}

impl Estimate {
    pub fn new(samples: u64, value: f64, std_err: f64) -> Self {
        Self {
            samples,
            value,
            std_err,
            half_width: HALF_WIDTH_SIGMAS * std_err,
        }
    }

    /// Binomial proportion `successes / samples` with the plug-in standard
    /// error `sqrt(p(1-p)/N)`.
    pub fn proportion(successes: u64, samples: u64) -> Self {
        assert!(samples > 0, "proportion over zero samples");
        let n = samples as f64;
        let p = successes as f64 / n;
        Self::new(samples, p, (p * (1.0 - p) / n).sqrt())
    }

    /// Sample mean and standard error of the mean, accumulated in slice order.
    pub fn mean_of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "mean over zero samples");
        let mut acc = Welford::default();
        values.iter().for_each(|&v| acc.push(v));
        acc.estimate()
    }

    /// Whether two independent estimates agree within `sigmas` combined
    /// standard errors.
    pub fn agrees_with(&self, other: &Estimate, sigmas: f64) -> bool {
        let tol = sigmas * (self.std_err.powi(2) + other.std_err.powi(2)).sqrt();
        (self.value - other.value).abs() <= tol
    }
}

/// Streaming mean/variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        };
        Estimate::new(self.count, self.mean, se)
    }
}
