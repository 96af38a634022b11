//! Finite-time Lyapunov exponents and the log-derivative integrability
//! diagnostics.
//!
//! Every slope of either family is a power of two, so derivative sums are
//! accumulated as integer base-2 exponents and converted to natural-log units
//! only at the end. At the fixed point this makes the estimate exact.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::ensemble::Ensemble;
use crate::error::{invalid, Error, Result};
use crate::maps::{ExtReal, Family, MonotoneMap1D};
use crate::noise::{NoisePath, NoiseSource};
use crate::oracle;
use crate::stats::{Estimate, Welford};

/// Running-mean checkpoints of the integrability diagnostic (plus `N`).
pub const RUNNING_MEAN_CHECKPOINTS: [u64; 3] = [1_000, 10_000, 100_000];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub steps: usize,
    /// `sum_m log2 |D map(Z_{m-1}, xi_m)|`, exact.
    pub log2_sum: i64,
    /// `(1/n) sum_m ln |D map(Z_{m-1}, xi_m)|`.
    pub value: f64,
}

impl LyapunovEstimate {
    fn from_log2(steps: usize, log2_sum: i64) -> Self {
        // Divide before scaling so that a sum of -n gives exactly -ln 2.
        let value = (log2_sum as f64 / steps as f64) * LN_2;
        Self {
            steps,
            log2_sum,
            value,
        }
    }
}

/// `(1/n) ln |D phi_n(omega, z0)|` by the chain rule along the orbit.
///
/// Fails with [`Error::EscapedOrbit`] if the orbit escapes before step `n`
/// (escaping exactly at step `n` still leaves every factor defined).
pub fn finite_time_lyapunov<P: NoiseSource>(
    family: Family,
    path: &P,
    z0: f64,
    n: usize,
) -> Result<LyapunovEstimate> {
    if n == 0 {
        return Err(invalid("steps", "finite-time exponent needs n >= 1"));
    }
    let mut z = ExtReal::Finite(z0);
    let mut log2_sum = 0i64;
    for m in 1..=n {
        let x = match z {
            ExtReal::Finite(x) => x,
            ExtReal::Escaped(_) => {
                return Err(Error::EscapedOrbit {
                    step: m - 1,
                    requested: n,
                })
            }
        };
        let map = MonotoneMap1D::new(family, path.atom(m as i64));
        log2_sum += map.derivative(x).log2;
        z = map.eval(z);
    }
    Ok(LyapunovEstimate::from_log2(n, log2_sum))
}

/// Per-seed estimates over an ensemble of independent paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSummary {
    pub family: Family,
    pub z0: f64,
    pub steps: usize,
    pub per_seed: Vec<LyapunovEstimate>,
    pub mean: Estimate,
    pub min: f64,
    pub max: f64,
}

impl LyapunovSummary {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

pub fn lyapunov_ensemble(
    family: Family,
    z0: f64,
    steps: usize,
    seeds: u64,
    seed: u64,
    ensemble: &Ensemble,
) -> Result<LyapunovSummary> {
    if seeds == 0 {
        return Err(invalid("seeds", "need at least one seed"));
    }
    let per_seed = ensemble
        .map(seeds, |i| {
            finite_time_lyapunov(family, &NoisePath::for_sample(seed, i), z0, steps)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = per_seed.iter().map(|e| e.value).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(LyapunovSummary {
        family,
        z0,
        steps,
        mean: Estimate::mean_of(&values),
        per_seed,
        min,
        max,
    })
}

/// Base-2 log of `sup_{|z| <= 1} |D map(z, xi)|` for exponent `k`.
fn sup_log2_slope(family: Family, k: u64) -> u64 {
    match family {
        // 2 xi <= 1/2, so the outer slope 2^k is attained inside [-1, 1].
        Family::G => k,
        // inner slope 2 dominates 2^-k
        Family::F => 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunningMean {
    pub samples: u64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub family: Family,
    pub samples: u64,
    pub k0: u64,
    /// Running means of `ln+ sup_{[-1,1]} |D map|` at the checkpoints.
    pub running_means: Vec<RunningMean>,
    /// `(1/N) sum_i X_i 1{k_i <= K0}` with its standard error.
    pub truncated: Estimate,
    /// Closed form of the truncated expectation.
    pub analytic_truncated: f64,
    /// `ln+ |D map(0)|`, the integrand of the first integrability condition at
    /// the fixed point (constant in the noise).
    pub fixed_point_log_slope: f64,
}

/// Log-moment diagnostic of the one-step `C^1` norm over `[-1, 1]`.
///
/// The i.i.d. exponents are read at indices `1..=N` of the path with the
/// given seed. All sums are integer sums of base-2 exponents, so the result
/// does not depend on evaluation order.
pub fn integrability_diagnostic(family: Family, samples: u64, k0: u64, seed: u64) -> Result<IntegrabilityReport> {
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    if k0 < 2 {
        return Err(invalid("K0", "truncation exponent must be >= 2"));
    }
    let path = NoisePath::new(seed);
    let mut checkpoints: Vec<u64> = RUNNING_MEAN_CHECKPOINTS
        .iter()
        .copied()
        .filter(|&c| c < samples)
        .collect();
    checkpoints.push(samples);

    let mut running_means = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    let (mut sum, mut trunc_sum, mut trunc_sq) = (0u128, 0u128, 0u128);
    for i in 1..=samples {
        let k = path.atom(i as i64).exponent();
        let x = sup_log2_slope(family, k) as u128;
        sum += x;
        if k <= k0 {
            trunc_sum += x;
            trunc_sq += x * x;
        }
        if i == checkpoints[next] {
            running_means.push(RunningMean {
                samples: i,
                mean: sum as f64 / i as f64 * LN_2,
            });
            next += 1;
        }
    }

    let n = samples as f64;
    let mean2 = trunc_sum as f64 / n;
    let var2 = if samples > 1 {
        ((trunc_sq as f64) - n * mean2 * mean2).max(0.0) / (n - 1.0)
    } else {
        0.0
    };
    let truncated = Estimate::new(samples, mean2 * LN_2, (var2 / n).sqrt() * LN_2);

    let analytic_truncated = match family {
        Family::G => oracle::truncated_log_moment(Some(k0))?,
        Family::F => LN_2 * (1.0 - 1.0 / k0 as f64),
    };
    let fixed_point_log_slope = oracle::exact_exponent(family).max(0.0);

    Ok(IntegrabilityReport {
        family,
        samples,
        k0,
        running_means,
        truncated,
        analytic_truncated,
        fixed_point_log_slope,
    })
}

/// Running mean of `ln+ sup|D map|` over a streaming accumulator; used by
/// callers that want the floating-point route for comparison.
pub fn running_log_slope_mean(family: Family, samples: u64, seed: u64) -> Estimate {
    let path = NoisePath::new(seed);
    let mut acc = Welford::default();
    for i in 1..=samples {
        acc.push(sup_log2_slope(family, path.atom(i as i64).exponent()) as f64 * LN_2);
    }
    acc.estimate()
}
