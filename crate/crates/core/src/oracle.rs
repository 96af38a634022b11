//! Closed-form reference values for the dyadic-noise systems.
//!
//! Bounds and probabilities are exact rationals; the Lyapunov exponents and
//! log-moments are reals in natural-log units.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::maps::Family;

pub type Rational = Ratio<u64>;

/// `k / (k + n)`: the telescoped product `prod_{m=1}^n (k+m-1)/(k+m)`,
/// an upper bound on `P(|Z_n| < 1)` for `G`-orbits with `|Z_0| > 2^-k`.
pub fn survival_bound(k: u64, n: u64) -> Result<Rational> {
    if k < 2 {
        return Err(invalid("k", "survival bound needs k >= 2"));
    }
    Ok(Ratio::new(k, k + n))
}

/// `P(exponent >= k) = P(xi <= 2^-k) = 1/(k-1)`.
pub fn tail_probability(k: u64) -> Result<Rational> {
    if k < 2 {
        return Err(invalid("k", "tail probability needs k >= 2"));
    }
    Ok(Ratio::new(1, k - 1))
}

/// `P(exponent = k) = 1/(k(k-1))`.
pub fn atom_mass(k: u64) -> Result<Rational> {
    if k < 2 {
        return Err(invalid("k", "atom mass needs k >= 2"));
    }
    Ok(Ratio::new(1, k * (k - 1)))
}

/// Lyapunov exponent at the fixed point 0: `ln(1/2)` for `G`, `ln 2` for `F`.
pub fn exact_exponent(family: Family) -> f64 {
    match family {
        Family::G => -LN_2,
        Family::F => LN_2,
    }
}

/// `E[ln sup|Dg| ; exponent <= k0] = ln 2 * H_{k0-1}`; `None` gives the
/// untruncated moment, which is `+inf`.
pub fn truncated_log_moment(k0: Option<u64>) -> Result<f64> {
    match k0 {
        None => Ok(f64::INFINITY),
        Some(k0) if k0 < 2 => Err(invalid("K0", "truncation exponent must be >= 2")),
        Some(k0) => Ok(LN_2 * harmonic(k0 - 1)),
    }
}

/// `H_n = sum_{j=1}^n 1/j`, smallest terms first.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|j| 1.0 / j as f64).sum()
}

fn ratio_real(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn ser_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else if *v < 0.0 {
        s.serialize_str("-inf")
    } else {
        s.serialize_str("nan")
    }
}

/// A named oracle evaluation, serializable for the `oracle` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    #[serde(serialize_with = "ser_real")]
    pub value: f64,
    /// `"num/den"` when the value is an exact rational.
    pub exact: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleQuery {
    SurvivalBound { k: u64, n: u64 },
    ExactExponent { family: Family },
    TruncatedLogMoment { k0: Option<u64> },
    TailProbability { k: u64 },
}

impl OracleQuery {
    pub fn name(&self) -> &'static str {
        match self {
            OracleQuery::SurvivalBound { .. } => "survival-bound",
            OracleQuery::ExactExponent { .. } => "exact-exponent",
            OracleQuery::TruncatedLogMoment { .. } => "truncated-log-moment",
            OracleQuery::TailProbability { .. } => "tail-probability",
        }
    }

    pub fn evaluate(&self) -> Result<OracleReport> {
        let mut parameters = BTreeMap::new();
        let (value, exact) = match *self {
            OracleQuery::SurvivalBound { k, n } => {
                parameters.insert("k".into(), k.to_string());
                parameters.insert("n".into(), n.to_string());
                let r = survival_bound(k, n)?;
                (ratio_real(r), Some(r.to_string()))
            }
            OracleQuery::TailProbability { k } => {
                parameters.insert("k".into(), k.to_string());
                let r = tail_probability(k)?;
                (ratio_real(r), Some(r.to_string()))
            }
            OracleQuery::ExactExponent { family } => {
                parameters.insert("family".into(), family.to_string());
                (exact_exponent(family), None)
            }
            OracleQuery::TruncatedLogMoment { k0 } => {
                if let Some(k0) = k0 {
                    parameters.insert("K0".into(), k0.to_string());
                }
                (truncated_log_moment(k0)?, None)
            }
        };
        Ok(OracleReport {
            name: self.name().to_string(),
            parameters,
            value,
            exact,
        })
    }
}
