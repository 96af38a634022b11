//! Execution of each experiment configuration.

use serde_json::json;
use syncrds::attractor::{
    default_survival_start, dual_exceedance_curve, pullback_diameter_curve, stable_probe_curve,
    survival_curve, unstable_probe_curve,
};
use syncrds::cocycle::forward_orbit;
use syncrds::lyapunov::{integrability_diagnostic, lyapunov_ensemble};
use syncrds::oracle::{self, OracleQuery};
use syncrds::{selftest, Ensemble, Error, ExtReal, Family, NoisePath, NoiseSource};

use crate::config::{
    ExperimentConfig, IntegrabilityArgs, LyapunovArgs, OracleArgs, OracleName, OrbitArgs,
    ProbeStableArgs, ProbeUnstableArgs, PullbackArgs, SelftestArgs, SurvivalArgs,
};
use crate::output::{to_value, Cell, Report, Table};

/// Why a run did not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration (exit 2).
    Config(String),
    /// Failure during the run (exit 1).
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::UniformOutOfRange(_) => Failure::Config(e.to_string()),
            Error::EscapedOrbit { .. } => Failure::Runtime(e.to_string()),
        }
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn require_finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be finite, got {v}")))
    }
}

fn require_checkpoints(c: &[usize]) -> Result<(), Failure> {
    if c.is_empty() {
        Err(config_err("at least one checkpoint is required"))
    } else {
        Ok(())
    }
}

/// Outcome of a run: the report, plus whether it should exit nonzero.
pub struct Outcome {
    pub report: Report,
    pub failed: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failed: false }
    }
}

pub fn execute(config: ExperimentConfig, ensemble: &Ensemble) -> Result<Outcome, Failure> {
    let cfg = config.clone();
    let (table, summary, failed) = match config {
        ExperimentConfig::Orbit(a) => wrap(orbit(&a)?),
        ExperimentConfig::Lyapunov(a) => wrap(lyapunov(&a, ensemble)?),
        ExperimentConfig::Survival(a) => wrap(survival(&a, ensemble)?),
        ExperimentConfig::Pullback(a) => wrap(pullback(&a, ensemble)?),
        ExperimentConfig::Integrability(a) => wrap(integrability(&a)?),
        ExperimentConfig::ProbeStable(a) => wrap(probe_stable(&a, ensemble)?),
        ExperimentConfig::ProbeUnstable(a) => wrap(probe_unstable(&a, ensemble)?),
        ExperimentConfig::Oracle(a) => wrap(oracle_cmd(&a)?),
        ExperimentConfig::Selftest(a) => selftest_cmd(&a),
    };
    Ok(Outcome {
        report: Report {
            config: cfg,
            table,
            summary,
        },
        failed,
    })
}

type Produced = (Table, Option<serde_json::Value>);

fn wrap(p: Produced) -> (Table, Option<serde_json::Value>, bool) {
    (p.0, p.1, false)
}

fn orbit(a: &OrbitArgs) -> Result<Produced, Failure> {
    require_finite("z0", a.z0)?;
    let base = NoisePath::new(a.seed);
    let (path, first_index) = if a.pullback {
        (base.shift(-(a.steps as i64)), 1 - a.steps as i64)
    } else {
        (base, 1)
    };
    let o = forward_orbit(a.family, &path, a.z0, a.steps);
    let mut t = Table::new(vec!["m", "index", "exponent", "state", "sign"]);
    for (m, s) in o.states.iter().enumerate() {
        let (index, exponent) = if m == 0 {
            (Cell::Empty, Cell::Empty)
        } else {
            (
                Cell::Int(first_index + m as i64 - 1),
                Cell::from(o.atoms[m - 1].exponent()),
            )
        };
        let sign = match *s {
            ExtReal::Finite(v) if v > 0.0 => 1,
            ExtReal::Finite(v) if v < 0.0 => -1,
            ExtReal::Finite(_) => 0,
            ExtReal::Escaped(sign) => sign.signum() as i64,
        };
        t.push(vec![m.into(), index, exponent, (*s).into(), Cell::Int(sign)]);
    }
    let summary = json!({
        "escaped_at": o.escaped_at,
        "log2_deriv_sum": o.log2_deriv_sum,
        "differentiated_steps": o.differentiated_steps(),
    });
    Ok((t, Some(summary)))
}

fn lyapunov(a: &LyapunovArgs, ensemble: &Ensemble) -> Result<Produced, Failure> {
    require_finite("z0", a.z0)?;
    let s = lyapunov_ensemble(a.family, a.z0, a.steps, a.seeds, a.seed, ensemble)?;
    let mut t = Table::new(vec!["sample", "value", "log2_sum"]);
    for (i, e) in s.per_seed.iter().enumerate() {
        t.push(vec![i.into(), e.value.into(), e.log2_sum.into()]);
    }
    let summary = json!({
        "value": s.mean.value,
        "std_err": s.mean.std_err,
        "min": s.min,
        "max": s.max,
        "spread": s.spread(),
        "exact": oracle::exact_exponent(a.family),
    });
    Ok((t, Some(summary)))
}

fn survival(a: &SurvivalArgs, ensemble: &Ensemble) -> Result<Produced, Failure> {
    require_checkpoints(&a.checkpoints)?;
    if a.k < 2 {
        return Err(config_err("k must be >= 2"));
    }
    let z0 = a.z0.unwrap_or_else(|| default_survival_start(a.k));
    let c = survival_curve(a.k, z0, &a.checkpoints, a.samples, a.seed, ensemble)?;
    let mut t = Table::new(vec!["n", "p_hat", "half_width", "bound"]);
    for r in &c.rows {
        t.push(vec![r.n.into(), r.p_hat.into(), r.half_width.into(), r.bound.into()]);
    }
    Ok((t, Some(json!({ "z0": z0 }))))
}

fn pullback(a: &PullbackArgs, ensemble: &Ensemble) -> Result<Produced, Failure> {
    require_checkpoints(&a.checkpoints)?;
    let c = pullback_diameter_curve(a.radius, a.epsilon, &a.checkpoints, a.samples, a.seed, ensemble)?;
    let dual_seed = a.dual_seed.unwrap_or(a.seed.wrapping_add(1));
    let dual = dual_exceedance_curve(a.radius, a.epsilon, &a.checkpoints, a.samples, dual_seed, ensemble)?;
    let mut t = Table::new(vec![
        "n",
        "p_exceed",
        "half_width",
        "median_diameter",
        "dual_p",
        "dual_half_width",
    ]);
    for (r, d) in c.rows.iter().zip(&dual) {
        t.push(vec![
            r.n.into(),
            r.p_exceed.into(),
            r.half_width.into(),
            r.median_diameter.into(),
            d.value.into(),
            d.half_width.into(),
        ]);
    }
    Ok((t, Some(json!({ "dual_seed": dual_seed }))))
}

fn integrability(a: &IntegrabilityArgs) -> Result<Produced, Failure> {
    let r = integrability_diagnostic(a.family, a.samples, a.k0, a.seed)?;
    let mut t = Table::new(vec!["metric", "samples", "value", "std_err"]);
    for m in &r.running_means {
        t.push(vec!["running_mean".into(), m.samples.into(), m.mean.into(), Cell::Empty]);
    }
    t.push(vec![
        "truncated_mean".into(),
        r.samples.into(),
        r.truncated.value.into(),
        r.truncated.std_err.into(),
    ]);
    t.push(vec!["analytic_truncated".into(), Cell::Empty, r.analytic_truncated.into(), Cell::Empty]);
    t.push(vec![
        "fixed_point_log_slope".into(),
        Cell::Empty,
        r.fixed_point_log_slope.into(),
        Cell::Empty,
    ]);
    Ok((t, None))
}

fn check_beta(beta: f64) -> Result<(), Failure> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(config_err(format!("beta must lie in (0, 1), got {beta}")))
    }
}

/// Smallest `k >= 2` with `|y| > 2^-k`.
fn dyadic_level(y: f64) -> u64 {
    let mut k = 2u64;
    while y.abs() <= (-(k as f64)).exp2() && k < 2000 {
        k += 1;
    }
    k
}

fn probe_stable(a: &ProbeStableArgs, ensemble: &Ensemble) -> Result<Produced, Failure> {
    require_checkpoints(&a.checkpoints)?;
    require_finite("x", a.x)?;
    require_finite("y", a.y)?;
    if a.mu.is_nan() || a.mu >= 0.0 {
        return Err(config_err(format!("mu must be negative, got {}", a.mu)));
    }
    check_beta(a.beta)?;
    let est = stable_probe_curve(a.family, a.x, a.y, a.mu, a.beta, &a.checkpoints, a.samples, a.seed, ensemble)?;
    let bound_k = (a.family == Family::G && a.x == 0.0 && a.y != 0.0).then(|| dyadic_level(a.y));
    let mut t = Table::new(vec!["n", "fraction_holding", "half_width", "survival_bound"]);
    for (&n, e) in a.checkpoints.iter().zip(&est) {
        let bound = match bound_k {
            Some(k) => Cell::Real(oracle::survival_bound(k, n as u64).map(|b| *b.numer() as f64 / *b.denom() as f64)?),
            None => Cell::Empty,
        };
        t.push(vec![n.into(), e.value.into(), e.half_width.into(), bound]);
    }
    Ok((t, None))
}

fn probe_unstable(a: &ProbeUnstableArgs, ensemble: &Ensemble) -> Result<Produced, Failure> {
    require_checkpoints(&a.checkpoints)?;
    require_finite("x0", a.x0)?;
    if a.mu.is_nan() || a.mu <= 0.0 {
        return Err(config_err(format!("mu must be positive, got {}", a.mu)));
    }
    check_beta(a.beta)?;
    let est = unstable_probe_curve(a.family, a.x0, a.mu, a.beta, &a.checkpoints, a.samples, a.seed, ensemble)?;
    let bound_k = (a.family == Family::F && a.x0 != 0.0).then(|| dyadic_level(a.x0));
    let mut t = Table::new(vec!["n", "certified_fraction", "half_width", "certification_floor"]);
    for (&n, e) in a.checkpoints.iter().zip(&est) {
        let floor = match bound_k {
            Some(k) => Cell::Real(oracle::survival_bound(k, n as u64).map(|b| 1.0 - *b.numer() as f64 / *b.denom() as f64)?),
            None => Cell::Empty,
        };
        t.push(vec![n.into(), e.value.into(), e.half_width.into(), floor]);
    }
    Ok((t, None))
}

fn oracle_cmd(a: &OracleArgs) -> Result<Produced, Failure> {
    let need = |v: Option<u64>, flag: &str| v.ok_or_else(|| config_err(format!("oracle needs --{flag}")));
    let query = match a.name {
        OracleName::SurvivalBound => OracleQuery::SurvivalBound {
            k: need(a.k, "k")?,
            n: need(a.n, "n")?,
        },
        OracleName::TailProbability => OracleQuery::TailProbability { k: need(a.k, "k")? },
        OracleName::ExactExponent => OracleQuery::ExactExponent {
            family: a.family.ok_or_else(|| config_err("oracle needs --family"))?,
        },
        OracleName::TruncatedLogMoment => OracleQuery::TruncatedLogMoment { k0: a.k0 },
    };
    let r = query.evaluate()?;
    let mut t = Table::new(vec!["name", "value", "exact"]);
    t.push(vec![
        r.name.as_str().into(),
        r.value.into(),
        r.exact.as_deref().map_or(Cell::Empty, Cell::from),
    ]);
    Ok((t, Some(to_value(&r))))
}

fn selftest_cmd(a: &SelftestArgs) -> (Table, Option<serde_json::Value>, bool) {
    let checks = selftest::run(a.seed);
    let mut t = Table::new(vec!["check", "passed", "detail"]);
    let mut failed = false;
    for c in &checks {
        failed |= !c.passed;
        t.push(vec![c.name.into(), c.passed.into(), Cell::Text(c.detail.replace(',', ";"))]);
    }
    (t, None, failed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_levels() {
        assert_eq!(dyadic_level(1e-6), 20);
        assert_eq!(dyadic_level(0.01), 7);
        assert_eq!(dyadic_level(0.125), 4);
        assert_eq!(dyadic_level(0.9), 2);
    }
}
