//! Survival, synchronization and stable/unstable-set diagnostics.
//!
//! All ensemble routines derive one independent two-sided path per sample from
//! `(seed, sample index)` and evaluate samples through [`Ensemble`], so results
//! do not depend on the worker count.

use serde::{Deserialize, Serialize};

use crate::cocycle::{pullback_state, Orbit};
use crate::ensemble::Ensemble;
use crate::error::{invalid, Result};
use crate::maps::{pow2, ExtReal, Family, MonotoneMap1D, WideReal};
use crate::noise::{NoisePath, NoiseSource};
use crate::oracle;
use crate::stats::Estimate;

/// Default checkpoints for survival and synchronization curves.
pub const DEFAULT_CHECKPOINTS: [usize; 4] = [10, 100, 1_000, 10_000];

fn validate_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        Err(invalid("samples", "need at least one sample"))
    } else {
        Ok(())
    }
}

/// Evaluates `observe(path)` per sample and returns, for each checkpoint, the
/// proportion of samples with `true`.
fn proportions<F>(checkpoints: &[usize], samples: u64, seed: u64, ensemble: &Ensemble, observe: F) -> Vec<Estimate>
where
    F: Fn(&NoisePath) -> Vec<bool> + Sync + Send,
{
    let hits = ensemble.map(samples, |i| observe(&NoisePath::for_sample(seed, i)));
    (0..checkpoints.len())
        .map(|c| {
            let count = hits.iter().filter(|h| h[c]).count() as u64;
            Estimate::proportion(count, samples)
        })
        .collect()
}

/// Walks a forward orbit and reports `pred(Z_n)` at every checkpoint `n`.
/// Escaped states are passed to `pred` as well.
fn forward_observe<P, F>(family: Family, path: &P, z0: f64, checkpoints: &[usize], pred: F) -> Vec<bool>
where
    P: NoiseSource,
    F: Fn(ExtReal) -> bool,
{
    let mut order: Vec<usize> = (0..checkpoints.len()).collect();
    order.sort_by_key(|&c| checkpoints[c]);
    let mut out = vec![false; checkpoints.len()];
    let mut z = WideReal::from_f64(z0);
    let mut m = 0usize;
    for c in order {
        let target = checkpoints[c];
        while m < target && !z.is_escaped() {
            m += 1;
            z = MonotoneMap1D::new(family, path.atom(m as i64)).eval_wide(z);
        }
        out[c] = pred(z.to_ext());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub n: usize,
    /// Empirical `P(|Z_n| < 1)`.
    pub p_hat: f64,
    pub half_width: f64,
    /// `k / (k + n)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub k: u64,
    pub z0: f64,
    pub samples: u64,
    pub rows: Vec<SurvivalRow>,
}

/// Default start `2^-(k-1)`, the simplest value with `|z0| > 2^-k`.
pub fn default_survival_start(k: u64) -> f64 {
    pow2(1 - k as i64)
}

/// Monte Carlo `P(|Z_n| < 1)` for `G`-orbits from `z0`, with the bound
/// `k/(k+n)` attached.
pub fn survival_curve(
    k: u64,
    z0: f64,
    checkpoints: &[usize],
    samples: u64,
    seed: u64,
    ensemble: &Ensemble,
) -> Result<SurvivalCurve> {
    if k < 2 {
        return Err(invalid("k", "k must be >= 2"));
    }
    if !z0.is_finite() || z0.abs() <= pow2(-(k as i64)) {
        return Err(invalid("z0", format!("need |z0| > 2^-{k}, got {z0}")));
    }
    validate_samples(samples)?;
    let estimates = proportions(checkpoints, samples, seed, ensemble, |path| {
        forward_observe(Family::G, path, z0, checkpoints, |z| z.abs() < 1.0)
    });
    let rows = checkpoints
        .iter()
        .zip(estimates)
        .map(|(&n, e)| {
            let b = oracle::survival_bound(k, n as u64)?;
            Ok(SurvivalRow {
                n,
                p_hat: e.value,
                half_width: e.half_width,
                bound: *b.numer() as f64 / *b.denom() as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve { k, z0, samples, rows })
}

/// Step-by-step check of the two pathwise lemmas of a `G`-orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceAudit {
    /// First step `m` with `|Z_{m-1}| >= 1` but `|Z_m| < 4|Z_{m-1}| - 2` (or
    /// `< 2|Z_{m-1}|`).
    pub doubling_violation: Option<usize>,
    /// First step `m` with `|Z_m| < 1` but `|Z_{m-1}| > 4 xi_m`.
    pub pre_escape_violation: Option<usize>,
    /// First step with `|Z_m| >= 1`.
    pub first_unit_step: Option<usize>,
    /// Steps where both endpoints were finite and hence checked.
    pub checked_steps: usize,
}

impl DivergenceAudit {
    pub fn clean(&self) -> bool {
        self.doubling_violation.is_none() && self.pre_escape_violation.is_none()
    }
}

/// Audits a stored `G`-orbit. Inequalities are compared with a one-ulp guard.
pub fn divergence_audit(orbit: &Orbit) -> Result<DivergenceAudit> {
    if orbit.family != Family::G {
        return Err(invalid("orbit", "divergence audit applies to family G"));
    }
    let mut audit = DivergenceAudit {
        doubling_violation: None,
        pre_escape_violation: None,
        first_unit_step: None,
        checked_steps: 0,
    };
    if orbit.states[0].abs() >= 1.0 {
        audit.first_unit_step = Some(0);
    }
    for m in 1..orbit.states.len() {
        let (prev, cur) = match (orbit.states[m - 1], orbit.states[m]) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a.abs(), b.abs()),
            (_, cur) => {
                if audit.first_unit_step.is_none() && cur.abs() >= 1.0 {
                    audit.first_unit_step = Some(m);
                }
                break;
            }
        };
        audit.checked_steps += 1;
        if audit.first_unit_step.is_none() && cur >= 1.0 {
            audit.first_unit_step = Some(m);
        }
        if prev >= 1.0 {
            let four = (4.0 * prev - 2.0).next_down();
            let two = (2.0 * prev).next_down();
            if (cur < four || cur < two) && audit.doubling_violation.is_none() {
                audit.doubling_violation = Some(m);
            }
        }
        if cur < 1.0 {
            let xi4 = pow2(2 - orbit.atoms[m - 1].exponent() as i64);
            if prev > xi4.next_up() && audit.pre_escape_violation.is_none() {
                audit.pre_escape_violation = Some(m);
            }
        }
    }
    Ok(audit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterRow {
    pub n: usize,
    /// Empirical `P(diameter > epsilon)`.
    pub p_exceed: f64,
    pub half_width: f64,
    pub median_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackDiameterCurve {
    pub radius: f64,
    pub epsilon: f64,
    pub samples: u64,
    pub rows: Vec<DiameterRow>,
}

fn validate_radius_epsilon(radius: f64, epsilon: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("radius", format!("need 0 < R < inf, got {radius}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("need 0 < eps < inf, got {epsilon}")));
    }
    Ok(())
}

/// Pullback image diameter of `[-R, R]` under `F`: by monotonicity only the
/// endpoints are needed.
pub fn pullback_diameter<P: NoiseSource>(path: &P, radius: f64, n: usize) -> f64 {
    let hi = pullback_state(Family::F, path, radius, n).to_f64();
    let lo = pullback_state(Family::F, path, -radius, n).to_f64();
    hi - lo
}

/// Synchronization curve of `F`: `P(diam phi_n(theta_{-n} omega, [-R, R]) > eps)`.
pub fn pullback_diameter_curve(
    radius: f64,
    epsilon: f64,
    checkpoints: &[usize],
    samples: u64,
    seed: u64,
    ensemble: &Ensemble,
) -> Result<PullbackDiameterCurve> {
    validate_radius_epsilon(radius, epsilon)?;
    validate_samples(samples)?;
    let diameters: Vec<Vec<f64>> = ensemble.map(samples, |i| {
        let path = NoisePath::for_sample(seed, i);
        checkpoints.iter().map(|&n| pullback_diameter(&path, radius, n)).collect()
    });
    let rows = checkpoints
        .iter()
        .enumerate()
        .map(|(c, &n)| {
            let mut column: Vec<f64> = diameters.iter().map(|d| d[c]).collect();
            let exceed = column.iter().filter(|&&d| d > epsilon).count() as u64;
            let e = Estimate::proportion(exceed, samples);
            column.sort_by(f64::total_cmp);
            DiameterRow {
                n,
                p_exceed: e.value,
                half_width: e.half_width,
                median_diameter: median_sorted(&column),
            }
        })
        .collect();
    Ok(PullbackDiameterCurve {
        radius,
        epsilon,
        samples,
        rows,
    })
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// The `G`-forward curve dual to [`pullback_diameter_curve`]:
/// `P(|G_n(eps/2)| < R)`.
///
/// `F`-pullback compositions invert to `G`-forward compositions over the same
/// atoms in reverse order; with i.i.d. atoms
/// `P(diam > eps) = P(phi^F(R) > eps/2) = P(G_n(eps/2) < R)`.
pub fn dual_exceedance_curve(
    radius: f64,
    epsilon: f64,
    checkpoints: &[usize],
    samples: u64,
    seed: u64,
    ensemble: &Ensemble,
) -> Result<Vec<Estimate>> {
    validate_radius_epsilon(radius, epsilon)?;
    validate_samples(samples)?;
    Ok(proportions(checkpoints, samples, seed, ensemble, |path| {
        forward_observe(Family::G, path, 0.5 * epsilon, checkpoints, |z| z.abs() < radius)
    }))
}

/// `d > beta e^{rate m}`, compared in log space once the threshold leaves the
/// normal `f64` range.
fn exceeds(d: WideReal, beta: f64, rate: f64, m: usize) -> bool {
    let t = beta * (rate * m as f64).exp();
    if t >= f64::MIN_POSITIVE && t.is_finite() {
        d.to_ext().abs() > t
    } else {
        d.log2_abs() > beta.log2() + rate * m as f64 / std::f64::consts::LN_2
    }
}

/// First step `m <= n` at which `|phi_m(omega, y) - phi_m(omega, x)| > beta e^{mu m}`.
pub fn stable_set_first_failure<P: NoiseSource>(
    family: Family,
    path: &P,
    x: f64,
    y: f64,
    mu: f64,
    beta: f64,
    n: usize,
) -> Option<usize> {
    if x == y {
        return None;
    }
    let (mut zx, mut zy) = (WideReal::from_f64(x), WideReal::from_f64(y));
    for m in 0..=n {
        if m > 0 {
            let map = MonotoneMap1D::new(family, path.atom(m as i64));
            zx = map.eval_wide(zx);
            zy = map.eval_wide(zy);
        }
        if exceeds(zy.distance(zx), beta, mu, m) {
            return Some(m);
        }
    }
    None
}

/// Whether `y` passes the stable-set test `|phi_m(y) - phi_m(x)| <= beta e^{mu m}`
/// for every `0 <= m <= n`.
pub fn stable_set_probe<P: NoiseSource>(
    family: Family,
    path: &P,
    x: f64,
    y: f64,
    mu: f64,
    beta: f64,
    n: usize,
) -> bool {
    stable_set_first_failure(family, path, x, y, mu, beta, n).is_none()
}

/// Fraction of sample paths on which the stable-set probe still holds at each
/// checkpoint.
#[allow(clippy::too_many_arguments)]
pub fn stable_probe_curve(
    family: Family,
    x: f64,
    y: f64,
    mu: f64,
    beta: f64,
    checkpoints: &[usize],
    samples: u64,
    seed: u64,
    ensemble: &Ensemble,
) -> Result<Vec<Estimate>> {
    validate_samples(samples)?;
    let horizon = checkpoints.iter().copied().max().unwrap_or(0);
    Ok(proportions(checkpoints, samples, seed, ensemble, |path| {
        let fail = stable_set_first_failure(family, path, x, y, mu, beta, horizon);
        checkpoints.iter().map(|&n| fail.is_none_or(|f| f > n)).collect()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnstableProbeReport {
    /// First `m` with `|x_m| > beta e^{-mu m}`: certifies `x0` is not in the
    /// unstable set of `A = 0`.
    pub exit_step: Option<usize>,
    pub horizon: usize,
    /// Last backward-orbit state computed.
    pub last: ExtReal,
}

impl UnstableProbeReport {
    /// No exit up to the horizon.
    pub fn consistent(&self) -> bool {
        self.exit_step.is_none()
    }
}

/// Builds the backward orbit `x_m = map^{-1}(x_{m-1}, xi_{1-m})` (atoms at
/// indices `0, -1, ...`) and checks `|x_m| <= beta e^{-mu m}` for `m <= n`.
pub fn unstable_set_probe<P: NoiseSource>(
    family: Family,
    path: &P,
    x0: f64,
    mu: f64,
    beta: f64,
    n: usize,
) -> UnstableProbeReport {
    let inverse = family.inverse();
    let mut x = WideReal::from_f64(x0);
    for m in 0..=n {
        if m > 0 {
            x = MonotoneMap1D::new(inverse, path.atom(1 - m as i64)).eval_wide(x);
        }
        if exceeds(x.distance(WideReal::Zero), beta, -mu, m) {
            return UnstableProbeReport {
                exit_step: Some(m),
                horizon: n,
                last: x.to_ext(),
            };
        }
    }
    UnstableProbeReport {
        exit_step: None,
        horizon: n,
        last: x.to_ext(),
    }
}

/// Fraction of sample paths on which the unstable-set probe has certified an
/// exit by each checkpoint.
#[allow(clippy::too_many_arguments)]
pub fn unstable_probe_curve(
    family: Family,
    x0: f64,
    mu: f64,
    beta: f64,
    checkpoints: &[usize],
    samples: u64,
    seed: u64,
    ensemble: &Ensemble,
) -> Result<Vec<Estimate>> {
    validate_samples(samples)?;
    let horizon = checkpoints.iter().copied().max().unwrap_or(0);
    Ok(proportions(checkpoints, samples, seed, ensemble, |path| {
        let exit = unstable_set_probe(family, path, x0, mu, beta, horizon).exit_step;
        checkpoints.iter().map(|&n| exit.is_some_and(|e| e <= n)).collect()
    }))
}
