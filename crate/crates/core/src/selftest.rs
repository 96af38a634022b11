//! Fast invariant suite behind the `selftest` subcommand.

use serde::Serialize;

use crate::attractor::{divergence_audit, pullback_diameter};
use crate::cocycle::{cocycle_check, forward_orbit, forward_state};
use crate::lyapunov::finite_time_lyapunov;
use crate::maps::{f_eval, g_eval, g_eval_raw, ExtReal, Family, MonotoneMap1D};
use crate::noise::{noise_at, NoiseAtom, NoisePath, NoiseSource};
use crate::oracle;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> SelfCheck {
    SelfCheck { name, passed, detail }
}

fn sampler_tail(seed: u64) -> SelfCheck {
    const N: u64 = 200_000;
    let mut tails = [0u64; 11];
    for i in 0..N {
        let k = noise_at(seed, i as i64).exponent();
        for (j, t) in tails.iter_mut().enumerate().skip(2) {
            if k >= j as u64 {
                *t += 1;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (k, &t) in tails.iter().enumerate().skip(2) {
        let p = 1.0 / (k - 1) as f64;
        let se = (p * (1.0 - p) / N as f64).sqrt();
        if se > 0.0 {
            worst = worst.max((t as f64 / N as f64 - p).abs() / se);
        }
    }
    check("sampler-tail-law", worst <= 4.0, format!("max |z| = {worst:.3} over k = 2..10"))
}

fn round_trip(seed: u64) -> SelfCheck {
    let mut worst: f64 = 0.0;
    for i in 0..20_000u64 {
        let bits = crate::noise::mix64(seed ^ i);
        let atom = NoiseAtom::new(2 + bits % 59).expect("k >= 2");
        let z = ((bits >> 8) as f64 / (1u64 << 56) as f64 - 0.5) * 2e6;
        let scale = 1f64.max(z.abs());
        worst = worst.max((f_eval(g_eval_raw(z, atom), atom) - z).abs() / scale);
        worst = worst.max((g_eval_raw(f_eval(z, atom), atom) - z).abs() / scale);
    }
    check("inversion-round-trip", worst <= 1e-9, format!("max rel err = {worst:e}"))
}

fn cocycle(seed: u64) -> SelfCheck {
    let mut failures = 0;
    for i in 0..2_000u64 {
        let p = NoisePath::for_sample(seed, i);
        let fam = if i % 2 == 0 { Family::G } else { Family::F };
        let z0 = (i % 97) as f64 / 50.0 - 1.0;
        if !cocycle_check(fam, &p, z0, (i % 13) as usize, (i % 29) as usize) {
            failures += 1;
        }
    }
    check("cocycle-law", failures == 0, format!("{failures} failures / 2000"))
}

fn lemmas(seed: u64) -> SelfCheck {
    let mut violations = 0;
    for i in 0..2_000u64 {
        let o = forward_orbit(Family::G, &NoisePath::for_sample(seed, i), 0.1, 100);
        match divergence_audit(&o) {
            Ok(a) if a.clean() => {}
            _ => violations += 1,
        }
    }
    check("pathwise-lemmas", violations == 0, format!("{violations} dirty orbits / 2000"))
}

fn exponent_exactness(seed: u64) -> SelfCheck {
    let mut bad = 0;
    for i in 0..50u64 {
        let p = NoisePath::for_sample(seed, i);
        for n in [1usize, 10, 1000] {
            for fam in [Family::G, Family::F] {
                match finite_time_lyapunov(fam, &p, 0.0, n) {
                    Ok(e) if e.value == oracle::exact_exponent(fam) => {}
                    _ => bad += 1,
                }
            }
        }
    }
    check("fixed-point-exponent", bad == 0, format!("{bad} inexact estimates"))
}

fn pullback_monotone(seed: u64) -> SelfCheck {
    let mut bad = 0;
    for i in 0..100u64 {
        let p = NoisePath::for_sample(seed, i);
        let mut prev = pullback_diameter(&p, 10.0, 0);
        for n in 1..=200 {
            let d = pullback_diameter(&p, 10.0, n);
            if d > prev {
                bad += 1;
                break;
            }
            prev = d;
        }
    }
    check("pullback-monotone", bad == 0, format!("{bad} non-monotone paths / 100"))
}

fn duality(seed: u64) -> SelfCheck {
    // g_{xi_{-n+1}} o ... o g_{xi_0} followed by the F-pullback
    // f_{xi_0} o ... o f_{xi_{-n+1}} is the identity; escaped inputs skipped.
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for i in 0..2_000u64 {
        let p = NoisePath::for_sample(seed, i);
        let x = ((i % 201) as f64 - 100.0) * 1e-3;
        let n = 1 + (i % 20) as usize;
        let mut y = ExtReal::Finite(x);
        for m in 0..n {
            y = MonotoneMap1D::new(Family::G, p.atom(-(m as i64))).eval(y);
        }
        let Some(y) = y.finite() else {
            skipped += 1;
            continue;
        };
        let back = crate::cocycle::pullback_state(Family::F, &p, y, n).to_f64();
        worst = worst.max((back - x).abs() / 1f64.max(x.abs()));
    }
    check(
        "f-g-duality",
        worst <= 1e-9,
        format!("max rel err = {worst:e} ({skipped} escaped inputs skipped)"),
    )
}

fn oracle_telescoping() -> SelfCheck {
    let mut ok = true;
    for k in 2..=6u64 {
        let mut prod = num_rational::Ratio::from_integer(1u64);
        for m in 1..=500u64 {
            prod *= num_rational::Ratio::new(k + m - 1, k + m);
            ok &= oracle::survival_bound(k, m).map(|b| b == prod).unwrap_or(false);
        }
    }
    check("survival-telescoping", ok, "k = 2..6, n <= 500".into())
}

fn escape_sign() -> SelfCheck {
    let p = NoisePath::new(0);
    let up = forward_state(Family::G, &p, 1.0, 100);
    let down = forward_state(Family::G, &p, -1.0, 100);
    let ok = up == g_eval(1e12, NoiseAtom::QUARTER) && down == g_eval(-1e12, NoiseAtom::QUARTER);
    check("escape-sign", ok, format!("{up:?} / {down:?}"))
}

/// Runs every check; the suite passes iff every entry passes.
pub fn run(seed: u64) -> Vec<SelfCheck> {
    vec![
        sampler_tail(seed),
        round_trip(seed),
        cocycle(seed),
        lemmas(seed),
        exponent_exactness(seed),
        pullback_monotone(seed),
        duality(seed),
        oracle_telescoping(),
        escape_sign(),
    ]
}
