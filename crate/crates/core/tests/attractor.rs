use proptest::prelude::*;
use syncrds::attractor::{
    dual_exceedance_curve, pullback_diameter, pullback_diameter_curve, stable_probe_curve, stable_set_first_failure,
    survival_curve, unstable_probe_curve,
};
use syncrds::{
    divergence_audit, forward_orbit, stable_set_probe, unstable_set_probe, Ensemble, Family, NoisePath, Reflected,
};

fn bound(k: u64, n: usize) -> f64 {
    k as f64 / (k as f64 + n as f64)
}

#[test]
fn survival_respects_bound_for_several_starts() {
    let ens = Ensemble::new(4).unwrap();
    for (k, z0) in [(2u64, 0.3), (3, -0.2), (4, 0.125), (6, 0.02), (10, -0.001)] {
        let c = survival_curve(k, z0, &[0, 1, 10, 100, 1000], 20_000, k, &ens).unwrap();
        assert_eq!(c.rows[0].p_hat, 1.0);
        for r in &c.rows {
            assert_eq!(r.bound, bound(k, r.n));
            let se = (r.p_hat * (1.0 - r.p_hat) / 20_000.0).sqrt();
            assert!(r.p_hat <= r.bound + 3.0 * se, "k={k} z0={z0} n={}: {}", r.n, r.p_hat);
        }
    }
}

#[test]
fn survival_rejects_starts_inside_the_bound_hypothesis() {
    let ens = Ensemble::sequential();
    assert!(survival_curve(4, 0.0625, &[10], 10, 0, &ens).is_err());
    assert!(survival_curve(1, 0.5, &[10], 10, 0, &ens).is_err());
    assert!(survival_curve(4, 0.5, &[10], 0, 0, &ens).is_err());
}

#[test]
fn survival_past_the_f64_underflow_horizon() {
    // contracting orbits leave the f64 range near n = 1075; the estimate must keep following the bound
    let c = survival_curve(4, 0.125, &[2000, 10_000], 100_000, 8, &Ensemble::new(4).unwrap()).unwrap();
    for r in &c.rows {
        let se = (r.p_hat * (1.0 - r.p_hat) / 100_000.0).sqrt();
        assert!(r.p_hat <= r.bound + 3.0 * se, "n={}: {}", r.n, r.p_hat);
    }
}

#[test]
fn pathwise_lemmas_on_many_orbits() {
    for i in 0..2000 {
        let o = forward_orbit(Family::G, &NoisePath::for_sample(12, i), 0.1, 100);
        assert!(divergence_audit(&o).unwrap().clean(), "sample {i}");
    }
    let f = forward_orbit(Family::F, &NoisePath::new(0), 0.1, 10);
    assert!(divergence_audit(&f).is_err());
}

#[test]
fn exceedance_matches_dual_forward_curve() {
    let ens = Ensemble::new(4).unwrap();
    let cps = [10, 100, 1000];
    let c = pullback_diameter_curve(10.0, 1e-6, &cps, 10_000, 21, &ens).unwrap();
    let d = dual_exceedance_curve(10.0, 1e-6, &cps, 10_000, 22, &ens).unwrap();
    for (r, e) in c.rows.iter().zip(&d) {
        let pooled = 3.0 * (r.half_width / 3.0).hypot(e.half_width / 3.0);
        assert!((r.p_exceed - e.value).abs() <= pooled.max(1e-12), "n={}: {} vs {}", r.n, r.p_exceed, e.value);
    }
    assert!(c.rows.windows(2).all(|w| w[1].p_exceed <= w[0].p_exceed));
}

#[test]
fn pullback_diameter_is_pathwise_non_increasing() {
    for i in 0..300 {
        let p = NoisePath::for_sample(30, i);
        let mut prev = f64::INFINITY;
        for n in 0..400 {
            let d = pullback_diameter(&p, 10.0, n);
            assert!(d >= 0.0 && d <= prev, "sample {i} step {n}");
            prev = d;
        }
    }
}

#[test]
fn stable_set_of_g_is_trivial() {
    let ens = Ensemble::new(4).unwrap();
    let mu = -0.5 * std::f64::consts::LN_2;
    let e = stable_probe_curve(Family::G, 0.0, 1e-6, mu, 0.5, &[100, 1000, 10_000], 5000, 40, &ens).unwrap();
    for (n, est) in [100usize, 1000, 10_000].iter().zip(&e) {
        assert!(est.value <= bound(21, *n) + est.half_width, "n={n}: {}", est.value);
    }
    assert!(e.windows(2).all(|w| w[1].value <= w[0].value));
    let p = NoisePath::new(1);
    assert!(stable_set_probe(Family::G, &p, 0.0, 0.0, mu, 0.5, 10_000));
    assert_eq!(stable_set_first_failure(Family::G, &p, 0.0, 0.7, mu, 0.5, 10), Some(0));
}

#[test]
fn stable_and_unstable_probes_agree_on_reflected_paths() {
    let mu = 0.3;
    for i in 0..500 {
        let p = NoisePath::for_sample(50, i);
        let y = 1e-3;
        let stable = stable_set_first_failure(Family::G, &p, 0.0, y, -mu, 0.5, 200);
        let unstable = unstable_set_probe(Family::F, &Reflected(p), y, mu, 0.5, 200);
        assert_eq!(stable, unstable.exit_step, "sample {i}");
        assert_eq!(unstable.consistent(), stable.is_none());
    }
}

#[test]
fn unstable_certification_tracks_survival_complement() {
    let ens = Ensemble::new(4).unwrap();
    let e = unstable_probe_curve(Family::F, 0.01, 0.5, 0.5, &[10, 100, 1000], 10_000, 60, &ens).unwrap();
    for (n, est) in [10usize, 100, 1000].iter().zip(&e) {
        assert!(est.value >= 1.0 - bound(7, *n) - est.half_width, "n={n}: {}", est.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn diameter_is_endpoint_difference(seed: u64, r in 0.1f64..100.0, n in 0usize..100) {
        let p = NoisePath::new(seed);
        let d = pullback_diameter(&p, r, n);
        let hi = syncrds::pullback_state(Family::F, &p, r, n).to_f64();
        let lo = syncrds::pullback_state(Family::F, &p, -r, n).to_f64();
        prop_assert_eq!(d, hi - lo);
        prop_assert_eq!(hi, -lo);
    }

    #[test]
    fn worker_count_is_irrelevant(seed: u64, workers in 1usize..9) {
        let a = survival_curve(3, 0.3, &[5, 50], 300, seed, &Ensemble::sequential()).unwrap();
        let b = survival_curve(3, 0.3, &[5, 50], 300, seed, &Ensemble::new(workers).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
