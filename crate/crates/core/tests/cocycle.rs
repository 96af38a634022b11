use proptest::prelude::*;
use proptest::strategy::ValueTree;
use syncrds::cocycle::{forward_state, COCYCLE_RTOL};
use syncrds::{
    cocycle_check, forward_orbit, pullback_state, skew_step, ExtReal, Family, MonotoneMap1D, NoiseAtom, NoisePath,
    NoiseSource, ScriptedPath,
};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::G), Just(Family::F)]
}

#[test]
fn ten_thousand_random_cocycle_cases() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strat = (any::<u64>(), family(), -4.0f64..4.0, 0usize..60, 0usize..60);
    let mut failures = 0;
    for _ in 0..10_000 {
        let (seed, fam, z0, s, t) = strat.new_tree(&mut runner).unwrap().current();
        if !cocycle_check(fam, &NoisePath::new(seed), z0, s, t) {
            failures += 1;
        }
    }
    assert_eq!(failures, 0);
}

#[test]
fn orbit_records_every_step() {
    let path = NoisePath::new(99);
    let o = forward_orbit(Family::G, &path, 0.3, 40);
    assert_eq!(o.states.len(), 41);
    assert_eq!(o.states[0], ExtReal::Finite(0.3));
    for m in 1..=40 {
        assert_eq!(o.atoms[m - 1], path.atom(m as i64));
        let expect = MonotoneMap1D::new(Family::G, o.atoms[m - 1]).eval(o.states[m - 1]);
        assert_eq!(o.states[m], expect);
    }
    if let Some(e) = o.escaped_at {
        let sign = o.states[e];
        assert!(o.states[e..].iter().all(|s| *s == sign));
    }
}

#[test]
fn three_quarter_steps_by_hand() {
    let q = NoiseAtom::QUARTER;
    let path = ScriptedPath::forward(vec![q, q, q]);
    let o = forward_orbit(Family::G, &path, 1.0, 3);
    // 1 -> 4 + 1/4 - 2 -> 4*2.25 - 1.75 -> 4*7.25 - 1.75
    assert_eq!(o.states[1..], [2.25.into(), 7.25.into(), 27.25.into()]);
    assert_eq!(o.log2_deriv_sum, 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn skew_product_matches_forward(seed: u64, fam in family(), z0 in -2.0f64..2.0, n in 0usize..50) {
        let mut path = NoisePath::new(seed);
        let mut z = ExtReal::Finite(z0);
        for _ in 0..n {
            let (p, next) = skew_step(fam, &path, z);
            path = p;
            z = next;
        }
        prop_assert_eq!(z, forward_state(fam, &NoisePath::new(seed), z0, n));
        prop_assert_eq!(path.offset(), n as i64);
    }

    #[test]
    fn pullback_reads_the_past(seed: u64, fam in family(), z0 in -2.0f64..2.0, n in 0usize..50) {
        let path = NoisePath::new(seed);
        let mut z = ExtReal::Finite(z0);
        for idx in (1 - n as i64)..=0 {
            z = MonotoneMap1D::new(fam, path.atom(idx)).eval(z);
        }
        prop_assert_eq!(pullback_state(fam, &path, z0, n), z);
    }

    #[test]
    fn g_then_f_pullback_recovers_start(seed: u64, x in -1.0f64..1.0, n in 1usize..30) {
        // push x through G with atoms 0, -1, ..., 1-n, then pull back with F
        let path = NoisePath::new(seed);
        let mut y = ExtReal::Finite(x);
        for j in 0..n as i64 {
            y = MonotoneMap1D::new(Family::G, path.atom(-j)).eval(y);
        }
        if let ExtReal::Finite(y) = y {
            let back = pullback_state(Family::F, &path, y, n);
            prop_assert!(back.approx_eq(ExtReal::Finite(x), COCYCLE_RTOL), "{back:?} vs {x}");
        }
    }

    #[test]
    fn monotonicity_is_transported(seed: u64, fam in family(), a in -3.0f64..3.0, b in -3.0f64..3.0, n in 0usize..40) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let path = NoisePath::new(seed);
        let (flo, fhi) = (forward_state(fam, &path, lo, n), forward_state(fam, &path, hi, n));
        prop_assert!(flo.to_f64() <= fhi.to_f64());
        let (plo, phi) = (pullback_state(fam, &path, lo, n), pullback_state(fam, &path, hi, n));
        prop_assert!(plo.to_f64() <= phi.to_f64());
    }

    #[test]
    fn fixed_point_is_preserved(seed: u64, fam in family(), n in 0usize..200) {
        prop_assert_eq!(forward_state(fam, &NoisePath::new(seed), 0.0, n), ExtReal::Finite(0.0));
    }
}
