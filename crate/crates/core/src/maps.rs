//! The piecewise-linear map families and their slopes.
//!
//! Family `G` with parameter `xi = 2^-k`:
//!
//! ```text
//! g(z) = z/2                 |z| <= 2 xi
//!        z/xi + xi - 2       z >  2 xi
//!        z/xi - xi + 2       z < -2 xi
//! ```
//!
//! Family `F` is its exact inverse:
//!
//! ```text
//! f(y) = 2y                  |y| <= xi
//!        xi (y + 2 - xi)     y >  xi
//!        xi (y - 2 + xi)     y < -xi
//! ```
//!
//! Both are odd, so each is evaluated on `|z|` and the sign copied back; this
//! makes oddness exact in floating point. Multiplication and division by `xi`
//! are done by binary-exponent scaling, never through a float `2^-k` that may
//! have underflowed.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error};
use crate::noise::NoiseAtom;

/// Magnitude at which a `G`-orbit is declared escaped.
///
/// Once `|z| >= 1` every further `G` step at least doubles `|z|`, so an orbit
/// past this threshold diverges deterministically.
pub const ESCAPE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Expanding-outside, contracting-at-0 maps (negative exponent at 0).
    G,
    /// Inverses of `G` (positive exponent at 0, synchronizing).
    F,
}

impl Family {
    pub fn inverse(self) -> Family {
        match self {
            Family::G => Family::F,
            Family::F => Family::G,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::G => "G",
            Family::F => "F",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "G" | "g" => Ok(Family::G),
            "F" | "f" => Ok(Family::F),
            other => Err(invalid("family", format!("expected G or F, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    fn of(x: f64) -> Sign {
        if x.is_sign_negative() {
            Sign::Neg
        } else {
            Sign::Pos
        }
    }

    pub fn signum(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
        }
    }
}

/// A state value: finite, or escaped towards `+inf` / `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    Escaped(Sign),
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Escaped(_) => None,
        }
    }

    pub fn is_escaped(self) -> bool {
        matches!(self, ExtReal::Escaped(_))
    }

    /// `|x|`, with escaped states reported as `+inf`.
    pub fn abs(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x.abs(),
            ExtReal::Escaped(_) => f64::INFINITY,
        }
    }

    /// Finite value, or `+-inf` for escaped states.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::Escaped(s) => s.signum() * f64::INFINITY,
        }
    }

    /// Relative agreement within `rtol * max(1, |a|, |b|)`; escaped states
    /// agree iff their signs agree.
    pub fn approx_eq(self, other: ExtReal, rtol: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                a == b || (a - b).abs() <= rtol * 1f64.max(a.abs()).max(b.abs())
            }
            (ExtReal::Escaped(a), ExtReal::Escaped(b)) => a == b,
            _ => false,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::Finite(x)
    }
}

/// A slope that is always an exact power of two, stored as its base-2 log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub log2: i64,
}

impl Slope {
    /// Natural log of the slope.
    pub fn ln(self) -> f64 {
        self.log2 as f64 * LN_2
    }

    /// The slope itself; `inf` or `0` when out of `f64` range.
    pub fn value(self) -> f64 {
        pow2(self.log2)
    }
}

/// `2^e`, exact whenever representable.
pub(crate) fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// Splits a finite positive `x` into `m * 2^e` with `m` in `[1, 2)`.
fn decompose(x: f64) -> (f64, i64) {
    debug_assert!(x > 0.0 && x.is_finite());
    let (x, bias) = if x < f64::MIN_POSITIVE {
        (x * pow2(64), 64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1023u64 << 52));
    (m, e - bias)
}

/// `x * 2^e` for `x >= 0`, rounded once (exact unless the result is subnormal).
pub(crate) fn scale2(x: f64, e: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let (m, ex) = decompose(x);
    let t = ex.saturating_add(e);
    if t > 1023 {
        f64::INFINITY
    } else if t >= -1074 {
        m * pow2(t)
    } else if t == -1075 && m > 1.0 {
        pow2(-1074)
    } else {
        0.0
    }
}

/// `a <= 2^e` for finite `a >= 0`.
fn le_pow2(a: f64, e: i64) -> bool {
    if e > 1023 {
        true
    } else if e < -1074 {
        a == 0.0
    } else {
        a <= pow2(e)
    }
}

fn atom_k(atom: NoiseAtom) -> i64 {
    i64::try_from(atom.exponent()).unwrap_or(i64::MAX)
}

/// `xi` as a float, `0` once it underflows.
fn atom_value(atom: NoiseAtom) -> f64 {
    pow2(-atom_k(atom))
}

fn g_abs(a: f64, atom: NoiseAtom) -> f64 {
    let k = atom_k(atom);
    if le_pow2(a, 1i64.saturating_sub(k)) {
        a * 0.5
    } else {
        (scale2(a, k) - 2.0) + atom_value(atom)
    }
}

fn f_abs(b: f64, atom: NoiseAtom) -> f64 {
    let k = atom_k(atom);
    if le_pow2(b, -k) {
        b * 2.0
    } else {
        scale2((b - atom_value(atom)) + 2.0, k.saturating_neg())
    }
}

/// `g(z, xi)` without the escape threshold (overflows to `+-inf` only past
/// the `f64` range).
pub fn g_eval_raw(z: f64, atom: NoiseAtom) -> f64 {
    g_abs(z.abs(), atom).copysign(z)
}

/// `g(z, xi)`; results of magnitude `>= ESCAPE_THRESHOLD` are `Escaped`.
pub fn g_eval(z: f64, atom: NoiseAtom) -> ExtReal {
    let r = g_eval_raw(z, atom);
    if r.is_nan() || r.abs() >= ESCAPE_THRESHOLD {
        ExtReal::Escaped(Sign::of(z))
    } else {
        ExtReal::Finite(r)
    }
}

/// `f(y, xi) = g^{-1}(y, xi)`. Underflow to zero is possible for huge `k`.
pub fn f_eval(y: f64, atom: NoiseAtom) -> f64 {
    f_abs(y.abs(), atom).copysign(y)
}

/// Slope of `g`: `1/2` on `|z| <= 2 xi` (kinks included), `2^k` outside.
pub fn g_derivative(z: f64, atom: NoiseAtom) -> Slope {
    let k = atom_k(atom);
    if le_pow2(z.abs(), 1i64.saturating_sub(k)) {
        Slope { log2: -1 }
    } else {
        Slope { log2: k }
    }
}

/// Slope of `f`: `2` on `|y| <= xi` (kinks included), `2^-k` outside.
pub fn f_derivative(y: f64, atom: NoiseAtom) -> Slope {
    let k = atom_k(atom);
    if le_pow2(y.abs(), -k) {
        Slope { log2: 1 }
    } else {
        Slope { log2: -k }
    }
}

/// Sup norms of `g(., xi)` and its slope over `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C1Seminorms {
    /// `sup |g| = g(1, xi)`; `inf` once `2^k` overflows.
    pub sup_abs: f64,
    /// `ln sup |Dg| = k ln 2`, exact for every `k`.
    pub sup_deriv_log: f64,
}

pub fn c1_seminorms(atom: NoiseAtom) -> C1Seminorms {
    C1Seminorms {
        sup_abs: g_eval_raw(1.0, atom),
        sup_deriv_log: atom.exponent() as f64 * LN_2,
    }
}

/// A single map of either family with its noise parameter bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneMap1D {
    pub family: Family,
    pub atom: NoiseAtom,
}

impl MonotoneMap1D {
    pub fn new(family: Family, atom: NoiseAtom) -> Self {
        Self { family, atom }
    }

    /// Applies the map. `G` escapes past [`ESCAPE_THRESHOLD`]; escaped input
    /// stays escaped for both families (its magnitude is no longer known).
    pub fn eval(&self, x: ExtReal) -> ExtReal {
        match x {
            ExtReal::Escaped(_) => x,
            ExtReal::Finite(z) => match self.family {
                Family::G => g_eval(z, self.atom),
                Family::F => ExtReal::Finite(f_eval(z, self.atom)),
            },
        }
    }

    /// Applies the map with no escape threshold.
    pub fn eval_raw(&self, z: f64) -> f64 {
        match self.family {
            Family::G => g_eval_raw(z, self.atom),
            Family::F => f_eval(z, self.atom),
        }
    }

    pub fn derivative(&self, z: f64) -> Slope {
        match self.family {
            Family::G => g_derivative(z, self.atom),
            Family::F => f_derivative(z, self.atom),
        }
    }

    pub fn inverse(&self) -> MonotoneMap1D {
        MonotoneMap1D::new(self.family.inverse(), self.atom)
    }

    pub fn inverse_eval(&self, y: ExtReal) -> ExtReal {
        self.inverse().eval(y)
    }
}

/// A state with an unbounded binary exponent: `sign * mant * 2^exp` with
/// `mant` in `[1, 2)`, or zero, or escaped.
///
/// Long contracting orbits leave the `f64` range after about a thousand
/// halvings; in this representation they keep shrinking instead of sticking
/// at an underflowed `0`. Away from underflow every step agrees bit for bit
/// with [`MonotoneMap1D::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WideReal {
    Zero,
    Finite { sign: Sign, mant: f64, exp: i64 },
    Escaped(Sign),
}

impl WideReal {
    pub fn from_f64(x: f64) -> WideReal {
        if x == 0.0 {
            WideReal::Zero
        } else if !x.is_finite() {
            WideReal::Escaped(Sign::of(x))
        } else {
            let (mant, exp) = decompose(x.abs());
            WideReal::Finite {
                sign: Sign::of(x),
                mant,
                exp,
            }
        }
    }

    fn with_magnitude(sign: Sign, a: f64) -> WideReal {
        match WideReal::from_f64(a) {
            WideReal::Finite { mant, exp, .. } => WideReal::Finite { sign, mant, exp },
            WideReal::Escaped(_) => WideReal::Escaped(sign),
            WideReal::Zero => WideReal::Zero,
        }
    }

    /// Nearest `ExtReal`; magnitudes below the `f64` range round to `0`.
    pub fn to_ext(self) -> ExtReal {
        match self {
            WideReal::Zero => ExtReal::Finite(0.0),
            WideReal::Finite { sign, mant, exp } => ExtReal::Finite(scale2(mant, exp) * sign.signum()),
            WideReal::Escaped(s) => ExtReal::Escaped(s),
        }
    }

    pub fn is_escaped(self) -> bool {
        matches!(self, WideReal::Escaped(_))
    }

    /// `log2 |x|`: `-inf` for zero, `+inf` once escaped.
    pub fn log2_abs(self) -> f64 {
        match self {
            WideReal::Zero => f64::NEG_INFINITY,
            WideReal::Finite { mant, exp, .. } => exp as f64 + mant.log2(),
            WideReal::Escaped(_) => f64::INFINITY,
        }
    }

    /// `|x| <= 2^e`.
    fn abs_le_pow2(self, e: i64) -> bool {
        match self {
            WideReal::Zero => true,
            WideReal::Finite { mant, exp, .. } => exp < e || (exp == e && mant == 1.0),
            WideReal::Escaped(_) => false,
        }
    }

    fn scaled(self, e: i64) -> WideReal {
        match self {
            WideReal::Finite { sign, mant, exp } => WideReal::Finite {
                sign,
                mant,
                exp: exp.saturating_add(e),
            },
            other => other,
        }
    }

    /// `|self - other|` as a `WideReal`; escaped operands give `+inf`.
    pub fn distance(self, other: WideReal) -> WideReal {
        let parts = |w: WideReal| match w {
            WideReal::Finite { sign, mant, exp } => Some((mant * sign.signum(), exp)),
            _ => None,
        };
        match (self, other) {
            (WideReal::Escaped(_), _) | (_, WideReal::Escaped(_)) => WideReal::Escaped(Sign::Pos),
            (WideReal::Zero, w) | (w, WideReal::Zero) => match w {
                WideReal::Finite { mant, exp, .. } => WideReal::Finite {
                    sign: Sign::Pos,
                    mant,
                    exp,
                },
                _ => WideReal::Zero,
            },
            _ => {
                let ((a, ea), (b, eb)) = (parts(self).unwrap(), parts(other).unwrap());
                let (hi, lo, e, shift) = if ea >= eb { (a, b, ea, eb - ea) } else { (b, a, eb, ea - eb) };
                let lo = scale2(lo.abs(), shift).copysign(lo);
                WideReal::with_magnitude(Sign::Pos, (hi - lo).abs()).scaled(e)
            }
        }
    }
}

impl From<f64> for WideReal {
    fn from(x: f64) -> Self {
        WideReal::from_f64(x)
    }
}

fn g_wide(z: WideReal, atom: NoiseAtom) -> WideReal {
    let k = atom_k(atom);
    match z {
        WideReal::Finite { sign, mant, exp } => {
            if z.abs_le_pow2(1i64.saturating_sub(k)) {
                z.scaled(-1)
            } else {
                let r = (scale2(mant, exp.saturating_add(k)) - 2.0) + atom_value(atom);
                if r.is_nan() || r >= ESCAPE_THRESHOLD {
                    WideReal::Escaped(sign)
                } else {
                    WideReal::with_magnitude(sign, r)
                }
            }
        }
        other => other,
    }
}

fn f_wide(y: WideReal, atom: NoiseAtom) -> WideReal {
    let k = atom_k(atom);
    match y {
        WideReal::Finite { sign, mant, exp } => {
            if y.abs_le_pow2(k.saturating_neg()) {
                y.scaled(1)
            } else {
                // below 2^-60 the sum rounds to exactly 2 in f64 as well
                let s = if exp < -60 {
                    2.0
                } else {
                    (scale2(mant, exp) - atom_value(atom)) + 2.0
                };
                WideReal::with_magnitude(sign, s).scaled(k.saturating_neg())
            }
        }
        other => other,
    }
}

impl MonotoneMap1D {
    /// [`MonotoneMap1D::eval`] on extended-exponent states.
    pub fn eval_wide(&self, x: WideReal) -> WideReal {
        match self.family {
            Family::G => g_wide(x, self.atom),
            Family::F => f_wide(x, self.atom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(k: u64) -> NoiseAtom {
        NoiseAtom::new(k).unwrap()
    }

    #[test]
    fn pow2_and_scale2_edges() {
        assert_eq!(pow2(0), 1.0);
        assert_eq!(pow2(-1074), f64::from_bits(1));
        assert_eq!(pow2(-1075), 0.0);
        assert_eq!(pow2(1023), f64::MAX / (2.0 - f64::EPSILON));
        assert_eq!(pow2(1024), f64::INFINITY);
        assert_eq!(scale2(3.0, -1), 1.5);
        assert_eq!(scale2(f64::from_bits(1), 1074), 1.0);
        assert_eq!(scale2(f64::from_bits(1), 2000), pow2(926));
        assert_eq!(scale2(f64::from_bits(1), 2200), f64::INFINITY);
        assert_eq!(scale2(1.0, -1075), 0.0);
        assert_eq!(scale2(1.5, -1075), pow2(-1074));
        assert_eq!(scale2(1.0, -2000), 0.0);
    }

    #[test]
    fn decompose_round_trips() {
        for x in [1.0, 0.75, 3.0e100, f64::MIN_POSITIVE, f64::from_bits(12345), 1e-310] {
            let (m, e) = decompose(x);
            assert!((1.0..2.0).contains(&m));
            assert_eq!(scale2(m, e), x);
        }
    }

    #[test]
    fn g_examples() {
        for k in [2, 3, 10, 60, 1074, 1100, 5000] {
            assert_eq!(g_eval(0.0, atom(k)), ExtReal::Finite(0.0));
        }
        // kink: both branches give xi
        for k in [2u64, 5, 30] {
            let xi = pow2(-(k as i64));
            assert_eq!(g_eval(2.0 * xi, atom(k)), ExtReal::Finite(xi));
            let outer = 2.0 * xi / xi + xi - 2.0;
            assert_eq!(outer, xi);
        }
        assert_eq!(g_eval(1.0, atom(2)), ExtReal::Finite(2.25));
        assert_eq!(1.0 / 0.25 + 0.25 - 2.0, 2.25);
        assert_eq!(g_eval(-1.0, atom(2)), ExtReal::Finite(-2.25));
    }

    #[test]
    fn g_escapes_with_sign() {
        assert_eq!(g_eval(1.0, atom(45)), ExtReal::Escaped(Sign::Pos));
        assert_eq!(g_eval(-1.0, atom(45)), ExtReal::Escaped(Sign::Neg));
        assert_eq!(g_eval(1e-300, atom(5000)), ExtReal::Escaped(Sign::Pos));
        assert_eq!(g_eval(-3e11, atom(2)), ExtReal::Escaped(Sign::Neg));
        assert_eq!(g_eval(-2e11, atom(2)), ExtReal::Finite(-799999999998.25));
        // past the float range of xi but still finite and small
        let tiny = f64::from_bits(1);
        assert_eq!(g_eval(tiny, atom(1076)), ExtReal::Finite(2.0));
        assert_eq!(g_eval(tiny, atom(1075)), ExtReal::Finite(0.0));
    }

    #[test]
    fn g_derivative_examples() {
        for k in [2u64, 7, 2000] {
            assert_eq!(g_derivative(0.0, atom(k)).value(), 0.5);
        }
        assert_eq!(g_derivative(1.0, atom(3)).value(), 8.0);
        for k in [2u64, 9] {
            let xi = pow2(-(k as i64));
            assert_eq!(g_derivative(2.0 * xi, atom(k)).value(), 0.5);
            assert_eq!(g_derivative(-2.0 * xi, atom(k)).value(), 0.5);
        }
        assert_eq!(g_derivative(1.0, atom(3000)).log2, 3000);
        assert_eq!(g_derivative(1.0, atom(3000)).value(), f64::INFINITY);
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(0.0, atom(7)), 0.0);
        for k in [2u64, 6, 40] {
            let xi = pow2(-(k as i64));
            assert_eq!(f_eval(xi, atom(k)), 2.0 * xi);
            assert_eq!(xi * (xi + 2.0 - xi), 2.0 * xi);
        }
        assert_eq!(f_eval(2.25, atom(2)), 1.0);
        assert_eq!(f_eval(-2.25, atom(2)), -1.0);
        // product underflows to zero
        assert_eq!(f_eval(1.0, atom(5000)), 0.0);
    }

    #[test]
    fn f_derivative_examples() {
        assert_eq!(f_derivative(0.0, atom(4)).value(), 2.0);
        assert_eq!(f_derivative(1.0, atom(3)).value(), 0.125);
        let z: f64 = 0.3;
        let a = atom(3);
        let y = g_eval(z, a).finite().unwrap();
        assert_eq!(f_derivative(y, a).log2 + g_derivative(z, a).log2, 0);
    }

    #[test]
    fn seminorms() {
        let s = c1_seminorms(atom(2));
        assert_eq!(s.sup_deriv_log, 4f64.ln());
        assert_eq!(s.sup_abs, 2.25);
        let s = c1_seminorms(atom(10));
        assert_eq!(s.sup_deriv_log, 10.0 * LN_2);
        assert_eq!(c1_seminorms(atom(2000)).sup_abs, f64::INFINITY);
    }

    #[test]
    fn map_object_and_inverse() {
        let m = MonotoneMap1D::new(Family::G, atom(2));
        assert_eq!(m.eval(1.0.into()), ExtReal::Finite(2.25));
        assert_eq!(m.inverse_eval(2.25.into()), ExtReal::Finite(1.0));
        assert_eq!(m.inverse().family, Family::F);
        assert_eq!(m.eval(ExtReal::Escaped(Sign::Neg)), ExtReal::Escaped(Sign::Neg));
        assert_eq!("f".parse::<Family>().unwrap(), Family::F);
        assert!("H".parse::<Family>().is_err());
    }

    #[test]
    fn wide_states_match_f64_steps_in_range() {
        for k in [2u64, 3, 7, 40, 1100] {
            for z in [0.0, 0.3, -0.3, 1e-5, 2.0, -7.25, 0.125, 1e11] {
                for fam in [Family::G, Family::F] {
                    let map = MonotoneMap1D::new(fam, atom(k));
                    assert_eq!(map.eval_wide(z.into()).to_ext(), map.eval(z.into()), "{fam} {k} {z}");
                }
            }
        }
    }

    #[test]
    fn wide_states_do_not_underflow() {
        let map = MonotoneMap1D::new(Family::G, atom(2));
        let mut z = WideReal::from_f64(-0.25);
        for _ in 0..3000 {
            z = map.eval_wide(z);
        }
        assert_eq!(z.to_ext(), ExtReal::Finite(-0.0));
        assert_eq!(z.log2_abs(), -3002.0);
        let mut back = z;
        let inv = map.inverse();
        for _ in 0..3000 {
            back = inv.eval_wide(back);
        }
        assert_eq!(back, WideReal::from_f64(-0.25));
    }

    #[test]
    fn wide_distance() {
        let d = WideReal::from_f64(0.75).distance(WideReal::from_f64(-0.25));
        assert_eq!(d.to_ext(), ExtReal::Finite(1.0));
        let halve = MonotoneMap1D::new(Family::G, atom(2));
        let (mut a, mut b) = (WideReal::from_f64(0.375), WideReal::from_f64(0.125));
        for _ in 0..2000 {
            a = halve.eval_wide(a);
            b = halve.eval_wide(b);
        }
        assert_eq!(a.distance(b).log2_abs(), -2002.0);
        assert_eq!(b.distance(WideReal::Zero).log2_abs(), -2003.0);
        assert!(WideReal::Zero.distance(WideReal::Escaped(Sign::Neg)).is_escaped());
    }
}
