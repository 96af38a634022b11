//! Heavy-tailed dyadic noise and two-sided noise paths.
//!
//! A single draw is `xi = 2^-k` with `P(k >= j) = 1/(j-1)` for every `j >= 2`,
//! i.e. the atomic law `P(k = j) = 1/(j(j-1))`. Draws are stored by their
//! exponent only; the float `2^-k` is produced by the map layer, which handles
//! exponents beyond the `f64` range.
//!
//! Paths are counter-based: the atom at index `m` is a pure function of
//! `(seed, m)`, so a path can be read at negative indices (pullback) and
//! shifted in O(1), and ensembles can be evaluated in any order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const SEED_SALT: u64 = 0x6a09_e667_f3bc_c909;
const SAMPLE_SALT: u64 = 0xbb67_ae85_84ca_a73b;

/// 2^53, the number of distinct uniforms produced by [`uniform_from_bits`].
const UNIFORM_STEPS: u64 = 1 << 53;

/// One noise draw `xi = 2^-exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NoiseAtom {
    exponent: u64,
}

impl NoiseAtom {
    /// The largest atom, `xi = 1/4`.
    pub const QUARTER: NoiseAtom = NoiseAtom { exponent: 2 };

    pub fn new(exponent: u64) -> Result<Self> {
        if exponent < 2 {
            return Err(crate::error::invalid(
                "exponent",
                format!("dyadic exponent must be >= 2, got {exponent}"),
            ));
        }
        Ok(Self { exponent })
    }

    #[inline]
    pub fn exponent(self) -> u64 {
        self.exponent
    }
}

/// Inverse-CDF sampler: maps `u` in `(0, 1]` to `k = floor(1/u) + 1`.
///
/// With `u` uniform this gives `P(k >= j) = P(u <= 1/(j-1)) = 1/(j-1)`.
pub fn sample_exponent(u: f64) -> Result<u64> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::UniformOutOfRange(u));
    }
    let inv = (1.0 / u).floor();
    // 1/u <= 2^1074 for positive u; saturate rather than wrap for the few
    // subnormal inputs whose reciprocal exceeds u64.
    let floor = if inv >= u64::MAX as f64 { u64::MAX - 1 } else { inv as u64 };
    Ok(floor + 1)
}

/// SplitMix64 finalizer (Stafford variant 13). Bijective on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maps 64 random bits to `u = a / 2^53` with `a` in `1..=2^53`.
#[inline]
pub fn uniform_from_bits(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / UNIFORM_STEPS as f64)
}

/// `floor(1/u) + 1` for `u = a / 2^53`, evaluated in exact integer arithmetic.
#[inline]
fn exponent_from_bits(bits: u64) -> u64 {
    let a = (bits >> 11) + 1;
    UNIFORM_STEPS / a + 1
}

#[inline]
fn path_key(seed: u64) -> u64 {
    mix64(seed ^ SEED_SALT)
}

#[inline]
fn atom_for_key(key: u64, index: i64) -> NoiseAtom {
    let bits = mix64(key.wrapping_add((index as u64).wrapping_mul(GOLDEN_GAMMA)));
    NoiseAtom {
        exponent: exponent_from_bits(bits),
    }
}

/// The atom at `index` of the path with the given seed.
#[inline]
pub fn noise_at(seed: u64, index: i64) -> NoiseAtom {
    atom_for_key(path_key(seed), index)
}

/// Seed of the `sample`-th member of an ensemble rooted at `seed`.
#[inline]
pub fn derive_seed(seed: u64, sample: u64) -> u64 {
    mix64(mix64(seed ^ SAMPLE_SALT).wrapping_add(mix64(sample.wrapping_add(GOLDEN_GAMMA))))
}

/// Two-sided, index-addressable noise sequence `omega = (xi_m)`.
///
/// `shift(r)` realizes the metric dynamical system `theta_r`: reading the
/// shifted path at `m` reads the original at `m + r`.
pub trait NoiseSource: Clone + Send + Sync {
    fn atom(&self, index: i64) -> NoiseAtom;

    #[must_use]
    fn shift(&self, r: i64) -> Self;
}

/// Seeded counter-based path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoisePath {
    seed: u64,
    key: u64,
    offset: i64,
}

impl NoisePath {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            key: path_key(seed),
            offset: 0,
        }
    }

    /// Path of the `sample`-th ensemble member rooted at `seed`.
    pub fn for_sample(seed: u64, sample: u64) -> Self {
        Self::new(derive_seed(seed, sample))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }
}

impl NoiseSource for NoisePath {
    #[inline]
    fn atom(&self, index: i64) -> NoiseAtom {
        atom_for_key(self.key, self.offset.wrapping_add(index))
    }

    #[inline]
    fn shift(&self, r: i64) -> Self {
        Self {
            offset: self.offset.wrapping_add(r),
            ..*self
        }
    }
}

/// A path with explicitly listed atoms, for hand-composed orbits and tests.
///
/// `atoms[i]` sits at index `first + i`; every other index reads `fill`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedPath {
    atoms: Arc<[NoiseAtom]>,
    first: i64,
    fill: NoiseAtom,
    offset: i64,
}

impl ScriptedPath {
    pub fn new(first: i64, atoms: Vec<NoiseAtom>, fill: NoiseAtom) -> Self {
        Self {
            atoms: atoms.into(),
            first,
            fill,
            offset: 0,
        }
    }

    /// Atoms consumed by forward steps `1, 2, ...`, in order.
    pub fn forward(atoms: Vec<NoiseAtom>) -> Self {
        Self::new(1, atoms, NoiseAtom::QUARTER)
    }

    pub fn constant(atom: NoiseAtom) -> Self {
        Self::new(0, Vec::new(), atom)
    }
}

impl NoiseSource for ScriptedPath {
    fn atom(&self, index: i64) -> NoiseAtom {
        let pos = self.offset.wrapping_add(index).wrapping_sub(self.first);
        usize::try_from(pos)
            .ok()
            .and_then(|i| self.atoms.get(i).copied())
            .unwrap_or(self.fill)
    }

    fn shift(&self, r: i64) -> Self {
        Self {
            offset: self.offset.wrapping_add(r),
            ..self.clone()
        }
    }
}

/// Time reversal of a path: index `m` reads the inner path at `1 - m`.
///
/// Forward steps `1, 2, ...` on the inner path and backward steps
/// `0, -1, ...` on the reflection consume the same atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reflected<P>(pub P);

impl<P: NoiseSource> NoiseSource for Reflected<P> {
    #[inline]
    fn atom(&self, index: i64) -> NoiseAtom {
        self.0.atom(1i64.wrapping_sub(index))
    }

    #[inline]
    fn shift(&self, r: i64) -> Self {
        Reflected(self.0.shift(r.wrapping_neg()))
    }
}
