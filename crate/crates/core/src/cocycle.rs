//! Forward and pullback orbits of the cocycle `phi_n(omega, z)`.
//!
//! Step `m` of a forward orbit consumes the atom at path index `m`, so
//! `phi_n(omega, .)` uses indices `1..=n` and the pullback
//! `phi_n(theta_{-n} omega, .)` uses indices `-n+1..=0`.

use serde::{Deserialize, Serialize};

use crate::maps::{ExtReal, Family, MonotoneMap1D};
use crate::noise::{NoiseAtom, NoiseSource};

/// Relative tolerance of [`cocycle_check`].
pub const COCYCLE_RTOL: f64 = 1e-9;

/// A stored trajectory `Z_0, ..., Z_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub family: Family,
    pub initial: f64,
    /// `states[m] = Z_m`; `states.len() == n + 1`.
    pub states: Vec<ExtReal>,
    /// `atoms[m - 1]` is the atom used by step `m`.
    pub atoms: Vec<NoiseAtom>,
    /// Sum of base-2 log slopes over the finite part of the orbit.
    pub log2_deriv_sum: i64,
    /// First step whose state is escaped.
    pub escaped_at: Option<usize>,
}

impl Orbit {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last(&self) -> ExtReal {
        *self.states.last().expect("orbit holds the initial state")
    }

    /// Natural-log derivative sum `sum_m ln |D map(Z_{m-1}, xi_m)|`.
    pub fn log_deriv_sum(&self) -> f64 {
        self.log2_deriv_sum as f64 * std::f64::consts::LN_2
    }

    /// Number of steps that contributed to `log2_deriv_sum`.
    pub fn differentiated_steps(&self) -> usize {
        match self.escaped_at {
            Some(step) => step,
            None => self.steps(),
        }
    }
}

#[inline]
fn step<P: NoiseSource>(family: Family, path: &P, m: i64, z: ExtReal) -> ExtReal {
    MonotoneMap1D::new(family, path.atom(m)).eval(z)
}

/// `phi_n(omega, z0)` with its full history and log-derivative sum.
pub fn forward_orbit<P: NoiseSource>(family: Family, path: &P, z0: f64, n: usize) -> Orbit {
    let mut states = Vec::with_capacity(n + 1);
    let mut atoms = Vec::with_capacity(n);
    let mut log2_sum = 0i64;
    let mut escaped_at = None;
    let mut z = ExtReal::Finite(z0);
    states.push(z);
    for m in 1..=n {
        let atom = path.atom(m as i64);
        let map = MonotoneMap1D::new(family, atom);
        if let ExtReal::Finite(x) = z {
            log2_sum += map.derivative(x).log2;
        }
        z = map.eval(z);
        if escaped_at.is_none() && z.is_escaped() {
            escaped_at = Some(m);
        }
        atoms.push(atom);
        states.push(z);
    }
    Orbit {
        family,
        initial: z0,
        states,
        atoms,
        log2_deriv_sum: log2_sum,
        escaped_at,
    }
}

/// `phi_n(omega, z0)` without storing the history; stops early on escape.
pub fn forward_state<P: NoiseSource>(
    family: Family,
    path: &P,
    z0: impl Into<ExtReal>,
    n: usize,
) -> ExtReal {
    let mut z = z0.into();
    for m in 1..=n {
        if z.is_escaped() {
            break;
        }
        z = step(family, path, m as i64, z);
    }
    z
}

/// `phi_n(theta_{-n} omega, z0)`: atoms `-n+1, ..., 0` applied in increasing
/// index order.
pub fn pullback_state<P: NoiseSource>(
    family: Family,
    path: &P,
    z0: impl Into<ExtReal>,
    n: usize,
) -> ExtReal {
    forward_state(family, &path.shift(-(n as i64)), z0, n)
}

/// Checks `phi_{s+t}(omega, z0) = phi_t(theta_s omega, phi_s(omega, z0))`.
pub fn cocycle_check<P: NoiseSource>(family: Family, path: &P, z0: f64, s: usize, t: usize) -> bool {
    let direct = forward_state(family, path, z0, s + t);
    let mid = forward_state(family, path, z0, s);
    let staged = forward_state(family, &path.shift(s as i64), mid, t);
    direct.approx_eq(staged, COCYCLE_RTOL)
}

/// One step of the skew product `Theta_1(omega, z) = (theta_1 omega, phi_1(omega, z))`.
pub fn skew_step<P: NoiseSource>(family: Family, path: &P, z: ExtReal) -> (P, ExtReal) {
    let next = step(family, path, 1, z);
    (path.shift(1), next)
}
