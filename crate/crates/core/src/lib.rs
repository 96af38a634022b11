//! Discrete-time random dynamical systems on the real line.
//!
//! The crate implements two iterated-random-map systems driven by i.i.d.
//! heavy-tailed dyadic noise: the map family `G` (negative Lyapunov exponent at
//! the fixed point 0, yet every other orbit diverges) and its inverse family `F`
//! (positive exponent, yet every compact set synchronizes to 0 under pullback).
//!
//! Modules are layered bottom-up:
//!
//! * [`noise`]: exact sampling and counter-based, two-sided noise paths.
//! * [`maps`]: the piecewise-linear maps, their inverses and slopes.
//! * [`cocycle`]: forward/pullback orbits and the cocycle algebra.
//! * [`lyapunov`]: finite-time exponents and integrability diagnostics.
//! * [`attractor`]: survival, synchronization and stable/unstable-set probes.
//! * [`oracle`]: closed-form reference values.
//! * [`ensemble`]: schedule-independent parallel Monte Carlo driver.

pub mod attractor;
pub mod cocycle;
pub mod ensemble;
pub mod error;
pub mod lyapunov;
pub mod maps;
pub mod noise;
pub mod oracle;
pub mod selftest;
pub mod stats;

pub use attractor::{
    divergence_audit, pullback_diameter_curve, stable_set_probe, survival_curve,
    unstable_set_probe, DivergenceAudit, PullbackDiameterCurve, SurvivalCurve,
    UnstableProbeReport,
};
pub use cocycle::{cocycle_check, forward_orbit, pullback_state, skew_step, Orbit};
pub use ensemble::Ensemble;
pub use error::{Error, Result};
pub use lyapunov::{finite_time_lyapunov, integrability_diagnostic, LyapunovEstimate};
pub use maps::{ExtReal, Family, MonotoneMap1D, Sign, Slope, WideReal};
pub use noise::{noise_at, sample_exponent, NoiseAtom, NoisePath, NoiseSource, Reflected, ScriptedPath};
pub use stats::Estimate;

/// Library version echoed into every experiment report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
