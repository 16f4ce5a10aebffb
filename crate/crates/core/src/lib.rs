//! Finite-volume toolkit for symbolic dynamics and thermodynamic
//! formalism on subshifts: admissibility oracles, summable-variation
//! potentials, cocycles, specification kernels with DLR residual checks,
//! entropy of finite partitions, exact 1D pressure via transfer matrices,
//! and block-involution generators with Radon-Nikodym density checks.

pub mod config;
pub mod entropy;
pub mod equilibrium1d;
pub mod error;
pub mod gibbs;
pub mod homoclinic;
pub mod lattice;
pub mod potentials;
pub mod shiftspace;

pub use error::{Error, Result};

/// Default cap for pattern enumeration; override per call or through the
/// `GIBBSWORKS_CAP` environment variable in the CLI.
pub const DEFAULT_CAP: u64 = 1 << 20;

/// Stable log-sum-exp with max subtraction.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}
