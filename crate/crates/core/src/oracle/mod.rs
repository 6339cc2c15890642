//! Brute-force ground truth in a truncated Fock space.
//!
//! Each spin branch is a `dim`-level oscillator vector; the spin is kept
//! diagonal in `σ_z`, so every Hamiltonian is a pair of `dim × dim` blocks.

pub mod evolve;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod measure;
pub mod sensitivity;

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use linalg::{inner, norm_sqr, CVector};

pub use evolve::{
    check_sizing, evolve_exact, evolve_trotter, run_protocol, run_protocol_with, simulate_protocol, trajectory,
    trajectory_max_phonon, PropagatorCache, TrajectorySample,
};
pub use measure::{branch_overlap, fidelity, mean_phonon, plus_population, qfi_oscillator, qfi_pure, spin_down_population};
pub use sensitivity::fd_sensitivity;

pub const MIN_DIM: usize = 16;

/// Truncation and tolerance settings for oracle runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub dim: usize,
    pub trotter_steps: usize,
    pub fidelity_tol: f64,
    pub leakage_tol: f64,
}

impl OracleConfig {
    pub const DEFAULT_TROTTER_STEPS: usize = 4096;

    pub fn new(dim: usize) -> Result<Self> {
        if dim < MIN_DIM {
            return Err(Error::Truncation {
                dim,
                detail: format!("oracle needs dim >= {MIN_DIM}"),
            });
        }
        Ok(Self {
            dim,
            trotter_steps: Self::DEFAULT_TROTTER_STEPS,
            fidelity_tol: 1e-8,
            leakage_tol: 1e-8,
        })
    }

    /// Config sized for a protocol whose largest branch phonon number is `n_bar_max`.
    pub fn auto(n_bar_max: f64) -> Self {
        Self::new(auto_dim(n_bar_max)).expect("auto_dim never returns less than MIN_DIM")
    }

    /// Config sized for `protocol` from the engine's exact phonon trajectory.
    pub fn for_protocol(protocol: &crate::protocol::ProtocolSpec) -> Self {
        Self::auto(crate::engine::predicted_max_phonons(protocol, 16))
    }

    pub fn with_trotter_steps(mut self, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("trotter_steps must be >= 1".into()));
        }
        self.trotter_steps = steps;
        Ok(self)
    }
}

/// Smallest truncation accepted for a state with `n_bar_max` phonons:
/// `n̄ + 10√n̄ + 20`.
pub fn required_dim(n_bar_max: f64) -> usize {
    let n = n_bar_max.max(0.0);
    ((n + 10.0 * n.sqrt() + 20.0).ceil() as usize).max(MIN_DIM)
}

/// Truncation chosen when none is given: `2n̄ + 15√n̄ + 50`. Displaced
/// squeezed tails need roughly this much room before the truncated dynamics
/// agree with the closed forms to 1e-8 in fidelity.
pub fn auto_dim(n_bar_max: f64) -> usize {
    let n = n_bar_max.max(0.0);
    ((2.0 * n + 15.0 * n.sqrt() + 50.0).ceil() as usize).max(required_dim(n))
}

/// Spin ⊗ oscillator pure state, `|↑⟩|up⟩ + |↓⟩|down⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinFockState {
    pub dim: usize,
    pub up: CVector,
    pub down: CVector,
}

impl SpinFockState {
    pub fn from_branches(up: CVector, down: CVector) -> Result<Self> {
        if up.len() != down.len() || up.len() < 2 {
            return Err(Error::InvalidArgument("branch vectors must share a length >= 2".into()));
        }
        Ok(Self {
            dim: up.len(),
            up,
            down,
        })
    }

    /// `|+⟩|n⟩`.
    pub fn plus_fock(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::InvalidArgument(format!("Fock level {n} outside dim {dim}")));
        }
        let mut v = Array1::zeros(dim);
        v[n] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_branches(v.clone(), v)
    }

    /// `|+⟩|0⟩`.
    pub fn plus_vacuum(dim: usize) -> Result<Self> {
        Self::plus_fock(dim, 0)
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(self.up.view()) + norm_sqr(self.down.view())
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        inner(self.up.view(), other.up.view()) + inner(self.down.view(), other.down.view())
    }

    /// `|amps[dim−1]|² + |amps[dim−2]|²` of the worse branch.
    pub fn leakage(&self) -> f64 {
        let d = self.dim;
        [&self.up, &self.down]
            .into_iter()
            .map(|v| v[d - 1].norm_sqr() + v[d - 2].norm_sqr())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_leakage(&self, tol: f64) -> Result<()> {
        let leak = self.leakage();
        if leak > tol {
            return Err(Error::Truncation {
                dim: self.dim,
                detail: format!("leakage {leak:e} exceeds {tol:e}"),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizing_rules() {
        assert_eq!(required_dim(0.0), 20);
        // P1: n̄ ≈ 13.19 needs at least 70 levels
        assert_eq!(required_dim(13.191_227_444), 70);
        assert!(required_dim(13.19) > 16);
        assert_eq!(auto_dim(13.191_227_444), 131);
        assert_eq!(auto_dim(19.718_305_89), 157);
        for n in [0.0, 1.0, 13.0, 70.0, 500.0] {
            assert!(auto_dim(n) >= required_dim(n));
        }
    }

    #[test]
    fn config_invariants() {
        assert!(OracleConfig::new(15).is_err());
        let c = OracleConfig::new(16).unwrap();
        assert_eq!(c.trotter_steps, 4096);
        assert_eq!(c.fidelity_tol, 1e-8);
        assert!(c.with_trotter_steps(0).is_err());
    }

    #[test]
    fn plus_vacuum_is_normalized() {
        let s = SpinFockState::plus_vacuum(16).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.leakage(), 0.0);
        assert!(SpinFockState::plus_fock(16, 16).is_err());
    }
}
