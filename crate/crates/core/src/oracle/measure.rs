//! Readout, phonon number, fidelity and Fisher information of oracle states.

use num_complex::Complex64;

use super::linalg::{inner, norm_sqr, CVector};
use super::SpinFockState;

/// `2⟨ψ↓|ψ↑⟩`: modulus is the branch visibility, argument twice the signal
/// phase.
pub fn branch_overlap(state: &SpinFockState) -> Complex64 {
    inner(state.down.view(), state.up.view()) * 2.0 / state.norm_sqr()
}

/// Spin-down population of the phase readout, `(1 + |w|cos φ)/2` with
/// `φ = arg(w)/2` the signal phase. Reduces to `(1 + cos φ)/2` when the
/// branches coincide up to phase.
pub fn spin_down_population(state: &SpinFockState) -> f64 {
    let w = branch_overlap(state);
    0.5 * (1.0 + w.norm() * (0.5 * w.arg()).cos())
}

/// Population of `|+⟩` after the sequence, `(1 + Re w)/2`.
pub fn plus_population(state: &SpinFockState) -> f64 {
    0.5 * (1.0 + branch_overlap(state).re)
}

fn number_weight(v: &CVector) -> f64 {
    v.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum()
}

/// `⟨a†a⟩` summed over both branches.
pub fn mean_phonon(state: &SpinFockState) -> f64 {
    (number_weight(&state.up) + number_weight(&state.down)) / state.norm_sqr()
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity(a: &SpinFockState, b: &SpinFockState) -> f64 {
    a.inner(b).norm_sqr() / (a.norm_sqr() * b.norm_sqr())
}

/// `H₀ψ` with `H₀ = i(a† − a)` on the truncated space.
fn apply_generator(v: &CVector) -> CVector {
    let d = v.len();
    CVector::from_shape_fn(d, |n| {
        let from_below = if n > 0 { v[n - 1] * (n as f64).sqrt() } else { Complex64::new(0.0, 0.0) };
        let from_above = if n + 1 < d { v[n + 1] * ((n + 1) as f64).sqrt() } else { Complex64::new(0.0, 0.0) };
        Complex64::i() * (from_below - from_above)
    })
}

/// `4 Var(H₀)` for an oscillator-only pure state.
pub fn qfi_oscillator(v: &CVector) -> f64 {
    let norm = norm_sqr(v.view());
    let hv = apply_generator(v);
    let mean = inner(v.view(), hv.view()).re / norm;
    let second = norm_sqr(hv.view()) / norm;
    4.0 * (second - mean * mean).max(0.0)
}

/// `4 Var(H₀)` for a spin ⊗ oscillator pure state, `H₀` acting on the
/// oscillator only.
pub fn qfi_pure(state: &SpinFockState) -> f64 {
    let norm = state.norm_sqr();
    let hu = apply_generator(&state.up);
    let hd = apply_generator(&state.down);
    let mean = (inner(state.up.view(), hu.view()) + inner(state.down.view(), hd.view())).re / norm;
    let second = (norm_sqr(hu.view()) + norm_sqr(hd.view())) / norm;
    4.0 * (second - mean * mean).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::evolve::fock_vector;
    use crate::oracle::gaussian::displaced_squeezed_vacuum;

    #[test]
    fn initial_state_readout() {
        let s = SpinFockState::plus_vacuum(16).unwrap();
        assert_eq!(spin_down_population(&s), 1.0);
        assert_eq!(plus_population(&s), 1.0);
        assert_eq!(mean_phonon(&s), 0.0);
    }

    #[test]
    fn readout_follows_branch_phase() {
        let phi: f64 = 0.3;
        let mut s = SpinFockState::plus_vacuum(16).unwrap();
        s.up.mapv_inplace(|z| z * Complex64::from_polar(1.0, phi));
        s.down.mapv_inplace(|z| z * Complex64::from_polar(1.0, -phi));
        assert!((spin_down_population(&s) - 0.5 * (1.0 + phi.cos())).abs() < 1e-15);
        assert!((plus_population(&s) - 0.5 * (1.0 + (2.0 * phi).cos())).abs() < 1e-15);
    }

    #[test]
    fn fock_qfi() {
        for n in 0..=10 {
            let v = fock_vector(64, n);
            assert!((qfi_oscillator(&v) - (8 * n + 4) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_qfi_is_four() {
        let v = displaced_squeezed_vacuum(Complex64::new(1.3, -0.7), 0.0, 60);
        assert!((qfi_oscillator(&v) - 4.0).abs() < 1e-9);
    }
}
