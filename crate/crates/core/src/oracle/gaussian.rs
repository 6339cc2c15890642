//! Fock amplitudes of the engine's branch states, `e^{iθ} D(d) S(ζ) |0⟩`.

use ndarray::Array1;
use num_complex::Complex64;

use super::linalg::CVector;
use super::SpinFockState;
use crate::engine::{BranchTransform, CompositionResult};
use crate::error::{Error, Result};

/// Amplitudes `⟨n| D(d) S(ζ) |0⟩` for `n < dim`, from the three-term
/// recurrence of displaced squeezed vacua.
pub fn displaced_squeezed_vacuum(disp: Complex64, squeeze: f64, dim: usize) -> CVector {
    let (ch, sh) = (squeeze.cosh(), squeeze.sinh());
    let gamma = disp * ch + disp.conj() * sh;
    let mut c = Array1::zeros(dim);
    if dim == 0 {
        return c;
    }
    let log_c0 = -0.5 * disp.norm_sqr() - 0.5 * disp.conj() * disp.conj() * squeeze.tanh();
    c[0] = log_c0.exp() / ch.sqrt();
    for n in 0..dim - 1 {
        let prev = if n > 0 { c[n - 1] * sh * (n as f64).sqrt() } else { Complex64::new(0.0, 0.0) };
        c[n + 1] = (gamma * c[n] - prev) / (ch * ((n + 1) as f64).sqrt());
    }
    c
}

/// Vacuum-input branch state with its global phase.
pub fn branch_vector(t: &BranchTransform, dim: usize) -> CVector {
    let phase = Complex64::from_polar(1.0, t.phase);
    displaced_squeezed_vacuum(t.disp, t.squeeze, dim).mapv(|z| z * phase)
}

impl SpinFockState {
    /// The state the engine predicts from `|+⟩|0⟩`.
    pub fn from_engine(result: &CompositionResult, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("dim must be >= 2, got {dim}")));
        }
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let [up, down] = result.op.branches.map(|b| branch_vector(&b, dim).mapv(|z| z * w));
        Self::from_branches(up, down)
    }
}
