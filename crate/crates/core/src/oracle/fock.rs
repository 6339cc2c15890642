//! Truncated Fock-space operators and the segment Hamiltonians.

use ndarray::Array2;
use num_complex::Complex64;

use super::linalg::CMatrix;
use crate::engine::BRANCHES;
use crate::error::{Error, Result};
use crate::protocol::SegmentSpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Annihilation and creation operators on `dim` levels.
pub fn ladder_ops(dim: usize) -> Result<(CMatrix, CMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("ladder operators need dim >= 2, got {dim}")));
    }
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.t().mapv(|z: Complex64| z.conj());
    Ok((a, ad))
}

/// Which part of the Hamiltonian to build; the Trotter path uses the
/// linear and quadratic parts separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianPart {
    Full,
    Linear,
    Quadratic,
}

/// `H_s = η(a + a†) + s·iα_signed(a† − a) + pd·(ig/2)(a†² − a²)` for
/// `s = +1` (index 0) and `s = −1` (index 1).
pub fn segment_hamiltonian(seg: &SegmentSpec, dim: usize) -> Result<[CMatrix; 2]> {
    segment_hamiltonian_part(seg, dim, HamiltonianPart::Full)
}

pub fn segment_hamiltonian_part(seg: &SegmentSpec, dim: usize, part: HamiltonianPart) -> Result<[CMatrix; 2]> {
    let [hp, hm] = BRANCHES.map(|s| block_hamiltonian(seg.eta, s * seg.sdf(), seg.pd(), dim, part));
    Ok([hp?, hm?])
}

/// One spin block `η(a + a†) + i·force(a† − a) + (i·rate/2)(a†² − a²)`.
pub fn block_hamiltonian(eta: f64, force: f64, rate: f64, dim: usize, part: HamiltonianPart) -> Result<CMatrix> {
    let (a, ad) = ladder_ops(dim)?;
    let mut h = CMatrix::zeros((dim, dim));
    if part != HamiltonianPart::Quadratic {
        h.scaled_add(Complex64::new(eta, 0.0), &(&a + &ad));
        h.scaled_add(I * force, &(&ad - &a));
    }
    if part != HamiltonianPart::Linear {
        h.scaled_add(I * (rate / 2.0), &(ad.dot(&ad) - a.dot(&a)));
    }
    Ok(h)
}
