//! Exact closed-form propagation of each spin branch.
//!
//! Every segment Hamiltonian is linear plus a quadratic term on a single
//! squeeze axis, so each branch evolution `e^{-iHt}` stays in the group
//! `e^{iθ}·D(d)·S(ζ)` with real `ζ`. Conventions:
//!
//! * `D(x) = exp(x a† − x* a)`, so `D(x)D(y) = e^{i Im(x y*)} D(x + y)`.
//! * `S(ζ) = exp(ζ/2 (a² − a†²))` for real `ζ`; `ζ < 0` is the adjoint
//!   `S†(|ζ|)`, i.e. the orthogonal axis.
//! * Branch `s = ±1` is the `σ_z` eigenvalue.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::protocol::{ProtocolSpec, SegmentSpec};
use crate::series::{expm1_over, sinhc3};

/// Sign multiplying the SDF term of the displacement. Fixed against the Fock
/// oracle by `calibration` tests; flipping it breaks engine/oracle fidelity.
pub const SDF_DISPLACEMENT_SIGN: f64 = 1.0;

/// Branch labels in storage order.
pub const BRANCHES: [f64; 2] = [1.0, -1.0];

/// `e^{iθ}·D(d)·S(ζ)` for a single branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTransform {
    pub phase: f64,
    pub disp: Complex64,
    pub squeeze: f64,
}

impl BranchTransform {
    pub const IDENTITY: Self = Self {
        phase: 0.0,
        disp: Complex64 { re: 0.0, im: 0.0 },
        squeeze: 0.0,
    };

    /// `self` applied first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        // S(ζ_b) D(d_a) = D(cosh ζ_b d_a − sinh ζ_b d_a*) S(ζ_b)
        let moved = squeeze_conjugate_displace(next.squeeze, self.disp);
        let (cross, disp) = displace_compose(next.disp, moved);
        Self {
            phase: self.phase + next.phase + cross,
            disp,
            squeeze: self.squeeze + next.squeeze,
        }
    }

    /// Mean phonon number when acting on the vacuum.
    pub fn vacuum_phonons(&self) -> f64 {
        self.disp.norm_sqr() + self.squeeze.sinh().powi(2)
    }

    fn is_finite(&self) -> bool {
        self.phase.is_finite() && self.disp.re.is_finite() && self.disp.im.is_finite() && self.squeeze.is_finite()
    }
}

/// Per-branch transforms: index 0 is `σ_z = +1`, index 1 is `σ_z = −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOperator {
    pub branches: [BranchTransform; 2],
}

impl Default for BranchOperator {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl BranchOperator {
    pub const IDENTITY: Self = Self {
        branches: [BranchTransform::IDENTITY; 2],
    };

    pub fn plus(&self) -> &BranchTransform {
        &self.branches[0]
    }

    pub fn minus(&self) -> &BranchTransform {
        &self.branches[1]
    }

    /// `self` applied first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            branches: [
                self.branches[0].then(&next.branches[0]),
                self.branches[1].then(&next.branches[1]),
            ],
        }
    }

    /// Half the phase difference between the branches.
    pub fn signal_phase(&self) -> f64 {
        (self.branches[0].phase - self.branches[1].phase) / 2.0
    }

    pub fn residual_entanglement(&self) -> f64 {
        let [p, m] = &self.branches;
        (p.disp - m.disp).norm().max((p.squeeze - m.squeeze).abs())
    }
}

/// `D(x)D(y) = e^{i·phase} D(sum)`.
pub fn displace_compose(x: Complex64, y: Complex64) -> (f64, Complex64) {
    ((x * y.conj()).im, x + y)
}

/// Displacement `y'` with `S†(ζ) D(y) S(ζ) = D(y')`.
pub fn squeeze_adjoint_displace(zeta: f64, y: Complex64) -> Complex64 {
    y * zeta.cosh() + y.conj() * zeta.sinh()
}

/// Displacement `y'` with `S(ζ) D(y) S†(ζ) = D(y')`.
fn squeeze_conjugate_displace(zeta: f64, y: Complex64) -> Complex64 {
    squeeze_adjoint_displace(-zeta, y)
}

/// Projects a general complex squeeze parameter onto the engine's axis.
/// Anything with a component off the real line cannot be composed exactly.
pub fn squeeze_on_axis(z: Complex64) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im.abs() > 1e-12 * z.re.abs().max(1.0) {
        return Err(Error::UnsupportedSqueezeAxis(format!("{z}")));
    }
    Ok(z.re)
}

/// Closed-form `e^{-iH t}` of one segment, for both branches.
pub fn closed_form_segment(seg: &SegmentSpec) -> BranchOperator {
    let t = seg.duration;
    let rate = seg.pd();
    let branch = |s: f64| {
        let force = SDF_DISPLACEMENT_SIGN * s * seg.sdf();
        // Heisenberg solution of ḋ = −iβ + rate·d*, with β = η + i·force
        let re = force * expm1_over(rate, t);
        let im = -seg.eta * expm1_over(-rate, t);
        // θ̇ = −η Re d − force Im d integrates to −2η·force·(sinh(rt) − rt)/r²
        let phase = -2.0 * seg.eta * force * rate * t.powi(3) * sinhc3(rate * t);
        BranchTransform {
            phase,
            disp: Complex64::new(re, im),
            squeeze: -rate * t,
        }
    };
    BranchOperator {
        branches: BRANCHES.map(branch),
    }
}

/// Result of composing a whole sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionResult {
    pub op: BranchOperator,
    pub signal_phase: f64,
    pub residual_entanglement: f64,
}

impl CompositionResult {
    pub const DEFAULT_DISENTANGLE_TOL: f64 = 1e-10;

    pub fn from_op(op: BranchOperator) -> Self {
        Self {
            op,
            signal_phase: op.signal_phase(),
            residual_entanglement: op.residual_entanglement(),
        }
    }

    pub fn is_disentangling(&self, tol: f64) -> bool {
        self.residual_entanglement <= tol
    }

    /// Spin-down population for the phase readout `(1 + cos φ)/2`, valid when
    /// the branches coincide.
    pub fn ideal_population(&self) -> f64 {
        ideal_population(self.signal_phase)
    }
}

/// `(1 + cos φ)/2`.
pub fn ideal_population(phase: f64) -> f64 {
    0.5 * (1.0 + phase.cos())
}

/// Exact product in application order (first element acts first).
pub fn compose(ops: &[BranchOperator]) -> Result<CompositionResult> {
    let mut acc = BranchOperator::IDENTITY;
    for (i, op) in ops.iter().enumerate() {
        if !op.branches.iter().all(BranchTransform::is_finite) {
            return Err(Error::UnsupportedSqueezeAxis(format!("operator {i} is not finite")));
        }
        acc = acc.then(op);
    }
    Ok(CompositionResult::from_op(acc))
}

/// Closed-form evolution of a whole protocol.
pub fn compose_protocol(protocol: &ProtocolSpec) -> CompositionResult {
    let op = protocol
        .segments
        .iter()
        .fold(BranchOperator::IDENTITY, |acc, seg| acc.then(&closed_form_segment(seg)));
    CompositionResult::from_op(op)
}

/// Oscillator input the branch transforms act on.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialState {
    #[default]
    Vacuum,
    Fock(usize),
}

/// `|ψ_s⟩ = e^{iθ_s} D(d_s) S(ζ_s) |ψ_i⟩` for one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchState {
    pub sigma_z: f64,
    pub phase: f64,
    pub disp: Complex64,
    pub squeeze: f64,
    pub initial: InitialState,
}

/// Describes the two branch states produced by `result` from `|+⟩|ψ_i⟩`.
pub fn apply_to_state_params(result: &CompositionResult, initial: InitialState) -> [BranchState; 2] {
    let mk = |k: usize| {
        let b = result.op.branches[k];
        BranchState {
            sigma_z: BRANCHES[k],
            phase: b.phase,
            disp: b.disp,
            squeeze: b.squeeze,
            initial,
        }
    };
    [mk(0), mk(1)]
}

/// One sample of the engine-predicted trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    /// Larger of the two branch phonon numbers (vacuum input).
    pub max_branch_phonons: f64,
    /// Spin-averaged phonon number (vacuum input).
    pub mean_phonons: f64,
}

/// Samples the vacuum-input phonon number along the protocol by splitting
/// every segment into `samples_per_segment` equal pieces.
pub fn phonon_trajectory(protocol: &ProtocolSpec, samples_per_segment: usize) -> Vec<TrajectoryPoint> {
    let samples = samples_per_segment.max(1);
    let mut acc = BranchOperator::IDENTITY;
    let mut time = 0.0;
    let mut out = vec![TrajectoryPoint {
        time,
        max_branch_phonons: 0.0,
        mean_phonons: 0.0,
    }];
    for seg in &protocol.segments {
        let piece = SegmentSpec {
            duration: seg.duration / samples as f64,
            ..*seg
        };
        let step = closed_form_segment(&piece);
        for _ in 0..samples {
            acc = acc.then(&step);
            time += piece.duration;
            let [p, m] = acc.branches.map(|b| b.vacuum_phonons());
            out.push(TrajectoryPoint {
                time,
                max_branch_phonons: p.max(m),
                mean_phonons: 0.5 * (p + m),
            });
        }
    }
    out
}

/// Largest vacuum-input branch phonon number along the protocol.
pub fn predicted_max_phonons(protocol: &ProtocolSpec, samples_per_segment: usize) -> f64 {
    phonon_trajectory(protocol, samples_per_segment)
        .iter()
        .map(|p| p.max_branch_phonons)
        .fold(0.0, f64::max)
}
