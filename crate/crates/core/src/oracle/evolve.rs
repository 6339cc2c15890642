//! Exact and Trotterized evolution in the truncated space.
//!
//! Propagators are built per spin block. Blocks that share `(η, force, rate,
//! dt)` are identical, so a protocol run first collects the distinct blocks,
//! exponentiates them (in parallel when enabled) and then applies them.

use std::collections::HashMap;

use ndarray::Array1;
use num_complex::Complex64;

use super::fock::{block_hamiltonian, HamiltonianPart};
use super::linalg::{expm, CMatrix, CVector};
use super::measure::mean_phonon;
use super::{required_dim, OracleConfig, SpinFockState};
use crate::engine::{predicted_max_phonons, BRANCHES};
use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::protocol::{validate_protocol, ProtocolSpec, SegmentSpec};

const MINUS_I: Complex64 = Complex64 { re: 0.0, im: -1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BlockKey {
    eta: u64,
    force: u64,
    rate: u64,
    dt: u64,
    part: u8,
}

impl BlockKey {
    fn new(eta: f64, force: f64, rate: f64, dt: f64, part: HamiltonianPart) -> Self {
        // + 0.0 folds −0.0 into 0.0
        Self {
            eta: (eta + 0.0).to_bits(),
            force: (force + 0.0).to_bits(),
            rate: (rate + 0.0).to_bits(),
            dt: dt.to_bits(),
            part: part as u8,
        }
    }

    fn for_segment(seg: &SegmentSpec, dt: f64, part: HamiltonianPart) -> [Self; 2] {
        BRANCHES.map(|s| Self::new(seg.eta, s * seg.sdf(), seg.pd(), dt, part))
    }

    fn part(&self) -> HamiltonianPart {
        match self.part {
            0 => HamiltonianPart::Full,
            1 => HamiltonianPart::Linear,
            _ => HamiltonianPart::Quadratic,
        }
    }

    fn propagator(&self, dim: usize) -> Result<CMatrix> {
        let f = f64::from_bits;
        let h = block_hamiltonian(f(self.eta), f(self.force), f(self.rate), dim, self.part())?;
        Ok(expm(&h.mapv(|z| z * MINUS_I * f(self.dt))))
    }
}

/// Block propagators `e^{−iH dt}` for one truncation.
#[derive(Debug, Clone)]
pub struct PropagatorCache {
    dim: usize,
    exec: Execution,
    blocks: HashMap<BlockKey, CMatrix>,
}

impl PropagatorCache {
    pub fn new(dim: usize, exec: Execution) -> Self {
        Self {
            dim,
            exec,
            blocks: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn prepare(&mut self, keys: impl IntoIterator<Item = BlockKey>) -> Result<()> {
        let mut missing: Vec<BlockKey> = Vec::new();
        for k in keys {
            if !self.blocks.contains_key(&k) && !missing.contains(&k) {
                missing.push(k);
            }
        }
        let dim = self.dim;
        let built = parallel::map(self.exec, &missing, |k| k.propagator(dim));
        for (k, u) in missing.into_iter().zip(built) {
            self.blocks.insert(k, u?);
        }
        Ok(())
    }

    fn apply(&self, keys: &[BlockKey; 2], state: &SpinFockState) -> SpinFockState {
        let up = self.blocks[&keys[0]].dot(&state.up);
        let down = self.blocks[&keys[1]].dot(&state.down);
        SpinFockState {
            dim: state.dim,
            up,
            down,
        }
    }

    /// Advances `state` through `seg`, split into `pieces` equal steps.
    fn segment_steps(&mut self, state: &SpinFockState, seg: &SegmentSpec, pieces: usize) -> Result<Vec<SpinFockState>> {
        let keys = BlockKey::for_segment(seg, seg.duration / pieces as f64, HamiltonianPart::Full);
        self.prepare(keys)?;
        let mut out = Vec::with_capacity(pieces);
        let mut cur = state.clone();
        for _ in 0..pieces {
            cur = self.apply(&keys, &cur);
            out.push(cur.clone());
        }
        Ok(out)
    }
}

fn check_dims(state: &SpinFockState, config: &OracleConfig) -> Result<()> {
    if state.dim != config.dim {
        return Err(Error::InvalidArgument(format!(
            "state has dim {} but config has dim {}",
            state.dim, config.dim
        )));
    }
    Ok(())
}

fn check_protocol(protocol: &ProtocolSpec) -> Result<()> {
    let v = validate_protocol(protocol);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidProtocol(v.join("; ")))
    }
}

/// `e^{−iH_s t}` applied to each spin block.
pub fn evolve_exact(state: &SpinFockState, seg: &SegmentSpec, config: &OracleConfig) -> Result<SpinFockState> {
    check_dims(state, config)?;
    let mut cache = PropagatorCache::new(config.dim, Execution::Sequential);
    let out = cache.segment_steps(state, seg, 1)?.pop().expect("one step");
    out.check_leakage(config.leakage_tol)?;
    Ok(out)
}

/// `n` first-order Trotter steps: linear part, then quadratic part.
pub fn evolve_trotter(state: &SpinFockState, seg: &SegmentSpec, n: usize, config: &OracleConfig) -> Result<SpinFockState> {
    check_dims(state, config)?;
    if n == 0 {
        return Err(Error::InvalidArgument("Trotter step count must be >= 1".into()));
    }
    let dt = seg.duration / n as f64;
    let lin = BlockKey::for_segment(seg, dt, HamiltonianPart::Linear);
    let quad = BlockKey::for_segment(seg, dt, HamiltonianPart::Quadratic);
    let mut cache = PropagatorCache::new(config.dim, Execution::Sequential);
    cache.prepare(lin.into_iter().chain(quad))?;
    let step = |k: usize| cache.blocks[&quad[k]].dot(&cache.blocks[&lin[k]]);
    let steps = [step(0), step(1)];
    let run = |m: &CMatrix, v: &CVector| (0..n).fold(v.clone(), |acc, _| m.dot(&acc));
    let out = SpinFockState {
        dim: state.dim,
        up: run(&steps[0], &state.up),
        down: run(&steps[1], &state.down),
    };
    out.check_leakage(config.leakage_tol)?;
    Ok(out)
}

/// Evolves `|+⟩|0⟩` through the whole protocol, checking leakage after
/// every segment.
pub fn run_protocol(protocol: &ProtocolSpec, config: &OracleConfig) -> Result<SpinFockState> {
    run_protocol_with(protocol, config, Execution::default())
}

pub fn run_protocol_with(protocol: &ProtocolSpec, config: &OracleConfig, exec: Execution) -> Result<SpinFockState> {
    check_protocol(protocol)?;
    let mut cache = PropagatorCache::new(config.dim, exec);
    let keys: Vec<[BlockKey; 2]> = protocol
        .segments
        .iter()
        .map(|s| BlockKey::for_segment(s, s.duration, HamiltonianPart::Full))
        .collect();
    cache.prepare(keys.iter().flatten().copied())?;
    let mut state = SpinFockState::plus_vacuum(config.dim)?;
    for k in &keys {
        state = cache.apply(k, &state);
        state.check_leakage(config.leakage_tol)?;
    }
    Ok(state)
}

/// Refuses truncations below the sizing rule for the engine-predicted
/// phonon maximum, then runs the protocol.
pub fn simulate_protocol(protocol: &ProtocolSpec, config: &OracleConfig) -> Result<SpinFockState> {
    check_protocol(protocol)?;
    check_sizing(protocol, config.dim)?;
    run_protocol(protocol, config)
}

pub fn check_sizing(protocol: &ProtocolSpec, dim: usize) -> Result<()> {
    let n_max = predicted_max_phonons(protocol, 16);
    let need = required_dim(n_max);
    if dim < need {
        return Err(Error::Truncation {
            dim,
            detail: format!("predicted peak phonon number {n_max:.4} needs dim >= {need}"),
        });
    }
    Ok(())
}

/// One sample of the oracle trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub time: f64,
    pub mean_phonon: f64,
}

/// `⟨a†a⟩` along the protocol from `|+⟩|0⟩`, every segment split into
/// `samples_per_segment` pieces (at least 8).
pub fn trajectory(protocol: &ProtocolSpec, samples_per_segment: usize, config: &OracleConfig) -> Result<Vec<TrajectorySample>> {
    check_protocol(protocol)?;
    if samples_per_segment < 8 {
        return Err(Error::InvalidArgument(format!(
            "samples_per_segment must be >= 8, got {samples_per_segment}"
        )));
    }
    let mut cache = PropagatorCache::new(config.dim, Execution::default());
    let pieces: Vec<[BlockKey; 2]> = protocol
        .segments
        .iter()
        .map(|s| BlockKey::for_segment(s, s.duration / samples_per_segment as f64, HamiltonianPart::Full))
        .collect();
    cache.prepare(pieces.iter().flatten().copied())?;

    let mut state = SpinFockState::plus_vacuum(config.dim)?;
    let mut out = vec![TrajectorySample {
        time: 0.0,
        mean_phonon: mean_phonon(&state),
    }];
    let bounds = protocol.boundaries();
    for (i, (seg, k)) in protocol.segments.iter().zip(&pieces).enumerate() {
        for j in 1..=samples_per_segment {
            state = cache.apply(k, &state);
            state.check_leakage(config.leakage_tol)?;
            let time = if j == samples_per_segment {
                bounds[i + 1]
            } else {
                bounds[i] + seg.duration * j as f64 / samples_per_segment as f64
            };
            out.push(TrajectorySample {
                time,
                mean_phonon: mean_phonon(&state),
            });
        }
    }
    Ok(out)
}

/// Largest sampled `⟨a†a⟩` and where it occurs.
pub fn trajectory_max_phonon(protocol: &ProtocolSpec, samples_per_segment: usize, config: &OracleConfig) -> Result<TrajectorySample> {
    let traj = trajectory(protocol, samples_per_segment, config)?;
    Ok(traj
        .into_iter()
        .fold(TrajectorySample { time: 0.0, mean_phonon: f64::NEG_INFINITY }, |best, p| {
            if p.mean_phonon > best.mean_phonon {
                p
            } else {
                best
            }
        }))
}

/// Fock vector with a single populated level; handy for tests and the CLI.
pub fn fock_vector(dim: usize, n: usize) -> CVector {
    let mut v = Array1::zeros(dim);
    if n < dim {
        v[n] = Complex64::new(1.0, 0.0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::measure::fidelity;
    use crate::protocol::make_single_squeeze;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let cfg = OracleConfig::new(20).unwrap();
        let s = SpinFockState::plus_fock(20, 3).unwrap();
        let out = evolve_exact(&s, &SegmentSpec::free(0.0, 1.3), &cfg).unwrap();
        assert!((1.0 - fidelity(&s, &out)).abs() < 1e-15);
    }

    #[test]
    fn free_field_gives_coherent_state() {
        let cfg = OracleConfig::new(32).unwrap();
        let s = SpinFockState::plus_vacuum(32).unwrap();
        let out = evolve_exact(&s, &SegmentSpec::free(0.01, 1.0), &cfg).unwrap();
        assert!((mean_phonon(&out) - 1e-4).abs() < 1e-12);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_squeeze_phonons() {
        let cfg = OracleConfig::new(160).unwrap();
        let s = SpinFockState::plus_vacuum(160).unwrap();
        let out = evolve_exact(&s, &SegmentSpec::new(0.0, 0, 0.0, 1, 1.0, 1.0), &cfg).unwrap();
        assert!((mean_phonon(&out) - 1f64.sinh().powi(2)).abs() < 1e-9);
    }

    #[test]
    fn leakage_is_reported() {
        let cfg = OracleConfig::new(16).unwrap();
        let s = SpinFockState::plus_vacuum(16).unwrap();
        let err = evolve_exact(&s, &SegmentSpec::new(0.0, 1, 3.0, 0, 0.0, 1.0), &cfg).unwrap_err();
        assert!(err.to_string().contains("truncation too small"));
    }

    #[test]
    fn sizing_rule_rejects_small_dim() {
        let p = make_single_squeeze(0.01, 1.0, 0.5, 2.0, 4.0).unwrap();
        let cfg = OracleConfig::new(16).unwrap();
        assert!(matches!(simulate_protocol(&p, &cfg), Err(Error::Truncation { .. })));
    }

    #[test]
    fn commuting_trotter_is_exact() {
        let cfg = OracleConfig::new(24).unwrap();
        let s = SpinFockState::plus_vacuum(24).unwrap();
        let seg = SegmentSpec::free(0.2, 1.0);
        let a = evolve_exact(&s, &seg, &cfg).unwrap();
        let b = evolve_trotter(&s, &seg, 1, &cfg).unwrap();
        assert!(1.0 - fidelity(&a, &b) < 1e-12);
        assert!(evolve_trotter(&s, &seg, 0, &cfg).is_err());
    }

    #[test]
    fn cache_shares_blocks_between_branches() {
        let seg = SegmentSpec::new(0.01, 1, 1.0, 1, 0.8, 1.0);
        let mut cache = PropagatorCache::new(20, Execution::Sequential);
        cache.prepare(BlockKey::for_segment(&seg, 1.0, HamiltonianPart::Full)).unwrap();
        cache.prepare(BlockKey::for_segment(&seg.reversed(), 1.0, HamiltonianPart::Full)).unwrap();
        // reversing the SDF swaps the force between branches, the PD sign is new
        assert_eq!(cache.len(), 4);
        let msp = crate::protocol::make_msp(0.01, 1.0, 0.8, 1.0).unwrap();
        let mut cache = PropagatorCache::new(20, Execution::Sequential);
        cache
            .prepare(msp.segments.iter().flat_map(|s| BlockKey::for_segment(s, 1.0, HamiltonianPart::Full)))
            .unwrap();
        assert_eq!(cache.len(), 4);
    }
}
