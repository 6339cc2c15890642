//! Pulse sequences: single Hamiltonian segments and the named protocols.

use crate::error::{Error, Result};

/// Optional record of where a field coupling came from: `eta = E·q·z0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldProvenance {
    pub field: f64,
    pub charge: f64,
    pub z0: f64,
}

impl FieldProvenance {
    pub fn eta(&self) -> f64 {
        self.field * self.charge * self.z0
    }
}

/// One constant-Hamiltonian segment
/// `H_s = η(a + a†) + s·sdf_sign·iα(a† − a) + pd_sign·(ig/2)(a†² − a²)`.
///
/// A free evolution is a segment with both signs zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSpec {
    pub eta: f64,
    pub sdf_sign: i8,
    pub alpha: f64,
    pub pd_sign: i8,
    pub g: f64,
    pub duration: f64,
    pub field_provenance: Option<FieldProvenance>,
}

impl SegmentSpec {
    pub fn new(eta: f64, sdf_sign: i8, alpha: f64, pd_sign: i8, g: f64, duration: f64) -> Self {
        Self {
            eta,
            sdf_sign,
            alpha: if sdf_sign == 0 { 0.0 } else { alpha },
            pd_sign,
            g: if pd_sign == 0 { 0.0 } else { g },
            duration,
            field_provenance: None,
        }
    }

    pub fn free(eta: f64, duration: f64) -> Self {
        Self::new(eta, 0, 0.0, 0, 0.0, duration)
    }

    /// Signed SDF amplitude seen by the `σ_z = +1` branch.
    pub fn sdf(&self) -> f64 {
        f64::from(self.sdf_sign) * self.alpha
    }

    /// Signed squeezing rate `pd_sign·g`.
    pub fn pd(&self) -> f64 {
        f64::from(self.pd_sign) * self.g
    }

    /// Same segment with every drive reversed (field untouched).
    pub fn reversed(&self) -> Self {
        Self {
            sdf_sign: -self.sdf_sign,
            pd_sign: -self.pd_sign,
            ..*self
        }
    }

    fn violations(&self, index: usize, out: &mut Vec<String>) {
        let mut push = |msg: &str| out.push(format!("segment {index}: {msg}"));
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            push("duration must be > 0");
        }
        if !(self.alpha >= 0.0) {
            push("alpha must be >= 0");
        }
        if !(self.g >= 0.0) {
            push("g must be >= 0");
        }
        if !self.eta.is_finite() {
            push("eta must be finite");
        }
        if !(-1..=1).contains(&self.sdf_sign) {
            push("sdf_sign must be -1, 0 or +1");
        }
        if !(-1..=1).contains(&self.pd_sign) {
            push("pd_sign must be -1, 0 or +1");
        }
        if (self.sdf_sign == 0) != (self.alpha == 0.0) {
            push("sdf_sign = 0 must coincide with alpha = 0");
        }
        if (self.pd_sign == 0) != (self.g == 0.0) {
            push("pd_sign = 0 must coincide with g = 0");
        }
        if let Some(p) = self.field_provenance {
            if (self.eta - p.eta()).abs() > 1e-12 * self.eta.abs() {
                push("eta inconsistent with E*q*z0");
            }
        }
    }
}

/// An ordered, non-empty list of segments with its total duration.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub name: String,
    pub segments: Vec<SegmentSpec>,
    pub total_t: f64,
}

impl ProtocolSpec {
    /// Builds a protocol whose `total_t` is the sum of its segment durations.
    pub fn from_segments(name: impl Into<String>, segments: Vec<SegmentSpec>) -> Self {
        let total_t = segments.iter().map(|s| s.duration).sum();
        Self {
            name: name.into(),
            segments,
            total_t,
        }
    }

    /// Copy with the field coupling replaced in every segment. Provenance is
    /// dropped because it no longer matches.
    pub fn with_eta(&self, eta: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| SegmentSpec {
                eta,
                field_provenance: None,
                ..*s
            })
            .collect();
        Self {
            name: self.name.clone(),
            segments,
            total_t: self.total_t,
        }
    }

    /// Largest drive strength in the sequence, the scale for finite differences.
    pub fn drive_scale(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.alpha.max(s.g))
            .fold(0.0, f64::max)
    }

    /// Segment start times followed by the total time.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = vec![0.0];
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }
}

/// Single-squeeze protocol: entangle-and-squeeze for `tau`, free evolution for
/// `T - 2 tau`, then the reversed drives for `tau`.
pub fn make_single_squeeze(eta: f64, alpha: f64, g: f64, tau: f64, total: f64) -> Result<ProtocolSpec> {
    if !(tau > 0.0) || !(total > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau and T must be positive (tau = {tau}, T = {total})"
        )));
    }
    if !(alpha >= 0.0) || !(g >= 0.0) {
        return Err(Error::InvalidArgument("alpha and g must be >= 0".into()));
    }
    if 2.0 * tau > total {
        return Err(Error::PulseTooLong {
            two_tau: 2.0 * tau,
            total,
        });
    }
    let sdf = if alpha > 0.0 { 1 } else { 0 };
    let pd = if g > 0.0 { 1 } else { 0 };
    let free = total - 2.0 * tau;
    let mut segments = vec![SegmentSpec::new(eta, sdf, alpha, pd, g, tau)];
    if free > 0.0 {
        segments.push(SegmentSpec::free(eta, free));
    }
    segments.push(SegmentSpec::new(eta, -sdf, alpha, -pd, g, tau));
    Ok(ProtocolSpec {
        name: "single".into(),
        segments,
        total_t: total,
    })
}

/// `(sdf_sign, pd_sign)` for the eight multi-squeezing segments, in time
/// order. Guarded by the engine/oracle calibration tests: with this table the
/// composed evolution is disentangling, returns the squeeze to zero, and
/// accumulates `(ηαT²/2)·sinh²(gT/8)/(gT/8)²`.
pub const MSP_SIGN_TABLE: [(i8, i8); 8] = [
    (1, -1),
    (1, 1),
    (1, 1),
    (1, -1),
    (-1, -1),
    (-1, 1),
    (-1, 1),
    (-1, -1),
];

/// Eight segments of length `tau` following [`MSP_SIGN_TABLE`].
pub fn make_msp(eta: f64, alpha: f64, g: f64, tau: f64) -> Result<ProtocolSpec> {
    make_msp_with_table(eta, alpha, g, tau, &MSP_SIGN_TABLE)
}

/// Same as [`make_msp`] with an explicit sign table.
pub fn make_msp_with_table(
    eta: f64,
    alpha: f64,
    g: f64,
    tau: f64,
    table: &[(i8, i8); 8],
) -> Result<ProtocolSpec> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive (tau = {tau})")));
    }
    if !(alpha >= 0.0) || !(g >= 0.0) {
        return Err(Error::InvalidArgument("alpha and g must be >= 0".into()));
    }
    let segments = table
        .iter()
        .map(|&(sdf, pd)| {
            let sdf = if alpha > 0.0 { sdf } else { 0 };
            let pd = if g > 0.0 { pd } else { 0 };
            SegmentSpec::new(eta, sdf, alpha, pd, g, tau)
        })
        .collect();
    Ok(ProtocolSpec {
        name: "msp".into(),
        segments,
        total_t: 8.0 * tau,
    })
}

/// Lists every broken invariant; an empty list means the protocol is valid.
pub fn validate_protocol(spec: &ProtocolSpec) -> Vec<String> {
    let mut out = Vec::new();
    if spec.segments.is_empty() {
        out.push("protocol has no segments".to_string());
    }
    for (i, s) in spec.segments.iter().enumerate() {
        s.violations(i, &mut out);
    }
    let sum: f64 = spec.segments.iter().map(|s| s.duration).sum();
    if (sum - spec.total_t).abs() > 1e-12 * spec.total_t.abs().max(1.0) {
        out.push("total_T inconsistent".to_string());
    }
    out
}
