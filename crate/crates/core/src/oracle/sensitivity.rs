//! Error-propagation sensitivity from oracle runs.

use super::evolve::run_protocol_with;
use super::measure::spin_down_population;
use super::OracleConfig;
use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::protocol::ProtocolSpec;

const MIN_SLOPE: f64 = 1e-14;

/// `√(P(1−P)) / |dP/dη|` at the protocol's own η, with `dP/dη` from a
/// central difference of half-width `delta` (default `1e-5` times the
/// strongest drive).
pub fn fd_sensitivity(protocol: &ProtocolSpec, config: &OracleConfig, delta: Option<f64>) -> Result<f64> {
    let eta = protocol.segments.first().map_or(0.0, |s| s.eta);
    let scale = protocol.drive_scale();
    let delta = delta.unwrap_or(1e-5 * if scale > 0.0 { scale } else { 1.0 });
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let points = [eta, eta - delta, eta + delta];
    let runs = parallel::map(Execution::default(), &points, |&e| {
        run_protocol_with(&protocol.with_eta(e), config, Execution::Sequential).map(|s| spin_down_population(&s))
    });
    let [p, lo, hi]: [f64; 3] = match runs.into_iter().collect::<Result<Vec<_>>>()?.try_into() {
        Ok(v) => v,
        Err(_) => unreachable!("three runs"),
    };
    let slope = (hi - lo) / (2.0 * delta);
    if slope.abs() < MIN_SLOPE {
        return Err(Error::InsensitiveOperatingPoint { slope: slope.abs() });
    }
    Ok((p * (1.0 - p)).max(0.0).sqrt() / slope.abs())
}
