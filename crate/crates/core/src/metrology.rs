//! Closed-form sensitivities, phonon budgets, gains and Fisher information,
//! and parameter sweeps.
//!
//! `r = gT/2` for the single-squeeze protocol and `r_m = gT/8` for the
//! multi-squeezing protocol. Gains are `10·log10` of the SQL-to-achieved
//! ratio.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::series::{exprel2, expm1_over, sinhc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Single,
    Msp,
}

impl ProtocolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Single => "single",
            ProtocolKind::Msp => "msp",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(ProtocolKind::Single),
            "msp" => Ok(ProtocolKind::Msp),
            other => Err(Error::InvalidArgument(format!("unknown protocol kind '{other}'"))),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {x}")))
    }
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be >= 0 and finite, got {x}")))
    }
}

/// `Δη = r² / (αT²(e^r − 1 − r))`.
pub fn sens_single(alpha: f64, g: f64, t: f64) -> Result<f64> {
    non_negative("alpha", alpha)?;
    non_negative("g", g)?;
    positive("T", t)?;
    if alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    Ok(1.0 / (alpha * t * t * exprel2(g * t / 2.0)))
}

/// `Δη_e = 2/(αT²)`.
pub fn sens_entanglement_only(alpha: f64, t: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("T", t)?;
    Ok(2.0 / (alpha * t * t))
}

/// `Δη_s = g/(e^r − 1)`, tending to `2/T` as `g → 0`.
pub fn sens_squeeze_only(g: f64, t: f64) -> Result<f64> {
    non_negative("g", g)?;
    positive("T", t)?;
    Ok(1.0 / expm1_over(g, t / 2.0))
}

/// `(G_s, G_e)` with `G_s = 2α(e^r−1−r)/(g(e^r−1))` and
/// `G_e = 2(e^r−1−r)/r²`.
pub fn amp_factors(alpha: f64, g: f64, t: f64) -> Result<(f64, f64)> {
    non_negative("alpha", alpha)?;
    positive("g", g)?;
    positive("T", t)?;
    let r = g * t / 2.0;
    let ge = 2.0 * exprel2(r);
    let gs = 2.0 * alpha * r * r * exprel2(r) / (g * r.exp_m1());
    Ok((gs, ge))
}

/// Peak mean phonon number of the single-squeeze protocol at `τ = T/2`:
/// `η²((e^{−r}−1)/g)² + α²((e^r−1)/g)² + sinh²r`.
pub fn nbar_single(eta: f64, alpha: f64, g: f64, t: f64) -> Result<f64> {
    non_negative("alpha", alpha)?;
    non_negative("g", g)?;
    positive("T", t)?;
    let half = t / 2.0;
    let field = eta * expm1_over(-g, half);
    let force = alpha * expm1_over(g, half);
    Ok(field * field + force * force + (g * half).sinh().powi(2))
}

/// `φ = (ηαT²/2)·sinh²(r_m)/r_m²`.
pub fn msp_phase(eta: f64, alpha: f64, g: f64, t: f64) -> Result<f64> {
    non_negative("alpha", alpha)?;
    non_negative("g", g)?;
    positive("T", t)?;
    Ok(0.5 * eta * alpha * t * t * sinhc(g * t / 8.0).powi(2))
}

/// `Δη_m = 1/(dφ/dη) = 2/(αT²·sinh²(r_m)/r_m²)`.
pub fn msp_sens(alpha: f64, g: f64, t: f64) -> Result<f64> {
    non_negative("alpha", alpha)?;
    non_negative("g", g)?;
    positive("T", t)?;
    if alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    Ok(2.0 / (alpha * t * t * sinhc(g * t / 8.0).powi(2)))
}

/// `max((αT/2)²S², sinh²r_m) + (ηT/2)²S²` with `S = sinh(r_m)/r_m`.
pub fn msp_nbar(eta: f64, alpha: f64, g: f64, t: f64) -> Result<f64> {
    non_negative("alpha", alpha)?;
    non_negative("g", g)?;
    positive("T", t)?;
    let rm = g * t / 8.0;
    let s2 = sinhc(rm).powi(2);
    let force = (alpha * t / 2.0).powi(2) * s2;
    Ok(force.max(rm.sinh().powi(2)) + (eta * t / 2.0).powi(2) * s2)
}

/// Total time at which [`msp_nbar`] reaches `n_bar`.
pub fn msp_time_for_nbar(eta: f64, alpha: f64, g: f64, n_bar: f64) -> Result<f64> {
    positive("n_bar", n_bar)?;
    non_negative("alpha", alpha)?;
    non_negative("g", g)?;
    if alpha == 0.0 && g == 0.0 && eta == 0.0 {
        return Err(Error::InvalidArgument("no drive: phonon number stays 0".into()));
    }
    let f = |t: f64| msp_nbar(eta, alpha, g, t).map(|n| n - n_bar);
    let mut hi = 1.0;
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidArgument(format!("n_bar = {n_bar} not reachable")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Total time at which [`nbar_single`] reaches `n_bar`.
pub fn single_time_for_nbar(eta: f64, alpha: f64, g: f64, n_bar: f64) -> Result<f64> {
    positive("n_bar", n_bar)?;
    let f = |t: f64| nbar_single(eta, alpha, g, t).map(|n| n - n_bar);
    let mut hi = 1.0;
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidArgument(format!("n_bar = {n_bar} not reachable")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Multi-squeezing gain: `10·log10(sinh(r_m)/r_m)` for `g ≤ 4α`, else
/// `10·log10((4α/g)·sinh(r_m)/r_m)`.
pub fn gains_db(alpha: f64, g: f64, t: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    non_negative("g", g)?;
    positive("T", t)?;
    let s = sinhc(g * t / 8.0);
    let ratio = if g <= 4.0 * alpha { s } else { 4.0 * alpha / g * s };
    Ok(10.0 * ratio.log10())
}

/// `k = −ln Δβ / ln n̄`: 0.5 at the SQL, 1 at the HL.
pub fn hl_scaling(delta_beta: f64, n_bar: f64) -> Result<f64> {
    if !(n_bar > 1.0) || !n_bar.is_finite() {
        return Err(Error::ScalingUndefined { n_bar });
    }
    positive("delta_beta", delta_beta)?;
    Ok(-delta_beta.ln() / n_bar.ln())
}

/// Gain bound for successive evolution, `10·log10(4 + 2√2/√n̄)`.
pub fn successive_bound_gain(n_bar: f64) -> Result<f64> {
    positive("n_bar", n_bar)?;
    Ok(10.0 * (4.0 + 2.0 * 2f64.sqrt() / n_bar.sqrt()).log10())
}

/// Closed-form Fisher information for the generator `i(a† − a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QfiKind {
    /// `|N⟩`: `8N + 4`.
    Fock(u32),
    /// Squeezed vacuum with the anti-squeezed quadrature along the
    /// generator: `4e^{2r}`.
    Squeezed(f64),
    /// Upper bound for any pure spin-oscillator state: `16n̄ + 8`.
    Bound(f64),
}

pub fn qfi_closed(kind: QfiKind) -> Result<f64> {
    match kind {
        QfiKind::Fock(n) => Ok(8.0 * f64::from(n) + 4.0),
        QfiKind::Squeezed(r) => {
            if !r.is_finite() {
                return Err(Error::InvalidArgument(format!("r must be finite, got {r}")));
            }
            Ok(4.0 * (2.0 * r).exp())
        }
        QfiKind::Bound(n) => {
            non_negative("n_bar", n)?;
            Ok(16.0 * n + 8.0)
        }
    }
}

/// Row-level signals attached to a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    /// `α = 0`: the single-squeeze row uses the squeezing-only sensitivity.
    SqueezeOnly,
    /// `n̄ ≤ 1`, so `k` is undefined.
    KUndefined,
    /// `Δβ < 1/√n̄`.
    BeatsSql,
    /// Single-squeeze `g > 2α`, where `G_s < 1`.
    GsBelowOne,
    /// Multi-squeezing `g > 4α`, the long-time gain regime.
    LongRegime,
    /// The point could not be evaluated; numeric fields are NaN.
    Invalid,
    /// The requested phonon budget could not be reached.
    Unreachable,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::SqueezeOnly => "squeeze_only",
            Flag::KUndefined => "k_undefined",
            Flag::BeatsSql => "beats_sql",
            Flag::GsBelowOne => "gs_below_one",
            Flag::LongRegime => "long_regime",
            Flag::Invalid => "invalid",
            Flag::Unreachable => "unreachable",
        }
    }
}

/// One evaluated parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub protocol: ProtocolKind,
    pub alpha: f64,
    pub eta: f64,
    pub g: f64,
    pub t: f64,
    pub delta_eta: f64,
    pub delta_beta: f64,
    pub n_bar: f64,
    pub sql: f64,
    pub hl: f64,
    pub gain_db: f64,
    pub k: f64,
    pub flags: Vec<Flag>,
}

impl SensitivityReport {
    fn invalid(protocol: ProtocolKind, alpha: f64, eta: f64, g: f64, t: f64, flag: Flag) -> Self {
        Self {
            protocol,
            alpha,
            eta,
            g,
            t,
            delta_eta: f64::NAN,
            delta_beta: f64::NAN,
            n_bar: f64::NAN,
            sql: f64::NAN,
            hl: f64::NAN,
            gain_db: f64::NAN,
            k: f64::NAN,
            flags: vec![flag],
        }
    }

    /// Evaluates the closed forms of `protocol` at one point. Problems become
    /// flags rather than errors.
    pub fn evaluate(protocol: ProtocolKind, alpha: f64, eta: f64, g: f64, t: f64) -> Self {
        let mut flags = Vec::new();
        let core = match protocol {
            ProtocolKind::Single => {
                let de = match sens_single(alpha, g, t) {
                    Err(Error::AlphaZero) => {
                        flags.push(Flag::SqueezeOnly);
                        sens_squeeze_only(g, t)
                    }
                    other => other,
                };
                if g > 2.0 * alpha {
                    flags.push(Flag::GsBelowOne);
                }
                de.and_then(|de| Ok((de, nbar_single(eta, alpha, g, t)?)))
            }
            ProtocolKind::Msp => {
                if g > 4.0 * alpha {
                    flags.push(Flag::LongRegime);
                }
                msp_sens(alpha, g, t).and_then(|de| Ok((de, msp_nbar(eta, alpha, g, t)?)))
            }
        };
        let (delta_eta, n_bar) = match core {
            Ok(v) => v,
            Err(_) => return Self::invalid(protocol, alpha, eta, g, t, Flag::Invalid),
        };
        let delta_beta = delta_eta * t;
        let sql = 1.0 / n_bar.sqrt();
        let k = match hl_scaling(delta_beta, n_bar) {
            Ok(k) => k,
            Err(_) => {
                flags.push(Flag::KUndefined);
                f64::NAN
            }
        };
        if delta_beta < sql {
            flags.push(Flag::BeatsSql);
        }
        flags.sort();
        Self {
            protocol,
            alpha,
            eta,
            g,
            t,
            delta_eta,
            delta_beta,
            n_bar,
            sql,
            hl: 1.0 / n_bar,
            gain_db: 10.0 * (sql / delta_beta).log10(),
            k,
            flags,
        }
    }

    /// Flags joined with `|`, empty when there are none.
    pub fn flags_label(&self) -> String {
        self.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join("|")
    }
}

/// Second sweep axis: explicit total times, or phonon budgets that are
/// converted to a total time per `g`.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Time(Vec<f64>),
    PhononBudget(Vec<f64>),
}

impl SweepAxis {
    fn values(&self) -> &[f64] {
        match self {
            SweepAxis::Time(v) | SweepAxis::PhononBudget(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub protocol: ProtocolKind,
    pub alpha: f64,
    pub eta: f64,
    pub g_list: Vec<f64>,
    pub axis: SweepAxis,
}

/// Evaluates every grid point, `g` outermost. Output order is the grid
/// order whatever the execution mode.
pub fn sweep(grid: &SweepGrid, exec: Execution) -> Result<Vec<SensitivityReport>> {
    if grid.g_list.is_empty() {
        return Err(Error::InvalidArgument("g list is empty".into()));
    }
    if grid.axis.values().is_empty() {
        return Err(Error::InvalidArgument("T / n_bar list is empty".into()));
    }
    if !grid.alpha.is_finite() || !grid.eta.is_finite() {
        return Err(Error::InvalidArgument("alpha and eta must be finite".into()));
    }
    let points: Vec<(f64, f64)> = grid
        .g_list
        .iter()
        .flat_map(|&g| grid.axis.values().iter().map(move |&x| (g, x)))
        .collect();
    Ok(parallel::map(exec, &points, |&(g, x)| evaluate_point(grid, g, x)))
}

fn evaluate_point(grid: &SweepGrid, g: f64, x: f64) -> SensitivityReport {
    let (p, a, e) = (grid.protocol, grid.alpha, grid.eta);
    let t = match grid.axis {
        SweepAxis::Time(_) => x,
        SweepAxis::PhononBudget(_) => {
            let solved = match p {
                ProtocolKind::Single => single_time_for_nbar(e, a, g, x),
                ProtocolKind::Msp => msp_time_for_nbar(e, a, g, x),
            };
            match solved {
                Ok(t) => t,
                Err(_) => return SensitivityReport::invalid(p, a, e, g, f64::NAN, Flag::Unreachable),
            }
        }
    };
    SensitivityReport::evaluate(p, a, e, g, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_squeeze_sensitivity() {
        assert_relative_eq!(sens_single(1.0, 0.5, 4.0).unwrap(), 0.087_013_199_448_583_3, max_relative = 1e-13);
        assert_relative_eq!(sens_single(1.0, 0.0, 4.0).unwrap(), 0.125, max_relative = 1e-15);
        assert_relative_eq!(sens_single(2.0, 0.5, 4.0).unwrap(), 0.043_506_599_724_291_7, max_relative = 1e-13);
        assert_eq!(sens_single(0.0, 0.5, 4.0), Err(Error::AlphaZero));
        let a = sens_single(1.0, 1e-8, 4.0).unwrap();
        let b = sens_entanglement_only(1.0, 4.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-7);
    }

    #[test]
    fn squeeze_only_and_amplification() {
        assert_relative_eq!(sens_squeeze_only(0.5, 4.0).unwrap(), 0.290_988_353_434_663, max_relative = 1e-13);
        assert_eq!(sens_squeeze_only(0.0, 4.0).unwrap(), 0.5);
        let (gs, ge) = amp_factors(1.0, 0.5, 4.0).unwrap();
        assert_relative_eq!(ge, 1.436_563_656_918_09, max_relative = 1e-13);
        assert_relative_eq!(gs, 1.672_093_172_522_69, max_relative = 1e-12);
        let (_, ge0) = amp_factors(1.0, 1e-9, 4.0).unwrap();
        assert_relative_eq!(ge0, 1.0, max_relative = 1e-8);
        let (gs_long, _) = amp_factors(1.0, 0.5, 200.0).unwrap();
        assert_relative_eq!(gs_long, 4.0, max_relative = 1e-3);
    }

    #[test]
    fn single_squeeze_phonons() {
        assert_relative_eq!(nbar_single(0.01, 1.0, 0.5, 4.0).unwrap(), 13.191_227_444_152_4, max_relative = 1e-12);
        assert_relative_eq!(nbar_single(0.0, 1.0, 0.0, 4.0).unwrap(), 4.0, max_relative = 1e-15);
        assert_relative_eq!(nbar_single(0.0, 0.0, 0.5, 4.0).unwrap(), 1f64.sinh().powi(2), max_relative = 1e-15);
    }

    #[test]
    fn msp_closed_forms() {
        assert_relative_eq!(msp_phase(0.01, 1.0, 0.8, 8.0).unwrap(), 0.394_366_117_798_721, max_relative = 1e-13);
        assert_relative_eq!(msp_sens(1.0, 0.8, 8.0).unwrap(), 0.025_357_147_961_437_8, max_relative = 1e-13);
        let n = msp_nbar(0.0, 1.0, 0.8, 8.0).unwrap();
        assert_relative_eq!(n, 19.718_305_889_936_1, max_relative = 1e-12);
        assert_relative_eq!(msp_phase(0.01, 1.0, 0.0, 8.0).unwrap(), 0.32, max_relative = 1e-15);
        assert_relative_eq!(msp_sens(1.0, 0.0, 8.0).unwrap(), 2.0 / 64.0, max_relative = 1e-15);
        let db = msp_sens(1.0, 0.8, 8.0).unwrap() * 8.0 * n.sqrt();
        assert_relative_eq!(db, 0.8 / 0.8f64.sinh(), max_relative = 1e-12);
        assert_relative_eq!(db, 0.900_793_391_830_785, max_relative = 1e-12);
    }

    #[test]
    fn time_for_budget_round_trips() {
        let t = msp_time_for_nbar(0.0, 1.0, 4.0, 1e3).unwrap();
        assert_relative_eq!(t / 2.0, 4.147_274_726_353_06, max_relative = 1e-12);
        let t = single_time_for_nbar(0.01, 1.0, 0.5, 13.191_227_444_152_4).unwrap();
        assert_relative_eq!(t, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn gains_and_scaling() {
        let t = msp_time_for_nbar(0.0, 1.0, 4.0, 1e3).unwrap();
        assert_relative_eq!(gains_db(1.0, 4.0, t).unwrap(), 8.822_371_948_777_70, max_relative = 1e-11);
        assert_relative_eq!(gains_db(1.0, 1.0, 24.0).unwrap(), 5.236_543_505_261_47, max_relative = 1e-12);
        let below = gains_db(1.0, 4.0 - 1e-12, 8.0).unwrap();
        let above = gains_db(1.0, 4.0 + 1e-12, 8.0).unwrap();
        assert!((below - above).abs() < 1e-10);

        let n = 500.0f64;
        assert_relative_eq!(hl_scaling(1.0 / n.sqrt(), n).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(hl_scaling(1.0 / n, n).unwrap(), 1.0, max_relative = 1e-15);
        let k = hl_scaling(0.5 / n.sqrt(), n).unwrap();
        assert_relative_eq!(k, 0.5 + 2f64.ln() / n.ln(), max_relative = 1e-14);
        assert!(matches!(hl_scaling(0.1, 1.0), Err(Error::ScalingUndefined { .. })));
    }

    #[test]
    fn fisher_information_closed_forms() {
        assert_eq!(qfi_closed(QfiKind::Fock(3)).unwrap(), 28.0);
        assert_relative_eq!(qfi_closed(QfiKind::Squeezed(1.0)).unwrap(), 29.556_224_395_722_6, max_relative = 1e-14);
        assert_eq!(qfi_closed(QfiKind::Bound(2.0)).unwrap(), 40.0);
        assert_relative_eq!(successive_bound_gain(1e6).unwrap(), 6.023_669_753_786_83, max_relative = 1e-12);
        assert_relative_eq!(successive_bound_gain(1e30).unwrap(), 10.0 * 4f64.log10(), max_relative = 1e-12);
    }

    #[test]
    fn sweep_rows_and_flags() {
        let grid = SweepGrid {
            protocol: ProtocolKind::Single,
            alpha: 0.0,
            eta: 0.01,
            g_list: vec![0.5, 1.0],
            axis: SweepAxis::Time(vec![1.0, 2.0, 3.0]),
        };
        let rows = sweep(&grid, Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[0].g, rows[0].t), (0.5, 1.0));
        assert_eq!((rows[3].g, rows[3].t), (1.0, 1.0));
        assert!(rows[0].flags.contains(&Flag::SqueezeOnly));
        assert!(rows[0].flags.contains(&Flag::KUndefined));
        assert!(rows.iter().all(|r| (r.delta_beta - r.delta_eta * r.t).abs() <= 1e-12 * r.delta_beta));

        let empty = SweepGrid {
            g_list: vec![],
            ..grid.clone()
        };
        assert!(sweep(&empty, Execution::Sequential).is_err());
    }
}
