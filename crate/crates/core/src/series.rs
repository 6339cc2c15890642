//! Cancellation-free evaluation of the small-argument combinations that
//! appear in the closed forms (`e^x - 1`, `e^x - 1 - x`, `sinh x - x`, ...).

/// `(e^{g t} - 1) / g`, continuous through `g = 0` where it equals `t`.
pub fn expm1_over(g: f64, t: f64) -> f64 {
    if g == 0.0 {
        t
    } else {
        (g * t).exp_m1() / g
    }
}

/// `(e^x - 1 - x) / x²`, equal to `1/2` at `x = 0`.
pub fn exprel2(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        // Horner form of 1/2 + x/6 + x²/24 + x³/120 + x⁴/720 + x⁵/5040
        0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x * (1.0 / 120.0 + x * (1.0 / 720.0 + x / 5040.0))))
    } else {
        (x.exp_m1() - x) / (x * x)
    }
}

/// `(sinh x - x) / x³`, equal to `1/6` at `x = 0`.
pub fn sinhc3(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (1.0 / 5040.0 + x2 * (1.0 / 362_880.0 + x2 / 39_916_800.0)))
    } else {
        (x.sinh() - x) / (x * x * x)
    }
}

/// `sinh(x) / x`, equal to `1` at `x = 0`.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Reduces a phase to `(-π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut p = phase.rem_euclid(TAU);
    if p > PI {
        p -= TAU;
    }
    p
}

/// Removes 2π jumps from a sampled phase sequence so finite differences
/// along a sweep see a continuous curve.
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    use std::f64::consts::TAU;
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in phases {
        if let Some(q) = prev {
            let jump = p - q;
            offset -= TAU * (jump / TAU).round();
        }
        out.push(p + offset);
        prev = Some(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_match_direct_away_from_zero() {
        for &x in &[0.011f64, 0.2, 1.0, -0.7, 3.5] {
            let direct2 = (x.exp() - 1.0 - x) / (x * x);
            assert!((exprel2(x) - direct2).abs() < 1e-10 * direct2.abs());
            let direct3 = (f64::sinh(x) - x) / (x * x * x);
            assert!((sinhc3(x) - direct3).abs() < 1e-9 * direct3.abs());
        }
        // branch boundaries agree from both sides
        assert!((exprel2(0.00999999) - exprel2(0.01)).abs() < 1e-8);
        assert!((sinhc3(0.0999999) - sinhc3(0.1)).abs() < 1e-8);
    }

    #[test]
    fn stable_at_tiny_arguments() {
        let tau = 2.0;
        let g = 1e-12;
        let v = tau * tau * exprel2(g * tau);
        assert!((v - tau * tau / 2.0).abs() <= 1e-6 * tau * tau / 2.0);
        assert_eq!(expm1_over(0.0, 3.0), 3.0);
        assert!((expm1_over(1e-14, 3.0) - 3.0).abs() < 1e-12);
        assert_eq!(sinhc(0.0), 1.0);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw = [3.0, -3.1, -2.9, 3.0];
        let u = unwrap_phases(&raw);
        for w in u.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.5);
        }
        assert!((wrap_phase(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
    }
}
