use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::spectral::{oscillator_function, LandauAnalytics};

/// Lowest-Landau-level continuum propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ContinuumMode {
    /// Discrete `k = 2 pi n / ly` mode sum; periodic in time with period `ly / c_H`.
    FiniteLy { ly: f64 },
    /// Closed form for an infinitely long strip.
    Infinite,
}

/// Relative Gaussian weight below which finite-`ly` modes are dropped.
pub const MODE_WEIGHT_CUTOFF: f64 = 1e-12;

/// `G_0(t, r_i, r_j)` in the Landau gauge of the lattice (`Phi_k ~ exp(i k y)`,
/// orbital centre `-l_B^2 k + U_B l_B / omega_B`). Bulk photons drift toward `+y`,
/// so the magnitude peaks at `y_i - y_j = c_H t`.
pub fn greens_lll(p: &LandauAnalytics, t: f64, ri: (f64, f64), rj: (f64, f64), mode: ContinuumMode) -> C64 {
    match mode {
        ContinuumMode::Infinite => greens_lll_infinite(p, t, ri, rj),
        ContinuumMode::FiniteLy { ly } => greens_lll_finite(p, t, ri, rj, ly),
    }
}

fn greens_lll_infinite(p: &LandauAnalytics, t: f64, ri: (f64, f64), rj: (f64, f64)) -> C64 {
    let lb = p.magnetic_length();
    let ub = p.landau_voltage();
    let dx = ri.0 - rj.0;
    let dy = ri.1 - rj.1;
    let xbar = 0.5 * (ri.0 + rj.0);
    let envelope = p.alpha * (-dx * dx / (4.0 * lb * lb)).exp() * (-0.25 * (ub * t - dy / lb).powi(2)).exp();
    let phase = (ub * lb / p.cyclotron() - xbar) * dy / (lb * lb) - p.channel_frequency(xbar) * t;
    C64::from_polar(envelope, phase)
}

fn greens_lll_finite(p: &LandauAnalytics, t: f64, ri: (f64, f64), rj: (f64, f64), ly: f64) -> C64 {
    let lb = p.magnetic_length();
    let xbar = 0.5 * (ri.0 + rj.0);
    // exp(-(xbar - x0)^2 / lb^2) >= cutoff
    let reach = lb * (-MODE_WEIGHT_CUTOFF.ln()).sqrt();
    let dk = TAU / ly;
    let k_lo = p.wavevector_at(xbar + reach);
    let k_hi = p.wavevector_at(xbar - reach);
    let n_lo = (k_lo / dk).floor() as i64;
    let n_hi = (k_hi / dk).ceil() as i64;
    let dy = ri.1 - rj.1;
    let mut acc = C64::default();
    for n in n_lo..=n_hi {
        let k = n as f64 * dk;
        let x0 = p.orbital_center(k);
        let amp = oscillator_function(0, ri.0 - x0, lb) * oscillator_function(0, rj.0 - x0, lb);
        acc += C64::from_polar(amp / ly, k * dy - p.channel_frequency(x0) * t);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> LandauAnalytics {
        LandauAnalytics::new(0.1, 0.1).unwrap()
    }

    #[test]
    fn onsite_magnitude_at_time_zero_is_alpha() {
        let p = params();
        let g = greens_lll(&p, 0.0, (5.0, 3.0), (5.0, 3.0), ContinuumMode::Infinite);
        assert!((g.norm() - 0.1).abs() < 1e-15);
        let f = greens_lll(&p, 0.0, (5.0, 3.0), (5.0, 3.0), ContinuumMode::FiniteLy { ly: 400.0 });
        assert!((f.norm() - 0.1).abs() < 1e-9, "{f}");
    }

    #[test]
    fn peak_arrives_after_distance_over_hall_speed() {
        let p = params();
        let dy = 6.0;
        let t_peak = dy / p.hall_speed();
        let at = |t: f64| greens_lll(&p, t, (8.0, dy), (8.0, 0.0), ContinuumMode::Infinite).norm();
        assert!((at(t_peak) - 0.1).abs() < 1e-12);
        assert!(at(t_peak) > at(0.9 * t_peak) && at(t_peak) > at(1.1 * t_peak));
    }

    #[test]
    fn upstream_propagation_is_suppressed() {
        let p = params();
        let lb = p.magnetic_length();
        for t in [0.1, 1.0, 10.0, 100.0] {
            let g = greens_lll(&p, t, (8.0, 0.0), (8.0, 5.0 * lb), ContinuumMode::Infinite);
            assert!(g.norm() / p.alpha < (-25.0f64 / 4.0).exp());
        }
    }

    #[test]
    fn zero_field_limit_does_not_propagate() {
        let p = LandauAnalytics::new(0.1, 0.0).unwrap();
        for t in [0.0, 5.0, 500.0] {
            let g = greens_lll(&p, t, (3.0, 0.0), (3.0, 0.0), ContinuumMode::Infinite);
            assert!((g.norm() - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn long_strip_mode_sum_matches_closed_form() {
        let p = params();
        for &(t, ri, rj) in &[
            (3.0, (10.0, 2.0), (10.5, 0.0)),
            (20.0, (9.0, 4.0), (10.0, 1.0)),
            (40.0, (10.0, 6.0), (10.0, 0.0)),
        ] {
            let a = greens_lll(&p, t, ri, rj, ContinuumMode::Infinite);
            let b = greens_lll(&p, t, ri, rj, ContinuumMode::FiniteLy { ly: 3000.0 });
            assert!((a - b).norm() < 1e-6, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn finite_strip_revives_after_round_trip() {
        let p = params();
        let ly = 60.0;
        let tau = ly / p.hall_speed();
        let at = |t: f64| greens_lll(&p, t, (10.0, 0.0), (10.0, 0.0), ContinuumMode::FiniteLy { ly }).norm();
        assert!(at(0.5 * tau) < 1e-6);
        assert!((at(tau) - 0.1).abs() < 1e-9);
    }
}
