use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest Landau level index for which the Hermite recursion is exercised.
pub const MAX_LEVEL: usize = 10;

/// Continuum (Landau-level) description of the lattice for flux `alpha` and a
/// per-site voltage drop `u0`. Units: `hbar = J = l0 = 1`, `omega_p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauAnalytics {
    pub alpha: f64,
    pub u0: f64,
}

impl LandauAnalytics {
    pub fn new(alpha: f64, u0: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::config(format!("continuum analytics need alpha > 0, got {alpha}")));
        }
        if !u0.is_finite() {
            return Err(Error::config(format!("u0 must be finite, got {u0}")));
        }
        Ok(Self { alpha, u0 })
    }

    /// `l_B = 1 / sqrt(2 pi alpha)`.
    pub fn magnetic_length(&self) -> f64 {
        1.0 / (TAU * self.alpha).sqrt()
    }

    /// `omega_B = 4 pi alpha J`.
    pub fn cyclotron(&self) -> f64 {
        2.0 * TAU * self.alpha
    }

    /// Landau voltage `U_B = u0 * l_B`.
    pub fn landau_voltage(&self) -> f64 {
        self.u0 * self.magnetic_length()
    }

    /// Hall speed `c_H = U_B l_B = u0 / (2 pi alpha)`.
    pub fn hall_speed(&self) -> f64 {
        self.landau_voltage() * self.magnetic_length()
    }

    /// Lower band edge of the tight-binding band, `omega_p - 4J`.
    pub fn band_bottom(&self) -> f64 {
        -4.0
    }

    /// The alternative band-edge constant `omega_p - J/2`, exposed for comparison only.
    pub fn band_bottom_alternative(&self) -> f64 {
        -0.5
    }

    /// Effective mass `hbar / (2 J l0^2)`.
    pub fn effective_mass(&self) -> f64 {
        0.5
    }

    /// Lattice correction `-(omega_B^2 / 32 J)(2 l^2 + 2 l + 1)`.
    pub fn second_order_shift(&self, ell: usize) -> f64 {
        let l = ell as f64;
        -self.cyclotron().powi(2) / 32.0 * (2.0 * l * l + 2.0 * l + 1.0)
    }

    /// Untilted Landau level `omega_b + omega_B (l + 1/2) + omega_l^(2)`.
    pub fn level(&self, ell: usize) -> f64 {
        self.band_bottom() + self.cyclotron() * (ell as f64 + 0.5) + self.second_order_shift(ell)
    }

    /// Drift offset `c_H k - U_B^2 / (2 omega_B)`.
    pub fn drift_offset(&self, k: f64) -> f64 {
        self.hall_speed() * k - self.landau_voltage().powi(2) / (2.0 * self.cyclotron())
    }

    /// Orbital centre `-l_B^2 k + U_B l_B / omega_B` of the mode with wavevector `k`.
    pub fn orbital_center(&self, k: f64) -> f64 {
        let lb = self.magnetic_length();
        -lb * lb * k + self.landau_voltage() * lb / self.cyclotron()
    }

    /// Wavevector whose orbital is centred at `x`.
    pub fn wavevector_at(&self, x: f64) -> f64 {
        let lb = self.magnetic_length();
        (self.landau_voltage() * lb / self.cyclotron() - x) / (lb * lb)
    }

    /// Tilted Landau band `omega_{l k}`.
    pub fn analytic_spectrum(&self, ell: usize, k: f64) -> f64 {
        self.level(ell) + self.drift_offset(k)
    }

    /// Tilted Landau band parameterised by orbital centre.
    pub fn analytic_spectrum_at_x(&self, ell: usize, x: f64) -> f64 {
        self.analytic_spectrum(ell, self.wavevector_at(x))
    }

    /// Channel frequency `omega_ch(x) = omega_0^LL - U_B x / l_B + U_B^2 / (2 omega_B)`.
    pub fn channel_frequency(&self, x: f64) -> f64 {
        let ub = self.landau_voltage();
        self.level(0) - ub * x / self.magnetic_length() + ub * ub / (2.0 * self.cyclotron())
    }

    /// Lattice spacing is below the magnetic length only for `alpha < 1/(2 pi)`.
    pub fn continuum_regime_ok(&self) -> bool {
        self.alpha < 1.0 / TAU
    }

    /// Landau orbital `Phi_{l k}(x, y) = exp(i k y) / sqrt(L_y) * phi_l(x - x_k)`.
    pub fn landau_orbital(&self, ell: usize, k: f64, x: f64, y: f64, ly: f64) -> Result<C64> {
        if ell > MAX_LEVEL {
            return Err(Error::config(format!("Landau level {ell} above supported maximum {MAX_LEVEL}")));
        }
        let amp = oscillator_function(ell, x - self.orbital_center(k), self.magnetic_length());
        Ok(C64::from_polar(amp / ly.sqrt(), k * y))
    }
}

/// Physicists' Hermite polynomial `H_n(u)` by upward recursion.
pub fn hermite(n: usize, u: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * u);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * u * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `2^n n!`
pub fn hermite_norm(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * 2.0 * k as f64)
}

/// Normalized harmonic-oscillator eigenfunction with oscillator length `lb`:
/// `(2^l l! sqrt(pi) lb)^(-1/2) H_l(u / lb) exp(-u^2 / (2 lb^2))`.
pub fn oscillator_function(ell: usize, u: f64, lb: f64) -> f64 {
    let s = u / lb;
    hermite(ell, s) * (-0.5 * s * s).exp() / (hermite_norm(ell) * PI.sqrt() * lb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities_at_alpha_tenth() {
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        // omega_B = 4 pi alpha, l_B = 1/sqrt(2 pi alpha)
        assert!((p.cyclotron() - 1.2566370614359172).abs() < 1e-12);
        assert!((p.magnetic_length() - 1.2615662610100802).abs() < 1e-12);
        assert!((p.landau_voltage() - 0.12615662610100802).abs() < 1e-12);
        assert!((p.hall_speed() - 0.15915494309189535).abs() < 1e-12);
        assert!((p.hall_speed() - p.u0 / (TAU * p.alpha)).abs() < 1e-15);
    }

    #[test]
    fn lowest_level_without_field() {
        let p = LandauAnalytics::new(0.1, 0.0).unwrap();
        let wb = p.cyclotron();
        let expected = -4.0 + wb / 2.0 - wb * wb / 32.0;
        assert!((p.analytic_spectrum(0, 0.37) - expected).abs() < 1e-14);
        assert!((p.second_order_shift(0) + wb * wb / 32.0).abs() < 1e-15);
    }

    #[test]
    fn x_and_k_parameterisations_agree() {
        let p = LandauAnalytics::new(0.1, 0.05).unwrap();
        for x in [0.0, 3.5, 12.0] {
            let k = p.wavevector_at(x);
            assert!((p.orbital_center(k) - x).abs() < 1e-12);
            assert!((p.analytic_spectrum_at_x(0, x) - p.channel_frequency(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 0.7), 1.0);
        assert_eq!(hermite(1, 0.7), 1.4);
        assert!((hermite(3, 0.7) - (8.0 * 0.343 - 12.0 * 0.7)).abs() < 1e-12);
        assert_eq!(hermite_norm(3), 48.0);
    }

    #[test]
    fn orbitals_are_normalized_and_orthogonal_on_the_grid() {
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        let ly = 40.0;
        let k = p.wavevector_at(20.0);
        let (mut n0, mut n1, mut overlap) = (0.0, 0.0, C64::default());
        for y in 0..40 {
            for x in 0..41 {
                let a = p.landau_orbital(0, k, x as f64, y as f64, ly).unwrap();
                let b = p.landau_orbital(1, k, x as f64, y as f64, ly).unwrap();
                n0 += a.norm_sqr();
                n1 += b.norm_sqr();
                overlap += a.conj() * b;
            }
        }
        assert!((n0 - 1.0).abs() < 1e-3, "{n0}");
        assert!((n1 - 1.0).abs() < 1e-3, "{n1}");
        assert!(overlap.norm() < 1e-6, "{overlap}");
        assert!(p.landau_orbital(11, k, 0.0, 0.0, ly).is_err());
    }

    #[test]
    fn first_excited_orbital_has_a_node_at_its_centre() {
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        let k = p.wavevector_at(7.0);
        assert!(p.landau_orbital(1, k, 7.0, 0.0, 10.0).unwrap().norm() < 1e-15);
        let peak = p.landau_orbital(0, k, 7.0, 0.0, 10.0).unwrap().norm();
        let off = p.landau_orbital(0, k, 8.0, 0.0, 10.0).unwrap().norm();
        assert!(peak > off);
    }
}
