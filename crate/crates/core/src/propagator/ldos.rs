use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{hermite, hermite_norm, trapezoid, EigenDecomposition, LandauAnalytics, MAX_LEVEL};

/// Default Lorentzian half-width for broadened mode sums.
pub const DEFAULT_BROADENING: f64 = 0.015;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum LdosMethod {
    Numeric { gamma: f64 },
    Analytic { ell: usize },
}

/// Local density of states at a single site on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdosProfile {
    pub site: (usize, usize),
    pub method: LdosMethod,
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

impl LdosProfile {
    /// `int rho d(omega) / 2 pi` over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.omegas, &self.values) / (2.0 * PI)
    }

    /// Grid frequency of the largest value.
    pub fn peak(&self) -> f64 {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        self.omegas[i]
    }
}

/// `sum_l |f_l(r)|^2 2 gamma / ((w - w_l)^2 + gamma^2)`.
pub fn ldos_numeric(eig: &EigenDecomposition, site: usize, omegas: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if !(gamma > 0.0) {
        return Err(Error::config(format!("broadening must satisfy gamma > 0, got {gamma}")));
    }
    let weights: Vec<(f64, f64)> = (0..eig.dim())
        .map(|l| (eig.omegas()[l], eig.amplitude(l, site).norm_sqr()))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    Ok(omegas
        .iter()
        .map(|&w| {
            weights
                .iter()
                .map(|&(wl, f2)| f2 * 2.0 * gamma / ((w - wl).powi(2) + gamma * gamma))
                .sum()
        })
        .collect())
}

/// Continuum LDOS of Landau level `ell` at column `x`:
/// `2 sqrt(pi) alpha / (2^l l! U_B) H_l(s)^2 exp(-s^2)`, with
/// `s = (w - w_ch(x) - l w_B) / U_B`.
pub fn ldos_analytic(p: &LandauAnalytics, ell: usize, x: f64, omega: f64) -> Result<f64> {
    if ell > MAX_LEVEL {
        return Err(Error::config(format!("Landau level {ell} above supported maximum {MAX_LEVEL}")));
    }
    let ub = p.landau_voltage();
    if !(ub > 0.0) {
        return Err(Error::config("analytic LDOS needs U_B > 0; it collapses to a delta function at zero field"));
    }
    let s = (omega - p.channel_frequency(x) - ell as f64 * p.cyclotron()) / ub;
    let h = hermite(ell, s);
    Ok(2.0 * PI.sqrt() * p.alpha / (hermite_norm(ell) * ub) * h * h * (-s * s).exp())
}

pub fn ldos(
    eig: Option<&EigenDecomposition>,
    params: &LandauAnalytics,
    nx: usize,
    site: (usize, usize),
    omegas: &[f64],
    method: LdosMethod,
) -> Result<LdosProfile> {
    let values = match method {
        LdosMethod::Numeric { gamma } => {
            let eig = eig.ok_or_else(|| Error::config("numeric LDOS needs an eigendecomposition"))?;
            ldos_numeric(eig, site.1 * nx + site.0, omegas, gamma)?
        }
        LdosMethod::Analytic { ell } => omegas
            .iter()
            .map(|&w| ldos_analytic(params, ell, site.0 as f64, w))
            .collect::<Result<_>>()?,
    };
    Ok(LdosProfile { site, method, omegas: omegas.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn lowest_level_integrates_to_its_share_of_states() {
        // integral of the Gaussian over w / 2 pi equals alpha
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        let w = grid(-6.0, 0.0, 6001);
        let v: Vec<f64> = w.iter().map(|&o| ldos_analytic(&p, 0, 10.0, o).unwrap()).collect();
        assert!((trapezoid(&w, &v) / (2.0 * PI) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn every_level_carries_weight_alpha() {
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        for ell in 0..=4 {
            let c = p.channel_frequency(10.0) + ell as f64 * p.cyclotron();
            let w = grid(c - 3.0, c + 3.0, 12001);
            let v: Vec<f64> = w.iter().map(|&o| ldos_analytic(&p, ell, 10.0, o).unwrap()).collect();
            assert!((trapezoid(&w, &v) / (2.0 * PI) - 0.1).abs() < 1e-8, "ell={ell}");
        }
    }

    #[test]
    fn first_excited_level_vanishes_at_its_centre() {
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        let w = p.channel_frequency(5.0) + p.cyclotron();
        assert!(ldos_analytic(&p, 1, 5.0, w).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_high_levels_and_zero_field() {
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        assert!(ldos_analytic(&p, 11, 0.0, 0.0).is_err());
        let flat = LandauAnalytics::new(0.1, 0.0).unwrap();
        assert!(ldos_analytic(&flat, 0, 0.0, 0.0).is_err());
    }
}
