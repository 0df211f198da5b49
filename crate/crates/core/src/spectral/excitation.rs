use std::f64::consts::PI;

use super::diag::{diagonalize_with_cap, EigenDecomposition, DEFAULT_DIAG_CAP};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Lorentzian-broadened excitation spectrum of one basis state (an emitter).
#[derive(Debug, Clone)]
pub struct ExcitationSpectrum {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub gamma: f64,
    /// Spectral weight of eigenstates lying inside the frequency grid.
    pub covered_weight: f64,
    pub warnings: Vec<String>,
}

impl ExcitationSpectrum {
    /// Trapezoidal integral of the spectrum over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.omegas, &self.values)
    }
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// `S(w) = sum_nu |<nu|e>|^2 (gamma/pi) / ((w - w_nu)^2 + gamma^2)` for basis state `e`.
pub fn excitation_spectrum(
    h: &CsrMatrix,
    basis_index: usize,
    omegas: &[f64],
    gamma: f64,
) -> Result<ExcitationSpectrum> {
    let eig = diagonalize_with_cap(h, DEFAULT_DIAG_CAP)?;
    excitation_spectrum_from(&eig, basis_index, omegas, gamma)
}

pub fn excitation_spectrum_from(
    eig: &EigenDecomposition,
    basis_index: usize,
    omegas: &[f64],
    gamma: f64,
) -> Result<ExcitationSpectrum> {
    if !(gamma > 0.0) {
        return Err(Error::config(format!("broadening gamma must be > 0, got {gamma}")));
    }
    if basis_index >= eig.dim() {
        return Err(Error::config(format!("basis index {basis_index} outside dimension {}", eig.dim())));
    }
    let weights: Vec<(f64, f64)> = (0..eig.dim())
        .map(|l| (eig.omegas()[l], eig.amplitude(l, basis_index).norm_sqr()))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let values = omegas
        .iter()
        .map(|&w| {
            weights
                .iter()
                .map(|&(wl, p)| p * gamma / PI / ((w - wl).powi(2) + gamma * gamma))
                .sum()
        })
        .collect();
    let (lo, hi) = match (omegas.first(), omegas.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (f64::NAN, f64::NAN),
    };
    let covered_weight: f64 = weights.iter().filter(|(w, _)| *w >= lo && *w <= hi).map(|(_, p)| p).sum();
    let mut warnings = Vec::new();
    if covered_weight < 0.99 {
        warnings.push(format!(
            "frequency grid [{lo}, {hi}] covers only {:.3} of the spectral weight",
            covered_weight
        ));
    }
    Ok(ExcitationSpectrum { omegas: omegas.to_vec(), values, gamma, covered_weight, warnings })
}
