use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Markovian decay rate `Gamma_e = (sqrt(pi)/2) g^2 alpha / U_B exp(-Delta^2 / U_B^2)`.
///
/// Reported as an amplitude rate. The full lattice dynamics decays the
/// excited-state population, not the amplitude, at this rate: the memory
/// kernel integrated over `t >= 0` picks up half of the spectral density.
pub fn markov_rate(g: f64, alpha: f64, u_b: f64, detuning: f64) -> Result<f64> {
    if !(u_b > 0.0) {
        return Err(Error::config(format!(
            "Markovian rate needs U_B > 0 (got {u_b}); at zero field the emitter forms a bound state with Rabi frequency g sqrt(alpha)"
        )));
    }
    Ok(0.5 * PI.sqrt() * g * g * alpha / u_b * (-(detuning / u_b).powi(2)).exp())
}

/// Bound-state Rabi frequency `Omega = g sqrt(alpha)`.
pub fn rabi_frequency(g: f64, alpha: f64) -> f64 {
    g * alpha.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Critical,
    Strong,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::Critical => "critical",
            Regime::Strong => "strong",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `g sqrt(alpha) / U_B`
    pub ratio: f64,
}

pub const WEAK_BELOW: f64 = 0.353_553_390_593_273_8;
pub const STRONG_ABOVE: f64 = 4.0;

/// Weak below `1/(2 sqrt 2)`, strong above 4, critical in between.
pub fn classify_regime(g: f64, alpha: f64, u_b: f64) -> RegimeReport {
    let ratio = g * alpha.sqrt() / u_b;
    let regime = if ratio < WEAK_BELOW {
        Regime::Weak
    } else if ratio > STRONG_ABOVE {
        Regime::Strong
    } else {
        Regime::Critical
    };
    RegimeReport { regime, ratio }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_rate_at_alpha_tenth() {
        let ub = 0.1 / (2.0 * PI * 0.1f64).sqrt();
        let r = markov_rate(0.398957, 0.1, ub, 0.0).unwrap();
        assert!((r - 0.11181).abs() < 1e-5, "{r}");
        let off = markov_rate(0.398957, 0.1, ub, ub).unwrap();
        assert!((off / r - (-1f64).exp()).abs() < 1e-14);
        assert!(markov_rate(0.1, 0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn regime_boundaries() {
        let c = |ratio: f64| classify_regime(ratio * 0.2 / 0.1f64.sqrt(), 0.1, 0.2);
        assert_eq!(c(0.30).regime, Regime::Weak);
        assert_eq!(c(1.0).regime, Regime::Critical);
        assert_eq!(c(8.0).regime, Regime::Strong);
        assert!((c(8.0).ratio - 8.0).abs() < 1e-12);
        assert!((WEAK_BELOW - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-16);
    }
}
