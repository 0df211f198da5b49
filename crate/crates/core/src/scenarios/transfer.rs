use serde::{Deserialize, Serialize};

use super::criteria::{check_transfer_criteria, CriteriaReport, DEFAULT_RELATIVE_TOLERANCE};
use super::System;
use crate::dynamics::{evolve, markov_rate, EvolveOptions, QuantumState, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferOptions {
    pub dt: f64,
    /// Defaults to twice the predicted transfer time.
    pub t_final: Option<f64>,
    pub gamma_p: f64,
    pub sample_every: usize,
    pub snapshot_times: Vec<f64>,
    /// Fidelity search window; defaults to the whole run.
    pub window: Option<[f64; 2]>,
    pub tolerance: f64,
}

impl TransferOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            t_final: None,
            gamma_p: 0.0,
            sample_every: 1,
            snapshot_times: vec![],
            window: None,
            tolerance: DEFAULT_RELATIVE_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    /// `max_t P_e^(2)(t)` over the search window.
    pub fidelity: f64,
    pub t_star: f64,
    /// `dy / c + 2 / Gamma_e`, with `dy` the row distance along the drift
    /// direction counted modulo `ny`, when emitter 1 sees a field. On an open
    /// lattice the wrapped distance follows the edge loop back into the bulk.
    pub tau_t_predicted: Option<f64>,
    pub window: [f64; 2],
    pub criteria: Option<CriteriaReport>,
    pub criteria_error: Option<String>,
    pub trajectory: Trajectory,
}

/// `dy / c + 2 / Gamma_e` from the local field at emitter 1, `None` when the
/// field vanishes there.
pub fn predicted_transfer_time(system: &System) -> Result<Option<f64>> {
    if system.emitters().len() != 2 {
        return Err(Error::scenario("transfer", format!("needs two emitters, got {}", system.emitters().len())));
    }
    let (e1, e2) = (*system.emitters().get(0), *system.emitters().get(1));
    let g = system.geometry();
    Ok(match system.local(e1.site) {
        Ok(f) if f.speed > 0.0 => {
            let dir = if system.drift_direction(e1.site)?[1] < 0.0 { -1 } else { 1 };
            let dy = ((e2.site.1 as i64 - e1.site.1 as i64) * dir).rem_euclid(g.ny() as i64);
            let gamma = markov_rate(e1.g, system.alpha(), f.landau_voltage, e1.omega - f.channel_frequency)?;
            Some(dy as f64 / f.speed + if gamma > 0.0 { 2.0 / gamma } else { f64::INFINITY })
        }
        _ => None,
    })
}

/// Excite emitter 1 and record how much of the excitation emitter 2 absorbs.
pub fn run_transfer(system: &System, opts: &TransferOptions) -> Result<TransferReport> {
    let tau_t = predicted_transfer_time(system)?;
    let (e1, e2) = (*system.emitters().get(0), *system.emitters().get(1));
    let t_final = match (opts.t_final, tau_t) {
        (Some(t), _) => t,
        (None, Some(t)) if t.is_finite() => 2.0 * t,
        _ => return Err(Error::scenario("transfer", "no transfer-time estimate; set t_final")),
    };
    let mut eo = EvolveOptions::new(opts.dt, t_final)
        .with_loss(opts.gamma_p)
        .with_snapshots(opts.snapshot_times.clone())
        .with_sampling(opts.sample_every);
    eo.frame = Some(0.5 * (e1.omega + e2.omega));
    let trajectory = evolve(&system.coupled, &QuantumState::emitter_excited(system.coupled.photon_dim, 2, 0), &eo)?;
    let window = opts.window.unwrap_or([0.0, t_final]);
    let p2 = trajectory.populations(1);
    let (t_star, fidelity) = trajectory
        .times
        .iter()
        .zip(&p2)
        .filter(|(t, _)| **t >= window[0] && **t <= window[1])
        .map(|(t, p)| (*t, *p))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::scenario("transfer", format!("no samples in window {window:?}")))?;
    let (criteria, criteria_error) =
        match check_transfer_criteria(&system.potential, system.alpha(), &[e1, e2], opts.tolerance) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
    Ok(TransferReport { fidelity, t_star, tau_t_predicted: tau_t, window, criteria, criteria_error, trajectory })
}
