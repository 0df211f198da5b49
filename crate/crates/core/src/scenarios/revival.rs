use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sweep::SweepGrid;
use super::System;
use crate::dynamics::{evolve, volterra_solve, Emitter, EvolveOptions, Kernel, QuantumState, Trajectory, VolterraOptions};
use crate::error::{Error, Result};
use crate::propagator::ContinuumMode;
use crate::spectral::LandauAnalytics;

/// Revival search window in units of the round-trip time.
pub const REVIVAL_WINDOW: [f64; 2] = [0.5, 1.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalOptions {
    pub dt: f64,
    /// Defaults to the end of the revival window.
    pub t_final: Option<f64>,
    pub gamma_p: f64,
    pub snapshot_times: Vec<f64>,
    pub sample_every: usize,
}

impl RevivalOptions {
    pub fn new(dt: f64) -> Self {
        Self { dt, t_final: None, gamma_p: 0.0, snapshot_times: vec![], sample_every: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalReport {
    /// `L_y / c`, with the local drift speed at the emitter.
    pub tau_rev_predicted: f64,
    pub p_rev: f64,
    pub tau_rev_measured: f64,
    /// Largest population in `[n - 1/2, n + 1/2] tau_rev` for every full window inside the run.
    pub peaks: Vec<(f64, f64)>,
    pub trajectory: Trajectory,
}

fn window_max(times: &[f64], values: &[f64], lo: f64, hi: f64) -> Option<(f64, f64)> {
    times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, v)| (*t, *v))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

/// Emit a photon and record its reabsorption after one round trip.
pub fn run_revival(system: &System, opts: &RevivalOptions) -> Result<RevivalReport> {
    if system.emitters().len() != 1 {
        return Err(Error::scenario("revival", "needs exactly one emitter"));
    }
    let e = *system.emitters().get(0);
    let speed = system.local(e.site)?.speed;
    if !(speed > 0.0) {
        return Err(Error::scenario("revival", "no drift at the emitter: the local field vanishes"));
    }
    let tau = system.geometry().ny() as f64 / speed;
    let t_final = opts.t_final.unwrap_or(REVIVAL_WINDOW[1] * tau);
    if t_final < REVIVAL_WINDOW[1] * tau - 1e-9 {
        return Err(Error::scenario(
            "revival",
            format!("window ends at {:.1} but the run stops at t_final = {t_final}", REVIVAL_WINDOW[1] * tau),
        ));
    }
    let mut eo = EvolveOptions::new(opts.dt, t_final)
        .with_loss(opts.gamma_p)
        .with_snapshots(opts.snapshot_times.clone())
        .with_sampling(opts.sample_every);
    eo.frame = Some(e.omega);
    let trajectory = evolve(&system.coupled, &QuantumState::emitter_excited(system.coupled.photon_dim, 1, 0), &eo)?;
    let pe = trajectory.populations(0);
    let (tau_m, p_rev) = window_max(&trajectory.times, &pe, REVIVAL_WINDOW[0] * tau, REVIVAL_WINDOW[1] * tau)
        .ok_or_else(|| Error::scenario("revival", "no samples inside the revival window"))?;
    let peaks = (1..)
        .map(|n| n as f64)
        .take_while(|n| (n + 0.5) * tau <= t_final + 1e-9)
        .filter_map(|n| window_max(&trajectory.times, &pe, (n - 0.5) * tau, (n + 0.5) * tau))
        .collect();
    Ok(RevivalReport { tau_rev_predicted: tau, p_rev, tau_rev_measured: tau_m, peaks, trajectory })
}

/// Revival probability on a grid of couplings and detunings, from the
/// memory-kernel equation with the lowest-Landau-level kernel of a periodic
/// strip of length `ly`. Axes are `g sqrt(alpha) / U_B` and `Delta_e / U_B`.
pub fn revival_map(params: LandauAnalytics, ly: f64, ratios: &[f64], detunings: &[f64], dt: f64) -> Result<SweepGrid> {
    let ub = params.landau_voltage();
    if !(ub > 0.0) {
        return Err(Error::scenario("revival_map", "needs U_B > 0"));
    }
    let tau = ly / params.hall_speed();
    let kernel = Kernel::Continuum { params, mode: ContinuumMode::FiniteLy { ly } };
    let opts = VolterraOptions::new(dt, REVIVAL_WINDOW[1] * tau);
    let cells: Vec<(usize, usize)> = (0..detunings.len()).flat_map(|j| (0..ratios.len()).map(move |i| (j, i))).collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(j, i)| {
            let g = ratios[i] * ub / params.alpha.sqrt();
            let e = Emitter::new((0, 0), params.channel_frequency(0.0) + detunings[j] * ub, g)?;
            let sol = volterra_solve(&kernel, &[e], &[C64::new(1.0, 0.0)], &opts)?;
            let pe = sol.populations(0);
            Ok(window_max(&sol.times, &pe, REVIVAL_WINDOW[0] * tau, REVIVAL_WINDOW[1] * tau).map_or(0.0, |p| p.1))
        })
        .collect::<Result<_>>()?;
    Ok(SweepGrid::new(
        "coupling_ratio",
        ratios.to_vec(),
        "detuning_over_ub",
        detunings.to_vec(),
        values.chunks(ratios.len()).map(|r| r.to_vec()).collect(),
        1,
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_potential, LatticeGeometry, PotentialSpec};

    #[test]
    fn decoupled_emitter_revives_fully() {
        let g = LatticeGeometry::periodic_y(11, 12).unwrap();
        let v = build_potential(&g, &PotentialSpec::Linear { u0: 0.2 }, None).unwrap();
        let e = Emitter::new((5, 3), -3.0, 0.0).unwrap();
        let s = System::new(0.1, v, vec![e]).unwrap();
        let mut o = RevivalOptions::new(0.02);
        o.sample_every = 10;
        let r = run_revival(&s, &o).unwrap();
        assert!((r.p_rev - 1.0).abs() < 1e-9);
        assert!((r.tau_rev_predicted - 12.0 / (0.2 / (std::f64::consts::TAU * 0.1))).abs() < 1e-9);
    }

    #[test]
    fn short_run_is_rejected() {
        let g = LatticeGeometry::periodic_y(11, 12).unwrap();
        let v = build_potential(&g, &PotentialSpec::Linear { u0: 0.2 }, None).unwrap();
        let s = System::new(0.1, v, vec![Emitter::new((5, 3), -3.0, 0.1).unwrap()]).unwrap();
        let mut o = RevivalOptions::new(0.02);
        o.t_final = Some(10.0);
        assert!(matches!(run_revival(&s, &o), Err(Error::Scenario { .. })));
    }
}
