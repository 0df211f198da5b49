use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::metrics::{dominant_frequency, fit_exponential_rate, row_displacement, tail_length, WavepacketMetrics};
use super::System;
use crate::dynamics::{
    build_coupled_hamiltonian, classify_regime, evolve, markov_rate, rabi_frequency, volterra_solve, Emitter, EmitterSet,
    EvolveOptions, Kernel, KernelSpec, QuantumState, RegimeReport, Trajectory, VolterraOptions,
};
use crate::error::{Error, Result};
use crate::spectral::{diagonalize, excitation_spectrum_from};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionOptions {
    pub dt: f64,
    pub t_final: f64,
    pub gamma_p: f64,
    pub snapshot_times: Vec<f64>,
    pub sample_every: usize,
    /// Also integrate the reduced memory-kernel equation and compare.
    pub kernel: Option<KernelSpec>,
}

impl EmissionOptions {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, gamma_p: 0.0, snapshot_times: vec![], sample_every: 1, kernel: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetrics {
    pub t: f64,
    pub metrics: WavepacketMetrics,
    /// Fitted decay length of the trailing edge, if a tail is resolvable.
    pub tail_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionReport {
    pub emitter: Emitter,
    pub regime: RegimeReport,
    /// Markovian amplitude rate at the emitter's local field, if the field is nonzero.
    pub markov_rate: Option<f64>,
    pub hall_speed: f64,
    pub magnetic_length: f64,
    /// Population decay rate fitted on `t in [1, 3] / (2 Gamma_e)`.
    pub fitted_population_rate: Option<f64>,
    /// Half the fitted population rate.
    pub fitted_amplitude_rate: Option<f64>,
    /// Strongest oscillation frequency of `P_e` below four Rabi frequencies.
    pub dominant_frequency: Option<f64>,
    pub snapshots: Vec<SnapshotMetrics>,
    pub kernel_amplitudes: Option<Vec<C64>>,
    /// `max_t ||c_kernel| - |c_lattice||` on the sampled grid.
    pub kernel_deviation: Option<f64>,
    pub warnings: Vec<String>,
    pub trajectory: Trajectory,
}

impl EmissionReport {
    pub fn populations(&self) -> Vec<f64> {
        self.trajectory.populations(0)
    }
}

fn single_emitter(system: &System) -> Result<Emitter> {
    if system.emitters().len() != 1 {
        return Err(Error::scenario("emission", format!("needs exactly one emitter, got {}", system.emitters().len())));
    }
    Ok(*system.emitters().get(0))
}

/// Spontaneous emission of one initially excited emitter.
pub fn run_emission(system: &System, opts: &EmissionOptions) -> Result<EmissionReport> {
    let e = single_emitter(system)?;
    let geometry = system.geometry();
    let field = system.local(e.site)?;
    let params = system.local_analytics(e.site)?;
    let lb = params.magnetic_length();
    let ub = field.landau_voltage;
    let regime = classify_regime(e.g, system.alpha(), ub);
    let gamma = (ub > 0.0).then(|| markov_rate(e.g, system.alpha(), ub, e.omega - field.channel_frequency)).transpose()?;

    let mut warnings = system.emitters().warnings.clone();
    if (geometry.distance_to_open_edge(e.site.0, e.site.1) as f64) < lb {
        warnings.push(format!("emitter at {:?} lies within l_B of an open edge; bulk formulas do not apply", e.site));
    }

    let mut evolve_opts = EvolveOptions::new(opts.dt, opts.t_final)
        .with_loss(opts.gamma_p)
        .with_snapshots(opts.snapshot_times.clone())
        .with_sampling(opts.sample_every);
    evolve_opts.frame = Some(e.omega);
    let m = system.coupled.photon_dim;
    let trajectory = evolve(&system.coupled, &QuantumState::emitter_excited(m, 1, 0), &evolve_opts)?;
    let pe = trajectory.populations(0);

    let fitted_population_rate = gamma.and_then(|g| {
        let (lo, hi) = (1.0 / (2.0 * g), 3.0 / (2.0 * g));
        (hi <= opts.t_final).then(|| fit_exponential_rate(&trajectory.times, &pe, lo, hi)).flatten()
    });
    let omega_rabi = rabi_frequency(e.g, system.alpha());
    let dominant = (omega_rabi > 0.0 && trajectory.times.len() > 16).then(|| {
        let w_hi = 4.0 * omega_rabi;
        let span = opts.t_final.max(1e-9);
        let points = ((w_hi * span / std::f64::consts::PI) as usize * 8).clamp(200, 20_000);
        dominant_frequency(&trajectory.times, &pe, w_hi / points as f64, w_hi, points)
    });

    let direction = system.drift_direction(e.site)?[1].signum();
    let direction = if direction == 0.0 { 1.0 } else { direction };
    let disp: Vec<f64> = (0..geometry.ny()).map(|y| row_displacement(geometry, y, e.site.1, direction)).collect();
    let snapshots = trajectory
        .snapshots
        .iter()
        .map(|s| {
            let metrics = WavepacketMetrics::compute(geometry, &s.density, e.site, direction, lb);
            let h = super::longitudinal_profile(geometry, &s.density);
            let front = params.hall_speed() * s.t;
            let tail = tail_length(&disp, &h, 2.0 * lb, front - 3.0 * lb);
            SnapshotMetrics { t: s.t, metrics, tail_length: tail }
        })
        .collect();

    let (kernel_amplitudes, kernel_deviation) = match opts.kernel {
        None => (None, None),
        Some(spec) => {
            let eig = matches!(spec, KernelSpec::Exact).then(|| diagonalize(&system.hopping)).transpose()?;
            let kernel = Kernel::from_spec(spec, params, eig.as_ref(), geometry.nx())?;
            let mut vo = VolterraOptions::new(opts.dt * opts.sample_every as f64, opts.t_final);
            vo.gamma_p = opts.gamma_p;
            let sol = volterra_solve(&kernel, &[e], &[C64::new(1.0, 0.0)], &vo)?;
            let amps = sol.amplitudes.into_iter().next().unwrap_or_default();
            let dev = amps
                .iter()
                .zip(&trajectory.emitter_amplitudes[0])
                .map(|(a, b)| (a.norm() - b.norm()).abs())
                .fold(0.0, f64::max);
            (Some(amps), Some(dev))
        }
    };

    Ok(EmissionReport {
        emitter: e,
        regime,
        markov_rate: gamma,
        hall_speed: params.hall_speed(),
        magnetic_length: lb,
        fitted_population_rate,
        fitted_amplitude_rate: fitted_population_rate.map(|r| r / 2.0),
        dominant_frequency: dominant,
        snapshots,
        kernel_amplitudes,
        kernel_deviation,
        warnings,
        trajectory,
    })
}

/// Emitter excitation spectra `S_e(omega)` for a list of couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationScan {
    pub couplings: Vec<f64>,
    pub omegas: Vec<f64>,
    /// `values[k][j]` is `S_e(omegas[j])` at `couplings[k]`.
    pub values: Vec<Vec<f64>>,
    pub gamma: f64,
    pub warnings: Vec<String>,
}

/// Diagonalize the coupled problem for each coupling and collect `S_e`.
/// The emitter keeps the site and frequency of the system's single emitter.
pub fn excitation_scan(system: &System, couplings: &[f64], omegas: &[f64], gamma: f64) -> Result<ExcitationScan> {
    let e = single_emitter(system)?;
    let mut values = Vec::with_capacity(couplings.len());
    let mut warnings = Vec::new();
    for &g in couplings {
        let set = EmitterSet::new(system.geometry(), vec![Emitter::new(e.site, e.omega, g)?])?;
        let h = build_coupled_hamiltonian(&system.hopping, &set)?;
        let eig = crate::spectral::diagonalize_with_cap(&h.matrix, crate::spectral::DEFAULT_DIAG_CAP)?;
        let s = excitation_spectrum_from(&eig, h.emitter_index(0), omegas, gamma)?;
        warnings.extend(s.warnings.iter().map(|w| format!("g = {g}: {w}")));
        values.push(s.values);
    }
    Ok(ExcitationScan { couplings: couplings.to_vec(), omegas: omegas.to_vec(), values, gamma, warnings })
}
