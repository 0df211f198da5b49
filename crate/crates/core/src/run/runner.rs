use std::path::Path;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ParsedConfig, RunConfig, ScenarioConfig};
use super::io::{csv_string, sha256_hex, write_atomic, Cell, SnapshotStack};
use super::manifest::{resolve_emitters, run_id, DerivedQuantities, FileEntry, RunManifest, MANIFEST_FILE};
use crate::dynamics::{
    evolve, volterra_solve, Emitter, EvolveOptions, Kernel, KernelSpec, QuantumState, Trajectory, VolterraOptions,
    NORM_DRIFT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::lattice::{build_potential, PotentialField};
use crate::propagator::{greens_exact, greens_lll, ldos, ContinuumMode, GreensEvaluator, LdosMethod};
use crate::scenarios::{
    disorder_sweep, excitation_scan, revival_map, run_beam_splitter, run_emission, run_revival, run_transfer,
    spectrum_report, BeamSplitterOptions, DisorderSweepOptions, EmissionOptions, RevivalOptions, SweepGrid, System,
    TransferOptions,
};
use crate::spectral::{diagonalize, LandauAnalytics};

/// Everything a run produces before it touches the file system.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Value,
    pub warnings: Vec<String>,
    /// Invariant violations detected during the run.
    pub violations: Vec<String>,
}

impl RunArtifacts {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}

struct Ctx<'a> {
    config: &'a RunConfig,
    run_id: String,
    potential: PotentialField,
    emitters: Vec<Emitter>,
    out: RunArtifacts,
}

/// Run a configuration in a pool of `jobs` worker threads (all cores if `None`),
/// write its outputs into `out_dir` and return the manifest. A run that
/// completes with invariant violations still writes its outputs; the
/// violations are listed in the manifest.
pub fn run(parsed: &ParsedConfig, out_dir: &Path, jobs: Option<usize>) -> Result<RunManifest> {
    let started = Instant::now();
    let config = &parsed.config;
    let artifacts = with_jobs(jobs, || execute(config))?;
    let mut files = Vec::with_capacity(artifacts.files.len());
    for (name, bytes) in &artifacts.files {
        write_atomic(&out_dir.join(name), bytes)?;
        files.push(FileEntry { name: name.clone(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) });
    }
    let emitters = resolve_emitters(config)?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: config.scenario.name().to_string(),
        run_id: run_id(config),
        seed: config.seed,
        config: config.to_toml(),
        defaults_applied: parsed.defaults_applied.clone(),
        derived: DerivedQuantities::compute(config, &emitters)?,
        emitters,
        summary: artifacts.summary,
        warnings: artifacts.warnings,
        violations: artifacts.violations,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        files,
    };
    write_atomic(&out_dir.join(MANIFEST_FILE), manifest.to_json().as_bytes())?;
    Ok(manifest)
}

/// Evaluate `f` on a dedicated thread pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::config("--jobs must be >= 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::config(format!("thread pool: {e}")))?;
    pool.install(f)
}

/// Dispatch the configured scenario and collect its outputs in memory.
pub fn execute(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let geometry = config.lattice.geometry()?;
    let potential = build_potential(&geometry, &config.potential, Some(config.seed))?;
    let emitters = config.emitters.iter().map(|s| s.resolve(&potential, config.lattice.alpha)).collect::<Result<Vec<_>>>()?;
    let mut ctx = Ctx {
        config,
        run_id: run_id(config),
        potential,
        emitters,
        out: RunArtifacts { files: vec![], summary: Value::Null, warnings: vec![], violations: vec![] },
    };
    let name = config.scenario.name();
    ctx.dispatch().map_err(|e| match e {
        Error::Scenario { .. } => e,
        other => Error::scenario(name, other.to_string()),
    })?;
    Ok(ctx.out)
}

fn summarize<T: Serialize>(report: &T, drop: &[&str]) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    if let Value::Object(map) = &mut v {
        for k in drop {
            map.remove(*k);
        }
    }
    v
}

fn grid_csv(grid: &SweepGrid, value: &str) -> Vec<u8> {
    let rows = grid
        .y
        .iter()
        .enumerate()
        .flat_map(|(iy, &y)| grid.x.iter().enumerate().map(move |(ix, &x)| vec![Cell::F(x), Cell::F(y), Cell::F(grid.value(ix, iy))]));
    csv_string(&[grid.x_axis.as_str(), grid.y_axis.as_str(), value], rows).into_bytes()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(Error::config(format!("frequency grid needs points >= 2 and max > min, got {n} points on [{lo}, {hi}]")));
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

impl Ctx<'_> {
    fn alpha(&self) -> f64 {
        self.config.lattice.alpha
    }

    fn system(&self) -> Result<System> {
        System::new(self.alpha(), self.potential.clone(), self.emitters.clone())
    }

    fn t_final(&self) -> Result<f64> {
        self.config
            .dynamics
            .t_final
            .ok_or_else(|| Error::config(format!("scenario `{}` needs dynamics.t_final", self.config.scenario.name())))
    }

    /// Global continuum parameters from the slope of the configured potential.
    fn analytics(&self) -> Result<LandauAnalytics> {
        LandauAnalytics::new(self.alpha(), self.config.potential.linear_slope().unwrap_or(0.0).abs())
    }

    fn put(&mut self, name: &str, bytes: Vec<u8>) {
        self.out.files.push((name.to_string(), bytes));
    }

    fn put_trajectory(&mut self, traj: &Trajectory) -> Result<()> {
        let n = traj.emitter_amplitudes.len();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|k| format!("P_e_{k}")));
        header.push("photon_norm".into());
        let rows = (0..traj.times.len()).map(|k| {
            let mut row = vec![Cell::F(traj.times[k])];
            row.extend(traj.emitter_amplitudes.iter().map(|a| Cell::F(a[k].norm_sqr())));
            row.push(Cell::F(traj.photon_norm[k]));
            row
        });
        self.put("trajectory.csv", csv_string(&header, rows).into_bytes());
        if !traj.snapshots.is_empty() {
            let g = self.potential.geometry();
            let stack = SnapshotStack {
                nx: g.nx(),
                ny: g.ny(),
                run_id: self.run_id.clone(),
                frames: traj.snapshots.iter().map(|s| s.density.clone()).collect(),
            };
            self.put("snapshots.bin", stack.encode()?);
            let rows = traj.snapshots.iter().enumerate().map(|(i, s)| vec![Cell::from(i), Cell::F(s.t)]);
            self.put("snapshot_times.csv", csv_string(&["frame", "t"], rows).into_bytes());
        }
        self.check_trajectory(traj);
        Ok(())
    }

    fn check_trajectory(&mut self, traj: &Trajectory) {
        let gamma = traj.gamma_p;
        if gamma == 0.0 {
            let drift = traj.norm_drift();
            if drift > NORM_DRIFT_TOLERANCE {
                self.out.violations.push(format!("norm drift {drift:.3e} exceeds {NORM_DRIFT_TOLERANCE:.0e}"));
            }
            return;
        }
        let n0 = traj.total_norm(0);
        let rise = (0..traj.times.len()).map(|k| traj.total_norm(k) - n0).fold(0.0, f64::max);
        if rise > NORM_DRIFT_TOLERANCE {
            self.out.violations.push(format!("norm grew by {rise:.3e} under loss"));
        }
        if self.emitters.iter().all(|e| e.g == 0.0) {
            let p0 = traj.photon_norm[0];
            let err = traj
                .times
                .iter()
                .zip(&traj.photon_norm)
                .map(|(t, p)| (p - p0 * (-gamma * t).exp()).abs())
                .fold(0.0, f64::max);
            if err > NORM_DRIFT_TOLERANCE {
                self.out.violations.push(format!("photon norm departs from exp(-gamma_p t) by {err:.3e}"));
            }
        }
    }

    fn dispatch(&mut self) -> Result<()> {
        let d = self.config.dynamics.clone();
        match self.config.scenario.clone() {
            ScenarioConfig::Spectrum => {
                let system = self.system()?;
                let slope = self.config.potential.linear_slope().unwrap_or(0.0);
                let report = spectrum_report(&system.hopping, slope)?;
                let rows = report.rows.iter().map(|r| vec![Cell::from(r.lambda), Cell::F(r.omega), Cell::F(r.mean_x), Cell::from(r.edge)]);
                self.put("spectrum.csv", csv_string(&["lambda", "omega", "mean_x", "edge_flag"], rows).into_bytes());
                self.out.summary = summarize(&report, &["rows"]);
            }
            ScenarioConfig::Ldos { site, omega_min, omega_max, points, broadening, levels } => {
                let system = self.system()?;
                let eig = diagonalize(&system.hopping)?;
                let params = self.analytics()?;
                let omegas = linspace(omega_min, omega_max, points)?;
                let nx = self.potential.geometry().nx();
                let site = (site[0], site[1]);
                let numeric = ldos(Some(&eig), &params, nx, site, &omegas, LdosMethod::Numeric { gamma: broadening })?;
                let analytic = levels
                    .iter()
                    .map(|&ell| ldos(None, &params, nx, site, &omegas, LdosMethod::Analytic { ell }))
                    .collect::<Result<Vec<_>>>()?;
                let mut header = vec!["omega".to_string(), "ldos".to_string()];
                header.extend(levels.iter().map(|l| format!("analytic_l{l}")));
                let rows = (0..omegas.len()).map(|k| {
                    let mut row = vec![Cell::F(omegas[k]), Cell::F(numeric.values[k])];
                    row.extend(analytic.iter().map(|a| Cell::F(a.values[k])));
                    row
                });
                self.put("ldos.csv", csv_string(&header, rows).into_bytes());
                let integral = numeric.integral();
                if (integral - 1.0).abs() > 0.01 {
                    self.out.warnings.push(format!("LDOS integral over the grid is {integral:.4}; widen the frequency window"));
                }
                self.out.summary = json!({
                    "integral": integral,
                    "peak": numeric.peak(),
                    "analytic_integrals": analytic.iter().map(|a| a.integral()).collect::<Vec<_>>(),
                });
            }
            ScenarioConfig::Greens { source, target, points, continuum, map_times } => {
                let t_final = self.t_final()?;
                let system = self.system()?;
                let g = *system.geometry();
                let eig = diagonalize(&system.hopping)?;
                let i = g.check_site((target[0], target[1]))?;
                let j = g.check_site((source[0], source[1]))?;
                if points < 2 {
                    return Err(Error::config("greens needs points >= 2"));
                }
                let dt = t_final / (points - 1) as f64;
                let values = GreensEvaluator::new(&eig).tabulate(i, j, dt, points - 1, 0.0, d.gamma_p);
                let params = self.analytics()?;
                let ri = (target[0] as f64, target[1] as f64);
                let rj = (source[0] as f64, source[1] as f64);
                let mut header = vec!["t", "re", "im", "abs"];
                if continuum {
                    header.extend(["continuum_re", "continuum_im"]);
                }
                let rows = values.iter().enumerate().map(|(k, v)| {
                    let t = k as f64 * dt;
                    let mut row = vec![Cell::F(t), Cell::F(v.re), Cell::F(v.im), Cell::F(v.norm())];
                    if continuum {
                        let c = greens_lll(&params, t, ri, rj, ContinuumMode::Infinite);
                        row.extend([Cell::F(c.re), Cell::F(c.im)]);
                    }
                    row
                });
                self.put("greens.csv", csv_string(&header, rows).into_bytes());
                if !map_times.is_empty() {
                    let frames = map_times
                        .iter()
                        .map(|&t| (0..g.num_sites()).map(|r| greens_exact(&eig, t, r, j).norm() * (-0.5 * d.gamma_p * t).exp()).collect())
                        .collect();
                    let stack = SnapshotStack { nx: g.nx(), ny: g.ny(), run_id: self.run_id.clone(), frames };
                    self.put("snapshots.bin", stack.encode()?);
                    let rows = map_times.iter().enumerate().map(|(k, &t)| vec![Cell::from(k), Cell::F(t)]);
                    self.put("snapshot_times.csv", csv_string(&["frame", "t"], rows).into_bytes());
                }
                let peak = values.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(k, v)| (k as f64 * dt, v.norm()));
                self.out.summary = json!({ "peak_time": peak.map(|p| p.0), "peak_abs": peak.map(|p| p.1) });
            }
            ScenarioConfig::Evolve { excite_emitter, excite_site } => {
                let t_final = self.t_final()?;
                let system = self.system()?;
                let m = system.coupled.photon_dim;
                let n = self.emitters.len();
                let state = match (excite_emitter, excite_site) {
                    (Some(_), Some(_)) => return Err(Error::config("give at most one of excite_emitter, excite_site")),
                    (_, Some(s)) => {
                        let mut st = QuantumState::vacuum(m, n);
                        st.photons[system.geometry().check_site((s[0], s[1]))?] = C64::new(1.0, 0.0);
                        st
                    }
                    (Some(k), None) if k < n => QuantumState::emitter_excited(m, n, k),
                    (None, None) if n > 0 => QuantumState::emitter_excited(m, n, 0),
                    _ => return Err(Error::config(format!("nothing to excite: {n} emitters configured"))),
                };
                let opts = EvolveOptions::new(d.dt, t_final)
                    .with_loss(d.gamma_p)
                    .with_snapshots(d.snapshot_times.clone())
                    .with_sampling(d.sample_every);
                let traj = evolve(&system.coupled, &state, &opts)?;
                self.out.warnings.extend(system.emitters().warnings.iter().cloned());
                let last = traj.times.len() - 1;
                self.out.summary = json!({
                    "t_final": traj.times[last],
                    "photon_norm": traj.photon_norm[last],
                    "emitter_populations": (0..n).map(|k| traj.emitter_amplitudes[k][last].norm_sqr()).collect::<Vec<_>>(),
                    "norm_drift": traj.norm_drift(),
                });
                self.put_trajectory(&traj)?;
            }
            ScenarioConfig::Emission { kernel } => {
                let system = self.system()?;
                let opts = EmissionOptions {
                    dt: d.dt,
                    t_final: self.t_final()?,
                    gamma_p: d.gamma_p,
                    snapshot_times: d.snapshot_times.clone(),
                    sample_every: d.sample_every,
                    kernel,
                };
                let report = run_emission(&system, &opts)?;
                self.out.warnings.extend(report.warnings.iter().cloned());
                self.out.summary = summarize(&report, &["trajectory", "kernel_amplitudes", "warnings"]);
                if let Some(amps) = &report.kernel_amplitudes {
                    let step = d.dt * d.sample_every as f64;
                    let rows = amps.iter().enumerate().map(|(k, a)| vec![Cell::F(k as f64 * step), Cell::F(a.norm_sqr())]);
                    self.put("kernel.csv", csv_string(&["t", "P_e_1"], rows).into_bytes());
                }
                self.put_trajectory(&report.trajectory)?;
            }
            ScenarioConfig::Kernel { kernel } => {
                let t_final = self.t_final()?;
                let system = self.system()?;
                let first = self.emitters.first().ok_or_else(|| Error::config("kernel scenario needs at least one emitter"))?;
                let params = system.local_analytics(first.site).or_else(|_| self.analytics())?;
                let eig = matches!(kernel, KernelSpec::Exact).then(|| diagonalize(&system.hopping)).transpose()?;
                let k = Kernel::from_spec(kernel, params, eig.as_ref(), system.geometry().nx())?;
                let mut opts = VolterraOptions::new(d.dt, t_final);
                opts.gamma_p = d.gamma_p;
                let mut initial = vec![C64::default(); self.emitters.len()];
                initial[0] = C64::new(1.0, 0.0);
                let sol = volterra_solve(&k, &self.emitters, &initial, &opts)?;
                let n = self.emitters.len();
                let mut header = vec!["t".to_string()];
                header.extend((1..=n).map(|k| format!("P_e_{k}")));
                let rows = (0..sol.times.len()).map(|k| {
                    let mut row = vec![Cell::F(sol.times[k])];
                    row.extend(sol.amplitudes.iter().map(|a| Cell::F(a[k].norm_sqr())));
                    row
                });
                self.put("kernel.csv", csv_string(&header, rows).into_bytes());
                let last = sol.times.len() - 1;
                self.out.summary = json!({
                    "kernel": kernel,
                    "final_populations": (0..n).map(|k| sol.amplitudes[k][last].norm_sqr()).collect::<Vec<_>>(),
                });
            }
            ScenarioConfig::Excitation { coupling_ratios, omega_min, omega_max, points, broadening } => {
                let system = self.system()?;
                let e = *self.emitters.first().ok_or_else(|| Error::config("excitation scenario needs one emitter"))?;
                let ub = system.local(e.site)?.landau_voltage;
                let couplings: Vec<f64> = coupling_ratios.iter().map(|r| r * ub / self.alpha().sqrt()).collect();
                let omegas = linspace(omega_min, omega_max, points)?;
                let scan = excitation_scan(&system, &couplings, &omegas, broadening)?;
                let rows = coupling_ratios.iter().enumerate().flat_map(|(k, &r)| {
                    let g = couplings[k];
                    let vals = &scan.values[k];
                    omegas.iter().zip(vals).map(move |(&w, &s)| vec![Cell::F(r), Cell::F(g), Cell::F(w), Cell::F(s)])
                });
                self.put("excitation.csv", csv_string(&["coupling_ratio", "g", "omega", "S_e"], rows).into_bytes());
                self.out.warnings.extend(scan.warnings.iter().cloned());
                self.out.summary = json!({ "couplings": couplings, "landau_voltage": ub, "broadening": broadening });
            }
            ScenarioConfig::Revival => {
                let system = self.system()?;
                let mut opts = RevivalOptions::new(d.dt);
                opts.t_final = d.t_final;
                opts.gamma_p = d.gamma_p;
                opts.snapshot_times = d.snapshot_times.clone();
                opts.sample_every = d.sample_every;
                let report = run_revival(&system, &opts)?;
                self.out.summary = summarize(&report, &["trajectory"]);
                self.put_trajectory(&report.trajectory)?;
            }
            ScenarioConfig::RevivalMap { coupling_ratios, detunings, ly } => {
                let grid = revival_map(self.analytics()?, ly, &coupling_ratios, &detunings, d.dt)?;
                self.put("grid.csv", grid_csv(&grid, "p_rev"));
                self.out.summary = json!({ "x_axis": grid.x_axis, "y_axis": grid.y_axis, "value": "p_rev", "ly": ly });
            }
            ScenarioConfig::Transfer { window, tolerance } => {
                let system = self.system()?;
                let opts = TransferOptions {
                    dt: d.dt,
                    t_final: d.t_final,
                    gamma_p: d.gamma_p,
                    sample_every: d.sample_every,
                    snapshot_times: d.snapshot_times.clone(),
                    window,
                    tolerance,
                };
                let report = run_transfer(&system, &opts)?;
                if let Some(e) = &report.criteria_error {
                    self.out.warnings.push(format!("transfer criteria not evaluated: {e}"));
                }
                self.out.summary = summarize(&report, &["trajectory"]);
                self.put_trajectory(&report.trajectory)?;
            }
            ScenarioConfig::DisorderSweep { u0, sigma, realizations } => {
                let mut transfer = TransferOptions::new(d.dt);
                transfer.t_final = d.t_final;
                transfer.gamma_p = d.gamma_p;
                transfer.sample_every = d.sample_every;
                let opts = DisorderSweepOptions { u0, sigma, realizations, base_seed: self.config.seed, transfer };
                let grid = disorder_sweep(self.potential.geometry(), self.alpha(), &self.config.emitters, &opts)?;
                self.put("grid.csv", grid_csv(&grid, "mean_infidelity"));
                self.out.summary = json!({
                    "x_axis": grid.x_axis,
                    "y_axis": grid.y_axis,
                    "value": "mean_infidelity",
                    "realizations": grid.ensemble,
                    "base_seed": grid.base_seed,
                });
            }
            ScenarioConfig::BeamSplitter { snapshot_time, center, dead_zone } => {
                let system = self.system()?;
                let opts = BeamSplitterOptions { dt: d.dt, snapshot_time, center, dead_zone, sample_every: d.sample_every };
                let report = run_beam_splitter(&system, &opts)?;
                self.out.summary = summarize(&report, &["trajectory"]);
                self.put_trajectory(&report.trajectory)?;
            }
        }
        Ok(())
    }
}
