use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::coupled::CoupledHamiltonian;
use crate::error::{Error, Result};

/// Largest tolerated norm drift per unit time in the lossless dry run.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-6;
/// Default fixed step.
pub const DEFAULT_DT: f64 = 0.01;

/// Single-excitation amplitudes: photons `phi(r_i)` and emitters `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub photons: Vec<C64>,
    pub emitters: Vec<C64>,
}

impl QuantumState {
    pub fn vacuum(photon_dim: usize, emitters: usize) -> Self {
        Self { photons: vec![C64::default(); photon_dim], emitters: vec![C64::default(); emitters] }
    }

    /// Emitter `n` excited, lattice empty.
    pub fn emitter_excited(photon_dim: usize, emitters: usize, n: usize) -> Self {
        let mut s = Self::vacuum(photon_dim, emitters);
        s.emitters[n] = C64::new(1.0, 0.0);
        s
    }

    pub fn photon_norm(&self) -> f64 {
        self.photons.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.photon_norm() + self.emitters.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn photon_density(&self) -> Vec<f64> {
        self.photons.iter().map(|c| c.norm_sqr()).collect()
    }

    fn flatten(&self) -> Vec<C64> {
        self.photons.iter().chain(&self.emitters).copied().collect()
    }

    fn from_flat(v: &[C64], photon_dim: usize) -> Self {
        Self { photons: v[..photon_dim].to_vec(), emitters: v[photon_dim..].to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// `|phi(r_i)|^2`, row-major.
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub gamma_p: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Record every `sample_every`-th step.
    #[serde(default = "one")]
    pub sample_every: usize,
    /// Rotating-frame reference; defaults to the mean frequency of the coupled
    /// emitters, or the centre of the Gershgorin interval if none is coupled.
    #[serde(default)]
    pub frame: Option<f64>,
    #[serde(default = "yes")]
    pub dry_run: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl EvolveOptions {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, gamma_p: 0.0, snapshot_times: vec![], sample_every: 1, frame: None, dry_run: true }
    }

    pub fn with_loss(mut self, gamma_p: f64) -> Self {
        self.gamma_p = gamma_p;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn with_sampling(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Sampled time series of a run. Amplitudes are in the lab frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    /// `emitter_amplitudes[n][k]` is `c_n(times[k])`.
    pub emitter_amplitudes: Vec<Vec<C64>>,
    pub photon_norm: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: QuantumState,
    pub gamma_p: f64,
}

impl Trajectory {
    pub fn populations(&self, n: usize) -> Vec<f64> {
        self.emitter_amplitudes[n].iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn total_norm(&self, k: usize) -> f64 {
        self.photon_norm[k] + self.emitter_amplitudes.iter().map(|a| a[k].norm_sqr()).sum::<f64>()
    }

    /// Largest `|norm(t) - norm(0)|` over the samples.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.total_norm(0);
        (0..self.times.len()).map(|k| (self.total_norm(k) - n0).abs()).fold(0.0, f64::max)
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

struct Rk4<'a> {
    h: &'a CoupledHamiltonian,
    frame: f64,
    half_loss: f64,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl<'a> Rk4<'a> {
    fn new(h: &'a CoupledHamiltonian, frame: f64, gamma_p: f64) -> Self {
        let d = h.dim();
        let z = || vec![C64::default(); d];
        Self { h, frame, half_loss: 0.5 * gamma_p, k: [z(), z(), z(), z()], tmp: z() }
    }

    fn rhs(h: &CoupledHamiltonian, frame: f64, half_loss: f64, y: &[C64], out: &mut [C64]) {
        h.matrix.mul_vec(y, out);
        let m = h.photon_dim;
        for (i, (o, yi)) in out.iter_mut().zip(y).enumerate() {
            let hy = *o - frame * yi;
            *o = C64::new(hy.im, -hy.re);
            if i < m {
                *o -= half_loss * yi;
            }
        }
    }

    fn step(&mut self, y: &mut [C64], dt: f64) {
        let (h, w, l) = (self.h, self.frame, self.half_loss);
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        Self::rhs(h, w, l, y, k1);
        tmp.iter_mut().zip(y.iter()).zip(k1.iter()).for_each(|((t, y), k)| *t = y + 0.5 * dt * k);
        Self::rhs(h, w, l, tmp, k2);
        tmp.iter_mut().zip(y.iter()).zip(k2.iter()).for_each(|((t, y), k)| *t = y + 0.5 * dt * k);
        Self::rhs(h, w, l, tmp, k3);
        tmp.iter_mut().zip(y.iter()).zip(k3.iter()).for_each(|((t, y), k)| *t = y + dt * k);
        Self::rhs(h, w, l, tmp, k4);
        let c = dt / 6.0;
        for i in 0..y.len() {
            y[i] += c * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }
}

fn frame_and_radius(h: &CoupledHamiltonian, frame: Option<f64>) -> (f64, f64) {
    let (lo, hi) = h.matrix.gershgorin_interval();
    let coupled: Vec<f64> = h.emitters.iter().filter(|e| e.g > 0.0).map(|e| e.omega).collect();
    let w = frame.unwrap_or_else(|| {
        if coupled.is_empty() {
            0.5 * (lo + hi)
        } else {
            coupled.iter().sum::<f64>() / coupled.len() as f64
        }
    });
    (w, (hi - w).abs().max((w - lo).abs()))
}

/// Fixed-step fourth-order Runge-Kutta evolution of the single-excitation
/// amplitudes, with photon loss `-gamma_p / 2` on lattice sites only.
pub fn evolve(h: &CoupledHamiltonian, state0: &QuantumState, opts: &EvolveOptions) -> Result<Trajectory> {
    let m = h.photon_dim;
    if state0.photons.len() != m || state0.emitters.len() != h.emitters.len() {
        return Err(Error::GeometryMismatch(format!(
            "state has {} + {} amplitudes, Hamiltonian expects {} + {}",
            state0.photons.len(),
            state0.emitters.len(),
            m,
            h.emitters.len()
        )));
    }
    let dt = opts.dt;
    if !(dt > 0.0) || !(opts.t_final >= 0.0) || opts.sample_every == 0 {
        return Err(Error::config(format!(
            "evolution needs dt > 0, t_final >= 0 and sample_every >= 1 (got {dt}, {}, {})",
            opts.t_final, opts.sample_every
        )));
    }
    if !(opts.gamma_p >= 0.0) {
        return Err(Error::config(format!("photon loss must satisfy gamma_p >= 0, got {}", opts.gamma_p)));
    }
    let (frame, radius) = frame_and_radius(h, opts.frame);
    if dt * radius > 2.8 {
        return Err(Error::config(format!(
            "dt too large for ||H||: dt * ||H - w_ref|| = {:.3} exceeds the RK4 stability limit 2.8",
            dt * radius
        )));
    }
    let steps = opts.steps();
    let mut snap_steps: Vec<(usize, usize)> = Vec::new();
    for (i, &t) in opts.snapshot_times.iter().enumerate() {
        let k = (t / dt).round();
        if !(k >= 0.0) || k as usize > steps {
            return Err(Error::config(format!("snapshot time {t} outside [0, {}]", opts.t_final)));
        }
        snap_steps.push((k as usize, i));
    }
    snap_steps.sort();

    if opts.dry_run {
        dry_run(h, state0, dt, frame, opts.t_final.min(10.0))?;
    }

    let mut rk = Rk4::new(h, frame, opts.gamma_p);
    let mut y = state0.flatten();
    let n = h.emitters.len();
    let cap = steps / opts.sample_every + 2;
    let mut times = Vec::with_capacity(cap);
    let mut amps: Vec<Vec<C64>> = (0..n).map(|_| Vec::with_capacity(cap)).collect();
    let mut photon_norm = Vec::with_capacity(cap);
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut next_snap = 0;

    for k in 0..=steps {
        let t = k as f64 * dt;
        if k % opts.sample_every == 0 || k == steps {
            let rot = C64::from_polar(1.0, -frame * t);
            times.push(t);
            for (a, amp) in amps.iter_mut().enumerate() {
                amp.push(y[m + a] * rot);
            }
            photon_norm.push(y[..m].iter().map(|c| c.norm_sqr()).sum());
        }
        while next_snap < snap_steps.len() && snap_steps[next_snap].0 == k {
            snapshots.push(Snapshot { t, density: y[..m].iter().map(|c| c.norm_sqr()).collect() });
            next_snap += 1;
        }
        if k < steps {
            rk.step(&mut y, dt);
        }
    }
    let rot = C64::from_polar(1.0, -frame * steps as f64 * dt);
    y.iter_mut().for_each(|c| *c *= rot);
    Ok(Trajectory {
        dt,
        times,
        emitter_amplitudes: amps,
        photon_norm,
        snapshots,
        final_state: QuantumState::from_flat(&y, m),
        gamma_p: opts.gamma_p,
    })
}

fn dry_run(h: &CoupledHamiltonian, state0: &QuantumState, dt: f64, frame: f64, window: f64) -> Result<()> {
    let steps = (window / dt).ceil() as usize;
    if steps == 0 {
        return Ok(());
    }
    let mut rk = Rk4::new(h, frame, 0.0);
    let mut y = state0.flatten();
    let n0: f64 = y.iter().map(|c| c.norm_sqr()).sum();
    for _ in 0..steps {
        rk.step(&mut y, dt);
    }
    let n1: f64 = y.iter().map(|c| c.norm_sqr()).sum();
    let rate = (n1 - n0).abs() / (steps as f64 * dt);
    if rate > NORM_DRIFT_TOLERANCE {
        return Err(Error::config(format!(
            "dt too large for ||H||: lossless dry run drifts the norm by {rate:.3e} per unit time (limit {NORM_DRIFT_TOLERANCE:.0e}) at dt = {dt}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_coupled_hamiltonian, Emitter, EmitterSet};
    use crate::lattice::{build_lattice, LatticeGeometry, PotentialSpec};
    use crate::spectral::diagonalize;

    fn lattice(nx: usize, ny: usize) -> (LatticeGeometry, crate::lattice::HoppingOperator) {
        let g = LatticeGeometry::periodic_y(nx, ny).unwrap();
        let (_, h) = build_lattice(&g, 0.1, &PotentialSpec::Linear { u0: 0.1 }, None).unwrap();
        (g, h)
    }

    #[test]
    fn eigenmode_only_acquires_a_phase() {
        let (g, h) = lattice(6, 5);
        let eig = diagonalize(&h).unwrap();
        let set = EmitterSet::new(&g, vec![Emitter::new((2, 2), -3.0, 0.0).unwrap()]).unwrap();
        let ch = build_coupled_hamiltonian(&h, &set).unwrap();
        let l = 7;
        let mut s = QuantumState::vacuum(30, 1);
        s.photons.copy_from_slice(eig.mode(l));
        let tr = evolve(&ch, &s, &EvolveOptions::new(0.01, 5.0)).unwrap();
        let w = eig.omegas()[l];
        for (a, b) in tr.final_state.photons.iter().zip(eig.mode(l)) {
            assert!((a - b * C64::from_polar(1.0, -w * 5.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn decoupled_emitter_keeps_its_population() {
        let (g, h) = lattice(6, 5);
        let set = EmitterSet::new(&g, vec![Emitter::new((2, 2), -3.0, 0.0).unwrap()]).unwrap();
        let ch = build_coupled_hamiltonian(&h, &set).unwrap();
        let o = EvolveOptions { frame: Some(-3.0), ..EvolveOptions::new(0.02, 20.0) };
        let tr = evolve(&ch, &QuantumState::emitter_excited(30, 1, 0), &o).unwrap();
        assert!(tr.populations(0).iter().all(|p| (p - 1.0).abs() < 1e-9));
        let c = tr.emitter_amplitudes[0].last().unwrap();
        assert!((c - C64::from_polar(1.0, 3.0 * 20.0)).norm() < 1e-9);
    }

    #[test]
    fn uniform_loss_decays_photon_norm() {
        let (g, h) = lattice(6, 5);
        let ch = build_coupled_hamiltonian(&h, &EmitterSet::new(&g, vec![]).unwrap()).unwrap();
        let mut s = QuantumState::vacuum(30, 0);
        s.photons[14] = C64::new(1.0, 0.0);
        let tr = evolve(&ch, &s, &EvolveOptions::new(0.01, 10.0).with_loss(0.05)).unwrap();
        let worst = tr.times.iter().zip(&tr.photon_norm).map(|(t, n)| (n - (-0.05 * t).exp()).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst:e}");
    }

    #[test]
    fn snapshots_and_sampling() {
        let (g, h) = lattice(6, 5);
        let set = EmitterSet::new(&g, vec![Emitter::new((2, 2), -3.0, 0.3).unwrap()]).unwrap();
        let ch = build_coupled_hamiltonian(&h, &set).unwrap();
        let opts = EvolveOptions::new(0.01, 2.0).with_sampling(10).with_snapshots(vec![1.0, 0.5]);
        let tr = evolve(&ch, &QuantumState::emitter_excited(30, 1, 0), &opts).unwrap();
        assert_eq!(tr.times.len(), 21);
        assert_eq!(tr.snapshots.len(), 2);
        assert!((tr.snapshots[0].t - 0.5).abs() < 1e-12);
        let s = tr.snapshot_at(1.0).unwrap();
        assert!((s.density.iter().sum::<f64>() - tr.photon_norm[10]).abs() < 1e-14);
        assert!(evolve(&ch, &QuantumState::emitter_excited(30, 1, 0), &EvolveOptions::new(0.01, 2.0).with_snapshots(vec![3.0])).is_err());
    }

    #[test]
    fn oversized_steps_are_rejected() {
        let (g, h) = lattice(6, 5);
        let set = EmitterSet::new(&g, vec![Emitter::new((2, 2), -3.0, 0.3).unwrap()]).unwrap();
        let ch = build_coupled_hamiltonian(&h, &set).unwrap();
        let s = QuantumState::emitter_excited(30, 1, 0);
        assert!(evolve(&ch, &s, &EvolveOptions::new(1.0, 10.0)).is_err());
        assert!(evolve(&ch, &s, &EvolveOptions::new(0.3, 10.0)).is_err());
    }
}
