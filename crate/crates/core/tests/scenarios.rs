use hallwave::dynamics::EmitterSpec;
use hallwave::lattice::{build_potential, LatticeGeometry, PotentialSpec};
use hallwave::run::{load_preset, resolve_emitters, with_jobs, RunConfig};
use hallwave::scenarios::{
    disorder_sweep, longitudinal_profile, row_displacement, run_emission, run_transfer, DisorderSweepOptions, EmissionOptions, System,
    TransferOptions,
};

fn system(cfg: &RunConfig) -> System {
    let g = cfg.lattice.geometry().unwrap();
    let v = build_potential(&g, &cfg.potential, Some(cfg.seed)).unwrap();
    System::new(cfg.lattice.alpha, v, resolve_emitters(cfg).unwrap()).unwrap()
}

fn critical(site: [usize; 2]) -> EmitterSpec {
    EmitterSpec { site, g: None, coupling_ratio: Some(1.0), omega: None, detuning: Some(0.0) }
}

#[test]
fn photon_loss_lowers_hardware_fidelity_by_at_most_the_lattice_decay() {
    let cfg = load_preset("hardware").unwrap().config;
    let s = system(&cfg);
    let mut o = TransferOptions::new(cfg.dynamics.dt);
    o.sample_every = cfg.dynamics.sample_every;
    let clean = run_transfer(&s, &o).unwrap();
    o.gamma_p = cfg.dynamics.gamma_p;
    let lossy = run_transfer(&s, &o).unwrap();
    assert!(clean.criteria.as_ref().unwrap().all_passed());
    assert!(clean.fidelity > 0.85, "{}", clean.fidelity);
    let floor = clean.fidelity * (-cfg.dynamics.gamma_p * lossy.t_star).exp();
    assert!(lossy.fidelity < clean.fidelity, "{} vs {}", lossy.fidelity, clean.fidelity);
    assert!(lossy.fidelity > 0.99 * floor, "{} below {floor}", lossy.fidelity);
}

/// Mean row displacement of the emitted photon, counted toward +y.
fn drift(u0: f64) -> f64 {
    let g = LatticeGeometry::periodic_y(16, 40).unwrap();
    let v = build_potential(&g, &PotentialSpec::Linear { u0 }, None).unwrap();
    let e = critical([8, 10]).resolve(&v, 0.1).unwrap();
    let s = System::new(0.1, v, vec![e]).unwrap();
    let mut o = EmissionOptions::new(0.02, 30.0);
    o.sample_every = 50;
    o.snapshot_times = vec![30.0];
    let r = run_emission(&s, &o).unwrap();
    let h = longitudinal_profile(&g, &r.trajectory.snapshots[0].density);
    let norm: f64 = h.iter().sum();
    h.iter().enumerate().map(|(y, w)| row_displacement(&g, y, 10, 1.0) * w).sum::<f64>() / norm
}

#[test]
fn photons_drift_along_plus_y_for_a_positive_field() {
    let (up, down) = (drift(0.1), drift(-0.1));
    assert!(up > 2.0, "{up}");
    assert!(down < -2.0, "{down}");
}

#[test]
fn disorder_sweeps_do_not_depend_on_the_thread_count() {
    let g = LatticeGeometry::open(9, 9).unwrap();
    let mut transfer = TransferOptions::new(0.04);
    transfer.t_final = Some(20.0);
    transfer.sample_every = 5;
    let o = DisorderSweepOptions { u0: vec![0.1, 0.2], sigma: vec![0.0, 0.1], realizations: 3, base_seed: 5, transfer };
    let emitters = [critical([4, 1]), critical([4, 7])];
    let a = with_jobs(Some(1), || disorder_sweep(&g, 0.1, &emitters, &o)).unwrap();
    let b = with_jobs(Some(3), || disorder_sweep(&g, 0.1, &emitters, &o)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.base_seed, Some(5));
    assert!(a.values.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
}
