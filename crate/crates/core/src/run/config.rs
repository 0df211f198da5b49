use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::{EmitterSpec, KernelSpec, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::lattice::{build_gauge, Boundary, LatticeGeometry, PotentialSpec};
use crate::propagator::DEFAULT_BROADENING;

fn open() -> Boundary {
    Boundary::Open
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "open")]
    pub bc_x: Boundary,
    #[serde(default = "open")]
    pub bc_y: Boundary,
    pub alpha: f64,
}

impl LatticeConfig {
    pub fn geometry(&self) -> Result<LatticeGeometry> {
        LatticeGeometry::new(self.nx, self.ny, self.bc_x, self.bc_y)
    }
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub gamma_p: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "one")]
    pub sample_every: usize,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self { dt: DEFAULT_DT, t_final: None, gamma_p: 0.0, snapshot_times: vec![], sample_every: 1 }
    }
}

fn broadening() -> f64 {
    DEFAULT_BROADENING
}

fn tolerance() -> f64 {
    crate::scenarios::DEFAULT_RELATIVE_TOLERANCE
}

fn default_points() -> usize {
    801
}

/// What a run computes. Sites are `[x, y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    /// Eigenfrequencies against the tilted Landau bands.
    Spectrum,
    Ldos {
        site: [usize; 2],
        omega_min: f64,
        omega_max: f64,
        #[serde(default = "default_points")]
        points: usize,
        #[serde(default = "broadening")]
        broadening: f64,
        /// Landau levels whose analytic profile is exported alongside.
        #[serde(default)]
        levels: Vec<usize>,
    },
    Greens {
        source: [usize; 2],
        target: [usize; 2],
        #[serde(default = "default_points")]
        points: usize,
        /// Also evaluate the lowest-Landau-level closed form.
        #[serde(default)]
        continuum: bool,
        /// Times at which `|G(t, r, source)|` maps are stored.
        #[serde(default)]
        map_times: Vec<f64>,
    },
    /// Plain time evolution from one excited emitter or one photon site.
    Evolve {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        excite_emitter: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        excite_site: Option<[usize; 2]>,
    },
    Emission {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<KernelSpec>,
    },
    /// Emitter excitation spectra versus coupling, in units of `U_B / sqrt(alpha)`.
    Excitation {
        coupling_ratios: Vec<f64>,
        omega_min: f64,
        omega_max: f64,
        #[serde(default = "default_points")]
        points: usize,
        #[serde(default = "broadening")]
        broadening: f64,
    },
    /// Memory-kernel solution for the configured emitters.
    Kernel { kernel: KernelSpec },
    Revival,
    RevivalMap {
        coupling_ratios: Vec<f64>,
        /// In units of `U_B`.
        detunings: Vec<f64>,
        ly: f64,
    },
    Transfer {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<[f64; 2]>,
        #[serde(default = "tolerance")]
        tolerance: f64,
    },
    DisorderSweep {
        u0: Vec<f64>,
        sigma: Vec<f64>,
        realizations: usize,
    },
    BeamSplitter {
        snapshot_time: f64,
        center: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dead_zone: Option<f64>,
    },
}

impl ScenarioConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioConfig::Spectrum => "spectrum",
            ScenarioConfig::Ldos { .. } => "ldos",
            ScenarioConfig::Greens { .. } => "greens",
            ScenarioConfig::Evolve { .. } => "evolve",
            ScenarioConfig::Emission { .. } => "emission",
            ScenarioConfig::Excitation { .. } => "excitation",
            ScenarioConfig::Kernel { .. } => "kernel",
            ScenarioConfig::Revival => "revival",
            ScenarioConfig::RevivalMap { .. } => "revival_map",
            ScenarioConfig::Transfer { .. } => "transfer",
            ScenarioConfig::DisorderSweep { .. } => "disorder_sweep",
            ScenarioConfig::BeamSplitter { .. } => "beam_splitter",
        }
    }
}

fn default_potential() -> PotentialSpec {
    PotentialSpec::Linear { u0: 0.0 }
}

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base seed; stochastic potentials and sweep realizations derive from it.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub lattice: LatticeConfig,
    #[serde(default = "default_potential")]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub emitters: Vec<EmitterSpec>,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default = "default_scenario")]
    pub scenario: ScenarioConfig,
}

fn default_scenario() -> ScenarioConfig {
    ScenarioConfig::Spectrum
}

/// A parsed configuration plus the defaults that were filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: RunConfig,
    pub defaults_applied: Vec<String>,
}

const DEFAULTS: &[(&[&str], &str)] = &[
    (&["seed"], "seed = 0"),
    (&["lattice", "bc_x"], "lattice.bc_x = \"open\""),
    (&["lattice", "bc_y"], "lattice.bc_y = \"open\""),
    (&["potential"], "potential = { kind = \"linear\", u0 = 0.0 }"),
    (&["dynamics", "dt"], "dynamics.dt = 0.01"),
    (&["dynamics", "gamma_p"], "dynamics.gamma_p = 0.0"),
    (&["dynamics", "sample_every"], "dynamics.sample_every = 1"),
    (&["scenario"], "scenario = { kind = \"spectrum\" }"),
];

fn has_key(table: &toml::Table, path: &[&str]) -> bool {
    match path {
        [] => true,
        [k] => table.contains_key(*k),
        [k, rest @ ..] => match table.get(*k) {
            Some(toml::Value::Table(t)) => has_key(t, rest),
            _ => false,
        },
    }
}

/// Parse and validate a TOML run configuration.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let raw: toml::Table = toml::from_str(text).map_err(|e| Error::Parse { what: "configuration".into(), reason: e.to_string() })?;
    let config: RunConfig =
        toml::from_str(text).map_err(|e| Error::Parse { what: "configuration".into(), reason: e.to_string() })?;
    config.validate()?;
    let defaults_applied = DEFAULTS
        .iter()
        .filter(|(path, _)| !has_key(&raw, path))
        .map(|(_, d)| d.to_string())
        .collect();
    Ok(ParsedConfig { config, defaults_applied })
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let g = self.lattice.geometry()?;
        build_gauge(&g, self.lattice.alpha)?;
        let d = &self.dynamics;
        if !(d.dt > 0.0) {
            return Err(Error::config(format!("dynamics.dt must be > 0, got {}", d.dt)));
        }
        if let Some(t) = d.t_final {
            if !(t >= 0.0) {
                return Err(Error::config(format!("dynamics.t_final must be >= 0, got {t}")));
            }
        }
        if !(d.gamma_p >= 0.0) {
            return Err(Error::config(format!("dynamics.gamma_p must be >= 0, got {}", d.gamma_p)));
        }
        if d.sample_every == 0 {
            return Err(Error::config("dynamics.sample_every must be >= 1"));
        }
        for e in &self.emitters {
            g.check_site((e.site[0], e.site[1]))?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configurations serialize")
    }
}
