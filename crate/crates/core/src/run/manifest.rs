use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::io::sha256_hex;
use crate::dynamics::{classify_regime, markov_rate, Emitter, Regime};
use crate::error::{Error, Result};
use crate::lattice::build_potential;
use crate::spectral::LandauAnalytics;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Relative tolerance for recomputed derived quantities.
pub const DERIVED_TOLERANCE: f64 = 1e-12;

/// Continuum quantities implied by the configuration. Field-dependent values
/// use the slope of the first linear (or saddle) potential term; emitter values
/// refer to the first emitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub alpha: f64,
    pub u0: f64,
    pub magnetic_length: f64,
    pub cyclotron: f64,
    pub landau_voltage: f64,
    pub hall_speed: f64,
    pub lowest_level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
}

impl DerivedQuantities {
    pub fn compute(config: &RunConfig, emitters: &[Emitter]) -> Result<Self> {
        let alpha = config.lattice.alpha;
        let u0 = config.potential.linear_slope().unwrap_or(0.0).abs();
        let p = LandauAnalytics::new(alpha, u0)?;
        let ub = p.landau_voltage();
        let first = emitters.first();
        let decay_rate = match first {
            Some(e) if ub > 0.0 => Some(markov_rate(e.g, alpha, ub, e.omega - p.channel_frequency(e.site.0 as f64))?),
            _ => None,
        };
        let report = first.filter(|_| ub > 0.0).map(|e| classify_regime(e.g, alpha, ub));
        Ok(Self {
            alpha,
            u0,
            magnetic_length: p.magnetic_length(),
            cyclotron: p.cyclotron(),
            landau_voltage: ub,
            hall_speed: p.hall_speed(),
            lowest_level: p.level(0),
            decay_rate,
            coupling_ratio: report.map(|r| r.ratio),
            regime: report.map(|r| r.regime),
        })
    }

    fn pairs(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("alpha", Some(self.alpha)),
            ("u0", Some(self.u0)),
            ("magnetic_length", Some(self.magnetic_length)),
            ("cyclotron", Some(self.cyclotron)),
            ("landau_voltage", Some(self.landau_voltage)),
            ("hall_speed", Some(self.hall_speed)),
            ("lowest_level", Some(self.lowest_level)),
            ("decay_rate", self.decay_rate),
            ("coupling_ratio", self.coupling_ratio),
        ]
    }
}

/// Resolve the configured emitters against the configured potential.
pub fn resolve_emitters(config: &RunConfig) -> Result<Vec<Emitter>> {
    let g = config.lattice.geometry()?;
    let v = build_potential(&g, &config.potential, Some(config.seed))?;
    config.emitters.iter().map(|s| s.resolve(&v, config.lattice.alpha)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub scenario: String,
    pub run_id: String,
    pub seed: u64,
    /// Resolved configuration as TOML.
    pub config: String,
    pub defaults_applied: Vec<String>,
    pub derived: DerivedQuantities,
    pub emitters: Vec<Emitter>,
    pub summary: serde_json::Value,
    pub warnings: Vec<String>,
    pub violations: Vec<String>,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileEntry>,
}

/// Short identifier: the first 16 hex digits of the configuration digest.
pub fn run_id(config: &RunConfig) -> String {
    sha256_hex(config.to_toml().as_bytes())[..16].to_string()
}

impl RunManifest {
    pub fn config(&self) -> Result<RunConfig> {
        toml::from_str(&self.config).map_err(|e| Error::Parse { what: "manifest configuration".into(), reason: e.to_string() })
    }

    /// Recompute the derived quantities from the stored configuration and
    /// compare them with the stored values.
    pub fn verify_derived(&self) -> Result<()> {
        let config = self.config()?;
        let fresh = DerivedQuantities::compute(&config, &resolve_emitters(&config)?)?;
        for ((name, a), (_, b)) in self.derived.pairs().into_iter().zip(fresh.pairs()) {
            let ok = match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() <= DERIVED_TOLERANCE * a.abs().max(b.abs()),
                (None, None) => true,
                _ => false,
            };
            if !ok {
                return Err(Error::Numerical(format!("derived {name}: stored {a:?}, recomputed {b:?}")));
            }
        }
        if self.derived.regime != fresh.regime {
            return Err(Error::Numerical(format!("derived regime: stored {:?}, recomputed {:?}", self.derived.regime, fresh.regime)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests serialize")
    }
}

/// Read a manifest and check its derived quantities.
pub fn load_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| Error::Parse { what: path.display().to_string(), reason: e.to_string() })?;
    m.verify_derived()?;
    Ok(m)
}
