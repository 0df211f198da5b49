use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeGeometry, PotentialField};
use crate::propagator::local_field;

/// A resolved two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Emitter {
    pub site: (usize, usize),
    /// Transition frequency `omega_e`.
    pub omega: f64,
    /// Coupling `g`; the emitter couples to its site with `g / 2`.
    pub g: f64,
}

/// Emitter description as it appears in a configuration file. Exactly one of
/// `g` / `coupling_ratio` and one of `omega` / `detuning` must be given.
/// `coupling_ratio` is `g sqrt(alpha) / U_B~` and `detuning` is measured from
/// the local channel frequency, both evaluated from the potential at `site`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSpec {
    pub site: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
}

impl EmitterSpec {
    pub fn resolve(&self, potential: &PotentialField, alpha: f64) -> Result<Emitter> {
        let site = (self.site[0], self.site[1]);
        potential.geometry().check_site(site)?;
        let field = || local_field(potential, alpha, site);
        let g = match (self.g, self.coupling_ratio) {
            (Some(g), None) => g,
            (None, Some(r)) => r * field()?.landau_voltage / alpha.sqrt(),
            _ => return Err(Error::config(format!("emitter at {site:?}: give exactly one of g, coupling_ratio"))),
        };
        let omega = match (self.omega, self.detuning) {
            (Some(w), None) => w,
            (None, Some(d)) => field()?.channel_frequency + d,
            _ => return Err(Error::config(format!("emitter at {site:?}: give exactly one of omega, detuning"))),
        };
        Emitter::new(site, omega, g)
    }
}

impl Emitter {
    pub fn new(site: (usize, usize), omega: f64, g: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::config(format!("emitter coupling must satisfy g >= 0, got {g}")));
        }
        if !omega.is_finite() {
            return Err(Error::config(format!("emitter frequency must be finite, got {omega}")));
        }
        Ok(Self { site, omega, g })
    }

    pub fn position(&self) -> (f64, f64) {
        (self.site.0 as f64, self.site.1 as f64)
    }
}

/// Emitters placed on distinct sites of one lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterSet {
    emitters: Vec<Emitter>,
    sites: Vec<usize>,
    pub warnings: Vec<String>,
}

impl EmitterSet {
    pub fn new(geometry: &LatticeGeometry, emitters: Vec<Emitter>) -> Result<Self> {
        let mut sites = Vec::with_capacity(emitters.len());
        for e in &emitters {
            let i = geometry.check_site(e.site)?;
            if sites.contains(&i) {
                return Err(Error::config(format!("two emitters share site {:?}", e.site)));
            }
            sites.push(i);
        }
        let mut warnings = Vec::new();
        if emitters.len() * 10 > geometry.num_sites() {
            warnings.push(format!(
                "{} emitters on {} sites: the dilute-emitter picture (N << M) is questionable",
                emitters.len(),
                geometry.num_sites()
            ));
        }
        Ok(Self { emitters, sites, warnings })
    }

    pub fn len(&self) -> usize {
        self.emitters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emitters.is_empty()
    }

    pub fn get(&self, n: usize) -> &Emitter {
        &self.emitters[n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Emitter> {
        self.emitters.iter()
    }

    /// Flat site index of emitter `n`.
    pub fn site_index(&self, n: usize) -> usize {
        self.sites[n]
    }
}
