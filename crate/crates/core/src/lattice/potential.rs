use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::geometry::{Boundary, LatticeGeometry};
use crate::error::{Error, Result};
use crate::seeding::derive_seed;

fn default_wall_height() -> f64 {
    4.0
}

fn default_wall_power() -> u32 {
    4
}

/// Recipe for an on-site frequency landscape `V(x, y)` in units of `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Uniform {
        value: f64,
    },
    /// Synthetic electric field: `V = -u0 * x`.
    Linear {
        u0: f64,
    },
    /// Soft walls `height * [((2x - Lx)/Lx)^(2p) + ((2y - Ly)/Ly)^(2p)]` with
    /// `L = n - 1`, so both walls of an axis reach `height`.
    Confining {
        #[serde(default = "default_wall_height")]
        height: f64,
        #[serde(default = "default_wall_power")]
        power: u32,
    },
    /// Independent Gaussian offsets with standard deviation `sigma`.
    Disorder {
        sigma: f64,
    },
    /// Linear saddle `u0 * (|x - cx| - |y - cy|)`.
    Saddle {
        u0: f64,
        center: [f64; 2],
    },
    /// Gaussian-filtered white noise, rescaled so that the RMS gradient
    /// magnitude over interior sites equals `gradient`.
    SmoothRandom {
        correlation_length: f64,
        gradient: f64,
    },
    /// Plain-text matrix, `ny` rows (row `r` is `y = r`) by `nx` columns.
    Grid {
        path: PathBuf,
    },
    Sum {
        terms: Vec<PotentialSpec>,
    },
}

impl PotentialSpec {
    pub fn is_stochastic(&self) -> bool {
        match self {
            PotentialSpec::Disorder { .. } | PotentialSpec::SmoothRandom { .. } => true,
            PotentialSpec::Sum { terms } => terms.iter().any(|t| t.is_stochastic()),
            _ => false,
        }
    }

    /// Field slope `u0` of the first linear (or saddle) component, if any.
    pub fn linear_slope(&self) -> Option<f64> {
        match self {
            PotentialSpec::Linear { u0 } | PotentialSpec::Saddle { u0, .. } => Some(*u0),
            PotentialSpec::Sum { terms } => terms.iter().find_map(|t| t.linear_slope()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    geometry: LatticeGeometry,
    values: Vec<f64>,
    spec: PotentialSpec,
    seed: Option<u64>,
}

impl PotentialField {
    /// Wrap explicit values; the provenance is recorded as an in-memory grid.
    pub fn from_values(geometry: &LatticeGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.num_sites() {
            return Err(Error::GeometryMismatch(format!(
                "{} potential values for {} sites",
                values.len(),
                geometry.num_sites()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::config(format!("potential value {v} is not finite")));
        }
        Ok(Self {
            geometry: *geometry,
            values,
            spec: PotentialSpec::Grid { path: PathBuf::from("<memory>") },
            seed: None,
        })
    }

    pub fn zero(geometry: &LatticeGeometry) -> Self {
        Self {
            geometry: *geometry,
            values: vec![0.0; geometry.num_sites()],
            spec: PotentialSpec::Uniform { value: 0.0 },
            seed: None,
        }
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[self.geometry.index(x, y)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise sum with another field on the same lattice.
    pub fn add(&self, other: &PotentialField) -> Result<PotentialField> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch("adding potentials on different lattices".into()));
        }
        Ok(PotentialField {
            geometry: self.geometry,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            spec: PotentialSpec::Sum { terms: vec![self.spec.clone(), other.spec.clone()] },
            seed: self.seed.or(other.seed),
        })
    }
}

/// Evaluate a potential recipe on `geometry`.
///
/// Stochastic variants require `seed`; inside a `sum`, term `k` draws from
/// `derive_seed(seed, k)`.
pub fn build_potential(
    geometry: &LatticeGeometry,
    spec: &PotentialSpec,
    seed: Option<u64>,
) -> Result<PotentialField> {
    let values = evaluate(geometry, spec, seed)?;
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::config(format!("potential produced non-finite value {v}")));
    }
    Ok(PotentialField { geometry: *geometry, values, spec: spec.clone(), seed })
}

fn evaluate(g: &LatticeGeometry, spec: &PotentialSpec, seed: Option<u64>) -> Result<Vec<f64>> {
    let (nx, ny) = (g.nx(), g.ny());
    let sites = || (0..ny).flat_map(move |y| (0..nx).map(move |x| (x as f64, y as f64)));
    match spec {
        PotentialSpec::Uniform { value } => Ok(vec![*value; g.num_sites()]),
        PotentialSpec::Linear { u0 } => Ok(sites().map(|(x, _)| -u0 * x).collect()),
        PotentialSpec::Confining { height, power } => {
            if *height <= 0.0 {
                return Err(Error::config(format!("confining wall height must be > 0, got {height}")));
            }
            if *power == 0 {
                return Err(Error::config("confining wall power must be >= 1"));
            }
            let lx = (nx.max(2) - 1) as f64;
            let ly = (ny.max(2) - 1) as f64;
            let p = 2 * *power as i32;
            Ok(sites()
                .map(|(x, y)| height * (((2.0 * x - lx) / lx).powi(p) + ((2.0 * y - ly) / ly).powi(p)))
                .collect())
        }
        PotentialSpec::Disorder { sigma } => {
            if !(*sigma >= 0.0) {
                return Err(Error::config(format!("disorder sigma must be >= 0, got {sigma}")));
            }
            let seed = seed.ok_or_else(|| Error::config("disorder potential needs a seed"))?;
            if *sigma == 0.0 {
                return Ok(vec![0.0; g.num_sites()]);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..g.num_sites())
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    sigma * z
                })
                .collect())
        }
        PotentialSpec::Saddle { u0, center } => Ok(sites()
            .map(|(x, y)| u0 * ((x - center[0]).abs() - (y - center[1]).abs()))
            .collect()),
        PotentialSpec::SmoothRandom { correlation_length, gradient } => {
            let seed = seed.ok_or_else(|| Error::config("smooth_random potential needs a seed"))?;
            smooth_random(g, *correlation_length, *gradient, seed)
        }
        PotentialSpec::Grid { path } => load_grid(g, path),
        PotentialSpec::Sum { terms } => {
            let mut acc = vec![0.0; g.num_sites()];
            for (k, term) in terms.iter().enumerate() {
                let term_seed = seed.map(|s| derive_seed(s, k as u64));
                if term.is_stochastic() && term_seed.is_none() {
                    return Err(Error::config(format!("sum term {k} is stochastic and needs a seed")));
                }
                for (a, v) in acc.iter_mut().zip(evaluate(g, term, term_seed)?) {
                    *a += v;
                }
            }
            Ok(acc)
        }
    }
}

fn smooth_random(g: &LatticeGeometry, xi: f64, gradient: f64, seed: u64) -> Result<Vec<f64>> {
    if !(xi > 0.0) {
        return Err(Error::config(format!("correlation length must be > 0, got {xi}")));
    }
    if !(gradient >= 0.0) {
        return Err(Error::config(format!("target gradient must be >= 0, got {gradient}")));
    }
    let (nx, ny) = (g.nx(), g.ny());
    let reach = (4.0 * xi).ceil() as usize;
    // Open axes are padded so edge sites see as much noise as bulk sites.
    let pad_x = if g.bc_x() == Boundary::Open { reach } else { 0 };
    let pad_y = if g.bc_y() == Boundary::Open { reach } else { 0 };
    let (wx, wy) = (nx + 2 * pad_x, ny + 2 * pad_y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..wx * wy).map(|_| StandardNormal.sample(&mut rng)).collect();
    let kernel: Vec<f64> = (0..=reach)
        .map(|d| (-(d as f64).powi(2) / (2.0 * xi * xi)).exp())
        .collect();

    let wrap = |c: isize, n: usize, periodic: bool| -> Option<usize> {
        if periodic {
            Some(c.rem_euclid(n as isize) as usize)
        } else if c >= 0 && (c as usize) < n {
            Some(c as usize)
        } else {
            None
        }
    };
    // Separable convolution: along x, then along y.
    let px = g.bc_x() == Boundary::Periodic;
    let py = g.bc_y() == Boundary::Periodic;
    let mut tmp = vec![0.0; wx * wy];
    for y in 0..wy {
        for x in 0..wx {
            let mut s = 0.0;
            for d in -(reach as isize)..=(reach as isize) {
                if let Some(xx) = wrap(x as isize + d, wx, px) {
                    s += kernel[d.unsigned_abs()] * noise[y * wx + xx];
                }
            }
            tmp[y * wx + x] = s;
        }
    }
    let mut values = Vec::with_capacity(nx * ny);
    for y in 0..ny {
        for x in 0..nx {
            let (cx, cy) = (x + pad_x, y + pad_y);
            let mut s = 0.0;
            for d in -(reach as isize)..=(reach as isize) {
                if let Some(yy) = wrap(cy as isize + d, wy, py) {
                    s += kernel[d.unsigned_abs()] * tmp[yy * wx + cx];
                }
            }
            values.push(s);
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= mean);

    let rms = rms_gradient(g, &values);
    if rms > 0.0 {
        let scale = gradient / rms;
        values.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(values)
}

/// RMS of the central-difference gradient magnitude over sites that have both
/// neighbours along each axis.
pub fn rms_gradient(g: &LatticeGeometry, values: &[f64]) -> f64 {
    use super::geometry::Axis;
    let mut acc = 0.0;
    let mut count = 0usize;
    for y in 0..g.ny() {
        for x in 0..g.nx() {
            let nb = (
                g.forward(x, y, Axis::X),
                g.backward(x, y, Axis::X),
                g.forward(x, y, Axis::Y),
                g.backward(x, y, Axis::Y),
            );
            if let (Some(xp), Some(xm), Some(yp), Some(ym)) = nb {
                let v = |p: (usize, usize)| values[g.index(p.0, p.1)];
                let gx = 0.5 * (v(xp) - v(xm));
                let gy = 0.5 * (v(yp) - v(ym));
                acc += gx * gx + gy * gy;
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        (acc / count as f64).sqrt()
    }
}

fn load_grid(g: &LatticeGeometry, path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_grid(g, &text).map_err(|reason| Error::Parse { what: path.display().to_string(), reason })
}

/// Parse a whitespace-separated `ny x nx` matrix; blank lines and `#` comments are skipped.
pub fn parse_grid(g: &LatticeGeometry, text: &str) -> std::result::Result<Vec<f64>, String> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if rows.len() != g.ny() {
        return Err(format!("expected {} rows, found {}", g.ny(), rows.len()));
    }
    let mut values = Vec::with_capacity(g.num_sites());
    for (r, row) in rows.iter().enumerate() {
        let parsed: std::result::Result<Vec<f64>, _> = row.split_whitespace().map(str::parse::<f64>).collect();
        let parsed = parsed.map_err(|e| format!("row {r}: {e}"))?;
        if parsed.len() != g.nx() {
            return Err(format!("row {r}: expected {} columns, found {}", g.nx(), parsed.len()));
        }
        values.extend(parsed);
    }
    Ok(values)
}
