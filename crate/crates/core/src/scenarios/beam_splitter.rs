use serde::{Deserialize, Serialize};

use super::metrics::projected_moments;
use super::System;
use crate::dynamics::{evolve, EvolveOptions, QuantumState, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::LandauAnalytics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterOptions {
    pub dt: f64,
    pub snapshot_time: f64,
    /// Saddle point `(cx, cy)`.
    pub center: [f64; 2],
    /// Dead-zone radius; defaults to `2 l_B`.
    pub dead_zone: Option<f64>,
    pub sample_every: usize,
}

/// Photon norm per sector around the saddle. `back` is the quadrant holding
/// the emitter, `residual` the opposite quadrant plus the dead zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchWeights {
    pub first: f64,
    pub second: f64,
    pub back: f64,
    pub residual: f64,
}

impl BranchWeights {
    pub fn total(&self) -> f64 {
        self.first + self.second + self.back + self.residual
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterReport {
    /// Unit vectors of the two outgoing branches, counter-clockwise first.
    pub branch_directions: [[f64; 2]; 2],
    pub weights: BranchWeights,
    pub photon_norm: f64,
    pub emitter_population: f64,
    pub arrival_time: f64,
    pub snapshot_time: f64,
    /// Skewness of each branch's density profile along its direction.
    pub skewness: [f64; 2],
    pub trajectory: Trajectory,
}

/// Share of offset `(dx, dy)` in each sector, counted counter-clockwise from
/// quadrant `q` (`0` = emitter quadrant, `2` = opposite). Sites on an axis are
/// split evenly between the quadrants they border.
fn sectors(dx: f64, dy: f64, q: usize) -> [f64; 4] {
    let xs: &[bool] = if dx == 0.0 { &[true, false] } else if dx > 0.0 { &[true] } else { &[false] };
    let ys: &[bool] = if dy == 0.0 { &[true, false] } else if dy > 0.0 { &[true] } else { &[false] };
    let w = 1.0 / (xs.len() * ys.len()) as f64;
    let mut out = [0.0; 4];
    for &east in xs {
        for &north in ys {
            let quad = match (east, north) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            out[(quad + 4 - q) % 4] += w;
        }
    }
    out
}

fn quadrant(dx: f64, dy: f64) -> usize {
    sectors(dx, dy, 0).iter().position(|&w| w == 1.0).unwrap_or(0)
}

/// Emit a photon toward a saddle point and split the density into sectors.
pub fn run_beam_splitter(system: &System, opts: &BeamSplitterOptions) -> Result<BeamSplitterReport> {
    if system.emitters().len() != 1 {
        return Err(Error::scenario("beam_splitter", "needs exactly one emitter"));
    }
    let e = *system.emitters().get(0);
    let g = *system.geometry();
    let [cx, cy] = opts.center;
    let (ex, ey) = (e.site.0 as f64 - cx, e.site.1 as f64 - cy);
    if ex == 0.0 || ey == 0.0 {
        return Err(Error::scenario("beam_splitter", "emitter must sit inside a quadrant, off the saddle axes"));
    }
    let q = quadrant(ex, ey);
    let field = system.local(e.site)?;
    let lb = LandauAnalytics::new(system.alpha(), 0.0)?.magnetic_length();
    let dead = opts.dead_zone.unwrap_or(2.0 * lb);
    let arrival = ex.hypot(ey) / field.speed;
    if !(opts.snapshot_time > arrival) {
        return Err(Error::scenario(
            "beam_splitter",
            format!("snapshot at t = {} precedes the arrival at the crossing, t = {arrival:.1}", opts.snapshot_time),
        ));
    }
    let mut eo = EvolveOptions::new(opts.dt, opts.snapshot_time)
        .with_snapshots(vec![opts.snapshot_time])
        .with_sampling(opts.sample_every);
    eo.frame = Some(e.omega);
    let trajectory = evolve(&system.coupled, &QuantumState::emitter_excited(system.coupled.photon_dim, 1, 0), &eo)?;
    let density = &trajectory
        .snapshots
        .last()
        .ok_or_else(|| Error::scenario("beam_splitter", "no snapshot recorded"))?
        .density;

    let mut acc = [0.0; 4];
    let mut dead_weight = 0.0;
    for (i, &d) in density.iter().enumerate() {
        let (x, y) = g.coords(i);
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        if dx.hypot(dy) < dead {
            dead_weight += d;
            continue;
        }
        for (a, w) in acc.iter_mut().zip(sectors(dx, dy, q)) {
            *a += w * d;
        }
    }
    let weights = BranchWeights { first: acc[1], second: acc[3], back: acc[0], residual: acc[2] + dead_weight };
    let quadrant_dir = |k: usize| {
        let a = std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * ((q + k) % 4) as f64;
        [a.cos(), a.sin()]
    };
    let branch_directions = [quadrant_dir(1), quadrant_dir(3)];
    let skew = |k: usize| {
        let target = [1usize, 3][k];
        let dir = branch_directions[k];
        projected_moments(&g, density, (cx, cy), dir, |x, y| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            dx.hypot(dy) >= dead && sectors(dx, dy, q)[target] == 1.0
        })
        .2
    };
    let skewness = [skew(0), skew(1)];
    let last = trajectory.times.len() - 1;
    Ok(BeamSplitterReport {
        branch_directions,
        weights,
        photon_norm: trajectory.photon_norm[last],
        emitter_population: trajectory.emitter_amplitudes[0][last].norm_sqr(),
        arrival_time: arrival,
        snapshot_time: opts.snapshot_time,
        skewness,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_weights_partition_each_site() {
        for (dx, dy) in [(1.0, 2.0), (0.0, 3.0), (-2.0, 0.0), (0.0, -1.0), (-1.0, -1.0), (0.0, 0.0)] {
            for q in 0..4 {
                assert!((sectors(dx, dy, q).iter().sum::<f64>() - 1.0).abs() < 1e-15);
            }
        }
        assert_eq!(sectors(1.0, 1.0, 0), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(sectors(-1.0, 1.0, 0), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(sectors(1.0, 1.0, 2), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(sectors(0.0, 2.0, 0), [0.5, 0.5, 0.0, 0.0]);
        assert_eq!(quadrant(-3.0, -1.0), 2);
    }
}
