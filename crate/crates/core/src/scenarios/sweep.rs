use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transfer::{predicted_transfer_time, run_transfer, TransferOptions};
use super::System;
use crate::dynamics::EmitterSpec;
use crate::error::{Error, Result};
use crate::lattice::{build_potential, LatticeGeometry, PotentialSpec};
use crate::seeding::derive_seed;

/// Scalar results on a rectangular parameter grid; `values[iy][ix]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub x_axis: String,
    pub x: Vec<f64>,
    pub y_axis: String,
    pub y: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// Realizations averaged per cell.
    pub ensemble: usize,
    pub base_seed: Option<u64>,
}

impl SweepGrid {
    pub fn new(
        x_axis: &str,
        x: Vec<f64>,
        y_axis: &str,
        y: Vec<f64>,
        values: Vec<Vec<f64>>,
        ensemble: usize,
        base_seed: Option<u64>,
    ) -> Self {
        Self { x_axis: x_axis.into(), x, y_axis: y_axis.into(), y, values, ensemble, base_seed }
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy][ix]
    }

    /// Cells of the 4-connected region with values above `threshold` that
    /// contains `(ix, iy)`; empty if that cell is below threshold.
    pub fn region_above(&self, ix: usize, iy: usize, threshold: f64) -> Vec<(usize, usize)> {
        let (w, h) = (self.x.len(), self.y.len());
        let mut seen = vec![false; w * h];
        let mut out = Vec::new();
        let mut stack = vec![(ix, iy)];
        while let Some((x, y)) = stack.pop() {
            if x >= w || y >= h || seen[y * w + x] || !(self.values[y][x] > threshold) {
                continue;
            }
            seen[y * w + x] = true;
            out.push((x, y));
            stack.extend([(x + 1, y), (x, y + 1)]);
            if x > 0 {
                stack.push((x - 1, y));
            }
            if y > 0 {
                stack.push((x, y - 1));
            }
        }
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderSweepOptions {
    pub u0: Vec<f64>,
    pub sigma: Vec<f64>,
    pub realizations: usize,
    pub base_seed: u64,
    pub transfer: TransferOptions,
}

/// Seed of realization `r` in grid cell `cell`.
pub fn realization_seed(base: u64, cell: usize, r: usize) -> u64 {
    derive_seed(derive_seed(base, cell as u64), r as u64)
}

/// Mean transfer infidelity `1 - F` over seeded disorder realizations, on a
/// grid of field slopes `u0` (x axis) and disorder widths `sigma` (y axis).
/// Emitters are resolved against the clean linear potential of each column,
/// which also sets the default run length.
pub fn disorder_sweep(geometry: &LatticeGeometry, alpha: f64, emitters: &[EmitterSpec], opts: &DisorderSweepOptions) -> Result<SweepGrid> {
    if opts.realizations == 0 {
        return Err(Error::config("disorder sweep needs at least one realization"));
    }
    let nu = opts.u0.len();
    let jobs: Vec<(usize, usize, usize)> = (0..opts.sigma.len())
        .flat_map(|is| (0..nu).map(move |iu| (is, iu)))
        .flat_map(|(is, iu)| {
            let n = if opts.sigma[is] == 0.0 { 1 } else { opts.realizations };
            (0..n).map(move |r| (is, iu, r))
        })
        .collect();
    let fidelities: Vec<f64> = jobs
        .par_iter()
        .map(|&(is, iu, r)| {
            let clean = build_potential(geometry, &PotentialSpec::Linear { u0: opts.u0[iu] }, None)?;
            let resolved = emitters.iter().map(|s| s.resolve(&clean, alpha)).collect::<Result<Vec<_>>>()?;
            let seed = realization_seed(opts.base_seed, is * nu + iu, r);
            let noise = build_potential(geometry, &PotentialSpec::Disorder { sigma: opts.sigma[is] }, Some(seed))?;
            let mut transfer = opts.transfer.clone();
            if transfer.t_final.is_none() {
                let reference = System::new(alpha, clean.clone(), resolved.clone())?;
                transfer.t_final = predicted_transfer_time(&reference)?.filter(|t| t.is_finite()).map(|t| 2.0 * t);
            }
            let system = System::new(alpha, clean.add(&noise)?, resolved)?;
            Ok(run_transfer(&system, &transfer)?.fidelity)
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![vec![(0.0, 0usize); nu]; opts.sigma.len()];
    for (&(is, iu, _), f) in jobs.iter().zip(&fidelities) {
        sums[is][iu].0 += f;
        sums[is][iu].1 += 1;
    }
    let values = sums.iter().map(|row| row.iter().map(|(s, n)| 1.0 - s / *n as f64).collect()).collect();
    Ok(SweepGrid::new("u0", opts.u0.clone(), "sigma_p", opts.sigma.clone(), values, opts.realizations, Some(opts.base_seed)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_growth() {
        let g = SweepGrid::new(
            "a",
            vec![0.0, 1.0, 2.0],
            "b",
            vec![0.0, 1.0],
            vec![vec![0.95, 0.2, 0.99], vec![0.97, 0.96, 0.5]],
            1,
            None,
        );
        assert_eq!(g.region_above(0, 0, 0.9), vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(g.region_above(2, 0, 0.9), vec![(2, 0)]);
        assert!(g.region_above(1, 0, 0.9).is_empty());
    }

    #[test]
    fn realization_seeds_depend_on_cell_and_index() {
        let s = realization_seed(7, 3, 4);
        assert_eq!(s, realization_seed(7, 3, 4));
        assert_ne!(s, realization_seed(7, 4, 3));
        assert_ne!(s, realization_seed(8, 3, 4));
    }
}
