use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{Boundary, HoppingOperator};
use crate::spectral::{diagonalize, mode_center_x, LandauAnalytics};

/// Modes with `BULK_MARGIN < <x> < nx - BULK_MARGIN` count as bulk modes.
pub const BULK_MARGIN: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub lambda: usize,
    pub omega: f64,
    pub mean_x: f64,
    pub edge: bool,
    /// Landau level whose tilted band lies closest to the mode.
    pub level: usize,
    /// `omega` minus the analytic frequency of `level` at `mean_x`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: LandauAnalytics,
    pub rows: Vec<SpectrumRow>,
    pub bulk_lowest_level_count: usize,
    pub bulk_lowest_level_max_deviation: f64,
    /// Modes within `omega_B / 4` of the lowest Landau level frequency.
    pub lowest_level_window_count: usize,
}

/// Diagonalize `h` and compare every mode to the tilted Landau bands of a
/// linear potential with slope `u0`.
pub fn spectrum_report(h: &HoppingOperator, u0: f64) -> Result<SpectrumReport> {
    let geometry = h.geometry();
    let params = LandauAnalytics::new(h.alpha(), u0)?;
    let eig = diagonalize(h)?;
    let nx = geometry.nx() as f64;
    let x_open = geometry.bc_x() == Boundary::Open;
    let levels = (0..=crate::spectral::MAX_LEVEL).take_while(|&l| params.level(l) < 4.5).count().max(1);
    let rows: Vec<SpectrumRow> = eig
        .omegas()
        .iter()
        .enumerate()
        .map(|(lambda, &omega)| {
            let mean_x = mode_center_x(geometry, eig.mode(lambda));
            let (level, deviation) = (0..levels)
                .map(|l| (l, omega - params.analytic_spectrum_at_x(l, mean_x)))
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .unwrap();
            let edge = x_open && !(mean_x > BULK_MARGIN && mean_x < nx - BULK_MARGIN);
            SpectrumRow { lambda, omega, mean_x, edge, level, deviation }
        })
        .collect();
    let bulk: Vec<&SpectrumRow> = rows.iter().filter(|r| !r.edge && r.level == 0).collect();
    let w0 = params.level(0);
    let window = params.cyclotron() / 4.0;
    Ok(SpectrumReport {
        params,
        bulk_lowest_level_count: bulk.len(),
        bulk_lowest_level_max_deviation: bulk.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max),
        lowest_level_window_count: rows.iter().filter(|r| (r.omega - w0).abs() <= window).count(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, LatticeGeometry, PotentialSpec};

    #[test]
    fn flat_lattice_lowest_level_holds_alpha_m_states() {
        let g = LatticeGeometry::periodic_y(20, 20).unwrap();
        let (_, h) = build_lattice(&g, 0.1, &PotentialSpec::Linear { u0: 0.0 }, None).unwrap();
        let r = spectrum_report(&h, 0.0).unwrap();
        let expected = 0.1 * 400.0;
        assert!((r.lowest_level_window_count as f64 - expected).abs() <= 0.1 * expected, "{}", r.lowest_level_window_count);
    }
}
