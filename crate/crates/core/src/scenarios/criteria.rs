use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dynamics::Emitter;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeGeometry, PotentialField};
use crate::propagator::{local_field, LocalField};

pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionCheck {
    pub passed: bool,
    /// Largest relative discrepancy entering the check.
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    /// Both emitters resonant with their local channel, equal channel
    /// frequencies, and joined by one contour of the channel frequency.
    pub resonance: CriterionCheck,
    /// `g_n sqrt(alpha) = U_B~(r_n)` for both emitters.
    pub critical_coupling: CriterionCheck,
    /// `U_B~(r_1) = U_B~(r_2)`.
    pub gradient_match: CriterionCheck,
    pub connected: bool,
    pub fields: [LocalField; 2],
    pub tolerance: f64,
}

impl CriteriaReport {
    pub fn all_passed(&self) -> bool {
        self.resonance.passed && self.critical_coupling.passed && self.gradient_match.passed
    }
}

/// Evaluate the three local-field conditions for transferring an excitation
/// from `emitters[0]` to `emitters[1]`. Frequency mismatches are measured in
/// units of the mean local Landau voltage.
pub fn check_transfer_criteria(v: &PotentialField, alpha: f64, emitters: &[Emitter], tolerance: f64) -> Result<CriteriaReport> {
    if emitters.len() != 2 {
        return Err(Error::config(format!("transfer criteria need two emitters, got {}", emitters.len())));
    }
    let f = [local_field(v, alpha, emitters[0].site)?, local_field(v, alpha, emitters[1].site)?];
    let ub = 0.5 * (f[0].landau_voltage + f[1].landau_voltage);
    if !(ub > 0.0) {
        return Err(Error::config("transfer criteria need a nonzero local field at the emitters"));
    }
    let detune = [
        (emitters[0].omega - f[0].channel_frequency) / ub,
        (emitters[1].omega - f[1].channel_frequency) / ub,
    ];
    let split = (f[0].channel_frequency - f[1].channel_frequency) / ub;
    let connected = contour_connects(v, alpha, emitters[0].site, emitters[1].site, 0.5 * ub)?;
    let margin = detune[0].abs().max(detune[1].abs()).max(split.abs());
    let resonance = CriterionCheck {
        passed: margin <= tolerance && connected,
        margin,
        detail: format!(
            "detunings {:.4}, {:.4} U_B; channel mismatch {:.4} U_B; contour {}",
            detune[0],
            detune[1],
            split,
            if connected { "connects" } else { "does not connect" }
        ),
    };
    let ratio = |n: usize| emitters[n].g * alpha.sqrt() / f[n].landau_voltage - 1.0;
    let (r0, r1) = (ratio(0), ratio(1));
    let critical_coupling = CriterionCheck {
        passed: r0.abs() <= tolerance && r1.abs() <= tolerance,
        margin: r0.abs().max(r1.abs()),
        detail: format!("g sqrt(alpha) / U_B~ - 1 = {r0:.4}, {r1:.4}"),
    };
    let dg = (f[0].landau_voltage - f[1].landau_voltage) / ub;
    let gradient_match = CriterionCheck {
        passed: dg.abs() <= tolerance,
        margin: dg.abs(),
        detail: format!("U_B~ = {:.5}, {:.5}", f[0].landau_voltage, f[1].landau_voltage),
    };
    Ok(CriteriaReport { resonance, critical_coupling, gradient_match, connected, fields: f, tolerance })
}

/// Marching-squares test: does the level set of the local channel frequency
/// through `a` pass within one cell of `b`? `b` must lie within `tolerance`
/// of that level.
pub fn contour_connects(v: &PotentialField, alpha: f64, a: (usize, usize), b: (usize, usize), tolerance: f64) -> Result<bool> {
    let g = *v.geometry();
    let (nx, ny) = (g.nx(), g.ny());
    let field: Vec<Option<f64>> = (0..g.num_sites())
        .map(|i| local_field(v, alpha, g.coords(i)).ok().map(|f| f.channel_frequency))
        .collect();
    let level = field[g.index(a.0, a.1)].ok_or_else(|| Error::config(format!("channel frequency undefined at {a:?}")))?;
    let at_b = field[g.index(b.0, b.1)].ok_or_else(|| Error::config(format!("channel frequency undefined at {b:?}")))?;
    if (at_b - level).abs() > tolerance {
        return Ok(false);
    }
    let cells_x = if g.bc_x() == Boundary::Periodic { nx } else { nx - 1 };
    let cells_y = if g.bc_y() == Boundary::Periodic { ny } else { ny - 1 };
    let corner = |cx: usize, cy: usize, dx: usize, dy: usize| field[g.index((cx + dx) % nx, (cy + dy) % ny)];
    let straddles = |p: Option<f64>, q: Option<f64>| match (p, q) {
        (Some(p), Some(q)) => (p - level) * (q - level) <= 0.0,
        _ => false,
    };
    let crossed = |cx: usize, cy: usize| {
        let c = [corner(cx, cy, 0, 0), corner(cx, cy, 1, 0), corner(cx, cy, 1, 1), corner(cx, cy, 0, 1)];
        c.iter().all(|v| v.is_some()) && (0..4).any(|k| straddles(c[k], c[(k + 1) % 4]))
    };
    let idx = |cx: usize, cy: usize| cy * cells_x + cx;
    let mut seen = vec![false; cells_x * cells_y];
    let mut queue = VecDeque::new();
    for (cx, cy) in touching_cells(&g, a, cells_x, cells_y, 0) {
        if crossed(cx, cy) && !seen[idx(cx, cy)] {
            seen[idx(cx, cy)] = true;
            queue.push_back((cx, cy));
        }
    }
    let targets = touching_cells(&g, b, cells_x, cells_y, 1);
    while let Some((cx, cy)) = queue.pop_front() {
        if targets.contains(&(cx, cy)) {
            return Ok(true);
        }
        // Neighbour across each cell edge the contour crosses.
        let edges = [
            ((0, 0), (1, 0), (0isize, -1isize)),
            ((1, 0), (1, 1), (1, 0)),
            ((1, 1), (0, 1), (0, 1)),
            ((0, 1), (0, 0), (-1, 0)),
        ];
        for ((p, q), (sx, sy)) in edges.map(|(p, q, s)| ((p, q), s)) {
            if !straddles(corner(cx, cy, p.0, p.1), corner(cx, cy, q.0, q.1)) {
                continue;
            }
            let Some(nxc) = step(cx, sx, cells_x, g.bc_x()) else { continue };
            let Some(nyc) = step(cy, sy, cells_y, g.bc_y()) else { continue };
            if !seen[idx(nxc, nyc)] && crossed(nxc, nyc) {
                seen[idx(nxc, nyc)] = true;
                queue.push_back((nxc, nyc));
            }
        }
    }
    Ok(false)
}

fn step(c: usize, d: isize, n: usize, bc: Boundary) -> Option<usize> {
    let t = c as isize + d;
    match bc {
        Boundary::Periodic => Some(t.rem_euclid(n as isize) as usize),
        Boundary::Open if t >= 0 && (t as usize) < n => Some(t as usize),
        Boundary::Open => None,
    }
}

/// Cells having site `s` as a corner, grown by `reach` cells in every direction.
fn touching_cells(g: &LatticeGeometry, s: (usize, usize), cells_x: usize, cells_y: usize, reach: isize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for dy in (-1 - reach)..=reach {
        for dx in (-1 - reach)..=reach {
            if let (Some(x), Some(y)) = (step(s.0, dx, cells_x, g.bc_x()), step(s.1, dy, cells_y, g.bc_y())) {
                if !out.contains(&(x, y)) {
                    out.push((x, y));
                }
            }
        }
    }
    out
}
