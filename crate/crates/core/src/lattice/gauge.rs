use std::f64::consts::TAU;

use super::geometry::{Axis, Boundary, LatticeGeometry};
use crate::error::{Error, Result};

/// Peierls phases of a uniform flux `alpha` per plaquette in the Landau gauge.
///
/// Hops along `x` carry no phase; the hop `(x, y) -> (x, y + 1)` carries
/// `-2 pi alpha x`. The reverse hop carries the opposite phase. With this sign a
/// potential decreasing along `+x` drives bulk photons toward `+y`; flipping the
/// sign of `alpha` reverses every chirality.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    geometry: LatticeGeometry,
    alpha: f64,
}

impl GaugeField {
    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Phase acquired hopping from site `(x, y)` one step along `+axis`.
    pub fn forward_phase(&self, x: usize, axis: Axis) -> f64 {
        match axis {
            Axis::X => 0.0,
            Axis::Y => -TAU * self.alpha * x as f64,
        }
    }

    /// Phase of the hop `from -> to` between nearest neighbours, `None` if the
    /// sites are not bonded.
    pub fn phase(&self, from: (usize, usize), to: (usize, usize)) -> Option<f64> {
        let g = &self.geometry;
        for axis in [Axis::X, Axis::Y] {
            if g.forward(from.0, from.1, axis) == Some(to) {
                return Some(self.forward_phase(from.0, axis));
            }
            if g.backward(from.0, from.1, axis) == Some(to) {
                return Some(-self.forward_phase(to.0, axis));
            }
        }
        None
    }

    /// Circulation of hopping phases around the plaquette whose lower-left corner
    /// is `(x, y)`, traversed up, right, down, left. Equals `2 pi alpha` mod `2 pi`.
    pub fn plaquette_flux(&self, x: usize, y: usize) -> Option<f64> {
        let g = &self.geometry;
        let up = g.forward(x, y, Axis::Y)?;
        let up_right = g.forward(up.0, up.1, Axis::X)?;
        let right = g.forward(x, y, Axis::X)?;
        Some(
            self.phase((x, y), up)?
                + self.phase(up, up_right)?
                + self.phase(up_right, right)?
                + self.phase(right, (x, y))?,
        )
    }
}

/// Build the Landau-gauge phases for flux `alpha` per plaquette.
///
/// A periodic `x` axis is only gauge-consistent when `alpha * nx` is an integer.
pub fn build_gauge(geometry: &LatticeGeometry, alpha: f64) -> Result<GaugeField> {
    if !alpha.is_finite() {
        return Err(Error::config(format!("flux alpha must be finite, got {alpha}")));
    }
    if geometry.bc_x() == Boundary::Periodic {
        let n = alpha * geometry.nx() as f64;
        if (n - n.round()).abs() > 1e-9 {
            return Err(Error::config(format!(
                "periodic x requires alpha * nx to be an integer, got alpha * nx = {n}"
            )));
        }
    }
    Ok(GaugeField { geometry: *geometry, alpha })
}

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}
