use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, PotentialField};
use crate::spectral::LandauAnalytics;

/// Local-field description of a smooth potential around one site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalField {
    pub grad: [f64; 2],
    /// `|grad V| l_B`
    pub landau_voltage: f64,
    /// `omega_0^LL + V + U_B~^2 / (2 omega_B)`
    pub channel_frequency: f64,
    /// `|grad V| l_B^2`
    pub speed: f64,
}

fn neighbours(n: usize, bc: Boundary, c: usize, axis: &str) -> Result<(usize, usize)> {
    match bc {
        Boundary::Periodic => Ok(((c + n - 1) % n, (c + 1) % n)),
        Boundary::Open if c >= 1 && c + 1 < n => Ok((c - 1, c + 1)),
        Boundary::Open => Err(Error::config(format!(
            "central difference along {axis} needs 1 <= {axis} <= {} on an open axis, got {c}",
            n.saturating_sub(2)
        ))),
    }
}

/// Central-difference gradient of `v` at `(x, y)`.
pub fn gradient(v: &PotentialField, (x, y): (usize, usize)) -> Result<[f64; 2]> {
    let g = v.geometry();
    g.check_site((x, y))?;
    let (xl, xr) = neighbours(g.nx(), g.bc_x(), x, "x")?;
    let (yl, yr) = neighbours(g.ny(), g.bc_y(), y, "y")?;
    Ok([0.5 * (v.at(xr, y) - v.at(xl, y)), 0.5 * (v.at(x, yr) - v.at(x, yl))])
}

pub fn local_field(v: &PotentialField, alpha: f64, site: (usize, usize)) -> Result<LocalField> {
    let grad = gradient(v, site)?;
    let p = LandauAnalytics::new(alpha, 0.0)?;
    let lb = p.magnetic_length();
    let slope = grad[0].hypot(grad[1]);
    let ub = slope * lb;
    Ok(LocalField {
        grad,
        landau_voltage: ub,
        channel_frequency: p.level(0) + v.at(site.0, site.1) + ub * ub / (2.0 * p.cyclotron()),
        speed: slope * lb * lb,
    })
}

/// Output column of a frequency-selective chiral demultiplexer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemuxChannel {
    pub x_out: f64,
    /// Frequency resolution, `U_B`.
    pub resolution: f64,
    /// Number of resolvable channels, `L_x / l_B`.
    pub channels: f64,
}

/// Column `x_out = -l_B (w_in - w_ch(0)) / U_B` at which a photon of frequency
/// `omega_in` travels.
pub fn demux_position(omega_in: f64, params: &LandauAnalytics, nx: usize) -> Result<DemuxChannel> {
    let ub = params.landau_voltage();
    if !(ub.abs() > 0.0) {
        return Err(Error::config("demultiplexing needs a nonzero field, U_B != 0"));
    }
    let lb = params.magnetic_length();
    let w0 = params.channel_frequency(0.0);
    let x_out = -lb * (omega_in - w0) / ub;
    let x_max = (nx - 1) as f64;
    if !(0.0..=x_max).contains(&x_out) {
        let w_edge = params.channel_frequency(x_max);
        let (lo, hi) = if w0 < w_edge { (w0, w_edge) } else { (w_edge, w0) };
        return Err(Error::config(format!(
            "omega_in = {omega_in} maps to x = {x_out:.3}, outside the lattice; admissible window is [{lo}, {hi}]"
        )));
    }
    Ok(DemuxChannel { x_out, resolution: ub.abs(), channels: nx as f64 / lb })
}
