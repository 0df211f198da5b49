use serde::{Deserialize, Serialize};

use crate::lattice::{Boundary, LatticeGeometry};

/// Shape descriptors of a photon wavepacket, computed on the normalized density.
/// Longitudinal quantities use the row displacement from `origin`, taken in
/// `[-ny/2, ny/2)` on periodic axes and multiplied by the propagation direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavepacketMetrics {
    pub norm: f64,
    pub centroid: [f64; 2],
    pub sigma_x: f64,
    /// Mean longitudinal displacement from the origin row.
    pub mean_displacement: f64,
    pub sigma_y: f64,
    pub skewness: f64,
    /// Density fraction more than `2 l_B` upstream of the origin.
    pub leakage: f64,
}

/// `h(y) = sum_x |phi(x, y)|^2`
pub fn longitudinal_profile(geometry: &LatticeGeometry, density: &[f64]) -> Vec<f64> {
    let nx = geometry.nx();
    density.chunks(nx).map(|row| row.iter().sum()).collect()
}

/// Signed displacement of row `y` from `y0` along `direction` (+1 or -1).
pub fn row_displacement(geometry: &LatticeGeometry, y: usize, y0: usize, direction: f64) -> f64 {
    let ny = geometry.ny() as i64;
    let mut d = y as i64 - y0 as i64;
    if geometry.bc_y() == Boundary::Periodic {
        d = (d * direction as i64).rem_euclid(ny);
        if d >= (ny + 1) / 2 {
            d -= ny;
        }
        return d as f64;
    }
    d as f64 * direction
}

/// Weighted mean, standard deviation and skewness of `(value, weight)` pairs.
pub fn moments(samples: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64, f64) {
    let w: f64 = samples.clone().map(|(_, w)| w).sum();
    if !(w > 0.0) {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = samples.clone().map(|(v, w)| v * w).sum::<f64>() / w;
    let var = samples.clone().map(|(v, w)| (v - mean).powi(2) * w).sum::<f64>() / w;
    let m3 = samples.map(|(v, w)| (v - mean).powi(3) * w).sum::<f64>() / w;
    let sd = var.sqrt();
    (mean, sd, if sd > 0.0 { m3 / sd.powi(3) } else { 0.0 })
}

impl WavepacketMetrics {
    pub fn compute(geometry: &LatticeGeometry, density: &[f64], origin: (usize, usize), direction: f64, lb: f64) -> Self {
        let norm: f64 = density.iter().sum();
        let nx = geometry.nx();
        let col = |i: usize| (i % nx) as f64;
        let (xbar, sigma_x, _) = moments(density.iter().enumerate().map(|(i, &d)| (col(i), d)));
        let h = longitudinal_profile(geometry, density);
        let disp: Vec<f64> = (0..geometry.ny()).map(|y| row_displacement(geometry, y, origin.1, direction)).collect();
        let (mean_d, sigma_y, skewness) = moments(disp.iter().copied().zip(h.iter().copied()));
        let upstream: f64 = disp.iter().zip(&h).filter(|(d, _)| **d < -2.0 * lb).map(|(_, w)| w).sum();
        let mut ybar = origin.1 as f64 + direction * mean_d;
        if geometry.bc_y() == Boundary::Periodic {
            ybar = ybar.rem_euclid(geometry.ny() as f64);
        }
        Self {
            norm,
            centroid: [xbar, ybar],
            sigma_x,
            mean_displacement: mean_d,
            sigma_y,
            skewness,
            leakage: if norm > 0.0 { upstream / norm } else { 0.0 },
        }
    }
}

/// Mean, standard deviation and skewness of the density projected onto the
/// unit vector `direction`, restricted to sites where `keep(x, y)` holds.
/// Offsets from `origin` use the minimal image on periodic axes.
pub fn projected_moments(
    geometry: &LatticeGeometry,
    density: &[f64],
    origin: (f64, f64),
    direction: [f64; 2],
    keep: impl Fn(usize, usize) -> bool,
) -> (f64, f64, f64) {
    let image = |d: f64, n: usize, bc: Boundary| {
        if bc == Boundary::Periodic {
            let n = n as f64;
            d - n * (d / n).round()
        } else {
            d
        }
    };
    let samples: Vec<(f64, f64)> = density
        .iter()
        .enumerate()
        .filter_map(|(i, &w)| {
            let (x, y) = geometry.coords(i);
            keep(x, y).then(|| {
                let dx = image(x as f64 - origin.0, geometry.nx(), geometry.bc_x());
                let dy = image(y as f64 - origin.1, geometry.ny(), geometry.bc_y());
                (dx * direction[0] + dy * direction[1], w)
            })
        })
        .collect();
    moments(samples.iter().copied())
}

/// Least-squares decay length `L` of `h ~ exp(-(d_peak - d) / L)` behind the peak,
/// fitted over displacements in `[lo, hi]`.
pub fn tail_length(displacements: &[f64], profile: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = displacements
        .iter()
        .zip(profile)
        .filter(|(d, h)| **d >= lo && **d <= hi && **h > 0.0)
        .map(|(d, h)| (*d, h.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope > 0.0).then(|| 1.0 / slope)
}

/// Least-squares exponential rate of `p(t) ~ exp(-rate t)` over `t in [lo, hi]`.
pub fn fit_exponential_rate(times: &[f64], values: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= lo && **t <= hi && **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

/// Angular frequency of the strongest oscillation of `values` (mean removed),
/// scanned on `[w_lo, w_hi]` and refined by a parabola through the peak.
pub fn dominant_frequency(times: &[f64], values: &[f64], w_lo: f64, w_hi: f64, points: usize) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let power = |w: f64| {
        let (mut c, mut s) = (0.0, 0.0);
        for (t, v) in times.iter().zip(values) {
            let (sn, cs) = (w * t).sin_cos();
            c += (v - mean) * cs;
            s += (v - mean) * sn;
        }
        c * c + s * s
    };
    let step = (w_hi - w_lo) / (points - 1) as f64;
    let p: Vec<f64> = (0..points).map(|k| power(w_lo + step * k as f64)).collect();
    let k = (0..points).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    if k == 0 || k + 1 == points {
        return w_lo + step * k as f64;
    }
    let (a, b, c) = (p[k - 1], p[k], p[k + 1]);
    let shift = 0.5 * (a - c) / (a - 2.0 * b + c);
    w_lo + step * (k as f64 + shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_packet_metrics() {
        let g = LatticeGeometry::periodic_y(21, 40).unwrap();
        let mut d = vec![0.0; g.num_sites()];
        for y in 0..40 {
            for x in 0..21 {
                let dy = row_displacement(&g, y, 35, 1.0) - 8.0;
                d[g.index(x, y)] = (-((x as f64 - 10.0).powi(2)) / 2.0 / 1.5f64.powi(2) - dy * dy / 8.0).exp();
            }
        }
        let m = WavepacketMetrics::compute(&g, &d, (10, 35), 1.0, 1.26);
        assert!((m.sigma_x - 1.5).abs() < 1e-3);
        assert!((m.mean_displacement - 8.0).abs() < 1e-6);
        assert!((m.centroid[1] - 3.0).abs() < 1e-6);
        assert!(m.skewness.abs() < 1e-6);
        assert!(m.leakage < 1e-6);
    }

    #[test]
    fn displacement_wraps_and_flips() {
        let g = LatticeGeometry::periodic_y(3, 10).unwrap();
        assert_eq!(row_displacement(&g, 1, 8, 1.0), 3.0);
        assert_eq!(row_displacement(&g, 1, 8, -1.0), -3.0);
        assert_eq!(row_displacement(&g, 3, 8, 1.0), -5.0);
        let o = LatticeGeometry::open(3, 10).unwrap();
        assert_eq!(row_displacement(&o, 1, 8, -1.0), 7.0);
    }

    #[test]
    fn fits_recover_known_parameters() {
        let t: Vec<f64> = (0..200).map(|k| k as f64 * 0.5).collect();
        let p: Vec<f64> = t.iter().map(|t| (-0.03 * t).exp()).collect();
        assert!((fit_exponential_rate(&t, &p, 10.0, 90.0).unwrap() - 0.03).abs() < 1e-12);
        let d: Vec<f64> = (0..30).map(|k| k as f64).collect();
        let h: Vec<f64> = d.iter().map(|d| (d / 4.0).exp()).collect();
        assert!((tail_length(&d, &h, 2.0, 20.0).unwrap() - 4.0).abs() < 1e-9);
        let osc: Vec<f64> = t.iter().map(|t| (0.5 * 0.1427 * t).cos().powi(2)).collect();
        assert!((dominant_frequency(&t, &osc, 0.01, 1.0, 400) - 0.1427).abs() < 2e-3);
    }
}
