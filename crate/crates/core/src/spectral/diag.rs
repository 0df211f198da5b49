use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{HoppingOperator, LatticeGeometry};
use crate::sparse::CsrMatrix;

pub const DEFAULT_DIAG_CAP: usize = 5000;

/// Full eigendecomposition of a Hermitian operator.
///
/// Eigenfrequencies ascend. Each mode is normalized and its first component with
/// magnitude above `1e-6` of the mode's largest component is made real-positive,
/// so overlaps and exports are reproducible.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    dim: usize,
    omegas: Vec<f64>,
    /// Column-major: mode `l` occupies `modes[l * dim .. (l + 1) * dim]`.
    modes: Vec<C64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn mode(&self, l: usize) -> &[C64] {
        &self.modes[l * self.dim..(l + 1) * self.dim]
    }

    /// Component `f_l(i)`.
    #[inline]
    pub fn amplitude(&self, l: usize, i: usize) -> C64 {
        self.modes[l * self.dim + i]
    }

    /// Largest `|<f_a|f_b> - delta_ab|`.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            let fa = self.mode(a);
            for b in a..self.dim {
                let fb = self.mode(b);
                let dot: C64 = fa.iter().zip(fb).map(|(p, q)| p.conj() * q).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// Largest `|sum_l |f_l(i)|^2 - 1|` over sites.
    pub fn completeness_defect(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let s: f64 = (0..self.dim).map(|l| self.amplitude(l, i).norm_sqr()).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `||H f_l - w_l f_l||`.
    pub fn residual(&self, h: &CsrMatrix) -> f64 {
        let mut out = vec![C64::default(); self.dim];
        (0..self.dim)
            .map(|l| {
                h.mul_vec(self.mode(l), &mut out);
                out.iter()
                    .zip(self.mode(l))
                    .map(|(hv, v)| (hv - v * self.omegas[l]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

pub fn diagonalize(h: &HoppingOperator) -> Result<EigenDecomposition> {
    diagonalize_with_cap(h.matrix(), DEFAULT_DIAG_CAP)
}

pub fn diagonalize_with_cap(h: &CsrMatrix, cap: usize) -> Result<EigenDecomposition> {
    let dim = h.dim();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let mut dense = Mat::<C64>::zeros(dim, dim);
    for (r, c, v) in h.triplets() {
        dense[(r, c)] += v;
    }
    let eig = dense
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));

    let mut omegas = Vec::with_capacity(dim);
    let mut modes = Vec::with_capacity(dim * dim);
    for &l in &order {
        omegas.push(s[l].re);
        let mut col: Vec<C64> = (0..dim).map(|i| u[(i, l)]).collect();
        fix_phase(&mut col);
        modes.extend(col);
    }
    Ok(EigenDecomposition { dim, omegas, modes })
}

fn fix_phase(v: &mut [C64]) {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let peak = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if norm == 0.0 {
        return;
    }
    let anchor = v.iter().find(|c| c.norm() > 1e-6 * peak).copied().unwrap_or(C64::new(1.0, 0.0));
    let rot = anchor.conj() / (anchor.norm() * norm);
    v.iter_mut().for_each(|c| *c *= rot);
}

/// Mean position `<x> = sum_i x_i |f(r_i)|^2` of a normalized mode.
pub fn mode_center_x(geometry: &LatticeGeometry, mode: &[C64]) -> f64 {
    mode.iter()
        .enumerate()
        .map(|(i, c)| geometry.coords(i).0 as f64 * c.norm_sqr())
        .sum()
}
