use num_complex::Complex64 as C64;

use super::emitters::EmitterSet;
use crate::error::{Error, Result};
use crate::lattice::HoppingOperator;
use crate::sparse::CsrMatrix;

/// Single-excitation Hamiltonian of lattice plus emitters. Basis: photon sites
/// `0..M` (row-major), then emitters `M..M+N`.
#[derive(Debug, Clone)]
pub struct CoupledHamiltonian {
    pub photon_dim: usize,
    pub emitters: EmitterSet,
    pub matrix: CsrMatrix,
}

impl CoupledHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Basis index of emitter `n`.
    pub fn emitter_index(&self, n: usize) -> usize {
        self.photon_dim + n
    }
}

pub fn build_coupled_hamiltonian(h: &HoppingOperator, emitters: &EmitterSet) -> Result<CoupledHamiltonian> {
    let m = h.dim();
    for e in emitters.iter() {
        if !h.geometry().contains(e.site.0, e.site.1) {
            return Err(Error::GeometryMismatch(format!("emitter site {:?} outside the lattice", e.site)));
        }
    }
    let mut triplets: Vec<(usize, usize, C64)> = h.matrix().triplets().collect();
    for (n, e) in emitters.iter().enumerate() {
        let a = m + n;
        let s = emitters.site_index(n);
        let c = C64::new(0.5 * e.g, 0.0);
        triplets.push((a, a, C64::new(e.omega, 0.0)));
        if e.g != 0.0 {
            triplets.push((a, s, c));
            triplets.push((s, a, c));
        }
    }
    Ok(CoupledHamiltonian {
        photon_dim: m,
        emitters: emitters.clone(),
        matrix: CsrMatrix::from_triplets(m + emitters.len(), triplets),
    })
}
