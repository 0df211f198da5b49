use num_complex::Complex64 as C64;

use super::gauge::GaugeField;
use super::geometry::LatticeGeometry;
use super::potential::PotentialField;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Single-photon lattice Hamiltonian
/// `H_ij = V_i delta_ij - J exp(i phi_ij)` for nearest neighbours (`J = 1`).
///
/// `H[to][from]` holds the amplitude for hopping `from -> to`.
#[derive(Debug, Clone)]
pub struct HoppingOperator {
    geometry: LatticeGeometry,
    alpha: f64,
    matrix: CsrMatrix,
    potential: Vec<f64>,
}

impl HoppingOperator {
    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Column-major dense matrix.
    pub fn to_dense(&self) -> Vec<C64> {
        self.matrix.to_dense()
    }
}

pub fn assemble_hamiltonian(
    geometry: &LatticeGeometry,
    gauge: &GaugeField,
    potential: &PotentialField,
) -> Result<HoppingOperator> {
    if gauge.geometry() != geometry {
        return Err(Error::GeometryMismatch("gauge field built on a different lattice".into()));
    }
    if potential.geometry() != geometry {
        return Err(Error::GeometryMismatch("potential built on a different lattice".into()));
    }
    let n = geometry.num_sites();
    let mut triplets = Vec::with_capacity(5 * n);
    for (i, &v) in potential.values().iter().enumerate() {
        triplets.push((i, i, C64::new(v, 0.0)));
    }
    for bond in geometry.bonds() {
        let (x, _) = geometry.coords(bond.from);
        let phi = gauge.forward_phase(x, bond.axis);
        let amp = -C64::from_polar(1.0, phi);
        triplets.push((bond.to, bond.from, amp));
        triplets.push((bond.from, bond.to, amp.conj()));
    }
    Ok(HoppingOperator {
        geometry: *geometry,
        alpha: gauge.alpha(),
        matrix: CsrMatrix::from_triplets(n, triplets),
        potential: potential.values().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_gauge, build_potential, PotentialSpec};

    #[test]
    fn hermitian_with_bounded_row_support() {
        let g = LatticeGeometry::periodic_y(9, 7).unwrap();
        let gauge = build_gauge(&g, 0.13).unwrap();
        let v = build_potential(&g, &PotentialSpec::Disorder { sigma: 0.3 }, Some(5)).unwrap();
        let h = assemble_hamiltonian(&g, &gauge, &v).unwrap();
        assert_eq!(h.matrix().hermiticity_defect(), 0.0);
        for r in 0..h.dim() {
            assert!(h.matrix().row_nnz(r) <= 5);
            assert_eq!(h.matrix().get(r, r).re, v.values()[r]);
        }
        let (lo, hi) = h.matrix().gershgorin_interval();
        assert!(lo >= v.min() - 4.0 - 1e-12 && hi <= v.max() + 4.0 + 1e-12);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let g = LatticeGeometry::open(4, 4).unwrap();
        let other = LatticeGeometry::open(5, 4).unwrap();
        let gauge = build_gauge(&g, 0.1).unwrap();
        let v = PotentialField::zero(&other);
        assert!(assemble_hamiltonian(&g, &gauge, &v).is_err());
    }
}
