use num_complex::Complex64 as C64;

use crate::spectral::EigenDecomposition;

/// Mode-sum propagator `G(t, i, j) = sum_l f_l(i) f_l(j)* exp(-i w_l t)`.
#[derive(Debug, Clone, Copy)]
pub struct GreensEvaluator<'a> {
    eig: &'a EigenDecomposition,
}

impl<'a> GreensEvaluator<'a> {
    pub fn new(eig: &'a EigenDecomposition) -> Self {
        Self { eig }
    }

    pub fn eval(&self, t: f64, i: usize, j: usize) -> C64 {
        greens_exact(self.eig, t, i, j)
    }

    /// `G(t, i, j) * exp(i w_ref t) * exp(-gamma_p t / 2)` on the grid `t = k dt`,
    /// `k = 0..steps`.
    pub fn tabulate(&self, i: usize, j: usize, dt: f64, steps: usize, omega_ref: f64, gamma_p: f64) -> Vec<C64> {
        let eig = self.eig;
        let weights: Vec<C64> = (0..eig.dim())
            .map(|l| eig.amplitude(l, i) * eig.amplitude(l, j).conj())
            .collect();
        let rot: Vec<C64> = eig
            .omegas()
            .iter()
            .map(|w| C64::from_polar((-0.5 * gamma_p * dt).exp(), -(w - omega_ref) * dt))
            .collect();
        let mut phase = weights;
        let mut out = Vec::with_capacity(steps + 1);
        for _ in 0..=steps {
            out.push(phase.iter().sum());
            phase.iter_mut().zip(&rot).for_each(|(p, r)| *p *= r);
        }
        out
    }
}

pub fn greens_exact(eig: &EigenDecomposition, t: f64, i: usize, j: usize) -> C64 {
    (0..eig.dim())
        .map(|l| {
            eig.amplitude(l, i) * eig.amplitude(l, j).conj() * C64::from_polar(1.0, -eig.omegas()[l] * t)
        })
        .sum()
}
