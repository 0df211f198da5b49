use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::emitters::Emitter;
use super::markov::markov_rate;
use crate::error::{Error, Result};
use crate::propagator::{greens_lll, ContinuumMode, GreensEvaluator};
use crate::spectral::{EigenDecomposition, LandauAnalytics};

/// Memory-kernel choice as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// Lattice mode sum.
    Exact,
    /// Lowest-Landau-level closed form for an infinite strip.
    GaussianLll,
    /// Lowest-Landau-level mode sum on a strip of length `ly`.
    FiniteLy { ly: f64 },
    /// Memoryless kernel; each emitter decays at its Markovian rate.
    FlatMarkov,
}

/// A memory kernel ready for evaluation.
#[derive(Debug, Clone, Copy)]
pub enum Kernel<'a> {
    Exact { eig: &'a EigenDecomposition, nx: usize },
    Continuum { params: LandauAnalytics, mode: ContinuumMode },
    FlatMarkov { params: LandauAnalytics },
}

impl<'a> Kernel<'a> {
    pub fn from_spec(spec: KernelSpec, params: LandauAnalytics, eig: Option<&'a EigenDecomposition>, nx: usize) -> Result<Self> {
        Ok(match spec {
            KernelSpec::Exact => Kernel::Exact {
                eig: eig.ok_or_else(|| Error::config("the exact kernel needs an eigendecomposition"))?,
                nx,
            },
            KernelSpec::GaussianLll => Kernel::Continuum { params, mode: ContinuumMode::Infinite },
            KernelSpec::FiniteLy { ly } => Kernel::Continuum { params, mode: ContinuumMode::FiniteLy { ly } },
            KernelSpec::FlatMarkov => Kernel::FlatMarkov { params },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolterraOptions {
    pub dt: f64,
    pub t_final: f64,
    pub gamma_p: f64,
    /// Rotating-frame reference; defaults to the mean emitter frequency.
    pub frame: Option<f64>,
}

impl VolterraOptions {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, gamma_p: 0.0, frame: None }
    }
}

/// Emitter amplitudes on a uniform grid, lab frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolterraSolution {
    pub times: Vec<f64>,
    pub amplitudes: Vec<Vec<C64>>,
}

impl VolterraSolution {
    pub fn populations(&self, n: usize) -> Vec<f64> {
        self.amplitudes[n].iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Tabulate `K_nm(k dt) = G(k dt, r_n, r_m) exp(i w_ref k dt) exp(-gamma_p k dt / 2)`.
fn tabulate(kernel: &Kernel<'_>, a: &Emitter, b: &Emitter, dt: f64, steps: usize, frame: f64, gamma_p: f64) -> Vec<C64> {
    match *kernel {
        Kernel::Exact { eig, nx } => {
            let i = a.site.1 * nx + a.site.0;
            let j = b.site.1 * nx + b.site.0;
            GreensEvaluator::new(eig).tabulate(i, j, dt, steps, frame, gamma_p)
        }
        Kernel::Continuum { params, mode } => (0..=steps)
            .map(|k| {
                let t = k as f64 * dt;
                greens_lll(&params, t, a.position(), b.position(), mode) * C64::from_polar((-0.5 * gamma_p * t).exp(), frame * t)
            })
            .collect(),
        Kernel::FlatMarkov { .. } => unreachable!(),
    }
}

/// Solve `dc_n/dt = -i w_n c_n - sum_m (g_n g_m / 4) int_0^t G(t - s, r_n, r_m) c_m(s) ds`
/// with `c_n(0) = initial[n]`, by implicit trapezoidal product integration.
pub fn volterra_solve(kernel: &Kernel<'_>, emitters: &[Emitter], initial: &[C64], opts: &VolterraOptions) -> Result<VolterraSolution> {
    let n = emitters.len();
    if initial.len() != n {
        return Err(Error::config(format!("{} initial amplitudes for {n} emitters", initial.len())));
    }
    let dt = opts.dt;
    if !(dt > 0.0) || !(opts.t_final >= 0.0) {
        return Err(Error::config(format!("Volterra grid needs dt > 0 and t_final >= 0, got {dt}, {}", opts.t_final)));
    }
    let steps = (opts.t_final / dt).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();

    if let Kernel::FlatMarkov { params } = *kernel {
        let ub = params.landau_voltage();
        let amplitudes = emitters
            .iter()
            .zip(initial)
            .map(|(e, &c0)| {
                let delta = e.omega - params.channel_frequency(e.site.0 as f64);
                let rate = markov_rate(e.g, params.alpha, ub, delta)?;
                Ok(times.iter().map(|&t| c0 * C64::new(-rate * t, -e.omega * t).exp()).collect())
            })
            .collect::<Result<_>>()?;
        return Ok(VolterraSolution { times, amplitudes });
    }
    if let Kernel::Exact { eig, nx } = *kernel {
        for e in emitters {
            if e.site.1 * nx + e.site.0 >= eig.dim() || e.site.0 >= nx {
                return Err(Error::GeometryMismatch(format!("emitter site {:?} outside the decomposed lattice", e.site)));
            }
        }
    }

    let frame = opts.frame.unwrap_or_else(|| {
        if n == 0 {
            0.0
        } else {
            emitters.iter().map(|e| e.omega).sum::<f64>() / n as f64
        }
    });
    let delta: Vec<f64> = emitters.iter().map(|e| e.omega - frame).collect();
    let mut coupling = vec![0.0; n * n];
    let mut kern: Vec<Vec<C64>> = Vec::with_capacity(n * n);
    for (p, a) in emitters.iter().enumerate() {
        for (q, b) in emitters.iter().enumerate() {
            coupling[p * n + q] = 0.25 * a.g * b.g;
            kern.push(if a.g * b.g == 0.0 {
                vec![C64::default(); steps + 1]
            } else {
                tabulate(kernel, a, b, dt, steps, frame, opts.gamma_p)
            });
        }
    }

    // a[q][k]: rotating-frame amplitudes
    let mut a: Vec<Vec<C64>> = (0..n).map(|q| {
        let mut v = Vec::with_capacity(steps + 1);
        v.push(initial[q]);
        v
    }).collect();
    let mut f_prev: Vec<C64> = (0..n).map(|p| C64::new(0.0, -delta[p]) * initial[p]).collect();
    let half = 0.5 * dt;
    let mut lhs = vec![C64::default(); n * n];
    for p in 0..n {
        for q in 0..n {
            let mut v = C64::from(half * coupling[p * n + q] * half) * kern[p * n + q][0];
            if p == q {
                v += C64::new(1.0, half * delta[p]);
            }
            lhs[p * n + q] = v;
        }
    }
    let mut hist = vec![C64::default(); n];
    let mut rhs = vec![C64::default(); n];
    for k in 1..=steps {
        for p in 0..n {
            let mut acc = C64::default();
            for q in 0..n {
                let c = coupling[p * n + q];
                if c == 0.0 {
                    continue;
                }
                let kk = &kern[p * n + q];
                let aq = &a[q];
                let mut s = 0.5 * kk[k] * aq[0];
                for j in 1..k {
                    s += kk[k - j] * aq[j];
                }
                acc += c * dt * s;
            }
            hist[p] = acc;
            rhs[p] = a[p][k - 1] + half * f_prev[p] - half * acc;
        }
        let sol = solve_small(&lhs, &rhs, n)?;
        for p in 0..n {
            let mut inst = C64::default();
            for q in 0..n {
                inst += coupling[p * n + q] * half * kern[p * n + q][0] * sol[q];
            }
            f_prev[p] = C64::new(0.0, -delta[p]) * sol[p] - hist[p] - inst;
            a[p].push(sol[p]);
        }
    }
    let amplitudes = a
        .into_iter()
        .map(|v| v.into_iter().zip(&times).map(|(c, &t)| c * C64::from_polar(1.0, -frame * t)).collect())
        .collect();
    Ok(VolterraSolution { times, amplitudes })
}

/// Gaussian elimination with partial pivoting for the small emitter systems.
fn solve_small(m: &[C64], b: &[C64], n: usize) -> Result<Vec<C64>> {
    let mut a = m.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap();
        if a[piv * n + col].norm() < 1e-300 {
            return Err(Error::Numerical("singular Volterra step matrix".into()));
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            x.swap(piv, col);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
            let v = x[col];
            x[r] -= f * v;
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for c in r + 1..n {
            s -= a[r * n + c] * x[c];
        }
        x[r] = s / a[r * n + r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_markov_is_exponential() {
        let p = LandauAnalytics::new(0.1, 0.1).unwrap();
        let e = Emitter::new((10, 0), p.channel_frequency(10.0), 0.1).unwrap();
        let sol = volterra_solve(&Kernel::FlatMarkov { params: p }, &[e], &[C64::new(1.0, 0.0)], &VolterraOptions::new(0.5, 50.0)).unwrap();
        let rate = markov_rate(0.1, 0.1, p.landau_voltage(), 0.0).unwrap();
        for (t, c) in sol.times.iter().zip(&sol.amplitudes[0]) {
            assert!((c.norm() - (-rate * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_field_kernel_gives_rabi_oscillations() {
        // constant kernel alpha: c'' = -(g^2 alpha / 4) c
        let p = LandauAnalytics::new(0.1, 0.0).unwrap();
        let g = 0.2;
        let e = Emitter::new((5, 0), p.channel_frequency(5.0), g).unwrap();
        let kernel = Kernel::Continuum { params: p, mode: ContinuumMode::Infinite };
        let sol = volterra_solve(&kernel, &[e], &[C64::new(1.0, 0.0)], &VolterraOptions::new(0.02, 100.0)).unwrap();
        let om = g * 0.1f64.sqrt();
        for (t, c) in sol.times.iter().zip(&sol.amplitudes[0]) {
            assert!((c.norm() - (0.5 * om * t).cos().abs()).abs() < 1e-5, "t={t}");
        }
    }

    #[test]
    fn small_solver() {
        let m = [C64::new(2.0, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 1.0), C64::new(3.0, 0.0)];
        let x = [C64::new(1.0, -1.0), C64::new(0.5, 2.0)];
        let b = [m[0] * x[0] + m[1] * x[1], m[2] * x[0] + m[3] * x[1]];
        let y = solve_small(&m, &b, 2).unwrap();
        assert!((y[0] - x[0]).norm() < 1e-14 && (y[1] - x[1]).norm() < 1e-14);
    }
}
