//! SU(2) gauge transformations as unit quaternions, Coulomb projection and the
//! reducible constant-flux pairs on the twisted torus.
//!
//! A quaternion `(w, v)` stands for `U = w·1 + 2 v·T = w + i v·σ`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::energy::{total_energy, EnergyParams};
use crate::error::{Error, Result};
use crate::grid::{Configuration, Grid};
use crate::quadrature::cross;
use crate::su2::Su2Vec;

/// An element of SU(2); unit norm is not enforced by the type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub v: [f64; 3],
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, v: [0.0; 3] };

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.v[0] * self.v[0] + self.v[1] * self.v[1] + self.v[2] * self.v[2]).sqrt()
    }

    pub fn inverse(&self) -> Quat {
        Quat { w: self.w, v: [-self.v[0], -self.v[1], -self.v[2]] }
    }

    pub fn mul(&self, o: &Quat) -> Quat {
        let d = self.v[0] * o.v[0] + self.v[1] * o.v[1] + self.v[2] * o.v[2];
        let c = cross(self.v, o.v);
        Quat {
            w: self.w * o.w - d,
            v: [0, 1, 2].map(|a| self.w * o.v[a] + o.w * self.v[a] - c[a]),
        }
    }

    /// Adjoint action `UξU⁻¹`.
    pub fn adjoint(&self, xi: Su2Vec) -> Su2Vec {
        let p = xi.0;
        let vp = cross(self.v, p);
        let vvp = cross(self.v, vp);
        Su2Vec([0, 1, 2].map(|a| p[a] - 2.0 * self.w * vp[a] + 2.0 * vvp[a]))
    }
}

/// `exp(x)` for `x ∈ su(2)`.
pub fn exp_su2(x: Su2Vec) -> Quat {
    let n = x.norm();
    if n == 0.0 {
        return Quat::IDENTITY;
    }
    let (s, c) = (0.5 * n).sin_cos();
    Quat { w: c, v: x.0.map(|a| s * a / n) }
}

/// One SU(2) element per site.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField(pub Vec<Quat>);

impl GaugeField {
    pub fn identity(n: usize) -> Self {
        GaugeField(vec![Quat::IDENTITY; n])
    }

    pub fn constant(n: usize, q: Quat) -> Self {
        GaugeField(vec![q; n])
    }

    /// `g = exp(χ)` pointwise.
    pub fn exp_of(chi: &[Su2Vec]) -> Self {
        GaugeField(chi.par_iter().map(|c| exp_su2(*c)).collect())
    }
}

fn check_gauge(cfg: &Configuration, g: &GaugeField) -> Result<()> {
    let grid = &cfg.grid;
    if g.0.len() != grid.n_sites() {
        return Err(Error::NonconformingGauge(format!("{} elements for {} sites", g.0.len(), grid.n_sites())));
    }
    for (i, q) in g.0.iter().enumerate() {
        if (q.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::NonconformingGauge(format!("|g| = {} at site {i}", q.norm())));
        }
        if grid.is_fixed(grid.coords(i)) && *q != Quat::IDENTITY {
            return Err(Error::NonconformingGauge(format!(
                "g is not the identity at boundary site {:?}",
                grid.coords(i)
            )));
        }
    }
    Ok(())
}

/// `(A, Φ) ↦ (g d(g⁻¹) + gAg⁻¹, gΦg⁻¹)`, with `d(g⁻¹)` by the grid's first
/// derivative stencil.
pub fn apply_gauge(cfg: &Configuration, g: &GaugeField) -> Result<Configuration> {
    check_gauge(cfg, g)?;
    let grid = &cfg.grid;
    let st = grid.stencils();
    let inv: Vec<Quat> = g.0.iter().map(|q| q.inverse()).collect();
    let n = grid.n_sites();
    let out: Vec<([Su2Vec; 3], Su2Vec)> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let c = grid.coords(idx);
            let q = g.0[idx];
            let a = [0, 1, 2].map(|i| {
                let mut d = Quat { w: 0.0, v: [0.0; 3] };
                for t in st.fwd(i, c[i]) {
                    let mut nc = c;
                    nc[i] = t.pos;
                    let nq = inv[grid.index(nc[0], nc[1], nc[2])];
                    let v = grid.transport(Su2Vec(nq.v), t.wrap, c[1]).0;
                    d.w += t.coef * nq.w;
                    for k in 0..3 {
                        d.v[k] += t.coef * v[k];
                    }
                }
                let m = q.mul(&d);
                Su2Vec(m.v.map(|x| 2.0 * x)) + q.adjoint(cfg.a[idx][i])
            });
            (a, q.adjoint(cfg.phi[idx]))
        })
        .collect();
    let (a, phi) = out.into_iter().unzip();
    Ok(Configuration { grid: grid.clone(), a, phi })
}

/// Smooth random gauge field `exp(χ)` built from a few low Fourier modes of
/// amplitude `amp`. On Dirichlet grids χ is damped to vanish on the boundary.
pub fn random_smooth_gauge(grid: &Grid, seed: u64, amp: f64) -> Result<GaugeField> {
    if grid.twist() != 0 {
        return Err(Error::InvalidGrid("random gauge fields need an untwisted grid".into()));
    }
    let chi = random_smooth_algebra_field(grid, seed, amp);
    let g = GaugeField::exp_of(&chi);
    Ok(GaugeField(
        g.0.into_iter()
            .enumerate()
            .map(|(i, q)| if grid.is_fixed(grid.coords(i)) { Quat::IDENTITY } else { q })
            .collect(),
    ))
}

/// Sum of six random low Fourier modes per component, coefficients in
/// `(−amp, amp)`, damped to zero at Dirichlet boundaries.
pub fn random_smooth_algebra_field(grid: &Grid, seed: u64, amp: f64) -> Vec<Su2Vec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ext = grid.extent();
    let (lo, hi) = grid.bounds();
    let modes: Vec<([f64; 3], f64, [f64; 3])> = (0..6)
        .map(|_| {
            let k = [0, 1, 2].map(|a| rng.gen_range(-1i32..=1) as f64 * 2.0 * PI / ext[a]);
            let ph = rng.gen_range(0.0..2.0 * PI);
            let c = [0, 1, 2].map(|_| rng.gen_range(-amp..amp));
            (k, ph, c)
        })
        .collect();
    let dirichlet = !grid.is_periodic();
    (0..grid.n_sites())
        .map(|i| {
            let x = grid.site_position(i);
            let mut v = [0.0; 3];
            for (k, ph, c) in &modes {
                let s = (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).sin();
                for a in 0..3 {
                    v[a] += c[a] * s;
                }
            }
            if dirichlet {
                let bump: f64 = (0..3).map(|a| (PI * (x[a] - lo[a]) / (hi[a] - lo[a])).sin().powi(2)).product();
                v = v.map(|c| c * bump);
            }
            Su2Vec(v)
        })
        .collect()
}

/// In-place 3-D FFT on row-major data of shape `dims`.
pub(crate) fn fft3(data: &mut [Complex<f64>], dims: [usize; 3], inverse: bool) {
    let mut planner = FftPlanner::new();
    for axis in 0..3 {
        let n = dims[axis];
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let stride = match axis {
            0 => dims[1] * dims[2],
            1 => dims[2],
            _ => 1,
        };
        let outer = data.len() / n;
        let mut line = vec![Complex::new(0.0, 0.0); n];
        for o in 0..outer {
            // Decompose `o` into the two coordinates other than `axis`.
            let base = match axis {
                0 => o,
                1 => (o / dims[2]) * dims[1] * dims[2] + o % dims[2],
                _ => o * dims[2],
            };
            for p in 0..n {
                line[p] = data[base + p * stride];
            }
            fft.process(&mut line);
            for p in 0..n {
                data[base + p * stride] = line[p];
            }
        }
    }
    if inverse {
        let s = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}

/// Symbol of the centred first difference: `∂ ↦ i·sin(2πm/n)/h`.
pub(crate) fn centred_symbol(m: usize, n: usize, h: f64) -> f64 {
    (2.0 * PI * m as f64 / n as f64).sin() / h
}

/// Discrete `d*A = −Σ∂_iA_i` per site (centred differences, periodic).
pub fn coulomb_divergence(cfg: &Configuration) -> Vec<Su2Vec> {
    let g = &cfg.grid;
    let st = g.stencils();
    (0..g.n_sites())
        .into_par_iter()
        .map(|idx| {
            let c = g.coords(idx);
            let mut acc = Su2Vec::ZERO;
            for i in 0..3 {
                for t in st.fwd(i, c[i]) {
                    let mut nc = c;
                    nc[i] = t.pos;
                    acc -= g.transport_connection(cfg.a[g.index(nc[0], nc[1], nc[2])][i], i, t.wrap, c[1]) * t.coef;
                }
            }
            acc
        })
        .collect()
}

fn l2_norm(grid: &Grid, v: &[Su2Vec]) -> f64 {
    (grid.cell_volume() * crate::quadrature::pairwise_sum_by(v.len(), &|i| v[i].norm_sq())).sqrt()
}

/// Outcome of [`coulomb_project`].
#[derive(Debug, Clone)]
pub struct CoulombResult {
    pub cfg: Configuration,
    /// Final `‖d*A‖_{L²}`.
    pub dstar_norm: f64,
    /// `‖d*A‖` of the input followed by each accepted iterate.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl CoulombResult {
    /// Energy change caused by the discrete covariance defect.
    pub fn energy_defect(&self, original: &Configuration, p: EnergyParams) -> f64 {
        total_energy(&self.cfg, p).total - total_energy(original, p).total
    }
}

/// Iterated abelianised Coulomb gauge fixing: solve `Δχ = d*A` spectrally and
/// gauge by `exp(χ)`, accepting a step only if `‖d*A‖` decreases (halving χ
/// up to 8 times otherwise).
pub fn coulomb_project(cfg: &Configuration, tol: f64, max_iter: usize) -> Result<CoulombResult> {
    let grid = &cfg.grid;
    if !grid.is_periodic() || grid.twist() != 0 {
        return Err(Error::WrongBoundary("untwisted periodic"));
    }
    let dims = grid.dims();
    let h = grid.spacing();
    let mut cur = cfg.clone();
    let mut div = coulomb_divergence(&cur);
    let mut norm = l2_norm(grid, &div);
    let mut trace = vec![norm];
    let mut iterations = 0;
    while norm > tol && iterations < max_iter {
        // Δχ = d*A with Δ = −Σ∂² in the centred-difference symbol.
        let mut chi = vec![Su2Vec::ZERO; grid.n_sites()];
        for comp in 0..3 {
            let mut data: Vec<Complex<f64>> = div.iter().map(|v| Complex::new(v.0[comp], 0.0)).collect();
            fft3(&mut data, dims, false);
            for (idx, z) in data.iter_mut().enumerate() {
                let c = grid.coords(idx);
                let sym: f64 = (0..3).map(|a| centred_symbol(c[a], dims[a], h).powi(2)).sum();
                *z = if sym > 1e-12 / (h * h) { *z / sym } else { Complex::new(0.0, 0.0) };
            }
            fft3(&mut data, dims, true);
            for (idx, z) in data.iter().enumerate() {
                chi[idx].0[comp] = z.re;
            }
        }
        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..9 {
            let scaled: Vec<Su2Vec> = chi.iter().map(|c| *c * scale).collect();
            let trial = apply_gauge(&cur, &GaugeField::exp_of(&scaled))?;
            let tdiv = coulomb_divergence(&trial);
            let tnorm = l2_norm(grid, &tdiv);
            if tnorm < norm {
                cur = trial;
                div = tdiv;
                norm = tnorm;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations += 1;
        trace.push(norm);
    }
    Ok(CoulombResult { cfg: cur, dstar_norm: norm, trace, iterations, converged: norm <= tol })
}

/// The reducible pair `A_y = (2πn/(L_xL_y))·x·T₃`, `Φ ≡ T₃`, with `n` the
/// grid twist.
pub fn reducible_pair(grid: &Grid) -> Result<Configuration> {
    if !grid.is_periodic() {
        return Err(Error::WrongBoundary("periodic"));
    }
    let ext = grid.extent();
    let b = 2.0 * PI * grid.twist() as f64 / (ext[0] * ext[1]);
    Ok(Configuration::from_fn(
        grid.clone(),
        move |x| [Su2Vec::ZERO, Su2Vec::T3 * (b * x[0]), Su2Vec::ZERO],
        |_| Su2Vec::T3,
    ))
}
