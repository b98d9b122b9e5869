//! Energy and charge measures, magnetic charge, concentration detection,
//! rescaling, the local conservation law and the Hodge split of the
//! longitudinal one-form.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::energy::{density_terms, kappa_local, EnergyParams};
use crate::error::{Error, Result};
use crate::gauge::fft3;
use crate::grid::{integrate_by, local_fields, trilinear, Configuration, Grid, LocalFields, Region, ScalarField};
use crate::quadrature::{cross, dot, normalize, solid_angle, Icosphere};

/// Per-site `μ = ε⁻¹e_ε` and `κ = 2⟨*F, ∇Φ⟩`.
#[derive(Debug, Clone)]
pub struct MeasureField {
    pub grid: Grid,
    pub mu: ScalarField,
    pub kappa: ScalarField,
}

impl MeasureField {
    /// `(μ(B), κ(B))` for a ball.
    pub fn ball_mass(&self, center: [f64; 3], radius: f64) -> Result<(f64, f64)> {
        let region = Region::Ball { center, radius };
        Ok((
            integrate_by(&self.grid, region, |i| self.mu.0[i])?,
            integrate_by(&self.grid, region, |i| self.kappa.0[i])?,
        ))
    }

    pub fn total_mass(&self) -> f64 {
        integrate_by(&self.grid, Region::All, |i| self.mu.0[i]).unwrap()
    }

    /// Number of sites violating `|κ| = 2|⟨*F, ∇Φ⟩| ≤ μ` beyond round-off.
    pub fn bound_violations(&self) -> usize {
        self.mu.0.iter().zip(&self.kappa.0).filter(|(m, k)| k.abs() > **m * (1.0 + 1e-12) + 1e-300).count()
    }
}

pub fn measures(cfg: &Configuration, p: EnergyParams) -> MeasureField {
    let lf = local_fields(cfg);
    let (mu, kappa): (Vec<f64>, Vec<f64>) = lf
        .par_iter()
        .map(|l| (density_terms(l, p).iter().sum::<f64>() / p.epsilon, kappa_local(l)))
        .unzip();
    MeasureField { grid: cfg.grid.clone(), mu: ScalarField(mu), kappa: ScalarField(kappa) }
}

/// Magnetic charge `(1/4π)∫⟨*F, ∇Φ⟩` over a region.
pub fn charge_volume(cfg: &Configuration, _p: EnergyParams, region: Region) -> Result<f64> {
    let lf = local_fields(cfg);
    Ok(integrate_by(&cfg.grid, region, |i| kappa_local(&lf[i]))? / (8.0 * PI))
}

/// Default icosphere subdivision level for surface integrals.
pub const DEFAULT_SPHERE_LEVEL: u32 = 4;

fn sample_higgs_on_sphere(cfg: &Configuration, center: [f64; 3], r: f64, sphere: &Icosphere) -> Result<Vec<[f64; 3]>> {
    let g = &cfg.grid;
    let mut out = Vec::with_capacity(sphere.vertices.len());
    let mut min_norm = f64::INFINITY;
    for v in &sphere.vertices {
        let x = [center[0] + r * v[0], center[1] + r * v[1], center[2] + r * v[2]];
        let phi = trilinear(g, x, |i| cfg.phi[i]).ok_or(Error::BallOutOfDomain { center, radius: r })?;
        min_norm = min_norm.min(phi.norm());
        out.push(phi.0);
    }
    if !(min_norm > 0.5) {
        return Err(Error::HiggsVanishesOnSphere { min_norm });
    }
    Ok(out.into_iter().map(normalize).collect())
}

/// Degree of `Φ/|Φ|` on the sphere `|x − center| = r`.
///
/// Each triangle contributes `n̂·((b − a) × (c − a))/2` where `a, b, c` are the
/// sampled unit Higgs directions at its vertices and `n̂` their normalised
/// centroid; the sum is divided by 4π.
pub fn charge_degree(cfg: &Configuration, center: [f64; 3], r: f64) -> Result<f64> {
    charge_degree_with_level(cfg, center, r, DEFAULT_SPHERE_LEVEL)
}

pub fn charge_degree_with_level(cfg: &Configuration, center: [f64; 3], r: f64, level: u32) -> Result<f64> {
    let sphere = Icosphere::new(level);
    let u = sample_higgs_on_sphere(cfg, center, r, &sphere)?;
    let mut s = 0.0;
    for &[a, b, c] in &sphere.triangles {
        let (pa, pb, pc) = (u[a], u[b], u[c]);
        let n = normalize([pa[0] + pb[0] + pc[0], pa[1] + pb[1] + pc[1], pa[2] + pb[2] + pc[2]]);
        let e1 = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
        let e2 = [pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]];
        s += 0.5 * dot(n, cross(e1, e2));
    }
    Ok(s / (4.0 * PI))
}

/// Independent degree estimate: signed solid angles of the image triangles.
pub fn charge_degree_solid_angle(cfg: &Configuration, center: [f64; 3], r: f64, level: u32) -> Result<f64> {
    let sphere = Icosphere::new(level);
    let u = sample_higgs_on_sphere(cfg, center, r, &sphere)?;
    let s: f64 = sphere.triangles.iter().map(|&[a, b, c]| solid_angle(u[a], u[b], u[c])).sum();
    Ok(s / (4.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationPoint {
    pub center: [f64; 3],
    /// `Θ̂ = μ(B_r(center))`.
    pub mass: f64,
    /// `Ξ̂ = κ(B_r(center))`.
    pub charge: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub points: Vec<ConcentrationPoint>,
    pub radius: f64,
    pub eta_star_user: f64,
}

impl ConcentrationReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("concentration radius={} eta_star={} points={}\n", self.radius, self.eta_star_user, self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            s += &format!(
                "point {i} center=({:.6},{:.6},{:.6}) mass={:.6e} charge={:.6e}\n",
                p.center[0], p.center[1], p.center[2], p.mass, p.charge
            );
        }
        s
    }
}

/// Sites of the hot-spot set `Z_β(Φ) = {w ≥ β}`, `w = ½(1 − |Φ|²)`.
pub fn z_beta_sites(cfg: &Configuration, beta: f64) -> Vec<usize> {
    (0..cfg.n_sites()).filter(|&i| 0.5 * (1.0 - cfg.phi[i].norm_sq()) >= beta).collect()
}

/// Default threshold for [`detect_concentration`].
pub const DEFAULT_ETA_STAR: f64 = 1.0;

/// Masses of μ and κ in the (possibly domain-clipped) ball, by direct
/// summation over the sites of its bounding box.
fn local_ball_mass(m: &MeasureField, center: [f64; 3], r: f64) -> (f64, f64) {
    let g = &m.grid;
    let h = g.spacing();
    let dims = g.dims();
    let o = g.origin();
    let mut ranges = [(0i64, 0i64); 3];
    for a in 0..3 {
        let lo = ((center[a] - r - o[a]) / h).floor() as i64;
        let hi = ((center[a] + r - o[a]) / h).ceil() as i64;
        ranges[a] = if g.is_periodic() {
            (lo, hi.min(lo + dims[a] as i64 - 1))
        } else {
            (lo.max(0), hi.min(dims[a] as i64 - 1))
        };
    }
    let r2 = r * r;
    let (mut mu, mut ka) = (0.0, 0.0);
    for i in ranges[0].0..=ranges[0].1 {
        for j in ranges[1].0..=ranges[1].1 {
            for k in ranges[2].0..=ranges[2].1 {
                let c = [i, j, k];
                let x = [0, 1, 2].map(|a| o[a] + c[a] as f64 * h);
                let d2: f64 = (0..3).map(|a| (x[a] - center[a]).powi(2)).sum();
                if d2 > r2 {
                    continue;
                }
                let w = [0, 1, 2].map(|a| c[a].rem_euclid(dims[a] as i64) as usize);
                let idx = g.index(w[0], w[1], w[2]);
                let wt = g.weight(w);
                mu += wt * m.mu.0[idx];
                ka += wt * m.kappa.0[idx];
            }
        }
    }
    let h3 = g.cell_volume();
    (h3 * mu, h3 * ka)
}

/// Greedy selection of disjoint balls of radius `r` whose μ-mass is at least
/// `eta_star_user`. Candidate centres are the highest-density sites outside
/// already selected balls, each refined to the μ-weighted centroid of its
/// ball. At most 64 candidates are examined.
pub fn detect_concentration(m: &MeasureField, r: f64, eta_star_user: f64) -> ConcentrationReport {
    let g = &m.grid;
    let mut order: Vec<usize> = (0..g.n_sites()).filter(|&i| m.mu.0[i] > 0.0).collect();
    order.sort_by(|a, b| m.mu.0[*b].total_cmp(&m.mu.0[*a]).then(a.cmp(b)));
    let mut points: Vec<ConcentrationPoint> = Vec::new();
    let mut examined = 0;
    for idx in order {
        if examined >= 64 {
            break;
        }
        let x = g.site_position(idx);
        let far = points.iter().all(|p| {
            let d = g.displacement(x, p.center);
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() >= 2.0 * r
        });
        if !far {
            continue;
        }
        examined += 1;
        let center = centroid_refine(m, x, r);
        let disjoint = points.iter().all(|p| {
            let d = g.displacement(center, p.center);
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() >= 2.0 * r
        });
        if !disjoint {
            continue;
        }
        let (mass, charge) = local_ball_mass(m, center, r);
        if mass >= eta_star_user {
            points.push(ConcentrationPoint { center, mass, charge });
        }
    }
    points.sort_by(|a, b| b.mass.total_cmp(&a.mass));
    ConcentrationReport { points, radius: r, eta_star_user }
}

fn centroid_refine(m: &MeasureField, start: [f64; 3], r: f64) -> [f64; 3] {
    let g = &m.grid;
    let h = g.spacing();
    let o = g.origin();
    let dims = g.dims();
    let mut c = start;
    for _ in 0..3 {
        let (mut wsum, mut acc) = (0.0, [0.0; 3]);
        let rr = r * r;
        let lo = [0, 1, 2].map(|a| ((c[a] - r - o[a]) / h).floor().max(0.0) as usize);
        let hi = [0, 1, 2].map(|a| (((c[a] + r - o[a]) / h).ceil() as usize).min(dims[a] - 1));
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    let x = g.position([i, j, k]);
                    let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                    if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] > rr {
                        continue;
                    }
                    let w = g.weight([i, j, k]) * m.mu.0[g.index(i, j, k)];
                    wsum += w;
                    for a in 0..3 {
                        acc[a] += w * x[a];
                    }
                }
            }
        }
        if wsum <= 0.0 {
            break;
        }
        c = acc.map(|v| v / wsum);
    }
    c
}

/// Reinterpret the grid around `center` at scale `t`: spacing `h/t`, positions
/// `(x − center)/t`, `A ↦ tA`, `Φ` unchanged, `ε ↦ ε/t`. Normalised energies of
/// corresponding balls are preserved; for dyadic `t` and grid geometry the
/// identity holds bit for bit.
pub fn rescale(cfg: &Configuration, p: EnergyParams, center: [f64; 3], t: f64) -> Result<(Configuration, EnergyParams)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter { name: "t", reason: format!("{t} must be > 0") });
    }
    let (lo, hi) = cfg.grid.bounds();
    if (0..3).any(|a| center[a] < lo[a] || center[a] > hi[a]) {
        return Err(Error::WindowOutOfDomain);
    }
    let g = &cfg.grid;
    let origin = [0, 1, 2].map(|a| (g.origin()[a] - center[a]) / t);
    let grid = match g.boundary() {
        crate::grid::Boundary::Periodic => Grid::periodic(g.dims(), g.spacing() / t)?.with_twist(g.twist())?,
        crate::grid::Boundary::Dirichlet => Grid::dirichlet(g.dims(), g.spacing() / t)?,
    }
    .with_origin(origin);
    let a = cfg.a.iter().map(|v| v.map(|x| x * t)).collect();
    let out = Configuration::new(grid, a, cfg.phi.clone())?;
    Ok((out, EnergyParams::new(p.epsilon / t, p.lambda)?))
}

/// As [`rescale`], keeping only the index box that covers the ball of radius
/// `radius` (original units) around `center`. The window becomes a Dirichlet
/// grid whose boundary holds the original values.
pub fn rescale_window(
    cfg: &Configuration,
    p: EnergyParams,
    center: [f64; 3],
    t: f64,
    radius: f64,
) -> Result<(Configuration, EnergyParams)> {
    let g = &cfg.grid;
    let h = g.spacing();
    let o = g.origin();
    let dims = g.dims();
    let mut lo = [0usize; 3];
    let mut n = [0usize; 3];
    for a in 0..3 {
        let l = ((center[a] - radius - o[a]) / h).floor();
        let u = ((center[a] + radius - o[a]) / h).ceil();
        if l < 0.0 || u > (dims[a] - 1) as f64 {
            return Err(Error::WindowOutOfDomain);
        }
        lo[a] = l as usize;
        n[a] = (u - l) as usize + 1;
        if n[a] < 4 {
            return Err(Error::WindowOutOfDomain);
        }
    }
    let sub = Grid::dirichlet(n, h)?.with_origin(g.position(lo));
    let mut a_vals = Vec::with_capacity(sub.n_sites());
    let mut phi = Vec::with_capacity(sub.n_sites());
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                let idx = g.index(lo[0] + i, lo[1] + j, lo[2] + k);
                a_vals.push(cfg.a[idx]);
                phi.push(cfg.phi[idx]);
            }
        }
    }
    rescale(&Configuration::new(sub, a_vals, phi)?, p, center, t)
}

/// Both sides of the flat local conservation law on `B_r(center)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationRow {
    pub radius: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `∫_B e_ε`, the scale both sides are compared against.
    pub ball_energy: f64,
}

impl ConservationRow {
    /// `|lhs − rhs|` relative to the ball energy (absolute when everything
    /// vanishes). Both sides are near zero for self-dual fields, so they
    /// cannot serve as their own scale.
    pub fn relative_mismatch(&self) -> f64 {
        let scale = self.ball_energy.max(self.lhs.abs()).max(self.rhs.abs());
        let d = (self.lhs - self.rhs).abs();
        if scale > 0.0 {
            d / scale
        } else {
            d
        }
    }
}

#[derive(Clone, Copy)]
struct Sample([f64; 18]);

impl Add for Sample {
    type Output = Sample;
    fn add(self, o: Sample) -> Sample {
        Sample(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Mul<f64> for Sample {
    type Output = Sample;
    fn mul(self, s: f64) -> Sample {
        Sample(self.0.map(|x| x * s))
    }
}

fn pack(l: &LocalFields) -> Sample {
    let mut s = [0.0; 18];
    for c in 0..3 {
        for q in 0..3 {
            s[3 * c + q] = l.f[c].0[q];
            s[9 + 3 * c + q] = l.grad_phi[c].0[q];
        }
    }
    Sample(s)
}

/// `lhs = r∮(2ε²|ι_{∂r}F|² + 2|∇_{∂r}Φ|² − e_ε)` over the sphere (icosphere
/// quadrature with trilinear sampling) and
/// `rhs = ∫_B(ε²|F|² − |∇Φ|² − 3λw²/ε²)`, `w = ½(1 − |Φ|²)`.
pub fn conservation_check(
    cfg: &Configuration,
    p: EnergyParams,
    center: [f64; 3],
    radii: &[f64],
) -> Result<Vec<ConservationRow>> {
    let g = &cfg.grid;
    let lf = local_fields(cfg);
    let packed: Vec<Sample> = lf.par_iter().map(pack).collect();
    let quad = Icosphere::new(DEFAULT_SPHERE_LEVEL).quadrature();
    let eps2 = p.epsilon * p.epsilon;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        if !g.contains_ball(center, r) {
            return Err(Error::BallOutOfDomain { center, radius: r });
        }
        let rhs = integrate_by(g, Region::Ball { center, radius: r }, |i| {
            let l = &lf[i];
            let w = 0.5 * (1.0 - l.phi.norm_sq());
            eps2 * l.f_norm_sq() - l.grad_phi_norm_sq() - 3.0 * p.lambda * w * w / eps2
        })?;
        let ball_energy = integrate_by(g, Region::Ball { center, radius: r }, |i| density_terms(&lf[i], p).iter().sum())?;
        let mut surf = 0.0;
        for (n, wq) in &quad {
            let x = [0, 1, 2].map(|a| center[a] + r * n[a]);
            let s = trilinear(g, x, |i| packed[i]).ok_or(Error::BallOutOfDomain { center, radius: r })?;
            let phi = trilinear(g, x, |i| cfg.phi[i]).unwrap();
            let f = |i: usize, j: usize| -> [f64; 3] {
                let (slot, sign) = match (i, j) {
                    (0, 1) => (0, 1.0),
                    (1, 0) => (0, -1.0),
                    (1, 2) => (1, 1.0),
                    (2, 1) => (1, -1.0),
                    (2, 0) => (2, 1.0),
                    (0, 2) => (2, -1.0),
                    _ => return [0.0; 3],
                };
                [0, 1, 2].map(|q| sign * s.0[3 * slot + q])
            };
            let mut irf = 0.0;
            for j in 0..3 {
                let mut v = [0.0; 3];
                for i in 0..3 {
                    let fij = f(i, j);
                    for q in 0..3 {
                        v[q] += n[i] * fij[q];
                    }
                }
                irf += dot(v, v);
            }
            let mut grad_r = [0.0; 3];
            let mut grad_sq = 0.0;
            for i in 0..3 {
                for q in 0..3 {
                    grad_r[q] += n[i] * s.0[9 + 3 * i + q];
                    grad_sq += s.0[9 + 3 * i + q].powi(2);
                }
            }
            let f_sq: f64 = (0..9).map(|k| s.0[k].powi(2)).sum();
            let pot = p.lambda / (4.0 * eps2) * (1.0 - phi.norm_sq()).powi(2);
            let e = eps2 * f_sq + grad_sq + pot;
            surf += wq * (2.0 * eps2 * irf + 2.0 * dot(grad_r, grad_r) - e);
        }
        rows.push(ConservationRow { radius: r, lhs: r * r * r * surf, rhs, ball_energy });
    }
    Ok(rows)
}

/// Hodge decomposition `ω = h + df + d*α` of a real one-form on a periodic grid.
#[derive(Debug, Clone)]
pub struct HodgeSplit {
    /// Mean (harmonic) part.
    pub h: [f64; 3],
    pub f: ScalarField,
    /// Two-form potential stored as `(xy, yz, zx)`.
    pub alpha: Vec<[f64; 3]>,
    pub df: Vec<[f64; 3]>,
    pub dstar_alpha: Vec<[f64; 3]>,
}

impl HodgeSplit {
    /// Largest pointwise deviation of `h + df + d*α` from `omega`.
    pub fn reconstruction_error(&self, omega: &[[f64; 3]]) -> f64 {
        omega
            .iter()
            .enumerate()
            .map(|(i, w)| (0..3).map(|a| (self.h[a] + self.df[i][a] + self.dstar_alpha[i][a] - w[a]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// The longitudinal one-form `ω = ε^{1/2}⟨*F, Φ⟩`.
pub fn longitudinal_form(cfg: &Configuration, p: EnergyParams) -> Vec<[f64; 3]> {
    let s = p.epsilon.sqrt();
    local_fields(cfg).par_iter().map(|l| l.star_f().map(|v| s * v.inner(l.phi))).collect()
}

/// Hodge split of [`longitudinal_form`].
pub fn hodge_longitudinal(cfg: &Configuration, p: EnergyParams) -> Result<HodgeSplit> {
    if !cfg.grid.is_periodic() {
        return Err(Error::WrongBoundary("periodic"));
    }
    hodge_split(&cfg.grid, &longitudinal_form(cfg, p))
}

/// Signed spectral wavenumber of index `m` on `n` points of spacing `h`;
/// zero at the Nyquist index.
fn wavenumber(m: usize, n: usize, h: f64) -> f64 {
    if 2 * m == n {
        return 0.0;
    }
    let s = if 2 * m < n { m as f64 } else { m as f64 - n as f64 };
    2.0 * PI * s / (n as f64 * h)
}

/// Spectral Hodge split on a periodic grid. Gradients are spectral; Fourier
/// modes whose wavenumber vanishes only because of Nyquist indices are kept in
/// the co-exact part (their α is zero).
pub fn hodge_split(grid: &Grid, omega: &[[f64; 3]]) -> Result<HodgeSplit> {
    if !grid.is_periodic() {
        return Err(Error::WrongBoundary("periodic"));
    }
    let n = grid.n_sites();
    if omega.len() != n {
        return Err(Error::DimMismatch(format!("{} values for {n} sites", omega.len())));
    }
    let dims = grid.dims();
    let h = grid.spacing();
    let zero = Complex::new(0.0, 0.0);
    let mut w_hat: Vec<Vec<Complex<f64>>> = (0..3)
        .map(|a| {
            let mut d: Vec<Complex<f64>> = omega.iter().map(|w| Complex::new(w[a], 0.0)).collect();
            fft3(&mut d, dims, false);
            d
        })
        .collect();
    let mean = [0, 1, 2].map(|a| w_hat[a][0].re / n as f64);
    let mut f_hat = vec![zero; n];
    let mut df_hat: Vec<Vec<Complex<f64>>> = vec![vec![zero; n]; 3];
    let mut psi_hat: Vec<Vec<Complex<f64>>> = vec![vec![zero; n]; 3];
    let i_unit = Complex::new(0.0, 1.0);
    for idx in 0..n {
        let c = grid.coords(idx);
        let k = [0, 1, 2].map(|a| wavenumber(c[a], dims[a], h));
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let w = [w_hat[0][idx], w_hat[1][idx], w_hat[2][idx]];
        if idx == 0 {
            for a in 0..3 {
                w_hat[a][0] = zero;
            }
            continue;
        }
        if k2 == 0.0 {
            continue;
        }
        let kw = k[0] * w[0] + k[1] * w[1] + k[2] * w[2];
        f_hat[idx] = -i_unit * kw / k2;
        let mut v = [zero; 3];
        for a in 0..3 {
            df_hat[a][idx] = k[a] * kw / k2;
            v[a] = w[a] - df_hat[a][idx];
        }
        // ψ = i k × v / |k|², so that curl ψ = v.
        let kx = [
            k[1] * v[2] - k[2] * v[1],
            k[2] * v[0] - k[0] * v[2],
            k[0] * v[1] - k[1] * v[0],
        ];
        for a in 0..3 {
            psi_hat[a][idx] = i_unit * kx[a] / k2;
        }
    }
    let inv = |mut d: Vec<Complex<f64>>| -> Vec<f64> {
        fft3(&mut d, dims, true);
        d.into_iter().map(|z| z.re).collect()
    };
    let f = inv(f_hat);
    let df: Vec<Vec<f64>> = df_hat.into_iter().map(inv).collect();
    let psi: Vec<Vec<f64>> = psi_hat.into_iter().map(inv).collect();
    // Co-exact part: everything that is neither mean nor gradient.
    let dstar: Vec<[f64; 3]> =
        (0..n).map(|i| [0, 1, 2].map(|a| omega[i][a] - mean[a] - df[a][i])).collect();
    Ok(HodgeSplit {
        h: mean,
        f: ScalarField(f),
        alpha: (0..n).map(|i| [psi[2][i], psi[0][i], psi[1][i]]).collect(),
        df: (0..n).map(|i| [df[0][i], df[1][i], df[2][i]]).collect(),
        dstar_alpha: dstar,
    })
}

/// `d*α` recomputed spectrally from the stored potential (`curl ψ`).
pub fn codifferential_of_potential(grid: &Grid, alpha: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let dims = grid.dims();
    let h = grid.spacing();
    let n = grid.n_sites();
    let psi: Vec<Vec<Complex<f64>>> = [1usize, 2, 0]
        .iter()
        .map(|&slot| {
            let mut d: Vec<Complex<f64>> = alpha.iter().map(|a| Complex::new(a[slot], 0.0)).collect();
            fft3(&mut d, dims, false);
            d
        })
        .collect();
    let i_unit = Complex::new(0.0, 1.0);
    let mut out: Vec<Vec<Complex<f64>>> = vec![vec![Complex::new(0.0, 0.0); n]; 3];
    for idx in 0..n {
        let c = grid.coords(idx);
        let k = [0, 1, 2].map(|a| wavenumber(c[a], dims[a], h));
        let p = [psi[0][idx], psi[1][idx], psi[2][idx]];
        out[0][idx] = i_unit * (k[1] * p[2] - k[2] * p[1]);
        out[1][idx] = i_unit * (k[2] * p[0] - k[0] * p[2]);
        out[2][idx] = i_unit * (k[0] * p[1] - k[1] * p[0]);
    }
    let comps: Vec<Vec<f64>> = out
        .into_iter()
        .map(|mut d| {
            fft3(&mut d, dims, true);
            d.into_iter().map(|z| z.re).collect()
        })
        .collect();
    (0..n).map(|i| [comps[0][i], comps[1][i], comps[2][i]]).collect()
}

/// Weighted L² inner product of real one-forms.
pub fn pair_real_one_forms(grid: &Grid, u: &[[f64; 3]], v: &[[f64; 3]]) -> f64 {
    grid.cell_volume()
        * crate::quadrature::pairwise_sum_by(u.len(), &|i| {
            grid.weight(grid.coords(i)) * (u[i][0] * v[i][0] + u[i][1] * v[i][1] + u[i][2] * v[i][2])
        })
}
