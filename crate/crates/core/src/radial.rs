//! Spherically symmetric (hedgehog) configurations.
//!
//! With `x̂ = x/r` the ansatz is
//!
//! ```text
//! Φ = (H(r)/r) x̂·T,        A_i = −ε_{aij} x̂_j (1 − K(r))/r · T_a,
//! ```
//!
//! which reduces the energy to
//!
//! ```text
//! 𝒴 = 4π ∫ ε²(2K'² + (1 − K²)²/r²) + (H' − H/r)² + 2K²H²/r² + (λ/4ε²)(r² − H²)²/r² dr.
//! ```
//!
//! Profiles are stored at nodes `0 < r₁ < … < r_n = r_max`; the regular
//! closure `H(0) = 0`, `K(0) = 1` is implicit. The integral uses the midpoint
//! rule on each interval with linear interpolation of `(H, K)`. Past `r_max`
//! the field is continued as a pure Coulomb tail `K = 0`, `H = r − c`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::energy::{EnergyParams, EnergyReport};
use crate::error::{Error, Result};
use crate::flow::{FlowParams, FlowStatus, FlowTrace};
use crate::grid::{Boundary, Configuration, Grid};
use crate::quadrature::pairwise_sum;
use crate::su2::Su2Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub k: Vec<f64>,
}

impl RadialProfile {
    pub fn new(r: Vec<f64>, h: Vec<f64>, k: Vec<f64>) -> Result<Self> {
        if r.len() < 2 || r.len() != h.len() || r.len() != k.len() {
            return Err(Error::DimMismatch(format!("profile lengths {} / {} / {}", r.len(), h.len(), k.len())));
        }
        if !(r[0] > 0.0) || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter { name: "r", reason: "radii must be positive and increasing".into() });
        }
        Ok(RadialProfile { r, h, k })
    }

    /// Uniform nodes `r_i = i·r_max/n`, `i = 1..=n`.
    pub fn uniform_nodes(r_max: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|i| i as f64 * r_max / n as f64).collect()
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Offset `c` of the far-field continuation `H = r − c`.
    pub fn tail_offset(&self) -> f64 {
        self.r_max() - self.h.last().unwrap()
    }

    /// `(H, K)` at any radius: quadratic closure below `r₁`, linear
    /// interpolation between nodes, Coulomb tail beyond `r_max`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r1 = self.r[0];
        if r <= r1 {
            let s = (r / r1).powi(2);
            return (self.h[0] * s, 1.0 - (1.0 - self.k[0]) * s);
        }
        if r >= self.r_max() {
            return (r - self.tail_offset(), 0.0);
        }
        let j = self.r.partition_point(|&x| x < r);
        let (ra, rb) = (self.r[j - 1], self.r[j]);
        let t = (r - ra) / (rb - ra);
        (self.h[j - 1] + t * (self.h[j] - self.h[j - 1]), self.k[j - 1] + t * (self.k[j] - self.k[j - 1]))
    }

    /// `|Φ| = H/r` at radius `r`.
    pub fn higgs_norm(&self, r: f64) -> f64 {
        let (h, _) = self.eval(r);
        if r > 0.0 {
            h / r
        } else {
            0.0
        }
    }

    /// Node values including the closure at the origin, as `(r, H, K)`.
    fn node(&self, i: usize) -> (f64, f64, f64) {
        if i == 0 {
            (0.0, 0.0, 1.0)
        } else {
            (self.r[i - 1], self.h[i - 1], self.k[i - 1])
        }
    }
}

fn bps_h(s: f64) -> f64 {
    if s < 1e-2 {
        let s2 = s * s;
        s2 / 3.0 - s2 * s2 / 45.0 + 2.0 * s2 * s2 * s2 / 945.0
    } else if s > 40.0 {
        s - 1.0
    } else {
        s / s.tanh() - 1.0
    }
}

fn bps_k(s: f64) -> f64 {
    if s < 1e-2 {
        let s2 = s * s;
        1.0 - s2 / 6.0 + 7.0 * s2 * s2 / 360.0 - 31.0 * s2 * s2 * s2 / 15120.0
    } else if s > 700.0 {
        0.0
    } else {
        s / s.sinh()
    }
}

/// The charge-one BPS profile `H = r coth r − 1`, `K = r/sinh r` at `ε = 1`.
pub fn bps_profile(r_max: f64, n: usize) -> Result<RadialProfile> {
    bps_profile_scaled(r_max, n, 1.0)
}

/// BPS profile for general ε: `H_ε(r) = εH₁(r/ε)`, `K_ε(r) = K₁(r/ε)`.
pub fn bps_profile_scaled(r_max: f64, n: usize, epsilon: f64) -> Result<RadialProfile> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter { name: "epsilon", reason: format!("{epsilon} must be > 0") });
    }
    if !(r_max >= 10.0 * epsilon) {
        return Err(Error::InvalidParameter { name: "r_max", reason: format!("{r_max} must be ≥ 10ε") });
    }
    if n < 1000 {
        return Err(Error::InvalidParameter { name: "n", reason: format!("{n} must be ≥ 1000") });
    }
    let r = RadialProfile::uniform_nodes(r_max, n);
    let h = r.iter().map(|&x| epsilon * bps_h(x / epsilon)).collect();
    let k = r.iter().map(|&x| bps_k(x / epsilon)).collect();
    RadialProfile::new(r, h, k)
}

/// Starting profile for [`radial_relax`]: the scaled BPS profile bent so that
/// `H(r_max) = r_max` and `K(r_max) = 0` when `λ > 0`.
pub fn initial_guess(r_max: f64, n: usize, p: EnergyParams) -> Result<RadialProfile> {
    let mut prof = bps_profile_scaled(r_max, n, p.epsilon)?;
    if p.lambda > 0.0 {
        let c = prof.tail_offset();
        for (h, r) in prof.h.iter_mut().zip(&prof.r) {
            *h += c * r / r_max;
        }
        *prof.k.last_mut().unwrap() = 0.0;
    }
    Ok(prof)
}

/// Interval quantities `(H_m, K_m, H', K')` and the midpoint `m`.
#[derive(Clone, Copy)]
struct Interval {
    width: f64,
    mid: f64,
}

#[inline]
fn interval_terms(iv: Interval, z: [f64; 4], p: EnergyParams) -> [f64; 3] {
    let [hm, km, hp, kp] = z;
    let eps2 = p.epsilon * p.epsilon;
    let m = iv.mid;
    let m2 = m * m;
    let one_k = 1.0 - km * km;
    let q = hp - hm / m;
    let curv = eps2 * (2.0 * kp * kp + one_k * one_k / m2);
    let grad = q * q + 2.0 * km * km * hm * hm / m2;
    let d = m2 - hm * hm;
    let pot = p.lambda / (4.0 * eps2) * d * d / m2;
    let s = 4.0 * PI * iv.width;
    [s * curv, s * grad, s * pot]
}

/// Gradient and Hessian of the interval energy with respect to `z`.
fn interval_derivs(iv: Interval, z: [f64; 4], p: EnergyParams) -> ([f64; 4], [[f64; 4]; 4]) {
    let [hm, km, hp, kp] = z;
    let eps2 = p.epsilon * p.epsilon;
    let m = iv.mid;
    let m2 = m * m;
    let lam = p.lambda / eps2;
    let q = hp - hm / m;
    let mut g = [0.0; 4];
    let mut h = [[0.0; 4]; 4];
    // Indices: 0 = Hm, 1 = Km, 2 = H', 3 = K'.
    g[3] += 4.0 * eps2 * kp;
    h[3][3] += 4.0 * eps2;
    g[1] += -4.0 * eps2 * km * (1.0 - km * km) / m2;
    h[1][1] += -4.0 * eps2 * (1.0 - 3.0 * km * km) / m2;
    g[2] += 2.0 * q;
    g[0] += -2.0 * q / m;
    h[2][2] += 2.0;
    h[0][2] += -2.0 / m;
    h[2][0] += -2.0 / m;
    h[0][0] += 2.0 / m2;
    g[1] += 4.0 * km * hm * hm / m2;
    g[0] += 4.0 * km * km * hm / m2;
    h[1][1] += 4.0 * hm * hm / m2;
    h[0][0] += 4.0 * km * km / m2;
    h[0][1] += 8.0 * km * hm / m2;
    h[1][0] += 8.0 * km * hm / m2;
    g[0] += -lam * hm * (m2 - hm * hm) / m2;
    h[0][0] += -lam * (m2 - 3.0 * hm * hm) / m2;
    let s = 4.0 * PI * iv.width;
    for a in 0..4 {
        g[a] *= s;
        for b in 0..4 {
            h[a][b] *= s;
        }
    }
    (g, h)
}

fn interval(prof: &RadialProfile, j: usize) -> (Interval, [f64; 4]) {
    let (ra, ha, ka) = prof.node(j - 1);
    let (rb, hb, kb) = prof.node(j);
    let w = rb - ra;
    (
        Interval { width: w, mid: 0.5 * (ra + rb) },
        [0.5 * (ha + hb), 0.5 * (ka + kb), (hb - ha) / w, (kb - ka) / w],
    )
}

fn interval_sums(prof: &RadialProfile, p: EnergyParams) -> [f64; 3] {
    let terms: Vec<[f64; 3]> = (1..=prof.len())
        .map(|j| {
            let (iv, z) = interval(prof, j);
            interval_terms(iv, z, p)
        })
        .collect();
    [0, 1, 2].map(|c| pairwise_sum(&terms.iter().map(|t| t[c]).collect::<Vec<_>>()))
}

/// Energy of the profile on `[0, r_max]` plus the analytic Coulomb tail.
pub fn radial_energy(prof: &RadialProfile, p: EnergyParams) -> EnergyReport {
    let [c, g, v] = interval_sums(prof, p);
    let [tc, tg, tv] = tail_terms(prof, p);
    EnergyReport::from_terms(p, c + tc, g + tg, v + tv)
}

/// Energy of the profile on `[0, r_max]` only.
pub fn radial_energy_truncated(prof: &RadialProfile, p: EnergyParams) -> EnergyReport {
    let [c, g, v] = interval_sums(prof, p);
    EnergyReport::from_terms(p, c, g, v)
}

/// Energy inside the ball of radius `radius ≤ r_max`, the straddling interval
/// counted in proportion to its overlap.
pub fn radial_energy_within(prof: &RadialProfile, p: EnergyParams, radius: f64) -> EnergyReport {
    let mut acc = [0.0; 3];
    for j in 1..=prof.len() {
        let (ra, _, _) = prof.node(j - 1);
        let (rb, _, _) = prof.node(j);
        if ra >= radius {
            break;
        }
        let frac = ((radius - ra) / (rb - ra)).min(1.0);
        let (iv, z) = interval(prof, j);
        let t = interval_terms(iv, z, p);
        for c in 0..3 {
            acc[c] += frac * t[c];
        }
    }
    EnergyReport::from_terms(p, acc[0], acc[1], acc[2])
}

/// Energy of the continuation `K = 0`, `H = r − c` on `[r_max, ∞)`. The
/// potential part is finite only for `c = 0` or `λ = 0`; otherwise it is
/// omitted.
fn tail_terms(prof: &RadialProfile, p: EnergyParams) -> [f64; 3] {
    let rm = prof.r_max();
    let c = prof.tail_offset();
    [4.0 * PI * p.epsilon * p.epsilon / rm, 4.0 * PI * c * c / rm, 0.0]
}

/// Energy density per unit radius, `d𝒴/dr`, on each interval (reported at
/// the interval's outer node).
pub fn radial_energy_density(prof: &RadialProfile, p: EnergyParams) -> Vec<f64> {
    (1..=prof.len())
        .map(|j| {
            let (iv, z) = interval(prof, j);
            interval_terms(iv, z, p).iter().sum::<f64>() / iv.width
        })
        .collect()
}

/// One-dimensional Bogomolny split `(8πε, defect, potential)` with
/// defect `4π∫ 2(εK' + hK)² + (rh' − ε(1 − K²)/r)²`, `h = H/r`, including
/// the tail.
pub fn radial_bogomolny(prof: &RadialProfile, p: EnergyParams) -> (f64, f64, f64) {
    let eps = p.epsilon;
    let mut defect = Vec::with_capacity(prof.len());
    for j in 1..=prof.len() {
        let (iv, z) = interval(prof, j);
        let [hm, km, hp, kp] = z;
        let m = iv.mid;
        let hh = hm / m;
        let rhp = hp - hm / m;
        let a = eps * kp + hh * km;
        let b = rhp - eps * (1.0 - km * km) / m;
        defect.push(4.0 * PI * iv.width * (2.0 * a * a + b * b));
    }
    let c = prof.tail_offset();
    let tail = 4.0 * PI * (c - eps).powi(2) / prof.r_max();
    let [_, _, pot] = interval_sums(prof, p);
    (8.0 * PI * eps, pairwise_sum(&defect) + tail, pot)
}

/// Symmetric positive-definite banded solve (lower band storage
/// `band[i][d] = A[i][i−d]`). Returns `None` if a pivot is not positive.
fn band_cholesky_solve(band: &[[f64; 4]], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = band.len();
    let kd = 3;
    let mut l = vec![[0.0; 4]; n];
    for i in 0..n {
        for d in (0..=kd.min(i)).rev() {
            let j = i - d;
            let mut s = band[i][d];
            for e in 1..=kd {
                if d + e > kd || e > j {
                    break;
                }
                s -= l[i][d + e] * l[j][e];
            }
            if d == 0 {
                if !(s > 0.0) {
                    return None;
                }
                l[i][0] = s.sqrt();
            } else {
                l[i][d] = s / l[j][0];
            }
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for d in 1..=kd.min(i) {
            s -= l[i][d] * y[i - d];
        }
        y[i] = s / l[i][0];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for d in 1..=kd {
            if i + d >= n {
                break;
            }
            s -= l[i + d][d] * y[i + d];
        }
        y[i] = s / l[i][0];
    }
    Some(y)
}

/// Gradient of the interior unknowns `(H_i, K_i)`, `i = 1..n−1`, and the
/// banded Hessian.
fn assemble(prof: &RadialProfile, p: EnergyParams) -> (Vec<f64>, Vec<[f64; 4]>) {
    let n = prof.len();
    let m = 2 * (n - 1);
    let mut grad = vec![0.0; m];
    let mut band = vec![[0.0; 4]; m];
    for j in 1..=n {
        let (iv, z) = interval(prof, j);
        let (gz, hz) = interval_derivs(iv, z, p);
        let w = iv.width;
        // z = J·(Ha, Ka, Hb, Kb)
        let jac = [
            [0.5, 0.0, 0.5, 0.0],
            [0.0, 0.5, 0.0, 0.5],
            [-1.0 / w, 0.0, 1.0 / w, 0.0],
            [0.0, -1.0 / w, 0.0, 1.0 / w],
        ];
        let mut gu = [0.0; 4];
        let mut hu = [[0.0; 4]; 4];
        for a in 0..4 {
            for zc in 0..4 {
                gu[a] += jac[zc][a] * gz[zc];
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for zc in 0..4 {
                    for zd in 0..4 {
                        s += jac[zc][a] * hz[zc][zd] * jac[zd][b];
                    }
                }
                hu[a][b] = s;
            }
        }
        // Local unknown a ↦ global index, if free.
        let global = |a: usize| -> Option<usize> {
            let node = if a < 2 { j - 1 } else { j };
            if node == 0 || node == n {
                None
            } else {
                Some(2 * (node - 1) + a % 2)
            }
        };
        for a in 0..4 {
            let Some(ga) = global(a) else { continue };
            grad[ga] += gu[a];
            for b in 0..4 {
                let Some(gb) = global(b) else { continue };
                if gb <= ga {
                    band[ga][ga - gb] += hu[a][b];
                }
            }
        }
    }
    (grad, band)
}

fn residual_norm(prof: &RadialProfile, grad: &[f64]) -> f64 {
    let n = prof.len();
    let mut s = 0.0;
    for i in 1..n {
        let (ra, _, _) = prof.node(i - 1);
        let (rb, _, _) = prof.node(i + 1);
        let dx = 0.5 * (rb - ra);
        s += (grad[2 * (i - 1)].powi(2) + grad[2 * (i - 1) + 1].powi(2)) / dx;
    }
    s.sqrt()
}

fn shifted(prof: &RadialProfile, delta: &[f64], t: f64) -> RadialProfile {
    let mut out = prof.clone();
    for i in 0..prof.len() - 1 {
        out.h[i] += t * delta[2 * i];
        out.k[i] += t * delta[2 * i + 1];
    }
    out
}

/// Relax a profile towards a critical point of [`radial_energy`] with the
/// closure at the origin and the outermost node held fixed.
///
/// Each iteration is a damped Newton step (Levenberg shift when the Hessian
/// is indefinite) with backtracking on the energy. `step0` caps the first
/// trial step length as a fraction of the Newton step (values ≥ 1 mean full
/// steps). The residual is the discrete L² norm of the reduced
/// Euler–Lagrange expressions.
pub fn radial_relax(
    prof: &RadialProfile,
    p: EnergyParams,
    fp: &FlowParams,
) -> Result<(RadialProfile, FlowTrace)> {
    fp.validate()?;
    let mut cur = prof.clone();
    let mut energy = radial_energy(&cur, p).total;
    let (mut grad, mut band) = assemble(&cur, p);
    let mut res = residual_norm(&cur, &grad);
    let mut trace = FlowTrace::start(energy, res);
    let first = fp.step0.min(1.0);
    for _ in 0..fp.max_iters {
        if res <= fp.tol_residual {
            trace.status = FlowStatus::Converged;
            return Ok((cur, trace));
        }
        let diag_max = band.iter().map(|b| b[0].abs()).fold(0.0, f64::max);
        let mut shift = 0.0;
        let delta = loop {
            let mut b = band.clone();
            for row in b.iter_mut() {
                row[0] += shift;
            }
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            if let Some(d) = band_cholesky_solve(&b, &neg) {
                break d;
            }
            shift = if shift == 0.0 { 1e-8 * diag_max.max(1.0) } else { shift * 4.0 };
        };
        let mut t = first;
        let mut accepted = None;
        while t > 1e-12 {
            let trial = shifted(&cur, &delta, t);
            let e = radial_energy(&trial, p).total;
            if e <= energy {
                accepted = Some((trial, e));
                break;
            }
            // Round-off floor: tiny energy rise but smaller residual.
            if e - energy <= 1e-14 * energy.abs().max(1.0) {
                let (g2, _) = assemble(&trial, p);
                if residual_norm(&trial, &g2) < res {
                    accepted = Some((trial, energy));
                    break;
                }
            }
            t *= fp.backtrack;
        }
        let Some((next, e)) = accepted else {
            trace.status = FlowStatus::Diverged;
            return Ok((cur, trace));
        };
        cur = next;
        energy = e;
        (grad, band) = assemble(&cur, p);
        res = residual_norm(&cur, &grad);
        trace.push(energy, res, t);
    }
    trace.status = if res <= fp.tol_residual { FlowStatus::Converged } else { FlowStatus::MaxItersReached };
    Ok((cur, trace))
}

/// Lift a profile to a Dirichlet grid centred on the grid centre.
///
/// Fails with [`Error::DomainTooSmall`] if `H/r < 0.99` on the inscribed
/// sphere.
pub fn hedgehog_to_grid(prof: &RadialProfile, grid: &Grid) -> Result<Configuration> {
    hedgehog_to_grid_at(prof, grid, grid.center())
}

/// As [`hedgehog_to_grid`] with an explicit centre.
pub fn hedgehog_to_grid_at(prof: &RadialProfile, grid: &Grid, center: [f64; 3]) -> Result<Configuration> {
    hedgehog_to_grid_with(prof, grid, center, LIFT_MIN_NORM)
}

/// Default lower bound on `|Φ|` at the inscribed sphere for a lift.
pub const LIFT_MIN_NORM: f64 = 0.99;

/// Lift with an explicit bound on `|Φ|` at the inscribed sphere. Windows
/// that cut through the Coulomb tail of a λ = 0 profile need a lower bound.
pub fn hedgehog_to_grid_with(prof: &RadialProfile, grid: &Grid, center: [f64; 3], min_norm: f64) -> Result<Configuration> {
    if grid.boundary() != Boundary::Dirichlet {
        return Err(Error::WrongBoundary("Dirichlet"));
    }
    let (lo, hi) = grid.bounds();
    let r_in = (0..3).map(|a| (center[a] - lo[a]).min(hi[a] - center[a])).fold(f64::INFINITY, f64::min);
    let norm_in = prof.higgs_norm(r_in);
    if !(r_in > 0.0 && norm_in >= min_norm) {
        return Err(Error::DomainTooSmall(format!("H/r = {norm_in:.4} on the inscribed sphere of radius {r_in}")));
    }
    let n = grid.n_sites();
    let vals: Vec<([Su2Vec; 3], Su2Vec)> = (0..n)
        .into_par_iter()
        .map(|i| hedgehog_value(prof, grid.site_position(i), center))
        .collect();
    let (a, phi) = vals.into_iter().unzip();
    Configuration::new(grid.clone(), a, phi)
}

/// Pointwise hedgehog fields at `x`.
pub fn hedgehog_value(prof: &RadialProfile, x: [f64; 3], center: [f64; 3]) -> ([Su2Vec; 3], Su2Vec) {
    let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if r2 == 0.0 {
        return ([Su2Vec::ZERO; 3], Su2Vec::ZERO);
    }
    let r = r2.sqrt();
    let (h, k) = prof.eval(r);
    let phi = Su2Vec(d.map(|c| h * c / r2));
    let s = (1.0 - k) / r2;
    // A_i^a = −ε_{aij} x_j s
    let a = [
        Su2Vec::new(0.0, d[2] * s, -d[1] * s),
        Su2Vec::new(-d[2] * s, 0.0, d[0] * s),
        Su2Vec::new(d[1] * s, -d[0] * s, 0.0),
    ];
    (a, phi)
}
