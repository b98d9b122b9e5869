//! Energy-decreasing relaxation, the sweepout family and the gap probe.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::energy::{density_terms, residuals_from_local, total_energy, EnergyParams, EnergyReport};
use crate::error::{Error, Result};
use crate::gauge::random_smooth_algebra_field;
use crate::grid::{integrate_by, local_fields, Configuration, Grid, HiggsField, LocalFields, OneFormField, Ops, Region};
use crate::su2::Su2Vec;

/// Descent controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub step0: f64,
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Step reduction factor on rejection, in `(0, 1)`.
    pub backtrack: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams { step0: 0.1, tol_residual: 1e-6, max_iters: 10_000, backtrack: 0.5 }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(Error::InvalidParameter { name: "step0", reason: format!("{} must be > 0", self.step0) });
        }
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol_residual",
                reason: format!("{} must be > 0", self.tol_residual),
            });
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidParameter {
                name: "backtrack",
                reason: format!("{} must lie in (0, 1)", self.backtrack),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStatus {
    Converged,
    MaxItersReached,
    Diverged,
}

/// Per-iteration log. Entry 0 is the initial state (step 0).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub energy: Vec<f64>,
    pub residual: Vec<f64>,
    pub step: Vec<f64>,
    pub status: FlowStatus,
}

impl FlowTrace {
    pub(crate) fn start(energy: f64, residual: f64) -> Self {
        FlowTrace { energy: vec![energy], residual: vec![residual], step: vec![0.0], status: FlowStatus::MaxItersReached }
    }

    pub(crate) fn push(&mut self, energy: f64, residual: f64, step: f64) {
        self.energy.push(energy);
        self.residual.push(residual);
        self.step.push(step);
    }

    pub fn iterations(&self) -> usize {
        self.energy.len() - 1
    }

    pub fn final_energy(&self) -> f64 {
        *self.energy.last().unwrap()
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual.last().unwrap()
    }

    pub fn is_monotone(&self) -> bool {
        self.energy.windows(2).all(|w| w[1] <= w[0])
    }

    pub const CSV_HEADER: &'static str = "iteration,energy,residual,step";

    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        (0..self.energy.len()).map(move |i| format!("{i},{:e},{:e},{:e}", self.energy[i], self.residual[i], self.step[i]))
    }
}

/// Weighted energy from precomputed local fields.
/// Summed term by term exactly as [`total_energy`] does.
fn energy_of(grid: &Grid, p: EnergyParams, lf: &[LocalFields]) -> f64 {
    let terms: Vec<[f64; 3]> = lf.par_iter().map(|l| density_terms(l, p)).collect();
    let t = [0, 1, 2].map(|k| integrate_by(grid, Region::All, |i| terms[i][k]).unwrap());
    t[0] + t[1] + t[2]
}

/// Explicit gradient descent with backtracking.
///
/// The descent direction is the negative L² gradient with the connection part
/// divided by `ε²`, which balances the stiffness of the two blocks. A trial step
/// is accepted when it lowers the energy, or when it leaves the energy within
/// round-off (`1e-14` relative) while lowering the residual; in that case the
/// previous energy is logged so the trace stays non-increasing. The step grows
/// by 1.25 after each acceptance and shrinks by `backtrack` on each rejection.
pub fn relax(cfg: &Configuration, p: EnergyParams, fp: &FlowParams) -> Result<(Configuration, FlowTrace)> {
    relax_until(cfg, p, fp, None)
}

/// As [`relax`], additionally stopping (as converged) once the energy drops
/// below `energy_target`.
pub fn relax_until(
    cfg: &Configuration,
    p: EnergyParams,
    fp: &FlowParams,
    energy_target: Option<f64>,
) -> Result<(Configuration, FlowTrace)> {
    fp.validate()?;
    let grid = cfg.grid.clone();
    let mut cur = cfg.clone();
    let lf = local_fields(&cur);
    let mut e = energy_of(&grid, p, &lf);
    let mut res = residuals_from_local(&cur, p, &lf);
    let mut trace = FlowTrace::start(e, res.norm);
    let done = |e: f64, r: f64| r <= fp.tol_residual || energy_target.is_some_and(|t| e < t);
    if done(e, res.norm) {
        trace.status = FlowStatus::Converged;
        return Ok((cur, trace));
    }
    let a_scale = -2.0 / (p.epsilon * p.epsilon);
    let mut step = fp.step0;
    let min_step = fp.step0 * 1e-14;
    for _ in 0..fp.max_iters {
        let da = OneFormField(res.r_a.0.iter().map(|v| v.map(|x| x * a_scale)).collect());
        let dphi = HiggsField(res.r_phi.0.iter().map(|v| *v * -2.0).collect());
        loop {
            let trial = cur.perturbed(step, &da, &dphi);
            let lf_t = local_fields(&trial);
            let e_t = energy_of(&grid, p, &lf_t);
            let mut accepted = None;
            if e_t < e {
                accepted = Some((e_t, residuals_from_local(&trial, p, &lf_t)));
            } else if e_t.is_finite() && e_t - e <= 1e-14 * e.abs() {
                let r_t = residuals_from_local(&trial, p, &lf_t);
                if r_t.norm < res.norm {
                    accepted = Some((e, r_t));
                }
            }
            if let Some((e_new, r_new)) = accepted {
                cur = trial;
                e = e_new;
                res = r_new;
                trace.push(e, res.norm, step);
                step *= 1.25;
                break;
            }
            step *= fp.backtrack;
            if step < min_step {
                trace.status = FlowStatus::Diverged;
                return Ok((cur, trace));
            }
        }
        if done(e, res.norm) {
            trace.status = FlowStatus::Converged;
            return Ok((cur, trace));
        }
    }
    trace.status = FlowStatus::MaxItersReached;
    Ok((cur, trace))
}

/// Radial cut-off of the sweepout map: `ρ(t) = t` on `[0, 2/3]`, `1` on
/// `[1, ∞)`, cubic Hermite in between. Monotone with `ρ' ≤ 4/3`.
pub fn rho(t: f64) -> f64 {
    if t <= 2.0 / 3.0 {
        t
    } else if t >= 1.0 {
        1.0
    } else {
        let s = 3.0 * (t - 2.0 / 3.0);
        2.0 / 3.0 + (s * (1.0 + s * (1.0 - s))) / 3.0
    }
}

pub fn rho_prime(t: f64) -> f64 {
    if t <= 2.0 / 3.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let s = 3.0 * (t - 2.0 / 3.0);
        (1.0 - s) * (3.0 * s + 1.0)
    }
}

/// `R(x) = ρ(|x|)·x/|x|`, with `R(0) = 0`.
pub fn sweepout_map(x: [f64; 3]) -> [f64; 3] {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == 0.0 {
        return [0.0; 3];
    }
    let s = rho(r) / r;
    x.map(|c| c * s)
}

/// Centre of the zero of `Φ_y`: `a(y) = −y/(1 − |y|)`.
pub fn sweepout_center(y: [f64; 3]) -> Option<[f64; 3]> {
    let n = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    (n < 1.0).then(|| y.map(|c| -c / (1.0 - n)))
}

fn check_sweepout_args(y: [f64; 3], grid: &Grid) -> Result<f64> {
    if grid.is_periodic() {
        return Err(Error::WrongBoundary("dirichlet"));
    }
    let n = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    if !(n <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter { name: "y", reason: format!("|y| = {n} exceeds 1") });
    }
    Ok(n)
}

/// Member `H(y)` of the explicit sweepout family on a Dirichlet grid:
/// `Φ_y(x) = R((x − a(y))/ε)` and `A_y = [dΦ_y, Φ_y]` with the grid's own
/// difference stencils. Boundary sites carry the family's own values, which
/// tend to `(0, y)` as `|y| → 1`; at `|y| = 1` the constant pair is returned.
pub fn build_sweepout(y: [f64; 3], p: EnergyParams, grid: &Grid) -> Result<Configuration> {
    let ny = check_sweepout_args(y, grid)?;
    let Some(a) = sweepout_center(y).filter(|_| ny < 1.0) else {
        return Ok(Configuration::constant(grid.clone(), Su2Vec(y.map(|c| c / ny))));
    };
    let phi: Vec<Su2Vec> = (0..grid.n_sites())
        .into_par_iter()
        .map(|i| {
            let x = grid.site_position(i);
            Su2Vec(sweepout_map([0, 1, 2].map(|k| (x[k] - a[k]) / p.epsilon)))
        })
        .collect();
    let ops = Ops::new(grid);
    let av: Vec<[Su2Vec; 3]> = (0..grid.n_sites())
        .into_par_iter()
        .map(|i| {
            let c = grid.coords(i);
            [0, 1, 2].map(|k| ops.d_covariant(&phi, c, k).bracket(phi[i]))
        })
        .collect();
    Configuration::new(grid.clone(), av, phi)
}

/// Energy of `H(y)`.
pub fn sweepout_energy(y: [f64; 3], p: EnergyParams, grid: &Grid) -> Result<EnergyReport> {
    Ok(total_energy(&build_sweepout(y, p, grid)?, p))
}

/// Point `i` (1-based) of the Halton sequence in bases 2, 3, 5, mapped to the
/// closed unit ball with uniform volume density.
pub fn halton_ball(i: usize) -> [f64; 3] {
    let radical = |mut n: usize, b: usize| {
        let (mut f, mut r) = (1.0, 0.0);
        while n > 0 {
            f /= b as f64;
            r += f * (n % b) as f64;
            n /= b;
        }
        r
    };
    let (u, v, w) = (radical(i, 2), radical(i, 3), radical(i, 5));
    let r = u.cbrt();
    let z = 2.0 * v - 1.0;
    let s = (1.0 - z * z).max(0.0).sqrt();
    let ph = 2.0 * PI * w;
    [r * s * ph.cos(), r * s * ph.sin(), r * z]
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthScan {
    pub samples: Vec<([f64; 3], EnergyReport)>,
    pub omega_hat: f64,
    pub argmax_y: [f64; 3],
}

/// Maximum of `𝒴_ε(H(y))` over the first `y_samples` Halton points of the ball.
pub fn width_scan(p: EnergyParams, grid: &Grid, y_samples: usize) -> Result<WidthScan> {
    width_scan_over(p, grid, &(1..=y_samples).map(halton_ball).collect::<Vec<_>>())
}

/// As [`width_scan`] over explicit sample points.
pub fn width_scan_over(p: EnergyParams, grid: &Grid, ys: &[[f64; 3]]) -> Result<WidthScan> {
    let mut samples = Vec::with_capacity(ys.len());
    let (mut omega_hat, mut argmax_y) = (0.0, [0.0; 3]);
    for &y in ys {
        let rep = sweepout_energy(y, p, grid)?;
        if rep.total > omega_hat || samples.is_empty() {
            omega_hat = rep.total;
            argmax_y = y;
        }
        samples.push((y, rep));
    }
    Ok(WidthScan { samples, omega_hat, argmax_y })
}

/// Energy below which a relaxed trial counts as trivial.
pub const TRIVIAL_ENERGY: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GapTrial {
    pub seed: u64,
    pub amplitude: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub iterations: usize,
    pub status: FlowStatus,
}

impl GapTrial {
    pub fn is_trivial(&self) -> bool {
        self.final_energy < TRIVIAL_ENERGY
    }

    pub fn outcome(&self) -> &'static str {
        if self.is_trivial() {
            "trivial"
        } else {
            "nontrivial"
        }
    }

    pub const CSV_HEADER: &'static str = "seed,amplitude,final_energy,outcome";

    pub fn csv_row(&self) -> String {
        format!("{},{:e},{:e},{}", self.seed, self.amplitude, self.final_energy, self.outcome())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub trials: Vec<GapTrial>,
}

impl GapReport {
    pub fn fraction_trivial(&self) -> f64 {
        if self.trials.is_empty() {
            return 1.0;
        }
        self.trials.iter().filter(|t| t.is_trivial()).count() as f64 / self.trials.len() as f64
    }
}

/// Random smooth perturbation of the trivial pair with normalised energy
/// `ε⁻¹𝒴 = amplitude` (found by bisection on the perturbation size).
pub fn perturbed_trivial(p: EnergyParams, grid: &Grid, amplitude: f64, seed: u64) -> Result<Configuration> {
    if !grid.is_periodic() || grid.twist() != 0 {
        return Err(Error::WrongBoundary("untwisted periodic"));
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParameter { name: "amplitude", reason: format!("{amplitude} must be >= 0") });
    }
    let base = Configuration::trivial(grid.clone());
    if amplitude == 0.0 {
        return Ok(base);
    }
    let s = seed.wrapping_mul(4);
    let comps: Vec<Vec<Su2Vec>> = (0..3).map(|d| random_smooth_algebra_field(grid, s + d, 1.0)).collect();
    let da = OneFormField((0..grid.n_sites()).map(|i| [comps[0][i], comps[1][i], comps[2][i]]).collect());
    let dphi = HiggsField(random_smooth_algebra_field(grid, s + 3, 1.0));
    let norm_e = |t: f64| total_energy(&base.perturbed(t, &da, &dphi), p).normalized;
    let (mut lo, mut hi) = (0.0, 1e-3);
    while norm_e(hi) < amplitude {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidParameter { name: "amplitude", reason: "not reachable".into() });
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if norm_e(mid) < amplitude {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(base.perturbed(0.5 * (lo + hi), &da, &dphi))
}

/// Relax a seed and record the outcome.
pub fn gap_trial(seed_cfg: &Configuration, p: EnergyParams, fp: &FlowParams, seed: u64, amplitude: f64) -> Result<GapTrial> {
    let e0 = total_energy(seed_cfg, p).total;
    let (_, trace) = relax_until(seed_cfg, p, fp, Some(TRIVIAL_ENERGY))?;
    Ok(GapTrial {
        seed,
        amplitude,
        initial_energy: e0,
        final_energy: trace.final_energy(),
        iterations: trace.iterations(),
        status: trace.status,
    })
}

/// Relax `trials` random perturbations of the trivial pair of normalised energy
/// `amplitude` (seeds `base_seed + i`) and record which reach `𝒴 < 1e-8`.
pub fn gap_probe(
    p: EnergyParams,
    grid: &Grid,
    amplitude: f64,
    trials: usize,
    fp: &FlowParams,
    base_seed: u64,
) -> Result<GapReport> {
    let trials = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed + i;
            let cfg = perturbed_trivial(p, grid, amplitude, seed)?;
            gap_trial(&cfg, p, fp, seed, amplitude)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GapReport { trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::el_residuals;
    use crate::gauge::reducible_pair;
    use crate::measures::charge_degree_solid_angle;
    use proptest::prelude::*;

    #[test]
    fn params_validation() {
        assert!(FlowParams::default().validate().is_ok());
        for bad in [
            FlowParams { step0: 0.0, ..Default::default() },
            FlowParams { tol_residual: -1.0, ..Default::default() },
            FlowParams { backtrack: 1.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn trivial_and_reducible_pairs_are_fixed_points() {
        let p = EnergyParams::new(0.3, 1.0).unwrap();
        let g = Grid::periodic([8; 3], 0.125).unwrap();
        let (out, tr) = relax(&Configuration::trivial(g.clone()), p, &FlowParams::default()).unwrap();
        assert_eq!((tr.iterations(), tr.final_residual(), tr.status), (0, 0.0, FlowStatus::Converged));
        assert_eq!(out, Configuration::trivial(g));
        let red = reducible_pair(&Grid::periodic([8; 3], 0.125).unwrap().with_twist(1).unwrap()).unwrap();
        let (out, tr) = relax(&red, p, &FlowParams::default()).unwrap();
        assert_eq!(tr.iterations(), 0);
        assert!(tr.final_residual() <= 1e-10);
        assert_eq!(out, red);
    }

    #[test]
    fn zero_iterations_echo_input() {
        let g = Grid::dirichlet_cube(9, 1.0).unwrap();
        let p = EnergyParams::new(0.5, 1.0).unwrap();
        let cfg = build_sweepout([0.1, 0.0, 0.0], p, &g).unwrap();
        let fp = FlowParams { max_iters: 0, ..Default::default() };
        let (out, tr) = relax(&cfg, p, &fp).unwrap();
        assert_eq!(out, cfg);
        assert_eq!(tr.energy, vec![total_energy(&cfg, p).total]);
        assert_eq!(tr.status, FlowStatus::MaxItersReached);
    }

    #[test]
    fn sweepout_descent_bookkeeping() {
        let g = Grid::dirichlet_cube(13, 1.0).unwrap();
        let p = EnergyParams::new(0.5, 1.0).unwrap();
        let cfg = build_sweepout([0.05, -0.02, 0.01], p, &g).unwrap();
        let fp = FlowParams { step0: 0.01, tol_residual: 1e-6, max_iters: 300, backtrack: 0.5 };
        let (out, tr) = relax(&cfg, p, &fp).unwrap();
        assert_eq!(tr.status, FlowStatus::MaxItersReached);
        assert_eq!(tr.iterations(), 300);
        assert!(tr.is_monotone());
        assert!(tr.final_energy() < tr.energy[0]);
        assert!((el_residuals(&out, p).norm - tr.final_residual()).abs() <= 1e-12);
        assert_eq!(total_energy(&out, p).total, tr.final_energy());
        for i in 0..g.n_sites() {
            if g.is_fixed(g.coords(i)) {
                assert_eq!((out.a[i], out.phi[i]), (cfg.a[i], cfg.phi[i]));
            }
        }
    }

    #[test]
    fn relaxed_perturbation_obeys_maximum_principle() {
        let g = Grid::periodic([11; 3], 1.0 / 11.0).unwrap();
        let p = EnergyParams::new(0.1, 1.0).unwrap();
        // Radial Higgs and abelian connection perturbations only. Tangential
        // Higgs and non-abelian connection parts contain gauge directions,
        // which the lattice resolves only to O(h²).
        let r = random_smooth_algebra_field(&g, 5, 0.3);
        let a = random_smooth_algebra_field(&g, 6, 0.3);
        let cfg = Configuration::new(
            g.clone(),
            a.iter().map(|v| [Su2Vec::T3 * v.0[0], Su2Vec::T3 * v.0[1], Su2Vec::T3 * v.0[2]]).collect(),
            r.iter().map(|v| Su2Vec::T3 * (1.0 + v.0[0])).collect(),
        )
        .unwrap();
        assert!(cfg.max_phi_norm() > 1.0 + 1e-2);
        let fp = FlowParams { step0: 1e-3, tol_residual: 1e-7, max_iters: 20_000, backtrack: 0.5 };
        let (out, tr) = relax(&cfg, p, &fp).unwrap();
        assert_eq!(tr.status, FlowStatus::Converged);
        assert!(tr.is_monotone());
        assert!(out.max_phi_norm() <= 1.0 + 1e-6);
        assert!((el_residuals(&out, p).norm - tr.final_residual()).abs() <= 1e-12);
    }

    #[test]
    fn sweepout_family_contract() {
        let g = Grid::dirichlet_cube(17, 1.0).unwrap();
        let p = EnergyParams::new(0.25, 1.0).unwrap();
        let y = [0.6, 0.0, 0.8];
        let c = build_sweepout(y, p, &g).unwrap();
        assert_eq!(c, Configuration::constant(g.clone(), Su2Vec(y)));
        assert!(total_energy(&c, p).total < 1e-25);
        // Zero at the origin, degree one around it.
        let c0 = build_sweepout([0.0; 3], p, &g).unwrap();
        assert_eq!(c0.phi[g.index(8, 8, 8)], Su2Vec::ZERO);
        assert!((charge_degree_solid_angle(&c0, [0.0; 3], 0.5, 3).unwrap() - 1.0).abs() < 1e-9);
        // Centre far outside: unit Higgs field, no potential.
        let far = build_sweepout([0.9, 0.0, 0.0], p, &g).unwrap();
        assert!(far.phi.iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
        assert!(total_energy(&far, p).potential < 1e-28);
        assert!(matches!(build_sweepout([1.0, 1.0, 0.0], p, &g), Err(Error::InvalidParameter { .. })));
        assert!(build_sweepout([0.0; 3], p, &Grid::periodic([8; 3], 0.25).unwrap()).is_err());
        // Boundary carries the family's own trace and tends to (0, y) as |y| → 1.
        let y = [0.0, 0.0, 0.999];
        let near = build_sweepout(y, p, &g).unwrap();
        for i in 0..g.n_sites() {
            if g.is_fixed(g.coords(i)) {
                assert!((near.phi[i] - Su2Vec::T3).norm() < 5e-3);
            }
        }
        assert!(width_scan_over(p, &g, &[[1.0, 0.0, 0.0], [0.0, -1.0, 0.0]]).unwrap().omega_hat == 0.0);
    }

    #[test]
    fn halton_points_fill_the_ball() {
        let pts: Vec<_> = (1..=200).map(halton_ball).collect();
        assert!(pts.iter().all(|y| y.iter().map(|c| c * c).sum::<f64>() <= 1.0 + 1e-12));
        let inner = pts.iter().filter(|y| y.iter().map(|c| c * c).sum::<f64>() < 0.25).count();
        // Volume fraction of the half-radius ball is 1/8.
        assert!((inner as f64 / 200.0 - 0.125).abs() < 0.03);
    }

    #[test]
    fn gap_probe_small_amplitudes_are_trivial() {
        let g = Grid::periodic([12; 3], 1.0 / 12.0).unwrap();
        let p = EnergyParams::new(1.0 / 12.0, 1.0).unwrap();
        let fp = FlowParams { step0: 1e-3, max_iters: 5000, ..Default::default() };
        let zero = gap_probe(p, &g, 0.0, 2, &fp, 1).unwrap();
        assert!(zero.trials.iter().all(|t| t.final_energy == 0.0 && t.iterations == 0));
        let cfg = perturbed_trivial(p, &g, 0.1, 3).unwrap();
        assert!((total_energy(&cfg, p).normalized - 0.1).abs() < 1e-9);
        let rep = gap_probe(p, &g, 0.1, 3, &fp, 10).unwrap();
        assert_eq!(rep.fraction_trivial(), 1.0);
        assert!(perturbed_trivial(p, &Grid::dirichlet_cube(8, 1.0).unwrap(), 0.1, 1).is_err());
    }

    #[test]
    fn gap_probe_negative_control() {
        // A hedgehog pasted into the torus: large energy, not flowing to zero
        // within a short budget.
        let g = Grid::periodic([12; 3], 1.0 / 12.0).unwrap();
        let p = EnergyParams::new(1.0 / 12.0, 1.0).unwrap();
        let seed = Configuration::from_fn(
            g.clone(),
            |_| [Su2Vec::ZERO; 3],
            |x| Su2Vec(sweepout_map(x.map(|c| c / p.epsilon))),
        );
        let fp = FlowParams { step0: 1e-3, max_iters: 200, ..Default::default() };
        let t = gap_trial(&seed, p, &fp, 0, f64::NAN).unwrap();
        assert!(!t.is_trivial());
        assert_eq!(t.outcome(), "nontrivial");
    }

    proptest! {
        #[test]
        fn rho_is_monotone_bounded_and_continuous(t in 0.0f64..2.0, dt in 1e-9f64..1e-3) {
            prop_assert!(rho(t + dt) >= rho(t));
            prop_assert!((0.0..=5.0).contains(&rho_prime(t)));
            prop_assert!((rho(t + dt) - rho(t) - rho_prime(t) * dt).abs() <= 6.0 * dt * dt + 1e-15);
            prop_assert!(rho(t) <= 1.0);
        }
    }
}
