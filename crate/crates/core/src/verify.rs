//! The invariant suite run by `ymh verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{first_variation, total_energy, EnergyParams};
use crate::error::Result;
use crate::flow::{relax, FlowParams, FlowStatus};
use crate::gauge::{apply_gauge, random_smooth_algebra_field, random_smooth_gauge};
use crate::grid::{
    codiff_f, cov_deriv, cov_deriv_of, cov_ext_deriv, curvature, pair_higgs, pair_one_forms, pair_two_forms,
    rough_laplacian_phi, Configuration, Grid, HiggsField, OneFormField,
};
use crate::measures::{hodge_split, measures, pair_real_one_forms};
use crate::su2::Su2Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity (error, order, ...).
    pub value: f64,
    pub threshold: f64,
}

impl CheckResult {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        CheckResult { name, passed: value <= threshold, value, threshold }
    }

    fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        CheckResult { name, passed: value >= threshold, value, threshold }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} value={:.3e} threshold={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

fn rand_su2(rng: &mut ChaCha8Rng) -> Su2Vec {
    Su2Vec(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
}

fn algebra_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut jac, mut triple, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let (a, b, c) = (rand_su2(&mut rng), rand_su2(&mut rng), rand_su2(&mut rng));
        let j = a.bracket(b.bracket(c)) + b.bracket(c.bracket(a)) + c.bracket(a.bracket(b));
        jac = jac.max(j.norm());
        let t = a.bracket(b.bracket(c)) - (b * a.inner(c) - c * a.inner(b));
        triple = triple.max(t.norm());
        let lhs = a.bracket(b).norm_sq() + a.inner(b).powi(2);
        let rhs = a.norm_sq() * b.norm_sq();
        if rhs > 0.0 {
            norm = norm.max((lhs - rhs).abs() / rhs);
        }
    }
    vec![
        CheckResult::at_most("jacobi_identity", jac, 1e-12),
        CheckResult::at_most("triple_product_identity", triple, 1e-12),
        CheckResult::at_most("norm_identity", norm, 1e-12),
    ]
}

/// Smooth configuration with non-trivial connection and a Higgs field away from zero.
pub fn smooth_test_configuration(grid: &Grid, seed: u64) -> Configuration {
    let a: Vec<Vec<Su2Vec>> = (0..3).map(|d| random_smooth_algebra_field(grid, seed + d, 0.5)).collect();
    let phi = random_smooth_algebra_field(grid, seed + 7, 0.6);
    let n = grid.n_sites();
    Configuration::new(
        grid.clone(),
        (0..n).map(|i| [a[0][i], a[1][i], a[2][i]]).collect(),
        phi.into_iter().map(|p| p + Su2Vec::new(0.2, 0.1, 0.8)).collect(),
    )
    .expect("lengths match the grid")
}

fn random_free_fields(grid: &Grid, seed: u64) -> (OneFormField, HiggsField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, phi): (Vec<_>, Vec<_>) = (0..grid.n_sites())
        .map(|i| {
            if grid.is_fixed(grid.coords(i)) {
                ([Su2Vec::ZERO; 3], Su2Vec::ZERO)
            } else {
                (std::array::from_fn(|_| rand_su2(&mut rng)), rand_su2(&mut rng))
            }
        })
        .unzip();
    (OneFormField(a), HiggsField(phi))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn adjointness_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let grids = [
        Grid::periodic([6, 7, 5], 0.37)?,
        Grid::periodic([6, 7, 5], 0.37)?.with_twist(1)?,
        Grid::periodic([6, 7, 5], 0.37)?.with_twist(-2)?,
        Grid::dirichlet([7, 6, 8], 0.31)?,
    ];
    let (mut ext, mut lap) = (0.0f64, 0.0f64);
    for (k, g) in grids.iter().enumerate() {
        let s = seed + 100 * k as u64;
        let cfg = smooth_test_configuration(g, s);
        let (a, v) = random_free_fields(g, s + 50);
        let f = curvature(&cfg);
        ext = ext.max(rel(pair_one_forms(g, &codiff_f(&cfg, &f), &a), pair_two_forms(g, &f, &cov_ext_deriv(&cfg, &a))));
        lap = lap.max(rel(
            pair_higgs(g, &rough_laplacian_phi(&cfg), &v),
            pair_one_forms(g, &cov_deriv(&cfg), &cov_deriv_of(&cfg, &v)),
        ));
    }
    Ok(vec![
        CheckResult::at_most("adjoint_exterior_derivative", ext, 1e-10),
        CheckResult::at_most("adjoint_covariant_derivative", lap, 1e-10),
    ])
}

fn first_variation_check(seed: u64) -> Result<CheckResult> {
    let g = Grid::dirichlet([9, 8, 10], 0.3)?;
    let p = EnergyParams::new(0.4, 1.5)?;
    let cfg = smooth_test_configuration(&g, seed);
    let (a, v) = random_free_fields(&g, seed + 1);
    let t = 1e-4;
    let fd = (total_energy(&cfg.perturbed(t, &a, &v), p).total - total_energy(&cfg.perturbed(-t, &a, &v), p).total)
        / (2.0 * t);
    Ok(CheckResult::at_most("first_variation_vs_difference_quotient", rel(first_variation(&cfg, p, &a, &v)?, fd), 1e-6))
}

/// Observed order of the energy change under a smooth gauge transformation on
/// refining periodic grids (minimum over the two refinements).
fn gauge_order_check(seed: u64) -> Result<CheckResult> {
    let p = EnergyParams::new(0.5, 1.0)?;
    let mut defects = Vec::new();
    for n in [24usize, 48, 96] {
        let g = Grid::periodic([n; 3], 4.0 / n as f64)?;
        let cfg = smooth_test_configuration(&g, seed);
        let gauge = random_smooth_gauge(&g, seed + 1, 0.25)?;
        let out = apply_gauge(&cfg, &gauge)?;
        defects.push((total_energy(&out, p).total - total_energy(&cfg, p).total).abs());
    }
    let order = defects.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    Ok(CheckResult::at_least("gauge_covariance_order", order, 1.8))
}

/// Relax a perturbation of the trivial pair (radial Higgs and abelian
/// connection parts) and report `max |Φ| − 1`.
fn maximum_principle_check(seed: u64) -> Result<Vec<CheckResult>> {
    let g = Grid::periodic([11; 3], 1.0 / 11.0)?;
    let p = EnergyParams::new(0.1, 1.0)?;
    let r = random_smooth_algebra_field(&g, seed, 0.3);
    let a = random_smooth_algebra_field(&g, seed + 1, 0.3);
    let cfg = Configuration::new(
        g.clone(),
        a.iter().map(|v| [Su2Vec::T3 * v.0[0], Su2Vec::T3 * v.0[1], Su2Vec::T3 * v.0[2]]).collect(),
        r.iter().map(|v| Su2Vec::T3 * (1.0 + v.0[0])).collect(),
    )?;
    let fp = FlowParams { step0: 1e-3, tol_residual: 1e-7, max_iters: 20_000, backtrack: 0.5 };
    let (out, trace) = relax(&cfg, p, &fp)?;
    Ok(vec![
        CheckResult::at_most("flow_converged", if trace.status == FlowStatus::Converged { 0.0 } else { 1.0 }, 0.0),
        CheckResult::at_most("flow_monotone", if trace.is_monotone() { 0.0 } else { 1.0 }, 0.0),
        CheckResult::at_most("maximum_principle", out.max_phi_norm() - 1.0, 1e-6),
    ])
}

fn kappa_bound_check(seed: u64) -> Result<CheckResult> {
    let mut worst = 0usize;
    for (k, g) in [Grid::periodic([8; 3], 0.4)?.with_twist(1)?, Grid::dirichlet([9; 3], 0.3)?].iter().enumerate() {
        let cfg = smooth_test_configuration(g, seed + k as u64);
        worst += measures(&cfg, EnergyParams::new(0.3, 2.0)?).bound_violations();
    }
    Ok(CheckResult::at_most("pointwise_kappa_bound", worst as f64, 0.0))
}

fn hodge_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let g = Grid::periodic([16, 12, 10], 0.2)?;
    let fields: Vec<Vec<Su2Vec>> = (0..3).map(|d| random_smooth_algebra_field(&g, seed + d, 1.0)).collect();
    let omega: Vec<[f64; 3]> =
        (0..g.n_sites()).map(|i| [0.1 + fields[0][i].0[0], fields[1][i].0[1] - 0.3, fields[2][i].0[2]]).collect();
    let s = hodge_split(&g, &omega)?;
    let hv = vec![s.h; g.n_sites()];
    let tot = pair_real_one_forms(&g, &omega, &omega);
    let parts = [&hv, &s.df, &s.dstar_alpha];
    let mut orth = 0.0f64;
    for a in 0..3 {
        for b in a + 1..3 {
            orth = orth.max(pair_real_one_forms(&g, parts[a], parts[b]).abs() / tot);
        }
    }
    Ok(vec![
        CheckResult::at_most("hodge_orthogonality", orth, 1e-10),
        CheckResult::at_most("hodge_reconstruction", s.reconstruction_error(&omega), 1e-10),
    ])
}

/// Run every check. Deterministic for a given seed.
pub fn run_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = algebra_checks(seed);
    out.extend(adjointness_checks(seed)?);
    out.push(first_variation_check(seed)?);
    out.push(gauge_order_check(seed)?);
    out.extend(maximum_principle_check(seed)?);
    out.push(kappa_bound_check(seed)?);
    out.extend(hodge_checks(seed)?);
    Ok(out)
}
