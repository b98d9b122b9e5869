//! The ε-scaled energy, its first variation and pointwise identities.
//!
//! `e_ε = ε²|F|² + |∇Φ|² + (λ/4ε²)(1 − |Φ|²)²`, integrated with the weighted
//! lattice quadrature of [`crate::grid`].

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{
    codiff_f, cov_codiff, cov_deriv_of, cov_ext_deriv, integrate_by, local_fields, Configuration, HiggsField,
    LocalFields, OneFormField, Region, ScalarField, TwoFormField,
};
use crate::quadrature::pairwise_sum_by;
use crate::su2::Su2Vec;

/// Coupling constants `(ε, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    pub epsilon: f64,
    pub lambda: f64,
}

impl EnergyParams {
    pub fn new(epsilon: f64, lambda: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter { name: "epsilon", reason: format!("{epsilon} must be > 0") });
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter { name: "lambda", reason: format!("{lambda} must be ≥ 0") });
        }
        Ok(EnergyParams { epsilon, lambda })
    }

    /// `μ = min{λ, 1}`.
    pub fn mu(&self) -> f64 {
        self.lambda.min(1.0)
    }
}

/// Energy split into its three terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub epsilon: f64,
    pub lambda: f64,
    pub curvature: f64,
    pub gradient: f64,
    pub potential: f64,
    pub total: f64,
    /// `total / ε`.
    pub normalized: f64,
}

impl EnergyReport {
    pub fn from_terms(p: EnergyParams, curvature: f64, gradient: f64, potential: f64) -> Self {
        let total = curvature + gradient + potential;
        EnergyReport {
            epsilon: p.epsilon,
            lambda: p.lambda,
            curvature,
            gradient,
            potential,
            total,
            normalized: total / p.epsilon,
        }
    }

    pub const CSV_HEADER: &'static str = "epsilon,lambda,curvature,gradient,potential,total,normalized";

    pub fn csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.epsilon, self.lambda, self.curvature, self.gradient, self.potential, self.total, self.normalized
        )
    }
}

/// Per-site terms `(ε²|F|², |∇Φ|², (λ/4ε²)(1−|Φ|²)²)`.
#[inline]
pub fn density_terms(lf: &LocalFields, p: EnergyParams) -> [f64; 3] {
    let eps2 = p.epsilon * p.epsilon;
    let s = 1.0 - lf.phi.norm_sq();
    [eps2 * lf.f_norm_sq(), lf.grad_phi_norm_sq(), p.lambda / (4.0 * eps2) * s * s]
}

/// Charge density `κ = 2⟨*F, ∇Φ⟩`.
#[inline]
pub fn kappa_local(lf: &LocalFields) -> f64 {
    let sf = lf.star_f();
    2.0 * (0..3).map(|i| sf[i].inner(lf.grad_phi[i])).sum::<f64>()
}

/// Pointwise energy density `e_ε`.
pub fn energy_density(cfg: &Configuration, p: EnergyParams) -> ScalarField {
    ScalarField(local_fields(cfg).par_iter().map(|lf| density_terms(lf, p).iter().sum()).collect())
}

/// Energy integrated over a region.
pub fn region_energy(cfg: &Configuration, p: EnergyParams, region: Region) -> Result<EnergyReport> {
    let lf = local_fields(cfg);
    let terms: Vec<[f64; 3]> = lf.par_iter().map(|l| density_terms(l, p)).collect();
    let c = integrate_by(&cfg.grid, region, |i| terms[i][0])?;
    let g = integrate_by(&cfg.grid, region, |i| terms[i][1])?;
    let v = integrate_by(&cfg.grid, region, |i| terms[i][2])?;
    Ok(EnergyReport::from_terms(p, c, g, v))
}

/// Total energy `𝒴_ε` with its decomposition.
pub fn total_energy(cfg: &Configuration, p: EnergyParams) -> EnergyReport {
    region_energy(cfg, p, Region::All).expect("whole-domain integration cannot fail")
}

fn check_perturbation(cfg: &Configuration, a: &OneFormField, phi: &HiggsField) -> Result<()> {
    let n = cfg.n_sites();
    if a.0.len() != n || phi.0.len() != n {
        return Err(Error::NonconformingPerturbation(format!(
            "grid has {n} sites, a has {}, φ has {}",
            a.0.len(),
            phi.0.len()
        )));
    }
    for idx in 0..n {
        if cfg.grid.is_fixed(cfg.grid.coords(idx))
            && (a.0[idx].iter().any(|v| *v != Su2Vec::ZERO) || phi.0[idx] != Su2Vec::ZERO)
        {
            return Err(Error::NonconformingPerturbation(format!(
                "perturbation is nonzero at boundary site {:?}",
                cfg.grid.coords(idx)
            )));
        }
    }
    Ok(())
}

/// Directional derivative of `𝒴_ε` along `(a, φ)`:
/// `2ε²⟨F, d_A a⟩ + 2⟨∇Φ, ∇φ + [a, Φ]⟩ + (λ/ε²)⟨(|Φ|² − 1)Φ, φ⟩`.
pub fn first_variation(cfg: &Configuration, p: EnergyParams, a: &OneFormField, phi: &HiggsField) -> Result<f64> {
    check_perturbation(cfg, a, phi)?;
    let lf = local_fields(cfg);
    let da = cov_ext_deriv(cfg, a);
    let dphi = cov_deriv_of(cfg, phi);
    let eps2 = p.epsilon * p.epsilon;
    let g = &cfg.grid;
    let sum = pairwise_sum_by(cfg.n_sites(), &|i| {
        let l = &lf[i];
        let mut v = 0.0;
        for s in 0..3 {
            v += 2.0 * eps2 * l.f[s].inner(da.0[i][s]);
            v += 2.0 * l.grad_phi[s].inner(dphi.0[i][s] + a.0[i][s].bracket(l.phi));
        }
        v += p.lambda / eps2 * (l.phi.norm_sq() - 1.0) * l.phi.inner(phi.0[i]);
        g.weight(g.coords(i)) * v
    });
    Ok(g.cell_volume() * sum)
}

/// Euler–Lagrange residuals `r_A = ε²d*_A F − [∇Φ, Φ]`,
/// `r_Φ = ∇*∇Φ − (λ/2ε²)(1 − |Φ|²)Φ` and their combined weighted L² norm.
/// Fixed sites carry zero residual.
#[derive(Debug, Clone)]
pub struct Residuals {
    pub r_a: OneFormField,
    pub r_phi: HiggsField,
    pub norm: f64,
}

pub fn el_residuals(cfg: &Configuration, p: EnergyParams) -> Residuals {
    let lf = local_fields(cfg);
    residuals_from_local(cfg, p, &lf)
}

pub(crate) fn residuals_from_local(cfg: &Configuration, p: EnergyParams, lf: &[LocalFields]) -> Residuals {
    let g = &cfg.grid;
    let eps2 = p.epsilon * p.epsilon;
    let f = TwoFormField(lf.iter().map(|l| l.f).collect());
    let gp = OneFormField(lf.iter().map(|l| l.grad_phi).collect());
    let dsf = codiff_f(cfg, &f);
    let lap = cov_codiff(cfg, &gp);
    let (r_a, r_phi): (Vec<[Su2Vec; 3]>, Vec<Su2Vec>) = (0..cfg.n_sites())
        .into_par_iter()
        .map(|i| {
            if g.is_fixed(g.coords(i)) {
                return ([Su2Vec::ZERO; 3], Su2Vec::ZERO);
            }
            let l = &lf[i];
            let ra = [0, 1, 2].map(|j| dsf.0[i][j] * eps2 - l.grad_phi[j].bracket(l.phi));
            let rp = lap.0[i] - l.phi * (p.lambda / (2.0 * eps2) * (1.0 - l.phi.norm_sq()));
            (ra, rp)
        })
        .unzip();
    let sq = pairwise_sum_by(cfg.n_sites(), &|i| {
        g.weight(g.coords(i)) * (r_a[i].iter().map(|v| v.norm_sq()).sum::<f64>() + r_phi[i].norm_sq())
    });
    Residuals { r_a: OneFormField(r_a), r_phi: HiggsField(r_phi), norm: (g.cell_volume() * sq).sqrt() }
}

/// The three parts of the Bogomolny decomposition
/// `𝒴_ε = ±8πkε + ‖εF ∓ *∇Φ‖² + (λ/4ε²)‖1 − |Φ|²‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogomolnySplit {
    pub topological: f64,
    pub defect: f64,
    pub potential: f64,
}

impl BogomolnySplit {
    pub fn sum(&self) -> f64 {
        self.topological + self.defect + self.potential
    }
}

pub fn bogomolny_split(cfg: &Configuration, p: EnergyParams, sign: i32) -> BogomolnySplit {
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    let lf = local_fields(cfg);
    let eps = p.epsilon;
    let kappa = integrate_by(&cfg.grid, Region::All, |i| kappa_local(&lf[i])).unwrap();
    let k = kappa / (8.0 * PI);
    let defect = integrate_by(&cfg.grid, Region::All, |i| {
        let l = &lf[i];
        let sf = l.star_f();
        (0..3).map(|a| (sf[a] * eps - l.grad_phi[a] * s).norm_sq()).sum()
    })
    .unwrap();
    let potential = integrate_by(&cfg.grid, Region::All, |i| density_terms(&lf[i], p)[2]).unwrap();
    BogomolnySplit { topological: s * 8.0 * PI * k * eps, defect, potential }
}

#[inline]
fn f_dot_phi_sq(l: &LocalFields) -> f64 {
    l.f.iter().map(|f| f.inner(l.phi).powi(2)).sum()
}

#[inline]
fn f_bracket_phi_sq(l: &LocalFields) -> f64 {
    l.f.iter().map(|f| f.bracket(l.phi).norm_sq()).sum()
}

/// `ξ = ε⁻¹e_ε − ε|⟨F, Φ⟩|²` from the definition.
#[inline]
pub fn xi_definition(l: &LocalFields, p: EnergyParams) -> f64 {
    density_terms(l, p).iter().sum::<f64>() / p.epsilon - p.epsilon * f_dot_phi_sq(l)
}

/// `ξ = 2wε|F|² + ε⁻¹|∇Φ|² + λε⁻³w² + ε|[F, Φ]|²`.
#[inline]
pub fn xi_expansion(l: &LocalFields, p: EnergyParams) -> f64 {
    let eps = p.epsilon;
    let w = 0.5 * (1.0 - l.phi.norm_sq());
    2.0 * w * eps * l.f_norm_sq() + l.grad_phi_norm_sq() / eps + p.lambda * w * w / eps.powi(3)
        + eps * f_bracket_phi_sq(l)
}

/// The ξ density via its expansion.
pub fn diagnostic_xi(cfg: &Configuration, p: EnergyParams) -> ScalarField {
    ScalarField(local_fields(cfg).par_iter().map(|l| xi_expansion(l, p)).collect())
}

/// Both evaluations of ξ, for comparison.
pub fn diagnostic_xi_both(cfg: &Configuration, p: EnergyParams) -> (ScalarField, ScalarField) {
    let lf = local_fields(cfg);
    (
        ScalarField(lf.par_iter().map(|l| xi_definition(l, p)).collect()),
        ScalarField(lf.par_iter().map(|l| xi_expansion(l, p)).collect()),
    )
}

/// Weighted L² norm over free sites of `Δw − |∇Φ|² + (λw/ε²)|Φ|²`, with
/// `w = ½(1 − |Φ|²)` and `Δ = −Σ∂²` (7-point stencil).
pub fn verify_w_identity(cfg: &Configuration, p: EnergyParams) -> f64 {
    let g = &cfg.grid;
    let lf = local_fields(cfg);
    let w: Vec<f64> = cfg.phi.iter().map(|v| 0.5 * (1.0 - v.norm_sq())).collect();
    let dims = g.dims();
    let h2 = g.spacing() * g.spacing();
    let eps2 = p.epsilon * p.epsilon;
    let per_site = |idx: usize| -> f64 {
        let c = g.coords(idx);
        if g.is_fixed(c) {
            return 0.0;
        }
        let mut lap = 0.0;
        for a in 0..3 {
            let mut up = c;
            let mut dn = c;
            up[a] = (c[a] + 1) % dims[a];
            dn[a] = (c[a] + dims[a] - 1) % dims[a];
            lap += w[g.index(up[0], up[1], up[2])] + w[g.index(dn[0], dn[1], dn[2])] - 2.0 * w[idx];
        }
        let delta_w = -lap / h2;
        let l = &lf[idx];
        let r = delta_w - l.grad_phi_norm_sq() + p.lambda * w[idx] / eps2 * l.phi.norm_sq();
        r * r
    };
    (g.cell_volume() * pairwise_sum_by(g.n_sites(), &|i| g.weight(g.coords(i)) * per_site(i))).sqrt()
}

/// `(Ψ₀, Θ₀, Ψ₀⊥)` densities. `Ψ₀⊥` is set to zero where `|Φ| ≤ TOLERANCE_ZERO`
/// and those sites are listed in `undefined`.
#[derive(Debug, Clone)]
pub struct PsiTheta {
    pub psi: ScalarField,
    pub theta: ScalarField,
    pub psi_perp: ScalarField,
    pub undefined: Vec<usize>,
}

pub fn psi_theta_densities(cfg: &Configuration, p: EnergyParams) -> PsiTheta {
    let eps2 = p.epsilon * p.epsilon;
    let lf = local_fields(cfg);
    let vals: Vec<(f64, f64, Option<f64>)> = lf
        .par_iter()
        .map(|l| {
            let psi = (eps2 * l.f_norm_sq() + l.grad_phi_norm_sq()).sqrt();
            let theta2 = eps2 * f_bracket_phi_sq(l)
                + l.grad_phi.iter().map(|v| v.bracket(l.phi).norm_sq()).sum::<f64>();
            // Transverse parts via the explicit projector.
            let perp = (|| -> Option<f64> {
                let mut s = 0.0;
                for v in &l.f {
                    s += eps2 * v.split_parallel_perp(l.phi).ok()?.1.norm_sq();
                }
                for v in &l.grad_phi {
                    s += v.split_parallel_perp(l.phi).ok()?.1.norm_sq();
                }
                Some(s.sqrt())
            })();
            (psi, theta2.sqrt(), perp)
        })
        .collect();
    let undefined = vals.iter().enumerate().filter(|(_, v)| v.2.is_none()).map(|(i, _)| i).collect();
    PsiTheta {
        psi: ScalarField(vals.iter().map(|v| v.0).collect()),
        theta: ScalarField(vals.iter().map(|v| v.1).collect()),
        psi_perp: ScalarField(vals.iter().map(|v| v.2.unwrap_or(0.0)).collect()),
        undefined,
    }
}

/// L²-gradient of `𝒴_ε` at free sites: `(2r_A, 2r_Φ)`.
pub fn energy_gradient(cfg: &Configuration, p: EnergyParams) -> (OneFormField, HiggsField, f64) {
    let r = el_residuals(cfg, p);
    let ga = OneFormField(r.r_a.0.iter().map(|v| v.map(|x| x * 2.0)).collect());
    let gp = HiggsField(r.r_phi.0.iter().map(|v| *v * 2.0).collect());
    (ga, gp, r.norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth_random_cfg(grid: Grid, seed: u64) -> Configuration {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ext = grid.extent();
        let c: Vec<[f64; 4]> = (0..12)
            .map(|_| {
                [
                    rng.gen_range(-0.7..0.7),
                    rng.gen_range(1..3) as f64 * 2.0 * PI / ext[0],
                    rng.gen_range(0..3) as f64 * 2.0 * PI / ext[1],
                    rng.gen_range(0.0..6.0),
                ]
            })
            .collect();
        let c2 = c.clone();
        Configuration::from_fn(
            grid,
            move |x| {
                std::array::from_fn(|d| {
                    Su2Vec(std::array::from_fn(|q| {
                        let m = c[3 * d + q];
                        m[0] * (m[1] * x[0] + m[2] * x[1] + 0.5 * x[2] + m[3]).sin()
                    }))
                })
            },
            move |x| {
                Su2Vec(std::array::from_fn(|q| {
                    let m = c2[9 + q];
                    0.4 + m[0] * (m[2] * x[0] + m[1] * x[2] + m[3]).cos()
                }))
            },
        )
    }

    fn random_pert(cfg: &Configuration, seed: u64) -> (OneFormField, HiggsField) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = &cfg.grid;
        let mut a = OneFormField::zeros(g.n_sites());
        let mut p = HiggsField::zeros(g.n_sites());
        for i in 0..g.n_sites() {
            if g.is_fixed(g.coords(i)) {
                continue;
            }
            a.0[i] = std::array::from_fn(|_| Su2Vec(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))));
            p.0[i] = Su2Vec(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        }
        (a, p)
    }

    #[test]
    fn params_validation() {
        assert!(EnergyParams::new(0.0, 1.0).is_err());
        assert!(EnergyParams::new(1.0, -1.0).is_err());
        assert_eq!(EnergyParams::new(0.5, 3.0).unwrap().mu(), 1.0);
        assert_eq!(EnergyParams::new(0.5, 0.25).unwrap().mu(), 0.25);
    }

    #[test]
    fn trivial_and_vacuum_energies() {
        let g = Grid::periodic([8, 8, 8], 0.25).unwrap();
        let p = EnergyParams::new(0.3, 2.0).unwrap();
        let r = total_energy(&Configuration::trivial(g.clone()), p);
        assert_eq!(r.total, 0.0);
        let r = total_energy(&Configuration::constant(g.clone(), Su2Vec::ZERO), p);
        let expect = p.lambda * g.volume() / (4.0 * p.epsilon.powi(3));
        assert!((r.normalized - expect).abs() < 1e-12 * expect);
        assert_eq!(r.curvature, 0.0);
        assert_eq!(r.gradient, 0.0);
    }

    #[test]
    fn first_variation_matches_finite_differences() {
        let grids = [
            Grid::periodic([6, 6, 7], 0.4).unwrap(),
            Grid::periodic([6, 6, 6], 0.4).unwrap().with_twist(1).unwrap(),
            Grid::dirichlet([7, 6, 6], 0.35).unwrap(),
        ];
        let mut trial = 0;
        for g in grids.iter() {
            for k in 0..4u64 {
                trial += 1;
                let cfg = smooth_random_cfg(g.clone(), 100 + k + trial);
                let p = EnergyParams::new(0.7, 1.3).unwrap();
                let (a, ph) = random_pert(&cfg, 200 + k + trial);
                let dv = first_variation(&cfg, p, &a, &ph).unwrap();
                let fd = |s: f64| {
                    (total_energy(&cfg.perturbed(s, &a, &ph), p).total
                        - total_energy(&cfg.perturbed(-s, &a, &ph), p).total)
                        / (2.0 * s)
                };
                let (e1, e2) = ((fd(1e-3) - dv).abs(), (fd(5e-4) - dv).abs());
                // Second order: halving s quarters the error (or both at roundoff).
                assert!(e1 < 1e-4 * dv.abs().max(1.0), "trial {trial}: {dv} vs {}", fd(1e-3));
                assert!(e2 < 0.3 * e1 + 1e-8 * dv.abs().max(1.0), "trial {trial}: {e1} {e2}");
            }
        }
    }

    #[test]
    fn first_variation_is_linear_and_checks_conformance() {
        let g = Grid::dirichlet([6, 6, 6], 0.3).unwrap();
        let cfg = smooth_random_cfg(g.clone(), 3);
        let p = EnergyParams::new(0.5, 1.0).unwrap();
        let (a1, p1) = random_pert(&cfg, 4);
        let (a2, p2) = random_pert(&cfg, 5);
        let sum_a = OneFormField((0..g.n_sites()).map(|i| [0, 1, 2].map(|d| a1.0[i][d] + a2.0[i][d])).collect());
        let sum_p = HiggsField((0..g.n_sites()).map(|i| p1.0[i] + p2.0[i]).collect());
        let v1 = first_variation(&cfg, p, &a1, &p1).unwrap();
        let v2 = first_variation(&cfg, p, &a2, &p2).unwrap();
        let v12 = first_variation(&cfg, p, &sum_a, &sum_p).unwrap();
        assert!((v12 - v1 - v2).abs() <= 1e-12 * (v1.abs() + v2.abs()));

        let mut bad = a1.clone();
        bad.0[0][0] = Su2Vec::T1;
        assert!(matches!(first_variation(&cfg, p, &bad, &p1), Err(Error::NonconformingPerturbation(_))));
        let short = HiggsField(vec![Su2Vec::ZERO; 3]);
        assert!(matches!(first_variation(&cfg, p, &a1, &short), Err(Error::NonconformingPerturbation(_))));
    }

    #[test]
    fn trivial_pair_transverse_higgs_variation_vanishes() {
        let g = Grid::periodic([6, 6, 6], 0.3).unwrap();
        let cfg = Configuration::trivial(g.clone());
        let p = EnergyParams::new(0.5, 1.0).unwrap();
        let (a, mut ph) = random_pert(&cfg, 9);
        for v in ph.0.iter_mut() {
            v.0[2] = 0.0;
        }
        assert!(first_variation(&cfg, p, &a, &ph).unwrap().abs() < 1e-14);
        assert_eq!(el_residuals(&cfg, p).norm, 0.0);
    }

    #[test]
    fn gradient_pairs_to_first_variation() {
        use crate::grid::{pair_higgs, pair_one_forms};
        for g in [
            Grid::periodic([6, 7, 6], 0.4).unwrap().with_twist(2).unwrap(),
            Grid::dirichlet([7, 6, 6], 0.35).unwrap(),
        ] {
            let cfg = smooth_random_cfg(g.clone(), 21);
            let p = EnergyParams::new(0.6, 0.8).unwrap();
            let (a, ph) = random_pert(&cfg, 22);
            let (ga, gp, _) = energy_gradient(&cfg, p);
            let lhs = pair_one_forms(&g, &ga, &a) + pair_higgs(&g, &gp, &ph);
            let rhs = first_variation(&cfg, p, &a, &ph).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "{lhs} {rhs}");
        }
    }

    #[test]
    fn xi_two_ways_agree() {
        let g = Grid::periodic([6, 6, 6], 0.3).unwrap();
        let cfg = smooth_random_cfg(g, 11);
        let p = EnergyParams::new(0.4, 1.7).unwrap();
        let (d, e) = diagnostic_xi_both(&cfg, p);
        for (a, b) in d.0.iter().zip(&e.0) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn theta_bounded_by_psi_phi() {
        let g = Grid::periodic([6, 6, 6], 0.3).unwrap();
        let cfg = smooth_random_cfg(g, 12);
        let p = EnergyParams::new(0.4, 1.0).unwrap();
        let pt = psi_theta_densities(&cfg, p);
        for i in 0..cfg.n_sites() {
            let bound = pt.psi.0[i] * cfg.phi[i].norm();
            assert!(pt.theta.0[i] <= bound + 1e-12 * bound.max(1.0));
            let alt = pt.theta.0[i] / cfg.phi[i].norm();
            assert!((pt.psi_perp.0[i] - alt).abs() <= 1e-10 * alt.max(1.0));
        }
        let zero = psi_theta_densities(&Configuration::constant(Grid::periodic([4, 4, 4], 1.0).unwrap(), Su2Vec::ZERO), p);
        assert_eq!(zero.undefined.len(), 64);
    }

    #[test]
    fn w_identity_is_a_negative_control_on_random_fields() {
        let g = Grid::periodic([8, 8, 8], 0.3).unwrap();
        let p = EnergyParams::new(0.5, 1.0).unwrap();
        assert_eq!(verify_w_identity(&Configuration::trivial(g.clone()), p), 0.0);
        assert!(verify_w_identity(&smooth_random_cfg(g, 1), p) > 1e-2);
    }
}
