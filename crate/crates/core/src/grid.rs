//! Grid geometry, field storage and discrete differential operators.
//!
//! Fields live on sites. First derivatives are centred differences; on
//! Dirichlet grids the outermost layer uses one-sided second-order stencils
//! and is held fixed by every flow. Integrals use the weights `h³·w` where `w`
//! is the trapezoid weight (½ per Dirichlet boundary axis, 1 otherwise).
//!
//! Periodic grids may carry an abelian flux quantum `twist`: a field leaving
//! through the `+x` face re-enters gauge transformed by
//! `g(y) = exp(θ(y)T₃)`, `θ(y) = −2π·twist·y/L_y` (`y` measured from the
//! first site), i.e. `Φ ↦ gΦg⁻¹`, `A ↦ gAg⁻¹ + g d(g⁻¹)`.
//!
//! Operators that return "adjoints" ([`codiff_f`], [`rough_laplacian_phi`])
//! are exact transposes of the linearised forward operators under the weighted
//! lattice pairing, restricted to free (non-boundary) sites. This is what keeps
//! the discrete first variation exact.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::pairwise_sum_by;
use crate::su2::Su2Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Dirichlet,
}

/// Uniform rectangular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dims: [usize; 3],
    spacing: f64,
    boundary: Boundary,
    twist: i64,
    origin: [f64; 3],
}

/// Canonical storage order of two-form components.
pub const TWO_FORM_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

impl Grid {
    fn validate(dims: [usize; 3], spacing: f64) -> Result<()> {
        if dims.iter().any(|&n| n < 4) {
            return Err(Error::InvalidGrid(format!("dims {dims:?}: every direction needs ≥ 4 sites")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing {spacing} must be positive")));
        }
        Ok(())
    }

    /// Periodic box of side `n·h` per axis, first site at `−L/2`.
    pub fn periodic(dims: [usize; 3], spacing: f64) -> Result<Self> {
        Self::validate(dims, spacing)?;
        let origin = [0, 1, 2].map(|a| -0.5 * dims[a] as f64 * spacing);
        Ok(Grid { dims, spacing, boundary: Boundary::Periodic, twist: 0, origin })
    }

    /// Dirichlet box of side `(n−1)·h` per axis, centred on the origin.
    pub fn dirichlet(dims: [usize; 3], spacing: f64) -> Result<Self> {
        Self::validate(dims, spacing)?;
        let origin = [0, 1, 2].map(|a| -0.5 * (dims[a] - 1) as f64 * spacing);
        Ok(Grid { dims, spacing, boundary: Boundary::Dirichlet, twist: 0, origin })
    }

    /// Dirichlet cube `[−L, L]³` with `n` sites per side.
    pub fn dirichlet_cube(n: usize, half_width: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidGrid(format!("{n} sites per side, need ≥ 4")));
        }
        Self::dirichlet([n; 3], 2.0 * half_width / (n - 1) as f64)
    }

    pub fn with_twist(mut self, twist: i64) -> Result<Self> {
        if twist != 0 && self.boundary != Boundary::Periodic {
            return Err(Error::InvalidGrid("twist requires a periodic grid".into()));
        }
        self.twist = twist;
        Ok(self)
    }

    pub fn with_origin(mut self, origin: [f64; 3]) -> Self {
        self.origin = origin;
        self
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn twist(&self) -> i64 {
        self.twist
    }
    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }
    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn n_sites(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Physical side lengths.
    pub fn extent(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| match self.boundary {
            Boundary::Periodic => self.dims[a] as f64 * self.spacing,
            Boundary::Dirichlet => (self.dims[a] - 1) as f64 * self.spacing,
        })
    }

    pub fn volume(&self) -> f64 {
        let [x, y, z] = self.extent();
        x * y * z
    }

    /// Geometric centre of the domain.
    pub fn center(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| match self.boundary {
            Boundary::Periodic => self.origin[a] + 0.5 * self.dims[a] as f64 * self.spacing,
            Boundary::Dirichlet => self.origin[a] + 0.5 * (self.dims[a] - 1) as f64 * self.spacing,
        })
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let ij = idx / self.dims[2];
        [ij / self.dims[1], ij % self.dims[1], k]
    }

    #[inline]
    pub fn position(&self, c: [usize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| self.origin[a] + c[a] as f64 * self.spacing)
    }

    #[inline]
    pub fn site_position(&self, idx: usize) -> [f64; 3] {
        self.position(self.coords(idx))
    }

    #[inline]
    fn axis_weight(&self, axis: usize, pos: usize) -> f64 {
        if self.boundary == Boundary::Dirichlet && (pos == 0 || pos + 1 == self.dims[axis]) {
            0.5
        } else {
            1.0
        }
    }

    /// Trapezoid weight of a site (product over axes).
    #[inline]
    pub fn weight(&self, c: [usize; 3]) -> f64 {
        self.axis_weight(0, c[0]) * self.axis_weight(1, c[1]) * self.axis_weight(2, c[2])
    }

    /// Whether a site is held fixed (outer layer of a Dirichlet grid).
    #[inline]
    pub fn is_fixed(&self, c: [usize; 3]) -> bool {
        self.boundary == Boundary::Dirichlet
            && (0..3).any(|a| c[a] == 0 || c[a] + 1 == self.dims[a])
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    /// Lower and upper physical bounds of the region spanned by sites.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let hi = [0, 1, 2].map(|a| self.origin[a] + (self.dims[a] - 1) as f64 * self.spacing);
        (self.origin, hi)
    }

    /// Whether the closed ball fits inside the domain. Periodic grids accept
    /// any ball no wider than the box.
    pub fn contains_ball(&self, center: [f64; 3], r: f64) -> bool {
        if r < 0.0 {
            return false;
        }
        match self.boundary {
            Boundary::Periodic => {
                let ext = self.extent();
                (0..3).all(|a| 2.0 * r <= ext[a] + 1e-12)
            }
            Boundary::Dirichlet => {
                let (lo, hi) = self.bounds();
                (0..3).all(|a| center[a] - r >= lo[a] - 1e-12 && center[a] + r <= hi[a] + 1e-12)
            }
        }
    }

    /// Displacement `x − center`, using the minimum image on periodic grids.
    #[inline]
    pub fn displacement(&self, x: [f64; 3], center: [f64; 3]) -> [f64; 3] {
        let mut d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
        if self.is_periodic() {
            let ext = self.extent();
            for a in 0..3 {
                d[a] -= ext[a] * (d[a] / ext[a]).round();
            }
        }
        d
    }

    /// Twist rotation angle at y-index `j`.
    #[inline]
    fn twist_angle(&self, j: usize) -> f64 {
        -2.0 * PI * self.twist as f64 * j as f64 / self.dims[1] as f64
    }

    /// Shift added to `A_y` on a forward wrap through the x seam.
    #[inline]
    fn twist_shift(&self) -> f64 {
        2.0 * PI * self.twist as f64 / self.extent()[1]
    }

    /// Transport a gauge-covariant value across the x seam (`wrap = ±1`).
    #[inline]
    pub(crate) fn transport(&self, v: Su2Vec, wrap: i8, j: usize) -> Su2Vec {
        if wrap == 0 || self.twist == 0 {
            return v;
        }
        rotate_t3(v, wrap as f64 * self.twist_angle(j))
    }

    /// Transport component `dir` of the connection across the x seam.
    #[inline]
    pub(crate) fn transport_connection(&self, v: Su2Vec, dir: usize, wrap: i8, j: usize) -> Su2Vec {
        if wrap == 0 || self.twist == 0 {
            return v;
        }
        let mut out = rotate_t3(v, wrap as f64 * self.twist_angle(j));
        if dir == 1 {
            out.0[2] += wrap as f64 * self.twist_shift();
        }
        out
    }

    pub(crate) fn stencils(&self) -> Stencils {
        Stencils::new(self)
    }
}

/// `Ad_{exp(θT₃)}` acting on coefficients.
#[inline]
pub(crate) fn rotate_t3(v: Su2Vec, theta: f64) -> Su2Vec {
    let (s, c) = theta.sin_cos();
    Su2Vec([c * v.0[0] + s * v.0[1], -s * v.0[0] + c * v.0[1], v.0[2]])
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tap {
    pub pos: usize,
    pub wrap: i8,
    pub coef: f64,
}

/// Per-axis derivative stencils (forward) and their weighted transposes.
pub(crate) struct Stencils {
    fwd: [Vec<Vec<Tap>>; 3],
    adj: [Vec<Vec<Tap>>; 3],
}

impl Stencils {
    fn new(grid: &Grid) -> Self {
        let h = grid.spacing;
        let fwd = [0, 1, 2].map(|a| (0..grid.dims[a]).map(|p| forward_taps(grid, a, p, h)).collect::<Vec<_>>());
        let adj = [0, 1, 2].map(|a| {
            let n = grid.dims[a];
            let mut adj: Vec<Vec<Tap>> = vec![Vec::new(); n];
            for q in 0..n {
                let wq = grid.axis_weight(a, q);
                for t in &fwd[a][q] {
                    // Tap at source q reads target t.pos; the transpose reads q from
                    // t.pos with the inverse transport.
                    adj[t.pos].push(Tap { pos: q, wrap: -t.wrap, coef: wq * t.coef });
                }
            }
            adj
        });
        Stencils { fwd, adj }
    }

    #[inline]
    pub fn fwd(&self, axis: usize, pos: usize) -> &[Tap] {
        &self.fwd[axis][pos]
    }

    #[inline]
    pub fn adj(&self, axis: usize, pos: usize) -> &[Tap] {
        &self.adj[axis][pos]
    }
}

fn forward_taps(grid: &Grid, axis: usize, p: usize, h: f64) -> Vec<Tap> {
    let n = grid.dims[axis];
    match grid.boundary {
        Boundary::Periodic => {
            let (up, wu) = if p + 1 == n { (0, 1) } else { (p + 1, 0) };
            let (dn, wd) = if p == 0 { (n - 1, -1) } else { (p - 1, 0) };
            let wrap = |w: i8| if axis == 0 { w } else { 0 };
            vec![
                Tap { pos: up, wrap: wrap(wu), coef: 0.5 / h },
                Tap { pos: dn, wrap: wrap(wd), coef: -0.5 / h },
            ]
        }
        Boundary::Dirichlet => {
            if p == 0 {
                vec![
                    Tap { pos: 0, wrap: 0, coef: -1.5 / h },
                    Tap { pos: 1, wrap: 0, coef: 2.0 / h },
                    Tap { pos: 2, wrap: 0, coef: -0.5 / h },
                ]
            } else if p + 1 == n {
                vec![
                    Tap { pos: n - 1, wrap: 0, coef: 1.5 / h },
                    Tap { pos: n - 2, wrap: 0, coef: -2.0 / h },
                    Tap { pos: n - 3, wrap: 0, coef: 0.5 / h },
                ]
            } else {
                vec![
                    Tap { pos: p + 1, wrap: 0, coef: 0.5 / h },
                    Tap { pos: p - 1, wrap: 0, coef: -0.5 / h },
                ]
            }
        }
    }
}

#[inline]
fn with_axis(c: [usize; 3], axis: usize, pos: usize) -> [usize; 3] {
    let mut out = c;
    out[axis] = pos;
    out
}

/// Real scalar per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(pub Vec<f64>);

/// su(2)-valued function per site (Higgs-type field).
#[derive(Debug, Clone, PartialEq)]
pub struct HiggsField(pub Vec<Su2Vec>);

/// su(2)-valued one-form: one value per site and direction.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField(pub Vec<[Su2Vec; 3]>);

/// su(2)-valued two-form stored as `(xy, yz, zx)` per site.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFormField(pub Vec<[Su2Vec; 3]>);

impl TwoFormField {
    /// Component `F_ij` with antisymmetry applied.
    #[inline]
    pub fn component(&self, site: usize, i: usize, j: usize) -> Su2Vec {
        two_form_component(&self.0[site], i, j)
    }

    /// Hodge dual one-form `(*F)_i`: `(F_yz, F_zx, F_xy)`.
    #[inline]
    pub fn star(&self, site: usize) -> [Su2Vec; 3] {
        let f = &self.0[site];
        [f[1], f[2], f[0]]
    }
}

#[inline]
pub(crate) fn two_form_component(f: &[Su2Vec; 3], i: usize, j: usize) -> Su2Vec {
    match (i, j) {
        (0, 1) => f[0],
        (1, 0) => -f[0],
        (1, 2) => f[1],
        (2, 1) => -f[1],
        (2, 0) => f[2],
        (0, 2) => -f[2],
        _ => Su2Vec::ZERO,
    }
}

impl ScalarField {
    pub fn zeros(n: usize) -> Self {
        ScalarField(vec![0.0; n])
    }
    pub fn max(&self) -> f64 {
        self.0.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl HiggsField {
    pub fn zeros(n: usize) -> Self {
        HiggsField(vec![Su2Vec::ZERO; n])
    }
}

impl OneFormField {
    pub fn zeros(n: usize) -> Self {
        OneFormField(vec![[Su2Vec::ZERO; 3]; n])
    }
}

/// The pair `(A, Φ)` on a grid; `∇ = d + A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub grid: Grid,
    pub a: Vec<[Su2Vec; 3]>,
    pub phi: Vec<Su2Vec>,
}

impl Configuration {
    pub fn new(grid: Grid, a: Vec<[Su2Vec; 3]>, phi: Vec<Su2Vec>) -> Result<Self> {
        let n = grid.n_sites();
        if a.len() != n || phi.len() != n {
            return Err(Error::DimMismatch(format!(
                "grid has {n} sites, A has {}, Φ has {}",
                a.len(),
                phi.len()
            )));
        }
        Ok(Configuration { grid, a, phi })
    }

    /// `A = 0`, `Φ ≡ phi0`.
    pub fn constant(grid: Grid, phi0: Su2Vec) -> Self {
        let n = grid.n_sites();
        Configuration { grid, a: vec![[Su2Vec::ZERO; 3]; n], phi: vec![phi0; n] }
    }

    /// The trivial pair `A = 0`, `Φ ≡ T₃`.
    pub fn trivial(grid: Grid) -> Self {
        Self::constant(grid, Su2Vec::T3)
    }

    /// Build from closures of position.
    pub fn from_fn(
        grid: Grid,
        a: impl Fn([f64; 3]) -> [Su2Vec; 3] + Sync,
        phi: impl Fn([f64; 3]) -> Su2Vec + Sync,
    ) -> Self {
        let n = grid.n_sites();
        let a_vals = (0..n).into_par_iter().map(|i| a(grid.site_position(i))).collect();
        let phi_vals = (0..n).into_par_iter().map(|i| phi(grid.site_position(i))).collect();
        Configuration { grid, a: a_vals, phi: phi_vals }
    }

    pub fn n_sites(&self) -> usize {
        self.grid.n_sites()
    }

    /// `self + s·(a, φ)` on free sites.
    pub fn perturbed(&self, s: f64, a: &OneFormField, phi: &HiggsField) -> Configuration {
        let mut out = self.clone();
        for idx in 0..self.n_sites() {
            if self.grid.is_fixed(self.grid.coords(idx)) {
                continue;
            }
            for d in 0..3 {
                out.a[idx][d] += a.0[idx][d] * s;
            }
            out.phi[idx] += phi.0[idx] * s;
        }
        out
    }

    pub fn max_phi_norm(&self) -> f64 {
        self.phi.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

/// Per-site local data every density needs.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalFields {
    pub phi: Su2Vec,
    /// `F_xy, F_yz, F_zx`.
    pub f: [Su2Vec; 3],
    /// `∇_iΦ`.
    pub grad_phi: [Su2Vec; 3],
}

impl LocalFields {
    pub fn f_norm_sq(&self) -> f64 {
        self.f.iter().map(|v| v.norm_sq()).sum()
    }
    pub fn grad_phi_norm_sq(&self) -> f64 {
        self.grad_phi.iter().map(|v| v.norm_sq()).sum()
    }
    /// `(*F)_i`.
    pub fn star_f(&self) -> [Su2Vec; 3] {
        [self.f[1], self.f[2], self.f[0]]
    }
}

/// Derivative of a field along `axis` at site `c`, fetching neighbours with
/// `fetch(neighbour_index, wrap, j)`.
#[inline]
fn derivative(
    grid: &Grid,
    st: &Stencils,
    c: [usize; 3],
    axis: usize,
    fetch: impl Fn(usize, i8, usize) -> Su2Vec,
) -> Su2Vec {
    let mut acc = Su2Vec::ZERO;
    for t in st.fwd(axis, c[axis]) {
        let n = with_axis(c, axis, t.pos);
        acc += fetch(grid.index(n[0], n[1], n[2]), t.wrap, c[1]) * t.coef;
    }
    acc
}

/// Weighted transpose of [`derivative`] (without the `1/w_target` factor).
#[inline]
fn derivative_adjoint(
    grid: &Grid,
    st: &Stencils,
    c: [usize; 3],
    axis: usize,
    fetch: impl Fn(usize) -> Su2Vec,
) -> Su2Vec {
    let mut acc = Su2Vec::ZERO;
    for t in st.adj(axis, c[axis]) {
        let n = with_axis(c, axis, t.pos);
        // Weights along the other two axes are shared with the target.
        let w_other: f64 = (0..3).filter(|&b| b != axis).map(|b| grid.axis_weight(b, n[b])).product();
        acc += grid.transport(fetch(grid.index(n[0], n[1], n[2])), t.wrap, c[1]) * (t.coef * w_other);
    }
    acc
}

pub(crate) struct Ops<'a> {
    pub grid: &'a Grid,
    st: Stencils,
}

impl<'a> Ops<'a> {
    pub fn new(grid: &'a Grid) -> Self {
        Ops { grid, st: grid.stencils() }
    }

    /// `∂_axis A_dir` at site `c`.
    #[inline]
    pub fn d_connection(&self, a: &[[Su2Vec; 3]], c: [usize; 3], axis: usize, dir: usize) -> Su2Vec {
        let g = self.grid;
        derivative(g, &self.st, c, axis, |n, w, j| g.transport_connection(a[n][dir], dir, w, j))
    }

    /// `∂_axis` of a gauge-covariant scalar-type field.
    #[inline]
    pub fn d_covariant(&self, v: &[Su2Vec], c: [usize; 3], axis: usize) -> Su2Vec {
        let g = self.grid;
        derivative(g, &self.st, c, axis, |n, w, j| g.transport(v[n], w, j))
    }

    /// `∂_axis` of component `comp` of a covariant triple-valued field.
    #[inline]
    pub fn d_covariant3(&self, v: &[[Su2Vec; 3]], c: [usize; 3], axis: usize, comp: usize) -> Su2Vec {
        let g = self.grid;
        derivative(g, &self.st, c, axis, |n, w, j| g.transport(v[n][comp], w, j))
    }

    /// Weighted transpose of `∂_axis` applied to a covariant field.
    #[inline]
    pub fn d_adjoint(&self, v: impl Fn(usize) -> Su2Vec, c: [usize; 3], axis: usize) -> Su2Vec {
        derivative_adjoint(self.grid, &self.st, c, axis, v)
    }

    /// Curvature and covariant derivative at one site.
    #[inline]
    pub fn local(&self, cfg: &Configuration, idx: usize) -> LocalFields {
        let c = self.grid.coords(idx);
        let a = &cfg.a;
        let phi = cfg.phi[idx];
        let ai = a[idx];
        let mut grad_phi = [Su2Vec::ZERO; 3];
        for (i, g) in grad_phi.iter_mut().enumerate() {
            *g = self.d_covariant(&cfg.phi, c, i) + ai[i].bracket(phi);
        }
        let mut f = [Su2Vec::ZERO; 3];
        for (slot, &(i, j)) in TWO_FORM_PAIRS.iter().enumerate() {
            f[slot] = self.d_connection(a, c, i, j) - self.d_connection(a, c, j, i) + ai[i].bracket(ai[j]);
        }
        LocalFields { phi, f, grad_phi }
    }
}

/// Curvature `F_ij = ∂_iA_j − ∂_jA_i + [A_i, A_j]`.
pub fn curvature(cfg: &Configuration) -> TwoFormField {
    let ops = Ops::new(&cfg.grid);
    TwoFormField((0..cfg.n_sites()).into_par_iter().map(|i| ops.local(cfg, i).f).collect())
}

/// Covariant derivative `(∇Φ)_i = ∂_iΦ + [A_i, Φ]`.
pub fn cov_deriv(cfg: &Configuration) -> OneFormField {
    let ops = Ops::new(&cfg.grid);
    OneFormField(
        (0..cfg.n_sites())
            .into_par_iter()
            .map(|idx| {
                let c = cfg.grid.coords(idx);
                let phi = cfg.phi[idx];
                [0, 1, 2].map(|i| ops.d_covariant(&cfg.phi, c, i) + cfg.a[idx][i].bracket(phi))
            })
            .collect(),
    )
}

/// Local fields at every site.
pub fn local_fields(cfg: &Configuration) -> Vec<LocalFields> {
    let ops = Ops::new(&cfg.grid);
    (0..cfg.n_sites()).into_par_iter().map(|i| ops.local(cfg, i)).collect()
}

/// Covariant exterior derivative of a one-form perturbation, the linearisation
/// of the curvature: `(d_A a)_ij = ∂_ia_j − ∂_ja_i + [A_i,a_j] + [a_i,A_j]`.
pub fn cov_ext_deriv(cfg: &Configuration, pert: &OneFormField) -> TwoFormField {
    let ops = Ops::new(&cfg.grid);
    TwoFormField(
        (0..cfg.n_sites())
            .into_par_iter()
            .map(|idx| {
                let c = cfg.grid.coords(idx);
                let (ai, pi) = (cfg.a[idx], pert.0[idx]);
                TWO_FORM_PAIRS.map(|(i, j)| {
                    ops.d_covariant3(&pert.0, c, i, j) - ops.d_covariant3(&pert.0, c, j, i)
                        + ai[i].bracket(pi[j])
                        + pi[i].bracket(ai[j])
                })
            })
            .collect(),
    )
}

/// Covariant derivative of a Higgs-type perturbation, `∇φ = dφ + [A, φ]`.
pub fn cov_deriv_of(cfg: &Configuration, v: &HiggsField) -> OneFormField {
    let ops = Ops::new(&cfg.grid);
    OneFormField(
        (0..cfg.n_sites())
            .into_par_iter()
            .map(|idx| {
                let c = cfg.grid.coords(idx);
                [0, 1, 2].map(|i| ops.d_covariant(&v.0, c, i) + cfg.a[idx][i].bracket(v.0[idx]))
            })
            .collect(),
    )
}

/// Discrete `d*_A` of a two-form: `(d*_A F)_j = Σ_i ∂_i^† F_ij − [A_i, F_ij]`
/// (for periodic grids `∂^† = −∂`). Zero on fixed sites.
pub fn codiff_f(cfg: &Configuration, f: &TwoFormField) -> OneFormField {
    let ops = Ops::new(&cfg.grid);
    OneFormField(
        (0..cfg.n_sites())
            .into_par_iter()
            .map(|idx| {
                let c = cfg.grid.coords(idx);
                if cfg.grid.is_fixed(c) {
                    return [Su2Vec::ZERO; 3];
                }
                let ai = cfg.a[idx];
                [0, 1, 2].map(|j| {
                    let mut acc = Su2Vec::ZERO;
                    for i in 0..3 {
                        if i == j {
                            continue;
                        }
                        acc += ops.d_adjoint(|n| f.component(n, i, j), c, i);
                        acc -= ai[i].bracket(f.component(idx, i, j));
                    }
                    acc
                })
            })
            .collect(),
    )
}

/// Discrete `∇*_A` of a one-form: `Σ_i ∂_i^† v_i − [A_i, v_i]`. Zero on fixed sites.
pub fn cov_codiff(cfg: &Configuration, v: &OneFormField) -> HiggsField {
    let ops = Ops::new(&cfg.grid);
    HiggsField(
        (0..cfg.n_sites())
            .into_par_iter()
            .map(|idx| {
                let c = cfg.grid.coords(idx);
                if cfg.grid.is_fixed(c) {
                    return Su2Vec::ZERO;
                }
                let ai = cfg.a[idx];
                let mut acc = Su2Vec::ZERO;
                for i in 0..3 {
                    acc += ops.d_adjoint(|n| v.0[n][i], c, i);
                    acc -= ai[i].bracket(v.0[idx][i]);
                }
                acc
            })
            .collect(),
    )
}

/// Rough Laplacian `∇*∇Φ`, adjoint-consistent with [`cov_deriv`].
pub fn rough_laplacian_phi(cfg: &Configuration) -> HiggsField {
    cov_codiff(cfg, &cov_deriv(cfg))
}

/// Integration region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    All,
    Ball { center: [f64; 3], radius: f64 },
}

/// `Σ h³·w·value` over the region (sharp ball indicator).
pub fn integrate(grid: &Grid, field: &ScalarField, region: Region) -> Result<f64> {
    integrate_by(grid, region, |i| field.0[i])
}

/// As [`integrate`] but with the integrand given per site index.
pub fn integrate_by(grid: &Grid, region: Region, f: impl Fn(usize) -> f64 + Sync) -> Result<f64> {
    let h3 = grid.cell_volume();
    match region {
        Region::All => Ok(h3 * pairwise_sum_by(grid.n_sites(), &|i| grid.weight(grid.coords(i)) * f(i))),
        Region::Ball { center, radius } => {
            if !grid.contains_ball(center, radius) {
                return Err(Error::BallOutOfDomain { center, radius });
            }
            let r2 = radius * radius;
            Ok(h3
                * pairwise_sum_by(grid.n_sites(), &|i| {
                    let c = grid.coords(i);
                    let d = grid.displacement(grid.position(c), center);
                    if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= r2 {
                        grid.weight(c) * f(i)
                    } else {
                        0.0
                    }
                }))
        }
    }
}

/// Weighted lattice pairing `h³ Σ w ⟨u, v⟩` of one-forms.
pub fn pair_one_forms(grid: &Grid, u: &OneFormField, v: &OneFormField) -> f64 {
    grid.cell_volume()
        * pairwise_sum_by(grid.n_sites(), &|i| {
            grid.weight(grid.coords(i)) * (0..3).map(|d| u.0[i][d].inner(v.0[i][d])).sum::<f64>()
        })
}

/// Weighted lattice pairing of two-forms (sum over `i < j`).
pub fn pair_two_forms(grid: &Grid, u: &TwoFormField, v: &TwoFormField) -> f64 {
    grid.cell_volume()
        * pairwise_sum_by(grid.n_sites(), &|i| {
            grid.weight(grid.coords(i)) * (0..3).map(|d| u.0[i][d].inner(v.0[i][d])).sum::<f64>()
        })
}

/// Weighted lattice pairing of Higgs-type fields.
pub fn pair_higgs(grid: &Grid, u: &HiggsField, v: &HiggsField) -> f64 {
    grid.cell_volume() * pairwise_sum_by(grid.n_sites(), &|i| grid.weight(grid.coords(i)) * u.0[i].inner(v.0[i]))
}

/// Trilinear interpolation of per-site data at a physical point. The point
/// must lie within the cell bounds of the grid (no seam crossing).
pub fn trilinear<T, F>(grid: &Grid, x: [f64; 3], f: F) -> Option<T>
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
    F: Fn(usize) -> T,
{
    let h = grid.spacing();
    let dims = grid.dims();
    let mut base = [0usize; 3];
    let mut frac = [0.0; 3];
    for a in 0..3 {
        let s = (x[a] - grid.origin()[a]) / h;
        if s < -1e-9 || s > (dims[a] - 1) as f64 + 1e-9 {
            return None;
        }
        let s = s.clamp(0.0, (dims[a] - 1) as f64);
        let b = (s.floor() as usize).min(dims[a] - 2);
        base[a] = b;
        frac[a] = s - b as f64;
    }
    let mut acc: Option<T> = None;
    for corner in 0..8 {
        let o = [(corner >> 2) & 1, (corner >> 1) & 1, corner & 1];
        let w: f64 = (0..3).map(|a| if o[a] == 1 { frac[a] } else { 1.0 - frac[a] }).product();
        let v = f(grid.index(base[0] + o[0], base[1] + o[1], base[2] + o[2])) * w;
        acc = Some(match acc {
            None => v,
            Some(s) => s + v,
        });
    }
    acc
}
