//! The Lie algebra su(2) as real coefficient triples.
//!
//! Elements are written `c₁T₁ + c₂T₂ + c₃T₃` with `T_a = iσ_a/2`. The inner
//! product `⟨a, b⟩ = −2 tr(ab)` makes the `T_a` orthonormal, and the basis
//! relations `[T₁,T₂] = −T₃`, `[T₁,T₃] = T₂`, `[T₂,T₃] = −T₁` mean the bracket
//! is the *negated* cross product of coefficient triples.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Default threshold below which the Higgs field is treated as vanishing
/// when splitting into longitudinal and transverse parts.
pub const TOLERANCE_ZERO: f64 = 1e-12;

/// An element of su(2) in the orthonormal basis `T₁, T₂, T₃`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su2Vec(pub [f64; 3]);

impl Su2Vec {
    pub const ZERO: Su2Vec = Su2Vec([0.0; 3]);
    pub const T1: Su2Vec = Su2Vec([1.0, 0.0, 0.0]);
    pub const T2: Su2Vec = Su2Vec([0.0, 1.0, 0.0]);
    pub const T3: Su2Vec = Su2Vec([0.0, 0.0, 1.0]);

    #[inline]
    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Su2Vec([c1, c2, c3])
    }

    /// Basis element `T_{a+1}` for `a ∈ {0, 1, 2}`.
    pub fn basis(a: usize) -> Self {
        let mut c = [0.0; 3];
        c[a] = 1.0;
        Su2Vec(c)
    }

    /// Lie bracket `[self, other]`; coefficients are `−(self × other)`.
    #[inline]
    pub fn bracket(self, other: Su2Vec) -> Su2Vec {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Su2Vec([a3 * b2 - a2 * b3, a1 * b3 - a3 * b1, a2 * b1 - a1 * b2])
    }

    /// `⟨self, other⟩ = −2 tr(self·other)`, the coefficient dot product.
    #[inline]
    pub fn inner(self, other: Su2Vec) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.inner(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Longitudinal/transverse split of `self` relative to the Higgs value `phi`,
    /// with the default [`TOLERANCE_ZERO`].
    pub fn split_parallel_perp(self, phi: Su2Vec) -> Result<(Su2Vec, Su2Vec)> {
        self.split_parallel_perp_with_tol(phi, TOLERANCE_ZERO)
    }

    /// Returns `(ξ∥, ξ⊥)` with `ξ∥ = |Φ|⁻²⟨ξ,Φ⟩Φ` and `ξ⊥ = |Φ|⁻²[Φ,[ξ,Φ]]`.
    ///
    /// Fails with [`Error::ZeroHiggs`] when `|Φ| ≤ tol`.
    pub fn split_parallel_perp_with_tol(self, phi: Su2Vec, tol: f64) -> Result<(Su2Vec, Su2Vec)> {
        let n2 = phi.norm_sq();
        if n2.sqrt() <= tol {
            return Err(Error::ZeroHiggs { norm: n2.sqrt() });
        }
        let par = phi * (self.inner(phi) / n2);
        let perp = phi.bracket(self.bracket(phi)) / n2;
        Ok((par, perp))
    }
}

/// Free-function form of [`Su2Vec::bracket`].
#[inline]
pub fn bracket(a: Su2Vec, b: Su2Vec) -> Su2Vec {
    a.bracket(b)
}

/// Free-function form of [`Su2Vec::inner`].
#[inline]
pub fn inner(a: Su2Vec, b: Su2Vec) -> f64 {
    a.inner(b)
}

/// Free-function form of [`Su2Vec::split_parallel_perp`].
pub fn split_parallel_perp(xi: Su2Vec, phi: Su2Vec) -> Result<(Su2Vec, Su2Vec)> {
    xi.split_parallel_perp(phi)
}

impl Add for Su2Vec {
    type Output = Su2Vec;
    #[inline]
    fn add(self, o: Su2Vec) -> Su2Vec {
        Su2Vec([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Su2Vec {
    type Output = Su2Vec;
    #[inline]
    fn sub(self, o: Su2Vec) -> Su2Vec {
        Su2Vec([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Su2Vec {
    type Output = Su2Vec;
    #[inline]
    fn neg(self) -> Su2Vec {
        Su2Vec([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Su2Vec {
    type Output = Su2Vec;
    #[inline]
    fn mul(self, s: f64) -> Su2Vec {
        Su2Vec([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Mul<Su2Vec> for f64 {
    type Output = Su2Vec;
    #[inline]
    fn mul(self, v: Su2Vec) -> Su2Vec {
        v * self
    }
}

impl Div<f64> for Su2Vec {
    type Output = Su2Vec;
    #[inline]
    fn div(self, s: f64) -> Su2Vec {
        Su2Vec([self.0[0] / s, self.0[1] / s, self.0[2] / s])
    }
}

impl AddAssign for Su2Vec {
    #[inline]
    fn add_assign(&mut self, o: Su2Vec) {
        self.0[0] += o.0[0];
        self.0[1] += o.0[1];
        self.0[2] += o.0[2];
    }
}

impl SubAssign for Su2Vec {
    #[inline]
    fn sub_assign(&mut self, o: Su2Vec) {
        self.0[0] -= o.0[0];
        self.0[1] -= o.0[1];
        self.0[2] -= o.0[2];
    }
}
