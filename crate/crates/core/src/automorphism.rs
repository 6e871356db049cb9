//! Lie algebra automorphisms of the matrix algebras and transport of products
//! along them.

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::half_deriv::LinearMap;
use crate::lie::{AlgebraKind, LieAlgebra};
use crate::linalg::ExactMatrix;
use crate::product::BilinearProduct;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutomorphismKind {
    Identity,
    /// `x ↦ u x u⁻¹`.
    Conjugation(ExactMatrix),
    /// `x ↦ -J xᵀ J` on `T_n`.
    Flip,
    /// `x ↦ x + f(x) z` with `f` vanishing on `[L,L]` and `z` central.
    CentralShift,
    Composite,
}

/// A bracket-preserving bijection together with its exact inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    map: LinearMap,
    inverse: LinearMap,
    kind: AutomorphismKind,
}

impl Automorphism {
    /// Verifies that `map` is invertible and preserves the bracket.
    pub fn new(l: &LieAlgebra, map: LinearMap, kind: AutomorphismKind) -> Result<Self> {
        if map.dim() != l.dim() {
            return Err(Error::DimensionMismatch { expected: l.dim(), found: map.dim() });
        }
        if let Some((i, j)) = first_bracket_violation(l, &map)? {
            return Err(Error::NotAutomorphism(i, j));
        }
        let inverse = map.inverse()?;
        Ok(Self { map, inverse, kind })
    }

    pub fn identity(dim: usize) -> Self {
        Self { map: LinearMap::identity(dim), inverse: LinearMap::identity(dim), kind: AutomorphismKind::Identity }
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn inverse(&self) -> &LinearMap {
        &self.inverse
    }

    pub fn kind(&self) -> &AutomorphismKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.map.apply(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism {
            map: self.map.compose(&other.map)?,
            inverse: other.inverse.compose(&self.inverse)?,
            kind: AutomorphismKind::Composite,
        })
    }

    pub fn inverted(&self) -> Automorphism {
        Automorphism { map: self.inverse.clone(), inverse: self.map.clone(), kind: AutomorphismKind::Composite }
    }
}

/// First basis pair `(i, j)`, `i < j`, with `g[e_i,e_j] != [g e_i, g e_j]`.
pub fn first_bracket_violation(l: &LieAlgebra, g: &LinearMap) -> Result<Option<(usize, usize)>> {
    if g.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: g.dim() });
    }
    let images: Vec<Vec<Rational>> = (0..l.dim()).map(|j| g.image(j)).collect();
    for i in 0..l.dim() {
        for j in (i + 1)..l.dim() {
            if g.apply(l.bracket_basis(i, j))? != l.bracket(&images[i], &images[j])? {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// `x ↦ u x u⁻¹`; on `T_n` the matrix `u` must be upper triangular.
pub fn conjugation_automorphism(l: &LieAlgebra, u: &ExactMatrix) -> Result<Automorphism> {
    let n = l.matrix_size().ok_or_else(|| Error::UnsupportedAlgebra(l.kind().to_string()))?;
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.rows() });
    }
    if matches!(l.kind(), AlgebraKind::UpperTriangular(_)) && (0..n).any(|i| (0..i).any(|j| !u[(i, j)].is_zero())) {
        return Err(Error::InvalidParameter("conjugation on T_n needs an upper triangular matrix".into()));
    }
    let u_inv = u.inverse()?;
    let columns: Vec<Vec<Rational>> = (0..l.dim())
        .map(|j| l.from_matrix(&u.mul(&l.to_matrix(&l.basis_vector(j))?)?.mul(&u_inv)?))
        .collect::<Result<_>>()?;
    Automorphism::new(l, LinearMap::from_columns(&columns)?, AutomorphismKind::Conjugation(u.clone()))
}

/// `x ↦ -J xᵀ J` on `T_n`, so `e(i,j) ↦ -e(n+1-j, n+1-i)`.
pub fn flip_automorphism(n: usize) -> Result<Automorphism> {
    if n < 2 {
        return Err(Error::InvalidDimension("flip needs n >= 2".into()));
    }
    let l = LieAlgebra::upper_triangular(n)?;
    let mut j = ExactMatrix::zeros(n, n);
    for i in 0..n {
        j[(i, n - 1 - i)] = Rational::one();
    }
    let columns: Vec<Vec<Rational>> = (0..l.dim())
        .map(|c| {
            let x = l.to_matrix(&l.basis_vector(c))?;
            l.from_matrix(&j.mul(&x.transpose())?.mul(&j)?.scale(&-Rational::one()))
        })
        .collect::<Result<_>>()?;
    Automorphism::new(&l, LinearMap::from_columns(&columns)?, AutomorphismKind::Flip)
}

/// `x ↦ x + f(x) z` for a functional `f` vanishing on `[L,L]` and central `z`.
pub fn central_shift(l: &LieAlgebra, functional: &[Rational], z: &[Rational]) -> Result<Automorphism> {
    l.check_len(functional.len())?;
    l.check_len(z.len())?;
    if !l.center().contains(z)? {
        return Err(Error::OutsideCenter);
    }
    let f = |x: &[Rational]| -> Rational { x.iter().zip(functional).map(|(a, b)| a * b).sum() };
    if l.derived_subalgebra().basis().iter().any(|x| !f(x).is_zero()) {
        return Err(Error::InvalidParameter("shift functional must vanish on [L,L]".into()));
    }
    let columns: Vec<Vec<Rational>> = (0..l.dim())
        .map(|j| {
            let mut v = l.basis_vector(j);
            for (o, zk) in v.iter_mut().zip(z) {
                *o += &functional[j] * zk;
            }
            v
        })
        .collect();
    Automorphism::new(l, LinearMap::from_columns(&columns)?, AutomorphismKind::CentralShift)
}

/// `e(i,i) ↦ e(i,i) + t_i δ` on `T_n`, other units fixed.
pub fn tn_central_shift(n: usize, t: &[Rational]) -> Result<Automorphism> {
    if t.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: t.len() });
    }
    let l = LieAlgebra::upper_triangular(n)?;
    let mut f = vec![Rational::zero(); l.dim()];
    for (i, ti) in t.iter().enumerate() {
        f[l.unit_index(i + 1, i + 1)] = ti.clone();
    }
    central_shift(&l, &f, &l.identity_element().expect("T_n has delta"))
}

/// `e(i,i) ↦ e(i,i) + (c-1)/n δ` on `M_n`; sends the trace structure with
/// parameter `c` to the one with parameter 1.
pub fn mn_scaling_shift(n: usize, c: &Rational) -> Result<Automorphism> {
    if c.is_zero() {
        return Err(Error::InvalidParameter("scaling shift needs c != 0".into()));
    }
    let l = LieAlgebra::full_matrix(n)?;
    let t = (c - Rational::one()) / rational::int(n as i64);
    let mut f = vec![Rational::zero(); l.dim()];
    for i in 1..=n {
        f[l.unit_index(i, i)] = t.clone();
    }
    central_shift(&l, &f, &l.identity_element().expect("M_n has delta"))
}

/// `u = (b⁻¹ - 1) e(1,1) + δ`, the conjugation that rescales `b` to 1.
pub fn b_normalizing_matrix(n: usize, b: &Rational) -> Result<ExactMatrix> {
    if b.is_zero() {
        return Err(Error::InvalidParameter("b must be nonzero".into()));
    }
    let mut u = ExactMatrix::identity(n);
    u[(0, 0)] = b.recip();
    Ok(u)
}

/// `x * y = g(g⁻¹(x) · g⁻¹(y))`.
pub fn transport(l: &LieAlgebra, p: &BilinearProduct, g: &Automorphism) -> Result<BilinearProduct> {
    if p.dim() != l.dim() || g.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: p.dim().max(g.dim()) });
    }
    if let Some((i, j)) = first_bracket_violation(l, &g.map)? {
        return Err(Error::NotAutomorphism(i, j));
    }
    transport_verified(l, p, g)
}

/// [`transport`] without re-checking bracket preservation, for automorphisms
/// built by this module (which verify on construction).
pub fn transport_verified(l: &LieAlgebra, p: &BilinearProduct, g: &Automorphism) -> Result<BilinearProduct> {
    if p.dim() != l.dim() || g.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: p.dim().max(g.dim()) });
    }
    let pre: Vec<Vec<Rational>> = (0..l.dim()).map(|j| g.inverse.image(j)).collect();
    let mut out = BilinearProduct::zero(l.dim());
    for i in 0..l.dim() {
        for j in i..l.dim() {
            out.set(i, j, &g.apply(&p.mul(&pre[i], &pre[j])?)?)?;
        }
    }
    Ok(out)
}

/// A random automorphism of `T_n` or `M_n` with small entries: a conjugation,
/// optionally composed with the flip (`T_n`) and a central shift.
pub fn random_automorphism<R: Rng + ?Sized>(l: &LieAlgebra, rng: &mut R) -> Result<Automorphism> {
    let small = |rng: &mut R| rational::int(rng.random_range(-3..=3));
    let nonzero = |rng: &mut R| loop {
        let v = rng.random_range(-3..=3);
        if v != 0 {
            return rational::int(v);
        }
    };
    match l.kind() {
        AlgebraKind::UpperTriangular(n) => {
            let mut u = ExactMatrix::zeros(n, n);
            for i in 0..n {
                u[(i, i)] = nonzero(rng);
                for j in (i + 1)..n {
                    u[(i, j)] = small(rng);
                }
            }
            let mut g = conjugation_automorphism(l, &u)?;
            if n >= 2 && rng.random_bool(0.5) {
                g = flip_automorphism(n)?.compose(&g)?;
            }
            if rng.random_bool(0.5) {
                let t = loop {
                    let t: Vec<Rational> = (0..n).map(|_| rational::int(rng.random_range(-2..=2))).collect();
                    if !(t.iter().sum::<Rational>() + Rational::one()).is_zero() {
                        break t;
                    }
                };
                g = tn_central_shift(n, &t)?.compose(&g)?;
            }
            Ok(g)
        }
        AlgebraKind::FullMatrix(n) => {
            let mut g = loop {
                let mut u = ExactMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        u[(i, j)] = small(rng);
                    }
                }
                match conjugation_automorphism(l, &u) {
                    Ok(g) => break g,
                    Err(Error::Singular) => continue,
                    Err(e) => return Err(e),
                }
            };
            if rng.random_bool(0.5) {
                g = mn_scaling_shift(n, &nonzero(rng))?.compose(&g)?;
            }
            Ok(g)
        }
        k => Err(Error::UnsupportedAlgebra(k.to_string())),
    }
}
