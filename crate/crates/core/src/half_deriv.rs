//! δ-derivations of Lie algebras, with δ = ½ as the case of interest.
//!
//! A linear map `φ` is a δ-derivation when
//! `φ([x, y]) = δ([φ(x), y] + [x, φ(y)])` for all `x, y`. The space of
//! ½-derivations is computed as the kernel of a linear system in the `N²`
//! matrix entries of `φ`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lie::{AlgebraKind, LieAlgebra};
use crate::linalg::{sparse_from_dense, Echelon, ExactMatrix, SparseRow};
use crate::rational::{self, Rational};

/// A linear endomorphism of an algebra; column `j` is the image of `e_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearMap {
    matrix: ExactMatrix,
}

impl LinearMap {
    pub fn new(matrix: ExactMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ExactMatrix::identity(dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: ExactMatrix::zeros(dim, dim) }
    }

    pub fn from_columns(columns: &[Vec<Rational>]) -> Result<Self> {
        Self::new(ExactMatrix::from_columns(columns.len(), columns)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    /// `φ(e_j)`.
    pub fn image(&self, j: usize) -> Vec<Rational> {
        self.matrix.column(j)
    }

    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.matrix.mul_vec(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        Ok(Self { matrix: self.matrix.mul(&other.matrix)? })
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap> {
        Ok(Self { matrix: self.matrix.add(&other.matrix)? })
    }

    pub fn scale(&self, s: &Rational) -> LinearMap {
        Self { matrix: self.matrix.scale(s) }
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        Ok(Self { matrix: self.matrix.inverse()? })
    }

    /// Column-major flattening: entry `j * N + k` is `φ(e_j)_k`.
    pub fn to_vector(&self) -> Vec<Rational> {
        let n = self.dim();
        (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| self.matrix[(k, j)].clone()).collect()
    }

    pub fn from_vector(dim: usize, v: &[Rational]) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: v.len() });
        }
        let mut m = ExactMatrix::zeros(dim, dim);
        for j in 0..dim {
            for k in 0..dim {
                m[(k, j)] = v[j * dim + k].clone();
            }
        }
        Ok(Self { matrix: m })
    }
}

/// The weight `δ` in the δ-derivation identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationWeight(pub Rational);

impl DerivationWeight {
    pub fn half() -> Self {
        Self(rational::frac(1, 2))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl Default for DerivationWeight {
    fn default() -> Self {
        Self::half()
    }
}

/// Checks the identity on all basis pairs.
pub fn is_delta_derivation(l: &LieAlgebra, phi: &LinearMap, w: &DerivationWeight) -> Result<bool> {
    l.check_len(phi.dim())?;
    let images: Vec<Vec<Rational>> = (0..l.dim()).map(|j| phi.image(j)).collect();
    for i in 0..l.dim() {
        for j in (i + 1)..l.dim() {
            let lhs = phi.apply(l.bracket_basis(i, j))?;
            let a = l.bracket(&images[i], &l.basis_vector(j))?;
            let b = l.bracket(&l.basis_vector(i), &images[j])?;
            if lhs.iter().zip(a.iter().zip(&b)).any(|(x, (y, z))| *x != w.value() * (y + z)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rows of the δ-derivation system, one block per pair `i < j` and output
/// coordinate `k`, in that lexicographic order. Unknown `l * N + m` is
/// `φ(e_l)_m`.
pub fn derivation_system(l: &LieAlgebra, w: &DerivationWeight) -> Vec<SparseRow> {
    let n = l.dim();
    let w = w.value();
    let mut rows = Vec::with_capacity(n * n * (n.saturating_sub(1)) / 2);
    let mut acc = vec![Rational::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                // φ([e_i, e_j])_k
                for (m, c) in l.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        acc[m * n + k] += c;
                    }
                }
                // -w [φ(e_i), e_j]_k - w [e_i, φ(e_j)]_k
                for m in 0..n {
                    let c1 = l.structure_constant(m, j, k);
                    if !c1.is_zero() {
                        acc[i * n + m] -= w * c1;
                    }
                    let c2 = l.structure_constant(i, m, k);
                    if !c2.is_zero() {
                        acc[j * n + m] -= w * c2;
                    }
                }
                let row = sparse_from_dense(&acc);
                for (c, _) in &row {
                    acc[*c] = Rational::zero();
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// A computed δ-derivation space with a membership oracle.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    dim: usize,
    weight: DerivationWeight,
    basis: Vec<LinearMap>,
    span: Echelon,
}

impl DerivationSpace {
    pub fn compute(l: &LieAlgebra, w: &DerivationWeight) -> Self {
        let n = l.dim();
        let mut system = Echelon::new(n * n);
        for row in derivation_system(l, w) {
            system.insert(row);
        }
        let basis: Vec<LinearMap> = system
            .nullspace_basis()
            .iter()
            .map(|v| LinearMap::from_vector(n, v).expect("kernel vectors have length N^2"))
            .collect();
        let mut span = Echelon::new(n * n);
        for b in &basis {
            span.insert_dense(&b.to_vector()).expect("length N^2");
        }
        Self { dim: n, weight: w.clone(), basis, span }
    }

    pub fn basis(&self) -> &[LinearMap] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn algebra_dim(&self) -> usize {
        self.dim
    }

    pub fn weight(&self) -> &DerivationWeight {
        &self.weight
    }

    pub fn contains(&self, phi: &LinearMap) -> Result<bool> {
        if phi.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: phi.dim() });
        }
        self.span.contains(&phi.to_vector())
    }

    pub fn flattened_basis(&self) -> Vec<Vec<Rational>> {
        self.basis.iter().map(LinearMap::to_vector).collect()
    }
}

/// Basis of the space of δ-derivations of `l`.
pub fn delta_derivation_space(l: &LieAlgebra, w: &DerivationWeight) -> Vec<LinearMap> {
    DerivationSpace::compute(l, w).basis
}

fn tn_size(l: &LieAlgebra) -> Result<usize> {
    match l.kind() {
        AlgebraKind::UpperTriangular(n) => Ok(n),
        k => Err(Error::UnsupportedAlgebra(format!("expected T_n, got {k}"))),
    }
}

/// `α` on `T_n`: `e(1,1) ↦ e(1,n)`, `e(n,n) ↦ -e(1,n)`, everything else to 0.
pub fn alpha_map(n: usize) -> Result<LinearMap> {
    if n < 2 {
        return Err(Error::InvalidDimension("alpha needs n >= 2".into()));
    }
    let l = LieAlgebra::upper_triangular(n)?;
    let mut m = ExactMatrix::zeros(l.dim(), l.dim());
    let top = l.unit_index(1, n);
    m[(top, l.unit_index(1, 1))] = Rational::one();
    m[(top, l.unit_index(n, n))] = -Rational::one();
    LinearMap::new(m)
}

/// `β_i` on `T_n`: `e(i,i) ↦ δ`, everything else to 0.
pub fn beta_map(n: usize, i: usize) -> Result<LinearMap> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let l = LieAlgebra::upper_triangular(n)?;
    let delta = l.identity_element().expect("T_n contains delta");
    let mut m = ExactMatrix::zeros(l.dim(), l.dim());
    let col = l.unit_index(i, i);
    for (r, x) in delta.iter().enumerate() {
        m[(r, col)] = x.clone();
    }
    LinearMap::new(m)
}

/// `γ` on `M_n`: diagonal units to `δ`, off-diagonal units to 0.
pub fn gamma_map(n: usize) -> Result<LinearMap> {
    if n < 2 {
        return Err(Error::InvalidDimension("gamma needs n >= 2".into()));
    }
    let l = LieAlgebra::full_matrix(n)?;
    let delta = l.identity_element().expect("M_n contains delta");
    let mut m = ExactMatrix::zeros(l.dim(), l.dim());
    for i in 1..=n {
        let col = l.unit_index(i, i);
        for (r, x) in delta.iter().enumerate() {
            m[(r, col)] = x.clone();
        }
    }
    LinearMap::new(m)
}

/// A ½-derivation with a symbolic name, used to parametrize products.
#[derive(Clone, Debug)]
pub struct NamedMap {
    pub symbol: String,
    pub map: LinearMap,
}

/// `{id, α, β_1..β_n}` named `x`, `y`, `z^1..z^n`.
pub fn tn_named_basis(n: usize) -> Result<Vec<NamedMap>> {
    let l = LieAlgebra::upper_triangular(n)?;
    let mut out = vec![
        NamedMap { symbol: "x".into(), map: LinearMap::identity(l.dim()) },
        NamedMap { symbol: "y".into(), map: alpha_map(n)? },
    ];
    for i in 1..=n {
        out.push(NamedMap { symbol: format!("z^{i}"), map: beta_map(n, i)? });
    }
    Ok(out)
}

/// `{id, γ}` named `x`, `y`.
pub fn mn_named_basis(n: usize) -> Result<Vec<NamedMap>> {
    let l = LieAlgebra::full_matrix(n)?;
    Ok(vec![
        NamedMap { symbol: "x".into(), map: LinearMap::identity(l.dim()) },
        NamedMap { symbol: "y".into(), map: gamma_map(n)? },
    ])
}

/// One violated entry identity.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LemmaViolation {
    pub map_index: usize,
    pub identity: &'static str,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub maps_checked: usize,
    pub violations: Vec<LemmaViolation>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the entry identities satisfied by every ½-derivation of `T_n` on
/// each basis map of the computed space.
pub fn verify_entry_lemmas(n: usize) -> Result<LemmaReport> {
    if n < 2 {
        return Err(Error::InvalidDimension("entry identities need n >= 2".into()));
    }
    let l = LieAlgebra::upper_triangular(n)?;
    let space = DerivationSpace::compute(&l, &DerivationWeight::half());
    let mut violations = Vec::new();
    for (idx, psi) in space.basis().iter().enumerate() {
        violations.extend(check_entry_lemmas(&l, psi, idx)?);
    }
    Ok(LemmaReport { n, maps_checked: space.dim(), violations })
}

/// Entry identities for a single map on `T_n`; `map_index` tags the output.
pub fn check_entry_lemmas(l: &LieAlgebra, psi: &LinearMap, map_index: usize) -> Result<Vec<LemmaViolation>> {
    let n = tn_size(l)?;
    let mut out = Vec::new();
    let mut fail = |identity: &'static str, indices: Vec<usize>| {
        out.push(LemmaViolation { map_index, identity, indices });
    };
    // images as n x n matrices, indexed 1-based through `img(i, j)`
    let mut images = std::collections::HashMap::new();
    for i in 1..=n {
        for j in i..=n {
            images.insert((i, j), l.to_matrix(&psi.image(l.unit_index(i, j)))?);
        }
    }
    let img = |i: usize, j: usize| &images[&(i, j)];
    let at = |m: &ExactMatrix, i: usize, j: usize| m[(i - 1, j - 1)].clone();
    let unit = |i: usize, j: usize| {
        let mut m = ExactMatrix::zeros(n, n);
        m[(i - 1, j - 1)] = Rational::one();
        m
    };

    for i in 1..=n {
        for j in (i + 1)..=n {
            let eij = unit(i, j);
            let eii = unit(i, i);
            // φ(e_ij) e_ii = 0
            if !img(i, j).mul(&eii)?.is_zero() {
                fail("phi(e_ij)e_ii=0", vec![i, j]);
            }
            // e_ij φ(e_ii) = φ(e_ii)(j,j) e_ij
            if eij.mul(img(i, i))? != eij.scale(&at(img(i, i), j, j)) {
                fail("e_ij.phi(e_ii)=phi(e_ii)(j,j)e_ij", vec![i, j]);
            }
            // φ(e_ii)(i,j) = -φ(e_jj)(i,j)
            if at(img(i, i), i, j) != -at(img(j, j), i, j) {
                fail("phi(e_ii)(i,j)=-phi(e_jj)(i,j)", vec![i, j]);
            }
            // φ(e_ii) e_ij = φ(e_ii)(i,i) e_ij
            if img(i, i).mul(&eij)? != eij.scale(&at(img(i, i), i, i)) {
                fail("phi(e_ii)e_ij=phi(e_ii)(i,i)e_ij", vec![i, j]);
            }
            // φ(e_ij) = (φ(e_ii)(i,i) - φ(e_ii)(j,j)) e_ij = (φ(e_jj)(j,j) - φ(e_jj)(i,i)) e_ij
            let first = eij.scale(&(at(img(i, i), i, i) - at(img(i, i), j, j)));
            let second = eij.scale(&(at(img(j, j), j, j) - at(img(j, j), i, i)));
            if *img(i, j) != first || *img(i, j) != second {
                fail("phi(e_ij) in <e_ij>", vec![i, j]);
            }
            // φ(e_ij)(i,j) = φ(e_1n)(1,n)
            if at(img(i, j), i, j) != at(img(1, n), 1, n) {
                fail("phi(e_ij)(i,j)=phi(e_1n)(1,n)", vec![i, j]);
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            for k in j..=n {
                // φ(e_ii)(j,j) = φ(e_ii)(k,k) when i ∉ {j,k}
                if i != j && i != k && at(img(i, i), j, j) != at(img(i, i), k, k) {
                    fail("phi(e_ii)(j,j)=phi(e_ii)(k,k)", vec![i, j, k]);
                }
                // φ(e_ii)(j,k) = 0 for j < k unless i ∈ {1,n} and (j,k) = (1,n)
                let allowed = (i == 1 || i == n) && (j, k) == (1, n);
                if j < k && !allowed && !at(img(i, i), j, k).is_zero() {
                    fail("phi(e_ii)(j,k)=0", vec![i, j, k]);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::span_equal;

    fn half() -> DerivationWeight {
        DerivationWeight::half()
    }

    #[test]
    fn identity_and_alpha_are_half_derivations() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        assert!(is_delta_derivation(&t3, &LinearMap::identity(6), &half()).unwrap());
        assert!(is_delta_derivation(&t3, &alpha_map(3).unwrap(), &half()).unwrap());
    }

    #[test]
    fn projection_onto_e11_is_not() {
        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        let mut m = ExactMatrix::zeros(3, 3);
        m[(0, 0)] = Rational::one();
        let phi = LinearMap::new(m).unwrap();
        assert!(!is_delta_derivation(&t2, &phi, &half()).unwrap());
    }

    #[test]
    fn small_space_dimensions() {
        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        assert_eq!(delta_derivation_space(&t2, &half()).len(), 4);
        let m2 = LieAlgebra::full_matrix(2).unwrap();
        assert_eq!(delta_derivation_space(&m2, &half()).len(), 2);
        let sl2 = LieAlgebra::special_linear(2).unwrap();
        assert_eq!(delta_derivation_space(&sl2, &half()).len(), 1);
    }

    #[test]
    fn alpha_images() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let a = alpha_map(3).unwrap();
        assert_eq!(a.image(t3.unit_index(1, 1)), t3.basis_vector(t3.unit_index(1, 3)));
        assert!(rational::is_zero_vec(&a.image(t3.unit_index(2, 2))));
        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        let a = alpha_map(2).unwrap();
        let neg: Vec<Rational> = t2.basis_vector(t2.unit_index(1, 2)).iter().map(|x| -x).collect();
        assert_eq!(a.image(t2.unit_index(2, 2)), neg);
        assert!(matches!(alpha_map(1), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn beta_and_gamma_images() {
        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        let b1 = beta_map(2, 1).unwrap();
        assert_eq!(b1.image(0), t2.identity_element().unwrap());
        assert!(rational::is_zero_vec(&b1.image(1)));
        assert!(matches!(beta_map(2, 3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(beta_map(2, 0), Err(Error::IndexOutOfRange { .. })));
        for n in 2..=4 {
            let tn = LieAlgebra::upper_triangular(n).unwrap();
            for i in 1..=n {
                assert!(is_delta_derivation(&tn, &beta_map(n, i).unwrap(), &half()).unwrap());
            }
        }

        let m2 = LieAlgebra::full_matrix(2).unwrap();
        let g = gamma_map(2).unwrap();
        assert_eq!(g.image(m2.unit_index(1, 1)), m2.identity_element().unwrap());
        assert!(rational::is_zero_vec(&g.image(m2.unit_index(1, 2))));
        let m3 = LieAlgebra::full_matrix(3).unwrap();
        assert!(is_delta_derivation(&m3, &gamma_map(3).unwrap(), &half()).unwrap());
    }

    #[test]
    fn t3_space_matches_named_basis() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let space = DerivationSpace::compute(&t3, &half());
        let named: Vec<Vec<Rational>> = tn_named_basis(3).unwrap().iter().map(|m| m.map.to_vector()).collect();
        assert!(span_equal(&space.flattened_basis(), &named).unwrap());
    }

    #[test]
    fn entry_lemmas_small() {
        let r = verify_entry_lemmas(3).unwrap();
        assert_eq!(r.maps_checked, 5);
        assert!(r.passed(), "{:?}", r.violations);
        let r = verify_entry_lemmas(2).unwrap();
        assert_eq!(r.maps_checked, 4);
        assert!(r.passed());
        let t4 = LieAlgebra::upper_triangular(4).unwrap();
        assert!(check_entry_lemmas(&t4, &LinearMap::identity(10), 0).unwrap().is_empty());
    }

    #[test]
    fn entry_lemmas_catch_a_non_derivation() {
        // e(1,2) ↦ e(1,3) breaks φ(e_ij) ∈ <e_ij>
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let mut m = ExactMatrix::identity(6);
        m[(t3.unit_index(1, 3), t3.unit_index(1, 2))] = Rational::one();
        let v = check_entry_lemmas(&t3, &LinearMap::new(m).unwrap(), 0).unwrap();
        assert!(v.iter().any(|x| x.identity == "phi(e_ij) in <e_ij>"));
    }

    #[test]
    fn vector_round_trip() {
        let a = alpha_map(3).unwrap();
        assert_eq!(LinearMap::from_vector(6, &a.to_vector()).unwrap(), a);
    }
}
