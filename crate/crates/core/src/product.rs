//! Commutative bilinear products on a Lie algebra and the transposed Poisson
//! axioms that tie them to the bracket.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::half_deriv::{DerivationSpace, DerivationWeight, LinearMap};
use crate::lie::{AlgebraKind, LieAlgebra, Subspace};
use crate::linalg::{Echelon, ExactMatrix};
use crate::rational::{self, Rational};

/// Basis triple `(a, b, c)` where a check first fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Triple(pub usize, pub usize, pub usize);

/// `e_i · e_j = sum_k d[i][j][k] e_k`, stored with `d[i][j] = d[j][i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BilinearProduct {
    dim: usize,
    d: Vec<Rational>,
}

impl BilinearProduct {
    pub fn zero(dim: usize) -> Self {
        Self { dim, d: vec![Rational::zero(); dim * dim * dim] }
    }

    /// Accepts a full `dim^3` tensor; rejects it unless symmetric in `(i, j)`.
    pub fn from_tensor(dim: usize, d: Vec<Rational>) -> Result<Self> {
        check_commutative(dim, &d)?;
        Ok(Self { dim, d })
    }

    /// Sets `e_i · e_j = e_j · e_i = value`.
    pub fn set(&mut self, i: usize, j: usize, value: &[Rational]) -> Result<()> {
        if value.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: value.len() });
        }
        for (k, v) in value.iter().enumerate() {
            let a = self.idx(i, j, k);
            let b = self.idx(j, i, k);
            self.d[a] = v.clone();
            self.d[b] = v.clone();
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tensor(&self) -> &[Rational] {
        &self.d
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.d[self.idx(i, j, k)]
    }

    /// `e_i · e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &[Rational] {
        let s = (i * self.dim + j) * self.dim;
        &self.d[s..s + self.dim]
    }

    pub fn mul(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let mut out = vec![Rational::zero(); self.dim];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = xi * yj;
                for (o, c) in out.iter_mut().zip(self.basis_product(i, j)) {
                    if !c.is_zero() {
                        *o += &s * c;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(Zero::is_zero)
    }

    /// Entry-wise sum. Commutative and transposed-Leibniz compatible whenever
    /// both summands are, but associativity is not guaranteed.
    pub fn plain_sum(&self, other: &Self) -> Result<Self> {
        self.check_len(other.dim)?;
        Ok(Self { dim: self.dim, d: self.d.iter().zip(&other.d).map(|(a, b)| a + b).collect() })
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { dim: self.dim, d: self.d.iter().map(|a| a * s).collect() }
    }

    /// Subspace spanned by all products `e_i · e_j`.
    pub fn image(&self) -> Subspace {
        let mut vectors = Vec::new();
        for i in 0..self.dim {
            for j in i..self.dim {
                vectors.push(self.basis_product(i, j).to_vec());
            }
        }
        Subspace::span(self.dim, &vectors).expect("product vectors have length dim")
    }

    /// `{x : x · y = 0 for all y}`.
    pub fn annihilator(&self) -> Subspace {
        let n = self.dim;
        let mut e = Echelon::new(n);
        for j in 0..n {
            for k in 0..n {
                let row: Vec<Rational> = (0..n).map(|i| self.entry(i, j, k).clone()).collect();
                e.insert_dense(&row).expect("row length is dim");
            }
        }
        Subspace::from_basis(n, e.nullspace_basis()).expect("kernel basis is independent")
    }

    /// Nonzero coordinates of each basis product, for sparse contractions.
    fn sparse_table(&self) -> Vec<Vec<(usize, Rational)>> {
        (0..self.dim * self.dim)
            .map(|ij| {
                self.d[ij * self.dim..(ij + 1) * self.dim]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(k, v)| (k, v.clone()))
                    .collect()
            })
            .collect()
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: len });
        }
        Ok(())
    }
}

/// Symmetry check for a raw `dim^3` tensor, e.g. one read from a file.
pub fn check_commutative(dim: usize, d: &[Rational]) -> Result<()> {
    if d.len() != dim * dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim * dim, found: d.len() });
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            for k in 0..dim {
                if d[(i * dim + j) * dim + k] != d[(j * dim + i) * dim + k] {
                    return Err(Error::NotCommutative(i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// First basis triple with `(e_i·e_j)·e_k != e_i·(e_j·e_k)`.
pub fn check_associative(p: &BilinearProduct) -> std::result::Result<(), Triple> {
    let n = p.dim;
    let table = p.sparse_table();
    let one = Rational::one();
    let minus = -Rational::one();
    let mut acc = vec![Rational::zero(); n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if table[i * n + j].is_empty() && table[j * n + k].is_empty() {
                    continue;
                }
                accumulate(&mut acc, &one, &table[i * n + j], &table, |l| l * n + k);
                accumulate(&mut acc, &minus, &table[j * n + k], &table, |l| i * n + l);
                let bad = acc.iter().any(|v| !v.is_zero());
                acc.iter_mut().for_each(Zero::set_zero);
                if bad {
                    return Err(Triple(i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// Sparse `[e_i, e_j]` for all pairs.
fn bracket_table(l: &LieAlgebra) -> Vec<Vec<(usize, Rational)>> {
    let n = l.dim();
    (0..n * n)
        .map(|ij| {
            l.bracket_basis(ij / n, ij % n)
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k, v.clone()))
                .collect()
        })
        .collect()
}

/// `acc += s * sum_{(k, c) in terms} c * rows[row_of(k)]`.
fn accumulate(
    acc: &mut [Rational],
    s: &Rational,
    terms: &[(usize, Rational)],
    table: &[Vec<(usize, Rational)>],
    row_of: impl Fn(usize) -> usize,
) {
    for (k, c) in terms {
        let f = s * c;
        for (m, d) in &table[row_of(*k)] {
            acc[*m] += &f * d;
        }
    }
}

/// First basis triple `(z, x, y)`, `x < y`, with
/// `2 z·[x,y] != [z·x, y] + [x, z·y]`.
pub fn check_transposed_leibniz(l: &LieAlgebra, p: &BilinearProduct) -> Result<std::result::Result<(), Triple>> {
    l.check_len(p.dim)?;
    let n = p.dim;
    let prod = p.sparse_table();
    let br = bracket_table(l);
    let two = rational::int(2);
    let minus = -Rational::one();
    let mut acc = vec![Rational::zero(); n];
    for z in 0..n {
        for x in 0..n {
            for y in (x + 1)..n {
                accumulate(&mut acc, &two, &br[x * n + y], &prod, |k| z * n + k);
                accumulate(&mut acc, &minus, &prod[z * n + x], &br, |k| k * n + y);
                accumulate(&mut acc, &minus, &prod[z * n + y], &br, |k| x * n + k);
                let bad = acc.iter().any(|v| !v.is_zero());
                acc.iter_mut().for_each(Zero::set_zero);
                if bad {
                    return Ok(Err(Triple(z, x, y)));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// First basis triple `(x, y, z)`, `x <= y`, with
/// `[x·y, z] != x·[y,z] + [x,z]·y`.
pub fn check_poisson_leibniz(l: &LieAlgebra, p: &BilinearProduct) -> Result<std::result::Result<(), Triple>> {
    l.check_len(p.dim)?;
    let n = p.dim;
    let prod = p.sparse_table();
    let br = bracket_table(l);
    let one = Rational::one();
    let minus = -Rational::one();
    let mut acc = vec![Rational::zero(); n];
    for x in 0..n {
        for y in x..n {
            for z in 0..n {
                accumulate(&mut acc, &one, &prod[x * n + y], &br, |k| k * n + z);
                accumulate(&mut acc, &minus, &br[y * n + z], &prod, |k| x * n + k);
                accumulate(&mut acc, &minus, &br[x * n + z], &prod, |k| k * n + y);
                let bad = acc.iter().any(|v| !v.is_zero());
                acc.iter_mut().for_each(Zero::set_zero);
                if bad {
                    return Ok(Err(Triple(x, y, z)));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Left multiplication `x ↦ z · x`; column `j` is `z · e_j`.
pub fn multiplication_operator(p: &BilinearProduct, z: &[Rational]) -> Result<LinearMap> {
    p.check_len(z.len())?;
    let cols: Vec<Vec<Rational>> = (0..p.dim)
        .map(|j| {
            let mut e = vec![Rational::zero(); p.dim];
            e[j] = Rational::one();
            p.mul(z, &e)
        })
        .collect::<Result<_>>()?;
    LinearMap::from_columns(&cols)
}

/// Full axiom check of a product against a bracket.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub commutative: bool,
    pub associative: bool,
    pub associativity_failure: Option<Triple>,
    pub transposed_leibniz: bool,
    pub transposed_leibniz_failure: Option<Triple>,
    pub poisson_type: bool,
    pub poisson_leibniz: bool,
    pub poisson_leibniz_failure: Option<Triple>,
    pub trivial: bool,
    pub is_tp: bool,
}

/// Precomputed data for checking many products on one Lie algebra.
#[derive(Clone, Debug)]
pub struct TpChecker {
    algebra: LieAlgebra,
    derivations: DerivationSpace,
    center: Echelon,
    derived: Subspace,
}

impl TpChecker {
    pub fn new(algebra: &LieAlgebra) -> Self {
        let derivations = DerivationSpace::compute(algebra, &DerivationWeight::half());
        Self {
            algebra: algebra.clone(),
            derivations,
            center: algebra.center().echelon(),
            derived: algebra.derived_subalgebra(),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn derivations(&self) -> &DerivationSpace {
        &self.derivations
    }

    pub fn derived(&self) -> &Subspace {
        &self.derived
    }

    /// Transposed Leibniz via the derivation space: every left multiplication
    /// by a basis vector must be a ½-derivation.
    pub fn leibniz_via_derivations(&self, p: &BilinearProduct) -> Result<bool> {
        self.algebra.check_len(p.dim)?;
        for i in 0..p.dim {
            let op = multiplication_operator(p, &self.algebra.basis_vector(i))?;
            if !self.derivations.contains(&op)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Both Leibniz routes; disagreement is an internal error.
    pub fn transposed_leibniz(&self, p: &BilinearProduct) -> Result<std::result::Result<(), Triple>> {
        let direct = check_transposed_leibniz(&self.algebra, p)?;
        let via = self.leibniz_via_derivations(p)?;
        if direct.is_ok() != via {
            return Err(Error::Inconsistency(format!(
                "transposed Leibniz check disagrees with derivation membership (direct: {direct:?}, membership: {via})"
            )));
        }
        Ok(direct)
    }

    /// Products land in `Z(L)` and `[L,L]` is annihilated.
    pub fn is_poisson_type(&self, p: &BilinearProduct) -> Result<bool> {
        self.algebra.check_len(p.dim)?;
        for i in 0..p.dim {
            for j in i..p.dim {
                if !self.center.contains(p.basis_product(i, j))? {
                    return Ok(false);
                }
            }
        }
        for x in self.derived.basis() {
            for j in 0..p.dim {
                if !rational::is_zero_vec(&p.mul(x, &self.algebra.basis_vector(j))?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn report(&self, p: &BilinearProduct) -> Result<StructureReport> {
        let commutative = check_commutative(p.dim, &p.d).is_ok();
        let assoc = check_associative(p);
        let leibniz = self.transposed_leibniz(p)?;
        let poisson_type = self.is_poisson_type(p)?;
        let poisson = check_poisson_leibniz(&self.algebra, p)?;
        let is_tp = commutative && assoc.is_ok() && leibniz.is_ok();
        Ok(StructureReport {
            commutative,
            associative: assoc.is_ok(),
            associativity_failure: assoc.err(),
            transposed_leibniz: leibniz.is_ok(),
            transposed_leibniz_failure: leibniz.err(),
            poisson_type,
            poisson_leibniz: poisson.is_ok(),
            poisson_leibniz_failure: poisson.err(),
            trivial: p.is_zero(),
            is_tp,
        })
    }

    /// Whether `p` is a transposed Poisson structure (cheaper than a report).
    pub fn is_tp(&self, p: &BilinearProduct) -> Result<bool> {
        Ok(check_commutative(p.dim, &p.d).is_ok()
            && check_associative(p).is_ok()
            && self.transposed_leibniz(p)?.is_ok())
    }
}

pub fn is_tp_structure(l: &LieAlgebra, p: &BilinearProduct) -> Result<StructureReport> {
    TpChecker::new(l).report(p)
}

pub fn is_poisson_type(l: &LieAlgebra, p: &BilinearProduct) -> Result<bool> {
    TpChecker::new(l).is_poisson_type(p)
}

/// A product on a complement `V` of `[L,L]`: `star[a][b]` is `v_a * v_b`,
/// given in ambient coordinates.
#[derive(Clone, Debug)]
pub struct ComplementProduct {
    pub complement: Subspace,
    pub star: Vec<Vec<Vec<Rational>>>,
}

impl ComplementProduct {
    pub fn zero(complement: Subspace) -> Self {
        let m = complement.dim();
        let n = complement.ambient_dim();
        Self { complement, star: vec![vec![vec![Rational::zero(); n]; m]; m] }
    }
}

/// `(a1 + a2)·(b1 + b2) = a1 * b1` for `a1, b1 ∈ V` and `a2, b2 ∈ [L,L]`.
pub fn extension_by_zero(l: &LieAlgebra, star: &ComplementProduct) -> Result<BilinearProduct> {
    let n = l.dim();
    let v = &star.complement;
    l.check_len(v.ambient_dim())?;
    let derived = l.derived_subalgebra();
    let m = v.dim();
    if m + derived.dim() != n {
        return Err(Error::NotComplement);
    }
    // columns: V basis then [L,L] basis; invert to get coordinates
    let cols: Vec<Vec<Rational>> = v.basis().iter().chain(derived.basis()).cloned().collect();
    let change = ExactMatrix::from_columns(n, &cols)?.inverse().map_err(|_| Error::NotComplement)?;

    if star.star.len() != m || star.star.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: star.star.len() });
    }
    let center = l.center().echelon();
    for a in 0..m {
        for b in 0..m {
            let val = &star.star[a][b];
            l.check_len(val.len())?;
            if *val != star.star[b][a] {
                return Err(Error::NotCommutative(a, b, 0));
            }
            if !center.contains(val)? {
                return Err(Error::OutsideCenter);
            }
        }
    }
    let mut p = BilinearProduct::zero(n);
    for i in 0..n {
        for j in i..n {
            let mut out = vec![Rational::zero(); n];
            for a in 0..m {
                let pa = &change[(a, i)];
                if pa.is_zero() {
                    continue;
                }
                for b in 0..m {
                    let pb = &change[(b, j)];
                    if pb.is_zero() {
                        continue;
                    }
                    let s = pa * pb;
                    for (o, x) in out.iter_mut().zip(&star.star[a][b]) {
                        *o += &s * x;
                    }
                }
            }
            p.set(i, j, &out)?;
        }
    }
    if let Err(Triple(i, j, k)) = check_associative(&p) {
        return Err(Error::NotAssociative(i, j, k));
    }
    Ok(p)
}

/// The standard complement of `[L,L]`: unit vectors on the non-pivot columns
/// of its rref basis.
pub fn standard_complement(l: &LieAlgebra) -> Subspace {
    let derived = l.derived_subalgebra().echelon();
    let pivots = derived.pivot_cols();
    let basis = (0..l.dim()).filter(|c| !pivots.contains(c)).map(|c| l.basis_vector(c)).collect();
    Subspace::from_basis(l.dim(), basis).expect("unit vectors are independent")
}

/// Recovers `(V, *)` for a Poisson-type product, so that
/// `extension_by_zero(l, result) == p`.
pub fn restrict_to_complement(l: &LieAlgebra, p: &BilinearProduct) -> Result<ComplementProduct> {
    if !is_poisson_type(l, p)? {
        return Err(Error::InvalidParameter("product is not of Poisson type".into()));
    }
    let complement = standard_complement(l);
    let star = complement
        .basis()
        .iter()
        .map(|x| complement.basis().iter().map(|y| p.mul(x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok(ComplementProduct { complement, star })
}

/// `L·₁L ⊆ Ann(·₂)` and `L·₂L ⊆ Ann(·₁)`, checked on spanning sets.
pub fn are_orthogonal(p1: &BilinearProduct, p2: &BilinearProduct) -> Result<bool> {
    p1.check_len(p2.dim)?;
    let n = p1.dim;
    let kills = |a: &BilinearProduct, b: &BilinearProduct| -> Result<bool> {
        for i in 0..n {
            for j in i..n {
                let v = a.basis_product(i, j);
                if rational::is_zero_vec(v) {
                    continue;
                }
                for k in 0..n {
                    let mut e = vec![Rational::zero(); n];
                    e[k] = Rational::one();
                    if !rational::is_zero_vec(&b.mul(v, &e)?) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    };
    Ok(kills(p1, p2)? && kills(p2, p1)?)
}

pub fn orthogonal_sum(p1: &BilinearProduct, p2: &BilinearProduct) -> Result<BilinearProduct> {
    if !are_orthogonal(p1, p2)? {
        return Err(Error::NotOrthogonal);
    }
    p1.plain_sum(p2)
}

/// Named structures on `T_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum T2Structure {
    /// The zero product.
    T09_00,
    /// `e11·e11 = δ`.
    T17_0,
    /// `e11·e11 = -e11·e22 = e22·e22 = δ`.
    T10_0,
    /// `e11·e11 = -e11·e22 = e22·e22 = e12`.
    T16,
    /// `e11·e11 = e12 + δ`, `-e11·e22 = e22·e22 = e12`.
    T18,
    /// `e11·e11 = -e11·e22 = e22·e22 = e12 + δ`.
    T11_0,
    /// The `c`-family alone.
    T17C,
    /// The `c`-family plus `e22·e22 = -cδ`.
    T09_0C,
    /// The `c`-family with `-e11·e22 = e22·e22 = c e11`.
    T19C,
}

impl T2Structure {
    pub const ALL: [T2Structure; 9] = [
        T2Structure::T09_00,
        T2Structure::T17_0,
        T2Structure::T10_0,
        T2Structure::T16,
        T2Structure::T18,
        T2Structure::T11_0,
        T2Structure::T17C,
        T2Structure::T09_0C,
        T2Structure::T19C,
    ];

    pub fn name(self) -> &'static str {
        match self {
            T2Structure::T09_00 => "T09_00",
            T2Structure::T17_0 => "T17_0",
            T2Structure::T10_0 => "T10_0",
            T2Structure::T16 => "T16",
            T2Structure::T18 => "T18",
            T2Structure::T11_0 => "T11_0",
            T2Structure::T17C => "T17_c",
            T2Structure::T09_0C => "T09_0c",
            T2Structure::T19C => "T19_c",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s))
    }

    /// Top-level group: 1 (Poisson type), 2 (fixed structure plus Poisson
    /// type) or 3 (`c`-family plus Poisson type).
    pub fn group(self) -> u8 {
        match self {
            T2Structure::T09_00 | T2Structure::T17_0 | T2Structure::T10_0 => 1,
            T2Structure::T16 | T2Structure::T18 | T2Structure::T11_0 => 2,
            T2Structure::T17C | T2Structure::T09_0C | T2Structure::T19C => 3,
        }
    }

    pub fn needs_c(self) -> bool {
        self.group() == 3
    }
}

/// A named structure from the classification results.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogEntry {
    /// `e11·e11 = -e11·enn = enn·enn = e1n` on `T_n`.
    TnForm2 {
        n: usize,
    },
    /// `e_ii·e_jj = a_ij δ` plus `b e1n` on the `(1,1)`, `(n,n)` pairs and
    /// `-b e1n` on `(1,n)`; `a` symmetric `n x n`.
    TnPattern {
        n: usize,
        a: ExactMatrix,
        b: Rational,
    },
    T2 {
        structure: T2Structure,
        c: Option<Rational>,
    },
    /// `e_ii·e_jj = c δ` on `M_n`.
    MnTrace {
        n: usize,
        c: Rational,
    },
}

impl CatalogEntry {
    /// Parses `tn_form2`, `t2:<name>` or `mn_trace`; `n` and `c` come from
    /// the caller (`c` defaults to 1).
    pub fn parse(name: &str, n: Option<usize>, c: Option<Rational>) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("t2:") {
            let structure = T2Structure::from_name(rest).ok_or_else(|| Error::UnknownCatalog(name.into()))?;
            let c = if structure.needs_c() { Some(c.unwrap_or_else(rational::one)) } else { None };
            return Ok(CatalogEntry::T2 { structure, c });
        }
        match lower.as_str() {
            "tn_form2" => {
                Ok(CatalogEntry::TnForm2 { n: n.ok_or_else(|| Error::InvalidParameter("tn_form2 needs n".into()))? })
            }
            "mn_trace" => Ok(CatalogEntry::MnTrace {
                n: n.ok_or_else(|| Error::InvalidParameter("mn_trace needs n".into()))?,
                c: c.unwrap_or_else(rational::one),
            }),
            _ => Err(Error::UnknownCatalog(name.into())),
        }
    }

    /// The Lie algebra the entry lives on.
    pub fn algebra(&self) -> Result<LieAlgebra> {
        match self {
            CatalogEntry::TnForm2 { n } | CatalogEntry::TnPattern { n, .. } => LieAlgebra::upper_triangular(*n),
            CatalogEntry::T2 { .. } => LieAlgebra::upper_triangular(2),
            CatalogEntry::MnTrace { n, .. } => LieAlgebra::full_matrix(*n),
        }
    }

    pub fn build(&self) -> Result<BilinearProduct> {
        match self {
            CatalogEntry::TnForm2 { n } => tn_pattern(*n, &ExactMatrix::zeros(*n, *n), &rational::one()),
            CatalogEntry::TnPattern { n, a, b } => tn_pattern(*n, a, b),
            CatalogEntry::T2 { structure, c } => t2_structure(*structure, c.as_ref()),
            CatalogEntry::MnTrace { n, c } => mn_trace(*n, c),
        }
    }
}

pub fn catalog(entry: &CatalogEntry) -> Result<BilinearProduct> {
    entry.build()
}

fn tn_pattern(n: usize, a: &ExactMatrix, b: &Rational) -> Result<BilinearProduct> {
    if n < 2 {
        return Err(Error::InvalidParameter("T_n structures need n >= 2".into()));
    }
    if a.rows() != n || a.cols() != n || *a != a.transpose() {
        return Err(Error::InvalidParameter("a must be a symmetric n x n matrix".into()));
    }
    let l = LieAlgebra::upper_triangular(n)?;
    let delta = l.identity_element().expect("T_n has delta");
    let top = l.unit_index(1, n);
    let mut p = BilinearProduct::zero(l.dim());
    for i in 1..=n {
        for j in i..=n {
            let mut v: Vec<Rational> = delta.iter().map(|x| x * &a[(i - 1, j - 1)]).collect();
            match (i, j) {
                (1, 1) => v[top] += b,
                (1, _) if j == n => v[top] -= b,
                _ if i == n && j == n => v[top] += b,
                _ => {}
            }
            p.set(l.unit_index(i, i), l.unit_index(j, j), &v)?;
        }
    }
    Ok(p)
}

fn t2_structure(s: T2Structure, c: Option<&Rational>) -> Result<BilinearProduct> {
    let c = match (s.needs_c(), c) {
        (true, Some(c)) if c.is_zero() => return Err(Error::InvalidParameter(format!("{} requires c != 0", s.name()))),
        (true, Some(c)) => c.clone(),
        (true, None) => return Err(Error::InvalidParameter(format!("{} requires c", s.name()))),
        (false, _) => rational::zero(),
    };
    // basis order e11, e12, e22
    let v = |a: i64, b: i64, d: i64| rational::vec_from_i64(&[a, b, d]);
    let scaled = |x: Vec<Rational>| -> Vec<Rational> { x.into_iter().map(|t| t * &c).collect() };
    let delta = v(1, 0, 1);
    let e12 = v(0, 1, 0);
    let neg = |x: &Vec<Rational>| -> Vec<Rational> { x.iter().map(|t| -t).collect() };
    let mut p = BilinearProduct::zero(3);
    let c_family = |p: &mut BilinearProduct| -> Result<()> {
        p.set(0, 0, &scaled(v(1, 0, 0)))?;
        p.set(0, 1, &scaled(v(0, 1, 0)))?;
        p.set(1, 2, &scaled(v(0, -1, 0)))?;
        Ok(())
    };
    match s {
        T2Structure::T09_00 => {}
        T2Structure::T17_0 => p.set(0, 0, &delta)?,
        T2Structure::T10_0 => {
            p.set(0, 0, &delta)?;
            p.set(0, 2, &neg(&delta))?;
            p.set(2, 2, &delta)?;
        }
        T2Structure::T16 => {
            p.set(0, 0, &e12)?;
            p.set(0, 2, &neg(&e12))?;
            p.set(2, 2, &e12)?;
        }
        T2Structure::T18 => {
            p.set(0, 0, &v(1, 1, 1))?;
            p.set(0, 2, &neg(&e12))?;
            p.set(2, 2, &e12)?;
        }
        T2Structure::T11_0 => {
            p.set(0, 0, &v(1, 1, 1))?;
            p.set(0, 2, &v(-1, -1, -1))?;
            p.set(2, 2, &v(1, 1, 1))?;
        }
        T2Structure::T17C => {
            c_family(&mut p)?;
            p.set(0, 2, &scaled(v(0, 0, 1)))?;
            p.set(2, 2, &scaled(v(0, 0, -1)))?;
        }
        T2Structure::T09_0C => {
            c_family(&mut p)?;
            p.set(0, 2, &scaled(v(0, 0, 1)))?;
            p.set(2, 2, &scaled(v(-1, 0, -2)))?;
        }
        T2Structure::T19C => {
            c_family(&mut p)?;
            p.set(0, 2, &scaled(v(-1, 0, 0)))?;
            p.set(2, 2, &scaled(v(1, 0, 0)))?;
        }
    }
    Ok(p)
}

fn mn_trace(n: usize, c: &Rational) -> Result<BilinearProduct> {
    if n < 2 {
        return Err(Error::InvalidParameter("mn_trace needs n >= 2".into()));
    }
    let l = LieAlgebra::full_matrix(n)?;
    let delta: Vec<Rational> = l.identity_element().expect("M_n has delta").iter().map(|x| x * c).collect();
    let mut p = BilinearProduct::zero(l.dim());
    for i in 1..=n {
        for j in i..=n {
            p.set(l.unit_index(i, i), l.unit_index(j, j), &delta)?;
        }
    }
    Ok(p)
}

/// `e_ii` indices of a matrix algebra, for `T_n` and `M_n`.
pub fn diagonal_indices(l: &LieAlgebra) -> Result<Vec<usize>> {
    match l.kind() {
        AlgebraKind::UpperTriangular(n) | AlgebraKind::FullMatrix(n) => {
            Ok((1..=n).map(|i| l.unit_index(i, i)).collect())
        }
        k => Err(Error::UnsupportedAlgebra(k.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn t2() -> LieAlgebra {
        LieAlgebra::upper_triangular(2).unwrap()
    }

    fn idempotent_e11() -> BilinearProduct {
        let mut p = BilinearProduct::zero(3);
        p.set(0, 0, &rational::vec_from_i64(&[1, 0, 0])).unwrap();
        p
    }

    #[test]
    fn associativity_examples() {
        assert!(check_associative(&BilinearProduct::zero(4)).is_ok());
        let mn = catalog(&CatalogEntry::MnTrace { n: 2, c: int(1) }).unwrap();
        assert!(check_associative(&mn).is_ok());
        assert!(check_associative(&idempotent_e11()).is_ok());
    }

    #[test]
    fn transposed_leibniz_examples() {
        let l = t2();
        assert!(check_transposed_leibniz(&l, &BilinearProduct::zero(3)).unwrap().is_ok());
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let form2 = catalog(&CatalogEntry::TnForm2 { n: 3 }).unwrap();
        assert!(check_transposed_leibniz(&t3, &form2).unwrap().is_ok());
        assert_eq!(check_transposed_leibniz(&l, &idempotent_e11()).unwrap(), Err(Triple(0, 0, 1)));
    }

    #[test]
    fn multiplication_operator_examples() {
        let mn = catalog(&CatalogEntry::MnTrace { n: 2, c: int(1) }).unwrap();
        let m2 = LieAlgebra::full_matrix(2).unwrap();
        assert_eq!(
            multiplication_operator(&mn, &m2.basis_vector(0)).unwrap(),
            crate::half_deriv::gamma_map(2).unwrap()
        );
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let form2 = catalog(&CatalogEntry::TnForm2 { n: 3 }).unwrap();
        assert_eq!(
            multiplication_operator(&form2, &t3.basis_vector(0)).unwrap(),
            crate::half_deriv::alpha_map(3).unwrap()
        );
        assert_eq!(multiplication_operator(&form2, &vec![Rational::zero(); 6]).unwrap(), LinearMap::zero(6));
    }

    #[test]
    fn reports_for_catalog_structures() {
        let checker = TpChecker::new(&t2());
        for s in T2Structure::ALL {
            let c = s.needs_c().then(|| int(2));
            let p = catalog(&CatalogEntry::T2 { structure: s, c }).unwrap();
            let r = checker.report(&p).unwrap();
            assert!(r.is_tp, "{} {:?}", s.name(), r);
            assert_eq!(r.poisson_type, s.group() == 1, "{}", s.name());
            assert_eq!(r.trivial, s == T2Structure::T09_00);
        }
        let bad = checker.report(&idempotent_e11()).unwrap();
        assert!(!bad.is_tp);
        assert_eq!(bad.transposed_leibniz_failure, Some(Triple(0, 0, 1)));

        let m3 = LieAlgebra::full_matrix(3).unwrap();
        let r = is_tp_structure(&m3, &catalog(&CatalogEntry::MnTrace { n: 3, c: int(1) }).unwrap()).unwrap();
        assert!(r.is_tp && r.poisson_type);
    }

    #[test]
    fn poisson_type_examples() {
        let l = t2();
        let t17 = catalog(&CatalogEntry::T2 { structure: T2Structure::T17_0, c: None }).unwrap();
        assert!(is_poisson_type(&l, &t17).unwrap());
        assert!(is_poisson_type(&l, &BilinearProduct::zero(3)).unwrap());
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        assert!(!is_poisson_type(&t3, &catalog(&CatalogEntry::TnForm2 { n: 3 }).unwrap()).unwrap());
    }

    #[test]
    fn poisson_leibniz_examples() {
        let l = t2();
        assert!(check_poisson_leibniz(&l, &BilinearProduct::zero(3)).unwrap().is_ok());
        let t16 = catalog(&CatalogEntry::T2 { structure: T2Structure::T16, c: None }).unwrap();
        assert!(check_poisson_leibniz(&l, &t16).unwrap().is_err());
        let t10 = catalog(&CatalogEntry::T2 { structure: T2Structure::T10_0, c: None }).unwrap();
        assert!(check_poisson_leibniz(&l, &t10).unwrap().is_ok());
    }

    #[test]
    fn extension_by_zero_examples() {
        let m2 = LieAlgebra::full_matrix(2).unwrap();
        let delta = m2.identity_element().unwrap();
        let v = Subspace::from_basis(4, vec![delta.clone()]).unwrap();
        let star = ComplementProduct { complement: v.clone(), star: vec![vec![delta.clone()]] };
        let p = extension_by_zero(&m2, &star).unwrap();
        // δ·δ = δ with δ = e11 + e22 gives e_ii·e_jj = δ/4
        let expected = catalog(&CatalogEntry::MnTrace { n: 2, c: frac(1, 4) }).unwrap();
        assert_eq!(p, expected);
        assert_eq!(extension_by_zero(&m2, &ComplementProduct::zero(v)).unwrap(), BilinearProduct::zero(4));

        let l = t2();
        let v = Subspace::from_basis(3, vec![l.basis_vector(0), l.basis_vector(2)]).unwrap();
        let mut star = ComplementProduct::zero(v);
        star.star[0][0] = l.identity_element().unwrap();
        let p = extension_by_zero(&l, &star).unwrap();
        assert_eq!(p, catalog(&CatalogEntry::T2 { structure: T2Structure::T17_0, c: None }).unwrap());
    }

    #[test]
    fn extension_by_zero_errors() {
        let l = t2();
        let bad_v = Subspace::from_basis(3, vec![l.basis_vector(0)]).unwrap();
        assert_eq!(extension_by_zero(&l, &ComplementProduct::zero(bad_v)).unwrap_err(), Error::NotComplement);
        let v = Subspace::from_basis(3, vec![l.basis_vector(0), l.basis_vector(2)]).unwrap();
        let mut star = ComplementProduct::zero(v.clone());
        star.star[0][0] = l.basis_vector(0);
        assert_eq!(extension_by_zero(&l, &star).unwrap_err(), Error::OutsideCenter);
        // e11*e11 = δ, e22*e22 = -δ: δ*δ projects to (e11+e22)... π(δ) = e11 + e22,
        // (e11*e11)*e22 = π(δ)*e22 = -δ while e11*(e11*e22) = 0
        let mut star = ComplementProduct::zero(v);
        star.star[0][0] = l.identity_element().unwrap();
        star.star[1][1] = l.identity_element().unwrap().iter().map(|x| -x).collect();
        assert!(matches!(extension_by_zero(&l, &star), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn orthogonality() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let form2 = catalog(&CatalogEntry::TnForm2 { n: 3 }).unwrap();
        let mut a = ExactMatrix::zeros(3, 3);
        a[(1, 1)] = int(1);
        let poisson = catalog(&CatalogEntry::TnPattern { n: 3, a, b: int(0) }).unwrap();
        assert!(are_orthogonal(&form2, &poisson).unwrap());
        let sum = orthogonal_sum(&form2, &poisson).unwrap();
        assert!(is_tp_structure(&t3, &sum).unwrap().is_tp);
        assert_eq!(orthogonal_sum(&form2, &BilinearProduct::zero(6)).unwrap(), form2);

        let fam = catalog(&CatalogEntry::T2 { structure: T2Structure::T17C, c: Some(int(1)) }).unwrap();
        let t17 = catalog(&CatalogEntry::T2 { structure: T2Structure::T17_0, c: None }).unwrap();
        assert!(!are_orthogonal(&fam, &t17).unwrap());
        assert_eq!(orthogonal_sum(&fam, &t17).unwrap_err(), Error::NotOrthogonal);
    }

    #[test]
    fn catalog_shapes() {
        let t4 = LieAlgebra::upper_triangular(4).unwrap();
        let p = catalog(&CatalogEntry::TnForm2 { n: 4 }).unwrap();
        let e14 = t4.basis_vector(t4.unit_index(1, 4));
        let neg14: Vec<Rational> = e14.iter().map(|x| -x).collect();
        let (i11, i44) = (t4.unit_index(1, 1), t4.unit_index(4, 4));
        for i in 0..10 {
            for j in 0..10 {
                let expected = match (i, j) {
                    _ if i == i11 && j == i11 => e14.clone(),
                    _ if i == i44 && j == i44 => e14.clone(),
                    _ if (i, j) == (i11, i44) || (i, j) == (i44, i11) => neg14.clone(),
                    _ => vec![Rational::zero(); 10],
                };
                assert_eq!(p.basis_product(i, j), expected.as_slice());
            }
        }

        let t18 = catalog(&CatalogEntry::parse("t2:T18", None, None).unwrap()).unwrap();
        assert_eq!(t18.basis_product(0, 0), rational::vec_from_i64(&[1, 1, 1]).as_slice());
        assert_eq!(t18.basis_product(0, 2), rational::vec_from_i64(&[0, -1, 0]).as_slice());
        assert_eq!(t18.basis_product(2, 2), rational::vec_from_i64(&[0, 1, 0]).as_slice());

        let mn = catalog(&CatalogEntry::parse("mn_trace", Some(2), None).unwrap()).unwrap();
        let m2 = LieAlgebra::full_matrix(2).unwrap();
        for i in [m2.unit_index(1, 1), m2.unit_index(2, 2)] {
            for j in [m2.unit_index(1, 1), m2.unit_index(2, 2)] {
                assert_eq!(mn.basis_product(i, j), m2.identity_element().unwrap().as_slice());
            }
        }
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(CatalogEntry::parse("nope", None, None), Err(Error::UnknownCatalog(_))));
        let zero_c = CatalogEntry::T2 { structure: T2Structure::T17C, c: Some(int(0)) };
        assert!(matches!(catalog(&zero_c), Err(Error::InvalidParameter(_))));
        let asym = CatalogEntry::TnPattern { n: 2, a: ExactMatrix::from_i64(&[&[0, 1], &[0, 0]]), b: int(0) };
        assert!(matches!(catalog(&asym), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn raw_tensor_symmetry() {
        let mut d = vec![Rational::zero(); 8];
        d[2] = int(1); // entry (0, 1, 0)
        assert_eq!(BilinearProduct::from_tensor(2, d).unwrap_err(), Error::NotCommutative(0, 1, 0));
    }
}
