//! Finite-dimensional Lie algebras given by structure constants.
//!
//! Matrix algebras use a frozen basis order that every fixture depends on:
//!
//! * `T_n`: `e(1,1), e(1,2), .., e(1,n), e(2,2), .., e(n,n)` (row-major, `i <= j`)
//! * `M_n`: all `e(i,j)` row-major
//! * `sl_n`: the off-diagonal units `e(i,j)`, `i != j`, row-major, followed by
//!   `e(1,1) - e(i,i)` for `i = 2..n`
//!
//! Labels are 1-based to match matrix notation; basis indices are 0-based.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, ExactMatrix};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    /// The matrix unit `e(i,j)`, 1-based.
    MatrixUnit(usize, usize),
    /// `e(1,1) - e(i,i)` in `sl_n`.
    DiagDifference(usize),
    Abstract(usize),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::MatrixUnit(i, j) => write!(f, "e({i},{j})"),
            BasisLabel::DiagDifference(i) => write!(f, "h({i})"),
            BasisLabel::Abstract(k) => write!(f, "x{k}"),
        }
    }
}

impl std::str::FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid basis label {s:?}"));
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("e(").and_then(|r| r.strip_suffix(')')) {
            let (i, j) = inner.split_once(',').ok_or_else(bad)?;
            let i = i.trim().parse().map_err(|_| bad())?;
            let j = j.trim().parse().map_err(|_| bad())?;
            return Ok(BasisLabel::MatrixUnit(i, j));
        }
        if let Some(inner) = s.strip_prefix("h(").and_then(|r| r.strip_suffix(')')) {
            return Ok(BasisLabel::DiagDifference(inner.trim().parse().map_err(|_| bad())?));
        }
        if let Some(k) = s.strip_prefix('x') {
            return Ok(BasisLabel::Abstract(k.parse().map_err(|_| bad())?));
        }
        Err(bad())
    }
}

/// Which family an algebra was built from; matrix families know how to move
/// between coordinates and `n x n` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    UpperTriangular(usize),
    FullMatrix(usize),
    SpecialLinear(usize),
    Abstract,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraKind::UpperTriangular(n) => write!(f, "T{n}"),
            AlgebraKind::FullMatrix(n) => write!(f, "M{n}"),
            AlgebraKind::SpecialLinear(n) => write!(f, "sl{n}"),
            AlgebraKind::Abstract => write!(f, "abstract"),
        }
    }
}

/// A Lie algebra with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<BasisLabel>,
    constants: Vec<Rational>,
    index: HashMap<BasisLabel, usize>,
    kind: AlgebraKind,
}

/// A subspace given by a linearly independent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    /// The span of `vectors`, with the canonical rref basis.
    pub fn span(ambient_dim: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        let mut e = Echelon::new(ambient_dim);
        for v in vectors {
            e.insert_dense(v)?;
        }
        Ok(Self { ambient_dim, basis: e.basis() })
    }

    /// Wraps an already independent basis.
    pub fn from_basis(ambient_dim: usize, basis: Vec<Vec<Rational>>) -> Result<Self> {
        let rank = crate::linalg::rank_of(&basis)?;
        if rank != basis.len() {
            return Err(Error::InvalidParameter("subspace basis is linearly dependent".into()));
        }
        if let Some(v) = basis.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.len() });
        }
        Ok(Self { ambient_dim, basis })
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect();
        Self { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.ambient_dim);
        for v in &self.basis {
            e.insert_dense(v).expect("basis length checked at construction");
        }
        e
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        self.echelon().contains(v)
    }

    pub fn same_as(&self, other: &Subspace) -> Result<bool> {
        crate::linalg::span_equal(&self.basis, &other.basis)
    }
}

/// The `i`-th standard basis vector of length `dim`.
pub fn unit(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

impl LieAlgebra {
    /// Validates antisymmetry of a dense `dim^3` tensor.
    pub fn from_structure_constants(
        labels: Vec<BasisLabel>,
        constants: Vec<Rational>,
        kind: AlgebraKind,
    ) -> Result<Self> {
        let dim = labels.len();
        if constants.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, found: constants.len() });
        }
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for i in 0..dim {
            for j in i..dim {
                for k in 0..dim {
                    if constants[idx(i, j, k)] != -constants[idx(j, i, k)].clone() {
                        return Err(Error::NotAntisymmetric(i, j, k));
                    }
                }
            }
        }
        let mut index = HashMap::with_capacity(dim);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(*l, i).is_some() {
                return Err(Error::Parse(format!("duplicate basis label {l}")));
            }
        }
        Ok(Self { dim, labels, constants, index, kind })
    }

    pub fn abelian(dim: usize) -> Self {
        let labels = (0..dim).map(BasisLabel::Abstract).collect();
        Self::from_structure_constants(labels, vec![Rational::zero(); dim * dim * dim], AlgebraKind::Abstract)
            .expect("zero tensor is antisymmetric")
    }

    /// `T_n(F)`: upper triangular `n x n` matrices under the commutator.
    pub fn upper_triangular(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("T_n needs n >= 1".into()));
        }
        let labels = (1..=n).flat_map(|i| (i..=n).map(move |j| BasisLabel::MatrixUnit(i, j))).collect();
        Self::from_matrix_basis(labels, AlgebraKind::UpperTriangular(n))
    }

    /// `M_n(F)`: all `n x n` matrices under the commutator.
    pub fn full_matrix(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("M_n needs n >= 1".into()));
        }
        let labels = (1..=n).flat_map(|i| (1..=n).map(move |j| BasisLabel::MatrixUnit(i, j))).collect();
        Self::from_matrix_basis(labels, AlgebraKind::FullMatrix(n))
    }

    /// `sl_n(F)`: traceless matrices.
    pub fn special_linear(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension("sl_n needs n >= 2".into()));
        }
        let mut labels: Vec<BasisLabel> =
            (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| BasisLabel::MatrixUnit(i, j))).collect();
        labels.extend((2..=n).map(BasisLabel::DiagDifference));
        Self::from_matrix_basis(labels, AlgebraKind::SpecialLinear(n))
    }

    fn from_matrix_basis(labels: Vec<BasisLabel>, kind: AlgebraKind) -> Result<Self> {
        let dim = labels.len();
        let mut shell = Self {
            dim,
            labels: labels.clone(),
            constants: Vec::new(),
            index: labels.iter().enumerate().map(|(i, l)| (*l, i)).collect(),
            kind,
        };
        let mats: Vec<ExactMatrix> = (0..dim).map(|i| shell.to_matrix(&unit(dim, i))).collect::<Result<_>>()?;
        let mut constants = vec![Rational::zero(); dim * dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let ab = mats[i].mul(&mats[j])?;
                let ba = mats[j].mul(&mats[i])?;
                let comm = ab.add(&ba.scale(&-Rational::one()))?;
                let coords = shell.from_matrix(&comm)?;
                for (k, c) in coords.into_iter().enumerate() {
                    if !c.is_zero() {
                        constants[(j * dim + i) * dim + k] = -c.clone();
                        constants[(i * dim + j) * dim + k] = c;
                    }
                }
            }
        }
        shell.constants = constants;
        Ok(shell)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        self.index.get(&label).copied()
    }

    /// Basis index of the matrix unit `e(i,j)`; panics if absent.
    pub fn unit_index(&self, i: usize, j: usize) -> usize {
        self.index_of(BasisLabel::MatrixUnit(i, j))
            .unwrap_or_else(|| panic!("e({i},{j}) is not a basis element of {}", self.kind))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        unit(self.dim, i)
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_constants(&self) -> &[Rational] {
        &self.constants
    }

    /// `[e_i, e_j]` as a coordinate slice.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        let start = (i * self.dim + j) * self.dim;
        &self.constants[start..start + self.dim]
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let mut out = vec![Rational::zero(); self.dim];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = xi * yj;
                for (o, c) in out.iter_mut().zip(self.bracket_basis(i, j)) {
                    if !c.is_zero() {
                        *o += &s * c;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad_x`: column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[Rational]) -> Result<ExactMatrix> {
        let cols: Vec<Vec<Rational>> =
            (0..self.dim).map(|j| self.bracket(x, &self.basis_vector(j))).collect::<Result<_>>()?;
        ExactMatrix::from_columns(self.dim, &cols)
    }

    /// The identity matrix `delta`, for algebras that contain it.
    pub fn identity_element(&self) -> Option<Vec<Rational>> {
        match self.kind {
            AlgebraKind::UpperTriangular(n) | AlgebraKind::FullMatrix(n) => {
                let mut v = vec![Rational::zero(); self.dim];
                for i in 1..=n {
                    v[self.unit_index(i, i)] = Rational::one();
                }
                Some(v)
            }
            _ => None,
        }
    }

    /// Matrix size `n` for matrix families.
    pub fn matrix_size(&self) -> Option<usize> {
        match self.kind {
            AlgebraKind::UpperTriangular(n) | AlgebraKind::FullMatrix(n) | AlgebraKind::SpecialLinear(n) => Some(n),
            AlgebraKind::Abstract => None,
        }
    }

    /// The `n x n` matrix with coordinates `x`.
    pub fn to_matrix(&self, x: &[Rational]) -> Result<ExactMatrix> {
        self.check_len(x.len())?;
        let n = self.matrix_size().ok_or_else(|| Error::UnsupportedAlgebra(self.kind.to_string()))?;
        let mut m = ExactMatrix::zeros(n, n);
        for (c, label) in x.iter().zip(&self.labels) {
            if c.is_zero() {
                continue;
            }
            match *label {
                BasisLabel::MatrixUnit(i, j) => m[(i - 1, j - 1)] += c,
                BasisLabel::DiagDifference(i) => {
                    m[(0, 0)] += c;
                    m[(i - 1, i - 1)] -= c;
                }
                BasisLabel::Abstract(_) => return Err(Error::UnsupportedAlgebra(self.kind.to_string())),
            }
        }
        Ok(m)
    }

    /// Coordinates of an `n x n` matrix; fails if it lies outside the algebra.
    pub fn from_matrix(&self, m: &ExactMatrix) -> Result<Vec<Rational>> {
        let n = self.matrix_size().ok_or_else(|| Error::UnsupportedAlgebra(self.kind.to_string()))?;
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.rows() });
        }
        let outside = || Error::InvalidParameter(format!("matrix does not lie in {}", self.kind));
        let mut v = vec![Rational::zero(); self.dim];
        match self.kind {
            AlgebraKind::UpperTriangular(_) | AlgebraKind::FullMatrix(_) => {
                for i in 1..=n {
                    for j in 1..=n {
                        let x = &m[(i - 1, j - 1)];
                        if x.is_zero() {
                            continue;
                        }
                        let k = self.index_of(BasisLabel::MatrixUnit(i, j)).ok_or_else(outside)?;
                        v[k] = x.clone();
                    }
                }
            }
            AlgebraKind::SpecialLinear(_) => {
                if !m.trace().is_zero() {
                    return Err(outside());
                }
                for i in 1..=n {
                    for j in 1..=n {
                        if i != j {
                            v[self.unit_index(i, j)] = m[(i - 1, j - 1)].clone();
                        }
                    }
                }
                for i in 2..=n {
                    v[self.index_of(BasisLabel::DiagDifference(i)).expect("sl_n label")] = -m[(i - 1, i - 1)].clone();
                }
            }
            AlgebraKind::Abstract => unreachable!(),
        }
        Ok(v)
    }

    /// First triple `i < j < k` violating the Jacobi identity.
    pub fn check_jacobi(&self) -> std::result::Result<(), (usize, usize, usize)> {
        let d = self.dim;
        for i in 0..d {
            for j in (i + 1)..d {
                for k in (j + 1)..d {
                    let e = |a: usize| self.basis_vector(a);
                    let t1 = self.bracket(self.bracket_basis(i, j), &e(k)).expect("dims");
                    let t2 = self.bracket(self.bracket_basis(j, k), &e(i)).expect("dims");
                    let t3 = self.bracket(self.bracket_basis(k, i), &e(j)).expect("dims");
                    if t1.iter().zip(&t2).zip(&t3).any(|((a, b), c)| !(a + b + c).is_zero()) {
                        return Err((i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Z(L)`: the kernel of `x -> ([x, e_j])_j`.
    pub fn center(&self) -> Subspace {
        let d = self.dim;
        let mut e = Echelon::new(d);
        for j in 0..d {
            for k in 0..d {
                let row: Vec<Rational> = (0..d).map(|i| self.structure_constant(i, j, k).clone()).collect();
                e.insert_dense(&row).expect("row length is dim");
            }
        }
        Subspace { ambient_dim: d, basis: e.nullspace_basis() }
    }

    /// `[L, L]`, spanned by all basis brackets.
    pub fn derived_subalgebra(&self) -> Subspace {
        let d = self.dim;
        let mut e = Echelon::new(d);
        for i in 0..d {
            for j in (i + 1)..d {
                e.insert_dense(self.bracket_basis(i, j)).expect("row length is dim");
            }
        }
        Subspace { ambient_dim: d, basis: e.basis() }
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> Result<bool> {
        self.check_len(s.ambient_dim())?;
        let e = s.echelon();
        for (a, x) in s.basis().iter().enumerate() {
            for y in &s.basis()[a + 1..] {
                if !e.contains(&self.bracket(x, y)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Elements of the subalgebra `s` commuting with all of `s`.
    pub fn center_of_subalgebra(&self, s: &Subspace) -> Result<Subspace> {
        if !self.is_subalgebra(s)? {
            return Err(Error::NotClosed);
        }
        let m = s.dim();
        // unknowns t_a with sum_a t_a [s_a, s_b] = 0 for every b
        let brackets: Vec<Vec<Vec<Rational>>> = s
            .basis()
            .iter()
            .map(|x| s.basis().iter().map(|y| self.bracket(x, y)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let mut e = Echelon::new(m);
        for b in 0..m {
            for k in 0..self.dim {
                let row: Vec<Rational> = brackets.iter().map(|ba| ba[b][k].clone()).collect();
                e.insert_dense(&row)?;
            }
        }
        let vectors: Vec<Vec<Rational>> = e
            .nullspace_basis()
            .into_iter()
            .map(|t| {
                let mut v = vec![Rational::zero(); self.dim];
                for (ta, sa) in t.iter().zip(s.basis()) {
                    if !ta.is_zero() {
                        for (o, x) in v.iter_mut().zip(sa) {
                            *o += ta * x;
                        }
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.dim, &vectors)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: len });
        }
        Ok(())
    }
}
