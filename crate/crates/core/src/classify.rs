//! Parametrized search for transposed Poisson structures: the ansatz built
//! from ½-derivations, its polynomial constraints, seeded sampling of
//! solutions, support patterns on `T_n`, normal forms and invariants.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automorphism::{self, Automorphism};
use crate::error::{Error, Result};
use crate::half_deriv::{self, DerivationSpace, DerivationWeight, LinearMap};
use crate::lie::{AlgebraKind, BasisLabel, LieAlgebra, Subspace};
use crate::linalg::{self, Echelon, ExactMatrix, SparseRow};
use crate::poly::{LinearForm, Poly};
use crate::product::{self, BilinearProduct, CatalogEntry, T2Structure, TpChecker};
use crate::rational::{self, Rational};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Parameter values tried by the sampler.
pub const SAMPLE_RANGE: std::ops::RangeInclusive<i64> = -3..=3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintOrigin {
    Commutativity,
    Associativity,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyConstraint {
    pub poly: Poly,
    pub origin: ConstraintOrigin,
}

/// Products `e_i · e_j = sum_k d[i][j][k] e_k` whose coefficients are linear
/// forms in free parameters.
///
/// Raw parameters write each multiplication operator `L_{e_i}` in a basis of
/// `Δ(L)`; commutativity is then solved exactly, leaving the free ones.
#[derive(Clone, Debug)]
pub struct ParamFamily {
    algebra: LieAlgebra,
    raw_names: Vec<String>,
    names: Vec<String>,
    free_raw: Vec<usize>,
    raw_from_free: Vec<Vec<(usize, Rational)>>,
    entries: Vec<LinearForm>,
    commutativity: Vec<PolyConstraint>,
}

impl ParamFamily {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn param_count(&self) -> usize {
        self.names.len()
    }

    /// Names of the free parameters (`a_ij`, `b`, `c` where they apply).
    pub fn param_names(&self) -> &[String] {
        &self.names
    }

    /// Names of all raw parameters (`x_ij`, `y_ij`, `z_ij^k` on `T_n`).
    pub fn raw_param_names(&self) -> &[String] {
        &self.raw_names
    }

    /// Raw name behind each free parameter.
    pub fn free_raw_names(&self) -> Vec<&str> {
        self.free_raw.iter().map(|&r| self.raw_names[r].as_str()).collect()
    }

    /// Raw parameter values for a free assignment.
    pub fn raw_values(&self, values: &[Rational]) -> Result<Vec<Rational>> {
        self.check_values(values)?;
        Ok(self.raw_from_free.iter().map(|form| form.iter().map(|(q, c)| c * &values[*q]).sum()).collect())
    }

    /// Coefficient of `e_k` in `e_i · e_j`.
    pub fn entry(&self, i: usize, j: usize, k: usize) -> &LinearForm {
        let n = self.algebra.dim();
        &self.entries[(i * n + j) * n + k]
    }

    /// Linear constraints in the raw parameters, already solved.
    pub fn commutativity_constraints(&self) -> &[PolyConstraint] {
        &self.commutativity
    }

    pub fn instantiate(&self, values: &[Rational]) -> Result<BilinearProduct> {
        self.check_values(values)?;
        let d = self.entries.iter().map(|form| form.iter().map(|(q, c)| c * &values[*q]).sum()).collect();
        BilinearProduct::from_tensor(self.algebra.dim(), d)
    }

    fn check_values(&self, values: &[Rational]) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::DimensionMismatch { expected: self.names.len(), found: values.len() });
        }
        Ok(())
    }
}

fn subscript(label: &BasisLabel, n: usize) -> String {
    match *label {
        BasisLabel::MatrixUnit(i, j) if n < 10 => format!("{i}{j}"),
        BasisLabel::MatrixUnit(i, j) => format!("{i},{j}"),
        BasisLabel::DiagDifference(i) => format!("h{i}"),
        BasisLabel::Abstract(k) => k.to_string(),
    }
}

/// The derivation basis used to name parameters: `{id, α, β_i}` on `T_n`,
/// `{id, γ}` on `M_n`, the computed basis elsewhere.
fn named_derivations(l: &LieAlgebra, space: &DerivationSpace) -> Result<Vec<(String, LinearMap)>> {
    let named = match l.kind() {
        AlgebraKind::UpperTriangular(n) if n >= 2 => half_deriv::tn_named_basis(n)?,
        AlgebraKind::FullMatrix(n) if n >= 2 => half_deriv::mn_named_basis(n)?,
        _ => {
            return Ok(space.basis().iter().enumerate().map(|(s, m)| (format!("d{s}"), m.clone())).collect());
        }
    };
    let flat: Vec<Vec<Rational>> = named.iter().map(|m| m.map.to_vector()).collect();
    if !linalg::span_equal(&flat, &space.flattened_basis())? {
        return Err(Error::Inconsistency(format!(
            "named ½-derivations of {} differ from the computed space",
            l.kind()
        )));
    }
    Ok(named.into_iter().map(|m| (m.symbol, m.map)).collect())
}

fn raw_name(symbol: &str, sub: &str) -> String {
    match symbol.split_once('^') {
        Some((base, sup)) => format!("{base}_{sub}^{sup}"),
        None => format!("{symbol}_{sub}"),
    }
}

/// Conventional name of a free parameter, falling back to its raw name.
fn alias(l: &LieAlgebra, symbol: &str, label: &BasisLabel, raw: &str) -> String {
    match (l.kind(), symbol, *label) {
        (AlgebraKind::UpperTriangular(n), s, BasisLabel::MatrixUnit(i, j)) if i == j && s.starts_with("z^") => {
            let k: usize = s[2..].parse().expect("z^k symbol");
            let (lo, hi) = (i.min(k), i.max(k));
            if n < 10 {
                format!("a_{lo}{hi}")
            } else {
                format!("a_{lo},{hi}")
            }
        }
        (AlgebraKind::UpperTriangular(_), "y", BasisLabel::MatrixUnit(1, 1)) => "b".into(),
        (AlgebraKind::FullMatrix(_), "y", BasisLabel::MatrixUnit(1, 1)) => "c".into(),
        _ => raw.into(),
    }
}

/// Parametrizes every commutative product whose multiplication operators are
/// ½-derivations; these satisfy the transposed Leibniz rule by construction.
pub fn tp_ansatz(l: &LieAlgebra) -> Result<ParamFamily> {
    let n = l.dim();
    let space = DerivationSpace::compute(l, &DerivationWeight::half());
    let named = named_derivations(l, &space)?;
    let s_count = named.len();
    let raw_count = n * s_count;
    let size = l.matrix_size().unwrap_or(n);
    let raw_names: Vec<String> = (0..n)
        .flat_map(|i| named.iter().map(move |(sym, _)| (i, sym)))
        .map(|(i, sym)| raw_name(sym, &subscript(&l.labels()[i], size)))
        .collect();
    let coeff = |s: usize, k: usize, j: usize| -> &Rational { &named[s].1.matrix()[(k, j)] };

    // Columns are reversed so that elimination keeps the earliest raw
    // parameters free.
    let col = |r: usize| raw_count - 1 - r;
    let mut echelon = Echelon::new(raw_count);
    let mut commutativity = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
                for s in 0..s_count {
                    *row.entry(i * s_count + s).or_insert_with(Rational::zero) += coeff(s, k, j);
                    *row.entry(j * s_count + s).or_insert_with(Rational::zero) -= coeff(s, k, i);
                }
                let raw: Vec<(usize, Rational)> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                if raw.is_empty() {
                    continue;
                }
                let mut permuted: SparseRow = raw.iter().map(|(r, v)| (col(*r), v.clone())).collect();
                permuted.sort_by_key(|e| e.0);
                echelon.insert(permuted);
                commutativity.insert(PolyConstraint {
                    poly: Poly::from_linear(&raw).normalized(),
                    origin: ConstraintOrigin::Commutativity,
                });
            }
        }
    }

    // Free columns come out in ascending permuted order; reverse them to get
    // ascending raw order.
    let mut kernel = echelon.nullspace_basis();
    kernel.reverse();
    let free_raw: Vec<usize> = kernel
        .iter()
        .map(|v| {
            let f = (0..raw_count).rev().find(|&c| v[c].is_one()).expect("kernel vector has a free column");
            raw_count - 1 - f
        })
        .collect();
    let mut raw_from_free: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); raw_count];
    for (q, v) in kernel.iter().enumerate() {
        for (c, x) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            raw_from_free[raw_count - 1 - c].push((q, x.clone()));
        }
    }

    let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n * n * n];
    for i in 0..n {
        for s in 0..s_count {
            for (q, w) in &raw_from_free[i * s_count + s] {
                for j in 0..n {
                    for k in 0..n {
                        let d = coeff(s, k, j);
                        if !d.is_zero() {
                            *acc[(i * n + j) * n + k].entry(*q).or_insert_with(Rational::zero) += w * d;
                        }
                    }
                }
            }
        }
    }
    let entries = acc.into_iter().map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect();

    let names =
        free_raw.iter().map(|&r| alias(l, &named[r % s_count].0, &l.labels()[r / s_count], &raw_names[r])).collect();
    Ok(ParamFamily {
        algebra: l.clone(),
        raw_names,
        names,
        free_raw,
        raw_from_free,
        entries,
        commutativity: commutativity.into_iter().collect(),
    })
}

/// One quadratic polynomial per basis triple and output coordinate of
/// `(e_i·e_j)·e_k - e_i·(e_j·e_k)`, normalized and deduplicated.
pub fn associativity_constraints(fam: &ParamFamily) -> Vec<PolyConstraint> {
    let n = fam.algebra_dim();
    let nonzero: Vec<Vec<(usize, &LinearForm)>> = (0..n * n)
        .map(|ij| (0..n).map(|k| (k, &fam.entries[ij * n + k])).filter(|(_, f)| !f.is_empty()).collect())
        .collect();
    let one = Rational::one();
    let minus = -Rational::one();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut polys: BTreeMap<usize, Poly> = BTreeMap::new();
                for (l, f) in &nonzero[i * n + j] {
                    for (m, g) in &nonzero[l * n + k] {
                        polys.entry(*m).or_default().add_product(&one, f, g);
                    }
                }
                for (l, f) in &nonzero[j * n + k] {
                    for (m, g) in &nonzero[i * n + l] {
                        polys.entry(*m).or_default().add_product(&minus, f, g);
                    }
                }
                for p in polys.into_values().filter(|p| !p.is_zero()) {
                    out.insert(PolyConstraint { poly: p.normalized(), origin: ConstraintOrigin::Associativity });
                }
            }
        }
    }
    out.into_iter().collect()
}

pub fn satisfies(constraints: &[PolyConstraint], values: &[Rational]) -> bool {
    constraints.iter().all(|c| c.poly.eval(values).is_zero())
}

/// A sampled solution: free parameter values and the resulting product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub values: Vec<Rational>,
    pub product: BilinearProduct,
}

/// A constraint scaled to integer coefficients, with its distinct variables.
struct Prepared {
    terms: Vec<(Vec<usize>, i128)>,
    vars: Vec<usize>,
}

impl Prepared {
    fn new(poly: &Poly) -> Result<Self> {
        let lcm = poly.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let terms = poly
            .terms()
            .map(|(m, c)| {
                let scaled = c.numer() * (&lcm / c.denom());
                let coef = i128::try_from(&scaled)
                    .map_err(|_| Error::InvalidParameter("constraint coefficients too large for the sampler".into()))?;
                Ok((m.clone(), coef))
            })
            .collect::<Result<_>>()?;
        Ok(Self { terms, vars: poly.variables().into_iter().collect() })
    }
}

/// Backtracking state. Every assigned value lies in [`SAMPLE_RANGE`], so
/// evaluation stays in machine integers.
struct Search<'a> {
    constraints: &'a [Prepared],
    by_var: &'a [Vec<usize>],
    unassigned: Vec<usize>,
    assignment: Vec<Option<i64>>,
    trail: Vec<usize>,
    nodes: usize,
    budget: usize,
}

impl<'a> Search<'a> {
    fn new(constraints: &'a [Prepared], by_var: &'a [Vec<usize>], budget: usize) -> Self {
        Self {
            constraints,
            by_var,
            unassigned: constraints.iter().map(|c| c.vars.len()).collect(),
            assignment: vec![None; by_var.len()],
            trail: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    /// Coefficients `(c0, c1, c2)` of the constraint as a polynomial in its
    /// one remaining variable `u` (or a constant when none remains).
    fn restrict(&self, c: &Prepared, u: Option<usize>) -> [i128; 3] {
        let mut out = [0i128; 3];
        for (m, coef) in &c.terms {
            let mut t = *coef;
            let mut deg = 0;
            for v in m {
                if Some(*v) == u {
                    deg += 1;
                } else {
                    t *= i128::from(self.assignment[*v].expect("only u is unassigned"));
                }
            }
            out[deg] += t;
        }
        out
    }

    /// Assigns `var`, then forces every variable left alone in a constraint
    /// that became linear in it. Returns false on a conflict, including a
    /// forced value outside the sampling range.
    fn assign(&mut self, var: usize, value: i64) -> bool {
        let mut queue = vec![(var, value)];
        while let Some((v, x)) = queue.pop() {
            match self.assignment[v] {
                Some(y) if y == x => continue,
                Some(_) => return false,
                None => {}
            }
            self.assignment[v] = Some(x);
            self.trail.push(v);
            for &c in &self.by_var[v] {
                self.unassigned[c] -= 1;
            }
            for &c in &self.by_var[v] {
                let con = &self.constraints[c];
                match self.unassigned[c] {
                    0 => {
                        if self.restrict(con, None)[0] != 0 {
                            return false;
                        }
                    }
                    1 => {
                        let u = *con.vars.iter().find(|w| self.assignment[**w].is_none()).expect("one unassigned");
                        let [c0, c1, c2] = self.restrict(con, Some(u));
                        if c2 != 0 {
                            continue;
                        }
                        if c1 == 0 {
                            if c0 != 0 {
                                return false;
                            }
                            continue;
                        }
                        if c0 % c1 != 0 {
                            return false;
                        }
                        match i64::try_from(-c0 / c1) {
                            Ok(f) if SAMPLE_RANGE.contains(&f) => queue.push((u, f)),
                            _ => return false,
                        }
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail above mark");
            self.assignment[v] = None;
            for &c in &self.by_var[v] {
                self.unassigned[c] += 1;
            }
        }
    }

    fn run<R: Rng>(&mut self, rng: &mut R) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let Some(var) = self.assignment.iter().position(Option::is_none) else {
            return true;
        };
        let mut values: Vec<i64> = SAMPLE_RANGE.collect();
        values.shuffle(rng);
        if rng.random_bool(0.5) {
            let zero = values.iter().position(|&v| v == 0).expect("range contains 0");
            values[..=zero].rotate_right(1);
        }
        for x in values {
            let mark = self.trail.len();
            if self.assign(var, x) && self.run(rng) {
                return true;
            }
            self.undo(mark);
            if self.nodes > self.budget {
                return false;
            }
        }
        false
    }
}

/// Seeded backtracking search over integer parameter values in
/// [`SAMPLE_RANGE`], pruned by linear propagation. Returns up to `count`
/// distinct solutions sorted by parameter values; each one is checked to be a
/// transposed Poisson structure.
pub fn sample_solutions(
    fam: &ParamFamily,
    constraints: &[PolyConstraint],
    seed: u64,
    count: usize,
) -> Result<Vec<Sample>> {
    let vars = fam.param_count();
    if constraints.iter().any(|c| c.poly.variables().iter().any(|&v| v >= vars)) {
        return Err(Error::InvalidParameter("constraint refers to an unknown parameter".into()));
    }
    let prepared: Vec<Prepared> = constraints.iter().map(|c| Prepared::new(&c.poly)).collect::<Result<_>>()?;
    let mut by_var = vec![Vec::new(); vars];
    for (c, p) in prepared.iter().enumerate() {
        for &v in &p.vars {
            by_var[v].push(c);
        }
    }
    if prepared.iter().any(|p| p.vars.is_empty() && !p.terms.is_empty()) {
        return Ok(Vec::new());
    }
    let checker = TpChecker::new(fam.algebra());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let attempts = 20 * count + 50;
    for _ in 0..attempts {
        if out.len() >= count {
            break;
        }
        let mut search = Search::new(&prepared, &by_var, 2_000);
        if !search.run(&mut rng) {
            continue;
        }
        let values: Vec<Rational> =
            search.assignment.into_iter().map(|v| rational::int(v.expect("complete assignment"))).collect();
        if !satisfies(constraints, &values) || !seen.insert(values.clone()) {
            continue;
        }
        let product = fam.instantiate(&values)?;
        if !checker.is_tp(&product)? {
            return Err(Error::Inconsistency(format!(
                "sampled product on {} satisfies all constraints but is not transposed Poisson",
                fam.algebra().kind()
            )));
        }
        out.push(Sample { values, product });
    }
    out.sort_by(|a, b| a.values.cmp(&b.values));
    Ok(out)
}

/// A basis pair `(i, j)` breaking the `T_n` support pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternMismatch {
    pub i: usize,
    pub j: usize,
    pub reason: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportPattern {
    /// `e_ii·e_jj = a_ij δ`, plus `b e(1,n)` on `(1,1)` and `(n,n)` and
    /// `-b e(1,n)` on `(1,n)`; all other products zero.
    Matches {
        a: ExactMatrix,
        b: Rational,
    },
    Mismatch(Vec<PatternMismatch>),
}

impl SupportPattern {
    pub fn matches(&self) -> bool {
        matches!(self, SupportPattern::Matches { .. })
    }
}

fn tn_size(l: &LieAlgebra) -> Result<usize> {
    match l.kind() {
        AlgebraKind::UpperTriangular(n) if n >= 2 => Ok(n),
        k => Err(Error::UnsupportedAlgebra(format!("support pattern is defined on T_n, n >= 2, not {k}"))),
    }
}

/// Reads `(a, b)` off a product on `T_n` without checking that it is
/// transposed Poisson.
pub fn match_support_pattern(l: &LieAlgebra, p: &BilinearProduct) -> Result<SupportPattern> {
    let n = tn_size(l)?;
    l.check_len(p.dim())?;
    let top = l.unit_index(1, n);
    let e11 = l.unit_index(1, 1);
    let b = p.entry(e11, e11, top).clone();
    let diag = |idx: usize| match l.labels()[idx] {
        BasisLabel::MatrixUnit(i, j) if i == j => Some(i),
        _ => None,
    };
    let mut a = ExactMatrix::zeros(n, n);
    let mut bad = Vec::new();
    for x in 0..l.dim() {
        for y in x..l.dim() {
            let v = p.basis_product(x, y);
            let (Some(i), Some(j)) = (diag(x), diag(y)) else {
                if !rational::is_zero_vec(v) {
                    bad.push(PatternMismatch { i: x, j: y, reason: "product with a strictly upper unit is nonzero" });
                }
                continue;
            };
            let coef = v[e11].clone();
            let mut rest: Vec<Rational> = v.to_vec();
            for d in 1..=n {
                rest[l.unit_index(d, d)] -= &coef;
            }
            let top_coef = std::mem::take(&mut rest[top]);
            if !rational::is_zero_vec(&rest) {
                bad.push(PatternMismatch { i: x, j: y, reason: "product outside <δ, e(1,n)>" });
                continue;
            }
            let expected = match (i.min(j), i.max(j)) {
                (1, 1) => b.clone(),
                (1, m) if m == n => -b.clone(),
                (m, k) if m == n && k == n => b.clone(),
                _ => Rational::zero(),
            };
            if top_coef != expected {
                bad.push(PatternMismatch { i: x, j: y, reason: "e(1,n) coefficients break the (b, -b, b) signature" });
            }
            a[(i - 1, j - 1)] = coef.clone();
            a[(j - 1, i - 1)] = coef;
        }
    }
    Ok(if bad.is_empty() { SupportPattern::Matches { a, b } } else { SupportPattern::Mismatch(bad) })
}

/// [`match_support_pattern`] for a product required to be transposed Poisson.
pub fn support_pattern(l: &LieAlgebra, p: &BilinearProduct) -> Result<SupportPattern> {
    if !TpChecker::new(l).is_tp(p)? {
        return Err(Error::NotTransposedPoisson);
    }
    match_support_pattern(l, p)
}

/// `Some(c)` when `p` is the trace structure `e_ii·e_jj = c δ` on `M_n`
/// (including `c = 0`).
pub fn mn_family_parameter(l: &LieAlgebra, p: &BilinearProduct) -> Result<Option<Rational>> {
    let n = match l.kind() {
        AlgebraKind::FullMatrix(n) if n >= 2 => n,
        k => return Err(Error::UnsupportedAlgebra(k.to_string())),
    };
    l.check_len(p.dim())?;
    let e11 = l.unit_index(1, 1);
    let c = p.entry(e11, e11, e11).clone();
    let expected = product::catalog(&CatalogEntry::MnTrace { n, c: c.clone() })?;
    Ok((expected == *p).then_some(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NormalFormTag {
    PoissonType,
    Form2PlusPoisson,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub tag: NormalFormTag,
    pub canonical: BilinearProduct,
    /// The Poisson part, unchanged by normalization.
    pub a: ExactMatrix,
    /// `b` before normalization.
    pub b: Rational,
    pub trivial: bool,
}

/// Normal form of a transposed Poisson structure on `T_n`, `n > 2`: `b = 0`
/// gives a Poisson-type structure, otherwise conjugation rescales `b` to 1.
/// A product off the support pattern is an internal inconsistency.
pub fn normalize_tn(l: &LieAlgebra, p: &BilinearProduct) -> Result<NormalForm> {
    let n = tn_size(l)?;
    if n < 3 {
        return Err(Error::UnsupportedAlgebra("normal forms are defined on T_n for n > 2".into()));
    }
    let (a, b) = match match_support_pattern(l, p)? {
        SupportPattern::Matches { a, b } => (a, b),
        SupportPattern::Mismatch(bad) => {
            return Err(Error::Inconsistency(format!(
                "product on T_{n} breaks the support pattern at {} basis pairs, first ({}, {}): {}",
                bad.len(),
                l.labels()[bad[0].i],
                l.labels()[bad[0].j],
                bad[0].reason
            )))
        }
    };
    let trivial = p.is_zero();
    if b.is_zero() {
        return Ok(NormalForm { tag: NormalFormTag::PoissonType, canonical: p.clone(), a, b, trivial });
    }
    let g = automorphism::conjugation_automorphism(l, &automorphism::b_normalizing_matrix(n, &b)?)?;
    let canonical = automorphism::transport(l, p, &g)?;
    Ok(NormalForm { tag: NormalFormTag::Form2PlusPoisson, canonical, a, b, trivial })
}

/// Isomorphism invariants of a structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Signature {
    pub trivial: bool,
    pub poisson_type: bool,
    pub image_dim: usize,
    pub annihilator_dim: usize,
    /// `b != 0` on `T_n` when the support pattern applies.
    pub b_nonzero: Option<bool>,
    /// Ordered pairs `(i, j)` with `e_ii·e_jj ∈ <δ>`, on `T_n` and `M_n`.
    pub delta_pairs: Option<usize>,
    /// Rank of the trace form `(x, y) ↦ tr(L_{x·y})`.
    pub trace_form_rank: usize,
    /// `dim(Z(L) ∩ Ann)`.
    pub central_annihilator_dim: usize,
    /// `dim(L·L ∩ [L,L])`.
    pub derived_image_dim: usize,
}

pub fn invariant_signature(l: &LieAlgebra, p: &BilinearProduct) -> Result<Signature> {
    invariant_signature_with(&TpChecker::new(l), p)
}

/// [`invariant_signature`] reusing precomputed data for the algebra.
pub fn invariant_signature_with(checker: &TpChecker, p: &BilinearProduct) -> Result<Signature> {
    let l = checker.algebra();
    let b_nonzero = match l.kind() {
        AlgebraKind::UpperTriangular(n) if n >= 2 => match match_support_pattern(l, p)? {
            SupportPattern::Matches { b, .. } => Some(!b.is_zero()),
            SupportPattern::Mismatch(_) => None,
        },
        _ => None,
    };
    let delta_pairs = match (l.kind(), l.identity_element()) {
        (AlgebraKind::UpperTriangular(n) | AlgebraKind::FullMatrix(n), Some(delta)) => {
            let mut line = Echelon::new(l.dim());
            line.insert_dense(&delta)?;
            let mut count = 0;
            for i in 1..=n {
                for j in 1..=n {
                    if line.contains(p.basis_product(l.unit_index(i, i), l.unit_index(j, j)))? {
                        count += 1;
                    }
                }
            }
            Some(count)
        }
        _ => None,
    };
    let image = p.image();
    let annihilator = p.annihilator();
    Ok(Signature {
        trivial: p.is_zero(),
        poisson_type: checker.is_poisson_type(p)?,
        image_dim: image.dim(),
        annihilator_dim: annihilator.dim(),
        b_nonzero,
        delta_pairs,
        trace_form_rank: trace_form_rank(p),
        central_annihilator_dim: intersection_dim(&l.center(), &annihilator)?,
        derived_image_dim: intersection_dim(&image, checker.derived())?,
    })
}

fn trace_form_rank(p: &BilinearProduct) -> usize {
    let n = p.dim();
    let traces: Vec<Rational> = (0..n).map(|k| (0..n).map(|m| p.entry(k, m, m)).sum()).collect();
    let mut form = ExactMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            form[(i, j)] = p.basis_product(i, j).iter().zip(&traces).map(|(a, t)| a * t).sum();
        }
    }
    form.rank()
}

fn intersection_dim(a: &Subspace, b: &Subspace) -> Result<usize> {
    let all: Vec<Vec<Rational>> = a.basis().iter().chain(b.basis()).cloned().collect();
    Ok(a.dim() + b.dim() - linalg::rank_of(&all)?)
}

/// How a pair of `T_2` structures was told apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Separation {
    /// Different invariant signatures: not isomorphic.
    Signature,
    /// An automorphism transports one onto the other.
    Isomorphic { witness: String },
    /// Same signature and no witness found in the bounded search.
    NotSeparated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSeparation {
    pub left: &'static str,
    pub right: &'static str,
    #[serde(flatten)]
    pub separation: Separation,
}

/// `{k/m : k in [-3, 3], m in {1, 2, 3}}`.
fn small_rationals() -> Vec<Rational> {
    let set: BTreeSet<Rational> = (-3..=3).flat_map(|k| (1..=3).map(move |m| rational::frac(k, m))).collect();
    set.into_iter().collect()
}

/// Automorphisms of `T_2` searched for isomorphism witnesses: conjugations by
/// `[[1, s], [0, t]]` with small entries, optionally after the flip, then a
/// central shift `e(i,i) ↦ e(i,i) + t_i δ` with `t_i ∈ {-1, -1/2, 0, 1/2, 1}`.
fn t2_witness_candidates() -> Result<Vec<(String, Automorphism)>> {
    let l = LieAlgebra::upper_triangular(2)?;
    let values = small_rationals();
    let shifts: Vec<Rational> =
        [(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1)].iter().map(|&(p, q)| rational::frac(p, q)).collect();
    let flip = automorphism::flip_automorphism(2)?;
    let mut shift_maps = Vec::new();
    for t1 in &shifts {
        for t2 in &shifts {
            if !(t1 + t2 + Rational::one()).is_zero() {
                shift_maps.push((t1, t2, automorphism::tn_central_shift(2, &[t1.clone(), t2.clone()])?));
            }
        }
    }
    let mut out = Vec::new();
    for s in &values {
        for t in values.iter().filter(|t| !t.is_zero()) {
            let mut u = ExactMatrix::identity(2);
            u[(0, 1)] = s.clone();
            u[(1, 1)] = t.clone();
            let conj = automorphism::conjugation_automorphism(&l, &u)?;
            for flipped in [false, true] {
                let base = if flipped { flip.compose(&conj)? } else { conj.clone() };
                for (t1, t2, shift) in &shift_maps {
                    let desc = format!(
                        "{}conjugation by [[1, {}], [0, {}]], then shift ({}, {})",
                        if flipped { "flip after " } else { "" },
                        rational::format(s),
                        rational::format(t),
                        rational::format(t1),
                        rational::format(t2)
                    );
                    out.push((desc, shift.compose(&base)?));
                }
            }
        }
    }
    Ok(out)
}

/// Searches the bounded automorphism set for `g` with `transport(p1, g) = p2`
/// on `T_2`, returning its description.
pub fn find_t2_witness(p1: &BilinearProduct, p2: &BilinearProduct) -> Result<Option<String>> {
    let l = LieAlgebra::upper_triangular(2)?;
    for (desc, g) in t2_witness_candidates()? {
        if automorphism::transport_verified(&l, p1, &g)? == *p2 {
            return Ok(Some(desc));
        }
    }
    Ok(None)
}

/// Pairwise separation of the nine `T_2` structures, with family parameter
/// `c`. Signatures prove non-isomorphism; the bounded witness search can only
/// prove isomorphism, so a tie without a witness is reported as such.
pub fn t2_separation(c: &Rational) -> Result<Vec<PairSeparation>> {
    let l = LieAlgebra::upper_triangular(2)?;
    let checker = TpChecker::new(&l);
    let items: Vec<(T2Structure, BilinearProduct, Signature)> = T2Structure::ALL
        .iter()
        .map(|&s| {
            let p = product::catalog(&CatalogEntry::T2 { structure: s, c: s.needs_c().then(|| c.clone()) })?;
            let sig = invariant_signature_with(&checker, &p)?;
            Ok((s, p, sig))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (x, (s1, p1, sig1)) in items.iter().enumerate() {
        for (s2, p2, sig2) in &items[x + 1..] {
            let separation = if sig1 != sig2 {
                Separation::Signature
            } else {
                match find_t2_witness(p1, p2)? {
                    Some(witness) => Separation::Isomorphic { witness },
                    None => Separation::NotSeparated,
                }
            };
            out.push(PairSeparation { left: s1.name(), right: s2.name(), separation });
        }
    }
    Ok(out)
}

/// One entry of a classification report's normal-form list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct NormalFormEntry {
    pub tag: String,
    pub params: BTreeMap<String, String>,
}

/// Summary of a sampling run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub algebra: String,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub pattern_checked: bool,
    pub pattern_violations: Vec<String>,
    pub normal_forms: Vec<NormalFormEntry>,
}

/// Samples structures on `T_n` or `M_n` and checks each against the
/// predicted shape: the support pattern and normal form on `T_n` (`n > 2`),
/// the trace family on `M_n`.
pub fn classify(l: &LieAlgebra, seed: u64, count: usize) -> Result<ClassificationReport> {
    let n = l.matrix_size().unwrap_or(l.dim());
    let fam = tp_ansatz(l)?;
    let constraints = associativity_constraints(&fam);
    let samples = sample_solutions(&fam, &constraints, seed, count)?;
    let mut violations = Vec::new();
    let mut forms = BTreeSet::new();
    let describe = |s: &Sample| -> String {
        fam.param_names()
            .iter()
            .zip(&s.values)
            .map(|(name, v)| format!("{name}={}", rational::format(v)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let pattern_checked = match l.kind() {
        AlgebraKind::UpperTriangular(m) if m > 2 => {
            for s in &samples {
                match normalize_tn(l, &s.product) {
                    Ok(nf) => {
                        let mut params = BTreeMap::new();
                        let b = if nf.b.is_zero() { Rational::zero() } else { Rational::one() };
                        params.insert("b".to_string(), rational::format(&b));
                        for i in 0..m {
                            for j in i..m {
                                if !nf.a[(i, j)].is_zero() {
                                    params.insert(format!("a_{},{}", i + 1, j + 1), rational::format(&nf.a[(i, j)]));
                                }
                            }
                        }
                        forms.insert(NormalFormEntry { tag: format!("{:?}", nf.tag), params });
                    }
                    Err(Error::Inconsistency(msg)) => violations.push(format!("{}: {msg}", describe(s))),
                    Err(e) => return Err(e),
                }
            }
            true
        }
        AlgebraKind::FullMatrix(_) => {
            for s in &samples {
                match mn_family_parameter(l, &s.product)? {
                    Some(c) => {
                        let tag = if c.is_zero() { "Trivial" } else { "TraceFamily" };
                        let c = if c.is_zero() { c } else { Rational::one() };
                        let params = BTreeMap::from([("c".to_string(), rational::format(&c))]);
                        forms.insert(NormalFormEntry { tag: tag.into(), params });
                    }
                    None => violations.push(format!("{}: not in the trace family", describe(s))),
                }
            }
            true
        }
        _ => false,
    };
    Ok(ClassificationReport {
        algebra: l.kind().to_string(),
        n,
        seed,
        samples: samples.len(),
        pattern_checked,
        pattern_violations: violations,
        normal_forms: forms.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::check_associative;
    use crate::rational::int;

    #[test]
    fn t3_ansatz_parameters() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let fam = tp_ansatz(&t3).unwrap();
        assert_eq!(fam.raw_param_names().len(), 6 * 5);
        let mut names: Vec<&str> = fam.param_names().iter().map(String::as_str).collect();
        names.sort_unstable();
        assert_eq!(names, ["a_11", "a_12", "a_13", "a_22", "a_23", "a_33", "b"]);
        // x's and z's off the diagonal units are forced to zero
        let zeros = vec![int(1); fam.param_count()];
        let raw = fam.raw_values(&zeros).unwrap();
        for (name, v) in fam.raw_param_names().iter().zip(&raw) {
            if name.starts_with('x') {
                assert!(v.is_zero(), "{name}");
            }
        }
    }

    #[test]
    fn m2_ansatz_has_one_parameter() {
        let m2 = LieAlgebra::full_matrix(2).unwrap();
        let fam = tp_ansatz(&m2).unwrap();
        assert_eq!(fam.param_names(), ["c"]);
        let p = fam.instantiate(&[int(5)]).unwrap();
        assert_eq!(p, product::catalog(&CatalogEntry::MnTrace { n: 2, c: int(5) }).unwrap());
        assert!(associativity_constraints(&fam).is_empty());
    }

    #[test]
    fn abelian_line_ansatz() {
        let l = LieAlgebra::abelian(1);
        let fam = tp_ansatz(&l).unwrap();
        assert_eq!(fam.param_count(), 1);
        let p = fam.instantiate(&[int(3)]).unwrap();
        assert_eq!(p.basis_product(0, 0), [int(3)].as_slice());
        // λ² = λ·λ holds identically
        assert!(associativity_constraints(&fam).is_empty());
    }

    #[test]
    fn t3_constraints_ignore_b() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let fam = tp_ansatz(&t3).unwrap();
        let b = fam.param_names().iter().position(|n| n == "b").unwrap();
        let cons = associativity_constraints(&fam);
        assert!(!cons.is_empty());
        assert!(cons.iter().all(|c| !c.poly.variables().contains(&b) && c.poly.degree() == 2));
    }

    #[test]
    fn constraints_agree_with_direct_check() {
        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        let fam = tp_ansatz(&t2).unwrap();
        let cons = associativity_constraints(&fam);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let values: Vec<Rational> = (0..fam.param_count()).map(|_| int(rng.random_range(-2..=2))).collect();
            let p = fam.instantiate(&values).unwrap();
            assert_eq!(satisfies(&cons, &values), check_associative(&p).is_ok());
        }
    }

    #[test]
    fn sampling_examples() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let fam = tp_ansatz(&t3).unwrap();
        let cons = associativity_constraints(&fam);
        let samples = sample_solutions(&fam, &cons, 1, 30).unwrap();
        assert_eq!(samples.len(), 30);
        assert_eq!(samples, sample_solutions(&fam, &cons, 1, 30).unwrap());
        for s in &samples {
            assert!(match_support_pattern(&t3, &s.product).unwrap().matches());
        }
        assert!(fam.instantiate(&vec![int(0); 7]).unwrap().is_zero());
        let mut v = vec![int(0); 7];
        v[fam.param_names().iter().position(|n| n == "b").unwrap()] = int(1);
        assert_eq!(fam.instantiate(&v).unwrap(), product::catalog(&CatalogEntry::TnForm2 { n: 3 }).unwrap());
    }

    #[test]
    fn support_pattern_examples() {
        let t4 = LieAlgebra::upper_triangular(4).unwrap();
        let form2 = product::catalog(&CatalogEntry::TnForm2 { n: 4 }).unwrap();
        match support_pattern(&t4, &form2).unwrap() {
            SupportPattern::Matches { a, b } => {
                assert!(a.is_zero());
                assert_eq!(b, int(1));
            }
            m => panic!("{m:?}"),
        }
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let mut a = ExactMatrix::zeros(3, 3);
        a[(1, 1)] = int(1);
        let p = product::catalog(&CatalogEntry::TnPattern { n: 3, a: a.clone(), b: int(0) }).unwrap();
        assert_eq!(support_pattern(&t3, &p).unwrap(), SupportPattern::Matches { a, b: int(0) });

        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        let fam = product::catalog(&CatalogEntry::T2 { structure: T2Structure::T17C, c: Some(int(1)) }).unwrap();
        assert!(!support_pattern(&t2, &fam).unwrap().matches());
        let mut bad = BilinearProduct::zero(3);
        bad.set(0, 0, &rational::vec_from_i64(&[1, 0, 0])).unwrap();
        assert_eq!(support_pattern(&t2, &bad).unwrap_err(), Error::NotTransposedPoisson);
    }

    #[test]
    fn normal_forms() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let base = product::catalog(&CatalogEntry::TnForm2 { n: 3 }).unwrap();
        let nf = normalize_tn(&t3, &base.scale(&int(3))).unwrap();
        assert_eq!(nf.tag, NormalFormTag::Form2PlusPoisson);
        assert_eq!(nf.canonical, base);
        assert_eq!(normalize_tn(&t3, &nf.canonical).unwrap().canonical, base);
        let zero = normalize_tn(&t3, &BilinearProduct::zero(6)).unwrap();
        assert_eq!(zero.tag, NormalFormTag::PoissonType);
        assert!(zero.trivial);
        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        assert!(matches!(normalize_tn(&t2, &BilinearProduct::zero(3)), Err(Error::UnsupportedAlgebra(_))));
        let mut off = BilinearProduct::zero(6);
        off.set(1, 1, &t3.basis_vector(2)).unwrap();
        assert!(matches!(normalize_tn(&t3, &off), Err(Error::Inconsistency(_))));
    }

    #[test]
    fn signatures() {
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let zero = invariant_signature(&t3, &BilinearProduct::zero(6)).unwrap();
        assert!(zero.trivial && zero.poisson_type);
        assert_eq!((zero.image_dim, zero.annihilator_dim), (0, 6));
        let form2 = invariant_signature(&t3, &product::catalog(&CatalogEntry::TnForm2 { n: 3 }).unwrap()).unwrap();
        assert_eq!(form2.delta_pairs, Some(5));
        assert_eq!(zero.delta_pairs, Some(9));
        assert_eq!(form2.b_nonzero, Some(true));
    }

    #[test]
    fn t2_groups_separate() {
        let report = t2_separation(&int(1)).unwrap();
        assert_eq!(report.len(), 36);
        for pair in &report {
            assert_eq!(pair.separation, Separation::Signature, "{} {}", pair.left, pair.right);
        }
    }

    #[test]
    fn t2_witness_search() {
        let t2 = LieAlgebra::upper_triangular(2).unwrap();
        let p = product::catalog(&CatalogEntry::T2 { structure: T2Structure::T16, c: None }).unwrap();
        let u = ExactMatrix::from_i64(&[&[1, 1], &[0, 2]]);
        let g = automorphism::conjugation_automorphism(&t2, &u).unwrap();
        let q = automorphism::transport(&t2, &p, &g).unwrap();
        assert!(find_t2_witness(&p, &q).unwrap().is_some());
        let t10 = product::catalog(&CatalogEntry::T2 { structure: T2Structure::T10_0, c: None }).unwrap();
        assert_eq!(find_t2_witness(&p, &t10).unwrap(), None);
    }

    #[test]
    fn classification_reports() {
        let m2 = LieAlgebra::full_matrix(2).unwrap();
        let r = classify(&m2, DEFAULT_SEED, 20).unwrap();
        assert!(r.pattern_violations.is_empty());
        assert_eq!(r.samples, 7);
        let t3 = LieAlgebra::upper_triangular(3).unwrap();
        let r = classify(&t3, DEFAULT_SEED, 20).unwrap();
        assert_eq!(r.samples, 20);
        assert!(r.pattern_checked && r.pattern_violations.is_empty());
    }
}
