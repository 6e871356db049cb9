//! The end-to-end check suite: each criterion recomputes one classification
//! result from scratch and reports pass/fail with human-readable details.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automorphism::{
    self, b_normalizing_matrix, conjugation_automorphism, mn_scaling_shift, random_automorphism,
};
use crate::classify::{self, invariant_signature_with, match_support_pattern, mn_family_parameter, SupportPattern};
use crate::error::{Error, Result};
use crate::half_deriv::{mn_named_basis, tn_named_basis, verify_entry_lemmas, DerivationSpace, DerivationWeight};
use crate::lie::LieAlgebra;
use crate::linalg::{span_equal, ExactMatrix};
use crate::product::{
    are_orthogonal, catalog, check_transposed_leibniz, orthogonal_sum, BilinearProduct, CatalogEntry, T2Structure,
    TpChecker,
};
use crate::rational::{self, Rational};

pub const DEFAULT_N_MAX: usize = 6;
/// Largest accepted `n_max`.
pub const N_MAX_LIMIT: usize = 6;
pub const CRITERION_COUNT: u8 = 10;
/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "TPA_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReproduceConfig {
    pub n_max: usize,
    pub seed: u64,
}

impl ReproduceConfig {
    pub fn new(n_max: usize, seed: u64) -> Result<Self> {
        if !(2..=N_MAX_LIMIT).contains(&n_max) {
            return Err(Error::InvalidParameter(format!("n_max must be in 2..={N_MAX_LIMIT}, got {n_max}")));
        }
        Ok(Self { n_max, seed })
    }

    fn sizes(&self, lo: usize, hi: usize) -> std::ops::RangeInclusive<usize> {
        lo..=hi.min(self.n_max)
    }

    fn rng(&self, id: u8) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (u64::from(id) << 56))
    }
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX, seed: classify::DEFAULT_SEED }
    }
}

/// The seed from [`SEED_ENV`] if set, else `default`.
pub fn seed_from_env(default: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}={s:?} is not a u64"))),
        Err(_) => Ok(default),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub details: Vec<String>,
}

/// Accumulates checks; the criterion passes when every check does.
struct Checks {
    passed: bool,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self { passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(format!("[{}] {detail}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }

    fn finish(self, id: u8) -> CriterionReport {
        CriterionReport { id, title: title(id).into(), passed: self.passed, details: self.details }
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "derivation space dimensions",
        2 => "named basis spans the derivation space",
        3 => "entry identities on T_n",
        4 => "catalog structures are transposed Poisson",
        5 => "Leibniz rule agrees with operator membership",
        6 => "sampled structures match the predicted shape",
        7 => "normalization and signature invariance",
        8 => "signatures separate the classes",
        9 => "trace identity on M_n",
        10 => "orthogonality with Poisson-type structures",
        _ => "unknown criterion",
    }
}

pub fn run_criterion(id: u8, cfg: &ReproduceConfig) -> Result<CriterionReport> {
    match id {
        1 => derivation_dimensions(cfg),
        2 => named_bases(cfg),
        3 => entry_identities(cfg),
        4 => catalog_validity(cfg),
        5 => operator_membership(cfg),
        6 => sampled_shapes(cfg),
        7 => normalization(cfg),
        8 => separation(cfg),
        9 => trace_identity(cfg),
        10 => orthogonality(cfg),
        _ => Err(Error::InvalidParameter(format!("criteria are numbered 1..={CRITERION_COUNT}, got {id}"))),
    }
}

pub fn run_all(cfg: &ReproduceConfig) -> Result<Vec<CriterionReport>> {
    (1..=CRITERION_COUNT).map(|id| run_criterion(id, cfg)).collect()
}

fn half_space(l: &LieAlgebra) -> DerivationSpace {
    DerivationSpace::compute(l, &DerivationWeight::half())
}

fn check_dimensions(
    c: &mut Checks,
    name: &str,
    sizes: std::ops::RangeInclusive<usize>,
    build: fn(usize) -> Result<LieAlgebra>,
    expected: fn(usize) -> usize,
) -> Result<()> {
    for n in sizes {
        let dim = half_space(&build(n)?).dim();
        c.check(dim == expected(n), format!("{name}_{n}: dim = {dim}, expected {}", expected(n)));
    }
    Ok(())
}

fn derivation_dimensions(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    let mut c = Checks::new();
    check_dimensions(&mut c, "T", cfg.sizes(2, 6), LieAlgebra::upper_triangular, |n| n + 2)?;
    check_dimensions(&mut c, "M", cfg.sizes(2, 4), LieAlgebra::full_matrix, |_| 2)?;
    check_dimensions(&mut c, "sl", cfg.sizes(2, 4), LieAlgebra::special_linear, |_| 1)?;
    Ok(c.finish(1))
}

fn named_bases(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    let mut c = Checks::new();
    for n in cfg.sizes(2, 6) {
        let computed = half_space(&LieAlgebra::upper_triangular(n)?).flattened_basis();
        let named: Vec<_> = tn_named_basis(n)?.iter().map(|m| m.map.to_vector()).collect();
        c.check(span_equal(&computed, &named)?, format!("T_{n}: span{{id, α, β_1..β_{n}}} equals the computed space"));
    }
    for n in cfg.sizes(2, 4) {
        let computed = half_space(&LieAlgebra::full_matrix(n)?).flattened_basis();
        let named: Vec<_> = mn_named_basis(n)?.iter().map(|m| m.map.to_vector()).collect();
        c.check(span_equal(&computed, &named)?, format!("M_{n}: span{{id, γ}} equals the computed space"));
    }
    Ok(c.finish(2))
}

fn entry_identities(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    let mut c = Checks::new();
    for n in cfg.sizes(2, 6) {
        let r = verify_entry_lemmas(n)?;
        c.check(r.passed(), format!("T_{n}: {} basis maps, {} violations", r.maps_checked, r.violations.len()));
    }
    Ok(c.finish(3))
}

fn catalog_validity(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    let mut c = Checks::new();
    let mut expect = |label: String, entry: CatalogEntry, poisson: bool| -> Result<()> {
        let l = entry.algebra()?;
        let r = TpChecker::new(&l).report(&entry.build()?)?;
        c.check(
            r.is_tp && r.poisson_type == poisson,
            format!("{label}: is_tp = {}, poisson_type = {} (expected {poisson})", r.is_tp, r.poisson_type),
        );
        Ok(())
    };
    for s in T2Structure::ALL {
        let cs: Vec<Option<Rational>> =
            if s.needs_c() { vec![Some(rational::one()), Some(rational::frac(-2, 3))] } else { vec![None] };
        for cv in cs {
            let label = match &cv {
                Some(v) => format!("T_2 {} (c = {})", s.name(), rational::format(v)),
                None => format!("T_2 {}", s.name()),
            };
            expect(label, CatalogEntry::T2 { structure: s, c: cv }, s.group() == 1)?;
        }
    }
    for n in cfg.sizes(3, 6) {
        expect(format!("T_{n} form (2)"), CatalogEntry::TnForm2 { n }, false)?;
    }
    for n in cfg.sizes(2, 4) {
        expect(format!("M_{n} trace structure"), CatalogEntry::MnTrace { n, c: rational::one() }, true)?;
    }
    Ok(c.finish(4))
}

fn random_product<R: Rng>(dim: usize, density: f64, rng: &mut R) -> Result<BilinearProduct> {
    let mut p = BilinearProduct::zero(dim);
    for i in 0..dim {
        for j in i..dim {
            let v: Vec<Rational> =
                (0..dim)
                    .map(|_| {
                        if rng.random_bool(density) {
                            rational::int(rng.random_range(-3..=3))
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect();
            p.set(i, j, &v)?;
        }
    }
    Ok(p)
}

fn operator_membership(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    const PER_ALGEBRA: usize = 200;
    let mut c = Checks::new();
    let mut rng = cfg.rng(5);
    for n in 2..=3 {
        let l = LieAlgebra::upper_triangular(n)?;
        let checker = TpChecker::new(&l);
        let fam = classify::tp_ansatz(&l)?;
        let (mut holds, mut discrepancies) = (0, 0);
        for k in 0..PER_ALGEBRA {
            // Dense, sparse, and ansatz members with an occasional one-entry perturbation.
            let p = match k % 3 {
                0 => random_product(l.dim(), 1.0, &mut rng)?,
                1 => random_product(l.dim(), 0.1, &mut rng)?,
                _ => {
                    let values: Vec<Rational> =
                        (0..fam.param_count()).map(|_| rational::int(rng.random_range(-3..=3))).collect();
                    let mut p = fam.instantiate(&values)?;
                    if rng.random_bool(0.5) {
                        let (i, j) = (rng.random_range(0..l.dim()), rng.random_range(0..l.dim()));
                        let mut v = p.basis_product(i, j).to_vec();
                        v[rng.random_range(0..l.dim())] += rational::int(rng.random_range(1..=3));
                        p.set(i, j, &v)?;
                    }
                    p
                }
            };
            let direct = check_transposed_leibniz(&l, &p)?.is_ok();
            let via_operators = checker.leibniz_via_derivations(&p)?;
            holds += usize::from(direct);
            discrepancies += usize::from(direct != via_operators);
        }
        c.check(
            discrepancies == 0,
            format!("T_{n}: {PER_ALGEBRA} products, {holds} satisfy the rule, {discrepancies} discrepancies"),
        );
    }
    Ok(c.finish(5))
}

fn sampled_shapes(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    const SAMPLES: usize = 100;
    let mut c = Checks::new();
    let mut run = |l: LieAlgebra, name: String, min: usize| -> Result<()> {
        let r = classify::classify(&l, cfg.seed, SAMPLES)?;
        c.check(
            r.pattern_checked && r.samples >= min && r.pattern_violations.is_empty(),
            format!(
                "{name}: {} samples, {} violations, {} normal forms",
                r.samples,
                r.pattern_violations.len(),
                r.normal_forms.len()
            ),
        );
        for v in r.pattern_violations.iter().take(3) {
            c.note(format!("  {v}"));
        }
        Ok(())
    };
    for n in cfg.sizes(3, 5) {
        run(LieAlgebra::upper_triangular(n)?, format!("T_{n}"), SAMPLES)?;
    }
    // One free parameter in [-3, 3]: at most 7 distinct samples.
    for n in cfg.sizes(2, 3) {
        run(LieAlgebra::full_matrix(n)?, format!("M_{n}"), 7)?;
    }
    Ok(c.finish(6))
}

/// A random symmetric `a` making `e_ii·e_jj = a_ij δ` associative: either
/// a rank-one `λ s sᵀ` or a matrix with zero row sums.
pub fn random_poisson_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ExactMatrix {
    let mut a = ExactMatrix::zeros(n, n);
    if rng.random_bool(0.5) {
        let s: Vec<Rational> = (0..n).map(|_| rational::int(rng.random_range(-2..=2))).collect();
        let lambda = rational::int(rng.random_range(-3..=3));
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = &lambda * &s[i] * &s[j];
            }
        }
    } else {
        for i in 0..n {
            for j in (i + 1)..n {
                let v = rational::int(rng.random_range(-3..=3));
                a[(i, j)] = v.clone();
                a[(j, i)] = v;
            }
        }
        for i in 0..n {
            let off: Rational = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].clone()).sum();
            a[(i, i)] = -off;
        }
    }
    a
}

fn normalization(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    const AUTOMORPHISMS: usize = 50;
    let mut c = Checks::new();
    let mut rng = cfg.rng(7);
    for n in cfg.sizes(2, 5) {
        let l = LieAlgebra::upper_triangular(n)?;
        for b in [rational::int(2), rational::int(-1), rational::frac(1, 3)] {
            let a = random_poisson_matrix(n, &mut rng);
            let p = catalog(&CatalogEntry::TnPattern { n, a: a.clone(), b: b.clone() })?;
            let g = conjugation_automorphism(&l, &b_normalizing_matrix(n, &b)?)?;
            let q = automorphism::transport(&l, &p, &g)?;
            let ok = matches!(match_support_pattern(&l, &q)?, SupportPattern::Matches { a: a2, b: b2 } if b2.is_one() && a2 == a);
            c.check(ok, format!("T_{n}: b = {} normalizes to b = 1 with a unchanged", rational::format(&b)));
        }
    }
    for n in cfg.sizes(2, 4) {
        let l = LieAlgebra::full_matrix(n)?;
        for cv in [rational::int(2), rational::int(-3)] {
            let p = catalog(&CatalogEntry::MnTrace { n, c: cv.clone() })?;
            let q = automorphism::transport(&l, &p, &mn_scaling_shift(n, &cv)?)?;
            let got = mn_family_parameter(&l, &q)?;
            c.check(
                got.as_ref().is_some_and(One::is_one),
                format!(
                    "M_{n}: c = {} maps to c = {}",
                    rational::format(&cv),
                    got.map_or("none".into(), |g| rational::format(&g))
                ),
            );
        }
    }
    let t_sizes: Vec<usize> = cfg.sizes(2, 4).collect();
    let m_sizes: Vec<usize> = cfg.sizes(2, 3).collect();
    let checkers_t: Vec<TpChecker> =
        t_sizes.iter().map(|&n| LieAlgebra::upper_triangular(n).map(|l| TpChecker::new(&l))).collect::<Result<_>>()?;
    let checkers_m: Vec<TpChecker> =
        m_sizes.iter().map(|&n| LieAlgebra::full_matrix(n).map(|l| TpChecker::new(&l))).collect::<Result<_>>()?;
    for (family, checkers) in [("T_n", &checkers_t), ("M_n", &checkers_m)] {
        let mut preserved = 0;
        for k in 0..AUTOMORPHISMS {
            let checker = &checkers[k % checkers.len()];
            let l = checker.algebra();
            let p = match l.kind() {
                crate::lie::AlgebraKind::UpperTriangular(2) => {
                    let s = T2Structure::ALL[k % T2Structure::ALL.len()];
                    let cv = s.needs_c().then(|| rational::int(rng.random_range(1..=3)));
                    catalog(&CatalogEntry::T2 { structure: s, c: cv })?
                }
                crate::lie::AlgebraKind::UpperTriangular(n) => {
                    let b = rational::int(rng.random_range(-1..=1));
                    catalog(&CatalogEntry::TnPattern { n, a: random_poisson_matrix(n, &mut rng), b })?
                }
                crate::lie::AlgebraKind::FullMatrix(n) => {
                    catalog(&CatalogEntry::MnTrace { n, c: rational::int(rng.random_range(-3..=3)) })?
                }
                _ => unreachable!("only T_n and M_n are sampled"),
            };
            let g = random_automorphism(l, &mut rng)?;
            let q = automorphism::transport_verified(l, &p, &g)?;
            let same =
                checker.is_tp(&q)? && invariant_signature_with(checker, &p)? == invariant_signature_with(checker, &q)?;
            preserved += usize::from(same);
        }
        c.check(
            preserved == AUTOMORPHISMS,
            format!("{family}: {preserved}/{AUTOMORPHISMS} random automorphisms preserve TP and the signature"),
        );
    }
    Ok(c.finish(7))
}

fn separation(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    const INSTANCES: usize = 10;
    let mut c = Checks::new();
    let mut rng = cfg.rng(8);
    for n in cfg.sizes(3, 5) {
        let l = LieAlgebra::upper_triangular(n)?;
        let checker = TpChecker::new(&l);
        let mut form1 = std::collections::BTreeSet::new();
        let mut form2 = std::collections::BTreeSet::new();
        for k in 0..2 * INSTANCES {
            let b = if k < INSTANCES { Rational::zero() } else { rational::int(rng.random_range(1..=3)) };
            let p = catalog(&CatalogEntry::TnPattern { n, a: random_poisson_matrix(n, &mut rng), b: b.clone() })?;
            if !checker.is_tp(&p)? {
                return Err(Error::Inconsistency(format!("generated structure on T_{n} is not transposed Poisson")));
            }
            let pairs = invariant_signature_with(&checker, &p)?.delta_pairs;
            if b.is_zero() { &mut form1 } else { &mut form2 }.insert(pairs);
        }
        let fmt = |s: &std::collections::BTreeSet<Option<usize>>| {
            s.iter().map(|v| v.map_or("-".into(), |x| x.to_string())).collect::<Vec<_>>().join(",")
        };
        c.check(
            form1.is_disjoint(&form2),
            format!("T_{n}: <δ>-pair counts {{{}}} (Poisson type) vs {{{}}} (form (2))", fmt(&form1), fmt(&form2)),
        );
    }
    let seps = classify::t2_separation(&rational::one())?;
    let mut cross = 0;
    let mut cross_separated = 0;
    let mut all_separated = 0;
    for s in &seps {
        let separated = matches!(s.separation, classify::Separation::Signature);
        all_separated += usize::from(separated);
        let (g1, g2) = (
            T2Structure::from_name(s.left).map(T2Structure::group),
            T2Structure::from_name(s.right).map(T2Structure::group),
        );
        if g1 != g2 {
            cross += 1;
            cross_separated += usize::from(separated);
        }
    }
    c.check(
        cross_separated == cross,
        format!("T_2: {cross_separated}/{cross} cross-group pairs separated by signature"),
    );
    c.note(format!("T_2: {all_separated}/{} pairs separated by signature overall", seps.len()));
    Ok(c.finish(8))
}

fn trace_identity(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    const PAIRS: usize = 20;
    let mut c = Checks::new();
    let mut rng = cfg.rng(9);
    for n in cfg.sizes(2, 3) {
        let l = LieAlgebra::full_matrix(n)?;
        let p = catalog(&CatalogEntry::MnTrace { n, c: rational::one() })?;
        let delta = l.identity_element().expect("M_n has δ");
        let mut good = 0;
        for _ in 0..PAIRS {
            let x: Vec<Rational> = (0..l.dim()).map(|_| rational::int(rng.random_range(-3..=3))).collect();
            let y: Vec<Rational> = (0..l.dim()).map(|_| rational::int(rng.random_range(-3..=3))).collect();
            let t = l.to_matrix(&x)?.trace() * l.to_matrix(&y)?.trace();
            let expected: Vec<Rational> = delta.iter().map(|d| d * &t).collect();
            good += usize::from(p.mul(&x, &y)? == expected);
        }
        c.check(good == PAIRS, format!("M_{n}: {good}/{PAIRS} pairs satisfy a·b = tr(a)tr(b)δ"));
    }
    Ok(c.finish(9))
}

fn orthogonality(cfg: &ReproduceConfig) -> Result<CriterionReport> {
    const STRUCTURES: usize = 20;
    let mut c = Checks::new();
    let mut rng = cfg.rng(10);
    let sizes = cfg.sizes(3, 5);
    if sizes.is_empty() {
        c.note("no sizes n = 3..5 within n_max".into());
    }
    for n in sizes {
        let l = LieAlgebra::upper_triangular(n)?;
        let checker = TpChecker::new(&l);
        let base = catalog(&CatalogEntry::TnForm2 { n })?;
        let mut good = 0;
        for _ in 0..STRUCTURES {
            let p =
                catalog(&CatalogEntry::TnPattern { n, a: random_poisson_matrix(n, &mut rng), b: Rational::zero() })?;
            let ok = checker.is_tp(&p)?
                && checker.is_poisson_type(&p)?
                && are_orthogonal(&base, &p)?
                && checker.is_tp(&orthogonal_sum(&base, &p)?)?;
            good += usize::from(ok);
        }
        c.check(
            good == STRUCTURES,
            format!("T_{n}: {good}/{STRUCTURES} Poisson-type structures orthogonal to form (2), sums TP"),
        );
    }
    Ok(c.finish(10))
}
