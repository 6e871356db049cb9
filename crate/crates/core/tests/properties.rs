use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tpa_core::automorphism::{random_automorphism, transport};
use tpa_core::classify::{
    associativity_constraints, invariant_signature, normalize_tn, sample_solutions, satisfies, tp_ansatz,
};
use tpa_core::half_deriv::{is_delta_derivation, DerivationSpace, DerivationWeight, LinearMap};
use tpa_core::linalg::{span_equal, ExactMatrix};
use tpa_core::product::{
    check_associative, check_transposed_leibniz, extension_by_zero, is_poisson_type, restrict_to_complement,
    BilinearProduct, CatalogEntry, T2Structure, TpChecker,
};
use tpa_core::rational::{self, Rational};
use tpa_core::reproduce::random_poisson_matrix;
use tpa_core::LieAlgebra;

fn small() -> impl Strategy<Value = Rational> {
    (-3i64..=3).prop_map(rational::int)
}

fn small_frac() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| rational::frac(p, q))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ExactMatrix> {
    prop::collection::vec(small_frac(), rows * cols).prop_map(move |v| ExactMatrix::from_vec(rows, cols, v).unwrap())
}

fn algebra(k: usize) -> LieAlgebra {
    match k {
        0 => LieAlgebra::upper_triangular(2),
        1 => LieAlgebra::upper_triangular(3),
        2 => LieAlgebra::full_matrix(2),
        _ => LieAlgebra::special_linear(2),
    }
    .unwrap()
}

fn random_product(dim: usize, entries: &[Rational]) -> BilinearProduct {
    let mut p = BilinearProduct::zero(dim);
    let mut it = entries.iter().cycle();
    for i in 0..dim {
        for j in i..dim {
            let v: Vec<Rational> = (0..dim).map(|_| it.next().unwrap().clone()).collect();
            p.set(i, j, &v).unwrap();
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let kernel = m.nullspace_basis();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(rational::is_zero_vec(&m.mul_vec(v).unwrap()));
        }
    }

    #[test]
    fn inverse_is_two_sided(m in (1usize..5).prop_flat_map(|n| matrix(n, n))) {
        match m.inverse() {
            Ok(inv) => {
                let id = ExactMatrix::identity(m.rows());
                prop_assert_eq!(m.mul(&inv).unwrap(), id.clone());
                prop_assert_eq!(inv.mul(&m).unwrap(), id);
            }
            Err(_) => prop_assert!(m.rank() < m.rows()),
        }
    }

    #[test]
    fn span_equal_ignores_recombination(m in matrix(3, 4), s in small_frac()) {
        let rows: Vec<Vec<Rational>> = (0..3).map(|r| m.row(r).to_vec()).collect();
        let mut mixed = rows.clone();
        mixed[0] = mixed[0].iter().zip(&rows[1]).map(|(a, b)| a + &s * b).collect();
        mixed.reverse();
        prop_assert!(span_equal(&rows, &mixed).unwrap());
    }

    #[test]
    fn rational_text_round_trip(p in any::<i64>(), q in 1i64..1_000_000) {
        let r = rational::frac(p, q);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }

    /// Every element of the computed space satisfies the defining identity,
    /// and perturbing one entry outside the space breaks it.
    #[test]
    fn derivation_space_matches_direct_check(
        k in 0usize..4,
        coeffs in prop::collection::vec(small(), 8),
        w in prop::sample::select(vec![rational::frac(1, 2), rational::one(), rational::int(2)]),
        pos in any::<prop::sample::Index>(),
    ) {
        let l = algebra(k);
        let w = DerivationWeight(w);
        let space = DerivationSpace::compute(&l, &w);
        let mut phi = LinearMap::zero(l.dim());
        for (b, c) in space.basis().iter().zip(&coeffs) {
            phi = phi.add(&b.scale(c)).unwrap();
        }
        prop_assert!(is_delta_derivation(&l, &phi, &w).unwrap());
        prop_assert!(space.contains(&phi).unwrap());
        let mut v = phi.to_vector();
        let i = pos.index(v.len());
        v[i] += rational::one();
        let psi = LinearMap::from_vector(l.dim(), &v).unwrap();
        prop_assert_eq!(is_delta_derivation(&l, &psi, &w).unwrap(), space.contains(&psi).unwrap());
    }

    /// Weight 1 recovers ordinary derivations, so every `ad_x` belongs.
    #[test]
    fn inner_derivations_have_weight_one(k in 0usize..4, x in prop::collection::vec(small(), 9)) {
        let l = algebra(k);
        let ad = LinearMap::new(l.ad(&x[..l.dim()]).unwrap()).unwrap();
        let w = DerivationWeight(rational::one());
        prop_assert!(is_delta_derivation(&l, &ad, &w).unwrap());
        prop_assert!(DerivationSpace::compute(&l, &w).contains(&ad).unwrap());
    }

    /// The direct transposed Leibniz check agrees with membership of every
    /// multiplication operator in the ½-derivation space.
    #[test]
    fn leibniz_matches_operator_membership(
        k in 0usize..2,
        entries in prop::collection::vec(small(), 1..12),
        ansatz in prop::collection::vec(small(), 16),
        use_ansatz in any::<bool>(),
    ) {
        let l = algebra(k);
        let p = if use_ansatz {
            let fam = tp_ansatz(&l).unwrap();
            fam.instantiate(&ansatz[..fam.param_count()]).unwrap()
        } else {
            random_product(l.dim(), &entries)
        };
        let checker = TpChecker::new(&l);
        prop_assert_eq!(
            check_transposed_leibniz(&l, &p).unwrap().is_ok(),
            checker.leibniz_via_derivations(&p).unwrap()
        );
    }

    #[test]
    fn ansatz_members_satisfy_leibniz(k in 0usize..3, values in prop::collection::vec(small_frac(), 16)) {
        let l = algebra(k);
        let fam = tp_ansatz(&l).unwrap();
        let p = fam.instantiate(&values[..fam.param_count()]).unwrap();
        prop_assert!(check_transposed_leibniz(&l, &p).unwrap().is_ok());
        prop_assert!(TpChecker::new(&l).leibniz_via_derivations(&p).unwrap());
    }

    #[test]
    fn extension_by_zero_round_trip(n in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = LieAlgebra::upper_triangular(n).unwrap();
        let a = random_poisson_matrix(n, &mut rng);
        let p = CatalogEntry::TnPattern { n, a, b: rational::zero() }.build().unwrap();
        prop_assert!(is_poisson_type(&l, &p).unwrap());
        let star = restrict_to_complement(&l, &p).unwrap();
        let q = extension_by_zero(&l, &star).unwrap();
        prop_assert!(is_poisson_type(&l, &q).unwrap());
        prop_assert_eq!(q, p);
    }

    #[test]
    fn transport_preserves_structure(entry in 0usize..13, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = if entry < 9 {
            let s = T2Structure::ALL[entry];
            CatalogEntry::T2 { structure: s, c: s.needs_c().then(|| rational::int(2)) }
        } else if entry < 11 {
            CatalogEntry::TnForm2 { n: entry - 6 }
        } else {
            CatalogEntry::MnTrace { n: entry - 9, c: rational::frac(-1, 2) }
        };
        let l = e.algebra().unwrap();
        let p = e.build().unwrap();
        let g = random_automorphism(&l, &mut rng).unwrap();
        let q = transport(&l, &p, &g).unwrap();
        prop_assert!(TpChecker::new(&l).is_tp(&q).unwrap());
        prop_assert_eq!(invariant_signature(&l, &p).unwrap(), invariant_signature(&l, &q).unwrap());
        let back = transport(&l, &q, &g.inverted()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn normalization_is_idempotent(n in 3usize..6, b in small_frac(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = LieAlgebra::upper_triangular(n).unwrap();
        let a = random_poisson_matrix(n, &mut rng);
        let p = CatalogEntry::TnPattern { n, a, b }.build().unwrap();
        let once = normalize_tn(&l, &p).unwrap();
        let twice = normalize_tn(&l, &once.canonical).unwrap();
        prop_assert_eq!(&twice.canonical, &once.canonical);
        prop_assert_eq!(twice.tag, once.tag);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(240))]

    /// Constraint satisfaction and direct associativity agree on arbitrary
    /// parameter values for `T_2`, `T_3` and `M_2`
    /// (about 80 cases each).
    #[test]
    fn associativity_constraints_are_sound(k in 0usize..3, values in prop::collection::vec(small(), 16)) {
        let l = algebra(k);
        let fam = tp_ansatz(&l).unwrap();
        let constraints = associativity_constraints(&fam);
        let values = &values[..fam.param_count()];
        let p = fam.instantiate(values).unwrap();
        prop_assert_eq!(satisfies(&constraints, values), check_associative(&p).is_ok());
    }
}

/// The positive side of soundness: sampled solutions satisfy the constraints
/// and are associative, for at least 50 assignments where available.
#[test]
fn sampled_solutions_are_associative() {
    for k in 0..3 {
        let l = algebra(k);
        let fam = tp_ansatz(&l).unwrap();
        let constraints = associativity_constraints(&fam);
        let samples = sample_solutions(&fam, &constraints, 11, 50).unwrap();
        assert!(samples.len() >= if k == 2 { 7 } else { 50 }, "only {} samples", samples.len());
        for s in &samples {
            assert!(satisfies(&constraints, &s.values));
            assert!(check_associative(&s.product).is_ok());
        }
    }
}
