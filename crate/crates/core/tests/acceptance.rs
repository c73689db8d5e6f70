//! Acceptance suite: one test per criterion, each printing a pass line.
//! All tolerances are pinned here; the classification predicates are
//! exact rational comparisons with no tolerance at all.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lca_wold::classify::{
    is_h_regular, is_h_singular, is_periodic, orthogonality_test, wold_decompose,
};
use lca_wold::group::{
    all_subgroups, annihilator, canonical_transversal, Elem, FiniteAbelianGroup, Subgroup,
};
use lca_wold::lp::{
    intersection_dimension, norm_bound_check, poly_space_basis, project_closed_form,
    project_oracle, random_function, v_apply, v_inverse, weighted_inner, FunctionOnAtoms,
};
use lca_wold::measure::{integral_identity_check, integral_identity_evaluate, AtomicMeasure, DerivedBundle, RhoBundle};
use lca_wold::testkit::{
    distinct_transversals, dual_coset_reps, random_instance, random_polynomial, RandomInstance,
};

fn pass(criterion: &str) {
    println!("ACCEPTANCE {criterion}: PASS");
}

/// Criterion 1: Wold suite over 200 seeded random instances.
#[test]
fn criterion_1_wold_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..200 {
        let inst = random_instance(&mut rng);
        let RandomInstance { group, lambda, mu, transversal, .. } = &inst;
        let wold = wold_decompose(group, mu, lambda, transversal).unwrap();

        assert_eq!(wold.mu_rho.add(&wold.mu_sigma), *mu, "case {case}: sum");
        assert!(
            is_h_regular(group, &wold.mu_rho, lambda, transversal).unwrap().0,
            "case {case}: mu_rho regular"
        );
        assert!(
            is_h_singular(group, &wold.mu_sigma, lambda).unwrap().is_singular(),
            "case {case}: mu_sigma singular"
        );
        assert!(wold.b_rho.is_disjoint(&wold.b_sigma), "case {case}: disjoint");
        for set in [&wold.b_rho, &wold.b_sigma] {
            for gamma in set {
                for l in lambda.elements() {
                    assert!(
                        set.contains(&group.add(gamma, l).unwrap()),
                        "case {case}: saturation"
                    );
                }
            }
        }
        for t in distinct_transversals(group, lambda, &mut rng, 3) {
            assert_eq!(
                wold_decompose(group, mu, lambda, &t).unwrap(),
                wold,
                "case {case}: transversal independence"
            );
        }
    }
    pass("1 (Wold suite, 200 instances, exact)");
}

/// The exhaustive family of criteria 2-4: unit-weight supports of size
/// 1..=5 in Z(6) and Z(2)xZ(4), against every subgroup H.
fn exhaustive_family() -> Vec<(FiniteAbelianGroup, Subgroup, Subgroup, AtomicMeasure)> {
    let mut out = Vec::new();
    for moduli in [vec![6], vec![2, 4]] {
        let group = FiniteAbelianGroup::new(moduli).unwrap();
        let elems = group.elements();
        let n = elems.len();
        let subgroups = all_subgroups(&group);
        for mask in 1u32..(1 << n) {
            if mask.count_ones() > 5 {
                continue;
            }
            let atoms: Vec<(Elem, BigRational)> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| (elems[i].clone(), BigRational::one()))
                .collect();
            let mu = AtomicMeasure::from_pairs(&group, atoms).unwrap();
            for h in &subgroups {
                let lambda = annihilator(&group, h).unwrap();
                out.push((group.clone(), h.clone(), lambda, mu.clone()));
            }
        }
    }
    out
}

/// Criterion 2: support-disjointness singularity agrees with full rank of
/// every coset polynomial basis.
#[test]
fn criterion_2_singular_criterion_matches_definition() {
    for (group, h, lambda, mu) in exhaustive_family() {
        let singular = is_h_singular(&group, &mu, &lambda).unwrap().is_singular();
        let full_rank = dual_coset_reps(&group, &h).iter().all(|x| {
            poly_space_basis(&group, &h, x, &mu).unwrap().rank() == mu.num_atoms()
        });
        assert_eq!(singular, full_rank, "mu = {:?}, H = {:?}", mu, h.elements());
    }
    pass("2 (support-disjointness singularity <-> full-rank definition, exhaustive)");
}

/// Criterion 3: h < 1 everywhere agrees with trivial span intersection.
#[test]
fn criterion_3_regular_criterion_matches_definition() {
    for (group, h, lambda, mu) in exhaustive_family() {
        let t = canonical_transversal(&group, &lambda);
        let regular = is_h_regular(&group, &mu, &lambda, &t).unwrap().0;
        let bases: Vec<_> = dual_coset_reps(&group, &h)
            .iter()
            .map(|x| poly_space_basis(&group, &h, x, &mu).unwrap())
            .collect();
        let dim = intersection_dimension(&bases, &mu).unwrap();
        assert_eq!(regular, dim == 0, "mu = {:?}, H = {:?}", mu, h.elements());
    }
    pass("3 (h < 1 regularity <-> trivial-intersection definition, exhaustive)");
}

fn cross_gram_vanishes(
    group: &FiniteAbelianGroup,
    h: &Subgroup,
    mu: &AtomicMeasure,
) -> bool {
    let reps = dual_coset_reps(group, h);
    let bases: Vec<_> = reps
        .iter()
        .map(|x| poly_space_basis(group, h, x, mu).unwrap())
        .collect();
    for (i, b1) in bases.iter().enumerate() {
        for b2 in bases.iter().skip(i + 1) {
            for u in b1.vectors() {
                for v in b2.vectors() {
                    if weighted_inner(u, v).unwrap().norm() > 1e-10 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Criterion 4: the h = 1/n criterion agrees with vanishing cross-Gram
/// blocks and with periodicity, exhaustively and on random instances.
#[test]
fn criterion_4_orthogonality_equivalence() {
    for (group, h, lambda, mu) in exhaustive_family() {
        let t = canonical_transversal(&group, &lambda);
        let orth = orthogonality_test(&group, &mu, &lambda, &t).unwrap().0;
        assert_eq!(orth, cross_gram_vanishes(&group, &h, &mu));
        assert_eq!(orth, is_periodic(&group, &mu, &lambda, &t).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        let inst = random_instance(&mut rng);
        let orth =
            orthogonality_test(&inst.group, &inst.mu, &inst.lambda, &inst.transversal).unwrap().0;
        assert_eq!(
            orth,
            cross_gram_vanishes(&inst.group, &inst.h, &inst.mu),
            "case {case}"
        );
        assert_eq!(
            orth,
            is_periodic(&inst.group, &inst.mu, &inst.lambda, &inst.transversal).unwrap(),
            "case {case}"
        );
    }
    pass("4 (h = 1/n <-> cross-Gram <-> periodicity)");
}

/// Criterion 5: closed-form projection vs the normal-equations oracle,
/// idempotence, self-adjointness, and span fixed points.
#[test]
fn criterion_5_projection_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let inst = random_instance(&mut rng);
        let RandomInstance { group, h, lambda, mu, .. } = &inst;
        let xs = dual_coset_reps(group, h);
        let x = xs[case % xs.len()].clone();

        let f = random_function(mu, &mut rng);
        let pf = project_closed_form(group, mu, lambda, &x, &f).unwrap();
        let basis = poly_space_basis(group, h, &x, mu).unwrap();
        let qf = project_oracle(&basis, &f).unwrap();
        assert!(pf.sup_distance(&qf) <= 1e-9, "case {case}: oracle agreement");

        let ppf = project_closed_form(group, mu, lambda, &x, &pf).unwrap();
        assert!(ppf.sup_distance(&pf) <= 1e-10, "case {case}: idempotence");

        let g2 = random_function(mu, &mut rng);
        let pg = project_closed_form(group, mu, lambda, &x, &g2).unwrap();
        let lhs = weighted_inner(&pf, &g2).unwrap();
        let rhs = weighted_inner(&f, &pg).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10, "case {case}: self-adjointness");

        // random element of the span stays fixed
        let coeffs: Vec<Complex64> = basis
            .vectors()
            .iter()
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        let values: BTreeMap<Elem, Complex64> = mu
            .support()
            .map(|a| {
                let v = basis
                    .vectors()
                    .iter()
                    .zip(&coeffs)
                    .map(|(b, c)| c * b.value(a))
                    .sum();
                (a.clone(), v)
            })
            .collect();
        let span = FunctionOnAtoms::new(mu.clone(), values).unwrap();
        let pspan = project_closed_form(group, mu, lambda, &x, &span).unwrap();
        assert!(pspan.sup_distance(&span) <= 1e-10, "case {case}: fixed point");
    }
    pass("5 (projection equivalence, 100 instances)");
}

/// Criterion 6: the transversal isometry at several exponents, the
/// polynomial fixed-point law, and exact inversion.
#[test]
fn criterion_6_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..100 {
        let inst = random_instance(&mut rng);
        let RandomInstance { group, h, lambda, mu, transversal } = &inst;
        let bundle = DerivedBundle::derive(group, mu, lambda, transversal).unwrap();
        let xs = dual_coset_reps(group, h);
        let x = xs[case % xs.len()].clone();

        let phi = random_function(bundle.nu(), &mut rng);
        let vphi = v_apply(group, &bundle, &x, &phi).unwrap();
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            let a: f64 = mu
                .atoms()
                .iter()
                .map(|(p, w)| {
                    vphi.value(p).norm().powf(alpha)
                        * num_traits::ToPrimitive::to_f64(w).unwrap()
                })
                .sum();
            let b: f64 = bundle
                .nu()
                .atoms()
                .iter()
                .map(|(p, w)| {
                    phi.value(p).norm().powf(alpha)
                        * num_traits::ToPrimitive::to_f64(w).unwrap()
                })
                .sum();
            assert!(
                (a - b).abs() <= 1e-9 * (1.0 + b.abs()),
                "case {case}: isometry at alpha {alpha}"
            );
        }

        let poly = random_polynomial(group, h, &x, &mut rng).unwrap();
        let poly_on_t = FunctionOnAtoms::from_fn(bundle.nu().clone(), |gamma| poly[gamma]);
        let fixed = v_apply(group, &bundle, &x, &poly_on_t).unwrap();
        let restricted = FunctionOnAtoms::from_fn(mu.clone(), |gamma| poly[gamma]);
        assert!(fixed.sup_distance(&restricted) <= 1e-10, "case {case}: polynomial fixed point");

        let back = v_inverse(group, &bundle, &x, &vphi).unwrap();
        assert_eq!(
            back.values().keys().collect::<Vec<_>>(),
            phi.values().keys().collect::<Vec<_>>(),
            "case {case}: inverse atom set"
        );
        assert!(back.sup_distance(&phi) <= 1e-12, "case {case}: inverse values");
    }
    pass("6 (transversal isometry and inversion)");
}

/// Criterion 7: the transversal integral identity at every κ ∈ Λ.
#[test]
fn criterion_7_integral_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..100 {
        let inst = random_instance(&mut rng);
        let rho = RhoBundle::new(&inst.group, &inst.mu, &inst.lambda).unwrap();
        let f: BTreeMap<Elem, Complex64> = rho
            .rho()
            .support()
            .map(|a| {
                (a.clone(), Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            })
            .collect();
        for kappa in inst.lambda.elements() {
            let (lhs, rhs) =
                integral_identity_evaluate(&inst.group, &inst.mu, &inst.lambda, &inst.transversal, &f, kappa)
                    .unwrap();
            assert!(integral_identity_check(lhs, rhs), "case {case}: kappa {kappa}");
        }
    }
    pass("7 (integral identity, 100 instances, every kappa)");
}

/// Criterion 8: the projection never expands the L^1 or L^2 norm.
#[test]
fn criterion_8_boundedness() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..20 {
        let inst = random_instance(&mut rng);
        let xs = dual_coset_reps(&inst.group, &inst.h);
        let x = xs[case % xs.len()].clone();
        for alpha in [1.0, 2.0] {
            let ratio = norm_bound_check(
                &inst.group,
                &inst.mu,
                &inst.lambda,
                &x,
                alpha,
                200,
                0xB0DE + case as u64,
            )
            .unwrap();
            assert!(ratio <= 1.0 + 1e-9, "case {case}: alpha {alpha} ratio {ratio}");
        }
    }
    pass("8 (projection boundedness at alpha 1, 2)");
}

/// Criterion 9: the density row sums and periodization normalizations, exactly.
#[test]
fn criterion_9_exact_normalizations() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let one = BigRational::one();
    for case in 0..200 {
        let inst = random_instance(&mut rng);
        let bundle =
            DerivedBundle::derive(&inst.group, &inst.mu, &inst.lambda, &inst.transversal).unwrap();
        for gamma in bundle.nu().support() {
            let total: BigRational =
                inst.lambda.elements().iter().map(|l| bundle.h(l, gamma)).sum();
            assert_eq!(total, one, "case {case}: h row sum at {gamma}");
            assert!(inst.transversal.contains(gamma), "case {case}: supp nu in T");
        }
        assert_eq!(bundle.nu().total_mass(), inst.mu.total_mass(), "case {case}: nu mass");

        let rho = RhoBundle::new(&inst.group, &inst.mu, &inst.lambda).unwrap();
        assert_eq!(
            rho.rho().total_mass(),
            inst.mu.total_mass()
                * BigRational::from_integer(BigInt::from(inst.lambda.len() as i64)),
            "case {case}: rho mass"
        );
        for gamma in rho.rho().support() {
            let total: BigRational = inst
                .lambda
                .elements()
                .iter()
                .map(|l| rho.g(&inst.group.add(gamma, l).unwrap()))
                .sum();
            assert_eq!(total, one, "case {case}: g row at {gamma}");
            for l in inst.lambda.elements() {
                assert_eq!(
                    rho.rho().weight(gamma),
                    rho.rho().weight(&inst.group.add(gamma, l).unwrap()),
                    "case {case}: rho periodicity"
                );
            }
        }
    }
    pass("9 (density row sums and periodization normalizations, exact)");
}

/// Criterion 10: the three worked documents drive the CLI end to end.
/// (The per-field assertions live in tests/cli.rs; this re-runs them as
/// one gate.)
#[test]
fn criterion_10_cli_worked_examples() {
    use std::io::Write;
    use std::process::{Command, Stdio};

    let run = |args: &[&str], stdin: &str| -> (i32, serde_json::Value) {
        let mut child = Command::new(env!("CARGO_BIN_EXE_lca-wold"))
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        child.stdin.as_mut().unwrap().write_all(stdin.as_bytes()).unwrap();
        let out = child.wait_with_output().unwrap();
        (
            out.status.code().unwrap_or(-1),
            serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null),
        )
    };
    let doc = |atoms: &[u64]| -> String {
        let atoms: Vec<serde_json::Value> = atoms
            .iter()
            .map(|p| serde_json::json!({"point": [p], "weight": "1"}))
            .collect();
        serde_json::json!({
            "group": {"moduli": [4]},
            "subgroup_H": {"generators": [[2]]},
            "measure": {"atoms": atoms},
        })
        .to_string()
    };

    let (code, v) = run(&["classify"], &doc(&[0]));
    assert_eq!(code, 0);
    assert_eq!(v["regular"], serde_json::json!(false));
    assert_eq!(v["singular"], serde_json::json!(true));
    assert_eq!(v["singular_witness"], serde_json::json!([[0]]));

    let (code, v) = run(&["decompose"], &doc(&[0, 1, 3]));
    assert_eq!(code, 0);
    assert_eq!(v["mu_sigma"]["atoms"], serde_json::json!([{"point": [0], "weight": "1"}]));
    assert_eq!(
        v["mu_rho"]["atoms"],
        serde_json::json!([{"point": [1], "weight": "1"}, {"point": [3], "weight": "1"}])
    );

    let (code, v) = run(&["h-table"], &doc(&[0, 1, 2, 3]));
    assert_eq!(code, 0);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert!(entries.iter().all(|e| e["h"] == serde_json::json!("1/2")));

    pass("10 (CLI worked documents)");
}
