//! Seeded random problem instances and the self-check suite run by the
//! CLI `selftest` subcommand. Every check here is also exercised, with
//! pinned parameters, by the acceptance test suite.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{is_h_regular, is_h_singular, is_periodic, orthogonality_test, wold_decompose};
use crate::error::Result;
use crate::group::{
    annihilator, canonical_transversal, coset_partition, Elem, FiniteAbelianGroup, Subgroup,
    Transversal,
};
use crate::lp::{
    lp_norm, poly_space_basis, project_closed_form, project_oracle, random_function, v_apply,
    v_inverse, weighted_inner, FunctionOnAtoms,
};
use crate::measure::{integral_identity_check, integral_identity_evaluate, AtomicMeasure, DerivedBundle, RhoBundle};

/// A random (Γ, H, Λ, μ, T) problem at desk scale.
pub struct RandomInstance {
    pub group: FiniteAbelianGroup,
    pub h: Subgroup,
    pub lambda: Subgroup,
    pub mu: AtomicMeasure,
    pub transversal: Transversal,
}

/// Groups of order ≤ 48 with moduli drawn from {2,3,4,6,8}, a random
/// subgroup H of the dual, and a nonzero random rational measure with at
/// most 12 atoms (numerators and denominators ≤ 20).
pub fn random_instance(rng: &mut ChaCha8Rng) -> RandomInstance {
    let pool = [2u64, 3, 4, 6, 8];
    let group = loop {
        let len = rng.gen_range(1..=3);
        let moduli: Vec<u64> = (0..len).map(|_| *pool.choose(rng).unwrap()).collect();
        if moduli.iter().product::<u64>() <= 48 {
            break FiniteAbelianGroup::new(moduli).expect("valid moduli");
        }
    };
    let elems = group.elements();

    let num_gens = rng.gen_range(0..=2);
    let gens: Vec<Elem> = (0..num_gens)
        .map(|_| elems.choose(rng).unwrap().clone())
        .collect();
    let h = Subgroup::generate(&group, &gens).expect("elements are in the group");
    let lambda = annihilator(&group, &h).expect("h is a subgroup");

    let mut points = elems.clone();
    points.shuffle(rng);
    let num_atoms = rng.gen_range(1..=12.min(points.len()));
    let mu = AtomicMeasure::from_pairs(
        &group,
        points.into_iter().take(num_atoms).map(|p| {
            let w = BigRational::new(
                BigInt::from(rng.gen_range(1..=20)),
                BigInt::from(rng.gen_range(1..=20)),
            );
            (p, w)
        }),
    )
    .expect("positive weights");

    let transversal = random_transversal(&group, &lambda, rng);
    RandomInstance { group, h, lambda, mu, transversal }
}

/// A uniformly random transversal: one representative per Λ-coset.
pub fn random_transversal(
    group: &FiniteAbelianGroup,
    lambda: &Subgroup,
    rng: &mut ChaCha8Rng,
) -> Transversal {
    let reps: Vec<Elem> = coset_partition(group, lambda)
        .iter()
        .map(|c| c.choose(rng).unwrap().clone())
        .collect();
    Transversal::new(group, lambda, reps).expect("one representative per coset")
}

/// Up to `count` pairwise distinct transversals (fewer when the group
/// does not admit that many).
pub fn distinct_transversals(
    group: &FiniteAbelianGroup,
    lambda: &Subgroup,
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Vec<Transversal> {
    let num_cosets = group.order() as usize / lambda.len();
    let available = (lambda.len() as u128).saturating_pow(num_cosets as u32);
    let want = count.min(available.min(count as u128) as usize);
    let mut out: Vec<Transversal> = vec![canonical_transversal(group, lambda)];
    let mut guard = 0;
    while out.len() < want && guard < 500 {
        guard += 1;
        let t = random_transversal(group, lambda, rng);
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// One representative per H-coset of the dual group G (the enumeration
/// of G̃ used for span intersections and cross-Gram checks).
pub fn dual_coset_reps(group: &FiniteAbelianGroup, h: &Subgroup) -> Vec<Elem> {
    canonical_transversal(group, h).reps().to_vec()
}

/// Report of a selftest run.
pub struct SuiteReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn check(&mut self, ok: bool, label: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(label());
        }
    }
}

/// Runs the full invariant battery on `trials` seeded random instances
/// plus the built-in Z(4) worked cases.
pub fn run_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport { checks: 0, failures: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for case in 0..trials {
        let inst = random_instance(&mut rng);
        check_instance(&inst, &mut rng, case, &mut report)?;
    }

    // built-in Z(4) cases from the worked examples
    let group = FiniteAbelianGroup::new(vec![4])?;
    let h = Subgroup::generate(&group, &[Elem(vec![2])])?;
    let lambda = annihilator(&group, &h)?;
    let transversal = canonical_transversal(&group, &lambda);
    let one = BigRational::one();
    for (name, atoms) in [
        ("dirac", vec![Elem(vec![0])]),
        ("uniform", group.elements()),
        ("mixed", vec![Elem(vec![0]), Elem(vec![1]), Elem(vec![3])]),
    ] {
        let mu = AtomicMeasure::from_pairs(&group, atoms.into_iter().map(|a| (a, one.clone())))?;
        let inst = RandomInstance {
            group: group.clone(),
            h: h.clone(),
            lambda: lambda.clone(),
            mu,
            transversal: transversal.clone(),
        };
        check_instance(&inst, &mut rng, usize::MAX, &mut report)?;
        let _ = name;
    }
    Ok(report)
}

fn check_instance(
    inst: &RandomInstance,
    rng: &mut ChaCha8Rng,
    case: usize,
    report: &mut SuiteReport,
) -> Result<()> {
    let RandomInstance { group, h, lambda, mu, transversal } = inst;
    let bundle = DerivedBundle::derive(group, mu, lambda, transversal)?;
    let rho = RhoBundle::new(group, mu, lambda)?;
    let one = BigRational::one();

    // normalizations, all exact
    for gamma in bundle.nu().support() {
        let total: BigRational = lambda.elements().iter().map(|l| bundle.h(l, gamma)).sum();
        report.check(total == one, || format!("case {case}: h rows do not sum to 1 at {gamma}"));
    }
    report.check(bundle.nu().total_mass() == mu.total_mass(), || {
        format!("case {case}: nu mass differs from mu mass")
    });
    report.check(
        rho.rho().total_mass() == mu.total_mass() * BigRational::from_integer(BigInt::from(lambda.len() as i64)),
        || format!("case {case}: rho mass is not |lambda| * mu mass"),
    );
    report.check(
        bundle.nu().support().all(|g| transversal.contains(g)),
        || format!("case {case}: supp nu escapes the transversal"),
    );
    for g in rho.rho().support() {
        let total: BigRational = lambda
            .elements()
            .iter()
            .map(|l| rho.g(&group.add(g, l).expect("shapes agree")))
            .sum();
        report.check(total == one, || format!("case {case}: g translates do not sum to 1 at {g}"));
    }

    // Wold decomposition and transversal independence
    let wold = wold_decompose(group, mu, lambda, transversal)?;
    report.check(wold.mu_rho.add(&wold.mu_sigma) == *mu, || {
        format!("case {case}: wold parts do not sum to mu")
    });
    report.check(
        is_h_regular(group, &wold.mu_rho, lambda, transversal)?.0,
        || format!("case {case}: mu_rho is not regular"),
    );
    report.check(
        is_h_singular(group, &wold.mu_sigma, lambda)?.is_singular(),
        || format!("case {case}: mu_sigma is not singular"),
    );
    report.check(wold.b_rho.is_disjoint(&wold.b_sigma), || {
        format!("case {case}: wold sets overlap")
    });
    for t2 in distinct_transversals(group, lambda, rng, 3) {
        let w2 = wold_decompose(group, mu, lambda, &t2)?;
        report.check(w2 == wold, || format!("case {case}: wold depends on the transversal"));
    }

    // dichotomy and the orthogonality/periodicity equivalence
    let regular = is_h_regular(group, mu, lambda, transversal)?.0;
    let singular = is_h_singular(group, mu, lambda)?.is_singular();
    report.check((regular && singular) == mu.is_zero(), || {
        format!("case {case}: dichotomy exhaustion fails")
    });
    let orth = orthogonality_test(group, mu, lambda, transversal)?.0;
    let periodic = is_periodic(group, mu, lambda, transversal)?;
    report.check(orth == periodic, || {
        format!("case {case}: orthogonality and periodicity disagree")
    });

    // isometry onto L^α(ν) and exact inversion
    let phi = random_function(bundle.nu(), rng);
    let xs = dual_coset_reps(group, h);
    let x = xs[case % xs.len().max(1)].clone();
    let vphi = v_apply(group, &bundle, &x, &phi)?;
    for alpha in [0.5, 1.0, 2.0, 3.0] {
        let a = integral_alpha(&vphi, alpha);
        let b = integral_alpha(&phi, alpha);
        report.check((a - b).abs() <= 1e-9 * (1.0 + b.abs()), || {
            format!("case {case}: isometry fails at alpha {alpha}")
        });
    }
    let back = v_inverse(group, &bundle, &x, &vphi)?;
    report.check(back.sup_distance(&phi) <= 1e-12, || {
        format!("case {case}: v_inverse does not invert v_apply")
    });

    // polynomials with frequencies in x+H are fixed by V
    let poly = random_polynomial(group, h, &x, rng)?;
    let poly_on_t = FunctionOnAtoms::from_fn(bundle.nu().clone(), |gamma| poly[gamma]);
    let v = v_apply(group, &bundle, &x, &poly_on_t)?;
    let restricted = FunctionOnAtoms::from_fn(mu.clone(), |gamma| poly[gamma]);
    report.check(v.sup_distance(&restricted) <= 1e-10, || {
        format!("case {case}: V does not fix polynomials")
    });

    // integral identity at every kappa
    let f_table: BTreeMap<Elem, Complex64> = rho
        .rho()
        .support()
        .map(|a| (a.clone(), Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))))
        .collect();
    for kappa in lambda.elements() {
        let (lhs, rhs) = integral_identity_evaluate(group, mu, lambda, transversal, &f_table, kappa)?;
        report.check(integral_identity_check(lhs, rhs), || {
            format!("case {case}: integral identity fails at kappa {kappa}")
        });
    }

    // projection: closed form vs oracle, idempotence, self-adjointness
    let f = random_function(mu, rng);
    let pf = project_closed_form(group, mu, lambda, &x, &f)?;
    let basis = poly_space_basis(group, h, &x, mu)?;
    let qf = project_oracle(&basis, &f)?;
    report.check(pf.sup_distance(&qf) <= 1e-9, || {
        format!("case {case}: closed-form and oracle projections disagree")
    });
    let ppf = project_closed_form(group, mu, lambda, &x, &pf)?;
    report.check(ppf.sup_distance(&pf) <= 1e-10, || {
        format!("case {case}: projection is not idempotent")
    });
    let g2 = random_function(mu, rng);
    let pg = project_closed_form(group, mu, lambda, &x, &g2)?;
    let lhs = weighted_inner(&pf, &g2)?;
    let rhs = weighted_inner(&f, &pg)?;
    report.check((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()), || {
        format!("case {case}: projection is not self-adjoint")
    });
    for alpha in [1.0, 2.0] {
        let nf = lp_norm(&f, alpha)?;
        if nf > 0.0 {
            report.check(lp_norm(&pf, alpha)? / nf <= 1.0 + 1e-9, || {
                format!("case {case}: projection expands the L^{alpha} norm")
            });
        }
    }
    Ok(())
}

/// ∫ |f|^α dμ as a plain sum (no root), for isometry comparisons.
fn integral_alpha(f: &FunctionOnAtoms, alpha: f64) -> f64 {
    f.base()
        .atoms()
        .iter()
        .map(|(a, w)| f.value(a).norm().powf(alpha) * w.to_f64().unwrap_or(0.0))
        .sum()
}

/// Random trigonometric polynomial with frequencies in x + H, tabulated
/// on the whole group.
pub fn random_polynomial(
    group: &FiniteAbelianGroup,
    h: &Subgroup,
    x: &Elem,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<Elem, Complex64>> {
    let coeffs: Vec<(Elem, Complex64)> = h
        .elements()
        .iter()
        .map(|y| {
            let freq = group.add(x, y).expect("shapes agree");
            (freq, Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        })
        .collect();
    let mut table = BTreeMap::new();
    for gamma in group.elements() {
        let v = coeffs
            .iter()
            .map(|(freq, a)| a * group.character_pair(&gamma, freq).expect("shapes agree"))
            .sum();
        table.insert(gamma, v);
    }
    Ok(table)
}
