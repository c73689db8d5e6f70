//! Classification of atomic measures relative to a subgroup Λ: the
//! support-disjointness test for H-singularity, the h_λ < 1 test for
//! H-regularity, the Wold-type decomposition into regular and singular
//! parts on complementary Λ-saturated sets, the h_λ = 1/n orthogonality
//! criterion, and Λ-periodicity.
//!
//! All predicates compare exact rationals; no tolerances appear here.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteAbelianGroup, Subgroup, Transversal};
use crate::measure::{AtomicMeasure, DerivedBundle};

/// Outcome of the H-singularity test. A singular measure carries its
/// support as the witness set; a non-singular one carries the
/// lexicographically first pair (γ, λ) with both γ and γ+λ in the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Singularity {
    Singular { witness: BTreeSet<Elem> },
    NotSingular { gamma: Elem, lambda: Elem },
}

impl Singularity {
    pub fn is_singular(&self) -> bool {
        matches!(self, Singularity::Singular { .. })
    }
}

/// H-singularity: for an atomic measure the support itself is the minimal
/// candidate set B, so μ is H-singular iff S ∩ (λ+S) = ∅ for all
/// λ ∈ Λ∖{0}, S = supp μ. The zero measure is vacuously singular.
pub fn is_h_singular(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
) -> Result<Singularity> {
    let support = mu.support_set();
    for gamma in &support {
        for l in lambda.elements() {
            if l == &group.zero() {
                continue;
            }
            if support.contains(&group.add(gamma, l)?) {
                return Ok(Singularity::NotSingular {
                    gamma: gamma.clone(),
                    lambda: l.clone(),
                });
            }
        }
    }
    Ok(Singularity::Singular { witness: support })
}

/// H-regularity: h_λ < 1 for every λ ∈ Λ and every atom of ν. Returns the
/// verdict together with all (λ, γ) at which h_λ(γ) = 1. The zero measure
/// is vacuously regular.
pub fn is_h_regular(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
    transversal: &Transversal,
) -> Result<(bool, Vec<(Elem, Elem)>)> {
    let bundle = DerivedBundle::derive(group, mu, lambda, transversal)?;
    let one = BigRational::from_integer(BigInt::from(1));
    let mut violations: Vec<(Elem, Elem)> = bundle
        .h_entries()
        .filter(|(_, _, v)| **v == one)
        .map(|(l, g, _)| (l.clone(), g.clone()))
        .collect();
    violations.sort();
    Ok((violations.is_empty(), violations))
}

/// The Wold-type decomposition μ = μ_ρ + μ_σ with μ_ρ H-regular, μ_σ
/// H-singular, supported on the complementary Λ-saturated sets B_ρ, B_σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WoldResult {
    pub mu_rho: AtomicMeasure,
    pub mu_sigma: AtomicMeasure,
    pub b_rho: BTreeSet<Elem>,
    pub b_sigma: BTreeSet<Elem>,
}

/// Splits Γ along the transversal: a representative goes to the singular
/// side iff some h_λ equals 1 there, and both sides are saturated by Λ.
/// The result does not depend on the transversal.
pub fn wold_decompose(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
    transversal: &Transversal,
) -> Result<WoldResult> {
    let bundle = DerivedBundle::derive(group, mu, lambda, transversal)?;
    let one = BigRational::from_integer(BigInt::from(1));

    let mut b_rho = BTreeSet::new();
    let mut b_sigma = BTreeSet::new();
    for t in transversal.reps() {
        let singular_rep = lambda.elements().iter().any(|l| bundle.h(l, t) == one);
        let target = if singular_rep { &mut b_sigma } else { &mut b_rho };
        for l in lambda.elements() {
            target.insert(group.add(t, l)?);
        }
    }

    Ok(WoldResult {
        mu_rho: mu.restrict(&b_rho),
        mu_sigma: mu.restrict(&b_sigma),
        b_rho,
        b_sigma,
    })
}

/// Pairwise orthogonality of the coset polynomial subspaces in L²(μ):
/// holds iff h_λ = 1/n on supp ν for all λ, n = |Λ|. Returns the verdict
/// and every deviating (λ, γ, h) triple over λ ∈ Λ, γ ∈ supp ν.
pub fn orthogonality_test(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
    transversal: &Transversal,
) -> Result<(bool, Vec<(Elem, Elem, BigRational)>)> {
    if mu.is_zero() {
        return Err(Error::DegenerateInput(
            "orthogonality is vacuous for the zero measure".into(),
        ));
    }
    let bundle = DerivedBundle::derive(group, mu, lambda, transversal)?;
    let target = BigRational::new(BigInt::from(1), BigInt::from(lambda.len() as i64));
    let mut deviations = Vec::new();
    for l in lambda.elements() {
        for gamma in bundle.nu().support() {
            let h = bundle.h(l, gamma);
            if h != target {
                deviations.push((l.clone(), gamma.clone(), h));
            }
        }
    }
    Ok((deviations.is_empty(), deviations))
}

/// Λ-periodicity with respect to the transversal: μ(λ + B) = μ(B) for
/// every atom set B ⊆ T and λ ∈ Λ, checked atomwise. Because every γ ∈ Γ
/// lies in some λ + T this equals global Λ-invariance of μ.
pub fn is_periodic(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
    transversal: &Transversal,
) -> Result<bool> {
    if !crate::group::is_transversal(group, lambda, transversal.reps()) {
        return Err(Error::InvalidTransversal("not a transversal".into()));
    }
    for t in transversal.reps() {
        let base = mu.weight(t);
        for l in lambda.elements() {
            if mu.weight(&group.add(t, l)?) != base {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
