//! Atomic measures with exact rational weights, the derived measures
//! μ_λ, ν_λ, ν and their Radon–Nikodym table h_λ, the Λ-periodization ρ
//! with its derivative g, and the transversal integral identity.
//!
//! All weights stay rational end to end; complex values enter only
//! through characters. The classification predicates are dichotomies on h,
//! so the predicates downstream must never depend on a tolerance.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{is_transversal, Elem, FiniteAbelianGroup, Subgroup, Transversal};

/// Finite non-negative atomic measure: a map from group elements to
/// positive rational weights. Zero-weight atoms are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AtomicMeasure {
    atoms: BTreeMap<Elem, BigRational>,
}

impl AtomicMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(at: Elem) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(at, BigRational::from_integer(1.into()));
        Self { atoms }
    }

    pub fn from_pairs(
        group: &FiniteAbelianGroup,
        pairs: impl IntoIterator<Item = (Elem, BigRational)>,
    ) -> Result<Self> {
        let mut atoms: BTreeMap<Elem, BigRational> = BTreeMap::new();
        for (point, weight) in pairs {
            group.check(&point)?;
            if weight.is_negative() {
                return Err(Error::InvalidArgument(format!(
                    "negative weight {weight} at {point}"
                )));
            }
            if weight.is_zero() {
                continue;
            }
            *atoms.entry(point).or_insert_with(BigRational::zero) += weight;
        }
        atoms.retain(|_, w| !w.is_zero());
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &BTreeMap<Elem, BigRational> {
        &self.atoms
    }

    pub fn support(&self) -> impl Iterator<Item = &Elem> {
        self.atoms.keys()
    }

    pub fn support_set(&self) -> BTreeSet<Elem> {
        self.atoms.keys().cloned().collect()
    }

    /// μ({e}); zero off the support.
    pub fn weight(&self, e: &Elem) -> BigRational {
        self.atoms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn weight_f64(&self, e: &Elem) -> f64 {
        self.weight(e).to_f64().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// B ↦ μ(λ + B): the atom at a contributes at a − λ.
    pub fn translate(&self, group: &FiniteAbelianGroup, lambda: &Elem) -> Result<Self> {
        let mut atoms = BTreeMap::new();
        for (a, w) in &self.atoms {
            atoms.insert(group.sub(a, lambda)?, w.clone());
        }
        Ok(Self { atoms })
    }

    /// B ↦ μ(B ∩ S).
    pub fn restrict(&self, set: &BTreeSet<Elem>) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .filter(|(a, _)| set.contains(*a))
                .map(|(a, w)| (a.clone(), w.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        for (a, w) in &other.atoms {
            *atoms.entry(a.clone()).or_insert_with(BigRational::zero) += w;
        }
        atoms.retain(|_, w| !w.is_zero());
        Self { atoms }
    }

    pub fn scale(&self, c: &BigRational) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::InvalidArgument(format!("negative scale {c}")));
        }
        if c.is_zero() {
            return Ok(Self::zero());
        }
        Ok(Self {
            atoms: self.atoms.iter().map(|(a, w)| (a.clone(), w * c)).collect(),
        })
    }
}

/// The transversal-derived data of a triple (μ, Λ, T): the restrictions
/// μ_λ = μ(· ∩ (T+λ)), their pullbacks ν_λ = μ_λ(λ + ·) supported on T,
/// ν = Σ_λ ν_λ, and the Radon–Nikodym table h(λ, γ) = ν_λ({γ})/ν({γ})
/// on supp ν. Off supp ν, h is 0.
#[derive(Clone, Debug)]
pub struct DerivedBundle {
    mu: AtomicMeasure,
    lambda: Subgroup,
    transversal: Transversal,
    mu_lambda: BTreeMap<Elem, AtomicMeasure>,
    nu_lambda: BTreeMap<Elem, AtomicMeasure>,
    nu: AtomicMeasure,
    h: BTreeMap<(Elem, Elem), BigRational>,
    // γ ∈ Γ ↦ (λ, t) with γ = λ + t, t ∈ T
    decomposition: BTreeMap<Elem, (Elem, Elem)>,
}

impl DerivedBundle {
    pub fn derive(
        group: &FiniteAbelianGroup,
        mu: &AtomicMeasure,
        lambda: &Subgroup,
        transversal: &Transversal,
    ) -> Result<Self> {
        if !is_transversal(group, lambda, transversal.reps()) {
            return Err(Error::InvalidTransversal(
                "candidate does not tile the group under the given subgroup".into(),
            ));
        }
        let mut decomposition = BTreeMap::new();
        for t in transversal.reps() {
            for l in lambda.elements() {
                decomposition.insert(group.add(t, l)?, (l.clone(), t.clone()));
            }
        }

        let mut mu_lambda = BTreeMap::new();
        let mut nu_lambda = BTreeMap::new();
        let mut nu = AtomicMeasure::zero();
        for l in lambda.elements() {
            let translated: BTreeSet<Elem> = transversal
                .reps()
                .iter()
                .map(|t| group.add(t, l).expect("shapes agree"))
                .collect();
            let m_l = mu.restrict(&translated);
            let n_l = m_l.translate(group, l)?;
            nu = nu.add(&n_l);
            if !m_l.is_zero() {
                mu_lambda.insert(l.clone(), m_l);
                nu_lambda.insert(l.clone(), n_l);
            }
        }

        let mut h = BTreeMap::new();
        for (l, n_l) in &nu_lambda {
            for (gamma, w) in n_l.atoms() {
                h.insert((l.clone(), gamma.clone()), w / nu.weight(gamma));
            }
        }

        Ok(Self {
            mu: mu.clone(),
            lambda: lambda.clone(),
            transversal: transversal.clone(),
            mu_lambda,
            nu_lambda,
            nu,
            h,
            decomposition,
        })
    }

    pub fn mu(&self) -> &AtomicMeasure {
        &self.mu
    }

    pub fn lambda(&self) -> &Subgroup {
        &self.lambda
    }

    pub fn transversal(&self) -> &Transversal {
        &self.transversal
    }

    pub fn mu_lambda(&self) -> &BTreeMap<Elem, AtomicMeasure> {
        &self.mu_lambda
    }

    pub fn nu_lambda(&self) -> &BTreeMap<Elem, AtomicMeasure> {
        &self.nu_lambda
    }

    pub fn nu(&self) -> &AtomicMeasure {
        &self.nu
    }

    /// h_λ(γ); 0 off supp ν.
    pub fn h(&self, lambda: &Elem, gamma: &Elem) -> BigRational {
        self.h
            .get(&(lambda.clone(), gamma.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// All stored (λ, γ, h) entries, i.e. the nonzero part of the table.
    pub fn h_entries(&self) -> impl Iterator<Item = (&Elem, &Elem, &BigRational)> {
        self.h.iter().map(|((l, g), v)| (l, g, v))
    }

    /// The unique (λ, t) with γ = λ + t, t ∈ T.
    pub fn decompose(&self, gamma: &Elem) -> Result<(&Elem, &Elem)> {
        self.decomposition
            .get(gamma)
            .map(|(l, t)| (l, t))
            .ok_or_else(|| Error::InvalidElement(format!("{gamma} not shaped for the group")))
    }
}

/// The Λ-periodization ρ({γ}) = Σ_λ μ({γ+λ}) and the Radon–Nikodym
/// derivative g = dμ/dρ on supp ρ. ρ is transversal-free.
#[derive(Clone, Debug)]
pub struct RhoBundle {
    rho: AtomicMeasure,
    g: BTreeMap<Elem, BigRational>,
}

impl RhoBundle {
    pub fn new(group: &FiniteAbelianGroup, mu: &AtomicMeasure, lambda: &Subgroup) -> Result<Self> {
        let mut rho = AtomicMeasure::zero();
        for l in lambda.elements() {
            rho = rho.add(&mu.translate(group, l)?);
        }
        let mut g = BTreeMap::new();
        for (gamma, r) in rho.atoms() {
            let w = mu.weight(gamma);
            if !w.is_zero() {
                g.insert(gamma.clone(), w / r);
            }
        }
        Ok(Self { rho, g })
    }

    pub fn rho(&self) -> &AtomicMeasure {
        &self.rho
    }

    /// g(γ) = μ({γ})/ρ({γ}); 0 at μ-null points.
    pub fn g(&self, gamma: &Elem) -> BigRational {
        self.g.get(gamma).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn g_f64(&self, gamma: &Elem) -> f64 {
        self.g(gamma).to_f64().unwrap_or(0.0)
    }
}

/// Both sides of the transversal integral identity
/// ∫ f dμ = ∫_{T+κ} Σ_λ f(γ+λ) g(γ+λ) dρ(γ),
/// evaluated as finite sums. `f` defaults to 0 off its table.
pub fn integral_identity_evaluate(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
    transversal: &Transversal,
    f: &BTreeMap<Elem, Complex64>,
    kappa: &Elem,
) -> Result<(Complex64, Complex64)> {
    if !lambda.contains(kappa) {
        return Err(Error::InvalidArgument(format!("{kappa} is not in the subgroup")));
    }
    let value = |e: &Elem| f.get(e).copied().unwrap_or(Complex64::new(0.0, 0.0));

    let mut lhs = Complex64::new(0.0, 0.0);
    for (gamma, w) in mu.atoms() {
        lhs += value(gamma) * w.to_f64().unwrap_or(0.0);
    }

    let bundle = RhoBundle::new(group, mu, lambda)?;
    let mut rhs = Complex64::new(0.0, 0.0);
    for t in transversal.reps() {
        let gamma = group.add(t, kappa)?;
        let r = bundle.rho().weight_f64(&gamma);
        if r == 0.0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for l in lambda.elements() {
            let shifted = group.add(&gamma, l)?;
            let g = bundle.g_f64(&shifted);
            if g != 0.0 {
                inner += value(&shifted) * g;
            }
        }
        rhs += inner * r;
    }
    Ok((lhs, rhs))
}

/// Asserts |lhs − rhs| ≤ 1e−10·(1 + |lhs|).
pub fn integral_identity_check(lhs: Complex64, rhs: Complex64) -> bool {
    (lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm())
}
