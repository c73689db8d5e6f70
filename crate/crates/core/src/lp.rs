//! Finite-dimensional models of L^α(μ) and L^α(ν): functions on the atom
//! set of a measure, bases of the coset polynomial subspaces, the
//! transversal isometry and its inverse, span intersections, and the
//! closed-form orthogonal projection with an independent normal-equations
//! oracle.
//!
//! On a finite atom set every L^α closure is the plain linear span, so
//! the subspace machinery below is α-free; the α-dependence survives only
//! in norms and in the isometry checks.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteAbelianGroup, Subgroup};
use crate::measure::{AtomicMeasure, DerivedBundle, RhoBundle};

const RANK_TOL: f64 = 1e-10;

/// A complex-valued function on the atoms of a base measure; the
/// finite-dimensional stand-in for an element of L^α(base).
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOnAtoms {
    base: AtomicMeasure,
    values: BTreeMap<Elem, Complex64>,
}

impl FunctionOnAtoms {
    /// Builds a function over `base`; entries of `values` off the support
    /// are rejected, missing atoms default to 0.
    pub fn new(base: AtomicMeasure, values: BTreeMap<Elem, Complex64>) -> Result<Self> {
        for k in values.keys() {
            if base.weight(k).is_zero() {
                return Err(Error::BaseMismatch(format!("value at {k} is off the support")));
            }
        }
        let values = base
            .support()
            .map(|a| (a.clone(), values.get(a).copied().unwrap_or_else(|| Complex64::zero())))
            .collect();
        Ok(Self { base, values })
    }

    pub fn from_fn(base: AtomicMeasure, f: impl Fn(&Elem) -> Complex64) -> Self {
        let values = base.support().map(|a| (a.clone(), f(a))).collect();
        Self { base, values }
    }

    pub fn constant(base: AtomicMeasure, c: Complex64) -> Self {
        Self::from_fn(base, |_| c)
    }

    pub fn indicator(base: AtomicMeasure, point: &Elem) -> Self {
        let p = point.clone();
        Self::from_fn(base, move |a| {
            if *a == p {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            }
        })
    }

    pub fn base(&self) -> &AtomicMeasure {
        &self.base
    }

    pub fn values(&self) -> &BTreeMap<Elem, Complex64> {
        &self.values
    }

    /// Value at an atom; 0 off the support.
    pub fn value(&self, e: &Elem) -> Complex64 {
        self.values.get(e).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (a, v) in &self.values {
            d = d.max((v - other.value(a)).norm());
        }
        for (a, v) in &other.values {
            d = d.max((v - self.value(a)).norm());
        }
        d
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch("functions live over different measures".into()));
        }
        Ok(())
    }
}

/// ∫ |f − g|^α dμ as a finite sum; the metric (no α-th root) for α < 1,
/// the norm for α ≥ 1.
pub fn lp_distance(f: &FunctionOnAtoms, g: &FunctionOnAtoms, alpha: f64) -> Result<f64> {
    f.same_base(g)?;
    if alpha <= 0.0 {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let sum: f64 = f
        .base
        .atoms()
        .iter()
        .map(|(a, w)| (f.value(a) - g.value(a)).norm().powf(alpha) * w.to_f64().unwrap_or(0.0))
        .sum();
    Ok(if alpha >= 1.0 { sum.powf(1.0 / alpha) } else { sum })
}

/// ‖f‖ in L^α(base), α ≥ 1.
pub fn lp_norm(f: &FunctionOnAtoms, alpha: f64) -> Result<f64> {
    lp_distance(f, &FunctionOnAtoms::constant(f.base.clone(), Complex64::zero()), alpha)
}

/// L²(base) inner product ⟨f, g⟩ = Σ f(γ) conj(g(γ)) μ({γ}).
pub fn weighted_inner(f: &FunctionOnAtoms, g: &FunctionOnAtoms) -> Result<Complex64> {
    f.same_base(g)?;
    Ok(f.base
        .atoms()
        .iter()
        .map(|(a, w)| f.value(a) * g.value(a).conj() * w.to_f64().unwrap_or(0.0))
        .sum())
}

// ---------------------------------------------------------------------------
// Weighted (L²(μ)) linear algebra on coordinate vectors over the atom list.

fn atom_order(mu: &AtomicMeasure) -> Vec<Elem> {
    mu.support().cloned().collect()
}

fn weights(mu: &AtomicMeasure, order: &[Elem]) -> Vec<f64> {
    order.iter().map(|a| mu.weight_f64(a)).collect()
}

fn to_vec(f: &FunctionOnAtoms, order: &[Elem]) -> Vec<Complex64> {
    order.iter().map(|a| f.value(a)).collect()
}

fn from_vec(base: &AtomicMeasure, order: &[Elem], v: &[Complex64]) -> FunctionOnAtoms {
    let values = order.iter().cloned().zip(v.iter().copied()).collect();
    FunctionOnAtoms { base: base.clone(), values }
}

fn wdot(u: &[Complex64], v: &[Complex64], w: &[f64]) -> Complex64 {
    u.iter()
        .zip(v)
        .zip(w)
        .map(|((a, b), &wt)| a * b.conj() * wt)
        .sum()
}

fn wnorm(u: &[Complex64], w: &[f64]) -> f64 {
    wdot(u, u, w).re.max(0.0).sqrt()
}

/// Modified Gram–Schmidt in the weighted inner product. Returns the
/// orthonormal set together with, for each input vector, whether it added
/// a new direction.
fn orthonormalize(vectors: &[Vec<Complex64>], w: &[f64]) -> (Vec<Vec<Complex64>>, Vec<bool>) {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut kept = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = wnorm(v, w).max(1.0);
        let mut r = v.clone();
        // two MGS passes for re-orthogonalization
        for _ in 0..2 {
            for q in &basis {
                let c = wdot(&r, q, w);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
            }
        }
        let n = wnorm(&r, w);
        if n > RANK_TOL * scale {
            for ri in r.iter_mut() {
                *ri /= n;
            }
            basis.push(r);
            kept.push(true);
        } else {
            kept.push(false);
        }
    }
    (basis, kept)
}

/// Projection of `v` onto the span of the orthonormal set `basis`.
fn project_onto(v: &[Complex64], basis: &[Vec<Complex64>], w: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); v.len()];
    for q in basis {
        let c = wdot(v, q, w);
        for (oi, qi) in out.iter_mut().zip(q) {
            *oi += c * qi;
        }
    }
    out
}

// ---------------------------------------------------------------------------

/// A basis of the span of the coset polynomial subspace P(x̃) inside the
/// finite-dimensional L²(μ): a maximal independent subset of the
/// characters γ ↦ ⟨γ, x+y⟩, y ∈ H, restricted to the atoms.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    base: AtomicMeasure,
    vectors: Vec<FunctionOnAtoms>,
    label: Elem,
    frequencies: Vec<Elem>,
}

impl SubspaceBasis {
    pub fn base(&self) -> &AtomicMeasure {
        &self.base
    }

    pub fn vectors(&self) -> &[FunctionOnAtoms] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Coset representative x the basis was built from.
    pub fn label(&self) -> &Elem {
        &self.label
    }

    /// The frequencies x + y whose characters were kept.
    pub fn frequencies(&self) -> &[Elem] {
        &self.frequencies
    }
}

/// Builds the character system {⟨·, x+y⟩ : y ∈ H} on supp μ and keeps a
/// maximal independent subset (rank-revealing elimination in the L²(μ)
/// inner product).
pub fn poly_space_basis(
    group: &FiniteAbelianGroup,
    h: &Subgroup,
    x: &Elem,
    mu: &AtomicMeasure,
) -> Result<SubspaceBasis> {
    if mu.is_zero() {
        return Err(Error::DegenerateInput("no polynomial subspace over the zero measure".into()));
    }
    group.check(x)?;
    let order = atom_order(mu);
    let w = weights(mu, &order);

    let mut raw: Vec<(Elem, FunctionOnAtoms, Vec<Complex64>)> = Vec::new();
    for y in h.elements() {
        let freq = group.add(x, y)?;
        let f = FunctionOnAtoms::from_fn(mu.clone(), |gamma| {
            group.character_pair(gamma, &freq).expect("shapes agree")
        });
        let v = to_vec(&f, &order);
        raw.push((freq, f, v));
    }

    let coords: Vec<Vec<Complex64>> = raw.iter().map(|(_, _, v)| v.clone()).collect();
    let (_, kept) = orthonormalize(&coords, &w);

    let mut vectors = Vec::new();
    let mut frequencies = Vec::new();
    for ((freq, f, _), keep) in raw.into_iter().zip(kept) {
        if keep {
            frequencies.push(freq);
            vectors.push(f);
        }
    }
    Ok(SubspaceBasis { base: mu.clone(), vectors, label: x.clone(), frequencies })
}

/// Dimension of ⋂ span(basis_i) inside L²(μ), via the rank of the stacked
/// complementary projectors: dim = |supp μ| − rank(stack of I − P_i).
pub fn intersection_dimension(bases: &[SubspaceBasis], mu: &AtomicMeasure) -> Result<usize> {
    if bases.is_empty() {
        return Err(Error::InvalidArgument("empty basis list".into()));
    }
    for b in bases {
        if b.base != *mu {
            return Err(Error::BaseMismatch("basis over a different measure".into()));
        }
    }
    if bases.len() == 1 {
        return Ok(bases[0].rank());
    }
    let order = atom_order(mu);
    let w = weights(mu, &order);
    let d = order.len();

    let mut stacked: Vec<Vec<Complex64>> = Vec::new();
    for b in bases {
        let coords: Vec<Vec<Complex64>> = b.vectors.iter().map(|f| to_vec(f, &order)).collect();
        let (q, _) = orthonormalize(&coords, &w);
        // rows of I − P, with P the weighted projector onto span(b)
        for row in 0..d {
            let mut r = vec![Complex64::zero(); d];
            r[row] = Complex64::new(1.0, 0.0);
            for qk in &q {
                // (P e_row)(col) = q_k(col) * conj(q_k(row)) * w_row
                let c = qk[row].conj() * w[row];
                for (ri, qi) in r.iter_mut().zip(qk) {
                    *ri -= c * qi;
                }
            }
            stacked.push(r);
        }
    }
    let ones = vec![1.0; d];
    let (q, _) = orthonormalize(&stacked, &ones);
    Ok(d - q.len())
}

/// The isometry V_x̃: (V φ)(γ) = ⟨λ, x⟩ φ(γ − λ) for γ ∈ λ + T, mapping
/// L^α(ν) onto the span of P(x̃) in L^α(μ).
pub fn v_apply(
    group: &FiniteAbelianGroup,
    bundle: &DerivedBundle,
    x: &Elem,
    phi: &FunctionOnAtoms,
) -> Result<FunctionOnAtoms> {
    if phi.base != *bundle.nu() {
        return Err(Error::BaseMismatch("function is not over the bundle's nu".into()));
    }
    group.check(x)?;
    let mut values = BTreeMap::new();
    for gamma in bundle.mu().support() {
        let (l, t) = bundle.decompose(gamma)?;
        let phase = group.character_pair(l, x)?;
        values.insert(gamma.clone(), phase * phi.value(t));
    }
    Ok(FunctionOnAtoms { base: bundle.mu().clone(), values })
}

/// V⁻¹: restriction to the transversal, re-based onto ν. A transversal
/// point t may carry ν-mass while being μ-null; the value there is
/// recovered from an in-support translate t+λ via the conjugate phase,
/// which is what restricting the Λ-covariant representative of `f`
/// means on atoms. Errors when `f` is not in the range of V (checked by
/// applying V again).
pub fn v_inverse(
    group: &FiniteAbelianGroup,
    bundle: &DerivedBundle,
    x: &Elem,
    f: &FunctionOnAtoms,
) -> Result<FunctionOnAtoms> {
    if f.base != *bundle.mu() {
        return Err(Error::BaseMismatch("function is not over the bundle's mu".into()));
    }
    let mut values = BTreeMap::new();
    for t in bundle.nu().support() {
        let v = if !bundle.mu().weight(t).is_zero() {
            f.value(t)
        } else {
            let l = bundle
                .lambda()
                .elements()
                .iter()
                .find(|l| !bundle.mu().weight(&group.add(t, l).expect("shapes agree")).is_zero())
                .expect("nu-mass comes from some translate");
            group.character_pair(l, x)?.conj() * f.value(&group.add(t, l)?)
        };
        values.insert(t.clone(), v);
    }
    let phi = FunctionOnAtoms { base: bundle.nu().clone(), values };
    let back = v_apply(group, bundle, x, &phi)?;
    let residual = back.sup_distance(f);
    if residual > 1e-10 * (1.0 + to_vec(f, &atom_order(&f.base)).iter().map(|v| v.norm()).fold(0.0, f64::max))
    {
        return Err(Error::RangeViolation { residual });
    }
    Ok(phi)
}

/// Closed-form orthogonal projection onto the span of P(x̃):
/// (P f)(γ) = Σ_λ ⟨−λ, x⟩ f(γ+λ) g(γ+λ), with g = dμ/dρ.
pub fn project_closed_form(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
    x: &Elem,
    f: &FunctionOnAtoms,
) -> Result<FunctionOnAtoms> {
    if mu.is_zero() {
        return Err(Error::DegenerateInput("cannot project over the zero measure".into()));
    }
    if f.base != *mu {
        return Err(Error::BaseMismatch("function is not over the given measure".into()));
    }
    group.check(x)?;
    let rho = RhoBundle::new(group, mu, lambda)?;
    let mut values = BTreeMap::new();
    for gamma in mu.support() {
        let mut acc = Complex64::zero();
        for l in lambda.elements() {
            let shifted = group.add(gamma, l)?;
            let g = rho.g_f64(&shifted);
            if g != 0.0 {
                let phase = group.character_pair(&group.neg(l)?, x)?;
                acc += phase * f.value(&shifted) * g;
            }
        }
        values.insert(gamma.clone(), acc);
    }
    Ok(FunctionOnAtoms { base: mu.clone(), values })
}

/// Independent projection oracle: L²(μ)-orthogonal projection onto the
/// span of `basis` via re-orthonormalization (equivalently, the normal
/// equations in the weighted inner product).
pub fn project_oracle(basis: &SubspaceBasis, f: &FunctionOnAtoms) -> Result<FunctionOnAtoms> {
    if f.base != basis.base {
        return Err(Error::BaseMismatch("function is not over the basis measure".into()));
    }
    let order = atom_order(&basis.base);
    let w = weights(&basis.base, &order);
    let coords: Vec<Vec<Complex64>> = basis.vectors.iter().map(|v| to_vec(v, &order)).collect();
    let (q, _) = orthonormalize(&coords, &w);
    let p = project_onto(&to_vec(f, &order), &q, &w);
    Ok(from_vec(&basis.base, &order, &p))
}

/// Seeded pseudo-random function on the atoms of `mu`, real and imaginary
/// parts uniform in [−1, 1].
pub fn random_function(mu: &AtomicMeasure, rng: &mut ChaCha8Rng) -> FunctionOnAtoms {
    let values = mu
        .support()
        .map(|a| {
            (a.clone(), Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        })
        .collect();
    FunctionOnAtoms { base: mu.clone(), values }
}

/// Empirical operator norm probe for the projection on L^α(μ), α ∈ {1,2}:
/// the maximum of ‖Pf‖_α/‖f‖_α over seeded random trials.
pub fn norm_bound_check(
    group: &FiniteAbelianGroup,
    mu: &AtomicMeasure,
    lambda: &Subgroup,
    x: &Elem,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if alpha != 1.0 && alpha != 2.0 {
        return Err(Error::InvalidArgument(format!("alpha must be 1 or 2, got {alpha}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let f = random_function(mu, &mut rng);
        let nf = lp_norm(&f, alpha)?;
        if nf == 0.0 {
            continue;
        }
        let pf = project_closed_form(group, mu, lambda, x, &f)?;
        max_ratio = max_ratio.max(lp_norm(&pf, alpha)? / nf);
    }
    Ok(max_ratio)
}
