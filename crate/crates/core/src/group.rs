//! Exact arithmetic for finite abelian groups Γ = Z(m₁)×…×Z(m_s).
//!
//! Γ and its dual G are represented by the same product-of-cyclic normal
//! form; the identification is fixed by the pairing
//! ⟨γ, x⟩ = exp(2πi Σ_j γ_j x_j / m_j).
//! Set-defining predicates (annihilator membership, transversal tiling)
//! are decided by integer congruences, never by floating-point comparison.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Element of Γ (or of the dual group G): a tuple of residues, component
/// `j` reduced mod `m_j`. Ordering is lexicographic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Elem(pub Vec<u64>);

impl Elem {
    pub fn residues(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Γ = Z(m₁)×…×Z(m_s) with all m_j ≥ 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
    lcm: u128,
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidGroup("moduli list is empty".into()));
        }
        if moduli.iter().any(|&m| m == 0) {
            return Err(Error::InvalidGroup("every modulus must be >= 1".into()));
        }
        let lcm = moduli.iter().fold(1u128, |a, &m| a.lcm(&(m as u128)));
        Ok(Self { moduli, lcm })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of cyclic factors s.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    pub fn zero(&self) -> Elem {
        Elem(vec![0; self.moduli.len()])
    }

    /// Shape and reduction check for an element.
    pub fn check(&self, e: &Elem) -> Result<()> {
        if e.0.len() != self.moduli.len() {
            return Err(Error::InvalidElement(format!(
                "element {e} has {} components, group has {}",
                e.0.len(),
                self.moduli.len()
            )));
        }
        for (j, (&r, &m)) in e.0.iter().zip(&self.moduli).enumerate() {
            if r >= m {
                return Err(Error::InvalidElement(format!(
                    "component {j} of {e} is not reduced mod {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(Elem(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.moduli)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        ))
    }

    pub fn neg(&self, a: &Elem) -> Result<Elem> {
        self.check(a)?;
        Ok(Elem(
            a.0.iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        ))
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// All group elements in lexicographic order.
    pub fn elements(&self) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut cur = vec![0u64; self.moduli.len()];
        loop {
            out.push(Elem(cur.clone()));
            let mut j = self.moduli.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                cur[j] += 1;
                if cur[j] < self.moduli[j] {
                    break;
                }
                cur[j] = 0;
            }
        }
    }

    /// Exact pairing phase: returns (k, L) with ⟨γ,x⟩ = exp(2πi k/L),
    /// L = lcm of the moduli and 0 ≤ k < L.
    pub fn pairing_phase(&self, gamma: &Elem, x: &Elem) -> Result<(u128, u128)> {
        self.check(gamma)?;
        self.check(x)?;
        let l = self.lcm;
        let mut k = 0u128;
        for ((&g, &xx), &m) in gamma.0.iter().zip(&x.0).zip(&self.moduli) {
            let term = (g as u128 * xx as u128 % m as u128) * (l / m as u128) % l;
            k = (k + term) % l;
        }
        Ok((k, l))
    }

    /// ⟨γ, x⟩ = exp(2πi Σ_j γ_j x_j / m_j), a root of unity evaluated in
    /// floating point.
    pub fn character_pair(&self, gamma: &Elem, x: &Elem) -> Result<Complex64> {
        let (k, l) = self.pairing_phase(gamma, x)?;
        Ok(Complex64::from_polar(1.0, TAU * k as f64 / l as f64))
    }

    /// Exact test ⟨γ, x⟩ = 1, via the integer congruence.
    pub fn pairs_trivially(&self, gamma: &Elem, x: &Elem) -> Result<bool> {
        let (k, _) = self.pairing_phase(gamma, x)?;
        Ok(k == 0)
    }
}

/// Subgroup of Γ (or of G), stored as its full, canonically ordered
/// element list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    elements: Vec<Elem>,
}

impl Subgroup {
    /// Smallest subgroup containing `generators`.
    pub fn generate(group: &FiniteAbelianGroup, generators: &[Elem]) -> Result<Self> {
        for g in generators {
            group.check(g)?;
        }
        let mut seen: BTreeSet<Elem> = BTreeSet::new();
        seen.insert(group.zero());
        let mut queue: VecDeque<Elem> = seen.iter().cloned().collect();
        while let Some(e) = queue.pop_front() {
            for g in generators {
                let s = group.add(&e, g)?;
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        Ok(Self {
            elements: seen.into_iter().collect(),
        })
    }

    /// Builds a subgroup from an explicit element list, verifying closure.
    pub fn from_elements(group: &FiniteAbelianGroup, elems: &[Elem]) -> Result<Self> {
        let set: BTreeSet<Elem> = elems.iter().cloned().collect();
        if !set.contains(&group.zero()) {
            return Err(Error::InvalidSubgroup("missing identity".into()));
        }
        for a in &set {
            group.check(a)?;
            if !set.contains(&group.neg(a)?) {
                return Err(Error::InvalidSubgroup(format!("not closed under negation at {a}")));
            }
            for b in &set {
                if !set.contains(&group.add(a, b)?) {
                    return Err(Error::InvalidSubgroup(format!(
                        "not closed under addition at {a}+{b}"
                    )));
                }
            }
        }
        Ok(Self {
            elements: set.into_iter().collect(),
        })
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.elements.binary_search(e).is_ok()
    }
}

/// Annihilator Λ = {γ ∈ Γ : ⟨γ,y⟩ = 1 for all y ∈ H}, decided exactly by
/// the congruence Σ_j γ_j y_j (L/m_j) ≡ 0 mod L.
pub fn annihilator(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Subgroup> {
    let mut elems = Vec::new();
    'outer: for gamma in group.elements() {
        for y in h.elements() {
            if !group.pairs_trivially(&gamma, y)? {
                continue 'outer;
            }
        }
        elems.push(gamma);
    }
    debug_assert_eq!(elems.len() * h.len(), group.order() as usize);
    Ok(Subgroup { elements: elems })
}

/// Partition of Γ into Λ-cosets. Cosets are sorted internally and listed
/// by their lexicographically smallest representative.
pub fn coset_partition(group: &FiniteAbelianGroup, lambda: &Subgroup) -> Vec<Vec<Elem>> {
    let mut seen: BTreeSet<Elem> = BTreeSet::new();
    let mut cosets = Vec::new();
    for e in group.elements() {
        if seen.contains(&e) {
            continue;
        }
        let mut coset: Vec<Elem> = lambda
            .elements()
            .iter()
            .map(|l| group.add(&e, l).expect("shapes agree"))
            .collect();
        coset.sort();
        coset.dedup();
        for c in &coset {
            seen.insert(c.clone());
        }
        cosets.push(coset);
    }
    cosets
}

/// A transversal of Λ in Γ: one representative per Λ-coset, whose
/// Λ-translates tile Γ disjointly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transversal {
    reps: Vec<Elem>,
}

impl Transversal {
    pub fn new(group: &FiniteAbelianGroup, lambda: &Subgroup, reps: Vec<Elem>) -> Result<Self> {
        if !is_transversal(group, lambda, &reps) {
            return Err(Error::InvalidTransversal(
                "translates do not tile the group disjointly".into(),
            ));
        }
        let mut reps = reps;
        reps.sort();
        Ok(Self { reps })
    }

    pub fn reps(&self) -> &[Elem] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.reps.binary_search(e).is_ok()
    }
}

/// Lexicographically smallest element of each Λ-coset.
pub fn canonical_transversal(group: &FiniteAbelianGroup, lambda: &Subgroup) -> Transversal {
    let reps: Vec<Elem> = coset_partition(group, lambda)
        .into_iter()
        .map(|c| c[0].clone())
        .collect();
    Transversal { reps }
}

/// Every subgroup of a small group, by closing all generator subsets of
/// size ≤ 3. Intended for exhaustive checks at order ≤ 16 or so.
pub fn all_subgroups(group: &FiniteAbelianGroup) -> Vec<Subgroup> {
    let elems = group.elements();
    let mut out: BTreeSet<Vec<Elem>> = BTreeSet::new();
    out.insert(vec![group.zero()]);
    for a in &elems {
        for b in &elems {
            for c in &elems {
                let s = Subgroup::generate(group, &[a.clone(), b.clone(), c.clone()])
                    .expect("elements are in the group");
                out.insert(s.elements().to_vec());
            }
        }
    }
    out.into_iter().map(|elements| Subgroup { elements }).collect()
}

/// True iff the translates {candidate + λ} tile Γ disjointly.
pub fn is_transversal(group: &FiniteAbelianGroup, lambda: &Subgroup, candidate: &[Elem]) -> bool {
    if candidate.iter().any(|e| group.check(e).is_err()) {
        return false;
    }
    let mut covered: BTreeSet<Elem> = BTreeSet::new();
    for t in candidate {
        for l in lambda.elements() {
            if !covered.insert(group.add(t, l).expect("shapes agree")) {
                return false;
            }
        }
    }
    covered.len() == group.order() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(vec![4]).unwrap()
    }

    fn e(r: &[u64]) -> Elem {
        Elem(r.to_vec())
    }

    #[test]
    fn make_group_orders() {
        assert_eq!(z4().order(), 4);
        assert_eq!(FiniteAbelianGroup::new(vec![2, 4]).unwrap().order(), 8);
        assert_eq!(FiniteAbelianGroup::new(vec![1]).unwrap().order(), 1);
        assert!(FiniteAbelianGroup::new(vec![]).is_err());
        assert!(FiniteAbelianGroup::new(vec![2, 0]).is_err());
    }

    #[test]
    fn elem_ops() {
        let g = z4();
        assert_eq!(g.add(&e(&[3]), &e(&[2])).unwrap(), e(&[1]));
        assert_eq!(g.neg(&e(&[1])).unwrap(), e(&[3]));
        let g2 = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        assert_eq!(g2.add(&e(&[0, 0]), &e(&[1, 3])).unwrap(), e(&[1, 3]));
        assert!(g.add(&e(&[4]), &e(&[0])).is_err());
        assert!(g.add(&e(&[1, 1]), &e(&[0])).is_err());
    }

    #[test]
    fn character_values() {
        let g = z4();
        let v = g.character_pair(&e(&[2]), &e(&[1])).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let v = g.character_pair(&e(&[0]), &e(&[3])).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let v = g.character_pair(&e(&[2]), &e(&[2])).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn subgroup_generation() {
        let g = z4();
        let s = Subgroup::generate(&g, &[e(&[2])]).unwrap();
        assert_eq!(s.elements(), &[e(&[0]), e(&[2])]);
        let s = Subgroup::generate(&g, &[]).unwrap();
        assert_eq!(s.elements(), &[e(&[0])]);
        let g2 = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let s = Subgroup::generate(&g2, &[e(&[1, 0]), e(&[0, 2])]).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn annihilator_z4() {
        let g = z4();
        let h = Subgroup::from_elements(&g, &[e(&[0]), e(&[2])]).unwrap();
        let lam = annihilator(&g, &h).unwrap();
        assert_eq!(lam.elements(), &[e(&[0]), e(&[2])]);

        let full = Subgroup::generate(&g, &[e(&[1])]).unwrap();
        assert_eq!(annihilator(&g, &full).unwrap().len(), 1);

        let triv = Subgroup::generate(&g, &[]).unwrap();
        assert_eq!(annihilator(&g, &triv).unwrap().len(), 4);
    }

    #[test]
    fn subgroup_closure_check() {
        let g = z4();
        assert!(Subgroup::from_elements(&g, &[e(&[0]), e(&[1])]).is_err());
        assert!(Subgroup::from_elements(&g, &[e(&[2])]).is_err());
    }

    #[test]
    fn cosets_and_transversals() {
        let g = z4();
        let lam = Subgroup::generate(&g, &[e(&[2])]).unwrap();
        let cosets = coset_partition(&g, &lam);
        assert_eq!(cosets, vec![vec![e(&[0]), e(&[2])], vec![e(&[1]), e(&[3])]]);

        let t = canonical_transversal(&g, &lam);
        assert_eq!(t.reps(), &[e(&[0]), e(&[1])]);
        assert!(is_transversal(&g, &lam, t.reps()));

        assert!(is_transversal(&g, &lam, &[e(&[0]), e(&[1])]));
        assert!(!is_transversal(&g, &lam, &[e(&[0]), e(&[2])]));
        assert!(is_transversal(&g, &lam, &[e(&[0]), e(&[3])]));

        let full = Subgroup::generate(&g, &[e(&[1])]).unwrap();
        assert_eq!(canonical_transversal(&g, &full).reps(), &[e(&[0])]);
        let triv = Subgroup::generate(&g, &[]).unwrap();
        assert_eq!(canonical_transversal(&g, &triv).len(), 4);
    }

    /// Biduality Λ(Λ(H)) = H, exhaustively on groups of order ≤ 16.
    #[test]
    fn annihilator_biduality_exhaustive() {
        for moduli in [vec![4], vec![6], vec![2, 4], vec![2, 2, 2], vec![16], vec![3, 3]] {
            let g = FiniteAbelianGroup::new(moduli).unwrap();
            for h in all_subgroups(&g) {
                let lam = annihilator(&g, &h).unwrap();
                assert_eq!(lam.len() * h.len(), g.order() as usize);
                let back = annihilator(&g, &lam).unwrap();
                assert_eq!(back, h);
            }
        }
    }

    #[test]
    fn character_homomorphism_law() {
        let g = FiniteAbelianGroup::new(vec![3, 4]).unwrap();
        let elems = g.elements();
        for a in &elems {
            for b in &elems {
                for x in &elems {
                    let lhs = g
                        .character_pair(&g.add(a, b).unwrap(), x)
                        .unwrap();
                    let rhs = g.character_pair(a, x).unwrap() * g.character_pair(b, x).unwrap();
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn annihilator_pairs_trivially_exactly() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let h = Subgroup::generate(&g, &[e(&[1, 2])]).unwrap();
        let lam = annihilator(&g, &h).unwrap();
        for l in lam.elements() {
            for y in h.elements() {
                assert!(g.pairs_trivially(l, y).unwrap());
            }
        }
    }
}
