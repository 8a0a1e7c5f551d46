//! Finite distributive lattices, represented concretely as families of sets.
//!
//! Elements are addressed by index into a canonically sorted family
//! (size, then lexicographic), so index 0 is always the bottom `∅` and the last
//! index is the top.

mod birkhoff;
mod boolean;
mod hom;

pub use birkhoff::{birkhoff_up, verify_poset_round_trip, BirkhoffRep};
pub use boolean::{boolean_extension, booleanize, BooleanAlgebraRep, BooleanExtension};
pub use hom::{
    check_anti_hom, check_hom, hom_from_order_map, random_order_preserving, HomViolation, LatticeHom,
};

use crate::bitset::BitSet;
use crate::order::{OrderError, Poset};
use rand::Rng;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

/// Triple-checking distributivity is cubic; above this size it is skipped
/// (families closed under ∪ and ∩ are distributive anyway).
pub const DISTRIBUTIVITY_CHECK_MAX: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("family does not contain the empty set")]
    MissingBottom,
    #[error("element {0:?} is not a subset of the universe")]
    OutOfUniverse(Vec<usize>),
    #[error("not closed under union: {0:?} ∪ {1:?}")]
    NotClosedUnderJoin(Vec<usize>, Vec<usize>),
    #[error("not closed under intersection: {0:?} ∩ {1:?}")]
    NotClosedUnderMeet(Vec<usize>, Vec<usize>),
    #[error("distributivity fails at ({0}, {1}, {2})")]
    NotDistributive(usize, usize, usize),
    #[error("element {0} is not join-irreducible")]
    NotJoinIrreducible(usize),
    #[error("not a bounded lattice homomorphism: {0}")]
    NotAHom(HomViolation),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// How `∧` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeetRule {
    /// The family is closed under `∩`, which is the meet.
    Intersection,
    /// Only `∪`-closed; the meet is the largest member inside `a ∩ b`
    /// (e.g. `Inv(A ∩ A')` for attractors).
    Infimum,
}

#[derive(Clone)]
pub struct FiniteDistributiveLattice {
    universe: Vec<String>,
    elements: Vec<BitSet>,
    index: HashMap<BitSet, usize>,
    meet_rule: MeetRule,
}

impl std::fmt::Debug for FiniteDistributiveLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lattice")
            .field("universe", &self.universe)
            .field("elements", &self.elements)
            .field("meet", &self.meet_rule)
            .finish()
    }
}

impl PartialEq for FiniteDistributiveLattice {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.elements == other.elements
    }
}

impl FiniteDistributiveLattice {
    /// A family closed under `∪` and `∩` containing `∅`.
    pub fn from_sets(universe: Vec<String>, sets: impl IntoIterator<Item = BitSet>) -> Result<Self, LatticeError> {
        Self::build(universe, sets, MeetRule::Intersection)
    }

    /// A `∪`-closed family containing `∅`; meets are infima.
    pub fn from_join_closed(
        universe: Vec<String>,
        sets: impl IntoIterator<Item = BitSet>,
    ) -> Result<Self, LatticeError> {
        Self::build(universe, sets, MeetRule::Infimum)
    }

    fn build(
        universe: Vec<String>,
        sets: impl IntoIterator<Item = BitSet>,
        rule: MeetRule,
    ) -> Result<Self, LatticeError> {
        let full = BitSet::full(universe.len());
        let mut elements: Vec<BitSet> = sets.into_iter().collect::<HashSet<_>>().into_iter().collect();
        elements.sort();
        if elements.first().map_or(true, |e| !e.is_empty()) {
            return Err(LatticeError::MissingBottom);
        }
        if let Some(bad) = elements.iter().find(|e| !e.is_subset(&full)) {
            return Err(LatticeError::OutOfUniverse(bad.to_vec()));
        }
        let index: HashMap<BitSet, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        for (i, a) in elements.iter().enumerate() {
            for b in &elements[i + 1..] {
                if !index.contains_key(&a.union(b)) {
                    return Err(LatticeError::NotClosedUnderJoin(a.to_vec(), b.to_vec()));
                }
                if rule == MeetRule::Intersection && !index.contains_key(&a.intersection(b)) {
                    return Err(LatticeError::NotClosedUnderMeet(a.to_vec(), b.to_vec()));
                }
            }
        }
        let l = FiniteDistributiveLattice { universe, elements, index, meet_rule: rule };
        if rule == MeetRule::Infimum && l.len() <= DISTRIBUTIVITY_CHECK_MAX {
            l.check_distributive()?;
        }
        Ok(l)
    }

    /// Closes an arbitrary family under `∪` and `∩` (adding `∅`).
    pub fn generated_by(universe: Vec<String>, gens: impl IntoIterator<Item = BitSet>) -> Result<Self, LatticeError> {
        let mut all: HashSet<BitSet> = gens.into_iter().collect();
        all.insert(BitSet::new());
        let mut frontier: Vec<BitSet> = all.iter().cloned().collect();
        while !frontier.is_empty() {
            let snapshot: Vec<BitSet> = all.iter().cloned().collect();
            let mut next = Vec::new();
            for a in &frontier {
                for b in &snapshot {
                    for c in [a.union(b), a.intersection(b)] {
                        if all.insert(c.clone()) {
                            next.push(c);
                        }
                    }
                }
            }
            frontier = next;
        }
        Self::from_sets(universe, all)
    }

    /// `O(P)` with the poset's labels as universe.
    pub fn of_down_sets(p: &Poset, bound: usize) -> Result<Self, LatticeError> {
        let o = p.all_down_sets(bound)?;
        Self::from_sets(p.labels().to_vec(), o)
    }

    /// A random lattice of subsets of `{0..m}` generated by `gens` random sets.
    pub fn random<R: Rng>(m: usize, gens: usize, rng: &mut R) -> Self {
        let g: Vec<BitSet> = (0..gens).map(|_| (0..m).filter(|_| rng.gen_bool(0.5)).collect()).collect();
        Self::generated_by(crate::order::numeric_labels(m), g).expect("closure is a lattice")
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn meet_rule(&self) -> MeetRule {
        self.meet_rule
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BitSet] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &BitSet {
        &self.elements[i]
    }

    pub fn index_of(&self, s: &BitSet) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &BitSet) -> bool {
        self.index.contains_key(s)
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn top_set(&self) -> &BitSet {
        &self.elements[self.top()]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].union(&self.elements[b])]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.index[&self.meet_set(&self.elements[a], &self.elements[b])]
    }

    /// Meet of two member sets, as a set.
    pub fn meet_set(&self, a: &BitSet, b: &BitSet) -> BitSet {
        let i = a.intersection(b);
        if self.meet_rule == MeetRule::Intersection || self.index.contains_key(&i) {
            return i;
        }
        self.largest_below(&i)
    }

    /// Largest member contained in an arbitrary set.
    pub fn largest_below(&self, s: &BitSet) -> BitSet {
        let mut acc = BitSet::new();
        for e in &self.elements {
            if e.is_subset(s) {
                acc.union_with(e);
            }
        }
        acc
    }

    /// Order test; `a ≤ b ⇔ a ∧ b = a`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        let inclusion = self.elements[a].is_subset(&self.elements[b]);
        debug_assert_eq!(inclusion, self.meet(a, b) == a);
        inclusion
    }

    /// Hasse diagram: cover pairs `(i, j)` with `i ⋖ j`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for j in 0..n {
            let below: Vec<usize> = (0..n)
                .filter(|&i| i != j && self.elements[i].is_subset(&self.elements[j]))
                .collect();
            for &i in &below {
                let covered = !below
                    .iter()
                    .any(|&k| k != i && self.elements[i].is_subset(&self.elements[k]));
                if covered {
                    out.push((i, j));
                }
            }
        }
        out.sort();
        out
    }

    /// Elements strictly below `c`, maximal among those.
    fn lower_covers(&self, c: usize) -> Vec<usize> {
        let e = &self.elements[c];
        let below: Vec<usize> = (0..self.len())
            .filter(|&i| i != c && self.elements[i].is_subset(e))
            .collect();
        below
            .iter()
            .copied()
            .filter(|&i| !below.iter().any(|&k| k != i && self.elements[i].is_subset(&self.elements[k])))
            .collect()
    }

    pub fn is_join_irreducible(&self, c: usize) -> bool {
        c != self.bottom() && self.lower_covers(c).len() == 1
    }

    /// Indices of `J(L)`, in lattice order.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.is_join_irreducible(c)).collect()
    }

    /// `J(L)` as a poset under inclusion; labels render the member sets.
    pub fn ji_poset(&self) -> (Poset, Vec<usize>) {
        let ji = self.join_irreducibles();
        let labels: Vec<String> = ji.iter().map(|&i| self.render(i)).collect();
        let leq: Vec<Vec<bool>> = ji
            .iter()
            .map(|&a| ji.iter().map(|&b| self.elements[a].is_subset(&self.elements[b])).collect())
            .collect();
        (Poset::from_matrix(labels, &leq).expect("inclusion is a partial order"), ji)
    }

    /// The unique maximal element strictly below a join-irreducible.
    pub fn predecessor(&self, c: usize) -> Result<usize, LatticeError> {
        match self.lower_covers(c).as_slice() {
            [p] if c != self.bottom() => Ok(*p),
            _ => Err(LatticeError::NotJoinIrreducible(c)),
        }
    }

    /// `{a,b}`-style rendering of an element via universe labels.
    pub fn render(&self, i: usize) -> String {
        render_set(&self.universe, &self.elements[i])
    }

    pub fn names(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|i| self.universe[i].clone()).collect()
    }

    /// Distributive law `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)` on all triples.
    pub fn check_distributive(&self) -> Result<(), LatticeError> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                let ab = self.meet(a, b);
                for c in b + 1..n {
                    if self.meet(a, self.join(b, c)) != self.join(ab, self.meet(a, c)) {
                        return Err(LatticeError::NotDistributive(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// The sublattice test used by the lifting front ends: every set must be a
    /// member, and the family must contain bottom and top and be closed under
    /// this lattice's operations. Returns the witnessing pair on failure.
    pub fn check_sublattice(&self, family: &[BitSet]) -> Result<Vec<usize>, SublatticeViolation> {
        let mut idx = Vec::with_capacity(family.len());
        for s in family {
            match self.index_of(s) {
                Some(i) => idx.push(i),
                None => return Err(SublatticeViolation::NotAMember(s.clone())),
            }
        }
        let have: HashSet<usize> = idx.iter().copied().collect();
        if !have.contains(&self.bottom()) {
            return Err(SublatticeViolation::MissingBound(self.element(self.bottom()).clone()));
        }
        if !have.contains(&self.top()) {
            return Err(SublatticeViolation::MissingBound(self.top_set().clone()));
        }
        let mut sorted: Vec<usize> = have.iter().copied().collect();
        sorted.sort();
        for (x, &a) in sorted.iter().enumerate() {
            for &b in &sorted[x + 1..] {
                if !have.contains(&self.join(a, b)) {
                    return Err(SublatticeViolation::Join(self.element(a).clone(), self.element(b).clone()));
                }
                if !have.contains(&self.meet(a, b)) {
                    return Err(SublatticeViolation::Meet(self.element(a).clone(), self.element(b).clone()));
                }
            }
        }
        Ok(sorted)
    }

    /// The sublattice on the given member indices, with this lattice's meet.
    pub fn restrict_to(&self, members: &[usize]) -> FiniteDistributiveLattice {
        let sets = members.iter().map(|&i| self.elements[i].clone());
        Self::build(self.universe.clone(), sets, MeetRule::Infimum)
            .map(|mut l| {
                l.meet_rule = self.meet_rule;
                l
            })
            .expect("a checked sublattice is a lattice")
    }

    /// All sublattices (containing bottom and top), as sorted index lists.
    /// Exponential; intended for lattices with a handful of elements.
    pub fn all_sublattices(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let (bot, top) = (self.bottom(), self.top());
        let inner: Vec<usize> = (0..n).filter(|&i| i != bot && i != top).collect();
        assert!(inner.len() < 24, "sublattice enumeration is exponential");
        let mut out = Vec::new();
        for mask in 0u32..1 << inner.len() {
            let mut members = vec![bot];
            members.extend((0..inner.len()).filter(|&k| mask >> k & 1 == 1).map(|k| inner[k]));
            if top != bot {
                members.push(top);
            }
            members.sort();
            let have: HashSet<usize> = members.iter().copied().collect();
            let closed = members.iter().all(|&a| {
                members.iter().all(|&b| have.contains(&self.join(a, b)) && have.contains(&self.meet(a, b)))
            });
            if closed {
                out.push(members);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SublatticeViolation {
    #[error("{0:?} is not an element of the lattice")]
    NotAMember(BitSet),
    #[error("bound {0:?} missing")]
    MissingBound(BitSet),
    #[error("join of {0:?} and {1:?} missing")]
    Join(BitSet, BitSet),
    #[error("meet of {0:?} and {1:?} missing")]
    Meet(BitSet, BitSet),
}

pub fn render_set(labels: &[String], s: &BitSet) -> String {
    let parts: Vec<&str> = s.iter().map(|i| labels[i].as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn p3() -> Poset {
        Poset::from_covers(vec!["1".into(), "2".into(), "3".into()], &[(0, 1), (0, 2)]).unwrap()
    }

    fn set(xs: &[usize]) -> BitSet {
        xs.iter().copied().collect()
    }

    // oracle: c is join-irreducible iff nonzero and not the union of two
    // strictly smaller members
    fn oracle_ji(l: &FiniteDistributiveLattice) -> Vec<usize> {
        let e = l.elements();
        (0..l.len())
            .filter(|&c| {
                !e[c].is_empty()
                    && !(0..l.len()).any(|a| {
                        (0..l.len()).any(|b| a != c && b != c && e[a].union(&e[b]) == e[c])
                    })
            })
            .collect()
    }

    #[test]
    fn ji_of_o_p3() {
        let l = FiniteDistributiveLattice::of_down_sets(&p3(), 20).unwrap();
        let ji = l.join_irreducibles();
        assert_eq!(ji, oracle_ji(&l));
        let sets: Vec<BitSet> = ji.iter().map(|&i| l.element(i).clone()).collect();
        assert_eq!(sets, vec![set(&[0]), set(&[0, 1]), set(&[0, 2])]);
        let (jp, _) = l.ji_poset();
        assert!(jp.lt(0, 1) && jp.lt(0, 2) && !jp.leq(1, 2) && !jp.leq(2, 1));
        assert_eq!(jp.labels(), &["{1}", "{1,2}", "{1,3}"]);
    }

    #[test]
    fn ji_of_boolean_and_chain() {
        let b = FiniteDistributiveLattice::of_down_sets(&Poset::antichain(2), 20).unwrap();
        let (jp, ji) = b.ji_poset();
        assert_eq!(ji.len(), 2);
        assert!(jp.covers().is_empty());
        let c = FiniteDistributiveLattice::of_down_sets(&Poset::chain(2), 20).unwrap();
        let (jp, _) = c.ji_poset();
        assert_eq!(jp.covers(), vec![(0, 1)]);
    }

    #[test]
    fn predecessor_examples() {
        let l = FiniteDistributiveLattice::of_down_sets(&p3(), 20).unwrap();
        let i12 = l.index_of(&set(&[0, 1])).unwrap();
        assert_eq!(l.element(l.predecessor(i12).unwrap()), &set(&[0]));
        let i1 = l.index_of(&set(&[0])).unwrap();
        assert_eq!(l.predecessor(i1).unwrap(), l.bottom());
        assert_eq!(l.predecessor(l.top()), Err(LatticeError::NotJoinIrreducible(l.top())));
        assert!(l.predecessor(l.bottom()).is_err());
        let b = FiniteDistributiveLattice::of_down_sets(&Poset::antichain(2), 20).unwrap();
        assert_eq!(b.predecessor(b.index_of(&set(&[0])).unwrap()).unwrap(), 0);
    }

    #[test]
    fn leq_examples() {
        let l = FiniteDistributiveLattice::of_down_sets(&p3(), 20).unwrap();
        let a = l.index_of(&set(&[0])).unwrap();
        let b = l.index_of(&set(&[0, 1])).unwrap();
        assert!(l.leq(a, b) && l.leq(a, a) && !l.leq(b, a));
    }

    #[test]
    fn construction_rejects_bad_families() {
        let u = crate::order::numeric_labels(3);
        assert_eq!(
            FiniteDistributiveLattice::from_sets(u.clone(), vec![set(&[0])]),
            Err(LatticeError::MissingBottom)
        );
        assert!(matches!(
            FiniteDistributiveLattice::from_sets(u.clone(), vec![set(&[]), set(&[0]), set(&[1])]),
            Err(LatticeError::NotClosedUnderJoin(..))
        ));
        assert!(matches!(
            FiniteDistributiveLattice::from_sets(u.clone(), vec![set(&[]), set(&[0, 1]), set(&[1, 2]), set(&[0, 1, 2])]),
            Err(LatticeError::NotClosedUnderMeet(..))
        ));
        // ∪-closed, but with infimum meets this is the diamond M3
        let m3 = vec![set(&[]), set(&[0, 1]), set(&[1, 2]), set(&[0, 2]), set(&[0, 1, 2])];
        assert!(matches!(
            FiniteDistributiveLattice::from_join_closed(u.clone(), m3),
            Err(LatticeError::NotDistributive(..))
        ));
        assert!(matches!(
            FiniteDistributiveLattice::from_sets(u, vec![set(&[]), set(&[5])]),
            Err(LatticeError::OutOfUniverse(_))
        ));
    }

    #[test]
    fn infimum_meet() {
        let u = crate::order::numeric_labels(3);
        let l = FiniteDistributiveLattice::from_join_closed(
            u,
            vec![set(&[]), set(&[0]), set(&[0, 1]), set(&[0, 2]), set(&[0, 1, 2])],
        )
        .unwrap();
        assert_eq!(l.meet_set(&set(&[0, 1]), &set(&[0, 2])), set(&[0]));
        let l2 = FiniteDistributiveLattice::from_join_closed(
            crate::order::numeric_labels(4),
            vec![set(&[]), set(&[0]), set(&[0, 1, 3]), set(&[0, 2, 3]), set(&[0, 1, 2, 3])],
        )
        .unwrap();
        // {0,1,3} ∩ {0,2,3} = {0,3} is not a member; the infimum is {0}
        let (a, b) = (l2.index_of(&set(&[0, 1, 3])).unwrap(), l2.index_of(&set(&[0, 2, 3])).unwrap());
        assert_eq!(l2.element(l2.meet(a, b)), &set(&[0]));
    }

    #[test]
    fn hasse_covers_match_transitive_reduction() {
        let l = FiniteDistributiveLattice::of_down_sets(&p3(), 20).unwrap();
        assert_eq!(l.covers(), vec![(0, 1), (1, 2), (1, 3), (2, 4), (3, 4)]);
    }

    #[test]
    fn sublattices_of_square() {
        let l = FiniteDistributiveLattice::of_down_sets(&Poset::antichain(2), 20).unwrap();
        let subs = l.all_sublattices();
        // {0,1}, {0,a,1}, {0,b,1}, all four
        assert_eq!(subs.len(), 4);
        assert!(l.check_sublattice(&[set(&[]), set(&[0]), set(&[1]), set(&[0, 1])]).is_ok());
        assert!(matches!(
            l.check_sublattice(&[set(&[]), set(&[0]), set(&[1])]),
            Err(SublatticeViolation::MissingBound(_))
        ));
    }

    proptest! {
        #[test]
        fn random_lattices_are_distributive_and_ji_matches_oracle(seed in any::<u64>(), m in 1usize..6, g in 0usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = FiniteDistributiveLattice::random(m, g, &mut rng);
            prop_assert!(l.check_distributive().is_ok());
            prop_assert_eq!(l.join_irreducibles(), oracle_ji(&l));
            for c in l.join_irreducibles() {
                let p = l.predecessor(c).unwrap();
                // unique maximal strictly smaller element
                for i in 0..l.len() {
                    if i != c && l.leq(i, c) {
                        prop_assert!(l.leq(i, p));
                    }
                }
            }
        }
    }
}
