use super::{FiniteDistributiveLattice, LatticeError};
use crate::bitset::BitSet;
use crate::order::Poset;

/// `↓^∨ : L → O(J(L))`, tabulated.
#[derive(Debug, Clone)]
pub struct BirkhoffRep {
    /// `J(L)` ordered by inclusion.
    pub ji_poset: Poset,
    /// Lattice index of each join-irreducible, in `ji_poset` carrier order.
    pub ji: Vec<usize>,
    /// `down[a]` = the join-irreducibles below element `a`, as a down-set of `ji_poset`.
    pub down: Vec<BitSet>,
}

impl BirkhoffRep {
    pub fn of(l: &FiniteDistributiveLattice) -> Self {
        let (ji_poset, ji) = l.ji_poset();
        let down = (0..l.len())
            .map(|a| (0..ji.len()).filter(|&k| l.element(ji[k]).is_subset(l.element(a))).collect())
            .collect();
        BirkhoffRep { ji_poset, ji, down }
    }

    /// Inverse of `↓^∨`: the join of the members.
    pub fn join_of(&self, l: &FiniteDistributiveLattice, d: &BitSet) -> usize {
        d.iter().fold(l.bottom(), |acc, k| l.join(acc, self.ji[k]))
    }

    /// Checks that `↓^∨` is a bijection onto `O(J(L))` preserving `∨, ∧, 0, 1`
    /// and that joining members inverts it.
    pub fn verify(&self, l: &FiniteDistributiveLattice, bound: usize) -> Result<(), String> {
        let mut o = self.ji_poset.all_down_sets(bound).map_err(|e| e.to_string())?;
        let mut image = self.down.clone();
        image.sort();
        o.sort();
        if image != o {
            return Err(format!("image of ↓^∨ is not O(J(L)): {} vs {} sets", image.len(), o.len()));
        }
        if !self.down[l.bottom()].is_empty() || self.down[l.top()] != BitSet::full(self.ji.len()) {
            return Err("bounds not preserved".into());
        }
        for a in 0..l.len() {
            if self.join_of(l, &self.down[a]) != a {
                return Err(format!("join of ↓^∨({a}) is not {a}"));
            }
            for b in a + 1..l.len() {
                if self.down[l.join(a, b)] != self.down[a].union(&self.down[b]) {
                    return Err(format!("∨ not preserved at ({a}, {b})"));
                }
                if self.down[l.meet(a, b)] != self.down[a].intersection(&self.down[b]) {
                    return Err(format!("∧ not preserved at ({a}, {b})"));
                }
            }
        }
        Ok(())
    }
}

/// `↓p` as an element of `J(O(P))`; `o_p` must be `O(P)`.
pub fn birkhoff_up(p: &Poset, o_p: &FiniteDistributiveLattice, x: usize) -> Result<usize, LatticeError> {
    if x >= p.len() {
        return Err(crate::order::OrderError::UnknownElement(format!("#{x}")).into());
    }
    let i = o_p.index_of(p.down(x)).expect("↓p is a down-set");
    if !o_p.is_join_irreducible(i) {
        return Err(LatticeError::NotJoinIrreducible(i));
    }
    Ok(i)
}

/// `P ≅ J(O(P))` via `↓`, and `O(J(O(P)))` equals `O(P)` after relabeling.
pub fn verify_poset_round_trip(p: &Poset, bound: usize) -> Result<(), String> {
    let o = FiniteDistributiveLattice::of_down_sets(p, bound).map_err(|e| e.to_string())?;
    let rep = BirkhoffRep::of(&o);
    if rep.ji.len() != p.len() {
        return Err(format!("|J(O(P))| = {} but |P| = {}", rep.ji.len(), p.len()));
    }
    // phi: P → J(O(P)) carrier index
    let mut phi = Vec::with_capacity(p.len());
    for x in 0..p.len() {
        let i = birkhoff_up(p, &o, x).map_err(|e| e.to_string())?;
        phi.push(rep.ji.iter().position(|&j| j == i).ok_or("↓p missing from J")?);
    }
    for a in 0..p.len() {
        for b in 0..p.len() {
            if p.leq(a, b) != rep.ji_poset.leq(phi[a], phi[b]) {
                return Err(format!("↓ is not an order isomorphism at ({a}, {b})"));
            }
        }
    }
    let mut back: Vec<BitSet> = rep
        .ji_poset
        .all_down_sets(bound)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|d| (0..p.len()).filter(|&x| d.contains(phi[x])).collect())
        .collect();
    back.sort();
    if back != o.elements() {
        return Err("O(J(O(P))) differs from O(P) after relabeling".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::DEFAULT_DOWNSET_BOUND as B;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p3() -> Poset {
        Poset::from_covers(vec!["1".into(), "2".into(), "3".into()], &[(0, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn down_examples() {
        let l = FiniteDistributiveLattice::of_down_sets(&p3(), B).unwrap();
        let rep = BirkhoffRep::of(&l);
        let a = l.index_of(&[0, 1].into_iter().collect()).unwrap();
        let names: Vec<&str> = rep.down[a].iter().map(|k| rep.ji_poset.label(k)).collect();
        assert_eq!(names, vec!["{1}", "{1,2}"]);
        assert!(rep.down[l.bottom()].is_empty());
        rep.verify(&l, B).unwrap();
    }

    #[test]
    fn up_examples() {
        let p = p3();
        let l = FiniteDistributiveLattice::of_down_sets(&p, B).unwrap();
        let i = birkhoff_up(&p, &l, 1).unwrap();
        assert_eq!(l.element(i).to_vec(), vec![0, 1]);
        let c = Poset::chain(2);
        let lc = FiniteDistributiveLattice::of_down_sets(&c, B).unwrap();
        assert_eq!(lc.element(birkhoff_up(&c, &lc, 1).unwrap()).to_vec(), vec![0, 1]);
        assert!(birkhoff_up(&p, &l, 7).is_err());
    }

    #[test]
    fn all_small_posets_round_trip() {
        for n in 0..=4 {
            for p in Poset::all_labeled(n) {
                verify_poset_round_trip(&p, B).unwrap();
            }
        }
    }

    proptest! {
        #[test]
        fn random_lattices_round_trip(seed in any::<u64>(), m in 0usize..6, g in 0usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = FiniteDistributiveLattice::random(m, g, &mut rng);
            let rep = BirkhoffRep::of(&l);
            prop_assert!(rep.verify(&l, B).is_ok());
        }
    }
}
