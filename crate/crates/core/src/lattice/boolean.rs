use super::{check_hom, BirkhoffRep, FiniteDistributiveLattice, LatticeError};
use crate::bitset::BitSet;
use crate::order::Poset;

/// `B(L) = 2^{J(L)}` together with the embedding `j = ↓^∨`.
#[derive(Debug, Clone)]
pub struct BooleanAlgebraRep {
    pub ground: Poset,
    pub ji: Vec<usize>,
    /// `j(a)` for every lattice element `a`.
    pub embedding: Vec<BitSet>,
}

pub fn booleanize(l: &FiniteDistributiveLattice) -> BooleanAlgebraRep {
    let rep = BirkhoffRep::of(l);
    BooleanAlgebraRep { ground: rep.ji_poset, ji: rep.ji, embedding: rep.down }
}

impl BooleanAlgebraRep {
    pub fn ground_len(&self) -> usize {
        self.ground.len()
    }

    /// Number of elements of `B(L)`; saturates for large grounds.
    pub fn size(&self) -> u128 {
        1u128.checked_shl(self.ground.len() as u32).unwrap_or(u128::MAX)
    }

    pub fn complement(&self, a: &BitSet) -> BitSet {
        a.complement(self.ground.len())
    }

    /// `a ≤ b`, evaluated as `a ∧ b = a` and cross-checked against
    /// `a ∧ b^c = 0`.
    pub fn leq(&self, a: &BitSet, b: &BitSet) -> bool {
        let first = a.intersection(b) == *a;
        let second = a.intersection(&self.complement(b)).is_empty();
        assert_eq!(first, second, "order forms disagree on {a:?} ≤ {b:?}");
        first
    }

    pub fn j(&self, a: usize) -> &BitSet {
        &self.embedding[a]
    }
}

/// The unique Boolean hom `B(f) : 2^P → B(L)` extending `j ∘ f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanExtension {
    /// `B(f)({p})` for each `p ∈ P`.
    pub atoms: Vec<BitSet>,
}

impl BooleanExtension {
    /// `B(f)(α) = ⋃_{p∈α} B(f)({p})`.
    pub fn apply(&self, alpha: &BitSet) -> BitSet {
        let mut out = BitSet::new();
        for p in alpha {
            out.union_with(&self.atoms[p]);
        }
        out
    }
}

/// `source` must be `O(P)`; `f` a bounded hom `O(P) → L` as a dense table.
///
/// Atom images are forced: `↓p` and `↓p \ {p}` both lie in `O(P)`, so
/// `B(f)({p}) = j(f(↓p)) \ j(f(↓p \ {p}))`.
pub fn boolean_extension(
    p: &Poset,
    source: &FiniteDistributiveLattice,
    f: &[usize],
    target: &FiniteDistributiveLattice,
    b: &BooleanAlgebraRep,
) -> Result<BooleanExtension, LatticeError> {
    check_hom(f, source, target).map_err(LatticeError::NotAHom)?;
    let atoms = (0..p.len())
        .map(|x| {
            let full = source.index_of(p.down(x)).expect("↓p ∈ O(P)");
            let below = source.index_of(&p.strict_down(x)).expect("↓p∖p ∈ O(P)");
            b.j(f[full]).difference(b.j(f[below]))
        })
        .collect();
    Ok(BooleanExtension { atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{hom_from_order_map, random_order_preserving};
    use crate::order::DEFAULT_DOWNSET_BOUND as B;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p3() -> Poset {
        Poset::from_covers(vec!["1".into(), "2".into(), "3".into()], &[(0, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn booleanize_examples() {
        let l = FiniteDistributiveLattice::of_down_sets(&p3(), B).unwrap();
        let b = booleanize(&l);
        assert_eq!(b.ground_len(), 3);
        assert_eq!(b.size(), 8);
        assert!(b.j(l.bottom()).is_empty());
        assert_eq!(b.j(l.top()).len(), 3);
        let chain = FiniteDistributiveLattice::of_down_sets(&Poset::chain(4), B).unwrap();
        assert_eq!(booleanize(&chain).ground_len(), 4);
        // already Boolean: j is a bijection onto 2^ground
        let sq = FiniteDistributiveLattice::of_down_sets(&Poset::antichain(3), B).unwrap();
        let bs = booleanize(&sq);
        let mut imgs = bs.embedding.clone();
        imgs.sort();
        imgs.dedup();
        assert_eq!(imgs.len(), 8);
    }

    #[test]
    fn leq_second_form() {
        let sq = FiniteDistributiveLattice::of_down_sets(&Poset::antichain(2), B).unwrap();
        let b = booleanize(&sq);
        let a = b.j(sq.index_of(&BitSet::singleton(0)).unwrap()).clone();
        assert!(a.intersection(&b.complement(&a)).is_empty());
        assert!(b.leq(&a, &a));
    }

    #[test]
    fn identity_extension_atom() {
        let p = p3();
        let l = FiniteDistributiveLattice::of_down_sets(&p, B).unwrap();
        let b = booleanize(&l);
        let id: Vec<usize> = (0..l.len()).collect();
        let ext = boolean_extension(&p, &l, &id, &l, &b).unwrap();
        // B(id)({2}) = {↓2}, the singleton of the join-irreducible {1,2}
        let atom: Vec<&str> = ext.atoms[1].iter().map(|k| b.ground.label(k)).collect();
        assert_eq!(atom, vec!["{1,2}"]);
        // restricted to O(P) this is the inclusion O(P) ⊂ 2^P (up to ↓)
        for (a, alpha) in l.elements().iter().enumerate() {
            assert_eq!(&ext.apply(alpha), b.j(a));
        }
    }

    #[test]
    fn constant_zero_rejected() {
        let p = p3();
        let l = FiniteDistributiveLattice::of_down_sets(&p, B).unwrap();
        let b = booleanize(&l);
        let zero = vec![0; l.len()];
        assert!(matches!(boolean_extension(&p, &l, &zero, &l, &b), Err(LatticeError::NotAHom(_))));
    }

    proptest! {
        #[test]
        fn eqs_3_and_4_on_random_homs(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Poset::random(rng.gen_range(1..6), 0.4, &mut rng);
            let q = Poset::random(rng.gen_range(0..6), 0.4, &mut rng);
            let (lp, lq) = (FiniteDistributiveLattice::of_down_sets(&p, B).unwrap(), FiniteDistributiveLattice::of_down_sets(&q, B).unwrap());
            let g = random_order_preserving(&q, &p, &mut rng);
            let f = hom_from_order_map(&g, &lp, &lq);
            let b = booleanize(&lq);
            let ext = boolean_extension(&p, &lp, &f, &lq, &b).unwrap();
            for x in 0..p.len() {
                for y in x + 1..p.len() {
                    prop_assert!(ext.atoms[x].is_disjoint(&ext.atoms[y]));
                }
            }
            for (a, alpha) in lp.elements().iter().enumerate() {
                prop_assert_eq!(&ext.apply(alpha), b.j(f[a]));
            }
            let n = p.len();
            for m in 0u64..1 << n {
                let s = BitSet::from_mask(m);
                prop_assert_eq!(ext.apply(&s.complement(n)), b.complement(&ext.apply(&s)));
            }
        }
    }
}
