//! Weak invariant parts: cells admitting walks that stay inside a set.

use super::CellMap;
use crate::bitset::BitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

impl CellMap {
    /// Cells of `s` lying on a directed cycle of the graph restricted to `s`
    /// (nontrivial strongly connected components and self-loops).
    fn recurrent_in(&self, s: &BitSet) -> BitSet {
        let cells: Vec<usize> = s.to_vec();
        let mut g: DiGraph<usize, ()> = DiGraph::with_capacity(cells.len(), 0);
        let mut node = vec![NodeIndex::end(); self.len()];
        for &c in &cells {
            node[c] = g.add_node(c);
        }
        for &c in &cells {
            for d in self.arrows(c).iter().filter(|&d| s.contains(d)) {
                g.add_edge(node[c], node[d], ());
            }
        }
        let mut out = BitSet::new();
        for comp in tarjan_scc(&g) {
            let cyclic = comp.len() > 1 || g.contains_edge(comp[0], comp[0]);
            if cyclic {
                for v in comp {
                    out.insert(g[v]);
                }
            }
        }
        out
    }

    /// Everything in `s` reachable from `seeds` along arrows (or against them
    /// when `backward`) without leaving `s`.
    fn reach_within(&self, s: &BitSet, seeds: &BitSet, backward: bool) -> BitSet {
        let mut seen = seeds.clone();
        let mut stack = seeds.to_vec();
        while let Some(c) = stack.pop() {
            let nbrs = if backward { &self.pre[c] } else { &self.arrows[c] };
            for d in nbrs.iter() {
                if s.contains(d) && seen.insert(d) {
                    stack.push(d);
                }
            }
        }
        seen
    }

    /// Cells of `s` on a bi-infinite walk inside `s`.
    pub fn comb_inv(&self, s: &BitSet) -> BitSet {
        let rec = self.recurrent_in(s);
        self.reach_within(s, &rec, false).intersection(&self.reach_within(s, &rec, true))
    }

    /// Cells of `s` with an infinite forward walk inside `s`.
    pub fn comb_inv_plus(&self, s: &BitSet) -> BitSet {
        let rec = self.recurrent_in(s);
        self.reach_within(s, &rec, true)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;
    use proptest::prelude::*;

    fn three_cycle() -> CellMap {
        CellMap::discrete(vec![vec![1], vec![2], vec![0]]).unwrap()
    }

    // Oracle by definition: a cell has an infinite forward walk in s iff a
    // walk of length |s| exists from it; bi-infinite iff also a backward one.
    fn walks(m: &CellMap, s: &BitSet, c: usize, backward: bool) -> bool {
        let mut cur = BitSet::singleton(c);
        for _ in 0..=s.len() {
            cur = if backward { m.preimage(&cur) } else { m.image(&cur) }.intersection(s);
            if cur.is_empty() {
                return false;
            }
        }
        true
    }

    #[test]
    fn chain_without_cycles() {
        let m = CellMap::discrete(vec![vec![1], vec![2], vec![2]]).unwrap();
        // c2 has a self-arrow here; c0 has no past
        assert_eq!(m.comb_inv(&m.full()).to_vec(), vec![2]);
        assert_eq!(m.comb_inv_plus(&m.full()).to_vec(), vec![0, 1, 2]);
        let s: BitSet = [0, 1].into_iter().collect();
        assert!(m.comb_inv(&s).is_empty());
        assert!(m.comb_inv_plus(&s).is_empty());
        let c = three_cycle();
        assert_eq!(c.comb_inv(&c.full()), c.full());
        assert!(c.comb_inv(&BitSet::new()).is_empty());
    }

    #[test]
    fn g1_full_grid() {
        let m = fixtures::g1(16);
        assert!(m.is_attracting_block(&m.full()) && m.is_repelling_block(&m.full()));
        assert!(m.is_attracting_block(&m.grid().cells_meeting(-0.25, 0.25)));
        // every cell lies on a walk between the fixed-point cells
        assert_eq!(m.comb_inv(&m.full()), m.full());
        assert_eq!(m.comb_inv_plus(&m.full()), m.full());
    }

    #[test]
    fn complement_duality_exhaustive() {
        for m in [fixtures::g1(14), fixtures::g2(12), fixtures::y1(12)] {
            let n = m.len();
            for mask in 0u64..1 << n {
                let s = BitSet::from_mask(mask);
                assert_eq!(m.is_attracting_block(&s), m.is_repelling_block(&s.complement(n)));
            }
        }
    }

    #[test]
    fn matches_walk_oracle_on_g2() {
        let m = fixtures::g2(10);
        for mask in 0u64..1 << 10 {
            let s = BitSet::from_mask(mask);
            let inv = m.comb_inv(&s);
            let plus = m.comb_inv_plus(&s);
            for c in s.iter() {
                let f = walks(&m, &s, c, false);
                assert_eq!(plus.contains(c), f);
                assert_eq!(inv.contains(c), f && walks(&m, &s, c, true));
            }
        }
    }

    fn arb_map() -> impl Strategy<Value = CellMap> {
        (2usize..9).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(0..n, 1..3), n)
                .prop_map(|a| CellMap::discrete(a).unwrap())
        })
    }

    proptest! {
        #[test]
        fn monotone_and_idempotent(m in arb_map(), a in any::<u64>(), b in any::<u64>()) {
            let n = m.len();
            let full = m.full();
            let s = BitSet::from_mask(a).intersection(&full);
            let t = s.union(&BitSet::from_mask(b).intersection(&full));
            prop_assert!(m.comb_inv(&s).is_subset(&m.comb_inv(&t)));
            prop_assert!(m.comb_inv_plus(&s).is_subset(&m.comb_inv_plus(&t)));
            prop_assert_eq!(m.comb_inv(&m.comb_inv(&s)), m.comb_inv(&s));
            prop_assert_eq!(m.comb_inv_plus(&m.comb_inv_plus(&s)), m.comb_inv_plus(&s));
            prop_assert!(m.comb_inv(&s).is_subset(&m.comb_inv_plus(&s)));
            prop_assert_eq!(m.is_attracting_block(&s), m.is_repelling_block(&s.complement(n)));
        }

        #[test]
        fn join_laws(m in arb_map(), a in any::<u64>(), b in any::<u64>()) {
            let full = m.full();
            let n1 = m.attracting_hull(&BitSet::from_mask(a).intersection(&full));
            let n2 = m.attracting_hull(&BitSet::from_mask(b).intersection(&full));
            prop_assert_eq!(m.comb_inv(&n1.union(&n2)), m.comb_inv(&n1).union(&m.comb_inv(&n2)));
            prop_assert_eq!(
                m.comb_inv(&n1.intersection(&n2)),
                m.comb_inv(&m.comb_inv(&n1).intersection(&m.comb_inv(&n2)))
            );
            let r1 = m.repelling_hull(&BitSet::from_mask(a).intersection(&full));
            let r2 = m.repelling_hull(&BitSet::from_mask(b).intersection(&full));
            prop_assert_eq!(m.comb_inv_plus(&r1.union(&r2)), m.comb_inv_plus(&r1).union(&m.comb_inv_plus(&r2)));
        }
    }
}
