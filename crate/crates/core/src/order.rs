//! Finite posets and their down-set lattices.

use crate::bitset::BitSet;
use rand::Rng;
use std::collections::HashMap;
use thiserror::Error;

/// Default cap on `|P|` for down-set enumeration.
pub const DEFAULT_DOWNSET_BOUND: usize = 20;

/// A down-set is stored as its member set over the carrier indices.
pub type DownSet = BitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation matrix is not square")]
    NotSquare,
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("not reflexive at {0:?}")]
    NotReflexive(String),
    #[error("not antisymmetric: {0:?} <= {1:?} <= {0:?}")]
    NotAntisymmetric(String, String),
    #[error("not transitive: {0:?} <= {1:?} <= {2:?} but not {0:?} <= {2:?}")]
    NotTransitive(String, String, String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("not a down-set: {0:?}")]
    NotADownSet(Vec<String>),
    #[error("poset has {size} elements, enumeration bound is {bound}")]
    TooLarge { size: usize, bound: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    // up[p] = {q : p <= q}, down[p] = {q : q <= p}
    up: Vec<BitSet>,
    down: Vec<BitSet>,
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Poset").field("labels", &self.labels).field("covers", &self.covers()).finish()
    }
}

fn check_labels(labels: &[String]) -> Result<(), OrderError> {
    let mut seen = HashMap::new();
    for l in labels {
        if seen.insert(l.as_str(), ()).is_some() {
            return Err(OrderError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

impl Poset {
    /// Validates a full relation matrix (`leq[p][q]` means `p ≤ q`).
    pub fn from_matrix(labels: Vec<String>, leq: &[Vec<bool>]) -> Result<Self, OrderError> {
        let n = labels.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(OrderError::NotSquare);
        }
        check_labels(&labels)?;
        let l = |i: usize| labels[i].clone();
        for p in 0..n {
            if !leq[p][p] {
                return Err(OrderError::NotReflexive(l(p)));
            }
        }
        for p in 0..n {
            for q in p + 1..n {
                if leq[p][q] && leq[q][p] {
                    return Err(OrderError::NotAntisymmetric(l(p), l(q)));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                if !leq[p][q] {
                    continue;
                }
                for r in 0..n {
                    if leq[q][r] && !leq[p][r] {
                        return Err(OrderError::NotTransitive(l(p), l(q), l(r)));
                    }
                }
            }
        }
        let up: Vec<BitSet> = (0..n).map(|p| (0..n).filter(|&q| leq[p][q]).collect()).collect();
        let down: Vec<BitSet> = (0..n).map(|p| (0..n).filter(|&q| leq[q][p]).collect()).collect();
        Ok(Poset { labels, up, down })
    }

    /// Reflexive–transitive closure of a cover (or any generating) relation.
    pub fn from_covers(labels: Vec<String>, covers: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(OrderError::UnknownElement(format!("#{}", a.max(b))));
            }
            leq[a][b] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::from_matrix(labels, &leq)
    }

    pub fn from_labeled_covers(labels: Vec<String>, covers: &[(String, String)]) -> Result<Self, OrderError> {
        let idx: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut pairs = Vec::with_capacity(covers.len());
        for (a, b) in covers {
            let ia = *idx.get(a.as_str()).ok_or_else(|| OrderError::UnknownElement(a.clone()))?;
            let ib = *idx.get(b.as_str()).ok_or_else(|| OrderError::UnknownElement(b.clone()))?;
            pairs.push((ia, ib));
        }
        Self::from_covers(labels, &pairs)
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_covers(numeric_labels(n), &[]).expect("antichain is a poset")
    }

    pub fn chain(n: usize) -> Self {
        let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_covers(numeric_labels(n), &covers).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, OrderError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| OrderError::UnknownElement(label.to_string()))
    }

    #[inline]
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.up[p].contains(q)
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq(p, q)
    }

    /// `↓p`.
    pub fn down(&self, p: usize) -> &BitSet {
        &self.down[p]
    }

    pub fn up(&self, p: usize) -> &BitSet {
        &self.up[p]
    }

    /// `↓p` by label.
    pub fn down_set(&self, label: &str) -> Result<DownSet, OrderError> {
        Ok(self.down[self.index_of(label)?].clone())
    }

    /// `↓p \ {p}`.
    pub fn strict_down(&self, p: usize) -> BitSet {
        let mut s = self.down[p].clone();
        s.remove(p);
        s
    }

    pub fn carrier(&self) -> BitSet {
        BitSet::full(self.len())
    }

    pub fn is_down_set(&self, s: &BitSet) -> bool {
        s.iter().all(|p| p < self.len() && self.down[p].is_subset(s))
    }

    pub fn is_up_set(&self, s: &BitSet) -> bool {
        s.iter().all(|p| p < self.len() && self.up[p].is_subset(s))
    }

    /// Down-closure of an arbitrary subset.
    pub fn down_closure(&self, s: &BitSet) -> BitSet {
        let mut out = BitSet::new();
        for p in s {
            out.union_with(&self.down[p]);
        }
        out
    }

    /// Minimal elements of `s` (with respect to the order restricted to `s`).
    pub fn minimal_in(&self, s: &BitSet) -> BitSet {
        s.iter().filter(|&p| self.strict_down(p).is_disjoint(s)).collect()
    }

    pub fn maximal_in(&self, s: &BitSet) -> BitSet {
        s.iter()
            .filter(|&p| {
                let mut u = self.up[p].clone();
                u.remove(p);
                u.is_disjoint(s)
            })
            .collect()
    }

    /// Cover pairs `(p, q)` with `p ⋖ q`, in lexicographic index order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if self.lt(p, q) && !(0..n).any(|r| self.lt(p, r) && self.lt(r, q)) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// A linear extension, smallest index first among the available minima.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut placed = BitSet::new();
        let mut order = Vec::with_capacity(self.len());
        while order.len() < self.len() {
            let p = (0..self.len())
                .find(|&p| !placed.contains(p) && self.strict_down(p).is_subset(&placed))
                .expect("finite posets always have a minimal element");
            placed.insert(p);
            order.push(p);
        }
        order
    }

    /// `P^∂`: same carrier, reversed order.
    pub fn dual(&self) -> Poset {
        Poset { labels: self.labels.clone(), up: self.down.clone(), down: self.up.clone() }
    }

    /// `O(P)` in canonical order (size, then lexicographic).
    pub fn all_down_sets(&self, bound: usize) -> Result<Vec<DownSet>, OrderError> {
        if self.len() > bound {
            return Err(OrderError::TooLarge { size: self.len(), bound });
        }
        let ext = self.linear_extension();
        let mut out = Vec::new();
        let mut cur = BitSet::new();
        self.down_sets_rec(&ext, 0, &mut cur, &mut out);
        out.sort();
        Ok(out)
    }

    fn down_sets_rec(&self, ext: &[usize], i: usize, cur: &mut BitSet, out: &mut Vec<DownSet>) {
        if i == ext.len() {
            out.push(cur.clone());
            return;
        }
        let p = ext[i];
        self.down_sets_rec(ext, i + 1, cur, out);
        // predecessors precede p in the extension, so they are already decided
        if self.strict_down(p).is_subset(cur) {
            cur.insert(p);
            self.down_sets_rec(ext, i + 1, cur, out);
            cur.remove(p);
        }
    }

    /// `α ↦ P \ α`, a down-set of `P^∂`.
    pub fn complement_map(&self, alpha: &BitSet) -> Result<DownSet, OrderError> {
        if !self.is_down_set(alpha) {
            return Err(OrderError::NotADownSet(self.names(alpha)));
        }
        Ok(alpha.complement(self.len()))
    }

    pub fn names(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|p| self.labels[p].clone()).collect()
    }

    /// Relabels through a permutation: element `i` of `self` becomes element
    /// `perm[i]` of the result.
    pub fn permute(&self, perm: &[usize]) -> Poset {
        let n = self.len();
        let mut labels = vec![String::new(); n];
        for i in 0..n {
            labels[perm[i]] = self.labels[i].clone();
        }
        let mut leq = vec![vec![false; n]; n];
        for p in 0..n {
            for q in 0..n {
                leq[perm[p]][perm[q]] = self.leq(p, q);
            }
        }
        Poset::from_matrix(labels, &leq).expect("relabeling preserves the axioms")
    }

    /// Random poset: each pair `i < j` is related with probability `density`,
    /// then transitively closed; carrier order is then shuffled.
    pub fn random<R: Rng>(n: usize, density: f64, rng: &mut R) -> Poset {
        let mut covers = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    covers.push((i, j));
                }
            }
        }
        let p = Self::from_covers(numeric_labels(n), &covers).expect("DAG closure is a poset");
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut out = p.permute(&perm);
        out.labels = numeric_labels(n);
        out
    }

    /// Every partial order on the labels `0..n` (raw labeled enumeration).
    pub fn all_labeled(n: usize) -> Vec<Poset> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut out = Vec::new();
        let mut state = vec![0u8; pairs.len()];
        loop {
            let mut leq = vec![vec![false; n]; n];
            for (i, row) in leq.iter_mut().enumerate() {
                row[i] = true;
            }
            for (k, &(i, j)) in pairs.iter().enumerate() {
                match state[k] {
                    1 => leq[i][j] = true,
                    2 => leq[j][i] = true,
                    _ => {}
                }
            }
            if let Ok(p) = Poset::from_matrix(numeric_labels(n), &leq) {
                out.push(p);
            }
            // odometer in base 3
            let mut k = 0;
            loop {
                if k == state.len() {
                    return out;
                }
                state[k] += 1;
                if state[k] < 3 {
                    break;
                }
                state[k] = 0;
                k += 1;
            }
        }
    }
}

pub fn numeric_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// `p ≤ p' ⇒ f(p) ≤ f(p')`.
pub fn is_order_preserving(f: &[usize], p: &Poset, q: &Poset) -> Result<bool, OrderError> {
    check_total(f, p, q)?;
    Ok((0..p.len()).all(|a| (0..p.len()).all(|b| !p.leq(a, b) || q.leq(f[a], f[b]))))
}

/// `p ≤ p' ⇔ f(p) ≤ f(p')`.
pub fn is_order_embedding(f: &[usize], p: &Poset, q: &Poset) -> Result<bool, OrderError> {
    check_total(f, p, q)?;
    Ok((0..p.len()).all(|a| (0..p.len()).all(|b| p.leq(a, b) == q.leq(f[a], f[b]))))
}

fn check_total(f: &[usize], p: &Poset, q: &Poset) -> Result<(), OrderError> {
    if f.len() != p.len() {
        return Err(OrderError::UnknownElement(format!("map covers {} of {} elements", f.len(), p.len())));
    }
    if let Some(&bad) = f.iter().find(|&&x| x >= q.len()) {
        return Err(OrderError::UnknownElement(format!("#{bad}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p3() -> Poset {
        let l = vec!["1".into(), "2".into(), "3".into()];
        Poset::from_covers(l, &[(0, 1), (0, 2)]).unwrap()
    }

    fn set(xs: &[usize]) -> BitSet {
        xs.iter().copied().collect()
    }

    // brute force: filter all subsets by downward closure, scanning the matrix
    fn oracle_down_sets(p: &Poset) -> Vec<BitSet> {
        let n = p.len();
        let mut out: Vec<BitSet> = (0u64..1 << n)
            .map(BitSet::from_mask)
            .filter(|s| s.iter().all(|a| (0..n).all(|b| !p.leq(b, a) || s.contains(b))))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn validate_examples() {
        let l3 = || vec!["1".to_string(), "2".into(), "3".into()];
        let id = vec![vec![true, false, false], vec![false, true, false], vec![false, false, true]];
        let a = Poset::from_matrix(l3(), &id).unwrap();
        assert!(a.covers().is_empty());
        p3();
        let bad = vec![vec![true, true, false], vec![true, true, false], vec![false, false, true]];
        assert_eq!(Poset::from_matrix(l3(), &bad), Err(OrderError::NotAntisymmetric("1".into(), "2".into())));
        let nr = vec![vec![true, false], vec![false, false]];
        assert_eq!(
            Poset::from_matrix(vec!["a".into(), "b".into()], &nr),
            Err(OrderError::NotReflexive("b".into()))
        );
        let nt = vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]];
        assert_eq!(
            Poset::from_matrix(l3(), &nt),
            Err(OrderError::NotTransitive("1".into(), "2".into(), "3".into()))
        );
        assert_eq!(
            Poset::from_matrix(vec!["a".into(), "a".into()], &[vec![true, false], vec![false, true]]),
            Err(OrderError::DuplicateLabel("a".into()))
        );
    }

    #[test]
    fn down_set_examples() {
        let p = p3();
        assert_eq!(p.down_set("1").unwrap(), set(&[0]));
        assert_eq!(p.down_set("2").unwrap(), set(&[0, 1]));
        assert_eq!(p.down_set("9"), Err(OrderError::UnknownElement("9".into())));
        let a = Poset::antichain(2);
        assert_eq!(a.down_set("0").unwrap(), set(&[0]));
    }

    #[test]
    fn o_p3() {
        let p = p3();
        let o = p.all_down_sets(20).unwrap();
        assert_eq!(o, vec![set(&[]), set(&[0]), set(&[0, 1]), set(&[0, 2]), set(&[0, 1, 2])]);
        assert_eq!(o, oracle_down_sets(&p));
        assert_eq!(Poset::chain(2).all_down_sets(20).unwrap(), vec![set(&[]), set(&[0]), set(&[0, 1])]);
        assert_eq!(Poset::antichain(5).all_down_sets(20).unwrap().len(), 32);
        assert_eq!(Poset::chain(7).all_down_sets(20).unwrap().len(), 8);
        assert!(matches!(Poset::antichain(4).all_down_sets(3), Err(OrderError::TooLarge { .. })));
    }

    #[test]
    fn dual_examples() {
        let p = p3();
        let d = p.dual();
        assert!(d.leq(1, 0) && d.leq(2, 0) && !d.leq(0, 1));
        assert_eq!(d.dual(), p);
        assert_eq!(Poset::antichain(3).dual(), Poset::antichain(3));
    }

    #[test]
    fn complement_examples() {
        let p = p3();
        let c = p.complement_map(&set(&[0])).unwrap();
        assert_eq!(c, set(&[1, 2]));
        assert!(p.dual().is_down_set(&c));
        assert_eq!(p.complement_map(&BitSet::new()).unwrap(), set(&[0, 1, 2]));
        assert_eq!(p.complement_map(&set(&[0, 1, 2])).unwrap(), BitSet::new());
        assert!(matches!(p.complement_map(&set(&[1])), Err(OrderError::NotADownSet(_))));
    }

    #[test]
    fn order_maps() {
        let p = p3();
        let id = [0, 1, 2];
        assert!(is_order_preserving(&id, &p, &p).unwrap());
        assert!(is_order_embedding(&id, &p, &p).unwrap());
        let c = Poset::chain(2);
        assert!(is_order_preserving(&[0, 0, 0], &p, &c).unwrap());
        assert!(!is_order_embedding(&[0, 0, 0], &p, &c).unwrap());
        assert!(!is_order_preserving(&id, &p, &p.dual()).unwrap());
        assert!(is_order_preserving(&[0, 5, 0], &p, &c).is_err());
    }

    #[test]
    fn labeled_poset_counts() {
        // OEIS A001035
        let counts: Vec<usize> = (0..=4).map(|n| Poset::all_labeled(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 19, 219]);
    }

    #[test]
    fn enumeration_matches_oracle_exhaustively() {
        for n in 0..=4 {
            for p in Poset::all_labeled(n) {
                assert_eq!(p.all_down_sets(20).unwrap(), oracle_down_sets(&p));
            }
        }
    }

    proptest! {
        #[test]
        fn random_posets_behave(seed in any::<u64>(), n in 0usize..9, d in 0.0f64..0.8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Poset::random(n, d, &mut rng);
            prop_assert_eq!(p.dual().dual(), p.clone());
            let o = p.all_down_sets(20).unwrap();
            prop_assert_eq!(&o, &oracle_down_sets(&p));
            let od = p.dual().all_down_sets(20).unwrap();
            prop_assert_eq!(o.len(), od.len());
            for a in &o {
                let ca = p.complement_map(a).unwrap();
                prop_assert!(od.contains(&ca));
                prop_assert_eq!(p.dual().complement_map(&ca).unwrap(), a.clone());
                for b in &o {
                    prop_assert!(o.contains(&a.union(b)));
                    prop_assert!(o.contains(&a.intersection(b)));
                    let cb = p.complement_map(b).unwrap();
                    prop_assert_eq!(p.complement_map(&a.union(b)).unwrap(), ca.intersection(&cb));
                    prop_assert_eq!(p.complement_map(&a.intersection(b)).unwrap(), ca.union(&cb));
                    prop_assert_eq!(a.is_subset(b), cb.is_subset(&ca));
                }
            }
        }
    }
}
