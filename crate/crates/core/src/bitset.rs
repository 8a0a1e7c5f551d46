//! Small dense bit sets over `0..n`.
//!
//! Every set-valued object in the crate (down-sets, state sets, cell sets,
//! lattice elements) is a `BitSet`. Trailing zero words are always trimmed so
//! that derived equality and hashing are canonical regardless of how a value
//! was produced.

use smallvec::SmallVec;
use std::cmp::Ordering;
use std::fmt;

const W: usize = 64;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: SmallVec<[u64; 2]>,
}

impl BitSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, 1, …, n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 2]> = SmallVec::new();
        words.resize(n / W, u64::MAX);
        if n % W != 0 {
            words.push((1u64 << (n % W)) - 1);
        }
        BitSet { words }
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::new();
        s.insert(i);
        s
    }

    /// Builds a set from the low `n` bits of a mask. Handy for subset loops.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = BitSet { words: SmallVec::from_slice(&[mask]) };
        s.trim();
        s
    }

    /// The low 64 bits, for callers that know the universe is small.
    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.words.len() <= 1, "set does not fit in a u64 mask");
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / W, i % W);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i / W, i % W);
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        self.trim();
        had
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        let (w, b) = (i / W, i % W);
        w < self.words.len() && self.words[w] >> b & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    /// Complement relative to `{0, …, n-1}`.
    pub fn complement(&self, n: usize) -> BitSet {
        BitSet::full(n).difference(self)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        self.words.truncate(other.words.len());
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= *b;
        }
        self.trim();
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !*b;
        }
        self.trim();
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { words: &self.words, word: 0, cur: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Size first, then lexicographic on the sorted member lists.
    ///
    /// This is the canonical order used for every enumerated family so that
    /// emitted files are byte-stable.
    pub fn canonical_cmp(&self, other: &BitSet) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl FromIterator<usize> for BitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = BitSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl<'a> IntoIterator for &'a BitSet {
    type Item = usize;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.word * W + b);
            }
            self.word += 1;
            if self.word >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.word];
        }
    }
}

impl Ord for BitSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Serialised as the sorted member list.
impl serde::Serialize for BitSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> serde::Deserialize<'de> for BitSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<usize>::deserialize(d)?.into_iter().collect())
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trailing_words_do_not_affect_equality() {
        let mut a = BitSet::singleton(130);
        a.remove(130);
        assert_eq!(a, BitSet::new());
        let b: BitSet = [1, 2].into_iter().collect();
        let c = b.union(&BitSet::singleton(100)).difference(&BitSet::singleton(100));
        assert_eq!(b, c);
    }

    #[test]
    fn full_and_complement() {
        assert_eq!(BitSet::full(0), BitSet::new());
        assert_eq!(BitSet::full(64).len(), 64);
        assert_eq!(BitSet::full(70).len(), 70);
        let s: BitSet = [0, 65].into_iter().collect();
        assert_eq!(s.complement(70).len(), 68);
        assert!(!s.complement(70).contains(65));
    }

    #[test]
    fn canonical_order() {
        let a: BitSet = [2].into_iter().collect();
        let b: BitSet = [0, 1].into_iter().collect();
        let c: BitSet = [0, 2].into_iter().collect();
        let mut v = vec![c.clone(), b.clone(), a.clone(), BitSet::new()];
        v.sort();
        assert_eq!(v, vec![BitSet::new(), a, b, c]);
    }

    fn arb() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..150, 0..20)
    }

    proptest! {
        #[test]
        fn agrees_with_btreeset(xs in arb(), ys in arb()) {
            use std::collections::BTreeSet;
            let (a, b): (BitSet, BitSet) = (xs.iter().copied().collect(), ys.iter().copied().collect());
            let (sa, sb): (BTreeSet<usize>, BTreeSet<usize>) = (xs.into_iter().collect(), ys.into_iter().collect());
            prop_assert_eq!(a.union(&b).to_vec(), sa.union(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.intersection(&b).to_vec(), sa.intersection(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.difference(&b).to_vec(), sa.difference(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.is_subset(&b), sa.is_subset(&sb));
            prop_assert_eq!(a.is_disjoint(&b), sa.is_disjoint(&sb));
            prop_assert_eq!(a.len(), sa.len());
        }
    }
}
