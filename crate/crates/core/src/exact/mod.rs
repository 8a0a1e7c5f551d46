//! Finite single-valued systems `x ↦ next(x)` on a discrete state space.
//!
//! The only metric on a finite set compatible with compactness is the
//! discrete one, so `cl = int = id` throughout: every closure or interior
//! in the continuous definitions is dropped here.
//!
//! Negative times act by preimage, which may be empty or multivalued.

mod lattices;
mod orbit;
pub mod fixtures;

pub use lattices::{
    anbhd_count, att_lattice, check_ar_pair, commuting_square_check, dual_attractor, dual_repeller, rep_lattice,
    rnbhd_count, ArViolation, AttractorOracle, ExactDuality, RepellerOracle, SquareViolation, MAX_LATTICE,
};
pub use orbit::{Direction, Orbit};

use crate::bitset::BitSet;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// States above this are refused by the `2^n` subset scans.
pub const DEFAULT_MAX_STATES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("system has no states")]
    Empty,
    #[error("duplicate state label {0:?}")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("next is not defined on {0:?}")]
    MapNotTotal(String),
    #[error("{0:?} is not forward invariant")]
    NotForwardInvariant(Vec<String>),
    #[error("{0:?} is not an attractor")]
    NotAnAttractor(Vec<String>),
    #[error("{0:?} is not a repeller")]
    NotARepeller(Vec<String>),
    #[error("invalid orbit: {0}")]
    InvalidOrbit(String),
    #[error("{what} too large: {size} > {bound}")]
    TooLarge { what: &'static str, size: usize, bound: usize },
}

/// Membership in the five invariance classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InvarianceFlags {
    pub invariant: bool,
    pub forward: bool,
    pub backward: bool,
    pub forward_backward: bool,
    pub strong: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDynSys {
    states: Vec<String>,
    next: Vec<usize>,
    pre: Vec<Vec<usize>>,
    /// The cycles of `next`, each as a set, ordered by least member.
    cycles: Vec<BitSet>,
    /// Index into `cycles` of the cycle each state eventually enters.
    limit: Vec<usize>,
}

impl FiniteDynSys {
    pub fn new(states: Vec<String>, next: Vec<usize>) -> Result<Self, ExactError> {
        if states.is_empty() {
            return Err(ExactError::Empty);
        }
        let mut seen = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if seen.insert(s.clone(), i).is_some() {
                return Err(ExactError::DuplicateState(s.clone()));
            }
        }
        if next.len() != states.len() {
            return Err(ExactError::MapNotTotal(states.get(next.len()).cloned().unwrap_or_default()));
        }
        if let Some(&bad) = next.iter().find(|&&y| y >= states.len()) {
            return Err(ExactError::UnknownState(bad.to_string()));
        }
        let n = states.len();
        let mut pre = vec![Vec::new(); n];
        for (x, &y) in next.iter().enumerate() {
            pre[y].push(x);
        }
        let (cycles, limit) = cycle_structure(&next);
        Ok(FiniteDynSys { states, next, pre, cycles, limit })
    }

    /// From `(state, image)` pairs keyed by label.
    pub fn from_map(states: Vec<String>, map: &[(String, String)]) -> Result<Self, ExactError> {
        let idx: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut next = vec![usize::MAX; states.len()];
        for (a, b) in map {
            let &x = idx.get(a.as_str()).ok_or_else(|| ExactError::UnknownState(a.clone()))?;
            let &y = idx.get(b.as_str()).ok_or_else(|| ExactError::UnknownState(b.clone()))?;
            next[x] = y;
        }
        if let Some(x) = next.iter().position(|&y| y == usize::MAX) {
            return Err(ExactError::MapNotTotal(states[x].clone()));
        }
        Self::new(states, next)
    }

    /// States `0..n` labelled by their index.
    pub fn from_next(next: Vec<usize>) -> Result<Self, ExactError> {
        Self::new(crate::order::numeric_labels(next.len()), next)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn label(&self, x: usize) -> &str {
        &self.states[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// Labels to a set; unknown labels are an error.
    pub fn set(&self, labels: &[&str]) -> Result<BitSet, ExactError> {
        labels
            .iter()
            .map(|l| self.index_of(l).ok_or_else(|| ExactError::UnknownState(l.to_string())))
            .collect()
    }

    /// Sorted labels of a set (carrier order).
    pub fn names(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|x| self.states[x].clone()).collect()
    }

    pub fn next(&self) -> &[usize] {
        &self.next
    }

    pub fn step(&self, x: usize) -> usize {
        self.next[x]
    }

    pub fn preimages(&self, x: usize) -> &[usize] {
        &self.pre[x]
    }

    pub fn full(&self) -> BitSet {
        BitSet::full(self.len())
    }

    pub fn cycles(&self) -> &[BitSet] {
        &self.cycles
    }

    /// The cycle that the forward orbit of `x` ends in.
    pub fn limit_cycle(&self, x: usize) -> &BitSet {
        &self.cycles[self.limit[x]]
    }

    /// `φ(X) = X`.
    pub fn is_surjective(&self) -> bool {
        self.pre.iter().all(|p| !p.is_empty())
    }

    fn image1(&self, s: &BitSet) -> BitSet {
        s.iter().map(|x| self.next[x]).collect()
    }

    fn preimage1(&self, s: &BitSet) -> BitSet {
        s.iter().flat_map(|x| self.pre[x].iter().copied()).collect()
    }

    /// `φ(t, S)`.
    pub fn image(&self, s: &BitSet, t: usize) -> BitSet {
        (0..t).fold(s.clone(), |acc, _| self.image1(&acc))
    }

    /// `φ(−t, S)`, possibly empty.
    pub fn preimage(&self, s: &BitSet, t: usize) -> BitSet {
        (0..t).fold(s.clone(), |acc, _| self.preimage1(&acc))
    }

    /// `Γ⁺(S)`.
    pub fn reachable_forward(&self, s: &BitSet) -> BitSet {
        closure(s, |x| self.image1(x))
    }

    /// `Γ⁻(S)`.
    pub fn reachable_backward(&self, s: &BitSet) -> BitSet {
        closure(s, |x| self.preimage1(x))
    }

    /// One step of image and preimage suffices for every `t`: the
    /// one-step conditions propagate by induction.
    pub fn classify_invariance(&self, s: &BitSet) -> InvarianceFlags {
        let img = self.image1(s);
        let pre = self.preimage1(s);
        let invariant = img == *s;
        let forward = img.is_subset(s);
        let backward = pre.is_subset(s);
        let forward_backward = forward && backward;
        InvarianceFlags { invariant, forward, backward, forward_backward, strong: invariant && forward_backward }
    }

    /// Maximal invariant subset, by pruning states whose image leaves or
    /// which have no preimage left.
    pub fn inv(&self, u: &BitSet) -> BitSet {
        let mut cur = u.clone();
        loop {
            let keep: BitSet = cur
                .iter()
                .filter(|&x| cur.contains(self.next[x]) && self.pre[x].iter().any(|&y| cur.contains(y)))
                .collect();
            if keep == cur {
                return cur;
            }
            cur = keep;
        }
    }

    /// Maximal forward invariant subset.
    pub fn inv_plus(&self, u: &BitSet) -> BitSet {
        let mut cur = u.clone();
        loop {
            let keep: BitSet = cur.iter().filter(|&x| cur.contains(self.next[x])).collect();
            if keep == cur {
                return cur;
            }
            cur = keep;
        }
    }

    /// `ω(U)`: union over the eventual cycle of `U, φ(U), φ²(U), …`.
    pub fn omega(&self, u: &BitSet) -> BitSet {
        tail_cycle_union(u, |s| self.image1(s))
    }

    /// `α(U)`: union over the eventual cycle of the preimage sequence.
    pub fn alpha(&self, u: &BitSet) -> BitSet {
        tail_cycle_union(u, |s| self.preimage1(s))
    }

    /// `ω(U)` as the union of the cycles reached from `U`.
    pub fn omega_by_cycles(&self, u: &BitSet) -> BitSet {
        let mut out = BitSet::new();
        for x in u {
            out.union_with(&self.cycles[self.limit[x]]);
        }
        out
    }

    /// `α(U)` as the states whose limit cycle meets `U`: `y ∈ φ(−s, U)` for
    /// infinitely many `s` iff the forward orbit of `y` visits `U`
    /// infinitely often.
    pub fn alpha_by_cycles(&self, u: &BitSet) -> BitSet {
        (0..self.len()).filter(|&y| !self.cycles[self.limit[y]].is_disjoint(u)).collect()
    }

    /// `S^⊕ = {x | ω(x) ∩ S = ∅}`.
    pub fn dual_plus(&self, s: &BitSet) -> BitSet {
        (0..self.len()).filter(|&x| self.omega(&BitSet::singleton(x)).is_disjoint(s)).collect()
    }

    /// `S^⊖`: states reached forward from a cycle disjoint from `S` (only
    /// periodic points carry complete backward orbits, and the orbital
    /// α-limit of such an orbit is the cycle itself).
    pub fn dual_minus(&self, s: &BitSet) -> BitSet {
        let mut out = BitSet::new();
        for c in &self.cycles {
            if c.is_disjoint(s) {
                out.union_with(&self.reachable_forward(c));
            }
        }
        out
    }

    /// The subsystem on a forward invariant set, relabelled in carrier order.
    pub fn restrict(&self, s: &BitSet) -> Result<FiniteDynSys, ExactError> {
        if !self.classify_invariance(s).forward {
            return Err(ExactError::NotForwardInvariant(self.names(s)));
        }
        let members = s.to_vec();
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let states = members.iter().map(|&x| self.states[x].clone()).collect();
        let next = members.iter().map(|&x| pos[&self.next[x]]).collect();
        FiniteDynSys::new(states, next)
    }

    /// Embeds a set of the restriction `self.restrict(s)` back into `self`.
    pub fn lift_from_restriction(&self, s: &BitSet, sub: &BitSet) -> BitSet {
        let members = s.to_vec();
        sub.iter().map(|i| members[i]).collect()
    }

    /// A trapping region is forward invariant with `φ(τ, U) ⊂ U`; with
    /// `cl = int = id` that is forward invariance, witnessed by `τ = 1`.
    pub fn trapping_witness(&self, u: &BitSet) -> Option<i64> {
        self.classify_invariance(u).forward.then_some(1)
    }

    pub fn is_trapping_region(&self, u: &BitSet) -> bool {
        self.trapping_witness(u).is_some()
    }

    /// Dually, a repelling region is backward invariant, witnessed by `τ = −1`.
    pub fn repelling_witness(&self, u: &BitSet) -> Option<i64> {
        self.classify_invariance(u).backward.then_some(-1)
    }

    pub fn is_repelling_region(&self, u: &BitSet) -> bool {
        self.repelling_witness(u).is_some()
    }

    /// `ω(U) ⊆ U`.
    pub fn is_attracting_nbhd(&self, u: &BitSet) -> bool {
        self.omega_by_cycles(u).is_subset(u)
    }

    /// `α(U) ⊆ U`.
    pub fn is_repelling_nbhd(&self, u: &BitSet) -> bool {
        self.alpha_by_cycles(u).is_subset(u)
    }

    /// `Inv(X)`, the top attractor.
    pub fn inv_all(&self) -> BitSet {
        self.cycles.iter().fold(BitSet::new(), |acc, c| acc.union(c))
    }

    /// A random map on `n` states.
    pub fn random<R: rand::Rng>(n: usize, rng: &mut R) -> Self {
        Self::from_next((0..n).map(|_| rng.gen_range(0..n)).collect()).expect("n > 0")
    }

    /// A random surjective map (a permutation) on `n` states.
    pub fn random_surjective<R: rand::Rng>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut next: Vec<usize> = (0..n).collect();
        next.shuffle(rng);
        Self::from_next(next).expect("n > 0")
    }

    /// The `i`-th of the `n^n` maps on `n` states (base-`n` digits).
    pub fn nth_map(n: usize, mut i: usize) -> Self {
        let next = (0..n)
            .map(|_| {
                let d = i % n;
                i /= n;
                d
            })
            .collect();
        Self::from_next(next).expect("n > 0")
    }
}

fn closure(s: &BitSet, step: impl Fn(&BitSet) -> BitSet) -> BitSet {
    let mut acc = s.clone();
    let mut frontier = s.clone();
    while !frontier.is_empty() {
        frontier = step(&frontier).difference(&acc);
        acc.union_with(&frontier);
    }
    acc
}

fn tail_cycle_union(start: &BitSet, step: impl Fn(&BitSet) -> BitSet) -> BitSet {
    let mut seen: HashMap<BitSet, usize> = HashMap::new();
    let mut seq = Vec::new();
    let mut cur = start.clone();
    loop {
        if let Some(&i) = seen.get(&cur) {
            return seq[i..].iter().fold(BitSet::new(), |acc: BitSet, s| acc.union(s));
        }
        seen.insert(cur.clone(), seq.len());
        seq.push(cur.clone());
        cur = step(&cur);
    }
}

fn cycle_structure(next: &[usize]) -> (Vec<BitSet>, Vec<usize>) {
    let n = next.len();
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    let mut cycle_id = vec![usize::MAX; n];
    let mut cycles: Vec<BitSet> = Vec::new();
    for s in 0..n {
        let mut path = Vec::new();
        let mut x = s;
        while state[x] == 0 {
            state[x] = 1;
            path.push(x);
            x = next[x];
        }
        if state[x] == 1 {
            let start = path.iter().position(|&y| y == x).unwrap();
            let c: BitSet = path[start..].iter().copied().collect();
            for &y in &path[start..] {
                cycle_id[y] = cycles.len();
            }
            cycles.push(c);
        }
        let id = cycle_id[x];
        for &y in &path {
            state[y] = 2;
            if cycle_id[y] == usize::MAX {
                cycle_id[y] = id;
            }
        }
    }
    // order cycles by least member for determinism
    let mut order: Vec<usize> = (0..cycles.len()).collect();
    order.sort_by_key(|&i| cycles[i].first());
    let mut rank = vec![0; cycles.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let sorted = order.iter().map(|&i| cycles[i].clone()).collect();
    (sorted, cycle_id.into_iter().map(|i| rank[i]).collect())
}
