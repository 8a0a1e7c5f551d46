//! Bounded searches for failures of the spaciousness conditions.
//!
//! Both conditions only ever ask for conditioners to be *small*: shrinking a
//! family inside its fibers can only help `k(γ) ∧ v_α ≤ k(β)` and
//! `v_μ ∧ v_α ≤ k(λ)`. Fibers of a hom between `∩`-closed set lattices are
//! closed under `∩`, so each has a least member, and the family of fiber
//! minima is the best possible choice. Deciding whether *some* conditioner
//! family exists therefore reduces to testing that one family.

use super::{LiftOracle, ShrinkSource};
use crate::bitset::BitSet;
use crate::lattice::{check_hom, FiniteDistributiveLattice, HomViolation};
use crate::order::{Poset, DEFAULT_DOWNSET_BOUND};
use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;
use thiserror::Error;

/// A surjective hom `h : K → L` between materialised set lattices.
#[derive(Debug, Clone)]
pub struct MaterializedEpi {
    pub domain: FiniteDistributiveLattice,
    pub target: FiniteDistributiveLattice,
    pub h: Vec<usize>,
    fibers: Vec<Vec<usize>>,
    fiber_min: Vec<usize>,
    fiber_max: Vec<usize>,
}

impl MaterializedEpi {
    pub fn new(
        domain: FiniteDistributiveLattice,
        target: FiniteDistributiveLattice,
        h: Vec<usize>,
    ) -> Result<Self, HomViolation> {
        check_hom(&h, &domain, &target)?;
        let mut fibers = vec![Vec::new(); target.len()];
        for (k, &l) in h.iter().enumerate() {
            fibers[l].push(k);
        }
        if let Some(l) = fibers.iter().position(|f| f.is_empty()) {
            return Err(HomViolation { law: "h not surjective".into(), witnesses: vec![l] });
        }
        let fiber_min = fibers.iter().map(|f| f.iter().fold(domain.top(), |a, &b| domain.meet(a, b))).collect();
        let fiber_max = fibers.iter().map(|f| f.iter().fold(domain.bottom(), |a, &b| domain.join(a, b))).collect();
        Ok(MaterializedEpi { domain, target, h, fibers, fiber_min, fiber_max })
    }

    /// Tabulates `h` from a set function.
    pub fn from_fn(
        domain: FiniteDistributiveLattice,
        target: FiniteDistributiveLattice,
        f: impl Fn(&BitSet) -> BitSet,
    ) -> Result<Self, HomViolation> {
        let mut h = Vec::with_capacity(domain.len());
        for (i, e) in domain.elements().iter().enumerate() {
            match target.index_of(&f(e)) {
                Some(l) => h.push(l),
                None => return Err(HomViolation { law: "value outside target".into(), witnesses: vec![i] }),
            }
        }
        Self::new(domain, target, h)
    }

    pub fn fiber(&self, l: usize) -> &[usize] {
        &self.fibers[l]
    }

    pub fn fiber_min(&self, l: usize) -> usize {
        self.fiber_min[l]
    }

    fn target_index(&self, l: &BitSet) -> usize {
        self.target.index_of(l).expect("element of L")
    }
}

impl LiftOracle for MaterializedEpi {
    fn ambient(&self) -> usize {
        self.domain.universe().len()
    }
    fn project(&self, v: &BitSet) -> BitSet {
        let k = self.domain.index_of(v).expect("h is only evaluated on K");
        self.target.element(self.h[k]).clone()
    }
    fn in_domain(&self, v: &BitSet) -> bool {
        self.domain.contains(v)
    }
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.target.meet_set(a, b)
    }
    fn section(&self, l: &BitSet) -> Option<BitSet> {
        let i = self.target.index_of(l)?;
        Some(self.domain.element(self.fiber_min[i]).clone())
    }
    fn top_unique(&self) -> bool {
        self.fibers[self.target.top()] == [self.domain.top()]
    }
}

impl ShrinkSource for MaterializedEpi {
    fn wide(&self, l: &BitSet) -> BitSet {
        self.domain.element(self.fiber_max[self.target_index(l)]).clone()
    }
    fn narrow(&self, l: &BitSet, depth: usize) -> BitSet {
        if depth == 0 {
            self.wide(l)
        } else {
            self.domain.element(self.fiber_min[self.target_index(l)]).clone()
        }
    }
    fn max_depth(&self) -> usize {
        1
    }
}

/// Calls `visit` with every lattice embedding `s : O(P) → L`, given as
/// target indices aligned with `down_sets` (canonical `O(P)`).
pub fn enumerate_embeddings(
    p: &Poset,
    down_sets: &[BitSet],
    l: &FiniteDistributiveLattice,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let ext = p.linear_extension();
    let mut g = vec![usize::MAX; p.len()];
    let mut images = vec![0; down_sets.len()];
    let index: HashMap<&BitSet, usize> = down_sets.iter().enumerate().map(|(i, d)| (d, i)).collect();
    rec(p, l, &ext, 0, &mut g, &mut images, down_sets, &index, &mut visit)
}

#[allow(clippy::too_many_arguments)]
fn rec(
    p: &Poset,
    l: &FiniteDistributiveLattice,
    ext: &[usize],
    i: usize,
    g: &mut Vec<usize>,
    images: &mut Vec<usize>,
    down_sets: &[BitSet],
    index: &HashMap<&BitSet, usize>,
    visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == ext.len() {
        for (k, d) in down_sets.iter().enumerate() {
            images[k] = d.iter().fold(l.bottom(), |acc, x| l.join(acc, g[x]));
        }
        if images[down_sets.len() - 1] != l.top() {
            return ControlFlow::Continue(());
        }
        let mut seen = HashSet::new();
        if !images.iter().all(|x| seen.insert(*x)) {
            return ControlFlow::Continue(());
        }
        for a in 0..down_sets.len() {
            for b in a + 1..down_sets.len() {
                let m = index[&down_sets[a].intersection(&down_sets[b])];
                if images[m] != l.meet(images[a], images[b]) {
                    return ControlFlow::Continue(());
                }
            }
        }
        return visit(images);
    }
    let x = ext[i];
    let below = p.strict_down(x);
    for c in 1..l.len() {
        // s(↓x) strictly above s(↓y) for y < x, and distinct from all others
        let ok = (0..i).all(|j| {
            let y = ext[j];
            g[y] != c && (!below.contains(y) || l.leq(g[y], c))
        });
        if ok {
            g[x] = c;
            rec(p, l, ext, i + 1, g, images, down_sets, index, visit)?;
        }
    }
    g[x] = usize::MAX;
    ControlFlow::Continue(())
}

/// One representative per isomorphism class of posets of size `1..=max`.
fn posets_up_to(max: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    for n in 1..=max {
        let mut seen = HashSet::new();
        for p in Poset::all_labeled(n) {
            if seen.insert(iso_key(&p)) {
                out.push(p);
            }
        }
    }
    out
}

fn iso_key(p: &Poset) -> Vec<bool> {
    let n = p.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<bool>> = None;
    loop {
        let key: Vec<bool> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| p.leq(perm[a], perm[b])).collect();
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
        if !next_permutation(&mut perm) {
            return best.unwrap_or_default();
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy)]
pub struct FalsifierBounds {
    /// Largest `|P|` tried.
    pub max_poset: usize,
    /// Cap on partial lifts enumerated for one `(s, λ)`.
    pub max_partial_lifts: usize,
    /// Cap on embeddings across the whole search.
    pub max_embeddings: usize,
}

impl Default for FalsifierBounds {
    fn default() -> Self {
        FalsifierBounds { max_poset: 3, max_partial_lifts: 200_000, max_embeddings: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("falsifier bound exceeded: {0}")]
pub struct BoundExceeded(pub String);

/// `(s, λ, q, k)` for which no conditioner family satisfies
/// `v_μ ∧ v_α ≤ k(λ)`; `residue` is what the best family leaves outside.
#[derive(Debug, Clone)]
pub struct SpaciousnessWitness {
    pub poset: Poset,
    pub down_sets: Vec<BitSet>,
    pub images: Vec<BitSet>,
    pub lambda: BitSet,
    pub q: usize,
    /// The partial lift on `O(λ^⊤)`; `None` outside the domain.
    pub table: Vec<Option<BitSet>>,
    pub alpha: BitSet,
    pub residue: BitSet,
}

#[derive(Debug, Clone)]
pub enum FalsifierOutcome {
    NoCounterexampleFound { posets: usize, embeddings: usize, partial_lifts: usize },
    Witness(Box<SpaciousnessWitness>),
}

impl FalsifierOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, FalsifierOutcome::Witness(_))
    }
}

/// All partial lifts of `s` on `O(λ^⊤)`, as values `k(↓p)` (domain indices)
/// for `p ∈ λ`; `visit` receives `k(α)` for every `α ⊆ λ` (indices aligned
/// with `down_sets`, `None` outside).
fn partial_lifts(
    p: &Poset,
    epi: &MaterializedEpi,
    down_sets: &[BitSet],
    images: &[usize],
    lambda: &BitSet,
    cap: usize,
    mut visit: impl FnMut(&[Option<usize>]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>, BoundExceeded> {
    let order: Vec<usize> = p.linear_extension().into_iter().filter(|x| lambda.contains(*x)).collect();
    let index: HashMap<&BitSet, usize> = down_sets.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let below: Vec<usize> = (0..down_sets.len()).filter(|&i| down_sets[i].is_subset(lambda)).collect();
    let k = &epi.domain;
    let mut choice = vec![usize::MAX; p.len()];
    let mut count = 0usize;
    let mut table = vec![None; down_sets.len()];

    // odometer over fibers, pruned by monotonicity
    fn go(
        i: usize,
        ctx: &mut dyn FnMut(&[usize]) -> Result<ControlFlow<()>, BoundExceeded>,
        order: &[usize],
        p: &Poset,
        epi: &MaterializedEpi,
        images: &[usize],
        index: &HashMap<&BitSet, usize>,
        choice: &mut Vec<usize>,
    ) -> Result<ControlFlow<()>, BoundExceeded> {
        if i == order.len() {
            return ctx(choice);
        }
        let x = order[i];
        let fiber = epi.fiber(images[index[p.down(x)]]);
        for &c in fiber {
            let ok = p.strict_down(x).iter().all(|y| epi.domain.leq(choice[y], c));
            if ok {
                choice[x] = c;
                if let ControlFlow::Break(()) = go(i + 1, ctx, order, p, epi, images, index, choice)? {
                    return Ok(ControlFlow::Break(()));
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    let mut leaf = |choice: &[usize]| -> Result<ControlFlow<()>, BoundExceeded> {
        for &a in &below {
            table[a] = Some(down_sets[a].iter().fold(k.bottom(), |acc, x| k.join(acc, choice[x])));
        }
        for (x, &a) in below.iter().enumerate() {
            for &b in &below[x + 1..] {
                let m = index[&down_sets[a].intersection(&down_sets[b])];
                if table[m] != Some(k.meet(table[a].unwrap(), table[b].unwrap())) {
                    return Ok(ControlFlow::Continue(()));
                }
            }
        }
        count += 1;
        if count > cap {
            return Err(BoundExceeded(format!("more than {cap} partial lifts for one (s, λ)")));
        }
        Ok(visit(&table))
    };
    go(0, &mut leaf, &order, p, epi, images, &index, &mut choice)
}

/// Searches embeddings from posets up to the bound, partial lifts and
/// minimal `q` for a failure of `v_μ ∧ v_α ≤ k(λ)` under the best
/// (fiber-minimal) conditioner family.
pub fn spaciousness_falsifier(epi: &MaterializedEpi, bounds: FalsifierBounds) -> Result<FalsifierOutcome, BoundExceeded> {
    let l = &epi.target;
    let k = &epi.domain;
    let (mut posets, mut embeddings, mut lifts) = (0usize, 0usize, 0usize);
    let mut witness = None;
    let mut err = None;
    for p in posets_up_to(bounds.max_poset) {
        posets += 1;
        let ds = p.all_down_sets(DEFAULT_DOWNSET_BOUND).expect("small poset");
        let flow = enumerate_embeddings(&p, &ds, l, |images| {
            embeddings += 1;
            if embeddings > bounds.max_embeddings {
                err = Some(BoundExceeded(format!("more than {} embeddings", bounds.max_embeddings)));
                return ControlFlow::Break(());
            }
            let mins: Vec<usize> = images.iter().map(|&i| epi.fiber_min(i)).collect();
            for lambda in &ds[..ds.len() - 1] {
                let lam_idx = ds.iter().position(|d| d == lambda).unwrap();
                let qs = p.minimal_in(&p.carrier().difference(lambda));
                let r = partial_lifts(&p, epi, &ds, images, lambda, bounds.max_partial_lifts, |table| {
                    lifts += 1;
                    let k_lambda = k.element(table[lam_idx].unwrap());
                    for q in qs.iter() {
                        let mu = ds.iter().position(|d| d == p.down(q)).unwrap();
                        let vm = k.element(mins[mu]);
                        for (a, d) in ds.iter().enumerate() {
                            if d.contains(q) {
                                continue;
                            }
                            let residue = vm.intersection(k.element(mins[a])).difference(k_lambda);
                            if !residue.is_empty() {
                                witness = Some(SpaciousnessWitness {
                                    poset: p.clone(),
                                    down_sets: ds.clone(),
                                    images: images.iter().map(|&i| l.element(i).clone()).collect(),
                                    lambda: lambda.clone(),
                                    q,
                                    table: table.iter().map(|t| t.map(|i| k.element(i).clone())).collect(),
                                    alpha: d.clone(),
                                    residue,
                                });
                                return ControlFlow::Break(());
                            }
                        }
                    }
                    ControlFlow::Continue(())
                });
                match r {
                    Err(e) => {
                        err = Some(e);
                        return ControlFlow::Break(());
                    }
                    Ok(ControlFlow::Break(())) => return ControlFlow::Break(()),
                    Ok(ControlFlow::Continue(())) => {}
                }
            }
            ControlFlow::Continue(())
        });
        if let Some(e) = err {
            return Err(e);
        }
        if flow.is_break() {
            break;
        }
    }
    Ok(match witness {
        Some(w) => FalsifierOutcome::Witness(Box::new(w)),
        None => FalsifierOutcome::NoCounterexampleFound { posets, embeddings, partial_lifts: lifts },
    })
}

#[derive(Debug, Clone)]
pub enum ConditionIReport {
    /// `h⁻¹(0) = {0}`, which is sufficient.
    SufficientZeroFiber,
    /// Exhaustive search up to the bound found nothing.
    NoViolationUpTo(usize),
    Counterexample {
        poset: Poset,
        images: Vec<BitSet>,
        q: usize,
        k_q: BitSet,
        alpha: BitSet,
        residue: BitSet,
    },
}

/// Condition (i): for minimal `q`, every partial lift on `O({q}^⊤)` is
/// conditional. The only nontrivial constraint is `k({q}) ∧ v_α = 0` for
/// `q ∉ α`, tested against fiber minima.
pub fn check_condition_i(epi: &MaterializedEpi, bound: usize) -> ConditionIReport {
    if epi.fiber(epi.target.bottom()) == [epi.domain.bottom()] {
        return ConditionIReport::SufficientZeroFiber;
    }
    let k = &epi.domain;
    let mut found = None;
    for p in posets_up_to(bound) {
        let ds = p.all_down_sets(DEFAULT_DOWNSET_BOUND).expect("small poset");
        let flow = enumerate_embeddings(&p, &ds, &epi.target, |images| {
            for q in p.minimal_in(&p.carrier()).iter() {
                let qi = ds.iter().position(|d| *d == BitSet::singleton(q)).unwrap();
                for &kq in epi.fiber(images[qi]) {
                    for (a, d) in ds.iter().enumerate() {
                        if d.contains(q) {
                            continue;
                        }
                        let residue = k.element(kq).intersection(k.element(epi.fiber_min(images[a])));
                        if !residue.is_empty() {
                            found = Some(ConditionIReport::Counterexample {
                                poset: p.clone(),
                                images: images.iter().map(|&i| epi.target.element(i).clone()).collect(),
                                q,
                                k_q: k.element(kq).clone(),
                                alpha: d.clone(),
                                residue,
                            });
                            return ControlFlow::Break(());
                        }
                    }
                }
            }
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            break;
        }
    }
    found.unwrap_or(ConditionIReport::NoViolationUpTo(bound))
}
