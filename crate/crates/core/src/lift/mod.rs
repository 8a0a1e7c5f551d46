//! Lifting lattice embeddings `s : O(P) → L` through epimorphisms `h : K → L`.
//!
//! `K` is always a family of subsets of an ambient set `{0..n}` closed under
//! `∪` and `∩` (attracting/repelling neighbourhoods or blocks), so the
//! Booleanization `B(K)` is realised inside the powerset and atoms `B_p` are
//! plain sets. `L` is a lattice of sets whose meet is supplied by the oracle.

mod check;
mod duality;
mod engine;
mod spacious;

pub use check::{is_conditional_lift, is_partial_lift, LiftViolation};
pub use duality::{transport_by_duality, DualitySide};
pub use engine::lift;
pub use spacious::{
    check_condition_i, enumerate_embeddings, spaciousness_falsifier, ConditionIReport, FalsifierBounds,
    FalsifierOutcome, MaterializedEpi, SpaciousnessWitness,
};

use crate::bitset::BitSet;
use crate::lattice::{BirkhoffRep, FiniteDistributiveLattice};
use crate::order::{Poset, DEFAULT_DOWNSET_BOUND};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// `h : K → L` together with membership in `K` and a section of `h`.
pub trait LiftOracle {
    /// Size of the ambient set; `1_K` is the full set and complements in
    /// `B(K)` are taken relative to it.
    fn ambient(&self) -> usize;
    /// `h(v)`.
    fn project(&self, v: &BitSet) -> BitSet;
    /// `v ∈ K`.
    fn in_domain(&self, v: &BitSet) -> bool;
    /// The meet of `L`.
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet;
    /// Some `v ∈ h⁻¹(ℓ)`, if the fiber is nonempty.
    fn section(&self, l: &BitSet) -> Option<BitSet>;
    /// Declares `h⁻¹(1) = {1}`.
    fn top_unique(&self) -> bool {
        false
    }
}

/// Which part of the induction is asking for conditioners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// `λ = {q}` for the first minimal `q`; the family must make the partial
    /// lift conditional.
    Initial,
    /// Extending from `λ` by a minimal `q ∈ P \ λ`; the family must satisfy
    /// `v_μ ∧ v_α ≤ k(λ)` for `q ∉ α`.
    Step,
}

pub struct ConditionerContext<'a> {
    pub problem: &'a LiftProblem,
    /// Current partial lift, indexed like `problem.down_sets`.
    pub table: &'a [Option<BitSet>],
    pub lambda: &'a BitSet,
    pub q: usize,
    /// Index of `μ = ↓q`.
    pub mu: usize,
    pub phase: Phase,
}

/// Supplies candidate conditioner families, one per attempt. The engine tries
/// attempts in order and reports an obstruction once `None` is returned.
pub trait ConditionerOracle {
    fn conditioners(&self, ctx: &ConditionerContext<'_>, attempt: usize) -> Option<Vec<BitSet>>;
}

/// The ingredients of the neighbourhood-shrinking recipe: a generous
/// neighbourhood `W_ξ` for each target element and a sequence of shrinkings
/// ending (at `max_depth`) in the smallest member of the fiber.
pub trait ShrinkSource {
    fn wide(&self, l: &BitSet) -> BitSet;
    fn narrow(&self, l: &BitSet, depth: usize) -> BitSet;
    fn max_depth(&self) -> usize;
}

/// Conditioners built as
/// `v_ξ = k(ξ)` for `ξ ⊆ λ`, a shrunk neighbourhood for `q ∉ ξ` or `ξ = μ`,
/// and `W_ξ` otherwise; each attempt shrinks one level deeper.
pub struct Recipe<'a, S: ?Sized>(pub &'a S);

impl<S: ShrinkSource + ?Sized> ConditionerOracle for Recipe<'_, S> {
    fn conditioners(&self, ctx: &ConditionerContext<'_>, attempt: usize) -> Option<Vec<BitSet>> {
        if attempt > self.0.max_depth() {
            return None;
        }
        let pb = ctx.problem;
        Some(
            (0..pb.down_sets.len())
                .map(|xi| {
                    let d = &pb.down_sets[xi];
                    if d.is_subset(ctx.lambda) {
                        if let Some(k) = &ctx.table[xi] {
                            return k.clone();
                        }
                    }
                    let img = &pb.images[xi];
                    if !d.contains(ctx.q) || xi == ctx.mu {
                        self.0.narrow(img, attempt)
                    } else {
                        self.0.wide(img)
                    }
                })
                .collect(),
        )
    }
}

/// An embedding `s : O(P) → L`, tabulated on `O(P)` in canonical order.
#[derive(Debug, Clone)]
pub struct LiftProblem {
    pub poset: Poset,
    pub down_sets: Vec<BitSet>,
    pub images: Vec<BitSet>,
    index: HashMap<BitSet, usize>,
}

impl LiftProblem {
    /// `images[i]` is `s(down_sets[i])` where `down_sets = O(P)` canonically.
    /// Checks that `s` is an injective bounded hom into the oracle's `L`.
    pub fn new(poset: Poset, images: Vec<BitSet>, oracle: &dyn LiftOracle) -> Result<Self, LiftError> {
        let down_sets = poset
            .all_down_sets(DEFAULT_DOWNSET_BOUND)
            .map_err(|e| LiftError::NotAnEmbedding(e.to_string()))?;
        if images.len() != down_sets.len() {
            return Err(LiftError::NotAnEmbedding(format!(
                "{} images for {} down-sets",
                images.len(),
                down_sets.len()
            )));
        }
        let index = down_sets.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let pb = LiftProblem { poset, down_sets, images, index };
        pb.check_embedding(oracle)?;
        Ok(pb)
    }

    /// `P = J(R)` and `s = inclusion ∘ (↓^∨)⁻¹` for a sublattice `R` of `l`
    /// given by member indices.
    pub fn from_sublattice(
        l: &FiniteDistributiveLattice,
        members: &[usize],
        oracle: &dyn LiftOracle,
    ) -> Result<Self, LiftError> {
        let r = l.restrict_to(members);
        let rep = BirkhoffRep::of(&r);
        let down_sets = rep
            .ji_poset
            .all_down_sets(DEFAULT_DOWNSET_BOUND)
            .map_err(|e| LiftError::NotAnEmbedding(e.to_string()))?;
        let images = down_sets.iter().map(|d| r.element(rep.join_of(&r, d)).clone()).collect();
        Self::new(rep.ji_poset, images, oracle)
    }

    fn check_embedding(&self, oracle: &dyn LiftOracle) -> Result<(), LiftError> {
        let bad = |m: String| Err(LiftError::NotAnEmbedding(m));
        let top = oracle.project(&BitSet::full(oracle.ambient()));
        if !self.images[0].is_empty() {
            return bad("s(0) is not empty".into());
        }
        if self.images[self.top()] != top {
            return bad("s(1) is not the top of L".into());
        }
        let n = self.down_sets.len();
        for a in 0..n {
            for b in a + 1..n {
                if self.images[a] == self.images[b] {
                    return bad(format!("s not injective on {:?}, {:?}", self.down_sets[a], self.down_sets[b]));
                }
                let j = self.index[&self.down_sets[a].union(&self.down_sets[b])];
                if self.images[j] != self.images[a].union(&self.images[b]) {
                    return bad(format!("s does not preserve ∨ at {:?}, {:?}", self.down_sets[a], self.down_sets[b]));
                }
                let m = self.index[&self.down_sets[a].intersection(&self.down_sets[b])];
                if self.images[m] != oracle.target_meet(&self.images[a], &self.images[b]) {
                    return bad(format!("s does not preserve ∧ at {:?}, {:?}", self.down_sets[a], self.down_sets[b]));
                }
            }
        }
        Ok(())
    }

    pub fn index_of(&self, d: &BitSet) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn top(&self) -> usize {
        self.down_sets.len() - 1
    }

    pub fn names(&self, d: &BitSet) -> Vec<String> {
        self.poset.names(d)
    }
}

/// One step of the induction, as recorded in a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditStep {
    pub step: usize,
    /// Carrier index of the minimal element added.
    pub q: usize,
    pub lambda_before: BitSet,
    pub mu: BitSet,
    /// Which conditioner attempt (shrink depth) succeeded.
    pub attempt: usize,
    pub v_mu: BitSet,
    /// `B_q`.
    pub atom: BitSet,
    pub k_mu: BitSet,
    /// `k(μ) = k(←μ) ∨ v_μ`.
    pub k_mu_decomposes: bool,
    /// The conditioners in force satisfied `k(γ) ∧ v_α ≤ k(β)`.
    pub conditioned: bool,
    /// `B_p ∧ v_α = 0` for `p ∈ λ ∪ {q}` outside `α`.
    pub atoms_avoid_conditioners: bool,
    /// The atoms so far are pairwise disjoint.
    pub atoms_disjoint: bool,
    pub in_domain_and_projects: bool,
}

#[derive(Debug, Clone)]
pub struct LiftCertificate {
    pub poset: Poset,
    pub down_sets: Vec<BitSet>,
    pub images: Vec<BitSet>,
    /// `k` on `O(P)`, aligned with `down_sets`.
    pub table: Vec<BitSet>,
    /// `B(k)({p})` for each carrier element.
    pub atoms: Vec<BitSet>,
    pub conditioners: Vec<BitSet>,
    pub audit: Vec<AuditStep>,
    /// False when `h⁻¹(1) ≠ {1}` and the terminal `k(1)` is not the top of `K`.
    pub top_preserved: bool,
}

impl LiftCertificate {
    /// Independent post-hoc check: `k` is an injective lattice hom into `K`
    /// with `h ∘ k = s`. The top law is skipped when `top_preserved` is false.
    pub fn verify(&self, oracle: &dyn LiftOracle) -> Result<(), LiftViolation> {
        check::verify_certificate(self, oracle)
    }

    pub fn k(&self, d: &BitSet) -> Option<&BitSet> {
        self.down_sets.iter().position(|x| x == d).map(|i| &self.table[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub step: usize,
    pub q: usize,
    pub q_label: String,
    /// The down-set `α ∌ q` whose conditioner cannot be made small enough.
    pub alpha: BitSet,
    /// Points of `v_μ ∧ v_α` outside `k(λ)` (or, at the initial step, of
    /// `k(γ) ∧ v_α` outside `k(β)`) for the last family tried.
    pub witness: BitSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("s is not a lattice embedding: {0}")]
    NotAnEmbedding(String),
    #[error("no section for s({0:?})")]
    SectionMissing(BitSet),
    #[error("section for s({downset:?}) is inconsistent: {detail}")]
    SectionInconsistent { downset: BitSet, detail: String },
    #[error("obstruction at step {} (q = {}): no conditioners for α = {:?}, residue {:?}", .0.step, .0.q_label, .0.alpha, .0.witness)]
    ObstructionFound(Obstruction),
    #[error("h⁻¹(1) = {{1}} was declared but the terminal k(1) is {0:?}")]
    TopNotUnique(BitSet),
    #[error("oracle returned an invalid conditioner for {alpha:?}: {detail}")]
    BadConditioner { alpha: BitSet, detail: String },
    #[error("internal invariant broken at step {step}: {detail}")]
    InvariantBroken { step: usize, detail: String },
    #[error("degenerate problem: {0}")]
    Degenerate(String),
}

/// `h = id` on a materialised set lattice. Used for tests and as the
/// reference instance.
pub struct IdentityOracle<'a>(pub &'a FiniteDistributiveLattice);

impl LiftOracle for IdentityOracle<'_> {
    fn ambient(&self) -> usize {
        self.0.universe().len()
    }
    fn project(&self, v: &BitSet) -> BitSet {
        v.clone()
    }
    fn in_domain(&self, v: &BitSet) -> bool {
        self.0.contains(v)
    }
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.0.meet_set(a, b)
    }
    fn section(&self, l: &BitSet) -> Option<BitSet> {
        self.0.contains(l).then(|| l.clone())
    }
    fn top_unique(&self) -> bool {
        true
    }
}

impl ShrinkSource for IdentityOracle<'_> {
    fn wide(&self, l: &BitSet) -> BitSet {
        l.clone()
    }
    fn narrow(&self, l: &BitSet, _: usize) -> BitSet {
        l.clone()
    }
    fn max_depth(&self) -> usize {
        0
    }
}
