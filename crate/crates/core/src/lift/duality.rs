//! Attractor-side lifts obtained from repeller-side ones.
//!
//! `A ↦ A*` is an anti-isomorphism `Att → Rep` and complementation swaps
//! attracting and repelling neighbourhoods, so a lift of
//! `β ↦ s(P \ β)*` over `O(P^∂)` yields `k(α) = k_R(P \ α)^c` over `O(P)`.

use super::{engine, AuditStep, ConditionerOracle, LiftCertificate, LiftError, LiftOracle, LiftProblem};
use crate::bitset::BitSet;
use crate::order::{Poset, DEFAULT_DOWNSET_BOUND};

/// The attractor side of a system and its link to the repeller side.
pub trait DualitySide {
    fn ambient(&self) -> usize;
    /// The dual repeller `A*` of an attractor.
    fn star(&self, a: &BitSet) -> BitSet;
    /// `Inv(U)` for an attracting neighbourhood (or block) `U`.
    fn attractor_project(&self, u: &BitSet) -> BitSet;
    /// `U` is an attracting neighbourhood (or block).
    fn attractor_contains(&self, u: &BitSet) -> bool;
    /// Meet of attractors.
    fn attractor_meet(&self, a: &BitSet, b: &BitSet) -> BitSet;
}

struct AttractorView<'a>(&'a dyn DualitySide);

impl LiftOracle for AttractorView<'_> {
    fn ambient(&self) -> usize {
        self.0.ambient()
    }
    fn project(&self, v: &BitSet) -> BitSet {
        self.0.attractor_project(v)
    }
    fn in_domain(&self, v: &BitSet) -> bool {
        self.0.attractor_contains(v)
    }
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.0.attractor_meet(a, b)
    }
    fn section(&self, _: &BitSet) -> Option<BitSet> {
        None
    }
}

/// `att_images[i] = s(α_i)` over canonical `O(P)`. The repeller-side oracle
/// and conditioners run on `P^∂`; the returned certificate is on `P` and has
/// been re-verified against the attractor side. Audit steps are those of
/// the repeller-side induction.
pub fn transport_by_duality(
    poset: &Poset,
    att_images: Vec<BitSet>,
    rep_oracle: &dyn LiftOracle,
    rep_cond: &dyn ConditionerOracle,
    side: &dyn DualitySide,
) -> Result<LiftCertificate, LiftError> {
    let n = side.ambient();
    let att = AttractorView(side);
    // validates s on the attractor side before anything else
    let att_problem = LiftProblem::new(poset.clone(), att_images, &att)?;

    let dual = poset.dual();
    let dual_downs = dual
        .all_down_sets(DEFAULT_DOWNSET_BOUND)
        .map_err(|e| LiftError::NotAnEmbedding(e.to_string()))?;
    let carrier = poset.carrier();
    let rep_images: Vec<BitSet> = dual_downs
        .iter()
        .map(|beta| {
            let i = att_problem.index_of(&carrier.difference(beta)).expect("complement of an up-set");
            side.star(&att_problem.images[i])
        })
        .collect();
    let rep_problem = LiftProblem::new(dual, rep_images, rep_oracle)?;
    let rep = engine::lift(&rep_problem, rep_oracle, rep_cond)?;
    if !rep.top_preserved {
        return Err(LiftError::InvariantBroken {
            step: usize::MAX,
            detail: "repeller-side lift does not preserve 1, so k(0) ≠ 0".into(),
        });
    }

    let flip = |alpha: &BitSet| rep_problem.index_of(&carrier.difference(alpha)).expect("complement of a down-set");
    let table: Vec<BitSet> = att_problem.down_sets.iter().map(|a| rep.table[flip(a)].complement(n)).collect();
    let conditioners = att_problem.down_sets.iter().map(|a| rep.conditioners[flip(a)].complement(n)).collect();
    let atoms = (0..poset.len())
        .map(|p| {
            let full = att_problem.index_of(poset.down(p)).unwrap();
            let below = att_problem.index_of(&poset.strict_down(p)).unwrap();
            table[full].difference(&table[below])
        })
        .collect();
    let audit: Vec<AuditStep> = rep.audit;
    let cert = LiftCertificate {
        poset: poset.clone(),
        down_sets: att_problem.down_sets.clone(),
        images: att_problem.images.clone(),
        table,
        atoms,
        conditioners,
        audit,
        top_preserved: true,
    };
    cert.verify(&att).map_err(|e| LiftError::InvariantBroken { step: usize::MAX, detail: e.to_string() })?;
    Ok(cert)
}
