//! Attractor and repeller lattices of a finite system, the dual maps, and
//! the lifting oracles that plug the system into the lift engine.

use super::{ExactError, FiniteDynSys};
use crate::bitset::BitSet;
use crate::lattice::{check_anti_hom, FiniteDistributiveLattice, HomViolation};
use crate::lift::{DualitySide, LiftOracle, ShrinkSource};
use std::collections::HashSet;
use thiserror::Error;

/// Materialised lattices larger than this are refused.
pub const MAX_LATTICE: usize = 1 << 12;

fn check_states(sys: &FiniteDynSys, bound: usize) -> Result<(), ExactError> {
    if sys.len() > bound {
        return Err(ExactError::TooLarge { what: "state space", size: sys.len(), bound });
    }
    Ok(())
}

fn subsets(n: usize) -> impl Iterator<Item = BitSet> {
    (0u64..1 << n).map(BitSet::from_mask)
}

fn collect_lattice(
    sys: &FiniteDynSys,
    family: HashSet<BitSet>,
    what: &'static str,
    infimum: bool,
) -> Result<FiniteDistributiveLattice, ExactError> {
    if family.len() > MAX_LATTICE {
        return Err(ExactError::TooLarge { what, size: family.len(), bound: MAX_LATTICE });
    }
    let states = sys.states().to_vec();
    let l = if infimum {
        FiniteDistributiveLattice::from_join_closed(states, family)
    } else {
        FiniteDistributiveLattice::from_sets(states, family)
    };
    Ok(l.expect("limit-set families are lattices"))
}

/// `Att = {ω(U) | U ∈ ANbhd}` with `∨ = ∪`, `∧ = Inv(∩)`.
pub fn att_lattice(sys: &FiniteDynSys, bound: usize) -> Result<FiniteDistributiveLattice, ExactError> {
    check_states(sys, bound)?;
    let fam = subsets(sys.len()).filter(|u| sys.is_attracting_nbhd(u)).map(|u| sys.omega_by_cycles(&u)).collect();
    collect_lattice(sys, fam, "attractor lattice", true)
}

/// `Rep = {α(U) | U ∈ RNbhd}` with `∨ = ∪`, `∧ = ∩`.
pub fn rep_lattice(sys: &FiniteDynSys, bound: usize) -> Result<FiniteDistributiveLattice, ExactError> {
    check_states(sys, bound)?;
    let fam = subsets(sys.len()).filter(|u| sys.is_repelling_nbhd(u)).map(|u| sys.alpha_by_cycles(&u)).collect();
    collect_lattice(sys, fam, "repeller lattice", false)
}

pub fn anbhd_count(sys: &FiniteDynSys, bound: usize) -> Result<usize, ExactError> {
    check_states(sys, bound)?;
    Ok(subsets(sys.len()).filter(|u| sys.is_attracting_nbhd(u)).count())
}

pub fn rnbhd_count(sys: &FiniteDynSys, bound: usize) -> Result<usize, ExactError> {
    check_states(sys, bound)?;
    Ok(subsets(sys.len()).filter(|u| sys.is_repelling_nbhd(u)).count())
}

impl FiniteDynSys {
    /// `A` is an attractor iff it is its own attracting neighbourhood.
    pub fn is_attractor(&self, a: &BitSet) -> bool {
        self.is_attracting_nbhd(a) && self.omega(a) == *a
    }

    pub fn is_repeller(&self, r: &BitSet) -> bool {
        self.is_repelling_nbhd(r) && self.alpha(r) == *r
    }
}

/// `A* = Inv⁺(U^c)` for the trapping region `U = A`, cross-checked against
/// `A^⊕`.
pub fn dual_repeller(sys: &FiniteDynSys, a: &BitSet) -> Result<BitSet, ExactError> {
    if !sys.is_attractor(a) {
        return Err(ExactError::NotAnAttractor(sys.names(a)));
    }
    debug_assert!(sys.is_trapping_region(a));
    let star = sys.inv_plus(&a.complement(sys.len()));
    assert_eq!(star, sys.dual_plus(a), "A* and A^⊕ disagree for {a:?}");
    Ok(star)
}

/// `R* = Inv(U^c)` for the repelling region `U = R`, cross-checked against
/// `R^⊖`.
pub fn dual_attractor(sys: &FiniteDynSys, r: &BitSet) -> Result<BitSet, ExactError> {
    if !sys.is_repeller(r) {
        return Err(ExactError::NotARepeller(sys.names(r)));
    }
    debug_assert!(sys.is_repelling_region(r));
    let star = sys.inv(&r.complement(sys.len()));
    assert_eq!(star, sys.dual_minus(r), "R* and R^⊖ disagree for {r:?}");
    Ok(star)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArViolation {
    #[error("A is not an attractor")]
    NotAnAttractor,
    #[error("R differs from A* = {0:?}")]
    NotTheDual(Vec<String>),
    #[error("A and R intersect")]
    NotDisjoint,
    #[error("A is not invariant")]
    ANotInvariant,
    #[error("R is not forward invariant")]
    RNotForwardInvariant,
    #[error("ω({0}) ⊄ A")]
    OmegaEscapes(String),
    #[error("a backward orbit through {0} has α_o ⊄ R")]
    AlphaOrbitalEscapes(String),
    #[error("the two characterisations disagree: via dual {via_dual}, via orbits {via_orbits}")]
    Disagree { via_dual: bool, via_orbits: bool },
}

fn ar_via_orbits(sys: &FiniteDynSys, a: &BitSet, r: &BitSet) -> Result<(), ArViolation> {
    if !a.is_disjoint(r) {
        return Err(ArViolation::NotDisjoint);
    }
    if !sys.classify_invariance(a).invariant {
        return Err(ArViolation::ANotInvariant);
    }
    if !sys.classify_invariance(r).forward {
        return Err(ArViolation::RNotForwardInvariant);
    }
    let rest = a.union(r).complement(sys.len());
    for x in &rest {
        if !sys.omega(&BitSet::singleton(x)).is_subset(a) {
            return Err(ArViolation::OmegaEscapes(sys.label(x).to_string()));
        }
        for g in sys.backward_orbits(x) {
            if !sys.alpha_orbital(&g).expect("generated orbit").is_subset(r) {
                return Err(ArViolation::AlphaOrbitalEscapes(sys.label(x).to_string()));
            }
        }
    }
    Ok(())
}

/// Checks `(A, R)` both as `R = A*` and through the orbit characterisation,
/// and that the two verdicts agree.
pub fn check_ar_pair(sys: &FiniteDynSys, a: &BitSet, r: &BitSet) -> Result<(), ArViolation> {
    let via_dual = match dual_repeller(sys, a) {
        Ok(star) if star == *r => Ok(()),
        Ok(star) => Err(ArViolation::NotTheDual(sys.names(&star))),
        Err(_) => Err(ArViolation::NotAnAttractor),
    };
    let via_orbits = ar_via_orbits(sys, a, r);
    match (via_dual.is_ok(), via_orbits.is_ok()) {
        (true, true) => Ok(()),
        (false, false) => via_orbits,
        (d, o) => Err(ArViolation::Disagree { via_dual: d, via_orbits: o }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SquareViolation {
    #[error("Inv(U) != ω(U) for U = {0:?}")]
    InvOmega(Vec<String>),
    #[error("Inv⁺(U^c) != α(U^c) for U = {0:?}")]
    InvPlusAlpha(Vec<String>),
    #[error("ω(U)* != α(U^c) for U = {0:?}")]
    StarMismatch(Vec<String>),
    #[error("U = {0:?}: attracting and complement-repelling disagree")]
    Complement(Vec<String>),
    #[error("* is not an anti-isomorphism Att → Rep: {0}")]
    StarAntiHom(HomViolation),
    #[error("* is not an anti-isomorphism Rep → Att: {0}")]
    StarBackAntiHom(HomViolation),
    #[error("(A*)* != A for A = {0:?}")]
    DoubleDual(Vec<String>),
    #[error(transparent)]
    System(#[from] ExactError),
}

/// The commuting square linking `ANbhd`, `RNbhd`, `Att`, `Rep` through
/// `c`, `*`, `ω = Inv` and `α = Inv⁺`, over every subset.
pub fn commuting_square_check(sys: &FiniteDynSys, bound: usize) -> Result<(), SquareViolation> {
    check_states(sys, bound)?;
    let n = sys.len();
    for u in subsets(n) {
        let uc = u.complement(n);
        let att = sys.is_attracting_nbhd(&u);
        if att != sys.is_repelling_nbhd(&uc) {
            return Err(SquareViolation::Complement(sys.names(&u)));
        }
        if !att {
            continue;
        }
        let a = sys.omega(&u);
        if sys.inv(&u) != a {
            return Err(SquareViolation::InvOmega(sys.names(&u)));
        }
        let r = sys.alpha(&uc);
        if sys.inv_plus(&uc) != r {
            return Err(SquareViolation::InvPlusAlpha(sys.names(&u)));
        }
        if dual_repeller(sys, &a)? != r {
            return Err(SquareViolation::StarMismatch(sys.names(&u)));
        }
    }
    let att = att_lattice(sys, bound)?;
    let rep = rep_lattice(sys, bound)?;
    let mut to_rep = Vec::with_capacity(att.len());
    for a in att.elements() {
        let star = dual_repeller(sys, a)?;
        let back = dual_attractor(sys, &star)?;
        if back != *a {
            return Err(SquareViolation::DoubleDual(sys.names(a)));
        }
        to_rep.push(rep.index_of(&star).expect("A* is a repeller"));
    }
    check_anti_hom(&to_rep, &att, &rep).map_err(SquareViolation::StarAntiHom)?;
    let to_att: Vec<usize> = rep
        .elements()
        .iter()
        .map(|r| att.index_of(&dual_attractor(sys, r).expect("element of Rep")).expect("R* is an attractor"))
        .collect();
    check_anti_hom(&to_att, &rep, &att).map_err(SquareViolation::StarBackAntiHom)?;
    Ok(())
}

/// `Inv⁺ : RNbhd → Rep`, with the repeller itself as section and the
/// complement of the dual attractor as the wide neighbourhood.
pub struct RepellerOracle<'a>(pub &'a FiniteDynSys);

impl LiftOracle for RepellerOracle<'_> {
    fn ambient(&self) -> usize {
        self.0.len()
    }
    fn project(&self, v: &BitSet) -> BitSet {
        self.0.inv_plus(v)
    }
    fn in_domain(&self, v: &BitSet) -> bool {
        self.0.is_repelling_nbhd(v)
    }
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        a.intersection(b)
    }
    fn section(&self, l: &BitSet) -> Option<BitSet> {
        self.0.is_repeller(l).then(|| l.clone())
    }
    /// `α(U) = X` forces `U = X`.
    fn top_unique(&self) -> bool {
        true
    }
}

impl ShrinkSource for RepellerOracle<'_> {
    fn wide(&self, l: &BitSet) -> BitSet {
        let star = dual_attractor(self.0, l).expect("repeller");
        star.complement(self.0.len())
    }
    fn narrow(&self, l: &BitSet, depth: usize) -> BitSet {
        if depth == 0 {
            self.wide(l)
        } else {
            l.clone()
        }
    }
    fn max_depth(&self) -> usize {
        1
    }
}

/// `Inv : ANbhd → Att` for the direct attractor-side route.
pub struct AttractorOracle<'a>(pub &'a FiniteDynSys);

impl LiftOracle for AttractorOracle<'_> {
    fn ambient(&self) -> usize {
        self.0.len()
    }
    fn project(&self, v: &BitSet) -> BitSet {
        self.0.inv(v)
    }
    fn in_domain(&self, v: &BitSet) -> bool {
        self.0.is_attracting_nbhd(v)
    }
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.0.inv(&a.intersection(b))
    }
    fn section(&self, l: &BitSet) -> Option<BitSet> {
        self.0.is_attractor(l).then(|| l.clone())
    }
}

impl ShrinkSource for AttractorOracle<'_> {
    fn wide(&self, l: &BitSet) -> BitSet {
        dual_repeller(self.0, l).expect("attractor").complement(self.0.len())
    }
    fn narrow(&self, l: &BitSet, depth: usize) -> BitSet {
        if depth == 0 {
            self.wide(l)
        } else {
            l.clone()
        }
    }
    fn max_depth(&self) -> usize {
        1
    }
}

/// The attractor side for duality transport.
pub struct ExactDuality<'a>(pub &'a FiniteDynSys);

impl DualitySide for ExactDuality<'_> {
    fn ambient(&self) -> usize {
        self.0.len()
    }
    fn star(&self, a: &BitSet) -> BitSet {
        dual_repeller(self.0, a).expect("attractor")
    }
    fn attractor_project(&self, u: &BitSet) -> BitSet {
        self.0.inv(u)
    }
    fn attractor_contains(&self, u: &BitSet) -> bool {
        self.0.is_attracting_nbhd(u)
    }
    fn attractor_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.0.inv(&a.intersection(b))
    }
}
