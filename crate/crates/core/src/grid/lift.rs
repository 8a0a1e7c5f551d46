//! The lift engine on cell maps: projections `comb_inv_plus` (repelling
//! blocks) and `comb_inv` (attracting blocks), conditioners by shrinking.

use super::lattices::{att_star, rep_star};
use super::{CellMap, GridError};
use crate::bitset::BitSet;
use crate::lattice::FiniteDistributiveLattice;
use crate::lift::{self, DualitySide, LiftCertificate, LiftOracle, LiftProblem, Recipe, ShrinkSource};
use crate::order::numeric_labels;

/// `h = comb_inv_plus` on repelling blocks.
pub struct GridRepellerOracle<'a> {
    map: &'a CellMap,
    top_unique: bool,
}

impl<'a> GridRepellerOracle<'a> {
    pub fn new(map: &'a CellMap) -> Self {
        let top = map.comb_inv_plus(&map.full());
        GridRepellerOracle { map, top_unique: map.repelling_hull(&top) == map.full() }
    }

}

/// `M ↦ hull(M ∩ F⁻¹ M)`: a repelling block inside `M` with the same
/// forward-invariant part.
fn shrink_once(m: &CellMap, w: &BitSet) -> BitSet {
    m.repelling_hull(&w.intersection(&m.preimage(w)))
}

impl LiftOracle for GridRepellerOracle<'_> {
    fn ambient(&self) -> usize {
        self.map.len()
    }
    fn project(&self, v: &BitSet) -> BitSet {
        self.map.comb_inv_plus(v)
    }
    fn in_domain(&self, v: &BitSet) -> bool {
        self.map.is_repelling_block(v)
    }
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.map.comb_inv_plus(&a.intersection(b))
    }
    fn section(&self, l: &BitSet) -> Option<BitSet> {
        let h = self.map.repelling_hull(l);
        (&self.map.comb_inv_plus(&h) == l).then_some(h)
    }
    fn top_unique(&self) -> bool {
        self.top_unique
    }
}

impl ShrinkSource for GridRepellerOracle<'_> {
    /// The complement of the least attracting block over the dual attractor.
    fn wide(&self, l: &BitSet) -> BitSet {
        let w = self.map.attracting_hull(&rep_star(self.map, l)).complement(self.map.len());
        if self.map.comb_inv_plus(&w) == *l {
            w
        } else {
            self.map.repelling_hull(l)
        }
    }
    fn narrow(&self, l: &BitSet, depth: usize) -> BitSet {
        if depth >= self.max_depth() {
            return self.map.repelling_hull(l);
        }
        let mut w = self.wide(l);
        for _ in 0..depth {
            let next = shrink_once(self.map, &w);
            if next == w {
                break;
            }
            w = next;
        }
        w
    }
    fn max_depth(&self) -> usize {
        self.map.len() + 1
    }
}

/// `h = comb_inv` on attracting blocks.
pub struct GridAttractorOracle<'a> {
    map: &'a CellMap,
    top_unique: bool,
}

impl<'a> GridAttractorOracle<'a> {
    pub fn new(map: &'a CellMap) -> Self {
        let top = map.comb_inv(&map.full());
        GridAttractorOracle { map, top_unique: map.attracting_hull(&top) == map.full() }
    }
}

impl LiftOracle for GridAttractorOracle<'_> {
    fn ambient(&self) -> usize {
        self.map.len()
    }
    fn project(&self, v: &BitSet) -> BitSet {
        self.map.comb_inv(v)
    }
    fn in_domain(&self, v: &BitSet) -> bool {
        self.map.is_attracting_block(v)
    }
    fn target_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.map.comb_inv(&a.intersection(b))
    }
    fn section(&self, l: &BitSet) -> Option<BitSet> {
        let h = self.map.attracting_hull(l);
        (&self.map.comb_inv(&h) == l).then_some(h)
    }
    fn top_unique(&self) -> bool {
        self.top_unique
    }
}

impl ShrinkSource for GridAttractorOracle<'_> {
    fn wide(&self, l: &BitSet) -> BitSet {
        let w = self.map.repelling_hull(&att_star(self.map, l)).complement(self.map.len());
        if self.map.comb_inv(&w) == *l {
            w
        } else {
            self.map.attracting_hull(l)
        }
    }
    /// Forward images `N ↦ hull(N ∩ F(N))`, ending in the least block.
    fn narrow(&self, l: &BitSet, depth: usize) -> BitSet {
        if depth >= self.max_depth() {
            return self.map.attracting_hull(l);
        }
        let mut w = self.wide(l);
        for _ in 0..depth {
            let next = self.map.attracting_hull(&w.intersection(&self.map.image(&w)));
            if next == w {
                break;
            }
            w = next;
        }
        w
    }
    fn max_depth(&self) -> usize {
        self.map.len() + 1
    }
}

/// The attractor side of a cell map for duality transport.
pub struct GridDuality<'a>(pub &'a CellMap);

impl DualitySide for GridDuality<'_> {
    fn ambient(&self) -> usize {
        self.0.len()
    }
    fn star(&self, a: &BitSet) -> BitSet {
        att_star(self.0, a)
    }
    fn attractor_project(&self, u: &BitSet) -> BitSet {
        self.0.comb_inv(u)
    }
    fn attractor_contains(&self, u: &BitSet) -> bool {
        self.0.is_attracting_block(u)
    }
    fn attractor_meet(&self, a: &BitSet, b: &BitSet) -> BitSet {
        self.0.comb_inv(&a.intersection(b))
    }
}

/// Backward shrinking `W_k = hull(W_{k−1} ∩ F⁻¹ W_{k−1})` (the least
/// repelling block around the cells that still have a successor inside), stopping at the first
/// iterate none of whose cells in `target` are transient (lack an infinite
/// forward walk), or at a fixed point.
pub fn shrink_repelling_block(m: &CellMap, w: &BitSet, target: &BitSet) -> Result<BitSet, GridError> {
    if !m.is_repelling_block(w) {
        return Err(GridError::NotARepellingBlock(w.clone()));
    }
    let mut cur = w.clone();
    loop {
        if cur.difference(&m.comb_inv_plus(&cur)).is_disjoint(target) {
            return Ok(cur);
        }
        let next = shrink_once(m, &cur);
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Checks that `family` is a bounded sublattice of images under `∪` and
/// `meet`, returning it as a lattice.
fn family_lattice(
    m: &CellMap,
    family: &[BitSet],
    is_image: impl Fn(&BitSet) -> bool,
    top: BitSet,
    meet: impl Fn(&BitSet, &BitSet) -> BitSet,
) -> Result<FiniteDistributiveLattice, GridError> {
    let bad = |a: &BitSet, b: &BitSet, detail: &str| {
        Err(GridError::NotASublattice { a: a.clone(), b: b.clone(), detail: detail.to_string() })
    };
    let mut fam: Vec<BitSet> = family.to_vec();
    fam.sort();
    fam.dedup();
    if let Some(x) = fam.iter().find(|x| !is_image(x)) {
        return bad(x, x, "not an image of a block");
    }
    if !fam.contains(&BitSet::new()) {
        return bad(&BitSet::new(), &BitSet::new(), "bottom missing");
    }
    if !fam.contains(&top) {
        return bad(&top, &top, "top missing");
    }
    for (i, a) in fam.iter().enumerate() {
        for b in &fam[i + 1..] {
            if fam.binary_search(&a.union(b)).is_err() {
                return bad(a, b, "join missing");
            }
            if fam.binary_search(&meet(a, b)).is_err() {
                return bad(a, b, &format!("meet {:?} missing", meet(a, b)));
            }
        }
    }
    FiniteDistributiveLattice::from_join_closed(numeric_labels(m.len()), fam)
        .map_err(|e| GridError::LawViolated(e.to_string()))
}

/// `P = J(family)`, `s` the inclusion, `h = comb_inv_plus` on repelling
/// blocks. Sections are least repelling blocks, so no seed blocks are needed.
pub fn grid_lift_problem(m: &CellMap, family: &[BitSet]) -> Result<LiftProblem, GridError> {
    let l = family_lattice(
        m,
        family,
        |r| m.comb_inv_plus(&m.repelling_hull(r)) == *r,
        m.comb_inv_plus(&m.full()),
        |a, b| m.comb_inv_plus(&a.intersection(b)),
    )?;
    let all: Vec<usize> = (0..l.len()).collect();
    Ok(LiftProblem::from_sublattice(&l, &all, &GridRepellerOracle::new(m))?)
}

fn attractor_problem(m: &CellMap, family: &[BitSet]) -> Result<LiftProblem, GridError> {
    let l = family_lattice(
        m,
        family,
        |a| m.comb_inv(&m.attracting_hull(a)) == *a,
        m.comb_inv(&m.full()),
        |a, b| m.comb_inv(&a.intersection(b)),
    )?;
    let all: Vec<usize> = (0..l.len()).collect();
    Ok(LiftProblem::from_sublattice(&l, &all, &GridAttractorOracle::new(m))?)
}

/// Lifts a sublattice of attractors by dualising to repellers, lifting there
/// and complementing back.
pub fn grid_attractor_lift(m: &CellMap, family: &[BitSet]) -> Result<LiftCertificate, GridError> {
    let pb = attractor_problem(m, family)?;
    let rep = GridRepellerOracle::new(m);
    let cert = lift::transport_by_duality(&pb.poset, pb.images.clone(), &rep, &Recipe(&rep), &GridDuality(m))?;
    cert.verify(&GridAttractorOracle::new(m))
        .map_err(|e| GridError::LawViolated(format!("transported certificate: {e}")))?;
    Ok(cert)
}

/// Lifts a sublattice of attractors directly on attracting blocks, starting
/// from the least block over the bottom join-irreducible and shrinking by
/// forward images.
pub fn direct_attractor_lift(m: &CellMap, family: &[BitSet]) -> Result<LiftCertificate, GridError> {
    let pb = attractor_problem(m, family)?;
    let att = GridAttractorOracle::new(m);
    Ok(lift::lift(&pb, &att, &Recipe(&att))?)
}
