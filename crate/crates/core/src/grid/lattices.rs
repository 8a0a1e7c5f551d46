//! Block lattices and the lattices of combinatorial attractors/repellers.

use super::{Adjacency, CellMap, GridError};
use crate::bitset::BitSet;
use crate::lattice::FiniteDistributiveLattice;
use crate::order::numeric_labels;
use std::collections::HashSet;

/// Cap on closures generated from seeds.
pub const MAX_GENERATED: usize = 1 << 12;

/// Exhaustive check budget for pairwise law verification.
const LAW_PAIRS: usize = 1 << 16;

fn check_bound(m: &CellMap, bound: usize) -> Result<(), GridError> {
    if m.len() > bound || m.len() > 63 {
        return Err(GridError::TooLarge { what: "cell map", size: m.len(), bound: bound.min(63) });
    }
    Ok(())
}

/// Every attracting block, by brute force over all cell sets.
pub fn attracting_blocks(m: &CellMap, bound: usize) -> Result<Vec<BitSet>, GridError> {
    check_bound(m, bound)?;
    let n = m.len();
    let full: u64 = (1u64 << n) - 1;
    let arrows: Vec<u64> = m.all_arrows().iter().map(BitSet::to_mask).collect();
    let line = m.adjacency() == Adjacency::Line;
    let mut out = Vec::new();
    for s in 0..=full {
        let cl = if line { (s | s << 1 | s >> 1) & full } else { s };
        let mut img = 0u64;
        let mut rest = cl;
        while rest != 0 {
            img |= arrows[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        if img & !s == 0 {
            out.push(BitSet::from_mask(s));
        }
    }
    Ok(out)
}

/// Complements of the attracting blocks.
pub fn repelling_blocks(m: &CellMap, bound: usize) -> Result<Vec<BitSet>, GridError> {
    Ok(attracting_blocks(m, bound)?.into_iter().map(|b| b.complement(m.len())).collect())
}

/// One singleton per cell. Every attractor is a union of the attractors of
/// the hulls of these, so they generate the whole lattice.
pub fn principal_seeds(m: &CellMap) -> Vec<BitSet> {
    (0..m.len()).map(BitSet::singleton).collect()
}

/// Closes `gens ∪ {∅, top}` under `∪` and `meet`.
fn close(
    gens: Vec<BitSet>,
    top: BitSet,
    meet: impl Fn(&BitSet, &BitSet) -> BitSet,
    what: &'static str,
) -> Result<Vec<BitSet>, GridError> {
    let mut all: HashSet<BitSet> = gens.into_iter().collect();
    all.insert(BitSet::new());
    all.insert(top);
    let mut frontier: Vec<BitSet> = all.iter().cloned().collect();
    while !frontier.is_empty() {
        let snapshot: Vec<BitSet> = all.iter().cloned().collect();
        let mut next = Vec::new();
        for a in &frontier {
            for b in &snapshot {
                for c in [a.union(b), meet(a, b)] {
                    if all.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            if all.len() > MAX_GENERATED {
                return Err(GridError::TooLarge { what, size: all.len(), bound: MAX_GENERATED });
            }
        }
        frontier = next;
    }
    let mut v: Vec<BitSet> = all.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Attracting-block and repelling-block lattices. Without seeds every block
/// is enumerated; with seeds, the lattice generated by the attracting hulls of
/// the forward iterates of each seed (and their complements on the repelling
/// side).
pub fn block_lattices(
    m: &CellMap,
    seeds: Option<&[BitSet]>,
    bound: usize,
) -> Result<(FiniteDistributiveLattice, FiniteDistributiveLattice), GridError> {
    let n = m.len();
    let att = match seeds {
        None => attracting_blocks(m, bound)?,
        Some(seeds) => {
            let mut gens = Vec::new();
            for s in seeds {
                let mut cur = m.attracting_hull(s);
                loop {
                    gens.push(cur.clone());
                    let next = m.attracting_hull(&m.image(&cur));
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
            }
            close(gens, m.full(), BitSet::intersection, "block lattice")?
        }
    };
    let rep: Vec<BitSet> = att.iter().map(|b| b.complement(n)).collect();
    let labels = numeric_labels(n);
    let lat = |sets: Vec<BitSet>| {
        FiniteDistributiveLattice::from_sets(labels.clone(), sets).map_err(|e| GridError::LawViolated(e.to_string()))
    };
    Ok((lat(att)?, lat(rep)?))
}

fn verify_laws(
    l: &FiniteDistributiveLattice,
    meet: impl Fn(&BitSet, &BitSet) -> BitSet,
) -> Result<(), GridError> {
    let els = l.elements();
    let stride = (els.len() * els.len() / LAW_PAIRS).max(1);
    let mut k = 0usize;
    for (i, a) in els.iter().enumerate() {
        for b in &els[i + 1..] {
            k += 1;
            if k % stride != 0 {
                continue;
            }
            let expect = meet(a, b);
            let got = l.meet_set(a, b);
            if got != expect {
                return Err(GridError::LawViolated(format!(
                    "meet of {a:?} and {b:?}: infimum {got:?}, walk rule {expect:?}"
                )));
            }
        }
    }
    Ok(())
}

/// `{comb_inv(N) | N attracting block}`, `∨ = ∪`, `∧ = comb_inv(∩)`.
pub fn comb_att_lattice(
    m: &CellMap,
    seeds: Option<&[BitSet]>,
    bound: usize,
) -> Result<FiniteDistributiveLattice, GridError> {
    let meet = |a: &BitSet, b: &BitSet| m.comb_inv(&a.intersection(b));
    let top = m.comb_inv(&m.full());
    let family: Vec<BitSet> = match seeds {
        None => {
            let blocks = attracting_blocks(m, bound)?;
            verify_join_law(&blocks, |b| m.comb_inv(b))?;
            blocks.iter().map(|b| m.comb_inv(b)).collect::<HashSet<_>>().into_iter().collect()
        }
        Some(seeds) => {
            let gens = seeds.iter().map(|s| m.comb_inv(&m.attracting_hull(s))).collect();
            close(gens, top, meet, "attractor lattice")?
        }
    };
    let l = FiniteDistributiveLattice::from_join_closed(numeric_labels(m.len()), family)
        .map_err(|e| GridError::LawViolated(e.to_string()))?;
    verify_laws(&l, meet)?;
    Ok(l)
}

/// `{comb_inv_plus(M) | M repelling block}`, `∨ = ∪`, `∧ = comb_inv_plus(∩)`.
pub fn comb_rep_lattice(
    m: &CellMap,
    seeds: Option<&[BitSet]>,
    bound: usize,
) -> Result<FiniteDistributiveLattice, GridError> {
    let meet = |a: &BitSet, b: &BitSet| m.comb_inv_plus(&a.intersection(b));
    let top = m.comb_inv_plus(&m.full());
    let family: Vec<BitSet> = match seeds {
        None => {
            let blocks = repelling_blocks(m, bound)?;
            verify_join_law(&blocks, |b| m.comb_inv_plus(b))?;
            blocks.iter().map(|b| m.comb_inv_plus(b)).collect::<HashSet<_>>().into_iter().collect()
        }
        Some(seeds) => {
            let gens = seeds.iter().map(|s| m.comb_inv_plus(&m.repelling_hull(s))).collect();
            close(gens, top, meet, "repeller lattice")?
        }
    };
    let l = FiniteDistributiveLattice::from_join_closed(numeric_labels(m.len()), family)
        .map_err(|e| GridError::LawViolated(e.to_string()))?;
    verify_laws(&l, meet)?;
    Ok(l)
}

fn verify_join_law(blocks: &[BitSet], f: impl Fn(&BitSet) -> BitSet) -> Result<(), GridError> {
    let images: Vec<BitSet> = blocks.iter().map(&f).collect();
    let stride = (blocks.len() * blocks.len() / LAW_PAIRS).max(1);
    let mut k = 0usize;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            k += 1;
            if k % stride != 0 {
                continue;
            }
            if f(&blocks[i].union(&blocks[j])) != images[i].union(&images[j]) {
                return Err(GridError::LawViolated(format!("join law fails at {:?}, {:?}", blocks[i], blocks[j])));
            }
        }
    }
    Ok(())
}

/// `A* = comb_inv_plus(N^c)` with `N` the least attracting block over `A`.
pub fn att_star(m: &CellMap, a: &BitSet) -> BitSet {
    m.comb_inv_plus(&m.attracting_hull(a).complement(m.len()))
}

/// `R* = comb_inv(M^c)` with `M` the least repelling block over `R`.
pub fn rep_star(m: &CellMap, r: &BitSet) -> BitSet {
    m.comb_inv(&m.repelling_hull(r).complement(m.len()))
}

fn inside(cell: (f64, f64), support: &[(f64, f64)]) -> bool {
    let eps = 1e-12 * (1.0 + cell.0.abs().max(cell.1.abs()));
    support.iter().any(|&(l, r)| l - eps <= cell.0 && cell.1 <= r + eps)
}

/// Sends each coarse attractor to the largest fine attractor whose cells lie
/// inside its support, and checks that this is a lattice embedding. Returns
/// the map on element indices.
pub fn refinement_check(
    coarse: &CellMap,
    coarse_att: &FiniteDistributiveLattice,
    fine: &CellMap,
    fine_att: &FiniteDistributiveLattice,
) -> Result<Vec<usize>, String> {
    let fg = fine.grid();
    let map: Vec<usize> = coarse_att
        .elements()
        .iter()
        .map(|a| {
            let sup = coarse.grid().support(a);
            let best = fine_att
                .elements()
                .iter()
                .filter(|b| b.iter().all(|c| inside(fg.cell(c), &sup)))
                .fold(BitSet::new(), |acc, b| acc.union(b));
            fine_att.index_of(&best).expect("union of members is a member")
        })
        .collect();
    let k = coarse_att.len();
    for i in 0..k {
        if i != coarse_att.bottom() && map[i] == fine_att.bottom() {
            return Err(format!("coarse attractor {:?} contains no fine attractor", coarse_att.element(i)));
        }
        for j in 0..k {
            if coarse_att.leq(i, j) != fine_att.leq(map[i], map[j]) {
                return Err(format!("order not preserved between elements {i} and {j}"));
            }
            if map[coarse_att.join(i, j)] != fine_att.join(map[i], map[j]) {
                return Err(format!("join not preserved between elements {i} and {j}"));
            }
            if map[coarse_att.meet(i, j)] != fine_att.meet(map[i], map[j]) {
                return Err(format!("meet not preserved between elements {i} and {j}"));
            }
        }
    }
    Ok(map)
}
