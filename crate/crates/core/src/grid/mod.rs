//! Multivalued cell maps on a 1-D grid: outer approximations of interval maps,
//! attracting/repelling blocks and their walk-based invariant parts.
//!
//! Blocks use the combinatorial closure `cl(N) = N ∪ grid-neighbours`:
//! `N` is attracting iff `F(cl N) ⊆ N` and repelling iff `cl(F⁻¹ N) ⊆ N`.
//! The two notions are exchanged by complementation.

mod blocks;
mod expr;
pub mod fixtures;
mod lattices;
mod lift;

pub use expr::{Expr, ParseError};
pub use lattices::{
    att_star, attracting_blocks, block_lattices, comb_att_lattice, comb_rep_lattice, principal_seeds,
    refinement_check, rep_star, repelling_blocks,
};
pub use lift::{
    direct_attractor_lift, grid_attractor_lift, grid_lift_problem, shrink_repelling_block, GridAttractorOracle,
    GridDuality, GridRepellerOracle,
};

use crate::bitset::BitSet;
use crate::lift::LiftError;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Default cap on `n_cells` for exhaustive block enumeration.
pub const DEFAULT_MAX_CELLS: usize = 20;
pub const DEFAULT_SAMPLES_PER_CELL: usize = 32;
pub const DEFAULT_PADDING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("image of cell {cell} leaves the domain: {value}")]
    ImageOutOfDomain { cell: usize, value: f64 },
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("bad cell map: {0}")]
    BadArrows(String),
    #[error("{what} has {size} cells, above the enumeration bound {bound}; supply seeds")]
    TooLarge { what: &'static str, size: usize, bound: usize },
    #[error("{0:?} is not a repelling block")]
    NotARepellingBlock(BitSet),
    #[error("{0:?} is not an attracting block")]
    NotAnAttractingBlock(BitSet),
    #[error("family is not a sublattice: {detail} ({a:?}, {b:?})")]
    NotASublattice { a: BitSet, b: BitSet, detail: String },
    #[error("law violated: {0}")]
    LawViolated(String),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellGrid {
    pub lo: f64,
    pub hi: f64,
    pub n_cells: usize,
    /// Always 1.
    pub dim: u8,
}

impl CellGrid {
    pub fn new(lo: f64, hi: f64, n_cells: usize) -> Result<Self, GridError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GridError::BadGrid(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if n_cells == 0 {
            return Err(GridError::BadGrid("n_cells must be positive".into()));
        }
        Ok(CellGrid { lo, hi, n_cells, dim: 1 })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n_cells as f64
    }

    /// Cell `i` as a closed interval; endpoints are computed without
    /// accumulating width so neighbouring cells share them exactly.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let at = |k: usize| {
            if k == self.n_cells {
                self.hi
            } else {
                self.lo + (self.hi - self.lo) * k as f64 / self.n_cells as f64
            }
        };
        (at(i), at(i + 1))
    }

    /// Cells meeting the closed interval `[a, b]`.
    pub fn cells_meeting(&self, a: f64, b: f64) -> BitSet {
        (0..self.n_cells)
            .filter(|&i| {
                let (l, r) = self.cell(i);
                l <= b && r >= a
            })
            .collect()
    }

    /// The union of the cells of `s` as a sorted list of disjoint intervals.
    pub fn support(&self, s: &BitSet) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut prev: Option<usize> = None;
        for i in s.iter() {
            let (l, r) = self.cell(i);
            match (prev, out.last_mut()) {
                (Some(p), Some(last)) if p + 1 == i => last.1 = r,
                _ => out.push((l, r)),
            }
            prev = Some(i);
        }
        out
    }
}

/// Whether grid neighbours count for `cl`/`int`. Hand-built cell maps are
/// usually discrete graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjacency {
    Line,
    None,
}

/// How a map was obtained; echoed in outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ingestion {
    pub expr: String,
    pub samples_per_cell: usize,
    pub padding: f64,
}

#[derive(Debug, Clone)]
pub struct CellMap {
    grid: CellGrid,
    adjacency: Adjacency,
    arrows: Vec<BitSet>,
    pre: Vec<BitSet>,
    ingestion: Option<Ingestion>,
}

impl CellMap {
    pub fn from_arrows(grid: CellGrid, adjacency: Adjacency, arrows: Vec<BitSet>) -> Result<Self, GridError> {
        let n = grid.n_cells;
        if arrows.len() != n {
            return Err(GridError::BadArrows(format!("{} arrow sets for {n} cells", arrows.len())));
        }
        let full = BitSet::full(n);
        for (c, a) in arrows.iter().enumerate() {
            if a.is_empty() {
                return Err(GridError::BadArrows(format!("cell {c} has no target")));
            }
            if !a.is_subset(&full) {
                return Err(GridError::BadArrows(format!("cell {c} has a target out of range")));
            }
        }
        let mut pre = vec![BitSet::new(); n];
        for (c, a) in arrows.iter().enumerate() {
            for d in a.iter() {
                pre[d].insert(c);
            }
        }
        Ok(CellMap { grid, adjacency, arrows, pre, ingestion: None })
    }

    /// A hand-built map on `n` abstract cells (domain `[0, n]`, no adjacency).
    pub fn discrete(arrows: Vec<Vec<usize>>) -> Result<Self, GridError> {
        let grid = CellGrid::new(0.0, arrows.len().max(1) as f64, arrows.len())?;
        Self::from_arrows(grid, Adjacency::None, arrows.into_iter().map(|a| a.into_iter().collect()).collect())
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }
    pub fn adjacency(&self) -> Adjacency {
        self.adjacency
    }
    pub fn ingestion(&self) -> Option<&Ingestion> {
        self.ingestion.as_ref()
    }
    pub fn len(&self) -> usize {
        self.grid.n_cells
    }
    pub fn is_empty(&self) -> bool {
        self.grid.n_cells == 0
    }
    pub fn full(&self) -> BitSet {
        BitSet::full(self.len())
    }
    pub fn arrows(&self, c: usize) -> &BitSet {
        &self.arrows[c]
    }
    pub fn all_arrows(&self) -> &[BitSet] {
        &self.arrows
    }

    /// `F(N)`.
    pub fn image(&self, s: &BitSet) -> BitSet {
        let mut out = BitSet::new();
        for c in s.iter() {
            out.union_with(&self.arrows[c]);
        }
        out
    }

    /// `F⁻¹(N)`: cells with some arrow into `N`.
    pub fn preimage(&self, s: &BitSet) -> BitSet {
        let mut out = BitSet::new();
        for c in s.iter() {
            out.union_with(&self.pre[c]);
        }
        out
    }

    pub fn closure(&self, s: &BitSet) -> BitSet {
        let mut out = s.clone();
        if self.adjacency == Adjacency::Line {
            for c in s.iter() {
                if c > 0 {
                    out.insert(c - 1);
                }
                if c + 1 < self.len() {
                    out.insert(c + 1);
                }
            }
        }
        out
    }

    /// Cells of `s` none of whose neighbours lie outside `s`.
    pub fn interior(&self, s: &BitSet) -> BitSet {
        let n = self.len();
        self.closure(&s.complement(n)).complement(n)
    }

    pub fn is_attracting_block(&self, s: &BitSet) -> bool {
        self.image(&self.closure(s)).is_subset(s)
    }

    pub fn is_repelling_block(&self, s: &BitSet) -> bool {
        self.closure(&self.preimage(s)).is_subset(s)
    }

    /// Smallest attracting block containing `s`.
    pub fn attracting_hull(&self, s: &BitSet) -> BitSet {
        let mut cur = s.clone();
        loop {
            let next = cur.union(&self.image(&self.closure(&cur)));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Smallest repelling block containing `s`.
    pub fn repelling_hull(&self, s: &BitSet) -> BitSet {
        let mut cur = s.clone();
        loop {
            let next = cur.union(&self.closure(&self.preimage(&cur)));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

/// Samples `expr` on every cell (endpoints plus equally spaced interior
/// points) and maps the cell to all cells meeting the padded range of
/// sampled values. Values within `padding` of the domain are clamped.
pub fn ingest_interval_map(
    src: &str,
    grid: CellGrid,
    samples_per_cell: usize,
    padding: f64,
) -> Result<CellMap, GridError> {
    let expr = Expr::parse(src)?;
    if samples_per_cell < 2 {
        return Err(GridError::BadGrid("samples_per_cell must be at least 2".into()));
    }
    if !(padding >= 0.0 && padding.is_finite()) {
        return Err(GridError::BadGrid(format!("padding must be a nonnegative number, got {padding}")));
    }
    let arrows = (0..grid.n_cells)
        .into_par_iter()
        .map(|c| {
            let (a, b) = grid.cell(c);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for j in 0..samples_per_cell {
                let x = if j + 1 == samples_per_cell {
                    b
                } else {
                    a + (b - a) * j as f64 / (samples_per_cell - 1) as f64
                };
                let y = expr.eval(x);
                if !y.is_finite() || y < grid.lo - padding || y > grid.hi + padding {
                    return Err(GridError::ImageOutOfDomain { cell: c, value: y });
                }
                lo = lo.min(y);
                hi = hi.max(y);
            }
            Ok(grid.cells_meeting((lo - padding).max(grid.lo), (hi + padding).min(grid.hi)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut map = CellMap::from_arrows(grid, Adjacency::Line, arrows)?;
    map.ingestion = Some(Ingestion { expr: src.to_string(), samples_per_cell, padding });
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_and_supports() {
        let g = CellGrid::new(-1.0, 1.0, 16).unwrap();
        assert_eq!(g.cell(0), (-1.0, -0.875));
        assert_eq!(g.cell(15).1, 1.0);
        assert_eq!(g.cell(7).1, g.cell(8).0);
        assert_eq!(g.cells_meeting(-0.25, 0.25).to_vec(), vec![5, 6, 7, 8, 9, 10]);
        let s: BitSet = [0, 1, 2, 5, 15].into_iter().collect();
        assert_eq!(g.support(&s), vec![(-1.0, -0.625), (-0.375, -0.25), (0.875, 1.0)]);
        assert!(CellGrid::new(1.0, 1.0, 3).is_err());
        assert!(CellGrid::new(0.0, 1.0, 0).is_err());
    }

    // Independent oracle: sample the map directly and see which cells the
    // images land in.
    fn sampled_targets(f: impl Fn(f64) -> f64, g: &CellGrid, c: usize) -> BitSet {
        let (a, b) = g.cell(c);
        let mut out = BitSet::new();
        for j in 0..=1000 {
            let y = f(a + (b - a) * j as f64 / 1000.0);
            for d in 0..g.n_cells {
                let (l, r) = g.cell(d);
                if l <= y && y <= r {
                    out.insert(d);
                }
            }
        }
        out
    }

    #[test]
    fn g1_outer_approximates_samples() {
        let m = fixtures::g1(16);
        let f = |x: f64| (x + x * x * x) / 2.0;
        for c in 0..16 {
            assert!(sampled_targets(f, m.grid(), c).is_subset(m.arrows(c)), "cell {c}");
        }
        // extreme cells: themselves plus inward neighbours only
        assert_eq!(m.arrows(0).first(), Some(0));
        assert!(m.arrows(0).iter().all(|d| d <= 1));
        assert!(m.arrows(15).iter().all(|d| d >= 14));
        assert!(m.arrows(15).contains(15));
    }

    #[test]
    fn g2_and_identity() {
        let g2 = fixtures::g2(16);
        assert_eq!(g2.len(), 16);
        // everything left of 0 goes to the cells at 0
        assert!(g2.arrows(0).is_subset(&[7, 8].into_iter().collect()));
        let id = ingest_interval_map("x", CellGrid::new(0.0, 1.0, 10).unwrap(), 4, 0.0).unwrap();
        for c in 0..10 {
            assert!(id.arrows(c).contains(c));
        }
    }

    #[test]
    fn ingestion_errors() {
        let g = CellGrid::new(-1.0, 1.0, 8).unwrap();
        assert!(matches!(ingest_interval_map("2*x", g, 4, 0.0), Err(GridError::ImageOutOfDomain { cell: 0, .. })));
        assert!(matches!(ingest_interval_map("x +", g, 4, 0.0), Err(GridError::Parse(_))));
        assert!(ingest_interval_map("x", g, 1, 0.0).is_err());
        assert!(matches!(ingest_interval_map("1/x", g, 4, 0.0), Err(GridError::ImageOutOfDomain { .. })));
        // within the padding: clamped
        assert!(ingest_interval_map("x*(1+1e-12)", g, 4, 1e-9).is_ok());
    }

    #[test]
    fn closure_and_interior() {
        let m = fixtures::g1(8);
        let s: BitSet = [2, 3, 4].into_iter().collect();
        assert_eq!(m.closure(&s).to_vec(), vec![1, 2, 3, 4, 5]);
        assert_eq!(m.interior(&s).to_vec(), vec![3]);
        assert_eq!(m.interior(&m.full()), m.full());
        let y = fixtures::y_cells();
        assert_eq!(y.closure(&BitSet::singleton(1)), BitSet::singleton(1));
    }

    #[test]
    fn hulls_are_least_blocks() {
        let m = fixtures::g1(10);
        for mask in 0u64..1 << 10 {
            let s = BitSet::from_mask(mask);
            let ha = m.attracting_hull(&s);
            let hr = m.repelling_hull(&s);
            assert!(m.is_attracting_block(&ha) && s.is_subset(&ha));
            assert!(m.is_repelling_block(&hr) && s.is_subset(&hr));
            if m.is_attracting_block(&s) {
                assert_eq!(ha, s);
            }
        }
    }

    #[test]
    fn bad_arrows() {
        assert!(CellMap::discrete(vec![vec![0], vec![]]).is_err());
        assert!(CellMap::discrete(vec![vec![0], vec![2]]).is_err());
        let g = CellGrid::new(0.0, 1.0, 2).unwrap();
        assert!(CellMap::from_arrows(g, Adjacency::Line, vec![BitSet::singleton(0)]).is_err());
    }
}
