//! Reference cell maps.

use super::{ingest_interval_map, CellGrid, CellMap, DEFAULT_PADDING, DEFAULT_SAMPLES_PER_CELL};

pub const G1_EXPR: &str = "(x + x^3)/2";
pub const G2_EXPR: &str = "piecewise(x<=0: 0, (5/2)*x*(1-x))";
/// Two repelling ends at ±1 whose unstable sets overlap on [0.1, 0.5] but
/// share only the attracting point 0.5.
pub const Y1_EXPR: &str = "piecewise(x<=-0.5: 2*x+1, piecewise(x<=0.5: 0.25+0.5*x, \
     piecewise(x<=0.6: 0.75-0.5*x, piecewise(x<=0.8: 0.45-1.75*(x-0.6), 0.1+4.5*(x-0.8)))))";

fn on_unit(src: &str, n: usize) -> CellMap {
    let grid = CellGrid::new(-1.0, 1.0, n).expect("valid grid");
    ingest_interval_map(src, grid, DEFAULT_SAMPLES_PER_CELL, DEFAULT_PADDING).expect("fixture ingests")
}

pub fn g1(n: usize) -> CellMap {
    on_unit(G1_EXPR, n)
}

pub fn g2(n: usize) -> CellMap {
    on_unit(G2_EXPR, n)
}

pub fn y1(n: usize) -> CellMap {
    on_unit(Y1_EXPR, n)
}

/// `a ↺ → m`, `c ↺ → m`, `m → z ↺` on cells `a=0, m=1, c=2, z=3`.
pub fn y_cells() -> CellMap {
    CellMap::discrete(vec![vec![0, 1], vec![3], vec![1, 2], vec![3]]).unwrap()
}

/// `a → {b, c}`, `b ↺`, `c ↺`.
pub fn fork() -> CellMap {
    CellMap::discrete(vec![vec![1, 2], vec![1], vec![2]]).unwrap()
}

/// `a → {a, b, c}`, `b ↺`, `c ↺`: the repellers `{a,b}` and `{a,c}` meet in
/// `{a}`, not `∅`.
pub fn fork_with_loop() -> CellMap {
    CellMap::discrete(vec![vec![0, 1, 2], vec![1], vec![2]]).unwrap()
}
