//! JSON file formats: inputs (systems, grid maps, posets, lattices,
//! sublattice selections) and outputs (lattices, lift certificates).
//!
//! Sets of states are written as label arrays in carrier order; sets of
//! cells as index arrays, with their interval supports alongside.

use crate::bitset::BitSet;
use crate::exact::FiniteDynSys;
use crate::grid::{ingest_interval_map, Adjacency, CellGrid, CellMap, DEFAULT_PADDING, DEFAULT_SAMPLES_PER_CELL};
use crate::lattice::FiniteDistributiveLattice;
use crate::lift::{AuditStep, LiftCertificate};
use crate::order::Poset;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    /// Malformed JSON or a field of the wrong shape; positions are 1-based.
    #[error("{message} at line {line}, column {column}")]
    Syntax { line: usize, column: usize, message: String },
    /// Well-formed but describes something unsupported.
    #[error("{0}")]
    Unsupported(String),
    /// Well-formed but inconsistent (unknown labels, empty carrier, ...).
    #[error("{0}")]
    Invalid(String),
}

impl InputError {
    /// `(line, column)` when the error has a position.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            InputError::Syntax { line, column, .. } => Some((*line, *column)),
            _ => None,
        }
    }
}

fn syntax(e: serde_json::Error) -> InputError {
    // serde_json appends " at line L column C" to Display; keep it separate
    let msg = e.to_string();
    let message = match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg,
    };
    InputError::Syntax { line: e.line(), column: e.column(), message }
}

fn parse<T: DeserializeOwned>(src: &str) -> Result<T, InputError> {
    serde_json::from_str(src).map_err(syntax)
}

/// What an input file turned out to be.
#[derive(Debug, Clone)]
pub enum Input {
    System(FiniteDynSys),
    Grid(CellMap),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(rename = "type")]
    _kind: String,
    #[serde(default)]
    time: Option<String>,
    states: Vec<String>,
    map: BTreeMap<String, String>,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES_PER_CELL
}

fn default_padding() -> f64 {
    DEFAULT_PADDING
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalMapFile {
    #[serde(rename = "type")]
    _kind: String,
    domain: [f64; 2],
    cells: usize,
    expr: String,
    #[serde(default = "default_samples")]
    samples_per_cell: usize,
    #[serde(default = "default_padding")]
    padding: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellMapFile {
    #[serde(rename = "type")]
    _kind: String,
    cells: usize,
    arrows: Vec<Vec<usize>>,
    #[serde(default)]
    domain: Option<[f64; 2]>,
    #[serde(default)]
    adjacency: Option<AdjacencyName>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum AdjacencyName {
    Line,
    None,
}

#[derive(Deserialize)]
struct Peek {
    #[serde(rename = "type")]
    kind: Option<String>,
    #[serde(default)]
    time: Option<Value>,
}

/// Reads `system.json` (`"type": "finite"`) or `gridmap.json`
/// (`"type": "interval_map"` / `"cell_map"`).
pub fn read_input(src: &str) -> Result<Input, InputError> {
    let peek: Peek = parse(src)?;
    if let Some(Value::String(t)) = &peek.time {
        if t == "continuous" {
            return Err(InputError::Unsupported(
                "continuous time (flows and semiflows) is not supported; give a finite map or an interval map".into(),
            ));
        }
    }
    match peek.kind.as_deref() {
        Some("finite") => read_system(src).map(Input::System),
        Some("interval_map") | Some("cell_map") => read_grid(src).map(Input::Grid),
        Some(other) => Err(InputError::Unsupported(format!(
            "unknown input type {other:?}; expected \"finite\", \"interval_map\" or \"cell_map\""
        ))),
        None => Err(InputError::Invalid("input has no \"type\" field".into())),
    }
}

pub fn read_system(src: &str) -> Result<FiniteDynSys, InputError> {
    let f: SystemFile = parse(src)?;
    match f.time.as_deref() {
        None | Some("discrete") => {}
        Some("continuous") => return Err(InputError::Unsupported("continuous time is not supported".into())),
        Some(t) => return Err(InputError::Invalid(format!("unknown time domain {t:?}"))),
    }
    let pairs: Vec<(String, String)> = f.map.into_iter().collect();
    FiniteDynSys::from_map(f.states, &pairs).map_err(|e| InputError::Invalid(e.to_string()))
}

pub fn read_grid(src: &str) -> Result<CellMap, InputError> {
    let peek: Peek = parse(src)?;
    let invalid = |e: crate::grid::GridError| InputError::Invalid(e.to_string());
    match peek.kind.as_deref() {
        Some("interval_map") => {
            let f: IntervalMapFile = parse(src)?;
            let grid = CellGrid::new(f.domain[0], f.domain[1], f.cells).map_err(invalid)?;
            ingest_interval_map(&f.expr, grid, f.samples_per_cell, f.padding).map_err(|e| match e {
                crate::grid::GridError::Parse(p) => InputError::Invalid(format!("expr: {p}")),
                e => invalid(e),
            })
        }
        Some("cell_map") => {
            let f: CellMapFile = parse(src)?;
            if f.arrows.len() != f.cells {
                return Err(InputError::Invalid(format!("{} arrow lists for {} cells", f.arrows.len(), f.cells)));
            }
            let [lo, hi] = f.domain.unwrap_or([0.0, f.cells.max(1) as f64]);
            let grid = CellGrid::new(lo, hi, f.cells).map_err(invalid)?;
            let adjacency = match f.adjacency {
                Some(AdjacencyName::Line) => Adjacency::Line,
                Some(AdjacencyName::None) | None => Adjacency::None,
            };
            let arrows = f.arrows.into_iter().map(|a| a.into_iter().collect()).collect();
            CellMap::from_arrows(grid, adjacency, arrows).map_err(invalid)
        }
        _ => Err(InputError::Invalid("expected \"type\": \"interval_map\" or \"cell_map\"".into())),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetFile {
    elements: Vec<String>,
    #[serde(default)]
    covers: Option<Vec<(String, String)>>,
    /// Full relation matrix, `leq[i][j]` meaning `elements[i] ≤ elements[j]`.
    #[serde(default)]
    leq: Option<Vec<Vec<bool>>>,
}

#[derive(Debug, Deserialize)]
struct LatticeFile {
    universe: Vec<String>,
    elements: Vec<Vec<String>>,
}

/// Input of `birkhoff`.
#[derive(Debug, Clone)]
pub enum OrderInput {
    Poset(Poset),
    Lattice(FiniteDistributiveLattice),
}

#[derive(Deserialize)]
struct OrderPeek {
    #[serde(default)]
    universe: Option<Value>,
}

/// A poset (`{"elements", "covers"}` or `{"elements", "leq"}`) or a lattice of
/// sets (`{"universe", "elements"}`, e.g. a previous `lattice.json`).
pub fn read_order(src: &str) -> Result<OrderInput, InputError> {
    let peek: OrderPeek = parse(src)?;
    if peek.universe.is_some() {
        let f: LatticeFile = parse(src)?;
        let mut sets = Vec::with_capacity(f.elements.len());
        for e in &f.elements {
            sets.push(labels_to_set(&f.universe, e)?);
        }
        let l = match FiniteDistributiveLattice::from_sets(f.universe.clone(), sets.clone()) {
            Ok(l) => l,
            Err(_) => FiniteDistributiveLattice::from_join_closed(f.universe, sets)
                .map_err(|e| InputError::Invalid(e.to_string()))?,
        };
        return Ok(OrderInput::Lattice(l));
    }
    let f: PosetFile = parse(src)?;
    let p = match (f.covers, f.leq) {
        (Some(c), None) => Poset::from_labeled_covers(f.elements, &c),
        (None, Some(m)) => Poset::from_matrix(f.elements, &m),
        (None, None) => Poset::from_labeled_covers(f.elements, &[]),
        (Some(_), Some(_)) => return Err(InputError::Invalid("give either \"covers\" or \"leq\", not both".into())),
    };
    p.map(OrderInput::Poset).map_err(|e| InputError::Invalid(e.to_string()))
}

fn labels_to_set(universe: &[String], labels: &[String]) -> Result<BitSet, InputError> {
    labels
        .iter()
        .map(|l| {
            universe.iter().position(|u| u == l).ok_or_else(|| InputError::Invalid(format!("unknown element {l:?}")))
        })
        .collect()
}

/// Which side a sublattice selection lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Attractor,
    Repeller,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum Member {
    Index(usize),
    Label(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SublatticeFile {
    elements: Vec<Vec<Member>>,
    #[serde(default)]
    side: Option<Side>,
}

/// A family of sets to lift, as named in a sublattice file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub family: Vec<BitSet>,
    pub side: Option<Side>,
}

/// `{"elements": [[...], ...], "side": "attractor" | "repeller"}`. Members are
/// state labels for systems and cell indices (or their decimal strings) for
/// grids.
pub fn read_selection(src: &str, input: &Input) -> Result<Selection, InputError> {
    let f: SublatticeFile = parse(src)?;
    let mut family = Vec::with_capacity(f.elements.len());
    for e in &f.elements {
        let mut s = BitSet::new();
        for m in e {
            s.insert(resolve(m, input)?);
        }
        family.push(s);
    }
    Ok(Selection { family, side: f.side })
}

fn resolve(m: &Member, input: &Input) -> Result<usize, InputError> {
    let unknown = || InputError::Invalid(format!("unknown member {m:?}"));
    match (input, m) {
        (Input::System(sys), Member::Label(l)) => sys.index_of(l).ok_or_else(unknown),
        (Input::System(_), Member::Index(_)) => Err(InputError::Invalid(format!("{m:?}: name states by label"))),
        (Input::Grid(g), Member::Index(i)) => (*i < g.len()).then_some(*i).ok_or_else(unknown),
        (Input::Grid(g), Member::Label(l)) => l.parse::<usize>().ok().filter(|&i| i < g.len()).ok_or_else(unknown),
    }
}

/// Renders sets for output.
#[derive(Debug, Clone, Copy)]
pub enum SetStyle<'a> {
    Labels(&'a [String]),
    Cells(&'a CellGrid),
}

impl<'a> SetStyle<'a> {
    pub fn of(input: &'a Input) -> Self {
        match input {
            Input::System(s) => SetStyle::Labels(s.states()),
            Input::Grid(g) => SetStyle::Cells(g.grid()),
        }
    }

    /// The bare member list.
    pub fn members(&self, s: &BitSet) -> Value {
        match self {
            SetStyle::Labels(l) => s.iter().map(|i| l[i].clone()).collect(),
            SetStyle::Cells(_) => s.iter().collect(),
        }
    }

    /// Members, plus the interval support for cell sets.
    pub fn set(&self, s: &BitSet) -> Value {
        match self {
            SetStyle::Labels(_) => self.members(s),
            SetStyle::Cells(g) => json!({ "cells": s.to_vec(), "support": supports(g, s) }),
        }
    }

    pub fn universe(&self) -> Vec<String> {
        match self {
            SetStyle::Labels(l) => l.to_vec(),
            SetStyle::Cells(g) => crate::order::numeric_labels(g.n_cells),
        }
    }
}

fn supports(g: &CellGrid, s: &BitSet) -> Vec<[f64; 2]> {
    g.support(s).into_iter().map(|(a, b)| [a, b]).collect()
}

/// `poset.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl PosetJson {
    pub fn new(p: &Poset) -> Self {
        PosetJson {
            elements: p.labels().to_vec(),
            covers: p.covers().into_iter().map(|(a, b)| (p.label(a).to_string(), p.label(b).to_string())).collect(),
        }
    }
}

/// `lattice.json`: elements in canonical order, join-irreducibles and Hasse
/// cover pairs by element index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeJson {
    pub universe: Vec<String>,
    pub elements: Vec<Value>,
    pub join_irreducibles: Vec<usize>,
    pub hasse: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub supports: Option<Vec<Vec<[f64; 2]>>>,
}

impl LatticeJson {
    pub fn new(l: &FiniteDistributiveLattice, style: SetStyle<'_>) -> Self {
        LatticeJson {
            universe: l.universe().to_vec(),
            elements: l.elements().iter().map(|e| style.members(e)).collect(),
            join_irreducibles: l.join_irreducibles(),
            hasse: l.covers(),
            supports: match style {
                SetStyle::Cells(g) => Some(l.elements().iter().map(|e| supports(g, e)).collect()),
                SetStyle::Labels(_) => None,
            },
        }
    }

    /// Plain label rendering, for lattices not tied to a phase space.
    pub fn plain(l: &FiniteDistributiveLattice) -> Self {
        Self::new(l, SetStyle::Labels(l.universe()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    /// `O(P)` in canonical order.
    pub downset: Vec<Vec<String>>,
    /// `s(α)`.
    pub image: Vec<Value>,
    /// `k(α)`.
    pub neighborhood: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditJson {
    pub step: usize,
    pub q: String,
    pub lambda_before: Vec<String>,
    pub mu: Vec<String>,
    pub attempt: usize,
    pub v_mu: Value,
    pub atom: Value,
    pub k_mu: Value,
    pub k_mu_decomposes: bool,
    pub conditioned: bool,
    pub atoms_avoid_conditioners: bool,
    pub atoms_disjoint: bool,
    pub in_domain_and_projects: bool,
}

impl AuditJson {
    fn new(a: &AuditStep, p: &Poset, style: SetStyle<'_>) -> Self {
        AuditJson {
            step: a.step,
            q: p.label(a.q).to_string(),
            lambda_before: p.names(&a.lambda_before),
            mu: p.names(&a.mu),
            attempt: a.attempt,
            v_mu: style.set(&a.v_mu),
            atom: style.set(&a.atom),
            k_mu: style.set(&a.k_mu),
            k_mu_decomposes: a.k_mu_decomposes,
            conditioned: a.conditioned,
            atoms_avoid_conditioners: a.atoms_avoid_conditioners,
            atoms_disjoint: a.atoms_disjoint,
            in_domain_and_projects: a.in_domain_and_projects,
        }
    }
}

/// `liftcert.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftCertJson {
    pub poset: PosetJson,
    pub assignment: Assignment,
    /// `B(k)({p})` per carrier element.
    pub atoms: BTreeMap<String, Value>,
    pub audit: Vec<AuditJson>,
    pub top_preserved: bool,
}

impl LiftCertJson {
    pub fn new(c: &LiftCertificate, style: SetStyle<'_>) -> Self {
        let p = &c.poset;
        LiftCertJson {
            poset: PosetJson::new(p),
            assignment: Assignment {
                downset: c.down_sets.iter().map(|d| p.names(d)).collect(),
                image: c.images.iter().map(|s| style.set(s)).collect(),
                neighborhood: c.table.iter().map(|s| style.set(s)).collect(),
            },
            atoms: (0..p.len()).map(|q| (p.label(q).to_string(), style.set(&c.atoms[q]))).collect(),
            audit: c.audit.iter().map(|a| AuditJson::new(a, p, style)).collect(),
            top_preserved: c.top_preserved,
        }
    }
}
