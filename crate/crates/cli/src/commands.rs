//! The subcommands. Each returns the text to write and an exit code.

use crate::config::{dot_header, render, Format, RunConfig};
use crate::error::{CliError, EXIT_FAILURE};
use clap::ValueEnum;
use morselat_core::dot;
use morselat_core::exact::{
    anbhd_count, att_lattice, commuting_square_check, dual_attractor, dual_repeller, rep_lattice, rnbhd_count,
    AttractorOracle, ExactDuality, FiniteDynSys, RepellerOracle, SquareViolation,
};
use morselat_core::grid::{
    att_star, block_lattices, comb_att_lattice, comb_rep_lattice, direct_attractor_lift, grid_attractor_lift,
    grid_lift_problem, principal_seeds, rep_star, CellMap, GridAttractorOracle, GridRepellerOracle,
};
use morselat_core::io::{Input, LatticeJson, LiftCertJson, OrderInput, PosetJson, Selection, SetStyle, Side};
use morselat_core::lattice::{booleanize, verify_poset_round_trip, BirkhoffRep, SublatticeViolation};
use morselat_core::lift::{self, LiftCertificate, LiftError, LiftOracle, LiftProblem, Recipe};
use morselat_core::order::numeric_labels;
use morselat_core::verify::{self, VerifyConfig};
use morselat_core::{BitSet, FiniteDistributiveLattice, Poset};
use serde::Serialize;
use serde_json::{json, Value};

pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

/// Which lattice `analyze --format dot` draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Attractors,
    Repellers,
}

#[derive(Serialize)]
struct Counts {
    attractors: usize,
    repellers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    attracting_neighborhoods: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    repelling_neighborhoods: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attracting_blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    repelling_blocks: Option<usize>,
}

#[derive(Serialize)]
struct DualPair {
    attractor: Value,
    repeller: Value,
    /// The dual of the repeller gives the attractor back.
    round_trip: bool,
}

#[derive(Serialize)]
struct Square {
    commutes: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<String>,
}

#[derive(Serialize)]
struct HasseDot {
    attractors: String,
    repellers: String,
}

#[derive(Serialize)]
struct Analysis {
    kind: &'static str,
    /// Grids above the enumeration bound are analysed from singleton seeds.
    #[serde(skip_serializing_if = "Option::is_none")]
    seeded: Option<bool>,
    counts: Counts,
    attractors: LatticeJson,
    repellers: LatticeJson,
    attractor_join_irreducibles: PosetJson,
    dual_pairs: Vec<DualPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    square: Option<Square>,
    hasse_dot: HasseDot,
}

fn draw(cfg: &RunConfig, which: Which, att: &FiniteDistributiveLattice, rep: &FiniteDistributiveLattice) -> String {
    let body = match which {
        Which::Attractors => dot::lattice_hasse("attractors", att),
        Which::Repellers => dot::lattice_hasse("repellers", rep),
    };
    dot_header(cfg) + &body
}

pub fn analyze(cfg: &RunConfig, input: &Input, which: Which) -> Result<Output, CliError> {
    match input {
        Input::System(sys) => analyze_system(cfg, sys, which),
        Input::Grid(m) => analyze_grid(cfg, m, which),
    }
}

fn analyze_system(cfg: &RunConfig, sys: &FiniteDynSys, which: Which) -> Result<Output, CliError> {
    let bound = cfg.bounds.max_enum;
    let att = att_lattice(sys, bound)?;
    let rep = rep_lattice(sys, bound)?;
    if cfg.format == Format::Dot {
        return Ok(Output::ok(draw(cfg, which, &att, &rep)));
    }
    let style = SetStyle::Labels(sys.states());
    let mut dual_pairs = Vec::with_capacity(att.len());
    for a in att.elements() {
        let r = dual_repeller(sys, a)?;
        let back = dual_attractor(sys, &r)?;
        dual_pairs.push(DualPair { attractor: style.set(a), repeller: style.set(&r), round_trip: back == *a });
    }
    let square = match commuting_square_check(sys, bound) {
        Ok(()) => Square { commutes: true, violation: None },
        Err(SquareViolation::System(e)) => return Err(e.into()),
        Err(v) => Square { commutes: false, violation: Some(v.to_string()) },
    };
    let out = Analysis {
        kind: "finite",
        seeded: None,
        counts: Counts {
            attractors: att.len(),
            repellers: rep.len(),
            attracting_neighborhoods: Some(anbhd_count(sys, bound)?),
            repelling_neighborhoods: Some(rnbhd_count(sys, bound)?),
            attracting_blocks: None,
            repelling_blocks: None,
        },
        attractors: LatticeJson::new(&att, style),
        repellers: LatticeJson::new(&rep, style),
        attractor_join_irreducibles: PosetJson::new(&att.ji_poset().0),
        dual_pairs,
        square: Some(square),
        hasse_dot: HasseDot {
            attractors: dot::lattice_hasse("attractors", &att),
            repellers: dot::lattice_hasse("repellers", &rep),
        },
    };
    Ok(Output::ok(render(cfg, &out)))
}

fn analyze_grid(cfg: &RunConfig, m: &CellMap, which: Which) -> Result<Output, CliError> {
    let bound = cfg.bounds.max_enum;
    let seeded = m.len() > bound;
    let seeds = principal_seeds(m);
    let seeds = seeded.then_some(seeds.as_slice());
    let att = comb_att_lattice(m, seeds, bound)?;
    let rep = comb_rep_lattice(m, seeds, bound)?;
    if cfg.format == Format::Dot {
        return Ok(Output::ok(draw(cfg, which, &att, &rep)));
    }
    let (att_blocks, rep_blocks) = block_lattices(m, seeds, bound)?;
    let style = SetStyle::Cells(m.grid());
    let dual_pairs = att
        .elements()
        .iter()
        .map(|a| {
            let r = att_star(m, a);
            DualPair { attractor: style.set(a), repeller: style.set(&r), round_trip: rep_star(m, &r) == *a }
        })
        .collect();
    let out = Analysis {
        kind: "grid",
        seeded: Some(seeded),
        counts: Counts {
            attractors: att.len(),
            repellers: rep.len(),
            attracting_neighborhoods: None,
            repelling_neighborhoods: None,
            attracting_blocks: Some(att_blocks.len()),
            repelling_blocks: Some(rep_blocks.len()),
        },
        attractors: LatticeJson::new(&att, style),
        repellers: LatticeJson::new(&rep, style),
        attractor_join_irreducibles: PosetJson::new(&att.ji_poset().0),
        dual_pairs,
        square: None,
        hasse_dot: HasseDot {
            attractors: dot::lattice_hasse("attractors", &att),
            repellers: dot::lattice_hasse("repellers", &rep),
        },
    };
    Ok(Output::ok(render(cfg, &out)))
}

#[derive(Serialize)]
struct LiftOut {
    side: Side,
    /// `inv_plus` (repeller side), `duality` (attractors via repellers) or
    /// `direct` (attractor side without duality).
    route: &'static str,
    verified: bool,
    #[serde(flatten)]
    certificate: LiftCertJson,
}

fn obstruction(e: LiftError, poset: Option<&Poset>, style: SetStyle<'_>) -> CliError {
    let LiftError::ObstructionFound(o) = &e else {
        return e.into();
    };
    let alpha = match poset {
        Some(p) => json!(p.names(&o.alpha)),
        None => json!(o.alpha),
    };
    let message = match poset {
        Some(p) => format!("no conditioners at step {} (q = {}) for α = {}", o.step, o.q_label, render_names(&p.names(&o.alpha))),
        None => format!("no conditioners at step {} (q = {}) for α = {alpha}", o.step, o.q_label),
    };
    CliError::obstruction(message, json!({ "step": o.step, "q": o.q_label, "alpha": alpha, "witness": style.set(&o.witness) }))
}

/// `J(family)` the way the grid front ends build it, for naming obstructions.
fn family_poset(n: usize, family: &[BitSet]) -> Option<Poset> {
    let l = FiniteDistributiveLattice::from_join_closed(numeric_labels(n), family.to_vec()).ok()?;
    Some(BirkhoffRep::of(&l).ji_poset)
}

fn pick_side(explicit: Option<Side>, is_rep: bool, is_att: bool) -> Result<Side, CliError> {
    match (explicit, is_rep, is_att) {
        (Some(s), _, _) => Ok(s),
        (None, true, _) => Ok(Side::Repeller),
        (None, false, true) => Ok(Side::Attractor),
        (None, false, false) => Err(CliError::not_sublattice(
            "the family is neither a family of attractors nor of repellers",
        )),
    }
}

fn checked(cert: LiftCertificate, oracle: &dyn LiftOracle) -> Result<LiftCertificate, CliError> {
    cert.verify(oracle).map_err(|v| CliError::failure(format!("certificate failed verification: {v}")))?;
    Ok(cert)
}

pub fn lift_cmd(cfg: &RunConfig, input: &Input, sel: &Selection, direct: bool) -> Result<Output, CliError> {
    let (side, route, cert) = match input {
        Input::System(sys) => lift_system(cfg, sys, sel, direct)?,
        Input::Grid(m) => lift_grid(m, sel, direct)?,
    };
    let style = SetStyle::of(input);
    if cfg.format == Format::Dot {
        let o = FiniteDistributiveLattice::of_down_sets(&cert.poset, cfg.bounds.max_enum)?;
        let labels: Vec<String> = cert
            .down_sets
            .iter()
            .zip(&cert.table)
            .map(|(d, k)| format!("{} ↦ {}", render_names(&cert.poset.names(d)), render_set(style, k)))
            .collect();
        return Ok(Output::ok(dot_header(cfg) + &dot::hasse("lift", &labels, &o.covers())));
    }
    let out = LiftOut { side, route, verified: true, certificate: LiftCertJson::new(&cert, style) };
    Ok(Output::ok(render(cfg, &out)))
}

fn render_names(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

fn render_set(style: SetStyle<'_>, s: &BitSet) -> String {
    match style {
        SetStyle::Labels(l) => render_names(&s.iter().map(|i| l[i].clone()).collect::<Vec<_>>()),
        SetStyle::Cells(_) => render_names(&s.iter().map(|i| i.to_string()).collect::<Vec<_>>()),
    }
}

fn not_sublattice(what: &str, v: SublatticeViolation, style: SetStyle<'_>) -> CliError {
    let r = |s: &BitSet| render_set(style, s);
    CliError::not_sublattice(match v {
        SublatticeViolation::NotAMember(s) => format!("{} is not an element of {what}", r(&s)),
        SublatticeViolation::MissingBound(s) => format!("the family misses the bound {} of {what}", r(&s)),
        SublatticeViolation::Join(a, b) => format!("the join of {} and {} in {what} is missing", r(&a), r(&b)),
        SublatticeViolation::Meet(a, b) => format!("the meet of {} and {} in {what} is missing", r(&a), r(&b)),
    })
}

type Lifted = (Side, &'static str, LiftCertificate);

fn lift_system(cfg: &RunConfig, sys: &FiniteDynSys, sel: &Selection, direct: bool) -> Result<Lifted, CliError> {
    let bound = cfg.bounds.max_enum;
    let style = SetStyle::Labels(sys.states());
    let is_rep = sel.family.iter().all(|r| sys.is_repeller(r));
    let is_att = sel.family.iter().all(|a| sys.is_attractor(a));
    match pick_side(sel.side, is_rep, is_att)? {
        Side::Repeller => {
            let rep = rep_lattice(sys, bound)?;
            let members = rep
                .check_sublattice(&sel.family)
                .map_err(|v| not_sublattice("Rep", v, style))?;
            let o = RepellerOracle(sys);
            let pb = LiftProblem::from_sublattice(&rep, &members, &o)?;
            let cert = lift::lift(&pb, &o, &Recipe(&o)).map_err(|e| obstruction(e, Some(&pb.poset), style))?;
            Ok((Side::Repeller, "inv_plus", checked(cert, &o)?))
        }
        Side::Attractor => {
            let att = att_lattice(sys, bound)?;
            let members = att
                .check_sublattice(&sel.family)
                .map_err(|v| not_sublattice("Att", v, style))?;
            let ao = AttractorOracle(sys);
            let pb = LiftProblem::from_sublattice(&att, &members, &ao)?;
            let (route, res) = if direct {
                ("direct", lift::lift(&pb, &ao, &Recipe(&ao)))
            } else {
                let ro = RepellerOracle(sys);
                ("duality", lift::transport_by_duality(&pb.poset, pb.images.clone(), &ro, &Recipe(&ro), &ExactDuality(sys)))
            };
            let cert = res.map_err(|e| obstruction(e, Some(&pb.poset), style))?;
            Ok((Side::Attractor, route, checked(cert, &ao)?))
        }
    }
}

fn lift_grid(m: &CellMap, sel: &Selection, direct: bool) -> Result<Lifted, CliError> {
    let style = SetStyle::Cells(m.grid());
    let is_rep = sel.family.iter().all(|r| m.comb_inv_plus(&m.repelling_hull(r)) == *r);
    let is_att = sel.family.iter().all(|a| m.comb_inv(&m.attracting_hull(a)) == *a);
    let named = |e: morselat_core::grid::GridError| match e {
        morselat_core::grid::GridError::Lift(l) => obstruction(l, family_poset(m.len(), &sel.family).as_ref(), style),
        e => e.into(),
    };
    match pick_side(sel.side, is_rep, is_att)? {
        Side::Repeller => {
            let pb = grid_lift_problem(m, &sel.family)?;
            let o = GridRepellerOracle::new(m);
            let cert = lift::lift(&pb, &o, &Recipe(&o)).map_err(|e| obstruction(e, Some(&pb.poset), style))?;
            Ok((Side::Repeller, "inv_plus", checked(cert, &o)?))
        }
        Side::Attractor if direct => {
            let cert = direct_attractor_lift(m, &sel.family).map_err(named)?;
            Ok((Side::Attractor, "direct", checked(cert, &GridAttractorOracle::new(m))?))
        }
        Side::Attractor => {
            let cert = grid_attractor_lift(m, &sel.family).map_err(named)?;
            Ok((Side::Attractor, "duality", checked(cert, &GridAttractorOracle::new(m))?))
        }
    }
}

/// `n^n` maps are enumerated; above this many the run is refused.
pub const MAX_EXHAUSTIVE_MAPS: u64 = 1 << 20;

pub fn check_corpus(cfg: &RunConfig, vc: &VerifyConfig) -> Result<(), CliError> {
    let bound = cfg.bounds.max_enum;
    if vc.max_states > bound {
        return Err(CliError::bound(format!("--max-states {} is above the enumeration bound {bound}", vc.max_states)));
    }
    if let Some(n) = vc.exhaustive {
        let maps = (n as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if n > bound || maps > MAX_EXHAUSTIVE_MAPS {
            return Err(CliError::bound(format!("--exhaustive {n} means {n}^{n} systems; refusing")));
        }
    }
    Ok(())
}

pub fn verify_cmd(cfg: &RunConfig, vc: &VerifyConfig) -> Result<Output, CliError> {
    if cfg.format == Format::Dot {
        return Err(CliError::usage("verify has no DOT output"));
    }
    check_corpus(cfg, vc)?;
    let report = verify::run(vc);
    let code = if report.all_passed { 0 } else { EXIT_FAILURE };
    Ok(Output { text: render(cfg, &report), code })
}

#[derive(Serialize)]
struct Booleanization {
    /// `J(L)`; the Boolean algebra is its powerset.
    ground: Vec<String>,
    size: u128,
    /// `j(a) = {p ∈ J(L) | p ≤ a}` for each element, in lattice order.
    embedding: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct BirkhoffOut {
    input: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    poset: Option<PosetJson>,
    /// `O(P)` for a poset input, the lattice itself otherwise.
    lattice: LatticeJson,
    join_irreducibles: PosetJson,
    booleanization: Booleanization,
    round_trip: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    round_trip_error: Option<String>,
}

pub fn birkhoff(cfg: &RunConfig, input: &OrderInput) -> Result<Output, CliError> {
    let bound = cfg.bounds.max_enum;
    let (kind, poset, l) = match input {
        OrderInput::Poset(p) => ("poset", Some(p), FiniteDistributiveLattice::of_down_sets(p, bound)?),
        OrderInput::Lattice(l) => ("lattice", None, l.clone()),
    };
    if cfg.format == Format::Dot {
        return Ok(Output::ok(dot_header(cfg) + &dot::lattice_hasse("lattice", &l)));
    }
    let rep = BirkhoffRep::of(&l);
    if rep.ji_poset.len() > bound {
        return Err(CliError::bound(format!(
            "J(L) has {} elements, above the enumeration bound {bound}",
            rep.ji_poset.len()
        )));
    }
    let mut check = rep.verify(&l, bound);
    if let (Ok(()), Some(p)) = (&check, poset) {
        check = verify_poset_round_trip(p, bound);
    }
    let b = booleanize(&l);
    let out = BirkhoffOut {
        input: kind,
        poset: poset.map(PosetJson::new),
        lattice: LatticeJson::plain(&l),
        join_irreducibles: PosetJson::new(&rep.ji_poset),
        booleanization: Booleanization {
            ground: b.ground.labels().to_vec(),
            size: b.size(),
            embedding: b.embedding.iter().map(|e| b.ground.names(e)).collect(),
        },
        round_trip: check.is_ok(),
        round_trip_error: check.err(),
    };
    Ok(Output::ok(render(cfg, &out)))
}
