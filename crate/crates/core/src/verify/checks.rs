//! The per-system checks. `cl = int = id` throughout, so every closure in a
//! statement is dropped and "compact" holds vacuously.

use super::{Tag, Tally, VerifyConfig};
use crate::bitset::BitSet;
use crate::exact::{
    att_lattice, check_ar_pair, commuting_square_check, dual_attractor, dual_repeller, rep_lattice, ArViolation,
    AttractorOracle, ExactDuality, FiniteDynSys, InvarianceFlags, RepellerOracle, DEFAULT_MAX_STATES,
};
use crate::lattice::{check_anti_hom, BirkhoffRep, FiniteDistributiveLattice};
use crate::lift::{lift, transport_by_duality, LiftOracle, LiftProblem, Recipe};
use crate::order::DEFAULT_DOWNSET_BOUND;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cap on invariant sets / attractors fed to the costlier per-element checks.
const ELEMENT_CAP: usize = 48;

struct Ctx<'a> {
    sys: &'a FiniteDynSys,
    n: usize,
    full: BitSet,
    sets: Vec<BitSet>,
    flags: Vec<InvarianceFlags>,
    omega: Vec<BitSet>,
    alpha: Vec<BitSet>,
    inv: Vec<BitSet>,
    inv_plus: Vec<BitSet>,
    anbhd: Vec<bool>,
    rnbhd: Vec<bool>,
    rng: ChaCha8Rng,
    budget: usize,
}

impl Ctx<'_> {
    fn names(&self, s: &BitSet) -> String {
        format!("{:?}", self.sys.names(s))
    }

    fn idx(&self, s: &BitSet) -> usize {
        s.to_mask() as usize
    }

    fn class(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| pred(i)).collect()
    }

    /// Unordered pairs (with repetition) of `0..len`, all of them when that
    /// fits the budget, otherwise a seeded sample.
    fn pairs(&mut self, len: usize) -> Vec<(usize, usize)> {
        if len == 0 {
            return Vec::new();
        }
        if len * (len + 1) / 2 <= self.budget {
            (0..len).flat_map(|i| (i..len).map(move |j| (i, j))).collect()
        } else {
            (0..self.budget).map(|_| (self.rng.gen_range(0..len), self.rng.gen_range(0..len))).collect()
        }
    }

    fn cross(&mut self, a: usize, b: usize, budget: usize) -> Vec<(usize, usize)> {
        if a == 0 || b == 0 {
            return Vec::new();
        }
        if a * b <= budget {
            (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect()
        } else {
            (0..budget).map(|_| (self.rng.gen_range(0..a), self.rng.gen_range(0..b))).collect()
        }
    }

    fn sample(&mut self, len: usize, cap: usize) -> Vec<usize> {
        if len <= cap {
            (0..len).collect()
        } else {
            rand::seq::index::sample(&mut self.rng, len, cap).into_vec()
        }
    }
}

/// `φ(t, U) ⊆ U` for every `t` past some `τ`: the tail cycle of the image
/// sequence stays inside `U`.
fn eventually_inside(sys: &FiniteDynSys, u: &BitSet) -> bool {
    let mut seq: Vec<BitSet> = Vec::new();
    let mut cur = u.clone();
    loop {
        if let Some(i) = seq.iter().position(|s| *s == cur) {
            return seq[i..].iter().all(|s| s.is_subset(u));
        }
        seq.push(cur.clone());
        cur = sys.image(&cur, 1);
    }
}

/// Runs every tagged check on one system.
pub fn check_system(sys: &FiniteDynSys, cfg: &VerifyConfig, seed: u64) -> Tally {
    let n = sys.len();
    assert!(n <= DEFAULT_MAX_STATES, "verify enumerates all 2^n subsets");
    let sets: Vec<BitSet> = (0u64..1 << n).map(BitSet::from_mask).collect();
    let mut cx = Ctx {
        sys,
        n,
        full: sys.full(),
        flags: sets.iter().map(|s| sys.classify_invariance(s)).collect(),
        omega: sets.iter().map(|s| sys.omega(s)).collect(),
        alpha: sets.iter().map(|s| sys.alpha(s)).collect(),
        inv: sets.iter().map(|s| sys.inv(s)).collect(),
        inv_plus: sets.iter().map(|s| sys.inv_plus(s)).collect(),
        anbhd: sets.iter().map(|s| sys.is_attracting_nbhd(s)).collect(),
        rnbhd: sets.iter().map(|s| sys.is_repelling_nbhd(s)).collect(),
        sets,
        rng: ChaCha8Rng::seed_from_u64(seed),
        budget: cfg.pair_budget.max(1),
    };
    let mut t = Tally::new(sys);
    invariance(&mut cx, &mut t);
    limits(&mut cx, &mut t);
    duals(&mut cx, &mut t);
    neighbourhoods(&mut cx, &mut t);
    match (att_lattice(sys, DEFAULT_MAX_STATES), rep_lattice(sys, DEFAULT_MAX_STATES)) {
        (Ok(att), Ok(rep)) => {
            lattices(&mut cx, &mut t, &att, &rep);
            restrictions(&mut cx, &mut t, &att, &rep);
            pairs_of_attractors(&mut cx, &mut t, &att);
            if att.len() <= cfg.lift_max_att {
                lifting(&cx, &mut t, &att, &rep);
            }
        }
        (a, r) => {
            let e = a.err().or(r.err()).unwrap();
            t.expect(Tag::P4_3, false, || format!("lattices not built: {e}"));
        }
    }
    let square = commuting_square_check(sys, DEFAULT_MAX_STATES);
    t.expect(Tag::D1, square.is_ok(), || format!("{square:?}"));
    t
}

/// The invariance classes and `Inv` on them.
fn invariance(cx: &mut Ctx, t: &mut Tally) {
    let n = cx.n;
    for (i, u) in cx.sets.iter().enumerate() {
        let f = cx.flags[i];
        let c = cx.idx(&u.complement(n));
        t.expect(Tag::P2_5, f.forward == cx.flags[c].backward && f.backward == cx.flags[c].forward, || {
            format!("complement of {} swaps classes wrongly", cx.names(u))
        });
        t.check(Tag::C2_6, f.forward_backward, || cx.flags[c].forward_backward, || {
            format!("complement of {} not forward-backward invariant", cx.names(u))
        });
        t.check(Tag::L2_10, f.backward, || cx.sys.classify_invariance(&cx.inv_plus[i]).forward_backward, || {
            format!("Inv⁺({}) = {} not forward-backward invariant", cx.names(u), cx.names(&cx.inv_plus[i]))
        });
    }

    let fwd = cx.class(|i| cx.flags[i].forward);
    let bwd = cx.class(|i| cx.flags[i].backward);
    let fb = cx.class(|i| cx.flags[i].forward_backward);
    let invset = cx.class(|i| cx.flags[i].invariant);

    for (a, b) in cx.pairs(fwd.len()) {
        let (s, s2) = (&cx.sets[fwd[a]], &cx.sets[fwd[b]]);
        let (j, m) = (s.union(s2), s.intersection(s2));
        let ok = [&j, &m].iter().all(|x| cx.flags[cx.idx(x)].forward)
            && cx.flags[cx.idx(&j.complement(n))].backward
            && cx.flags[cx.idx(&m.complement(n))].backward;
        t.expect(Tag::P2_5, ok, || format!("Invset⁺ pair {} {} not mapped to Invset⁻", cx.names(s), cx.names(s2)));
    }
    for (a, b) in cx.pairs(fb.len()) {
        let (s, s2) = (&cx.sets[fb[a]], &cx.sets[fb[b]]);
        let ok = [s.union(s2), s.intersection(s2)].iter().all(|x| cx.flags[cx.idx(x)].forward_backward);
        t.expect(Tag::C2_6, ok, || format!("Invset^± not closed at {} {}", cx.names(s), cx.names(s2)));
    }
    for class in [&fwd, &bwd] {
        for (a, b) in cx.pairs(class.len()) {
            let (i, j) = (class[a], class[b]);
            let (s, s2) = (&cx.sets[i], &cx.sets[j]);
            let ok = cx.inv[cx.idx(&s.union(s2))] == cx.inv[i].union(&cx.inv[j])
                && cx.inv[cx.idx(&s.intersection(s2))] == cx.sys.inv(&cx.inv[i].intersection(&cx.inv[j]));
            t.expect(Tag::L2_7, ok, || format!("Inv not a hom at {} {}", cx.names(s), cx.names(s2)));
        }
    }
    let budget = cx.budget;
    for (a, b) in cx.cross(fb.len(), invset.len(), budget) {
        let m = cx.sets[fb[a]].intersection(&cx.sets[invset[b]]);
        t.expect(Tag::L2_9, cx.flags[cx.idx(&m)].invariant, || {
            format!("{} ∩ {} not invariant", cx.names(&cx.sets[fb[a]]), cx.names(&cx.sets[invset[b]]))
        });
    }

    // (Invset, ∪, Inv(∩)) is a bounded distributive lattice
    let top = cx.sys.inv(&cx.full);
    let members: Vec<BitSet> = invset.iter().map(|&i| cx.sets[i].clone()).collect();
    t.expect(Tag::P2_8, members.contains(&BitSet::new()) && members.contains(&top), || "bounds missing".into());
    t.expect(Tag::P2_8, members.iter().all(|s| s.is_subset(&top)), || "Inv(X) is not the top".into());
    let meet = |a: &BitSet, b: &BitSet| cx.sys.inv(&a.intersection(b));
    for (a, b) in cx.pairs(members.len()) {
        let (s, s2) = (&members[a], &members[b]);
        let j = s.union(s2);
        let m = meet(s, s2);
        let glb = members.iter().filter(|x| x.is_subset(s) && x.is_subset(s2)).all(|x| x.is_subset(&m));
        let ok = cx.flags[cx.idx(&j)].invariant && cx.flags[cx.idx(&m)].invariant && m.is_subset(&s.intersection(s2)) && glb;
        t.expect(Tag::P2_8, ok, || format!("sup/inf fail at {} {}", cx.names(s), cx.names(s2)));
    }
    let len = members.len();
    let triples = if len.pow(3) <= cx.budget { len.pow(3) } else { cx.budget };
    for k in 0..triples {
        let (a, b, c) = if len.pow(3) <= cx.budget {
            (k / (len * len), k / len % len, k % len)
        } else {
            (cx.rng.gen_range(0..len), cx.rng.gen_range(0..len), cx.rng.gen_range(0..len))
        };
        let (s, s2, s3) = (&members[a], &members[b], &members[c]);
        let lhs = meet(s, &s2.union(s3));
        let rhs = meet(s, s2).union(&meet(s, s3));
        t.expect(Tag::P2_8, lhs == rhs, || format!("distributivity fails at {} {} {}", cx.names(s), cx.names(s2), cx.names(s3)));
    }
}

/// ω, α and orbital α-limits.
fn limits(cx: &mut Ctx, t: &mut Tally) {
    let sys = cx.sys;
    let surjective = sys.is_surjective();
    for (i, u) in cx.sets.iter().enumerate() {
        let (om, al) = (&cx.omega[i], &cx.alpha[i]);
        let f = cx.flags[i];
        let nm = || cx.names(u);

        t.expect(Tag::P2_11_I, sys.classify_invariance(om).invariant, || format!("ω({}) not invariant", nm()));
        t.check(Tag::P2_11_II, !u.is_empty(), || !om.is_empty(), || format!("ω({}) empty", nm()));
        t.check(Tag::P2_11_III, eventually_inside(sys, u), || *om == cx.inv[i] && om.is_subset(u), || {
            format!("ω({}) = {} but Inv = {}", nm(), cx.names(om), cx.names(&cx.inv[i]))
        });
        // cl = id: (vi) is ω(U) = ω(U); compare the two evaluations instead
        t.expect(Tag::P2_11_VI, *om == sys.omega_by_cycles(u), || format!("ω evaluations disagree on {}", nm()));
        for x in u.iter() {
            for g in sys.backward_orbits(x) {
                t.check(Tag::P2_11_VII, g.states().is_subset(u), || om.contains(x), || {
                    format!("backward orbit of {} in {} but {} ∉ ω", sys.label(x), nm(), sys.label(x))
                });
                let ao = sys.alpha_orbital(&g).unwrap_or_default();
                let ok = !ao.is_empty() && sys.classify_invariance(&ao).invariant && ao.is_subset(al);
                t.expect(Tag::P2_15, ok, || format!("α_o through {} is {}", sys.label(x), cx.names(&ao)));
            }
        }
        t.check(Tag::P2_11_VIII, f.invariant, || om == u, || format!("{} invariant but ω = {}", nm(), cx.names(om)));

        t.expect(Tag::P2_13_I, sys.classify_invariance(al).forward && *al == sys.alpha_by_cycles(u), || {
            format!("α({}) = {} not forward invariant or evaluations disagree", nm(), cx.names(al))
        });
        t.check(Tag::P2_13_II, surjective && !u.is_empty(), || !al.is_empty(), || format!("α({}) empty", nm()));
        t.check(Tag::P2_13_III, f.backward, || al.is_subset(u) && *al == cx.inv_plus[i], || {
            format!("{} backward invariant but α = {}", nm(), cx.names(al))
        });
        for x in 0..cx.n {
            let orbit = sys.forward_orbit(x).states();
            t.check(Tag::P2_13_VI, orbit.is_subset(u), || al.contains(x), || {
                format!("γ⁺ of {} inside {} but not in α", sys.label(x), nm())
            });
        }
        t.expect(Tag::P2_13_VI, cx.inv_plus[i].is_subset(al), || format!("Inv⁺({}) ⊄ α", nm()));
        t.check(Tag::P2_13_VI, al.is_subset(u), || cx.inv_plus[i] == *al, || format!("α({}) ⊆ U but ≠ Inv⁺", nm()));
        t.check(Tag::P2_13_VII, f.backward, || sys.classify_invariance(al).forward_backward, || {
            format!("α({}) = {} not forward-backward invariant", nm(), cx.names(al))
        });
        t.check(Tag::P2_13_VII, f.backward && surjective, || sys.classify_invariance(al).strong && *al == cx.inv[i], || {
            format!("α({}) = {} not strongly invariant or ≠ Inv", nm(), cx.names(al))
        });
        t.check(Tag::P2_13_VIII, f.forward, || u.is_subset(al), || format!("{} ⊄ α = {}", nm(), cx.names(al)));
        t.check(Tag::P2_13_VIII, f.forward_backward, || u == al, || format!("{} ≠ α = {}", nm(), cx.names(al)));
    }

    for (a, b) in cx.pairs(cx.sets.len()) {
        let (u, v) = (&cx.sets[a], &cx.sets[b]);
        let (j, m) = (cx.idx(&u.union(v)), cx.idx(&u.intersection(v)));
        let pr = || format!("{} {}", cx.names(u), cx.names(v));
        t.expect(Tag::P2_11_IV, cx.omega[m].is_subset(&cx.omega[a]) && cx.omega[m].is_subset(&cx.omega[b]), pr);
        let ok = cx.omega[j] == cx.omega[a].union(&cx.omega[b])
            && cx.omega[m].is_subset(&cx.omega[a].intersection(&cx.omega[b]));
        t.expect(Tag::P2_11_V, ok, pr);
        t.expect(Tag::P2_13_IV, cx.alpha[m].is_subset(&cx.alpha[a]) && cx.alpha[m].is_subset(&cx.alpha[b]), pr);
        let ok = cx.alpha[j] == cx.alpha[a].union(&cx.alpha[b])
            && cx.alpha[m].is_subset(&cx.alpha[a].intersection(&cx.alpha[b]));
        t.expect(Tag::P2_13_V, ok, pr);
    }
}

/// `S^⊕`, `S^⊖` against their orbit definitions.
fn duals(cx: &mut Ctx, t: &mut Tally) {
    let sys = cx.sys;
    for (i, s) in cx.sets.iter().enumerate() {
        let plus = sys.dual_plus(s);
        let minus = sys.dual_minus(s);
        let plus_def: BitSet = (0..cx.n).filter(|&x| sys.forward_orbit(x).cycle.iter().all(|y| !s.contains(*y))).collect();
        let minus_def: BitSet = (0..cx.n)
            .filter(|&x| {
                sys.backward_orbits(x).iter().any(|g| sys.alpha_orbital(g).is_ok_and(|a| a.is_disjoint(s)))
            })
            .collect();
        let ok = plus == plus_def
            && minus == minus_def
            && sys.classify_invariance(&plus).forward_backward
            && sys.classify_invariance(&minus).invariant;
        t.expect(Tag::P2_16, ok, || {
            format!("S = {}: S^⊕ = {}, S^⊖ = {}", cx.names(s), cx.names(&plus), cx.names(&minus))
        });
        t.check(Tag::P2_16, cx.flags[i].invariant, || s.is_disjoint(&plus), || format!("{} meets S^⊕", cx.names(s)));
        t.check(Tag::P2_16, cx.flags[i].forward_backward, || s.is_disjoint(&minus), || {
            format!("{} meets S^⊖", cx.names(s))
        });
    }
}

/// Trapping/repelling regions and attracting/repelling neighbourhoods.
fn neighbourhoods(cx: &mut Ctx, t: &mut Tally) {
    let sys = cx.sys;
    let n = cx.n;
    for (i, u) in cx.sets.iter().enumerate() {
        let nm = || cx.names(u);
        let trapping = sys.is_trapping_region(u);
        t.expect(Tag::L3_3, trapping == (cx.flags[i].forward && cx.anbhd[i]), || format!("{} misclassified", nm()));
        t.check(Tag::P3_1, trapping, || cx.inv[i] == cx.omega[i] && sys.is_attractor(&cx.inv[i]), || {
            format!("trapping region {}: Inv = {}, ω = {}", nm(), cx.names(&cx.inv[i]), cx.names(&cx.omega[i]))
        });
        t.check(Tag::C3_6, cx.anbhd[i], || cx.inv[i] == cx.omega[i] && sys.is_attractor(&cx.omega[i]), || {
            format!("attracting nbhd {}: Inv = {}, ω = {}", nm(), cx.names(&cx.inv[i]), cx.names(&cx.omega[i]))
        });
        t.check(Tag::P3_12, sys.is_repelling_region(u), || {
            let r = &cx.inv_plus[i];
            *r == cx.alpha[i] && r.is_subset(u) && sys.classify_invariance(r).forward_backward && sys.is_repeller(r)
        }, || format!("repelling region {}: Inv⁺ = {}", nm(), cx.names(&cx.inv_plus[i])));
        t.check(Tag::C3_26, cx.rnbhd[i], || cx.alpha[i] == cx.inv_plus[i] && sys.is_repeller(&cx.alpha[i]), || {
            format!("repelling nbhd {}: α = {}", nm(), cx.names(&cx.alpha[i]))
        });
        let c = cx.idx(&u.complement(n));
        t.expect(Tag::P4_6, cx.anbhd[i] == cx.rnbhd[c], || format!("{} vs its complement", nm()));
    }

    let all = cx.sets.len();
    for (a, b) in cx.pairs(all) {
        let (u, w) = (&cx.sets[a], &cx.sets[b]);
        t.check(Tag::L3_4, cx.anbhd[a], || {
            let v = cx.omega[a].union(&u.intersection(w));
            let k = cx.idx(&v);
            cx.anbhd[k] && cx.omega[k] == cx.omega[a]
        }, || format!("U = {}, W = {}", cx.names(u), cx.names(w)));
        t.check(Tag::C3_27, cx.rnbhd[a], || {
            let v = cx.alpha[a].union(&u.intersection(w));
            let k = cx.idx(&v);
            cx.rnbhd[k] && cx.alpha[k] == cx.alpha[a]
        }, || format!("U = {}, W = {}", cx.names(u), cx.names(w)));
    }

    let an = cx.class(|i| cx.anbhd[i]);
    let rn = cx.class(|i| cx.rnbhd[i]);
    t.expect(Tag::P4_1, cx.anbhd[0] && cx.anbhd[all - 1], || "∅ or X not attracting".into());
    t.expect(Tag::P4_2, cx.rnbhd[0] && cx.rnbhd[all - 1], || "∅ or X not repelling".into());
    for (a, b) in cx.pairs(an.len()) {
        let (i, j) = (an[a], an[b]);
        let (u, v) = (&cx.sets[i], &cx.sets[j]);
        let (jn, mt) = (cx.idx(&u.union(v)), cx.idx(&u.intersection(v)));
        t.expect(Tag::P4_1, cx.anbhd[jn] && cx.anbhd[mt], || format!("{} {}", cx.names(u), cx.names(v)));
        let ok = cx.omega[jn] == cx.omega[i].union(&cx.omega[j])
            && cx.omega[mt] == sys.inv(&cx.omega[i].intersection(&cx.omega[j]));
        t.expect(Tag::P4_3, ok, || format!("ω not a hom at {} {}", cx.names(u), cx.names(v)));
    }
    for (a, b) in cx.pairs(rn.len()) {
        let (i, j) = (rn[a], rn[b]);
        let (u, v) = (&cx.sets[i], &cx.sets[j]);
        let (jn, mt) = (cx.idx(&u.union(v)), cx.idx(&u.intersection(v)));
        t.expect(Tag::P4_2, cx.rnbhd[jn] && cx.rnbhd[mt], || format!("{} {}", cx.names(u), cx.names(v)));
        let ok = cx.alpha[jn] == cx.alpha[i].union(&cx.alpha[j])
            && cx.alpha[mt] == cx.alpha[i].intersection(&cx.alpha[j]);
        t.expect(Tag::P4_4, ok, || format!("α not a hom at {} {}", cx.names(u), cx.names(v)));
    }
}

/// Att and Rep as lattices, the duality between them, and the
/// neighbourhood characterisations.
fn lattices(cx: &mut Ctx, t: &mut Tally, att: &FiniteDistributiveLattice, rep: &FiniteDistributiveLattice) {
    let sys = cx.sys;
    let last = cx.sets.len() - 1;
    t.expect(Tag::P4_3, cx.omega[0].is_empty() && cx.omega[last] == sys.inv_all() && *att.top_set() == sys.inv_all(), || {
        "ω does not preserve bounds".into()
    });
    t.expect(Tag::P4_4, cx.alpha[0].is_empty() && cx.alpha[last] == cx.full && *rep.top_set() == cx.full, || {
        "α does not preserve bounds".into()
    });
    for a in att.elements() {
        let i = cx.idx(a);
        t.expect(Tag::P4_3, cx.flags[i].invariant && cx.anbhd[i] && cx.omega[i] == *a, || {
            format!("attractor {} not hit by ω or not invariant", cx.names(a))
        });
    }
    for r in rep.elements() {
        let i = cx.idx(r);
        t.expect(Tag::P4_4, cx.flags[i].forward_backward && cx.rnbhd[i] && cx.alpha[i] == *r, || {
            format!("repeller {} not hit by α or not forward-backward invariant", cx.names(r))
        });
    }
    for (a, b) in cx.pairs(att.len()) {
        let (x, y) = (att.element(a), att.element(b));
        t.expect(Tag::P4_3, att.contains(&x.union(y)) && att.contains(&sys.inv(&x.intersection(y))), || {
            format!("Att not closed at {} {}", cx.names(x), cx.names(y))
        });
    }
    for (a, b) in cx.pairs(rep.len()) {
        let (x, y) = (rep.element(a), rep.element(b));
        t.expect(Tag::P4_4, rep.contains(&x.union(y)) && rep.contains(&x.intersection(y)), || {
            format!("Rep not closed at {} {}", cx.names(x), cx.names(y))
        });
    }

    let budget = cx.budget;
    for (a, r) in cx.cross(att.len(), rep.len(), budget) {
        let m = att.element(a).intersection(rep.element(r));
        t.expect(Tag::P3_13, cx.flags[cx.idx(&m)].invariant, || {
            format!("{} ∩ {} not invariant", cx.names(att.element(a)), cx.names(rep.element(r)))
        });
    }

    // * : Att → Rep and back
    let stars: Vec<Option<usize>> =
        att.elements().iter().map(|a| dual_repeller(sys, a).ok().and_then(|s| rep.index_of(&s))).collect();
    let back: Vec<Option<usize>> =
        rep.elements().iter().map(|r| dual_attractor(sys, r).ok().and_then(|s| att.index_of(&s))).collect();
    let total = stars.iter().all(Option::is_some) && back.iter().all(Option::is_some);
    t.expect(Tag::P4_7, total && att.len() == rep.len(), || "* not total between Att and Rep".into());
    if total {
        let to_rep: Vec<usize> = stars.iter().map(|s| s.unwrap()).collect();
        let to_att: Vec<usize> = back.iter().map(|s| s.unwrap()).collect();
        let r1 = check_anti_hom(&to_rep, att, rep);
        t.expect(Tag::P4_7, r1.is_ok(), || format!("Att → Rep: {r1:?}"));
        let r2 = check_anti_hom(&to_att, rep, att);
        t.expect(Tag::P4_7, r2.is_ok(), || format!("Rep → Att: {r2:?}"));
        for (a, &r) in to_rep.iter().enumerate() {
            t.expect(Tag::P4_7, to_att[r] == a, || format!("(A*)* ≠ A for {}", cx.names(att.element(a))));
        }
        for (r, &a) in to_att.iter().enumerate() {
            t.expect(Tag::P4_7, to_rep[a] == r, || format!("(R*)* ≠ R for {}", cx.names(rep.element(r))));
        }

        // U is an attracting nbhd for A iff A ⊆ U and U ∩ A* = ∅; dually
        let budget = cx.budget * 16;
        for (a, u) in cx.cross(att.len(), cx.sets.len(), budget) {
            let (aa, uu) = (att.element(a), &cx.sets[u]);
            let lhs = cx.anbhd[u] && cx.omega[u] == *aa;
            let rhs = aa.is_subset(uu) && uu.is_disjoint(rep.element(to_rep[a]));
            t.expect(Tag::P3_21, lhs == rhs, || format!("A = {}, U = {}", cx.names(aa), cx.names(uu)));
        }
        for (r, u) in cx.cross(rep.len(), cx.sets.len(), budget) {
            let (rr, uu) = (rep.element(r), &cx.sets[u]);
            let lhs = cx.rnbhd[u] && cx.alpha[u] == *rr;
            let rhs = rr.is_subset(uu) && uu.is_disjoint(att.element(to_att[r]));
            t.expect(Tag::P3_25, lhs == rhs, || format!("R = {}, U = {}", cx.names(rr), cx.names(uu)));
        }
    }

    for (l, what) in [(att, "Att"), (rep, "Rep")] {
        let r = BirkhoffRep::of(l).verify(l, DEFAULT_DOWNSET_BOUND);
        t.expect(Tag::T2_2, r.is_ok(), || format!("{what}: {r:?}"));
    }
}

/// Attractors of restrictions to attractors, repellers of restrictions to
/// repellers, and the no-backward-orbit characterisation.
fn restrictions(cx: &mut Ctx, t: &mut Tally, att: &FiniteDistributiveLattice, rep: &FiniteDistributiveLattice) {
    let sys = cx.sys;
    for k in cx.sample(att.len(), ELEMENT_CAP) {
        let a = att.element(k);
        if a.is_empty() {
            continue;
        }
        let ok = sys.restrict(a).and_then(|sub| {
            let inner = att_lattice(&sub, DEFAULT_MAX_STATES)?;
            Ok(inner.elements().iter().all(|x| sys.is_attractor(&sys.lift_from_restriction(a, x))))
        });
        t.expect(Tag::P3_7, ok == Ok(true), || format!("inside attractor {}: {ok:?}", cx.names(a)));
    }
    for k in cx.sample(rep.len(), ELEMENT_CAP) {
        let r = rep.element(k);
        if r.is_empty() {
            continue;
        }
        let ok = sys.restrict(r).and_then(|sub| {
            let inner = rep_lattice(&sub, DEFAULT_MAX_STATES)?;
            Ok(inner.elements().iter().all(|x| sys.is_repeller(&sys.lift_from_restriction(r, x))))
        });
        t.expect(Tag::P3_28, ok == Ok(true), || format!("inside repeller {}: {ok:?}", cx.names(r)));
    }

    // an invariant A is an attractor iff some N ⊇ A carries no backward
    // orbit through N \ A; then A = Inv(N)
    let invset = cx.class(|i| cx.flags[i].invariant);
    for k in cx.sample(invset.len(), ELEMENT_CAP) {
        let a = &cx.sets[invset[k]];
        let rest: Vec<usize> = a.complement(cx.n).to_vec();
        let mut witness = None;
        for mask in 0u64..1 << rest.len() {
            let mut nb = a.clone();
            for (b, &x) in rest.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    nb.insert(x);
                }
            }
            let escapes = nb
                .difference(a)
                .iter()
                .all(|x| sys.backward_orbits(x).iter().all(|g| !g.states().is_subset(&nb)));
            if escapes {
                witness = Some(nb);
                break;
            }
        }
        let is_att = att.contains(a);
        t.expect(Tag::L3_11, witness.is_some() == is_att, || {
            format!("{}: attractor = {is_att}, neighbourhood = {witness:?}", cx.names(a))
        });
        if let Some(nb) = witness {
            t.expect(Tag::L3_11, sys.inv(&nb) == *a, || format!("Inv({}) ≠ {}", cx.names(&nb), cx.names(a)));
        }
    }
}

/// Attractor-repeller pairs: the dual characterisation and the orbit one
/// must agree, on attractors and on arbitrary invariant sets.
fn pairs_of_attractors(cx: &mut Ctx, t: &mut Tally, att: &FiniteDistributiveLattice) {
    let sys = cx.sys;
    for a in att.elements() {
        let star = dual_repeller(sys, a).expect("element of Att");
        let r = check_ar_pair(sys, a, &star);
        t.expect(Tag::T3_19, r.is_ok(), || format!("({}, A*): {r:?}", cx.names(a)));
    }
    let invset = cx.class(|i| cx.flags[i].invariant);
    let picks = cx.sample(invset.len(), ELEMENT_CAP);
    for k in picks {
        let a = cx.sets[invset[k]].clone();
        let mut candidates = vec![sys.dual_plus(&a), cx.inv_plus[cx.idx(&a.complement(cx.n))].clone()];
        for _ in 0..4 {
            let m = cx.rng.gen_range(0..cx.sets.len());
            candidates.push(cx.sets[m].clone());
        }
        for r in candidates {
            let v = check_ar_pair(sys, &a, &r);
            t.expect(Tag::T3_19, !matches!(v, Err(ArViolation::Disagree { .. })), || {
                format!("({}, {}): {v:?}", cx.names(&a), cx.names(&r))
            });
        }
    }
}

/// Every sublattice of Rep lifts through `Inv⁺` and every sublattice of Att
/// through duality; the certificates are re-verified independently.
fn lifting(cx: &Ctx, t: &mut Tally, att: &FiniteDistributiveLattice, rep: &FiniteDistributiveLattice) {
    let sys = cx.sys;
    let ro = RepellerOracle(sys);
    for members in rep.all_sublattices() {
        let res = LiftProblem::from_sublattice(rep, &members, &ro).and_then(|pb| {
            let cert = lift(&pb, &ro, &Recipe(&ro))?;
            // k = s is always a lift here, since repellers are their own
            // repelling neighbourhoods
            let identity_ok = pb.images.iter().all(|s| ro.in_domain(s) && ro.project(s) == *s);
            Ok((cert.verify(&ro), identity_ok))
        });
        t.expect(Tag::T1_2, matches!(res, Ok((Ok(()), true))), || {
            format!("Rep sublattice {:?}: {res:?}", members.iter().map(|&i| cx.names(rep.element(i))).collect::<Vec<_>>())
        });
    }
    let ao = AttractorOracle(sys);
    for members in att.all_sublattices() {
        let res = LiftProblem::from_sublattice(att, &members, &ao).and_then(|pb| {
            let cert = transport_by_duality(&pb.poset, pb.images.clone(), &ro, &Recipe(&ro), &ExactDuality(sys))?;
            Ok(cert.verify(&ao))
        });
        t.expect(Tag::T1_2, matches!(res, Ok(Ok(()))), || {
            format!("Att sublattice {:?}: {res:?}", members.iter().map(|&i| cx.names(att.element(i))).collect::<Vec<_>>())
        });
    }
}
