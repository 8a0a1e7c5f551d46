use super::{LiftCertificate, LiftOracle, LiftProblem};
use crate::bitset::BitSet;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftViolation {
    #[error("λ = {0:?} is not a down-set")]
    LambdaNotDownSet(BitSet),
    #[error("k({0:?}) missing")]
    Missing(BitSet),
    #[error("k({0:?}) is not in K")]
    NotInDomain(BitSet),
    #[error("h(k({downset:?})) = {got:?}, expected {want:?}")]
    Projection { downset: BitSet, got: BitSet, want: BitSet },
    #[error("k(0) != 0")]
    Bottom,
    #[error("k(1) != 1")]
    Top,
    #[error("k does not preserve ∨ at {0:?}, {1:?}")]
    Join(BitSet, BitSet),
    #[error("k does not preserve ∧ at {0:?}, {1:?}")]
    Meet(BitSet, BitSet),
    #[error("k is not injective: {0:?}, {1:?}")]
    NotInjective(BitSet, BitSet),
    #[error("conditioner for {0:?} missing")]
    ConditionerMissing(BitSet),
    #[error("conditioner for {0:?} is not in h⁻¹(s(α)) ∩ K")]
    ConditionerFiber(BitSet),
    #[error("k(γ) ∧ v_α ≰ k(β) for α = {alpha:?}, β = {beta:?}, γ = {gamma:?}")]
    ConditionerBound { alpha: BitSet, beta: BitSet, gamma: BitSet },
    #[error("B(k)({{{p}}}) ∧ v_α != 0 for α = {alpha:?}")]
    AtomForm { p: usize, alpha: BitSet },
    #[error("the two conditional-lift characterizations disagree: {0}")]
    CharacterizationMismatch(String),
}

/// Indices of `O(λ^⊤) = {α ⊆ λ} ∪ {P}`.
fn domain(problem: &LiftProblem, lambda: &BitSet) -> Vec<usize> {
    let top = problem.top();
    (0..problem.down_sets.len())
        .filter(|&i| i == top || problem.down_sets[i].is_subset(lambda))
        .collect()
}

/// A partial lift of `s` on `O(λ^⊤)`: a lattice hom into `K` with
/// `h ∘ k = s` below `λ` and `k(1) = 1`.
pub fn is_partial_lift(
    problem: &LiftProblem,
    oracle: &dyn LiftOracle,
    lambda: &BitSet,
    table: &[Option<BitSet>],
) -> Result<(), LiftViolation> {
    if !problem.poset.is_down_set(lambda) {
        return Err(LiftViolation::LambdaNotDownSet(lambda.clone()));
    }
    let dom = domain(problem, lambda);
    let top = problem.top();
    let ds = &problem.down_sets;
    let get = |i: usize| table.get(i).and_then(|x| x.as_ref()).ok_or_else(|| LiftViolation::Missing(ds[i].clone()));
    for &i in &dom {
        let k = get(i)?;
        if !oracle.in_domain(k) {
            return Err(LiftViolation::NotInDomain(ds[i].clone()));
        }
        if i != top {
            let got = oracle.project(k);
            if got != problem.images[i] {
                return Err(LiftViolation::Projection { downset: ds[i].clone(), got, want: problem.images[i].clone() });
            }
        }
    }
    if !get(0)?.is_empty() {
        return Err(LiftViolation::Bottom);
    }
    if *get(top)? != BitSet::full(oracle.ambient()) {
        return Err(LiftViolation::Top);
    }
    for (x, &a) in dom.iter().enumerate() {
        for &b in &dom[x + 1..] {
            let (ka, kb) = (get(a)?, get(b)?);
            let j = problem.index_of(&ds[a].union(&ds[b])).expect("O(P) is ∪-closed");
            if *get(j)? != ka.union(kb) {
                return Err(LiftViolation::Join(ds[a].clone(), ds[b].clone()));
            }
            let m = problem.index_of(&ds[a].intersection(&ds[b])).expect("O(P) is ∩-closed");
            if *get(m)? != ka.intersection(kb) {
                return Err(LiftViolation::Meet(ds[a].clone(), ds[b].clone()));
            }
        }
    }
    Ok(())
}

/// Checks conditioners `v` for a partial lift, both through
/// `k(γ) ∧ v_α ≤ k(β)` (all `β, γ ⊆ λ` with `γ ∩ α ⊆ β`) and through the atom
/// form `B(k)({p}) ∧ v_α = 0` (`p ∈ λ \ α`); the two must agree.
pub fn is_conditional_lift(
    problem: &LiftProblem,
    oracle: &dyn LiftOracle,
    lambda: &BitSet,
    table: &[Option<BitSet>],
    v: &[Option<BitSet>],
) -> Result<(), LiftViolation> {
    let ds = &problem.down_sets;
    for (i, d) in ds.iter().enumerate() {
        match v.get(i).and_then(|x| x.as_ref()) {
            None => return Err(LiftViolation::ConditionerMissing(d.clone())),
            Some(va) => {
                if !oracle.in_domain(va) || oracle.project(va) != problem.images[i] {
                    return Err(LiftViolation::ConditionerFiber(d.clone()));
                }
            }
        }
    }
    let v = |i: usize| v[i].as_ref().expect("checked above");
    let k = |i: usize| table[i].as_ref();
    let below: Vec<usize> = (0..ds.len()).filter(|&i| ds[i].is_subset(lambda)).collect();
    for &i in &below {
        if k(i).is_none() {
            return Err(LiftViolation::Missing(ds[i].clone()));
        }
    }

    let mut bound_check = Ok(());
    'outer: for a in 0..ds.len() {
        for &g in &below {
            let ga = ds[g].intersection(&ds[a]);
            let kgv = k(g).unwrap().intersection(v(a));
            for &b in &below {
                if ga.is_subset(&ds[b]) && !kgv.is_subset(k(b).unwrap()) {
                    bound_check = Err(LiftViolation::ConditionerBound { alpha: ds[a].clone(), beta: ds[b].clone(), gamma: ds[g].clone() });
                    break 'outer;
                }
            }
        }
    }

    let mut atom = Ok(());
    'atoms: for p in lambda.iter() {
        let full = problem.index_of(problem.poset.down(p)).unwrap();
        let pred = problem.index_of(&problem.poset.strict_down(p)).unwrap();
        let bp = k(full).unwrap().difference(k(pred).unwrap());
        for a in 0..ds.len() {
            if !ds[a].contains(p) && !bp.is_disjoint(v(a)) {
                atom = Err(LiftViolation::AtomForm { p, alpha: ds[a].clone() });
                break 'atoms;
            }
        }
    }

    match (&bound_check, &atom) {
        (Ok(()), Err(e)) | (Err(e), Ok(())) => Err(LiftViolation::CharacterizationMismatch(e.to_string())),
        _ => bound_check,
    }
}

pub(super) fn verify_certificate(c: &LiftCertificate, oracle: &dyn LiftOracle) -> Result<(), LiftViolation> {
    let ds = &c.down_sets;
    let n = ds.len();
    if c.table.len() != n {
        return Err(LiftViolation::Missing(BitSet::new()));
    }
    let index: HashMap<&BitSet, usize> = ds.iter().enumerate().map(|(i, d)| (d, i)).collect();
    for i in 0..n {
        if !oracle.in_domain(&c.table[i]) {
            return Err(LiftViolation::NotInDomain(ds[i].clone()));
        }
        let got = oracle.project(&c.table[i]);
        if got != c.images[i] {
            return Err(LiftViolation::Projection { downset: ds[i].clone(), got, want: c.images[i].clone() });
        }
    }
    if !c.table[0].is_empty() {
        return Err(LiftViolation::Bottom);
    }
    if c.top_preserved && c.table[n - 1] != BitSet::full(oracle.ambient()) {
        return Err(LiftViolation::Top);
    }
    for a in 0..n {
        for b in a + 1..n {
            if c.table[a] == c.table[b] {
                return Err(LiftViolation::NotInjective(ds[a].clone(), ds[b].clone()));
            }
            if c.table[index[&ds[a].union(&ds[b])]] != c.table[a].union(&c.table[b]) {
                return Err(LiftViolation::Join(ds[a].clone(), ds[b].clone()));
            }
            if c.table[index[&ds[a].intersection(&ds[b])]] != c.table[a].intersection(&c.table[b]) {
                return Err(LiftViolation::Meet(ds[a].clone(), ds[b].clone()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteDistributiveLattice;
    use crate::lift::IdentityOracle;
    use crate::order::Poset;

    fn p3() -> Poset {
        Poset::from_covers(vec!["1".into(), "2".into(), "3".into()], &[(0, 1), (0, 2)]).unwrap()
    }

    fn setup() -> (FiniteDistributiveLattice, LiftProblem) {
        let p = p3();
        let l = FiniteDistributiveLattice::of_down_sets(&p, 20).unwrap();
        let pb = LiftProblem::new(p, l.elements().to_vec(), &IdentityOracle(&l)).unwrap();
        (l, pb)
    }

    #[test]
    fn identity_partial_lifts() {
        let (l, pb) = setup();
        let o = IdentityOracle(&l);
        for lambda in &pb.down_sets {
            let table: Vec<Option<BitSet>> = pb
                .down_sets
                .iter()
                .enumerate()
                .map(|(i, d)| (d.is_subset(lambda) || i == pb.top()).then(|| pb.images[i].clone()))
                .collect();
            assert_eq!(is_partial_lift(&pb, &o, lambda, &table), Ok(()));
        }
    }

    #[test]
    fn missing_top_is_a_violation() {
        let (l, pb) = setup();
        let o = IdentityOracle(&l);
        let lambda: BitSet = [0].into_iter().collect();
        let mut table: Vec<Option<BitSet>> = vec![None; pb.down_sets.len()];
        table[0] = Some(BitSet::new());
        table[1] = Some(pb.images[1].clone());
        let top = pb.top();
        assert_eq!(is_partial_lift(&pb, &o, &lambda, &table), Err(LiftViolation::Missing(pb.down_sets[top].clone())));
        table[top] = Some(pb.images[1].clone());
        assert!(is_partial_lift(&pb, &o, &lambda, &table).is_err());
    }

    #[test]
    fn conditioner_remarks() {
        let (l, pb) = setup();
        let o = IdentityOracle(&l);
        let lambda: BitSet = [0].into_iter().collect();
        let table: Vec<Option<BitSet>> = pb
            .down_sets
            .iter()
            .enumerate()
            .map(|(i, d)| (d.is_subset(&lambda) || i == pb.top()).then(|| pb.images[i].clone()))
            .collect();
        // with h = id the fiber of s(α) is {s(α)}, so v_α = k(α) = s(α) everywhere
        let v: Vec<Option<BitSet>> = pb.images.iter().cloned().map(Some).collect();
        assert_eq!(is_conditional_lift(&pb, &o, &lambda, &table, &v), Ok(()));
        let mut short = v.clone();
        short[2] = None;
        assert!(matches!(
            is_conditional_lift(&pb, &o, &lambda, &table, &short),
            Err(LiftViolation::ConditionerMissing(_))
        ));
    }
}
