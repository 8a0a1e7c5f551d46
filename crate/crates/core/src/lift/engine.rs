use super::check::{is_conditional_lift, LiftViolation};
use super::{
    AuditStep, ConditionerContext, ConditionerOracle, LiftCertificate, LiftError, LiftOracle, LiftProblem,
    Obstruction, Phase,
};
use crate::bitset::BitSet;

fn union_of(atoms: &[Option<BitSet>], alpha: &BitSet) -> BitSet {
    let mut out = BitSet::new();
    for p in alpha {
        out.union_with(atoms[p].as_ref().expect("atoms exist below λ"));
    }
    out
}

/// Validates an oracle family: one conditioner per down-set, each in `K` and
/// in the right fiber.
fn validate_family(
    problem: &LiftProblem,
    oracle: &dyn LiftOracle,
    v: &[BitSet],
) -> Result<(), LiftError> {
    if v.len() != problem.down_sets.len() {
        return Err(LiftError::BadConditioner {
            alpha: BitSet::new(),
            detail: format!("{} conditioners for {} down-sets", v.len(), problem.down_sets.len()),
        });
    }
    for (i, va) in v.iter().enumerate() {
        if !oracle.in_domain(va) {
            return Err(LiftError::BadConditioner { alpha: problem.down_sets[i].clone(), detail: "not in K".into() });
        }
        if oracle.project(va) != problem.images[i] {
            return Err(LiftError::BadConditioner {
                alpha: problem.down_sets[i].clone(),
                detail: "wrong fiber".into(),
            });
        }
    }
    Ok(())
}

/// The inductive construction of a lift `k : O(P) → K` with `h ∘ k = s`.
///
/// Elements are added one minimal element at a time (least carrier index
/// first). At each step the conditioner oracle is asked for families until
/// one satisfies `v_μ ∧ v_α ≤ k(λ)`; the new atom is `B_q = v_μ ∧ k(λ)^c`
/// and `k` is extended by unions of atoms. Every step is audited and the
/// finished table is re-verified from scratch.
pub fn lift(
    problem: &LiftProblem,
    oracle: &dyn LiftOracle,
    cond: &dyn ConditionerOracle,
) -> Result<LiftCertificate, LiftError> {
    let poset = &problem.poset;
    let n = poset.len();
    if n == 0 {
        return Err(LiftError::Degenerate("P is empty, so O(P) has 0 = 1".into()));
    }
    let full = BitSet::full(oracle.ambient());
    let nd = problem.down_sets.len();
    let top = problem.top();
    let mut table: Vec<Option<BitSet>> = vec![None; nd];
    table[0] = Some(BitSet::new());
    table[top] = Some(full.clone());
    let mut atoms: Vec<Option<BitSet>> = vec![None; n];
    let mut audit = Vec::new();

    // k(0) = 0, λ = {q₀}, k(λ) from the section
    let q0 = poset.minimal_in(&poset.carrier()).first().expect("nonempty poset has a minimum");
    let mut lambda = BitSet::singleton(q0);
    let l_idx = problem.index_of(&lambda).expect("{q₀} is a down-set");
    let sec = oracle
        .section(&problem.images[l_idx])
        .ok_or_else(|| LiftError::SectionMissing(problem.images[l_idx].clone()))?;
    if !oracle.in_domain(&sec) || oracle.project(&sec) != problem.images[l_idx] {
        return Err(LiftError::SectionInconsistent {
            downset: lambda.clone(),
            detail: "section is not in h⁻¹(s(λ)) ∩ K".into(),
        });
    }
    table[l_idx] = Some(sec.clone());
    atoms[q0] = Some(sec.clone());
    if l_idx == top {
        // P = {q₀}: k(1) must be the section itself
        return finish(problem, oracle, table, atoms, vec![sec.clone(); nd], audit, full);
    }

    let mut v0: Option<Vec<BitSet>> = None;
    let mut last_violation = None;
    let mut attempt = 0;
    loop {
        let ctx = ConditionerContext { problem, table: &table, lambda: &lambda, q: q0, mu: l_idx, phase: Phase::Initial };
        let Some(v) = cond.conditioners(&ctx, attempt) else { break };
        validate_family(problem, oracle, &v)?;
        let wrapped: Vec<Option<BitSet>> = v.iter().cloned().map(Some).collect();
        match is_conditional_lift(problem, oracle, &lambda, &table, &wrapped) {
            Ok(()) => {
                v0 = Some(v);
                break;
            }
            Err(e) => last_violation = Some((e, v)),
        }
        attempt += 1;
    }
    let mut v0 = match v0 {
        Some(v) => v,
        None => {
            let (alpha, witness) = match last_violation {
                Some((LiftViolation::ConditionerBound { alpha, beta, gamma }, v)) => {
                    let (g, b, a) = (
                        problem.index_of(&gamma).unwrap(),
                        problem.index_of(&beta).unwrap(),
                        problem.index_of(&alpha).unwrap(),
                    );
                    let w = table[g].as_ref().unwrap().intersection(&v[a]).difference(table[b].as_ref().unwrap());
                    (alpha, w)
                }
                Some((e, _)) => return Err(LiftError::InvariantBroken { step: 0, detail: e.to_string() }),
                None => (BitSet::new(), BitSet::new()),
            };
            return Err(LiftError::ObstructionFound(Obstruction {
                step: 0,
                q: q0,
                q_label: poset.label(q0).to_string(),
                alpha,
                witness,
            }));
        }
    };
    audit.push(AuditStep {
        step: 0,
        q: q0,
        lambda_before: BitSet::new(),
        mu: lambda.clone(),
        attempt,
        v_mu: v0[l_idx].clone(),
        atom: sec.clone(),
        k_mu: sec.clone(),
        k_mu_decomposes: true,
        conditioned: true,
        atoms_avoid_conditioners: true,
        atoms_disjoint: true,
        in_domain_and_projects: true,
    });

    let mut step = 0;
    while lambda != poset.carrier() {
        step += 1;
        let rest = poset.carrier().difference(&lambda);
        let q = poset.minimal_in(&rest).first().expect("P \\ λ nonempty");
        let mu = poset.down(q).clone();
        let mu_idx = problem.index_of(&mu).unwrap();
        let pred_idx = problem.index_of(&poset.strict_down(q)).unwrap();
        let lam_idx = problem.index_of(&lambda).unwrap();
        let k_lambda = table[lam_idx].clone().unwrap();

        // step conditioners satisfying v_μ ∧ v_α ≤ k(λ) for q ∉ α
        let mut chosen = None;
        let mut last = None;
        let mut attempt = 0;
        loop {
            let ctx = ConditionerContext { problem, table: &table, lambda: &lambda, q, mu: mu_idx, phase: Phase::Step };
            let Some(v1) = cond.conditioners(&ctx, attempt) else { break };
            validate_family(problem, oracle, &v1)?;
            let bad = (0..nd).find_map(|a| {
                if problem.down_sets[a].contains(q) {
                    return None;
                }
                let r = v1[mu_idx].intersection(&v1[a]).difference(&k_lambda);
                (!r.is_empty()).then_some((a, r))
            });
            match bad {
                None => {
                    chosen = Some(v1);
                    break;
                }
                Some(b) => last = Some(b),
            }
            attempt += 1;
        }
        let Some(v1) = chosen else {
            let (a, witness) = last.unwrap_or((0, BitSet::new()));
            return Err(LiftError::ObstructionFound(Obstruction {
                step,
                q,
                q_label: poset.label(q).to_string(),
                alpha: problem.down_sets[a].clone(),
                witness,
            }));
        };

        let v: Vec<BitSet> = v0.iter().zip(&v1).map(|(a, b)| a.intersection(b)).collect();
        let broken = |detail: String| LiftError::InvariantBroken { step, detail };
        for (i, va) in v.iter().enumerate() {
            if !oracle.in_domain(va) || oracle.project(va) != problem.images[i] {
                return Err(broken(format!("v⁰ ∧ v¹ leaves the fiber at {:?}", problem.down_sets[i])));
            }
        }

        let b_q = v[mu_idx].difference(&k_lambda);
        atoms[q] = Some(b_q.clone());
        let new_lambda = lambda.union(&BitSet::singleton(q));

        let mut in_domain_and_projects = true;
        for a in 0..nd {
            let d = &problem.down_sets[a];
            if d.contains(q) && d.is_subset(&new_lambda) {
                let ka = union_of(&atoms, d);
                if !oracle.in_domain(&ka) || oracle.project(&ka) != problem.images[a] {
                    in_domain_and_projects = false;
                }
                if a != top {
                    table[a] = Some(ka);
                }
            }
        }
        let k_mu = union_of(&atoms, &mu);
        let k_mu_decomposes = k_mu == table[pred_idx].as_ref().unwrap().union(&v[mu_idx]);

        let atoms_avoid_conditioners = (0..nd).all(|a| {
            new_lambda
                .iter()
                .filter(|&p| !problem.down_sets[a].contains(p))
                .all(|p| atoms[p].as_ref().unwrap().is_disjoint(&v[a]))
        });
        let members = new_lambda.to_vec();
        let atoms_disjoint = members.iter().enumerate().all(|(i, &p)| {
            members[i + 1..].iter().all(|&p2| atoms[p].as_ref().unwrap().is_disjoint(atoms[p2].as_ref().unwrap()))
        });

        audit.push(AuditStep {
            step,
            q,
            lambda_before: lambda.clone(),
            mu: mu.clone(),
            attempt,
            v_mu: v[mu_idx].clone(),
            atom: b_q,
            k_mu,
            k_mu_decomposes,
            conditioned: true,
            atoms_avoid_conditioners,
            atoms_disjoint,
            in_domain_and_projects,
        });
        if !(k_mu_decomposes && atoms_avoid_conditioners && atoms_disjoint && in_domain_and_projects) {
            return Err(broken(format!(
                "k(μ)=k(←μ)∨v_μ: {k_mu_decomposes}, atoms ∧ v = 0: {atoms_avoid_conditioners}, atoms disjoint: {atoms_disjoint}, k(α) ∈ h⁻¹(s(α)): {in_domain_and_projects}"
            )));
        }
        v0 = v;
        lambda = new_lambda;
    }

    finish(problem, oracle, table, atoms, v0, audit, full)
}

fn finish(
    problem: &LiftProblem,
    oracle: &dyn LiftOracle,
    mut table: Vec<Option<BitSet>>,
    atoms: Vec<Option<BitSet>>,
    conditioners: Vec<BitSet>,
    audit: Vec<AuditStep>,
    full: BitSet,
) -> Result<LiftCertificate, LiftError> {
    let top = problem.top();
    let union = union_of(&atoms, &problem.poset.carrier());
    let top_preserved = union == full;
    if !top_preserved {
        if oracle.top_unique() {
            return Err(LiftError::TopNotUnique(union));
        }
        // all laws except possibly k(1) = 1
        table[top] = Some(union);
    }
    let cert = LiftCertificate {
        poset: problem.poset.clone(),
        down_sets: problem.down_sets.clone(),
        images: problem.images.clone(),
        table: table.into_iter().map(|k| k.expect("every down-set assigned")).collect(),
        atoms: atoms.into_iter().map(|a| a.expect("every element assigned")).collect(),
        conditioners,
        audit,
        top_preserved,
    };
    cert.verify(oracle).map_err(|e| LiftError::InvariantBroken { step: usize::MAX, detail: e.to_string() })?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteDistributiveLattice;
    use crate::lift::{IdentityOracle, Recipe};
    use crate::order::Poset;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn identity_lift_is_s() {
        let p = Poset::from_covers(vec!["1".into(), "2".into(), "3".into()], &[(0, 1), (0, 2)]).unwrap();
        let l = FiniteDistributiveLattice::of_down_sets(&p, 20).unwrap();
        let o = IdentityOracle(&l);
        let pb = LiftProblem::new(p, l.elements().to_vec(), &o).unwrap();
        let cert = lift(&pb, &o, &Recipe(&o)).unwrap();
        assert_eq!(cert.table, pb.images);
        assert!(cert.top_preserved);
        assert_eq!(cert.audit.len(), 3);
        assert!(cert.audit.iter().all(|a| a.conditioned && a.atoms_avoid_conditioners && a.atoms_disjoint && a.k_mu_decomposes));
    }

    #[test]
    fn empty_poset_is_degenerate() {
        let p = Poset::antichain(0);
        let l = FiniteDistributiveLattice::of_down_sets(&p, 20).unwrap();
        let o = IdentityOracle(&l);
        let pb = LiftProblem::new(p, l.elements().to_vec(), &o).unwrap();
        assert!(matches!(lift(&pb, &o, &Recipe(&o)), Err(LiftError::Degenerate(_))));
    }

    #[test]
    fn non_embedding_rejected() {
        let p = Poset::chain(2);
        let l = FiniteDistributiveLattice::of_down_sets(&Poset::chain(1), 20).unwrap();
        let o = IdentityOracle(&l);
        // collapses two down-sets
        let imgs = vec![BitSet::new(), BitSet::singleton(0), BitSet::singleton(0)];
        assert!(matches!(LiftProblem::new(p, imgs, &o), Err(LiftError::NotAnEmbedding(_))));
    }

    proptest! {
        // h = id on a random set lattice; s = any sublattice embedding
        #[test]
        fn identity_lifts_every_sublattice(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = Poset::random(4, 0.4, &mut rng);
            let l = FiniteDistributiveLattice::of_down_sets(&p, 20).unwrap();
            let o = IdentityOracle(&l);
            for members in l.all_sublattices().into_iter().take(40) {
                let pb = LiftProblem::from_sublattice(&l, &members, &o).unwrap();
                if pb.poset.is_empty() { continue; }
                let cert = lift(&pb, &o, &Recipe(&o)).unwrap();
                prop_assert_eq!(&cert.table, &pb.images);
            }
        }
    }
}
