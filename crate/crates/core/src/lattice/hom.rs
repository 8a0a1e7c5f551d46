use super::FiniteDistributiveLattice;
use crate::bitset::BitSet;
use crate::order::Poset;
use rand::Rng;
use serde::Serialize;
use std::fmt;

/// First violated law of a (anti-)homomorphism check, with the element
/// indices that witness it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomViolation {
    pub law: String,
    pub witnesses: Vec<usize>,
}

impl fmt::Display for HomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.law, self.witnesses)
    }
}

fn fail(law: &str, witnesses: Vec<usize>) -> Result<(), HomViolation> {
    Err(HomViolation { law: law.to_string(), witnesses })
}

/// A dense hom table between two lattices, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeHom {
    pub table: Vec<usize>,
}

impl LatticeHom {
    pub fn new(
        table: Vec<usize>,
        source: &FiniteDistributiveLattice,
        target: &FiniteDistributiveLattice,
    ) -> Result<Self, HomViolation> {
        check_hom(&table, source, target)?;
        Ok(LatticeHom { table })
    }

    pub fn apply(&self, a: usize) -> usize {
        self.table[a]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.table.iter().all(|x| seen.insert(*x))
    }
}

fn check_total(table: &[usize], s: &FiniteDistributiveLattice, t: &FiniteDistributiveLattice) -> Result<(), HomViolation> {
    if table.len() != s.len() {
        return fail("table not total", vec![table.len(), s.len()]);
    }
    if let Some(bad) = table.iter().position(|&x| x >= t.len()) {
        return fail("value outside target", vec![bad]);
    }
    Ok(())
}

/// `h(0)=0, h(1)=1, h(a∨b)=h(a)∨h(b), h(a∧b)=h(a)∧h(b)`.
pub fn check_hom(
    table: &[usize],
    source: &FiniteDistributiveLattice,
    target: &FiniteDistributiveLattice,
) -> Result<(), HomViolation> {
    check_total(table, source, target)?;
    if table[source.bottom()] != target.bottom() {
        return fail("h(0) != 0", vec![source.bottom()]);
    }
    if table[source.top()] != target.top() {
        return fail("h(1) != 1", vec![source.top()]);
    }
    for a in 0..source.len() {
        for b in a + 1..source.len() {
            if table[source.join(a, b)] != target.join(table[a], table[b]) {
                return fail("h(a ∨ b) != h(a) ∨ h(b)", vec![a, b]);
            }
            if table[source.meet(a, b)] != target.meet(table[a], table[b]) {
                return fail("h(a ∧ b) != h(a) ∧ h(b)", vec![a, b]);
            }
        }
    }
    Ok(())
}

/// Bounded anti-homomorphism: `∨` and `∧` swap, as do `0` and `1`.
pub fn check_anti_hom(
    table: &[usize],
    source: &FiniteDistributiveLattice,
    target: &FiniteDistributiveLattice,
) -> Result<(), HomViolation> {
    check_total(table, source, target)?;
    if table[source.bottom()] != target.top() {
        return fail("h(0) != 1", vec![source.bottom()]);
    }
    if table[source.top()] != target.bottom() {
        return fail("h(1) != 0", vec![source.top()]);
    }
    for a in 0..source.len() {
        for b in a + 1..source.len() {
            if table[source.join(a, b)] != target.meet(table[a], table[b]) {
                return fail("h(a ∨ b) != h(a) ∧ h(b)", vec![a, b]);
            }
            if table[source.meet(a, b)] != target.join(table[a], table[b]) {
                return fail("h(a ∧ b) != h(a) ∨ h(b)", vec![a, b]);
            }
        }
    }
    Ok(())
}

/// The hom `O(P) → O(Q)`, `α ↦ g⁻¹(α)`, induced by an order-preserving
/// `g : Q → P`. Every bounded hom between down-set lattices arises this way.
pub fn hom_from_order_map(
    g: &[usize],
    source: &FiniteDistributiveLattice,
    target: &FiniteDistributiveLattice,
) -> Vec<usize> {
    source
        .elements()
        .iter()
        .map(|alpha| {
            let pre: BitSet = (0..g.len()).filter(|&q| alpha.contains(g[q])).collect();
            target.index_of(&pre).expect("preimage of a down-set under a monotone map is a down-set")
        })
        .collect()
}

/// A random order-preserving map `Q → P` (`P` nonempty unless `Q` is empty).
pub fn random_order_preserving<R: Rng>(q: &Poset, p: &Poset, rng: &mut R) -> Vec<usize> {
    if q.is_empty() {
        return Vec::new();
    }
    assert!(!p.is_empty(), "no map from a nonempty poset into the empty one");
    let ext = q.linear_extension();
    'attempt: for _ in 0..64 {
        let mut g = vec![usize::MAX; q.len()];
        for &x in &ext {
            let mut allowed = p.carrier();
            for y in q.strict_down(x).iter() {
                allowed.intersect_with(p.up(g[y]));
            }
            let choices = allowed.to_vec();
            if choices.is_empty() {
                continue 'attempt;
            }
            g[x] = choices[rng.gen_range(0..choices.len())];
        }
        return g;
    }
    vec![rng.gen_range(0..p.len()); q.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::DEFAULT_DOWNSET_BOUND as B;

    fn p3() -> Poset {
        Poset::from_covers(vec!["1".into(), "2".into(), "3".into()], &[(0, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn complement_is_anti_hom() {
        let p = p3();
        let l = FiniteDistributiveLattice::of_down_sets(&p, B).unwrap();
        let ld = FiniteDistributiveLattice::of_down_sets(&p.dual(), B).unwrap();
        let table: Vec<usize> = l
            .elements()
            .iter()
            .map(|a| ld.index_of(&p.complement_map(a).unwrap()).unwrap())
            .collect();
        assert_eq!(check_anti_hom(&table, &l, &ld), Ok(()));
        assert!(check_hom(&table, &l, &ld).is_err());
    }

    #[test]
    fn identity_and_zero() {
        let l = FiniteDistributiveLattice::of_down_sets(&p3(), B).unwrap();
        let id: Vec<usize> = (0..l.len()).collect();
        assert_eq!(check_hom(&id, &l, &l), Ok(()));
        let zero = vec![0; l.len()];
        assert_eq!(check_hom(&zero, &l, &l).unwrap_err().law, "h(1) != 1");
    }

    #[test]
    fn induced_homs_are_homs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = Poset::random(rng.gen_range(1..6), 0.4, &mut rng);
            let q = Poset::random(rng.gen_range(0..6), 0.4, &mut rng);
            let g = random_order_preserving(&q, &p, &mut rng);
            assert!(crate::order::is_order_preserving(&g, &q, &p).unwrap());
            let (lp, lq) =
                (FiniteDistributiveLattice::of_down_sets(&p, B).unwrap(), FiniteDistributiveLattice::of_down_sets(&q, B).unwrap());
            let f = hom_from_order_map(&g, &lp, &lq);
            assert_eq!(check_hom(&f, &lp, &lq), Ok(()));
        }
    }
}
