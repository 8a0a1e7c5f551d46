use super::{ExactError, FiniteDynSys};
use crate::bitset::BitSet;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// An eventually periodic half-orbit: `prefix` (starting at the base point)
/// followed by `cycle` repeated forever. Backward orbits list states in the
/// order they are visited going back in time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub direction: Direction,
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl Orbit {
    pub fn base(&self) -> usize {
        *self.prefix.first().or(self.cycle.first()).expect("orbit is nonempty")
    }

    /// Consecutive states must be related by `next` (forward) or lie in
    /// each other's preimage (backward), including the wrap of the cycle.
    pub fn validate(&self, sys: &FiniteDynSys) -> Result<(), ExactError> {
        if self.cycle.is_empty() {
            return Err(ExactError::InvalidOrbit("empty cycle".into()));
        }
        let seq: Vec<usize> = self.prefix.iter().chain(&self.cycle).copied().chain([self.cycle[0]]).collect();
        if let Some(&x) = seq.iter().find(|&&x| x >= sys.len()) {
            return Err(ExactError::InvalidOrbit(format!("state {x} out of range")));
        }
        for w in seq.windows(2) {
            let ok = match self.direction {
                Direction::Forward => sys.step(w[0]) == w[1],
                Direction::Backward => sys.step(w[1]) == w[0],
            };
            if !ok {
                return Err(ExactError::InvalidOrbit(format!(
                    "{} and {} are not consecutive",
                    sys.label(w[0]),
                    sys.label(w[1])
                )));
            }
        }
        Ok(())
    }

    pub fn states(&self) -> BitSet {
        self.prefix.iter().chain(&self.cycle).copied().collect()
    }
}

impl FiniteDynSys {
    /// `γ⁺_x`.
    pub fn forward_orbit(&self, x: usize) -> Orbit {
        let mut seen = Vec::new();
        let mut y = x;
        while !seen.contains(&y) {
            seen.push(y);
            y = self.step(y);
        }
        let start = seen.iter().position(|&z| z == y).unwrap();
        let cycle = seen.split_off(start);
        Orbit { direction: Direction::Forward, prefix: seen, cycle }
    }

    /// All backward orbits through `x`. Only periodic points have one, and
    /// it is unique: it runs backwards around the cycle.
    pub fn backward_orbits(&self, x: usize) -> Vec<Orbit> {
        if !self.limit_cycle(x).contains(x) {
            return Vec::new();
        }
        let mut cycle = vec![x];
        let mut y = x;
        loop {
            y = *self.preimages(y).iter().find(|&&p| self.limit_cycle(p).contains(p)).expect("cycle predecessor");
            if y == x {
                break;
            }
            cycle.push(y);
        }
        vec![Orbit { direction: Direction::Backward, prefix: Vec::new(), cycle }]
    }

    /// `α_o(γ⁻)`: the states visited at arbitrarily negative times.
    pub fn alpha_orbital(&self, gamma: &Orbit) -> Result<BitSet, ExactError> {
        if gamma.direction != Direction::Backward {
            return Err(ExactError::InvalidOrbit("not a backward orbit".into()));
        }
        gamma.validate(self)?;
        Ok(gamma.cycle.iter().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{ds1, ds2};
    use super::*;

    #[test]
    fn constant_orbit() {
        let d = ds1();
        let z = d.index_of("z").unwrap();
        let orbits = d.backward_orbits(z);
        assert_eq!(orbits.len(), 1);
        assert_eq!(d.alpha_orbital(&orbits[0]).unwrap(), BitSet::singleton(z));
        // m is transient: no backward orbit at all
        assert!(d.backward_orbits(d.index_of("m").unwrap()).is_empty());
    }

    #[test]
    fn three_cycle() {
        let c = ds2();
        let g = &c.backward_orbits(0)[0];
        assert_eq!(g.cycle, vec![0, 2, 1]);
        assert_eq!(c.alpha_orbital(g).unwrap(), c.full());
    }

    #[test]
    fn invalid_orbits() {
        let d = ds1();
        let bad = Orbit { direction: Direction::Backward, prefix: vec![], cycle: vec![0] };
        assert!(matches!(d.alpha_orbital(&bad), Err(ExactError::InvalidOrbit(_))));
        let fwd = d.forward_orbit(0);
        assert_eq!(fwd.prefix, vec![0]);
        assert!(fwd.validate(&d).is_ok());
        assert!(d.alpha_orbital(&fwd).is_err());
    }

    #[test]
    fn orbital_alpha_inside_alpha() {
        for i in 0..256 {
            let d = FiniteDynSys::nth_map(4, i);
            for x in 0..4 {
                for g in d.backward_orbits(x) {
                    let a = d.alpha_orbital(&g).unwrap();
                    assert!(!a.is_empty());
                    assert!(d.classify_invariance(&a).invariant);
                    assert!(a.is_subset(&d.alpha(&BitSet::singleton(x))));
                }
            }
        }
    }
}
