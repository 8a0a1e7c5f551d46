//! Small named systems used across tests, the CLI and the docs.

use super::FiniteDynSys;

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// `m ↦ z ↦ z`, `a ↦ b ↦ b`: a finite mimic of the map with
/// `f⁻¹(3/5) = {2/5, 3/5}` (`a ≙ 2/5`, `b ≙ 3/5`).
pub fn ds1() -> FiniteDynSys {
    FiniteDynSys::new(labels(&["m", "z", "a", "b"]), vec![1, 1, 3, 3]).unwrap()
}

/// The 3-cycle `0 → 1 → 2 → 0`.
pub fn ds2() -> FiniteDynSys {
    FiniteDynSys::new(labels(&["0", "1", "2"]), vec![1, 2, 0]).unwrap()
}

/// `p ↦ p`, `q ↦ p`, `r ↦ r`.
pub fn ds3() -> FiniteDynSys {
    FiniteDynSys::new(labels(&["p", "q", "r"]), vec![0, 0, 2]).unwrap()
}
