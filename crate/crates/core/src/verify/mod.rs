//! Corpus sweeps: every tagged property of the finite theory, checked with
//! exact set equality on every system of a corpus.
//!
//! A check has a premise and a verdict. Checks whose premise fails are
//! counted as vacuous, so a report also shows which statements were
//! actually exercised (e.g. surjectivity-guarded ones).

mod checks;

use crate::exact::FiniteDynSys;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use checks::check_system;

/// Counterexamples kept per tag.
pub const MAX_DUMPS: usize = 5;

macro_rules! tags {
    ($($v:ident => $s:literal),* $(,)?) => {
        #[allow(non_camel_case_types)]
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Tag { $($v),* }
        impl Tag {
            pub const ALL: &'static [Tag] = &[$(Tag::$v),*];
            pub fn name(self) -> &'static str {
                match self { $(Tag::$v => $s),* }
            }
        }
    };
}

tags! {
    P2_5 => "P2.5", C2_6 => "C2.6", L2_7 => "L2.7", P2_8 => "P2.8", L2_9 => "L2.9", L2_10 => "L2.10",
    P2_11_I => "P2.11.i", P2_11_II => "P2.11.ii", P2_11_III => "P2.11.iii", P2_11_IV => "P2.11.iv",
    P2_11_V => "P2.11.v", P2_11_VI => "P2.11.vi", P2_11_VII => "P2.11.vii", P2_11_VIII => "P2.11.viii",
    P2_13_I => "P2.13.i", P2_13_II => "P2.13.ii", P2_13_III => "P2.13.iii", P2_13_IV => "P2.13.iv",
    P2_13_V => "P2.13.v", P2_13_VI => "P2.13.vi", P2_13_VII => "P2.13.vii", P2_13_VIII => "P2.13.viii",
    P2_15 => "P2.15", P2_16 => "P2.16",
    P3_1 => "P3.1", L3_3 => "L3.3", L3_4 => "L3.4", C3_6 => "C3.6", P3_7 => "P3.7", L3_11 => "L3.11",
    P3_12 => "P3.12", P3_13 => "P3.13", T3_19 => "T3.19", P3_21 => "P3.21", P3_25 => "P3.25",
    C3_26 => "C3.26", C3_27 => "C3.27", P3_28 => "P3.28",
    P4_1 => "P4.1", P4_2 => "P4.2", P4_3 => "P4.3", P4_4 => "P4.4", P4_6 => "P4.6", P4_7 => "P4.7",
    D1 => "D1", T2_2 => "T2.2", T1_2 => "T1.2",
}

impl Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// `next` of the offending system, by state index.
    pub system: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TagStats {
    /// Instances whose premise held.
    pub checks: u64,
    pub vacuous: u64,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl TagStats {
    fn absorb(&mut self, other: TagStats) {
        self.checks += other.checks;
        self.vacuous += other.vacuous;
        self.failures += other.failures;
        let room = MAX_DUMPS.saturating_sub(self.counterexamples.len());
        self.counterexamples.extend(other.counterexamples.into_iter().take(room));
    }
}

/// Per-system accumulator, indexed like `Tag::ALL`.
#[derive(Debug, Clone)]
pub struct Tally {
    system: Vec<usize>,
    stats: Vec<TagStats>,
}

impl Tally {
    fn new(sys: &FiniteDynSys) -> Self {
        Tally { system: sys.next().to_vec(), stats: vec![TagStats::default(); Tag::ALL.len()] }
    }

    /// Records one instance; `ok` is only evaluated when `premise` holds.
    pub fn check(&mut self, tag: Tag, premise: bool, ok: impl FnOnce() -> bool, detail: impl FnOnce() -> String) {
        let st = &mut self.stats[tag as usize];
        if !premise {
            st.vacuous += 1;
            return;
        }
        st.checks += 1;
        if !ok() {
            st.failures += 1;
            if st.counterexamples.len() < MAX_DUMPS {
                st.counterexamples.push(Counterexample { system: self.system.clone(), detail: detail() });
            }
        }
    }

    pub fn expect(&mut self, tag: Tag, ok: bool, detail: impl FnOnce() -> String) {
        self.check(tag, true, || ok, detail)
    }

    pub fn stats(&self, tag: Tag) -> &TagStats {
        &self.stats[tag as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    /// All `n^n` maps on exactly this many states.
    pub exhaustive: Option<usize>,
    /// Number of random systems.
    pub random: usize,
    /// Random systems have `1..=max_states` states.
    pub max_states: usize,
    pub seed: u64,
    /// Restrict the corpus to surjective maps (permutations).
    pub surjective_only: bool,
    /// Above this many elements in a pair class, pairs are sampled.
    pub pair_budget: usize,
    /// `T1.2` runs on systems with at most this many attractors.
    pub lift_max_att: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            exhaustive: Some(4),
            random: 500,
            max_states: 10,
            seed: 1,
            surjective_only: false,
            pair_budget: 4096,
            lift_max_att: 8,
        }
    }
}

/// The systems of a corpus, in a fixed order.
pub fn corpus(cfg: &VerifyConfig) -> Vec<FiniteDynSys> {
    let mut out = Vec::new();
    if let Some(n) = cfg.exhaustive.filter(|&n| n > 0) {
        let count = n.pow(n as u32);
        out.extend((0..count).map(|i| FiniteDynSys::nth_map(n, i)).filter(|s| !cfg.surjective_only || s.is_surjective()));
    }
    if cfg.max_states > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.random {
            let n = rng.gen_range(1..=cfg.max_states);
            out.push(if cfg.surjective_only {
                FiniteDynSys::random_surjective(n, &mut rng)
            } else {
                FiniteDynSys::random(n, &mut rng)
            });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TagReport {
    pub tag: Tag,
    pub passed: bool,
    #[serde(flatten)]
    pub stats: TagStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub systems: usize,
    pub surjective_systems: usize,
    pub all_passed: bool,
    pub tags: Vec<TagReport>,
}

impl VerifyReport {
    pub fn tag(&self, tag: Tag) -> &TagReport {
        &self.tags[tag as usize]
    }
}

/// Checks every system (in parallel) and merges the tallies in corpus order,
/// so the report does not depend on scheduling.
pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let systems = corpus(cfg);
    let tallies: Vec<Tally> = systems
        .par_iter()
        .enumerate()
        .map(|(i, sys)| check_system(sys, cfg, cfg.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
        .collect();
    let mut merged = vec![TagStats::default(); Tag::ALL.len()];
    for t in tallies {
        for (m, s) in merged.iter_mut().zip(t.stats) {
            m.absorb(s);
        }
    }
    let tags: Vec<TagReport> = Tag::ALL
        .iter()
        .zip(merged)
        .map(|(&tag, stats)| TagReport { tag, passed: stats.failures == 0, stats })
        .collect();
    VerifyReport {
        systems: systems.len(),
        surjective_systems: systems.iter().filter(|s| s.is_surjective()).count(),
        all_passed: tags.iter().all(|t| t.passed),
        tags,
    }
}
