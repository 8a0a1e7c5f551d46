//! The run configuration echoed into every JSON output.

use clap::ValueEnum;
use morselat_core::grid::{Adjacency, CellMap, Ingestion};
use morselat_core::verify::VerifyConfig;
use serde::Serialize;

pub const TOOL: &str = "morselat";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default for every enumeration bound (states, cells, poset size).
pub const DEFAULT_MAX_ENUM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bounds {
    /// States for exact systems, cells for exhaustive block enumeration,
    /// elements for down-set enumeration.
    pub max_enum: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridParams {
    pub domain: [f64; 2],
    pub cells: usize,
    pub adjacency: Adjacency,
    #[serde(flatten)]
    pub ingestion: Option<Ingestion>,
}

impl GridParams {
    pub fn of(m: &CellMap) -> Self {
        let g = m.grid();
        GridParams { domain: [g.lo, g.hi], cells: g.n_cells, adjacency: m.adjacency(), ingestion: m.ingestion().cloned() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub output: Option<String>,
    pub format: Format,
    pub bounds: Bounds,
    pub seed: u64,
    pub grid: Option<GridParams>,
    /// `lift --direct`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<VerifyConfig>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    payload: &'a T,
}

/// Pretty JSON with the tool, version and config in front of the payload.
pub fn render<T: Serialize>(cfg: &RunConfig, payload: &T) -> String {
    let env = Envelope { tool: TOOL, version: VERSION, config: cfg, payload };
    let mut s = serde_json::to_string_pretty(&env).expect("outputs serialize");
    s.push('\n');
    s
}

/// DOT outputs cannot carry the config as data; a comment names the run.
pub fn dot_header(cfg: &RunConfig) -> String {
    format!("// {TOOL} {VERSION} {} {}\n", cfg.command, cfg.inputs.join(" "))
}
