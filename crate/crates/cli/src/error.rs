//! Failures and their exit codes. Every failure is reported on stderr as a
//! single JSON object.

use morselat_core::exact::ExactError;
use morselat_core::grid::GridError;
use morselat_core::io::InputError;
use morselat_core::lattice::LatticeError;
use morselat_core::lift::LiftError;
use morselat_core::order::OrderError;
use serde::Serialize;
use serde_json::Value;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BOUND: i32 = 3;
pub const EXIT_OBSTRUCTION: i32 = 4;
pub const EXIT_NOT_SUBLATTICE: i32 = 5;

#[derive(Debug, Clone, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl CliError {
    fn new(kind: &'static str, exit_code: i32, message: impl Into<String>) -> Self {
        CliError { kind, exit_code, message: message.into(), file: None, position: None, detail: None }
    }

    pub fn io(file: &str, e: std::io::Error) -> Self {
        CliError { file: Some(file.into()), ..Self::new("io", EXIT_FAILURE, e.to_string()) }
    }

    pub fn input(file: &str, e: InputError) -> Self {
        let kind = match e {
            InputError::Syntax { .. } => "parse",
            InputError::Unsupported(_) => "unsupported",
            InputError::Invalid(_) => "invalid_input",
        };
        let position = e.position().map(|(line, column)| Position { line, column });
        let message = match &e {
            InputError::Syntax { message, .. } => message.clone(),
            e => e.to_string(),
        };
        CliError { file: Some(file.into()), position, ..Self::new(kind, EXIT_PARSE, message) }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", EXIT_PARSE, message)
    }

    pub fn bound(message: impl Into<String>) -> Self {
        Self::new("bound_exceeded", EXIT_BOUND, message)
    }

    pub fn obstruction(message: impl Into<String>, detail: Value) -> Self {
        CliError { detail: Some(detail), ..Self::new("obstruction_found", EXIT_OBSTRUCTION, message) }
    }

    pub fn not_sublattice(message: impl Into<String>) -> Self {
        Self::new("not_a_sublattice", EXIT_NOT_SUBLATTICE, message)
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self::new("failure", EXIT_FAILURE, message)
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::TooLarge { .. } => CliError::bound(e.to_string()),
            e => CliError::failure(e.to_string()),
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::TooLarge { .. } => CliError::bound(e.to_string()),
            GridError::NotASublattice { .. } => CliError::not_sublattice(e.to_string()),
            GridError::Lift(l) => l.into(),
            e => CliError::failure(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Order(o) => o.into(),
            e => CliError::failure(e.to_string()),
        }
    }
}

impl From<OrderError> for CliError {
    fn from(e: OrderError) -> Self {
        match e {
            OrderError::TooLarge { .. } => CliError::bound(e.to_string()),
            e => CliError::failure(e.to_string()),
        }
    }
}

/// Obstructions need the poset to be named; callers that have it go through
/// `commands::obstruction` instead.
impl From<LiftError> for CliError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::ObstructionFound(ref o) => {
                let detail = serde_json::json!({ "step": o.step, "q": o.q_label, "alpha": o.alpha, "witness": o.witness });
                CliError::obstruction(e.to_string(), detail)
            }
            LiftError::NotAnEmbedding(_) => CliError::not_sublattice(e.to_string()),
            e => CliError::failure(e.to_string()),
        }
    }
}
