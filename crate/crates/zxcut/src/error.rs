use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("arity mismatch: {outputs} outputs composed with {inputs} inputs")]
    ArityMismatch { outputs: usize, inputs: usize },

    #[error("vertex {0} not found or not usable here")]
    BadVertex(u32),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),

    #[error("contraction budget exceeded: needs rank {needed}, limit {limit}")]
    BudgetExceeded { needed: usize, limit: usize },

    #[error("strategy error: {0}")]
    Strategy(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("unknown circuit: {0}")]
    UnknownCircuit(String),

    #[error("internal invariant violated: {0}")]
    Corrupt(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
