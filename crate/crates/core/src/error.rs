use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContactError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("chart `{chart}` does not expose {form}")]
    UnsupportedForm { chart: String, form: &'static str },

    #[error("stacked contact system is inconsistent: residual {residual:e} exceeds bound {bound:e}")]
    InconsistentSystem { residual: f64, bound: f64 },

    #[error("degenerate chart: {0}")]
    DegenerateChart(String),

    #[error("integration blew up after t = {last_valid_time}")]
    BlowUp { last_valid_time: f64 },

    #[error("degenerate patch `{patch}`: jacobian rank {rank} < {expected} at u = {param:?}")]
    DegeneratePatch {
        patch: String,
        param: Vec<f64>,
        rank: usize,
        expected: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("lifted orbit reaches |theta| = {observed} outside window R = {window}; retry with a larger R")]
    WindowViolation { observed: f64, window: f64 },
}

pub type Result<T> = std::result::Result<T, ContactError>;
