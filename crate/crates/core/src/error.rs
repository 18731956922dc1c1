use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dihedral order n must be at least 3, got {0}")]
    InvalidOrder(u32),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: &'static str, found: &'static str },

    #[error("elements belong to different groups (n = {0} and n = {1})")]
    MismatchedOrder(u32, u32),

    #[error("negative structure constant {coefficient} for {u} * {w} at {v}")]
    NegativeStructureConstant { u: String, w: String, v: String, coefficient: String },

    #[error("invalid simple module {0} for this n")]
    InvalidSimple(String),

    #[error("not a D_n-module: relation {relation} fails")]
    NotAModule { relation: String },

    #[error("multiplicity of {simple} is {value}, not within tolerance of an integer")]
    NonIntegralMultiplicity { simple: String, value: f64 },

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("rank {0} exceeds the canonicalisation limit of 6")]
    RankTooLarge(usize),

    #[error("integer overflow while {0}")]
    Overflow(String),

    #[error("unknown cell {0:?}; expected one of Le, Ls, Lt, Lw0")]
    UnknownCell(String),

    #[error("knowledge table: {0}")]
    Knowledge(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
