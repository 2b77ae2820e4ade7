use thiserror::Error;

/// Errors raised by the word calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed token {token:?} at offset {offset}")]
    MalformedToken { token: String, offset: usize },

    #[error("misplaced '/' at offset {offset}: it may only precede the final letter")]
    MisplacedSlash { offset: usize },

    #[error("a partial word needs at least one letter")]
    EmptyPartial,

    #[error("operation {op} does not accept partial words")]
    PartialNotAllowed { op: &'static str },

    #[error("{op} needs an even number of letters, got {len}")]
    OddLength { op: &'static str, len: usize },

    #[error("malformed stage {0:?}")]
    MalformedStage(String),

    #[error("malformed vertex {0:?}")]
    MalformedVertex(String),

    #[error("vertex {vertex} is not a valid vertex: {reason}")]
    InvalidVertex { vertex: String, reason: String },

    #[error("vertices {a} and {b} are not adjacent")]
    NotAdjacent { a: String, b: String },

    #[error("edge labels are not determined by endpoints at level 0")]
    AmbiguousLevelZero,

    #[error("level {level} exceeds the cap of {cap}")]
    LevelCap { level: usize, cap: usize },

    #[error("level mismatch: expected {expected}, got {got}")]
    LevelMismatch { expected: usize, got: usize },

    #[error("peg constellation is not allowable")]
    NotAllowable,

    #[error("stage 0 has no entering transition (the reset move precedes it)")]
    StageZero,

    #[error("invalid hanoi state: {0}")]
    InvalidState(String),

    #[error("word {word} is not an edge-loop at level {level}")]
    NotALoop { word: String, level: usize },

    #[error("words are not coherent: projection of level {level} gives {got}, expected {expected}")]
    NotCoherent {
        level: usize,
        expected: String,
        got: String,
    },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("generator choice rejected: {0}")]
    ConstraintViolation(String),

    #[error("sequence error: {0}")]
    Sequence(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
