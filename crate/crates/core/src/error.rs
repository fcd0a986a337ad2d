use thiserror::Error;

/// Errors raised by the automata, logic and planning layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("track mismatch: {0} vs {1}")]
    TrackMismatch(usize, usize),
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("track index {index} out of range for {tracks} tracks")]
    TrackOutOfRange { index: usize, tracks: usize },
    #[error("state cap of {0} exceeded")]
    StateCap(usize),
    #[error("more than {0} interpretation classes")]
    ClassCap(usize),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{name}` has arity {expected}, used with {found} arguments")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("variable `{0}` would be captured")]
    Capture(String),
    #[error("unsupported fragment: {0}")]
    Fragment(String),
    #[error("domain is infinite")]
    InfiniteDomain,
    #[error("updated model has no worlds")]
    EmptyModel,
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
