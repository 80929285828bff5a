use std::io;

use thiserror::Error;

use crate::context::Dim;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension index {0} (expected 1, 2 or 3)")]
    InvalidDimension(usize),

    #[error("element id {id} out of range for {dim} (size {size})")]
    ElementOutOfRange { dim: Dim, id: u32, size: usize },

    #[error("unknown {dim} label `{label}`")]
    UnknownLabel { dim: Dim, label: String },

    #[error("query names no element in any dimension")]
    EmptyQuery,

    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(i64),

    #[error("query syntax: {0}")]
    QuerySyntax(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("brute-force enumeration over {requested} exceeds cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },

    #[error("tri-set is not a concept of the indexed store: {0}")]
    UnknownConcept(String),

    #[error("not an index file (bad magic)")]
    BadMagic,

    #[error("unsupported index format version {found} (expected {expected})")]
    UnsupportedVersion { found: u16, expected: u16 },

    #[error("corrupt index file: {0}")]
    CorruptIndex(String),

    #[error("index covers {index} concepts but the store holds {store}")]
    IndexMismatch { index: usize, store: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}
