use thiserror::Error;

use crate::algebra::ShelfSide;
use crate::matched::{Case, CheckReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("carrier size must be at least 1")]
    EmptyCarrier,

    #[error("expected {expected} {what}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("entry {value} at {location} is outside the carrier {{0..{size}}}")]
    EntryOutOfRange {
        location: String,
        value: usize,
        size: usize,
    },

    #[error("image sequence is not a bijection: {0} appears more than once")]
    NotBijective(usize),

    #[error("incompatible carriers: sizes {left} and {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("operation is not {side} self-distributive, witness (x, y, z) = {witness:?}")]
    NotSelfDistributive { side: ShelfSide, witness: [usize; 3] },

    #[error("braid relation fails at (x, y, z) = {witness:?}")]
    NotASolution { witness: [usize; 3] },

    #[error("not left non-degenerate at x = {row}")]
    NotLeftNonDegenerate { row: usize },

    #[error("not a matched product system: {}", .0.summary())]
    InvalidSystem(Box<CheckReport>),

    #[error("case mismatch for {case}: {reason}")]
    CaseMismatch { case: Case, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
