use thiserror::Error;

use crate::deck::SymbolId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("deck has no cards")]
    EmptyDeck,

    #[error("card {card} is empty")]
    EmptyCard { card: usize },

    #[error("card {card} repeats symbol `{token}`")]
    MalformedCard { card: usize, token: String },

    #[error("symbol {0} is out of range")]
    InvalidSymbol(SymbolId),

    #[error("card index {index} is out of range for a deck of {cards} cards")]
    InvalidCardIndex { index: usize, cards: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("removing those cards isolates symbols {symbols:?}")]
    RemovalInvalid { symbols: Vec<String> },

    /// Two routes that must agree on a valid deck disagreed. This points at
    /// a bug in this crate, never at bad input.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}
