//! Tools for *Spot It!* decks: finite families of equal-size symbol sets in
//! which any two cards share exactly one symbol.
//!
//! The crate is split by concern:
//!
//! * [`deck`] holds the data model, normalization and the axiom checks.
//! * [`analysis`] computes multiplicities and cross-checks the counting
//!   identities, bounds and classification results on a concrete deck.
//! * [`constructions`] builds the known families (2-symmetric decks, the
//!   grid/diagonal planes for prime `n - 1`, k-block partial decks).
//! * [`maximality`] decides whether a deck can be extended by one more card.
//! * [`canon`] and [`enumerate`] provide canonical labeling and isomorph-free
//!   exhaustive generation for small orders.
//! * [`format`] reads and writes the plain-text and JSON deck formats.

pub mod analysis;
pub mod bitset;
pub mod canon;
pub mod constructions;
pub mod deck;
pub mod enumerate;
mod error;
pub mod format;
pub mod maximality;

pub use analysis::{
    bruck_ryser_excluded, check_identities, check_kn2_lemma, classify, find_common_triple,
    fundamental_number, idempotent_orders, multiplicities, paired_existence, Classification,
    IdentityCheck, IdentityKind, IdentityReport, LengthVsDelta, MultiplicityTable, PairedExistence,
};
pub use bitset::BitSet;
pub use canon::{canonical_form, is_isomorphic, CanonicalForm};
pub use constructions::{
    build_grid, build_grid_blocks, build_paired, build_two_symmetric, remove_cards, Block,
    GridBlockSpec,
};
pub use deck::{
    normalize, partition_by_card, star, validate, Axiom, Card, Deck, Star, SymbolId,
    ValidationResult, Violation,
};
pub use enumerate::{
    census, enumerate_decks, probe_length_conjecture, Census, CensusEntry, EnumerateOptions,
    Enumeration, LengthProbe,
};
pub use error::{Error, Result};
pub use maximality::{
    complete, find_extension, is_maximal, prop_condition_holds, sufficient_maximal, Completion,
    ExtensionCandidate, MaximalityVerdict,
};
