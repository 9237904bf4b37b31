//! Fixture decks shared by the criterion benches.

use spotit_core::{build_grid_blocks, build_paired, remove_cards, Deck};

/// The 57-card order-8 plane.
pub fn dobble() -> Deck {
    build_paired(8).expect("7 is prime")
}

/// The 57-card plane with its first card removed: extendable by exactly one card.
pub fn dobble_minus_one() -> Deck {
    remove_cards(&dobble(), &[0]).expect("a plane minus one card is a deck")
}

/// Order 10 with four blocks over a 9 × 9 grid.
pub fn composite_blocks() -> Deck {
    build_grid_blocks(10, 4).expect("slopes 1 and 2 are units mod 9")
}
