//! Deck data model and the five deck axioms.
//!
//! A deck is stored with dense symbol ids `0..ℓ` assigned in first-occurrence
//! order. The original tokens live in a side table so that rendering gives
//! back the input names. Each card keeps its symbols three ways: the layout
//! it was given in (for rendering), a sorted list, and a bit vector used for
//! intersection counting.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SymbolId(pub u32);

impl SymbolId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for SymbolId {
    fn from(i: usize) -> Self {
        SymbolId(i as u32)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone)]
pub struct Card {
    layout: Vec<SymbolId>,
    sorted: Vec<SymbolId>,
    bits: BitSet,
}

impl Card {
    fn new(layout: Vec<SymbolId>, length: usize) -> Self {
        let mut sorted = layout.clone();
        sorted.sort_unstable();
        let bits = BitSet::from_indices(length, sorted.iter().map(|s| s.index()));
        Card {
            layout,
            sorted,
            bits,
        }
    }

    /// Symbols in ascending id order.
    pub fn symbols(&self) -> &[SymbolId] {
        &self.sorted
    }

    /// Symbols in the order they were supplied.
    pub fn layout(&self) -> &[SymbolId] {
        &self.layout
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn contains(&self, s: SymbolId) -> bool {
        self.bits.contains(s.index())
    }

    pub fn shared_count(&self, other: &Card) -> usize {
        self.bits.intersection_len(&other.bits)
    }

    /// The smallest shared symbol, if any.
    pub fn common_symbol(&self, other: &Card) -> Option<SymbolId> {
        self.sorted.iter().copied().find(|s| other.contains(*s))
    }
}

impl PartialEq for Card {
    fn eq(&self, other: &Self) -> bool {
        self.sorted == other.sorted
    }
}

impl Eq for Card {}

#[derive(Debug, Clone)]
pub struct Deck {
    cards: Vec<Card>,
    tokens: Vec<String>,
    /// For each symbol, the set of card indices containing it.
    stars: Vec<BitSet>,
    /// For each symbol, the set of other symbols sharing a card with it.
    alignment: Vec<BitSet>,
}

impl Deck {
    /// Builds a deck from dense symbol ids. Every id in `0..tokens.len()` must
    /// occur on some card; with `tokens = None` symbol `i` is named `i + 1`.
    pub fn from_ids(cards: Vec<Vec<SymbolId>>, tokens: Option<Vec<String>>) -> Result<Deck> {
        if cards.is_empty() {
            return Err(Error::EmptyDeck);
        }
        let max_id = cards
            .iter()
            .flatten()
            .map(|s| s.index() + 1)
            .max()
            .unwrap_or(0);
        let tokens = tokens.unwrap_or_else(|| (1..=max_id).map(|i| i.to_string()).collect());
        let length = tokens.len();
        let mut seen = BitSet::with_capacity(length);
        for (ci, card) in cards.iter().enumerate() {
            if card.is_empty() {
                return Err(Error::EmptyCard { card: ci });
            }
            let mut on_card = BitSet::with_capacity(length);
            for &s in card {
                if s.index() >= length {
                    return Err(Error::InvalidSymbol(s));
                }
                if on_card.contains(s.index()) {
                    return Err(Error::MalformedCard {
                        card: ci,
                        token: tokens[s.index()].clone(),
                    });
                }
                on_card.insert(s.index());
                seen.insert(s.index());
            }
        }
        if seen.len() != length {
            return Err(Error::Precondition(format!(
                "symbol ids are not dense: {} of {} ids used",
                seen.len(),
                length
            )));
        }
        let cards: Vec<Card> = cards.into_iter().map(|c| Card::new(c, length)).collect();

        let mut stars = vec![BitSet::with_capacity(cards.len()); length];
        let mut alignment = vec![BitSet::with_capacity(length); length];
        for (ci, card) in cards.iter().enumerate() {
            for &s in card.symbols() {
                stars[s.index()].insert(ci);
                alignment[s.index()].union_with(card.bits());
            }
        }
        for (s, row) in alignment.iter_mut().enumerate() {
            row.remove(s);
        }
        Ok(Deck {
            cards,
            tokens,
            stars,
            alignment,
        })
    }

    /// Order `n`: the size of the first card. Uniformity is checked by
    /// [`validate`], not here.
    pub fn order(&self) -> usize {
        self.cards[0].len()
    }

    pub fn card_count(&self) -> usize {
        self.cards.len()
    }

    /// Length `ℓ`: the number of distinct symbols.
    pub fn length(&self) -> usize {
        self.tokens.len()
    }

    pub fn cards(&self) -> &[Card] {
        &self.cards
    }

    pub fn card(&self, index: usize) -> Result<&Card> {
        self.cards.get(index).ok_or(Error::InvalidCardIndex {
            index,
            cards: self.cards.len(),
        })
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.length()).map(SymbolId::from)
    }

    pub fn token(&self, s: SymbolId) -> &str {
        &self.tokens[s.index()]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn multiplicity(&self, s: SymbolId) -> usize {
        self.stars[s.index()].len()
    }

    /// Card indices containing `s`, as a bit set over cards.
    pub fn star_set(&self, s: SymbolId) -> &BitSet {
        &self.stars[s.index()]
    }

    /// Symbols sharing a card with `s` (excluding `s` itself).
    pub fn aligned_with(&self, s: SymbolId) -> &BitSet {
        &self.alignment[s.index()]
    }

    pub fn aligned(&self, s: SymbolId, t: SymbolId) -> bool {
        self.alignment[s.index()].contains(t.index())
    }

    /// Cards as lists of ids, in layout order.
    pub fn id_layouts(&self) -> Vec<Vec<SymbolId>> {
        self.cards.iter().map(|c| c.layout().to_vec()).collect()
    }

    /// Cards as token lists, in layout order.
    pub fn token_layouts(&self) -> Vec<Vec<&str>> {
        self.cards
            .iter()
            .map(|c| c.layout().iter().map(|&s| self.token(s)).collect())
            .collect()
    }

    /// A copy of the deck with one more card made of existing symbols.
    pub fn with_card(&self, symbols: &[SymbolId]) -> Result<Deck> {
        let mut cards = self.id_layouts();
        cards.push(symbols.to_vec());
        Deck::from_ids(cards, Some(self.tokens.clone()))
    }

    /// Keeps the listed cards (in the given order), dropping symbols that no
    /// longer occur and compacting ids in first-occurrence order. Tokens are
    /// carried over.
    pub fn retain_cards(&self, keep: &[usize]) -> Result<Deck> {
        let mut remap: HashMap<SymbolId, SymbolId> = HashMap::new();
        let mut tokens = Vec::new();
        let mut cards = Vec::with_capacity(keep.len());
        for &ci in keep {
            let card = self.card(ci)?;
            let row = card
                .layout()
                .iter()
                .map(|&s| {
                    *remap.entry(s).or_insert_with(|| {
                        tokens.push(self.token(s).to_string());
                        SymbolId::from(tokens.len() - 1)
                    })
                })
                .collect();
            cards.push(row);
        }
        Deck::from_ids(cards, Some(tokens))
    }
}

/// Maps raw token rows to a deck with dense ids in first-occurrence order.
/// Axioms are not checked here; see [`validate`].
pub fn normalize<S: AsRef<str>>(raw_cards: &[Vec<S>]) -> Result<Deck> {
    if raw_cards.is_empty() {
        return Err(Error::EmptyDeck);
    }
    let mut ids: HashMap<&str, SymbolId> = HashMap::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut cards = Vec::with_capacity(raw_cards.len());
    for (ci, row) in raw_cards.iter().enumerate() {
        if row.is_empty() {
            return Err(Error::EmptyCard { card: ci });
        }
        let mut card = Vec::with_capacity(row.len());
        for tok in row {
            let tok = tok.as_ref();
            let id = *ids.entry(tok).or_insert_with(|| {
                tokens.push(tok.to_string());
                SymbolId::from(tokens.len() - 1)
            });
            if card.contains(&id) {
                return Err(Error::MalformedCard {
                    card: ci,
                    token: tok.to_string(),
                });
            }
            card.push(id);
        }
        cards.push(card);
    }
    Deck::from_ids(cards, Some(tokens))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    D1,
    D2,
    D3,
    D4,
    D5,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Two cards sharing zero or at least two symbols.
    Intersection {
        cards: (usize, usize),
        shared: usize,
    },
    /// A symbol on fewer than two cards.
    Multiplicity {
        symbol: SymbolId,
        multiplicity: usize,
    },
    /// A card with fewer than two symbols.
    CardTooSmall {
        card: usize,
        size: usize,
    },
    /// A card whose size differs from the first card's.
    NonUniform {
        card: usize,
        size: usize,
        expected: usize,
    },
    NoSymbols,
}

impl Violation {
    pub fn axiom(&self) -> Axiom {
        match self {
            Violation::Intersection { .. } => Axiom::D1,
            Violation::Multiplicity { .. } => Axiom::D2,
            Violation::CardTooSmall { .. } => Axiom::D3,
            Violation::NonUniform { .. } => Axiom::D4,
            Violation::NoSymbols => Axiom::D5,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.axiom())?;
        match self {
            Violation::Intersection {
                cards: (a, b),
                shared,
            } => {
                write!(f, "cards {a} and {b} share {shared} symbols")
            }
            Violation::Multiplicity {
                symbol,
                multiplicity,
            } => {
                write!(f, "symbol {symbol} appears on {multiplicity} card(s)")
            }
            Violation::CardTooSmall { card, size } => write!(f, "card {card} has {size} symbol(s)"),
            Violation::NonUniform {
                card,
                size,
                expected,
            } => {
                write!(f, "card {card} has {size} symbols, expected {expected}")
            }
            Violation::NoSymbols => write!(f, "deck has no symbols"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom() == axiom)
    }
}

/// Checks all five axioms and reports every violation found.
pub fn validate(deck: &Deck) -> ValidationResult {
    let mut violations = Vec::new();
    let n = deck.order();
    let cards = deck.cards();

    for i in 0..cards.len() {
        for j in i + 1..cards.len() {
            let shared = cards[i].shared_count(&cards[j]);
            if shared != 1 {
                violations.push(Violation::Intersection {
                    cards: (i, j),
                    shared,
                });
            }
        }
    }
    for s in deck.symbols() {
        let m = deck.multiplicity(s);
        if m < 2 {
            violations.push(Violation::Multiplicity {
                symbol: s,
                multiplicity: m,
            });
        }
    }
    for (ci, card) in cards.iter().enumerate() {
        if card.len() < 2 {
            violations.push(Violation::CardTooSmall {
                card: ci,
                size: card.len(),
            });
        }
        if card.len() != n {
            violations.push(Violation::NonUniform {
                card: ci,
                size: card.len(),
                expected: n,
            });
        }
    }
    if deck.length() == 0 {
        violations.push(Violation::NoSymbols);
    }
    ValidationResult { violations }
}

/// The star `E(s)`: all cards carrying `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: SymbolId,
    pub cards: Vec<usize>,
    /// Number of distinct symbols across the star's cards.
    pub symbol_count: usize,
}

pub fn star(deck: &Deck, s: SymbolId) -> Result<Star> {
    if s.index() >= deck.length() {
        return Err(Error::InvalidSymbol(s));
    }
    let cards: Vec<usize> = deck.star_set(s).iter().collect();
    let mut seen = BitSet::with_capacity(deck.length());
    for &ci in &cards {
        seen.union_with(deck.cards()[ci].bits());
    }
    Ok(Star {
        center: s,
        cards,
        symbol_count: seen.len(),
    })
}

/// One pack of [`partition_by_card`]: the star of `symbol` minus the pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pack {
    pub symbol: SymbolId,
    pub cards: Vec<usize>,
}

/// Splits the cards other than `card_index` by which symbol of the pivot card
/// they share. Packs follow the pivot's layout order.
pub fn partition_by_card(deck: &Deck, card_index: usize) -> Result<Vec<Pack>> {
    let pivot = deck.card(card_index)?;
    Ok(pivot
        .layout()
        .iter()
        .map(|&s| Pack {
            symbol: s,
            cards: deck
                .star_set(s)
                .iter()
                .filter(|&ci| ci != card_index)
                .collect(),
        })
        .collect())
}
