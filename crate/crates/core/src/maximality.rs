//! Maximality: can one more card of existing symbols be added to a deck?
//!
//! A new card `Γ` must meet every card exactly once, so the stars of its
//! symbols partition the deck and their multiplicities sum to `c`. It can
//! only use existing symbols: a fresh symbol would sit on `Γ` alone.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::multiplicities;
use crate::bitset::BitSet;
use crate::deck::{validate, Deck, SymbolId};
use crate::error::{Error, Result};

/// A card that can be added to a deck.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionCandidate {
    /// Sorted ascending.
    pub symbols: Vec<SymbolId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalityVerdict {
    /// The `n` smallest multiplicities sum to more than `c`.
    pub sufficient_corollary: bool,
    /// No `n` symbols have multiplicities summing to exactly `c`.
    pub prop_condition: bool,
    /// No extension card exists.
    pub exact: bool,
    pub extension: Option<ExtensionCandidate>,
}

impl MaximalityVerdict {
    /// Maximal although some `n` symbols have multiplicities summing to `c`:
    /// such a deck shows the counting condition is not necessary.
    pub fn condition_gap(&self) -> bool {
        self.exact && !self.prop_condition
    }
}

pub fn sufficient_maximal(deck: &Deck) -> bool {
    let mut counts = multiplicities(deck).counts;
    counts.sort_unstable();
    counts.iter().take(deck.order()).sum::<usize>() > deck.card_count()
}

/// True when no `n` distinct symbols have multiplicities summing to `c`.
///
/// Bounded subset-sum over the multiplicity histogram: `reach[j][s]` records
/// whether `j` symbols can total `s`.
#[allow(clippy::needless_range_loop)]
pub fn prop_condition_holds(deck: &Deck) -> bool {
    let n = deck.order();
    let c = deck.card_count();
    let table = multiplicities(deck);
    let mut reach = vec![vec![false; c + 1]; n + 1];
    reach[0][0] = true;
    for (&value, &count) in &table.histogram {
        let prev = reach.clone();
        for j in 0..=n {
            for s in 0..=c {
                if !prev[j][s] {
                    continue;
                }
                for t in 1..=count.min(n - j) {
                    let total = s + t * value;
                    if total > c {
                        break;
                    }
                    reach[j + t][total] = true;
                }
            }
        }
    }
    !reach[n][c]
}

struct ExtensionSearch<'a> {
    deck: &'a Deck,
    n: usize,
    max_mult: usize,
}

impl ExtensionSearch<'_> {
    fn new(deck: &Deck) -> ExtensionSearch<'_> {
        let max_mult = deck
            .symbols()
            .map(|s| deck.multiplicity(s))
            .max()
            .unwrap_or(0);
        ExtensionSearch {
            deck,
            n: deck.order(),
            max_mult,
        }
    }

    fn first_uncovered(&self, covered: &BitSet) -> Option<usize> {
        (0..self.deck.card_count()).find(|&ci| !covered.contains(ci))
    }

    /// Symbols of the lowest uncovered card whose stars avoid `covered`.
    fn branches(&self, covered: &BitSet) -> Vec<SymbolId> {
        match self.first_uncovered(covered) {
            None => Vec::new(),
            Some(ci) => self.deck.cards()[ci]
                .symbols()
                .iter()
                .copied()
                .filter(|&s| self.deck.star_set(s).is_disjoint(covered))
                .collect(),
        }
    }

    fn descend(&self, chosen: &mut Vec<SymbolId>, covered: &BitSet) -> bool {
        let uncovered = self.deck.card_count() - covered.len();
        let slots = self.n - chosen.len();
        if uncovered == 0 {
            return slots == 0;
        }
        if slots == 0 || uncovered > slots * self.max_mult {
            return false;
        }
        for s in self.branches(covered) {
            let mut next = covered.clone();
            next.union_with(self.deck.star_set(s));
            chosen.push(s);
            if self.descend(chosen, &next) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn starting_with(&self, first: SymbolId) -> Option<ExtensionCandidate> {
        let mut chosen = vec![first];
        let covered = self.deck.star_set(first).clone();
        self.descend(&mut chosen, &covered).then(|| {
            chosen.sort_unstable();
            ExtensionCandidate { symbols: chosen }
        })
    }
}

/// Finds an extension card by backtracking: take the lowest-index card not
/// yet met and branch over its symbols, smallest id first.
pub fn find_extension(deck: &Deck) -> Option<ExtensionCandidate> {
    let search = ExtensionSearch::new(deck);
    let empty = BitSet::with_capacity(deck.card_count());
    search
        .branches(&empty)
        .into_iter()
        .find_map(|s| search.starting_with(s))
}

/// Same as [`find_extension`] with the first branching level spread over the
/// rayon pool. Later branches are cancelled once an earlier one succeeds, so
/// the witness is identical to the sequential one.
pub fn find_extension_parallel(deck: &Deck) -> Option<ExtensionCandidate> {
    let search = ExtensionSearch::new(deck);
    let empty = BitSet::with_capacity(deck.card_count());
    search
        .branches(&empty)
        .into_par_iter()
        .find_map_first(|s| search.starting_with(s))
}

/// Runs the three maximality tests and checks that each stronger one implies
/// the next.
pub fn is_maximal(deck: &Deck) -> Result<MaximalityVerdict> {
    let sufficient_corollary = sufficient_maximal(deck);
    let prop_condition = prop_condition_holds(deck);
    let extension = find_extension(deck);
    let exact = extension.is_none();

    if sufficient_corollary && !prop_condition {
        return Err(Error::InvariantViolation(
            "minimum n-sum exceeds c but some n symbols sum to c".into(),
        ));
    }
    if prop_condition && !exact {
        return Err(Error::InvariantViolation(
            "no n multiplicities sum to c, yet an extension card was found".into(),
        ));
    }
    if let Some(ext) = &extension {
        let extended = deck.with_card(&ext.symbols)?;
        if !validate(&extended).is_valid() {
            return Err(Error::InvariantViolation(format!(
                "extension {:?} does not give a valid deck",
                ext.symbols
            )));
        }
    }
    Ok(MaximalityVerdict {
        sufficient_corollary,
        prop_condition,
        exact,
        extension,
    })
}

#[derive(Debug, Clone)]
pub struct Completion {
    pub deck: Deck,
    /// Cards added.
    pub steps: usize,
    /// False when the step budget ran out before a maximal deck was reached.
    pub maximal: bool,
}

/// Adds extension cards until the deck is maximal or `max_steps` cards have
/// been added.
pub fn complete(deck: &Deck, max_steps: usize) -> Result<Completion> {
    let mut current = deck.clone();
    let mut steps = 0;
    loop {
        let Some(ext) = find_extension(&current) else {
            return Ok(Completion {
                deck: current,
                steps,
                maximal: true,
            });
        };
        if steps == max_steps {
            return Ok(Completion {
                deck: current,
                steps,
                maximal: false,
            });
        }
        current = current.with_card(&ext.symbols)?;
        if !validate(&current).is_valid() {
            return Err(Error::InvariantViolation(format!(
                "adding {:?} produced an invalid deck",
                ext.symbols
            )));
        }
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_grid_blocks, build_paired, build_two_symmetric, remove_cards,
    };
    use crate::deck::normalize;

    fn fano() -> Deck {
        let rows = [
            "5 1 2", "5 3 4", "6 1 3", "6 2 4", "7 1 4", "7 2 3", "5 6 7",
        ];
        let raw: Vec<Vec<&str>> = rows.iter().map(|r| r.split(' ').collect()).collect();
        normalize(&raw).unwrap()
    }

    fn tokens(deck: &Deck, ext: &ExtensionCandidate) -> Vec<String> {
        let mut t: Vec<String> = ext
            .symbols
            .iter()
            .map(|&s| deck.token(s).to_string())
            .collect();
        t.sort();
        t
    }

    #[test]
    fn fano_is_maximal() {
        let v = is_maximal(&fano()).unwrap();
        assert!(v.sufficient_corollary && v.prop_condition && v.exact);
        assert_eq!(v.extension, None);
    }

    #[test]
    fn fano_minus_each_card_recovers_it() {
        let full = fano();
        for i in 0..7 {
            let deck = remove_cards(&full, &[i]).unwrap();
            assert!(!sufficient_maximal(&deck));
            assert!(!prop_condition_holds(&deck));
            let ext = find_extension(&deck).unwrap();
            let mut want: Vec<String> = full.token_layouts()[i]
                .iter()
                .map(|s| s.to_string())
                .collect();
            want.sort();
            assert_eq!(tokens(&deck, &ext), want);
            assert_eq!(find_extension_parallel(&deck), Some(ext));

            let v = is_maximal(&deck).unwrap();
            assert!(!v.exact);
            let done = complete(&deck, 5).unwrap();
            assert_eq!(done.steps, 1);
            assert!(done.maximal);
            assert_eq!(done.deck.card_count(), 7);
        }
    }

    #[test]
    fn symmetric_and_block_decks_are_maximal() {
        for deck in [
            build_two_symmetric(4).unwrap(),
            build_grid_blocks(7, 3).unwrap(),
        ] {
            assert!(sufficient_maximal(&deck));
            assert!(prop_condition_holds(&deck));
            assert_eq!(find_extension(&deck), None);
        }
        let triangle = build_two_symmetric(2).unwrap();
        assert!(is_maximal(&triangle).unwrap().exact);
    }

    #[test]
    fn four_blocks_without_pivot_extend_to_the_plane() {
        let deck = build_grid_blocks(4, 4).unwrap();
        let ext = find_extension(&deck).unwrap();
        assert_eq!(tokens(&deck, &ext), ["10", "11", "12", "13"]);
        let done = complete(&deck, 3).unwrap();
        assert_eq!(done.deck.card_count(), 13);
        assert!(done.maximal);
        assert_eq!(build_paired(4).unwrap().card_count(), 13);
    }

    #[test]
    fn completion_budget() {
        let deck = remove_cards(&fano(), &[3]).unwrap();
        let stuck = complete(&deck, 0).unwrap();
        assert_eq!((stuck.steps, stuck.maximal), (0, false));
        let fixed = complete(&fano(), 0).unwrap();
        assert_eq!((fixed.steps, fixed.maximal), (0, true));
        let two = complete(&build_grid_blocks(4, 2).unwrap(), 10).unwrap();
        assert_eq!(
            (two.steps, two.maximal, two.deck.card_count()),
            (0, true, 6)
        );
    }
}
