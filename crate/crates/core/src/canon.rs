//! Canonical labeling of decks and partial decks.
//!
//! The minimal labeling of a family of cards is the lexicographically smallest
//! sorted list of sorted cards over all relabelings of the symbols. It is
//! found by building the list one card at a time. Symbols are kept in an
//! ordered partition: each cell owns a contiguous range of labels and its
//! symbols are still interchangeable. The smallest possible image of a card
//! gives each cell's lowest labels to the card's symbols in that cell, so
//! the next canonical card is the minimum such image over the unused cards.
//! Placing a card splits every cell it touches. Only ties between cards need
//! branching, and branches worse than the best list so far are cut.
//! Two leaves with equal lists give a card automorphism; at each node only
//! one tied card per orbit of the automorphisms fixing the path is tried.
//!
//! That plain search is what the enumerator uses to test partial decks: its
//! minimum has symbols in first-use order and every prefix of a minimal list
//! is itself minimal.
//!
//! [`canonical_form`] uses individualization and refinement instead. The
//! ordered partition is split by multiplicity and then repeatedly by how
//! each symbol meets the classes of cards until nothing splits. While a cell
//! has several symbols, each of them in turn is given that cell's lowest
//! label and the partition is refined again. Every discrete partition reached
//! is a labeling, and the form is the smallest relabeled card list among
//! them. Equal lists at two leaves give an automorphism, which prunes
//! equivalent branches.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::multiplicities;
use crate::bitset::BitSet;
use crate::deck::{Deck, SymbolId};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalForm {
    /// Sorted list of cards, each a sorted list of labels `0..ℓ`.
    pub cards: Vec<Vec<u32>>,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        self.cards.first().map_or(0, Vec::len)
    }

    pub fn card_count(&self) -> usize {
        self.cards.len()
    }

    pub fn length(&self) -> usize {
        self.cards
            .iter()
            .flatten()
            .map(|&s| s as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// One card per line, labels rendered 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for card in &self.cards {
            for (i, s) in card.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}", s + 1);
            }
            out.push('\n');
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`to_text`](Self::to_text).
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_text().as_bytes());
        hash.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// The form as a deck with 1-based numeric tokens.
    pub fn to_deck(&self) -> Result<Deck> {
        let cards = self
            .cards
            .iter()
            .map(|c| c.iter().map(|&s| SymbolId(s)).collect())
            .collect();
        Deck::from_ids(cards, None)
    }
}

#[derive(Clone)]
struct Cell {
    start: u32,
    symbols: Vec<u32>,
}

struct Search<'a> {
    cards: &'a [BitSet],
    best: Option<Vec<Vec<u32>>>,
    /// When set, stop as soon as any branch beats `best`.
    stop_on_less: bool,
    beaten: bool,
    used: Vec<bool>,
    prefix: Vec<Vec<u32>>,
    /// Cards chosen so far, parallel to `prefix`.
    path: Vec<usize>,
    best_path: Option<Vec<usize>>,
    /// Card permutations found between leaves with equal lists.
    automorphisms: Vec<Vec<usize>>,
    /// Set after an automorphism is found: unwind to this depth.
    jump_to: Option<usize>,
}

const MAX_AUTOMORPHISMS: usize = 1024;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn image(card: &BitSet, cells: &[Cell]) -> Vec<u32> {
    let mut out = Vec::new();
    for cell in cells {
        let hit = cell
            .symbols
            .iter()
            .filter(|&&s| card.contains(s as usize))
            .count() as u32;
        out.extend(cell.start..cell.start + hit);
    }
    out
}

fn refine(card: &BitSet, cells: &[Cell]) -> Vec<Cell> {
    let mut out = Vec::with_capacity(cells.len() + 4);
    for cell in cells {
        let (inside, outside): (Vec<u32>, Vec<u32>) = cell
            .symbols
            .iter()
            .partition(|&&s| card.contains(s as usize));
        let split = inside.len() as u32;
        if !inside.is_empty() {
            out.push(Cell {
                start: cell.start,
                symbols: inside,
            });
        }
        if !outside.is_empty() {
            out.push(Cell {
                start: cell.start + split,
                symbols: outside,
            });
        }
    }
    out
}

/// Splits cells until every symbol in a cell meets each class of cards the
/// same number of times. Cards are classed by how many symbols they have in
/// each cell. Pieces are ordered by signature.
fn equitable(cards: &[BitSet], stars: &[Vec<usize>], mut cells: Vec<Cell>) -> Vec<Cell> {
    let mut cell_of = vec![0usize; stars.len()];
    loop {
        for (i, cell) in cells.iter().enumerate() {
            for &s in &cell.symbols {
                cell_of[s as usize] = i;
            }
        }
        let mut card_sigs: Vec<Vec<u32>> = cards
            .iter()
            .map(|card| {
                let mut counts = vec![0u32; cells.len()];
                for s in card.iter() {
                    counts[cell_of[s]] += 1;
                }
                counts
            })
            .collect();
        let mut classes = card_sigs.clone();
        classes.sort_unstable();
        classes.dedup();
        let color: Vec<usize> = card_sigs
            .drain(..)
            .map(|sig| classes.binary_search(&sig).expect("signature is listed"))
            .collect();

        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.symbols.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, u32)> = cell
                .symbols
                .iter()
                .map(|&s| {
                    let mut counts = vec![0u32; classes.len()];
                    for &c in &stars[s as usize] {
                        counts[color[c]] += 1;
                    }
                    (counts, s)
                })
                .collect();
            keyed.sort_unstable();
            let mut start = cell.start;
            let mut i = 0;
            while i < keyed.len() {
                let mut j = i + 1;
                while j < keyed.len() && keyed[j].0 == keyed[i].0 {
                    j += 1;
                }
                next.push(Cell {
                    start,
                    symbols: keyed[i..j].iter().map(|k| k.1).collect(),
                });
                start += (j - i) as u32;
                i = j;
            }
        }
        if next.len() == cells.len() {
            return cells;
        }
        cells = next;
    }
}

impl Search<'_> {
    /// With every label fixed the rest of the list is the sorted images of
    /// the unused cards.
    fn finish_discrete(&mut self, cells: &[Cell]) {
        let depth = self.path.len();
        let mut rest: Vec<(Vec<u32>, usize)> = (0..self.cards.len())
            .filter(|&ci| !self.used[ci])
            .map(|ci| (image(&self.cards[ci], cells), ci))
            .collect();
        rest.sort_unstable();
        for (img, ci) in rest {
            self.prefix.push(img);
            self.path.push(ci);
        }
        if self.stop_on_less && self.best.as_ref().is_some_and(|best| self.prefix < *best) {
            self.beaten = true;
        } else {
            self.leaf();
        }
        self.prefix.truncate(depth);
        self.path.truncate(depth);
    }

    fn compare_to_best(&self, next: &[u32]) -> Ordering {
        let Some(best) = &self.best else {
            return Ordering::Less;
        };
        let depth = self.prefix.len();
        for (mine, theirs) in self.prefix.iter().zip(best) {
            match mine.cmp(theirs) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        next.cmp(&best[depth])
    }

    fn leaf(&mut self) {
        let order = match &self.best {
            None => Ordering::Less,
            Some(best) => self.prefix.cmp(best),
        };
        match (order, &self.best_path) {
            (Ordering::Less, _) => {
                self.best = Some(self.prefix.clone());
                self.best_path = Some(self.path.clone());
            }
            (Ordering::Equal, None) => self.best_path = Some(self.path.clone()),
            (Ordering::Equal, Some(reference)) => {
                // The subtree where the two paths part is an image of
                // the one already searched.
                self.jump_to = reference.iter().zip(&self.path).position(|(a, b)| a != b);
                if self.automorphisms.len() < MAX_AUTOMORPHISMS {
                    let mut perm = vec![0; self.cards.len()];
                    for (&from, &to) in reference.iter().zip(&self.path) {
                        perm[from] = to;
                    }
                    self.automorphisms.push(perm);
                }
            }
            (Ordering::Greater, _) => {}
        }
    }

    fn descend(&mut self, cells: &[Cell]) {
        if self.prefix.len() == self.cards.len() {
            self.leaf();
            return;
        }
        if cells.iter().all(|c| c.symbols.len() == 1) {
            self.finish_discrete(cells);
            return;
        }
        let mut min_image: Option<Vec<u32>> = None;
        let mut ties = Vec::new();
        for (ci, card) in self.cards.iter().enumerate() {
            if self.used[ci] {
                continue;
            }
            let img = image(card, cells);
            match min_image.as_ref().map(|m| img.cmp(m)) {
                None | Some(Ordering::Less) => {
                    min_image = Some(img);
                    ties.clear();
                    ties.push(ci);
                }
                Some(Ordering::Equal) => ties.push(ci),
                Some(Ordering::Greater) => {}
            }
        }
        let img = min_image.expect("an unused card remains");
        match self.compare_to_best(&img) {
            Ordering::Greater => return,
            Ordering::Less if self.stop_on_less => {
                self.beaten = true;
                return;
            }
            _ => {}
        }
        self.prefix.push(img);
        let depth = self.path.len();
        let mut orbits: Vec<usize> = (0..self.cards.len()).collect();
        let mut absorbed = 0;
        let mut tried: Vec<usize> = Vec::new();
        for ci in ties {
            while absorbed < self.automorphisms.len() {
                let perm = &self.automorphisms[absorbed];
                if self.path.iter().all(|&c| perm[c] == c) {
                    for (x, &y) in perm.iter().enumerate() {
                        let (a, b) = (find(&mut orbits, x), find(&mut orbits, y));
                        if a != b {
                            orbits[a] = b;
                        }
                    }
                }
                absorbed += 1;
            }
            let root = find(&mut orbits, ci);
            if tried.iter().any(|&t| find(&mut orbits, t) == root) {
                continue;
            }
            let next = refine(&self.cards[ci], cells);
            self.used[ci] = true;
            self.path.push(ci);
            self.descend(&next);
            self.path.pop();
            self.used[ci] = false;
            tried.push(ci);
            if self.beaten {
                break;
            }
            match self.jump_to {
                Some(level) if level < depth => break,
                Some(_) => self.jump_to = None,
                None => {}
            }
        }
        self.prefix.pop();
    }
}

fn card_sets(cards: &[Vec<u32>], symbols: usize) -> Vec<BitSet> {
    cards
        .iter()
        .map(|c| BitSet::from_indices(symbols, c.iter().map(|&s| s as usize)))
        .collect()
}

fn root_cells(symbols: usize) -> Vec<Cell> {
    vec![Cell {
        start: 0,
        symbols: (0..symbols as u32).collect(),
    }]
}

/// Minimal labeling of any family of distinct cards over `0..symbols`,
/// without refinement.
#[cfg(test)]
pub(crate) fn canonical_cards(cards: &[Vec<u32>], symbols: usize) -> Vec<Vec<u32>> {
    if cards.is_empty() {
        return Vec::new();
    }
    let sets = card_sets(cards, symbols);
    let mut search = Search {
        cards: &sets,
        best: None,
        stop_on_less: false,
        beaten: false,
        used: vec![false; cards.len()],
        prefix: Vec::with_capacity(cards.len()),
        path: Vec::with_capacity(cards.len()),
        best_path: None,
        automorphisms: Vec::new(),
        jump_to: None,
    };
    search.descend(&root_cells(symbols));
    search.best.expect("search reaches at least one leaf")
}

/// Whether `cards` (a sorted list of sorted cards) equals its own canonical
/// form. Stops at the first relabeling that does better.
pub(crate) fn is_canonical(cards: &[Vec<u32>], symbols: usize) -> bool {
    if cards.is_empty() {
        return true;
    }
    let sets = card_sets(cards, symbols);
    let mut search = Search {
        cards: &sets,
        best: Some(cards.to_vec()),
        stop_on_less: true,
        beaten: false,
        used: vec![false; cards.len()],
        prefix: Vec::with_capacity(cards.len()),
        path: Vec::with_capacity(cards.len()),
        best_path: None,
        automorphisms: Vec::new(),
        jump_to: None,
    };
    search.descend(&root_cells(symbols));
    !search.beaten
}

/// Individualization-refinement search over symbol labelings.
struct Labeler<'a> {
    cards: &'a [BitSet],
    stars: Vec<Vec<usize>>,
    best: Option<Vec<Vec<u32>>>,
    /// Label of each symbol at the best leaf, and the symbols individualized
    /// on the way there.
    best_labels: Vec<u32>,
    best_seq: Vec<u32>,
    seq: Vec<u32>,
    /// Symbol permutations found between leaves with equal lists.
    automorphisms: Vec<Vec<u32>>,
    jump_to: Option<usize>,
}

impl Labeler<'_> {
    fn leaf(&mut self, cells: &[Cell]) {
        let mut labels = vec![0u32; self.stars.len()];
        for cell in cells {
            for (k, &s) in cell.symbols.iter().enumerate() {
                labels[s as usize] = cell.start + k as u32;
            }
        }
        let mut list: Vec<Vec<u32>> = self
            .cards
            .iter()
            .map(|card| {
                let mut img: Vec<u32> = card.iter().map(|s| labels[s]).collect();
                img.sort_unstable();
                img
            })
            .collect();
        list.sort_unstable();
        match self.best.as_ref().map(|b| list.cmp(b)) {
            None | Some(Ordering::Less) => {
                self.best = Some(list);
                self.best_labels = labels;
                self.best_seq = self.seq.clone();
            }
            Some(Ordering::Equal) => {
                self.jump_to = self
                    .best_seq
                    .iter()
                    .zip(&self.seq)
                    .position(|(a, b)| a != b);
                if self.automorphisms.len() < MAX_AUTOMORPHISMS {
                    let mut symbol_at = vec![0u32; labels.len()];
                    for (s, &l) in self.best_labels.iter().enumerate() {
                        symbol_at[l as usize] = s as u32;
                    }
                    self.automorphisms
                        .push(labels.iter().map(|&l| symbol_at[l as usize]).collect());
                }
            }
            Some(Ordering::Greater) => {}
        }
    }

    fn search(&mut self, cells: Vec<Cell>) {
        let Some(target) = cells.iter().position(|c| c.symbols.len() > 1) else {
            self.leaf(&cells);
            return;
        };
        let depth = self.seq.len();
        let mut orbits: Vec<usize> = (0..self.stars.len()).collect();
        let mut absorbed = 0;
        let mut tried: Vec<u32> = Vec::new();
        for &v in &cells[target].symbols {
            while absorbed < self.automorphisms.len() {
                let perm = &self.automorphisms[absorbed];
                if self.seq.iter().all(|&s| perm[s as usize] == s) {
                    for (x, &y) in perm.iter().enumerate() {
                        let (a, b) = (find(&mut orbits, x), find(&mut orbits, y as usize));
                        if a != b {
                            orbits[a] = b;
                        }
                    }
                }
                absorbed += 1;
            }
            let root = find(&mut orbits, v as usize);
            if tried.iter().any(|&t| find(&mut orbits, t as usize) == root) {
                continue;
            }
            let cell = &cells[target];
            let mut next = Vec::with_capacity(cells.len() + 1);
            next.extend_from_slice(&cells[..target]);
            next.push(Cell {
                start: cell.start,
                symbols: vec![v],
            });
            next.push(Cell {
                start: cell.start + 1,
                symbols: cell.symbols.iter().copied().filter(|&s| s != v).collect(),
            });
            next.extend_from_slice(&cells[target + 1..]);
            let next = equitable(self.cards, &self.stars, next);
            self.seq.push(v);
            self.search(next);
            self.seq.pop();
            tried.push(v);
            match self.jump_to {
                Some(level) if level < depth => return,
                Some(_) => self.jump_to = None,
                None => {}
            }
        }
    }
}

/// Canonical form with refinement; see the module documentation.
pub(crate) fn refined_cards(cards: &[Vec<u32>], symbols: usize) -> Vec<Vec<u32>> {
    if cards.is_empty() {
        return Vec::new();
    }
    let sets = card_sets(cards, symbols);
    let mut stars = vec![Vec::new(); symbols];
    for (ci, card) in cards.iter().enumerate() {
        for &s in card {
            stars[s as usize].push(ci);
        }
    }
    let root = equitable(&sets, &stars, root_cells(symbols));
    let mut labeler = Labeler {
        cards: &sets,
        stars,
        best: None,
        best_labels: Vec::new(),
        best_seq: Vec::new(),
        seq: Vec::new(),
        automorphisms: Vec::new(),
        jump_to: None,
    };
    labeler.search(root);
    labeler.best.expect("search reaches at least one leaf")
}

pub fn canonical_form(deck: &Deck) -> CanonicalForm {
    let cards: Vec<Vec<u32>> = deck
        .cards()
        .iter()
        .map(|c| c.symbols().iter().map(|s| s.0).collect())
        .collect();
    CanonicalForm {
        cards: refined_cards(&cards, deck.length()),
    }
}

/// Decks are isomorphic when a symbol bijection maps cards onto cards.
/// Decks with different shapes or multiplicity histograms are rejected
/// before any labeling search.
pub fn is_isomorphic(a: &Deck, b: &Deck) -> bool {
    if (a.order(), a.card_count(), a.length()) != (b.order(), b.card_count(), b.length()) {
        return false;
    }
    if multiplicities(a).histogram != multiplicities(b).histogram {
        return false;
    }
    canonical_form(a) == canonical_form(b)
}
