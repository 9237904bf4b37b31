//! Deck families with explicit constructions.
//!
//! Grid decks use a `q × q` grid of symbols, `q = n − 1`, with grid symbol
//! `G[r][col] = r·q + col`. A block is a parallel class of `q` lines of the
//! affine grid: rows, columns, or the lines of slope `k` whose card `j` is
//! `{G[r][(j + k·r) mod q] : r}`. Each block gets one extra symbol shared by
//! its `q` cards; block symbols are numbered after the grid, in block order.
//! With all `q + 1` blocks a final pivot card joins the block symbols.

use std::fmt;

use serde::Serialize;

use crate::deck::{validate, Deck, SymbolId, Violation};
use crate::error::{Error, Result};

pub(crate) fn is_prime(x: usize) -> bool {
    x >= 2
        && (2..)
            .take_while(|d| d * d <= x)
            .all(|d| !x.is_multiple_of(d))
}

pub(crate) fn smallest_prime_factor(x: usize) -> Option<usize> {
    (2..=x).find(|&d| x.is_multiple_of(d))
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deck of order `n` on `n + 1` cards where every pair of cards gets its own
/// symbol. Card `i` carries the symbols of the pairs `{i, j}`, `j ≠ i`.
#[allow(clippy::needless_range_loop)]
pub fn build_two_symmetric(n: usize) -> Result<Deck> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "order must be at least 2, got {n}"
        )));
    }
    let cards = n + 1;
    // Pair {i, j} with i < j gets the next id in row-major order of the upper triangle.
    let mut pair_id = vec![vec![SymbolId(0); cards]; cards];
    let mut next = 0u32;
    for i in 0..cards {
        for j in i + 1..cards {
            let id = SymbolId(next);
            pair_id[i][j] = id;
            pair_id[j][i] = id;
            next += 1;
        }
    }
    let rows = (0..cards)
        .map(|i| {
            (0..cards)
                .filter(|&j| j != i)
                .map(|j| pair_id[i][j])
                .collect()
        })
        .collect();
    Deck::from_ids(rows, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Block {
    Rows,
    Columns,
    /// Lines `col = j + k·r (mod q)`.
    Slope(usize),
}

impl Block {
    /// Column step per row; rows have none.
    fn step(self) -> Option<usize> {
        match self {
            Block::Rows => None,
            Block::Columns => Some(0),
            Block::Slope(k) => Some(k),
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Rows => f.write_str("rows"),
            Block::Columns => f.write_str("columns"),
            Block::Slope(k) => write!(f, "slope {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridBlockSpec {
    /// Grid side `q = n − 1`.
    pub q: usize,
    pub blocks: Vec<Block>,
    pub with_pivot: bool,
}

impl GridBlockSpec {
    /// Rows, columns, then slopes `1..=k−2`.
    pub fn consecutive(n: usize, k: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Precondition(format!(
                "grid decks need order at least 3, got {n}"
            )));
        }
        let q = n - 1;
        if !(2..=q + 1).contains(&k) {
            return Err(Error::Precondition(format!(
                "block count {k} outside 2..={}",
                q + 1
            )));
        }
        let mut blocks = vec![Block::Rows, Block::Columns];
        blocks.extend((1..k - 1).map(Block::Slope));
        Ok(GridBlockSpec {
            q,
            blocks,
            with_pivot: false,
        })
    }

    pub fn with_pivot(mut self) -> Self {
        self.with_pivot = true;
        self
    }

    pub fn order(&self) -> usize {
        self.q + 1
    }

    /// Cards of different blocks meet exactly once iff every slope and every
    /// slope difference is a unit mod `q` (columns count as slope 0, rows
    /// meet everything once).
    pub fn check(&self) -> Result<()> {
        let q = self.q;
        if q < 2 {
            return Err(Error::Precondition(format!(
                "grid side must be at least 2, got {q}"
            )));
        }
        if self.blocks.len() < 2 {
            return Err(Error::Precondition(
                "at least two blocks are required".into(),
            ));
        }
        for (i, a) in self.blocks.iter().enumerate() {
            if self.blocks[..i].contains(a) {
                return Err(Error::Precondition(format!("block {a} listed twice")));
            }
            if let Block::Slope(k) = *a {
                if !(1..q).contains(&k) {
                    return Err(Error::Precondition(format!("slope {k} outside 1..{q}")));
                }
            }
        }
        let steps: Vec<(Block, usize)> = self
            .blocks
            .iter()
            .filter_map(|b| b.step().map(|s| (*b, s)))
            .collect();
        for (i, &(a, sa)) in steps.iter().enumerate() {
            for &(b, sb) in &steps[..i] {
                let diff = sa.abs_diff(sb);
                if gcd(diff, q) != 1 {
                    let slope = match (a, b) {
                        (Block::Slope(k), Block::Columns) | (Block::Columns, Block::Slope(k)) => {
                            format!("slope {k} shares a factor with {q}")
                        }
                        _ => {
                            format!("{a} and {b} differ by {diff}, which shares a factor with {q}")
                        }
                    };
                    return Err(Error::Unsupported(format!("grid blocks invalid: {slope}")));
                }
            }
        }
        if self.with_pivot && self.blocks.len() != q + 1 {
            return Err(Error::Precondition(format!(
                "a pivot card needs all {} blocks, got {}",
                q + 1,
                self.blocks.len()
            )));
        }
        Ok(())
    }
}

/// Builds the deck described by `spec`. Cards are laid out block symbol
/// first, then the grid symbols by row.
pub fn build_grid(spec: &GridBlockSpec) -> Result<Deck> {
    spec.check()?;
    let q = spec.q;
    let grid = |r: usize, col: usize| SymbolId::from(r * q + col);
    let mut cards = Vec::with_capacity(q * spec.blocks.len() + 1);
    for (b, block) in spec.blocks.iter().enumerate() {
        let marker = SymbolId::from(q * q + b);
        for j in 0..q {
            let mut card = Vec::with_capacity(q + 1);
            card.push(marker);
            match block.step() {
                None => card.extend((0..q).map(|col| grid(j, col))),
                Some(k) => card.extend((0..q).map(|r| grid(r, (j + k * r) % q))),
            }
            cards.push(card);
        }
    }
    if spec.with_pivot {
        cards.push(
            (0..spec.blocks.len())
                .map(|b| SymbolId::from(q * q + b))
                .collect(),
        );
    }
    Deck::from_ids(cards, None)
}

/// The first `k` consecutive blocks of the grid construction for order `n`.
pub fn build_grid_blocks(n: usize, k: usize) -> Result<Deck> {
    build_grid(&GridBlockSpec::consecutive(n, k)?)
}

/// A paired deck (projective plane) of order `n` for prime `n − 1`.
pub fn build_paired(n: usize) -> Result<Deck> {
    if n < 3 || !is_prime(n - 1) {
        return Err(Error::Unsupported(format!(
            "paired decks are only built for prime n − 1, got n = {n}"
        )));
    }
    build_grid(&GridBlockSpec::consecutive(n, n)?.with_pivot())
}

/// Most blocks the consecutive grid construction supports for order `n`:
/// `p + 1` for the smallest prime `p` dividing `n − 1`.
pub fn available_blocks(n: usize) -> Option<usize> {
    smallest_prime_factor(n.checked_sub(1)?).map(|p| p + 1)
}

/// Removes the listed cards. Symbols left on no card are dropped; a symbol
/// left on exactly one card makes the removal invalid.
pub fn remove_cards(deck: &Deck, indices: &[usize]) -> Result<Deck> {
    let c = deck.card_count();
    let mut drop = vec![false; c];
    for &i in indices {
        deck.card(i)?;
        drop[i] = true;
    }
    let dropped = drop.iter().filter(|&&d| d).count();
    if dropped == 0 || dropped == c {
        return Err(Error::Precondition(
            "cards to remove must be a proper nonempty subset".into(),
        ));
    }
    let keep: Vec<usize> = (0..c).filter(|&i| !drop[i]).collect();
    let rest = deck.retain_cards(&keep)?;
    let isolated: Vec<String> = validate(&rest)
        .violations
        .iter()
        .filter_map(|v| match v {
            Violation::Multiplicity { symbol, .. } => Some(rest.token(*symbol).to_string()),
            _ => None,
        })
        .collect();
    if !isolated.is_empty() {
        return Err(Error::RemovalInvalid { symbols: isolated });
    }
    Ok(rest)
}
