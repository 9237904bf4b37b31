//! Isomorph-free exhaustive generation of small decks.
//!
//! Orderly generation over canonical forms (see [`crate::canon`]): cards are
//! appended in increasing lexicographic order, new symbols take the next
//! unused labels, and a partial family is kept only if it equals its own
//! canonical form. Because prefixes of canonical families are canonical,
//! every isomorphism class is reached exactly once.
//!
//! Partial families satisfy D1, D3 and D4 at every step; D2 may be pending
//! and is checked when a family is reported. Symbol multiplicities are capped
//! at the order `n`, which holds in every deck and bounds the search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{classify, multiplicities};
use crate::canon::{is_canonical, refined_cards, CanonicalForm};
use crate::error::{Error, Result};
use crate::maximality::find_extension;

/// Card sets are stored as `u64` masks.
pub const MAX_CARDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub c_max: Option<usize>,
    /// Search-tree nodes to visit before giving up.
    pub node_budget: Option<u64>,
    /// Split subtrees over the rayon pool. Output order is unaffected, but
    /// with a budget the set of visited nodes may differ between runs.
    pub parallel: bool,
}

impl EnumerateOptions {
    pub fn new() -> Self {
        EnumerateOptions {
            c_max: None,
            node_budget: None,
            parallel: false,
        }
    }

    pub fn c_max(mut self, c_max: usize) -> Self {
        self.c_max = Some(c_max);
        self
    }

    pub fn budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub order: usize,
    /// One canonical form per isomorphism class, sorted by (cards, form).
    pub decks: Vec<CanonicalForm>,
    pub nodes: u64,
    /// False when the node budget stopped the search.
    pub complete: bool,
}

#[derive(Clone)]
struct Partial {
    cards: Vec<Vec<u32>>,
    /// Card mask per symbol.
    stars: Vec<u64>,
}

impl Partial {
    fn root(n: usize) -> Self {
        Partial {
            cards: vec![(0..n as u32).collect()],
            stars: vec![1; n],
        }
    }

    fn symbols(&self) -> usize {
        self.stars.len()
    }

    fn is_deck(&self) -> bool {
        self.cards.len() >= 2 && self.stars.iter().all(|m| m.count_ones() >= 2)
    }

    fn push(&self, card: Vec<u32>) -> Partial {
        let bit = 1u64 << self.cards.len();
        let mut stars = self.stars.clone();
        for &s in &card {
            match stars.get_mut(s as usize) {
                Some(m) => *m |= bit,
                None => stars.push(bit),
            }
        }
        let mut cards = self.cards.clone();
        cards.push(card);
        Partial { cards, stars }
    }
}

struct Generator<'a> {
    n: usize,
    c_max: usize,
    budget: u64,
    nodes: &'a AtomicU64,
    stopped: &'a AtomicBool,
}

impl Generator<'_> {
    /// Counts a node; false once the budget is spent.
    fn enter(&self) -> bool {
        if self.stopped.load(Ordering::Relaxed) {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.stopped.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    /// Sets of existing symbols meeting every card exactly once, with room
    /// left under the multiplicity cap.
    fn covers(&self, p: &Partial) -> Vec<Vec<u32>> {
        let all = if p.cards.len() == 64 {
            u64::MAX
        } else {
            (1u64 << p.cards.len()) - 1
        };
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(self.n);
        self.cover_from(p, all, 0, &mut chosen, &mut out);
        out
    }

    fn cover_from(
        &self,
        p: &Partial,
        all: u64,
        covered: u64,
        chosen: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if covered == all {
            let mut x = chosen.clone();
            x.sort_unstable();
            out.push(x);
            return;
        }
        if chosen.len() == self.n {
            return;
        }
        let first = (!covered & all).trailing_zeros() as usize;
        for &s in &p.cards[first] {
            let star = p.stars[s as usize];
            if star & covered != 0 || star.count_ones() as usize >= self.n {
                continue;
            }
            chosen.push(s);
            self.cover_from(p, all, covered | star, chosen, out);
            chosen.pop();
        }
    }

    fn children(&self, p: &Partial) -> Vec<Partial> {
        if p.cards.len() >= self.c_max {
            return Vec::new();
        }
        let last = p.cards.last().expect("root has a card");
        let fresh = p.symbols() as u32;
        let mut kids = Vec::new();
        for mut card in self.covers(p) {
            let extra = (self.n - card.len()) as u32;
            card.extend(fresh..fresh + extra);
            if card <= *last {
                continue;
            }
            let child = p.push(card);
            if is_canonical(&child.cards, child.symbols()) {
                kids.push(child);
            }
        }
        kids
    }

    fn walk(&self, p: &Partial, out: &mut Vec<CanonicalForm>) {
        if !self.enter() {
            return;
        }
        if p.is_deck() {
            out.push(CanonicalForm {
                cards: p.cards.clone(),
            });
        }
        for child in self.children(p) {
            self.walk(&child, out);
        }
    }

    /// Expands breadth-first until there are enough subtrees to share out.
    /// Nodes expanded here are recorded in `out` like in [`walk`].
    fn frontier(&self, root: Partial, want: usize, out: &mut Vec<CanonicalForm>) -> Vec<Partial> {
        let mut level = vec![root];
        while level.len() < want && !level.is_empty() {
            let mut next = Vec::new();
            for p in &level {
                if !self.enter() {
                    return Vec::new();
                }
                if p.is_deck() {
                    out.push(CanonicalForm {
                        cards: p.cards.clone(),
                    });
                }
                next.extend(self.children(p));
            }
            level = next;
        }
        level
    }
}

/// All decks of order `n` up to isomorphism, as canonical forms.
pub fn enumerate_decks(n: usize, options: EnumerateOptions) -> Result<Enumeration> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "order must be at least 2, got {n}"
        )));
    }
    let delta = n * n - n + 1;
    let c_max = options.c_max.unwrap_or(delta).min(delta);
    if c_max > MAX_CARDS {
        return Err(Error::Unsupported(format!(
            "at most {MAX_CARDS} cards can be enumerated"
        )));
    }
    let nodes = AtomicU64::new(0);
    let stopped = AtomicBool::new(false);
    let gen = Generator {
        n,
        c_max,
        budget: options.node_budget.unwrap_or(u64::MAX),
        nodes: &nodes,
        stopped: &stopped,
    };

    let mut decks = Vec::new();
    let root = Partial::root(n);
    if options.parallel {
        let subtrees = gen.frontier(root, 4 * rayon::current_num_threads(), &mut decks);
        let found: Vec<Vec<CanonicalForm>> = subtrees
            .par_iter()
            .map(|p| {
                let mut out = Vec::new();
                gen.walk(p, &mut out);
                out
            })
            .collect();
        decks.extend(found.into_iter().flatten());
    } else {
        gen.walk(&root, &mut decks);
    }
    // The search keeps the plain minimal labeling; report the public form.
    let mut decks: Vec<CanonicalForm> = decks
        .into_iter()
        .map(|f| CanonicalForm {
            cards: refined_cards(&f.cards, f.length()),
        })
        .collect();
    decks.sort_by(|a, b| (a.card_count(), a).cmp(&(b.card_count(), b)));

    let complete = !stopped.load(Ordering::Relaxed);
    let nodes = nodes.load(Ordering::Relaxed).min(gen.budget);
    Ok(Enumeration {
        order: n,
        decks,
        nodes,
        complete,
    })
}

/// Outcome of searching for a deck longer than `Δₙ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthProbe {
    pub order: usize,
    pub fundamental_number: usize,
    pub nodes: u64,
    pub decks_examined: usize,
    pub longest: Option<usize>,
    /// The whole space of decks of this order was searched.
    pub exhausted: bool,
    pub witness: Option<CanonicalForm>,
}

impl fmt::Display for LengthProbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order: {}", self.order)?;
        writeln!(f, "fundamental number: {}", self.fundamental_number)?;
        writeln!(f, "nodes searched: {}", self.nodes)?;
        writeln!(f, "decks examined: {}", self.decks_examined)?;
        match self.longest {
            Some(l) => writeln!(f, "longest deck: {l}")?,
            None => writeln!(f, "longest deck: none found")?,
        }
        let status = if self.exhausted {
            "exhausted"
        } else {
            "budget-truncated"
        };
        writeln!(f, "search: {status}")?;
        match (&self.witness, self.exhausted) {
            (Some(w), _) => {
                writeln!(
                    f,
                    "!!! WITNESS: deck with length {} > {} !!!",
                    w.length(),
                    self.fundamental_number
                )?;
                write!(f, "{}", w.to_text())
            }
            (None, true) => writeln!(
                f,
                "verdict: no deck of this order is longer than {}",
                self.fundamental_number
            ),
            (None, false) => writeln!(f, "verdict: inconclusive"),
        }
    }
}

/// Searches every deck of order `n` for one with `ℓ > Δₙ`.
pub fn probe_length_conjecture(n: usize, node_budget: Option<u64>) -> Result<LengthProbe> {
    let mut options = EnumerateOptions::new();
    options.node_budget = node_budget;
    let run = enumerate_decks(n, options)?;
    let delta = n * n - n + 1;
    Ok(LengthProbe {
        order: n,
        fundamental_number: delta,
        nodes: run.nodes,
        decks_examined: run.decks.len(),
        longest: run.decks.iter().map(CanonicalForm::length).max(),
        exhausted: run.complete,
        witness: run.decks.iter().find(|d| d.length() > delta).cloned(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub order: usize,
    pub card_count: usize,
    pub length: usize,
    pub histogram: BTreeMap<usize, usize>,
    pub symmetric: bool,
    pub paired: bool,
    pub maximal: bool,
    pub digest: String,
    /// Isomorphism classes sharing this entry's `(n, c, ℓ)`.
    pub triple_classes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub triple: (usize, usize, usize),
    pub digests: Vec<String>,
    /// Number of distinct multiplicity histograms among the classes.
    pub histograms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub order: usize,
    pub complete: bool,
    pub nodes: u64,
    pub entries: Vec<CensusEntry>,
    pub collisions: Vec<Collision>,
}

pub fn census(n: usize, c_max: Option<usize>, node_budget: Option<u64>) -> Result<Census> {
    let mut options = EnumerateOptions::new();
    options.c_max = c_max;
    options.node_budget = node_budget;
    let run = enumerate_decks(n, options)?;

    let mut entries = Vec::with_capacity(run.decks.len());
    for form in &run.decks {
        let deck = form.to_deck()?;
        let class = classify(&deck)?;
        entries.push(CensusEntry {
            order: n,
            card_count: deck.card_count(),
            length: deck.length(),
            histogram: multiplicities(&deck).histogram,
            symmetric: class.is_symmetric(),
            paired: class.paired,
            maximal: find_extension(&deck).is_none(),
            digest: form.digest(),
            triple_classes: 0,
        });
    }
    let mut by_triple: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        by_triple
            .entry((e.order, e.card_count, e.length))
            .or_default()
            .push(i);
    }
    let mut collisions = Vec::new();
    for (triple, members) in &by_triple {
        for &i in members {
            entries[i].triple_classes = members.len();
        }
        if members.len() >= 2 {
            collisions.push(Collision {
                triple: *triple,
                digests: members.iter().map(|&i| entries[i].digest.clone()).collect(),
                histograms: members
                    .iter()
                    .map(|&i| &entries[i].histogram)
                    .collect::<BTreeSet<_>>()
                    .len(),
            });
        }
    }
    entries.sort_by(|a, b| {
        (a.card_count, a.length, &a.histogram, &a.digest).cmp(&(
            b.card_count,
            b.length,
            &b.histogram,
            &b.digest,
        ))
    });
    Ok(Census {
        order: n,
        complete: run.complete,
        nodes: run.nodes,
        entries,
        collisions,
    })
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.complete {
            "exhausted"
        } else {
            "budget-truncated (incomplete)"
        };
        writeln!(
            f,
            "census of order {}: {} classes, {} nodes, {status}",
            self.order,
            self.entries.len(),
            self.nodes
        )?;
        writeln!(
            f,
            "{:>3} {:>3} {:>3}  {:<20} {:<9} {:<6} {:<7} {:<16} same-triple",
            "n", "c", "l", "histogram", "symmetric", "paired", "maximal", "digest"
        )?;
        for e in &self.entries {
            let hist = e
                .histogram
                .iter()
                .map(|(m, k)| format!("{m}:{k}"))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(
                f,
                "{:>3} {:>3} {:>3}  {:<20} {:<9} {:<6} {:<7} {:<16} {}",
                e.order,
                e.card_count,
                e.length,
                hist,
                e.symmetric,
                e.paired,
                e.maximal,
                e.digest,
                e.triple_classes
            )?;
        }
        if self.collisions.is_empty() {
            writeln!(f, "collisions: none in the searched space")
        } else {
            writeln!(f, "collisions:")?;
            for c in &self.collisions {
                let (n, cards, l) = c.triple;
                let kind = match c.histograms {
                    1 => "same histogram".to_string(),
                    k => format!("{k} distinct histograms"),
                };
                writeln!(
                    f,
                    "  (n={n}, c={cards}, l={l}): {} classes, {kind}: {}",
                    c.digests.len(),
                    c.digests.join(" ")
                )?;
            }
            Ok(())
        }
    }
}
