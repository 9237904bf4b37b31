//! Brute-force references, independent of the library's search code.
//!
//! * `brute_force_decks` lists every family of `c` distinct `n`-subsets of
//!   `0..ℓ` in lexicographic order, keeps those that satisfy the axioms, and
//!   reduces each to a canonical form by trying every symbol permutation.
//! * `brute_canonical` is that permutation minimum on its own.
//! * `star_class` identifies a deck by its stars instead: no two symbols of a
//!   deck share a star, so the deck is a set of card subsets and its class is
//!   the minimum over card permutations. Cheaper when ℓ is large.
//! * `brute_extensions` tries every `n`-subset of symbols as a new card.
//! * `closure_decks` grows partial decks one card at a time and merges them by
//!   `star_class` at every level. Far fewer labelled families than
//!   `brute_force_decks`, so it reaches order 5.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

pub type Family = Vec<Vec<u32>>;

fn subsets(universe: u32, k: usize) -> Vec<Vec<u32>> {
    fn go(start: u32, universe: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..universe {
            cur.push(s);
            go(s + 1, universe, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, universe, k, &mut Vec::new(), &mut out);
    out
}

fn shared(a: &[u32], b: &[u32]) -> usize {
    a.iter().filter(|s| b.contains(s)).count()
}

fn for_each_permutation(items: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Minimum over all `symbols!` relabelings of the sorted list of sorted cards.
pub fn brute_canonical(cards: &[Vec<u32>], symbols: usize) -> Family {
    let mut best: Option<Family> = None;
    let mut perm: Vec<u32> = (0..symbols as u32).collect();
    for_each_permutation(&mut perm, 0, &mut |p| {
        let mut img: Family = cards
            .iter()
            .map(|c| {
                let mut v: Vec<u32> = c.iter().map(|&s| p[s as usize]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        img.sort();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
    });
    best.unwrap_or_default()
}

struct Walk<'a> {
    pool: &'a [Vec<u32>],
    target: usize,
    n: usize,
    mult: Vec<usize>,
    chosen: Vec<usize>,
    found: Vec<Family>,
}

impl Walk<'_> {
    fn go(&mut self, start: usize) {
        if self.chosen.len() == self.target {
            if self.mult.iter().all(|&m| m >= 2) {
                self.found
                    .push(self.chosen.iter().map(|&i| self.pool[i].clone()).collect());
            }
            return;
        }
        // Filter that only looks at D2: the cards still to come carry
        // (target − k)·n incidences, which must cover every missing one.
        let missing: usize = self.mult.iter().map(|&m| 2usize.saturating_sub(m)).sum();
        if missing > (self.target - self.chosen.len()) * self.n {
            return;
        }
        for i in start..self.pool.len() {
            let card = &self.pool[i];
            if self
                .chosen
                .iter()
                .any(|&j| shared(&self.pool[j], card) != 1)
            {
                continue;
            }
            for &s in card {
                self.mult[s as usize] += 1;
            }
            self.chosen.push(i);
            self.go(i + 1);
            self.chosen.pop();
            for &s in card {
                self.mult[s as usize] -= 1;
            }
        }
    }
}

/// Labeled families of `c` cards over `0..ℓ` that satisfy the axioms.
/// Only families containing `{0..n}` and `{0, n..2n−1}` are listed: every
/// deck has a relabeling containing those two cards, and they are the two
/// lexicographically first cards of the pool.
pub fn brute_force_families(n: usize, c_max: usize) -> Vec<(usize, Family)> {
    let mut out = Vec::new();
    for c in 2..=c_max {
        // Every symbol needs two incidences out of c·n.
        for length in n..=c * n / 2 {
            let pool = subsets(length as u32, n);
            let mut walk = Walk {
                pool: &pool,
                target: c,
                n,
                mult: vec![0; length],
                chosen: Vec::new(),
                found: Vec::new(),
            };
            let first = (0..n as u32).collect::<Vec<_>>();
            let mut second = vec![0];
            second.extend(n as u32..(2 * n - 1) as u32);
            if second.iter().any(|&s| s as usize >= length) {
                continue;
            }
            let a = pool.iter().position(|p| *p == first).unwrap();
            let b = pool.iter().position(|p| *p == second).unwrap();
            for i in [a, b] {
                for &s in &pool[i] {
                    walk.mult[s as usize] += 1;
                }
                walk.chosen.push(i);
            }
            walk.go(b + 1);
            out.extend(walk.found.into_iter().map(|f| (length, f)));
        }
    }
    out
}

/// Every deck of order `n` with at most `c_max` cards, one canonical form
/// per isomorphism class, sorted by card count then form.
pub fn brute_force_decks(n: usize, c_max: usize) -> Vec<Family> {
    let classes: BTreeSet<(usize, Family)> = brute_force_families(n, c_max)
        .into_iter()
        .map(|(length, f)| (f.len(), brute_canonical(&f, length)))
        .collect();
    classes.into_iter().map(|(_, f)| f).collect()
}

/// Minimum over card permutations of the sorted list of (permuted) stars.
pub fn star_class(cards: &[Vec<u32>]) -> Family {
    let symbols = cards
        .iter()
        .flatten()
        .map(|&s| s as usize + 1)
        .max()
        .unwrap_or(0);
    let mut stars = vec![Vec::new(); symbols];
    for (i, card) in cards.iter().enumerate() {
        for &s in card {
            stars[s as usize].push(i as u32);
        }
    }
    let mut best: Option<Family> = None;
    let mut perm: Vec<u32> = (0..cards.len() as u32).collect();
    for_each_permutation(&mut perm, 0, &mut |p| {
        let mut img: Family = stars
            .iter()
            .map(|star| {
                let mut v: Vec<u32> = star.iter().map(|&c| p[c as usize]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        img.sort();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
    });
    best.unwrap_or_default()
}

/// Every `n`-subset of the deck's symbols that meets each card exactly once.
pub fn brute_extensions(cards: &[Vec<u32>], symbols: usize, n: usize) -> Vec<Vec<u32>> {
    subsets(symbols as u32, n)
        .into_iter()
        .filter(|cand| cards.iter().all(|c| shared(c, cand) == 1))
        .collect()
}

/// Sets of existing symbols whose stars partition `0..c`, each listed once.
fn covers(stars: &[Vec<u32>], c: usize, n: usize) -> Vec<Vec<u32>> {
    fn go(
        stars: &[Vec<u32>],
        covered: &mut Vec<bool>,
        picked: &mut Vec<u32>,
        n: usize,
        out: &mut Vec<Vec<u32>>,
    ) {
        let Some(first) = covered.iter().position(|&x| !x) else {
            out.push(picked.clone());
            return;
        };
        if picked.len() == n {
            return;
        }
        for (s, star) in stars.iter().enumerate() {
            if !star.contains(&(first as u32)) || star.iter().any(|&i| covered[i as usize]) {
                continue;
            }
            for &i in star {
                covered[i as usize] = true;
            }
            picked.push(s as u32);
            go(stars, covered, picked, n, out);
            picked.pop();
            for &i in star {
                covered[i as usize] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(stars, &mut vec![false; c], &mut Vec::new(), n, &mut out);
    out
}

/// Star classes of every deck of order `n` with at most `c_max` cards, found
/// by extending each class of partial decks (pairwise one shared symbol,
/// singletons allowed) with every possible card.
pub fn closure_decks(n: usize, c_max: usize) -> BTreeSet<(usize, Family)> {
    let mut level: BTreeMap<Family, Family> = BTreeMap::new();
    let seed: Family = vec![(0..n as u32).collect()];
    level.insert(star_class(&seed), seed);
    let mut decks = BTreeSet::new();
    for c in 1..c_max {
        let mut next = BTreeMap::new();
        for cards in level.values() {
            let symbols = cards.iter().flatten().max().map_or(0, |&s| s as usize + 1);
            let mut stars = vec![Vec::new(); symbols];
            for (i, card) in cards.iter().enumerate() {
                for &s in card {
                    stars[s as usize].push(i as u32);
                }
            }
            for mut card in covers(&stars, c, n) {
                card.extend(symbols as u32..(symbols + n - card.len()) as u32);
                let mut grown = cards.clone();
                grown.push(card);
                next.entry(star_class(&grown)).or_insert(grown);
            }
        }
        for (class, cards) in &next {
            if class.iter().all(|star| star.len() >= 2) {
                decks.insert((cards.len(), class.clone()));
            }
        }
        level = next;
    }
    decks
}
