//! Multiplicity statistics and the counting identities, bounds and
//! classification results for decks.
//!
//! Every check here is a theorem about valid decks, so on valid input every
//! check must hold. Equivalent characterizations are computed by separate
//! routes and compared; a disagreement is reported as
//! [`Error::InvariantViolation`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::constructions::{build_paired, build_two_symmetric, is_prime};
use crate::deck::{star, Deck, SymbolId};
use crate::error::{Error, Result};

fn choose2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityTable {
    /// `m(s)` indexed by symbol id.
    pub counts: Vec<usize>,
    /// Smallest multiplicity `μ`.
    pub mu: usize,
    /// Largest multiplicity `M`.
    pub cap: usize,
    /// multiplicity -> number of symbols with it
    pub histogram: BTreeMap<usize, usize>,
}

impl MultiplicityTable {
    pub fn get(&self, s: SymbolId) -> usize {
        self.counts[s.index()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_uniform(&self) -> bool {
        self.histogram.len() == 1
    }
}

pub fn multiplicities(deck: &Deck) -> MultiplicityTable {
    let counts: Vec<usize> = deck.symbols().map(|s| deck.multiplicity(s)).collect();
    let mut histogram = BTreeMap::new();
    for &m in &counts {
        *histogram.entry(m).or_insert(0) += 1;
    }
    MultiplicityTable {
        mu: counts.iter().copied().min().unwrap_or(0),
        cap: counts.iter().copied().max().unwrap_or(0),
        counts,
        histogram,
    }
}

/// `n² − n + 1`, the card and symbol count of a projective plane whose lines
/// carry `n` points.
pub fn fundamental_number(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "order must be at least 2, got {n}"
        )));
    }
    Ok(n * n - n + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    /// Σ_{s∈C} m(s) = c + n − 1 on every card.
    CardSum,
    /// Σ_s m(s) = c·n.
    TotalSum,
    /// Σ_s m(s)² = c(c + n − 1).
    SquareSum,
    /// m(s) ≤ n.
    MultiplicityAtMostOrder,
    /// m(s)(n − 1) ≤ ℓ − 1.
    MultiplicityStarBound,
    /// The star of s spans m(s)(n − 1) + 1 symbols.
    StarSize,
    /// c·C(n,2) ≤ C(ℓ,2).
    PairCount,
    /// c ≤ ℓ.
    CardsAtMostLength,
    /// μℓ ≤ cn ≤ Mℓ.
    MeanBounds,
    /// cn/ℓ ≤ (c + n − 1)/n, with equality exactly for single-multiplicity decks.
    MeanInequality,
    /// n + 1 ≤ n(μ − 1) + 1 ≤ c ≤ n(M − 1) + 1 ≤ Δₙ.
    CardChain,
    /// c ≤ n(M − 1) + 1 ≤ M(n − 1) + 1 ≤ ℓ.
    LengthChain,
    /// Some multiplicity is shared by at least n + 1 symbols.
    CommonMultiplicity,
    /// A symbol of multiplicity n forces ℓ = Δₙ.
    FullMultiplicityLength,
    /// ℓ > Δₙ forces every symbol to have a non-aligned partner.
    LongDeckUnaligned,
    /// M(n − 1) + 1 = ℓ ⇔ M = n ⇔ some symbol is aligned to all others.
    FullAlignment,
    /// c ≥ n² − 2n + 2 puts a multiplicity-n symbol on every card.
    DenseDeckFullSymbol,
    /// All m(s) = M ⇔ cn = ℓM ⇔ c = n(M − 1) + 1 ⇔ some card has only multiplicity-M symbols.
    SymmetricCharacterisation,
    /// Symmetric decks have ℓ ≤ Δₙ.
    SymmetricLength,
    /// M-symmetric: C(ℓ,2) − c·C(n,2) = ((ℓ − c) − (n − M))·ℓ/2.
    SymmetricPairRelation,
    /// M-symmetric decks of order n need n² ≡ n (mod M).
    Idempotency,
    /// c = Δₙ ⇔ n-symmetric ⇔ every symbol pair aligned ⇔ c·C(n,2) = C(ℓ,2).
    PairedCharacterisation,
    /// With exactly two multiplicities μ < M, the per-card counts n_μ and n_M
    /// follow closed formulas independent of the card.
    TwoMultiplicitySplit,
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).ok();
        match name.as_ref().and_then(|v| v.as_str()) {
            Some(s) => f.write_str(s),
            None => fmt::Debug::fmt(self, f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub kind: IdentityKind,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    /// Σ_{s∈C} m(s) for each card, in deck order.
    pub card_sums: Vec<usize>,
    pub sum_of_squares: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn get(&self, kind: IdentityKind) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.kind == kind)
    }
}

struct Checks(Vec<IdentityCheck>);

impl Checks {
    fn push(&mut self, kind: IdentityKind, holds: bool, witness: impl FnOnce() -> String) {
        let witness = (!holds).then(witness);
        self.0.push(IdentityCheck {
            kind,
            holds,
            witness,
        });
    }

    /// Records the first failing item of a per-element check.
    fn push_first<T>(
        &mut self,
        kind: IdentityKind,
        mut items: impl Iterator<Item = T>,
        ok: impl Fn(&T) -> bool,
        describe: impl Fn(&T) -> String,
    ) {
        let bad = items.find(|t| !ok(t));
        self.0.push(IdentityCheck {
            kind,
            holds: bad.is_none(),
            witness: bad.as_ref().map(describe),
        });
    }
}

/// Per-card counts of the two multiplicities `(n_μ(C), n_M(C))`.
fn split_counts(
    deck: &Deck,
    table: &MultiplicityTable,
    mu: usize,
    cap: usize,
) -> Vec<(usize, usize)> {
    deck.cards()
        .iter()
        .map(|card| {
            let low = card
                .symbols()
                .iter()
                .filter(|&&s| table.get(s) == mu)
                .count();
            let high = card
                .symbols()
                .iter()
                .filter(|&&s| table.get(s) == cap)
                .count();
            (low, high)
        })
        .collect()
}

/// Closed-form `(n_μ, n_M)`; `None` when a quotient is not a non-negative integer.
fn split_formula(n: usize, c: usize, mu: usize, cap: usize) -> Option<(usize, usize)> {
    let (n, c, mu, cap) = (n as i64, c as i64, mu as i64, cap as i64);
    let gap = cap - mu;
    if gap <= 0 {
        return None;
    }
    let low_num = cap * n - c - n + 1;
    let high_num = c + n - 1 - mu * n;
    if low_num < 0 || high_num < 0 || low_num % gap != 0 || high_num % gap != 0 {
        return None;
    }
    Some(((low_num / gap) as usize, (high_num / gap) as usize))
}

fn all_pairs_aligned(deck: &Deck) -> bool {
    let others = deck.length().saturating_sub(1);
    deck.symbols().all(|s| deck.aligned_with(s).len() == others)
}

/// Evaluates every identity and bound on `deck`. Intended for valid decks;
/// on invalid input the report simply records which checks fail.
pub fn check_identities(deck: &Deck) -> IdentityReport {
    use IdentityKind::*;

    let table = multiplicities(deck);
    let n = deck.order();
    let c = deck.card_count();
    let l = deck.length();
    let (mu, cap) = (table.mu, table.cap);
    let delta = n * n - n + 1;

    let card_sums: Vec<usize> = deck
        .cards()
        .iter()
        .map(|card| card.symbols().iter().map(|&s| table.get(s)).sum())
        .collect();
    let sum_of_squares: usize = table.counts.iter().map(|m| m * m).sum();

    let mut checks = Checks(Vec::new());

    checks.push_first(
        CardSum,
        card_sums.iter().enumerate(),
        |(_, &sum)| sum == c + n - 1,
        |(ci, sum)| format!("card {ci}: sum {sum} != {}", c + n - 1),
    );
    checks.push(TotalSum, table.total() == c * n, || {
        format!("{} != {}", table.total(), c * n)
    });
    checks.push(SquareSum, sum_of_squares == c * (c + n - 1), || {
        format!("{sum_of_squares} != {}", c * (c + n - 1))
    });
    checks.push_first(
        MultiplicityAtMostOrder,
        deck.symbols(),
        |&s| table.get(s) <= n,
        |s| format!("m({s}) = {} > {n}", table.get(*s)),
    );
    checks.push_first(
        MultiplicityStarBound,
        deck.symbols(),
        |&s| table.get(s) * (n - 1) < l,
        |s| {
            format!(
                "m({s})·(n−1) = {} > ℓ−1 = {}",
                table.get(*s) * (n - 1),
                l - 1
            )
        },
    );
    checks.push_first(
        StarSize,
        deck.symbols()
            .map(|s| (s, star(deck, s).map(|st| st.symbol_count).unwrap_or(0))),
        |&(s, size)| size == table.get(s) * (n - 1) + 1,
        |(s, size)| format!("star of {s} spans {size} symbols"),
    );
    checks.push(PairCount, c * choose2(n) <= choose2(l), || {
        format!("c·C(n,2) = {} > C(ℓ,2) = {}", c * choose2(n), choose2(l))
    });
    checks.push(CardsAtMostLength, c <= l, || format!("c = {c} > ℓ = {l}"));
    checks.push(MeanBounds, mu * l <= c * n && c * n <= cap * l, || {
        format!("μℓ = {}, cn = {}, Mℓ = {}", mu * l, c * n, cap * l)
    });
    // cn/ℓ ≤ (c+n−1)/n, cross-multiplied.
    let lhs = c * n * n;
    let rhs = l * (c + n - 1);
    checks.push(
        MeanInequality,
        lhs <= rhs && ((lhs == rhs) == table.is_uniform()),
        || {
            format!(
                "cn² = {lhs}, ℓ(c+n−1) = {rhs}, uniform = {}",
                table.is_uniform()
            )
        },
    );
    let chain = [
        n + 1,
        n * (mu.max(1) - 1) + 1,
        c,
        n * (cap.max(1) - 1) + 1,
        delta,
    ];
    checks.push(CardChain, chain.windows(2).all(|w| w[0] <= w[1]), || {
        format!("{chain:?}")
    });
    let chain = [c, n * (cap.max(1) - 1) + 1, cap * (n - 1) + 1, l];
    checks.push(LengthChain, chain.windows(2).all(|w| w[0] <= w[1]), || {
        format!("{chain:?}")
    });
    let widest = table.histogram.values().copied().max().unwrap_or(0);
    checks.push(CommonMultiplicity, widest > n, || {
        format!(
            "largest multiplicity class has {widest} symbols, need {}",
            n + 1
        )
    });
    let has_full = table.counts.contains(&n);
    checks.push(FullMultiplicityLength, !has_full || l == delta, || {
        format!("multiplicity {n} present but ℓ = {l} != Δ = {delta}")
    });
    let long_ok = l <= delta
        || (deck.symbols().all(|s| deck.aligned_with(s).len() + 1 < l)
            && c * choose2(n) < choose2(l));
    checks.push(LongDeckUnaligned, long_ok, || {
        format!("ℓ = {l} > Δ = {delta}")
    });

    let star_full = cap * (n - 1) + 1 == l;
    let cap_full = cap == n;
    let some_universal = deck.symbols().any(|s| deck.aligned_with(s).len() + 1 == l);
    checks.push(
        FullAlignment,
        star_full == cap_full && cap_full == some_universal,
        || format!("M(n−1)+1=ℓ: {star_full}, M=n: {cap_full}, universal symbol: {some_universal}"),
    );
    let dense = c + 2 * n >= n * n + 2;
    checks.push_first(
        DenseDeckFullSymbol,
        deck.cards().iter().enumerate(),
        |(_, card)| !dense || card.symbols().iter().any(|&s| table.get(s) == n),
        |(ci, _)| format!("card {ci} has no symbol of multiplicity {n}"),
    );

    let uniform = table.is_uniform();
    let by_total = c * n == l * cap;
    let by_cards = c == n * (cap.max(1) - 1) + 1;
    let by_card = deck
        .cards()
        .iter()
        .any(|card| card.symbols().iter().all(|&s| table.get(s) == cap));
    checks.push(
        SymmetricCharacterisation,
        uniform == by_total && by_total == by_cards && by_cards == by_card,
        || format!("uniform {uniform}, cn=ℓM {by_total}, c=n(M−1)+1 {by_cards}, card {by_card}"),
    );
    checks.push(SymmetricLength, !uniform || l <= delta, || {
        format!("symmetric with ℓ = {l} > Δ = {delta}")
    });
    let pair_gap = 2 * (choose2(l) as i64 - (c * choose2(n)) as i64);
    let pair_formula = ((l as i64 - c as i64) - (n as i64 - cap as i64)) * l as i64;
    checks.push(
        SymmetricPairRelation,
        !uniform || pair_gap == pair_formula,
        || format!("2(C(ℓ,2) − cC(n,2)) = {pair_gap} != {pair_formula}"),
    );
    checks.push(
        Idempotency,
        !uniform || cap == 0 || (n * n) % cap == n % cap,
        || format!("{n}² ≢ {n} (mod {cap})"),
    );

    let full_count = c == delta;
    let n_symmetric = uniform && cap == n;
    let aligned = all_pairs_aligned(deck);
    let pair_eq = c * choose2(n) == choose2(l);
    checks.push(
        PairedCharacterisation,
        full_count == n_symmetric && n_symmetric == aligned && aligned == pair_eq,
        || format!("c=Δ {full_count}, n-symmetric {n_symmetric}, aligned {aligned}, pair count {pair_eq}"),
    );

    if table.histogram.len() == 2 {
        let formula = split_formula(n, c, mu, cap);
        let direct = split_counts(deck, &table, mu, cap);
        let bad = direct.iter().position(|&d| Some(d) != formula);
        checks.push(TwoMultiplicitySplit, bad.is_none(), || match bad {
            Some(ci) => format!("card {ci}: direct {:?}, formula {formula:?}", direct[ci]),
            None => String::new(),
        });
    }

    IdentityReport {
        card_sums,
        sum_of_squares,
        checks: checks.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthVsDelta {
    Less,
    Equal,
    /// Would settle the open question on decks longer than `Δₙ`.
    Greater,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub fundamental_number: usize,
    /// `Some(M)` when every symbol has multiplicity `M`.
    pub symmetric: Option<usize>,
    pub paired: bool,
    pub length_vs_delta: LengthVsDelta,
    /// `(n_μ, n_M)` when exactly two multiplicities occur.
    pub two_mult_split: Option<(usize, usize)>,
}

impl Classification {
    pub fn is_symmetric(&self) -> bool {
        self.symmetric.is_some()
    }
}

/// Classifies a valid deck, computing each property through independent
/// characterizations and failing if they disagree.
pub fn classify(deck: &Deck) -> Result<Classification> {
    let table = multiplicities(deck);
    let n = deck.order();
    let c = deck.card_count();
    let l = deck.length();
    let cap = table.cap;
    let delta = fundamental_number(n)?;

    let uniform = table.is_uniform();
    let by_total = c * n == l * cap;
    let by_cards = c == n * (cap - 1) + 1;
    if uniform != by_total || uniform != by_cards {
        return Err(Error::InvariantViolation(format!(
            "symmetry tests disagree: uniform {uniform}, cn=ℓM {by_total}, c=n(M−1)+1 {by_cards}"
        )));
    }

    let aligned = all_pairs_aligned(deck);
    let pair_eq = c * choose2(n) == choose2(l);
    if aligned != pair_eq {
        return Err(Error::InvariantViolation(format!(
            "paired tests disagree: all aligned {aligned}, c·C(n,2)=C(ℓ,2) {pair_eq}"
        )));
    }
    if aligned && !(uniform && cap == n && c == delta && l == delta) {
        return Err(Error::InvariantViolation(
            "paired deck is not n-symmetric with c = ℓ = Δₙ".into(),
        ));
    }

    let two_mult_split = if table.histogram.len() == 2 {
        let mu = table.mu;
        let formula = split_formula(n, c, mu, cap).ok_or_else(|| {
            Error::InvariantViolation(format!(
                "two-multiplicity split is not integral for n={n}, c={c}, μ={mu}, M={cap}"
            ))
        })?;
        if formula.0 + formula.1 != n {
            return Err(Error::InvariantViolation(format!(
                "split {formula:?} does not sum to {n}"
            )));
        }
        if let Some((ci, d)) = split_counts(deck, &table, mu, cap)
            .into_iter()
            .enumerate()
            .find(|(_, d)| *d != formula)
        {
            return Err(Error::InvariantViolation(format!(
                "card {ci} has split {d:?}, formula gives {formula:?}"
            )));
        }
        Some(formula)
    } else {
        None
    };

    Ok(Classification {
        fundamental_number: delta,
        symmetric: uniform.then_some(cap),
        paired: aligned,
        length_vs_delta: match l.cmp(&delta) {
            std::cmp::Ordering::Less => LengthVsDelta::Less,
            std::cmp::Ordering::Equal => LengthVsDelta::Equal,
            std::cmp::Ordering::Greater => LengthVsDelta::Greater,
        },
        two_mult_split,
    })
}

fn chosen_cards(deck: &Deck, card_indices: &[usize]) -> Result<BitSet> {
    let mut chosen = BitSet::with_capacity(deck.card_count());
    for &ci in card_indices {
        deck.card(ci)?;
        if chosen.contains(ci) {
            return Err(Error::Precondition(format!("card {ci} listed twice")));
        }
        chosen.insert(ci);
    }
    Ok(chosen)
}

/// How many of the chosen cards carry each symbol.
fn counts_on(deck: &Deck, chosen: &BitSet) -> Vec<usize> {
    deck.symbols()
        .map(|s| deck.star_set(s).intersection_len(chosen))
        .collect()
}

/// Among `kn + 2` cards of a deck, returns the smallest symbol lying on at
/// least `k + 2` of them.
pub fn check_kn2_lemma(deck: &Deck, card_indices: &[usize], k: usize) -> Result<SymbolId> {
    let n = deck.order();
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let want = k * n + 2;
    if want > deck.card_count() {
        return Err(Error::Precondition(format!(
            "k = {k} needs {want} cards but the deck has {}",
            deck.card_count()
        )));
    }
    if card_indices.len() != want {
        return Err(Error::Precondition(format!(
            "expected {want} cards for k = {k}, got {}",
            card_indices.len()
        )));
    }
    let chosen = chosen_cards(deck, card_indices)?;
    counts_on(deck, &chosen)
        .iter()
        .position(|&m| m >= k + 2)
        .map(SymbolId::from)
        .ok_or_else(|| {
            Error::InvariantViolation(format!("no symbol on {} of the chosen cards", k + 2))
        })
}

/// Among `n + 1` cards of a deck of order `n ≥ 4` that is not 2-symmetric,
/// returns `(a symbol on at least three of them, a symbol on exactly one)`.
pub fn find_common_triple(deck: &Deck, card_indices: &[usize]) -> Result<(SymbolId, SymbolId)> {
    let n = deck.order();
    if n < 4 {
        return Err(Error::Unsupported(format!(
            "order {n} < 4 has no guaranteed triple"
        )));
    }
    let table = multiplicities(deck);
    if table.is_uniform() && table.cap == 2 {
        return Err(Error::Unsupported(
            "2-symmetric decks have no guaranteed triple".into(),
        ));
    }
    if card_indices.len() != n + 1 {
        return Err(Error::Precondition(format!(
            "expected {} cards, got {}",
            n + 1,
            card_indices.len()
        )));
    }
    let chosen = chosen_cards(deck, card_indices)?;
    let counts = counts_on(deck, &chosen);
    let triple = counts.iter().position(|&m| m >= 3);
    let single = counts.iter().position(|&m| m == 1);
    match (triple, single) {
        (Some(t), Some(s)) => Ok((SymbolId::from(t), SymbolId::from(s))),
        _ => Err(Error::InvariantViolation(format!(
            "chosen cards lack a triple or a lone symbol: triple {triple:?}, single {single:?}"
        ))),
    }
}

/// Orders `n` in `range` with `n² ≡ n (mod modulus)`: the only orders in
/// which a `modulus`-symmetric deck can exist.
///
/// Panics if `modulus` is zero.
pub fn idempotent_orders(modulus: usize, range: RangeInclusive<usize>) -> Vec<usize> {
    assert!(modulus > 0, "modulus must be positive");
    range
        .filter(|&n| ((n % modulus) * (n.saturating_sub(1) % modulus)).is_multiple_of(modulus))
        .collect()
}

fn sum_of_two_squares(x: usize) -> bool {
    (0..).take_while(|a| a * a <= x).any(|a| {
        let rest = x - a * a;
        let b = (rest as f64).sqrt() as usize;
        (b.saturating_sub(1)..=b + 1).any(|b| b * b == rest)
    })
}

/// Whether the plane order `N = n − 1` is ruled out by the Bruck–Ryser
/// condition: `N ≡ 1, 2 (mod 4)` and `N` not a sum of two squares.
pub fn bruck_ryser_excluded(n: usize) -> bool {
    if n < 3 {
        return false;
    }
    let plane = n - 1;
    matches!(plane % 4, 1 | 2) && !sum_of_two_squares(plane)
}

/// Orders with no paired deck that Bruck–Ryser does not rule out
/// (order 11: there is no projective plane of order 10).
const KNOWN_NONEXISTENT: &[usize] = &[11];

#[derive(Debug, Clone)]
pub enum PairedExistence {
    /// A witness deck built here.
    Exists(Deck),
    ExcludedBruckRyser,
    ExcludedKnown,
    /// No construction in this crate and no exclusion; this includes
    /// prime-power plane orders, which exist but are not built here.
    Unknown,
}

impl PairedExistence {
    pub fn label(&self) -> &'static str {
        match self {
            PairedExistence::Exists(_) => "exists",
            PairedExistence::ExcludedBruckRyser => "excluded (Bruck-Ryser)",
            PairedExistence::ExcludedKnown => "excluded (known result)",
            PairedExistence::Unknown => "unknown",
        }
    }
}

pub fn paired_existence(n: usize) -> Result<PairedExistence> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "order must be at least 2, got {n}"
        )));
    }
    if n == 2 {
        return Ok(PairedExistence::Exists(build_two_symmetric(2)?));
    }
    if is_prime(n - 1) {
        return Ok(PairedExistence::Exists(build_paired(n)?));
    }
    if bruck_ryser_excluded(n) {
        return Ok(PairedExistence::ExcludedBruckRyser);
    }
    if KNOWN_NONEXISTENT.contains(&n) {
        return Ok(PairedExistence::ExcludedKnown);
    }
    Ok(PairedExistence::Unknown)
}
