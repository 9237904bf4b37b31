use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::sample::subsequence;

use spotit_core::format::{parse_any, parse_text, render_json, render_text};
use spotit_core::{
    build_grid_blocks, build_paired, build_two_symmetric, canonical_form, check_identities,
    find_extension, is_isomorphic, is_maximal, multiplicities, partition_by_card, remove_cards,
    validate, BitSet, Deck, SymbolId,
};

fn construction() -> impl Strategy<Value = Deck> {
    prop_oneof![
        (2usize..=7).prop_map(|n| build_two_symmetric(n).unwrap()),
        prop::sample::select(vec![3usize, 4, 6]).prop_map(|n| build_paired(n).unwrap()),
        prop::sample::select(vec![
            (4usize, 2usize),
            (4, 3),
            (5, 2),
            (5, 3),
            (7, 3),
            (7, 2)
        ])
        .prop_map(|(n, k)| build_grid_blocks(n, k).unwrap()),
    ]
}

/// A construction with a random subset of cards removed, when the rest is
/// still a deck.
fn sub_deck() -> impl Strategy<Value = Deck> {
    construction().prop_flat_map(|deck| {
        let c = deck.card_count();
        subsequence((0..c).collect::<Vec<_>>(), 0..c.saturating_sub(2)).prop_map(move |drop| {
            if drop.is_empty() {
                deck.clone()
            } else {
                remove_cards(&deck, &drop).unwrap_or_else(|_| deck.clone())
            }
        })
    })
}

/// The deck with symbols relabeled by `perm` and cards listed in `order`.
fn relabel(deck: &Deck, perm: &[u32], order: &[usize]) -> Deck {
    let cards = order
        .iter()
        .map(|&i| {
            deck.cards()[i]
                .layout()
                .iter()
                .map(|s| SymbolId(perm[s.index()]))
                .collect()
        })
        .collect();
    Deck::from_ids(cards, None).unwrap()
}

fn relabeled() -> impl Strategy<Value = (Deck, Deck)> {
    sub_deck().prop_flat_map(|deck| {
        let perm: Vec<u32> = (0..deck.length() as u32).collect();
        let order: Vec<usize> = (0..deck.card_count()).collect();
        (
            Just(deck),
            Just(perm).prop_shuffle(),
            Just(order).prop_shuffle(),
        )
            .prop_map(|(d, p, o)| {
                let image = relabel(&d, &p, &o);
                (d, image)
            })
    })
}

/// Axioms checked directly on token sets.
fn naive_valid(cards: &[BTreeSet<u8>]) -> bool {
    if cards.is_empty() || cards[0].len() < 2 || cards.iter().any(|c| c.len() != cards[0].len()) {
        return false;
    }
    for (i, a) in cards.iter().enumerate() {
        for b in &cards[i + 1..] {
            if a.intersection(b).count() != 1 {
                return false;
            }
        }
    }
    let mut count: BTreeMap<u8, usize> = BTreeMap::new();
    for s in cards.iter().flatten() {
        *count.entry(*s).or_default() += 1;
    }
    count.values().all(|&m| m >= 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_ignores_labels((deck, image) in relabeled()) {
        prop_assert_eq!(canonical_form(&deck), canonical_form(&image));
        prop_assert!(is_isomorphic(&deck, &image));
    }

    #[test]
    fn canonical_form_is_a_fixed_point(deck in sub_deck()) {
        let form = canonical_form(&deck);
        let again = canonical_form(&form.to_deck().unwrap());
        prop_assert_eq!(&form, &again);
        prop_assert_eq!(form.card_count(), deck.card_count());
        prop_assert_eq!(form.length(), deck.length());
    }

    #[test]
    fn text_round_trip(deck in sub_deck()) {
        let text = render_text(&deck);
        let back = parse_text(&text).unwrap();
        prop_assert_eq!(back.token_layouts(), deck.token_layouts());
        prop_assert_eq!(render_text(&back), text);
    }

    #[test]
    fn json_round_trip(deck in sub_deck()) {
        let json = render_json(&deck, None);
        let back = parse_any(&json).unwrap();
        prop_assert!(is_isomorphic(&back, &deck));
        prop_assert_eq!(render_json(&back, None), json);
    }

    #[test]
    fn identities_hold_on_sub_decks(deck in sub_deck()) {
        prop_assert!(validate(&deck).is_valid());
        let report = check_identities(&deck);
        let failures: Vec<_> = report.failures().map(|f| f.kind).collect();
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }

    #[test]
    fn maximality_chain(deck in sub_deck()) {
        let verdict = is_maximal(&deck).unwrap();
        prop_assert!(!verdict.sufficient_corollary || verdict.prop_condition);
        prop_assert!(!verdict.prop_condition || verdict.exact);
        prop_assert_eq!(verdict.exact, verdict.extension.is_none());
        if let Some(ext) = find_extension(&deck) {
            let sum: usize = ext.symbols.iter().map(|&s| deck.multiplicity(s)).sum();
            prop_assert_eq!(sum, deck.card_count());
            for (i, &a) in ext.symbols.iter().enumerate() {
                for &b in &ext.symbols[i + 1..] {
                    prop_assert!(!deck.aligned(a, b));
                }
            }
            let bigger = deck.with_card(&ext.symbols).unwrap();
            prop_assert!(validate(&bigger).is_valid());
            // Adding a card raises the multiplicity of exactly n symbols by one.
            let before = multiplicities(&deck).total();
            prop_assert_eq!(multiplicities(&bigger).total(), before + deck.order());
        }
    }

    #[test]
    fn packs_partition_the_other_cards(deck in sub_deck(), pick in any::<prop::sample::Index>()) {
        let idx = pick.index(deck.card_count());
        let packs = partition_by_card(&deck, idx).unwrap();
        let pivot = &deck.cards()[idx];
        prop_assert_eq!(packs.len(), deck.order());
        let mut seen = BTreeSet::new();
        for (pack, &s) in packs.iter().zip(pivot.layout()) {
            prop_assert_eq!(pack.symbol, s);
            prop_assert_eq!(pack.cards.len(), deck.multiplicity(s) - 1);
            for &c in &pack.cards {
                prop_assert!(deck.cards()[c].contains(s));
                prop_assert!(seen.insert(c));
            }
        }
        prop_assert_eq!(seen.len(), deck.card_count() - 1);
        prop_assert!(!seen.contains(&idx));
    }

    #[test]
    fn validate_matches_direct_check(
        raw in prop::collection::vec(prop::collection::btree_set(0u8..8, 1..5), 1..7)
    ) {
        let cards: Vec<Vec<String>> =
            raw.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect();
        let deck = spotit_core::normalize(&cards).unwrap();
        prop_assert_eq!(validate(&deck).is_valid(), naive_valid(&raw));
    }

    #[test]
    fn bitset_matches_btreeset(
        a in prop::collection::btree_set(0usize..200, 0..40),
        b in prop::collection::btree_set(0usize..200, 0..40),
    ) {
        let x = BitSet::from_indices(200, a.iter().copied());
        let y = BitSet::from_indices(200, b.iter().copied());
        prop_assert_eq!(x.iter().collect::<Vec<_>>(), a.iter().copied().collect::<Vec<_>>());
        prop_assert_eq!(x.intersection_len(&y), a.intersection(&b).count());
        prop_assert_eq!(x.is_disjoint(&y), a.is_disjoint(&b));
        let mut u = x.clone();
        u.union_with(&y);
        prop_assert_eq!(u.len(), a.union(&b).count());
        let mut d = x.clone();
        d.difference_with(&y);
        prop_assert_eq!(d.iter().collect::<BTreeSet<_>>(), a.difference(&b).copied().collect());
    }
}
