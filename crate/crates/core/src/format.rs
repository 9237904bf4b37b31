//! Deck file formats.
//!
//! The text format is one card per line with whitespace-separated tokens;
//! blank lines and lines starting with `#` are skipped. Rendering keeps each
//! card's layout, so text output reproduces figure-style listings.
//!
//! The JSON format has a fixed key order and sorts symbols within cards
//! (by symbol id) and cards among themselves, so its output is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{check_identities, classify, multiplicities, Classification, IdentityReport};
use crate::deck::{normalize, validate, Deck, Violation};
use crate::error::{Error, Result};
use crate::maximality::{is_maximal, MaximalityVerdict};

pub fn parse_text(input: &str) -> Result<Deck> {
    let rows: Vec<Vec<&str>> = input
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect())
        .collect();
    if rows.is_empty() {
        return Err(Error::Parse("no cards found".into()));
    }
    normalize(&rows)
}

pub fn render_text(deck: &Deck) -> String {
    let mut out = String::new();
    for row in deck.token_layouts() {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolCount {
    pub symbol: String,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityJson {
    pub mu: usize,
    pub cap: usize,
    pub histogram: BTreeMap<usize, usize>,
    pub symbols: Vec<SymbolCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalityJson {
    pub sufficient_corollary: bool,
    pub prop_condition: bool,
    pub exact: bool,
    pub extension: Option<Vec<String>>,
}

impl MaximalityJson {
    pub fn new(deck: &Deck, verdict: &MaximalityVerdict) -> Self {
        MaximalityJson {
            sufficient_corollary: verdict.sufficient_corollary,
            prop_condition: verdict.prop_condition,
            exact: verdict.exact,
            extension: verdict.extension.as_ref().map(|e| {
                e.symbols
                    .iter()
                    .map(|&s| deck.token(s).to_string())
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportJson {
    pub valid: bool,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<MultiplicityJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identities: Option<IdentityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximality: Option<MaximalityJson>,
}

impl ReportJson {
    /// Validation only.
    pub fn validation(deck: &Deck) -> Self {
        let result = validate(deck);
        ReportJson {
            valid: result.is_valid(),
            violations: result.violations,
            multiplicities: None,
            identities: None,
            classification: None,
            maximality: None,
        }
    }

    /// Validation plus, for valid decks, every analysis.
    pub fn full(deck: &Deck) -> Result<Self> {
        let mut report = Self::validation(deck);
        if !report.valid {
            return Ok(report);
        }
        let table = multiplicities(deck);
        report.multiplicities = Some(MultiplicityJson {
            mu: table.mu,
            cap: table.cap,
            symbols: deck
                .symbols()
                .map(|s| SymbolCount {
                    symbol: deck.token(s).to_string(),
                    multiplicity: table.get(s),
                })
                .collect(),
            histogram: table.histogram,
        });
        report.identities = Some(check_identities(deck));
        report.classification = Some(classify(deck)?);
        report.maximality = Some(MaximalityJson::new(deck, &is_maximal(deck)?));
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckJson {
    pub order: usize,
    pub card_count: usize,
    pub length: usize,
    pub cards: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none", skip_deserializing)]
    pub report: Option<ReportJson>,
}

impl DeckJson {
    /// Tokens within a card and cards within the deck are sorted, shorter
    /// tokens first, so numeric names come out in numeric order.
    pub fn new(deck: &Deck, report: Option<ReportJson>) -> Self {
        let key = |t: &String| (t.len(), t.clone());
        let mut cards: Vec<Vec<String>> = deck
            .token_layouts()
            .into_iter()
            .map(|card| {
                let mut card: Vec<String> = card.into_iter().map(String::from).collect();
                card.sort_by_key(key);
                card
            })
            .collect();
        cards.sort_by(|a, b| a.iter().map(key).cmp(b.iter().map(key)));
        DeckJson {
            order: deck.order(),
            card_count: deck.card_count(),
            length: deck.length(),
            cards,
            report,
        }
    }

    pub fn to_deck(&self) -> Result<Deck> {
        normalize(&self.cards)
    }
}

pub fn render_json(deck: &Deck, report: Option<ReportJson>) -> String {
    let mut out = serde_json::to_string_pretty(&DeckJson::new(deck, report))
        .expect("deck JSON is always serializable");
    out.push('\n');
    out
}

pub fn parse_json(input: &str) -> Result<Deck> {
    let parsed: DeckJson = serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
    parsed.to_deck()
}

/// JSON when the input starts with `{`, text otherwise.
pub fn parse_any(input: &str) -> Result<Deck> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FANO: &str = "# Fano plane\n5 1 2\n5 3 4\n\n6 1 3\n6 2 4\n7 1 4\n7 2 3\n5 6 7\n";

    #[test]
    fn text_round_trip_keeps_layout() {
        let deck = parse_text(FANO).unwrap();
        assert_eq!((deck.order(), deck.card_count(), deck.length()), (3, 7, 7));
        let text = render_text(&deck);
        assert_eq!(text, "5 1 2\n5 3 4\n6 1 3\n6 2 4\n7 1 4\n7 2 3\n5 6 7\n");
        assert_eq!(render_text(&parse_text(&text).unwrap()), text);
    }

    #[test]
    fn empty_and_malformed_text() {
        assert!(matches!(parse_text("# nothing\n\n"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_text("a a b\n"),
            Err(Error::MalformedCard { .. })
        ));
    }

    #[test]
    fn json_is_sorted_and_parses_back() {
        let deck = parse_text(FANO).unwrap();
        let json = render_json(&deck, None);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["order"], 3);
        assert_eq!(value["cards"][0], serde_json::json!(["1", "2", "5"]));
        assert_eq!(value["cards"][2], serde_json::json!(["1", "4", "7"]));
        assert_eq!(value["cards"][6], serde_json::json!(["5", "6", "7"]));
        let keys: Vec<&str> = json
            .lines()
            .filter_map(|l| l.strip_prefix("  \""))
            .map(|l| l.split('"').next().unwrap())
            .collect();
        assert_eq!(keys, ["order", "card_count", "length", "cards"]);
        let back = parse_any(&json).unwrap();
        assert_eq!(render_json(&back, None), json);
    }

    #[test]
    fn full_report_on_fano() {
        let deck = parse_text(FANO).unwrap();
        let report = ReportJson::full(&deck).unwrap();
        assert!(report.valid);
        assert!(report.identities.as_ref().unwrap().all_hold());
        assert_eq!(report.classification.as_ref().unwrap().symmetric, Some(3));
        assert!(report.maximality.as_ref().unwrap().exact);
        let json = render_json(&deck, Some(report));
        assert!(json.contains("\"paired\": true"));
    }
}
