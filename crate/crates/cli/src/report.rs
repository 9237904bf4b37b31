//! Plain-text renderings for the terminal.

use std::fmt::Write;

use spotit_core::analysis::{Classification, IdentityReport, LengthVsDelta, MultiplicityTable};
use spotit_core::{CanonicalForm, Deck, Enumeration, MaximalityVerdict, SymbolId, Violation};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn tokens(deck: &Deck, symbols: &[SymbolId]) -> String {
    symbols
        .iter()
        .map(|&s| deck.token(s))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn violation(deck: &Deck, v: &Violation) -> String {
    match v {
        Violation::Multiplicity {
            symbol,
            multiplicity,
        } => format!(
            "{}: symbol {} appears on {} card(s)",
            v.axiom(),
            deck.token(*symbol),
            multiplicity
        ),
        other => other.to_string(),
    }
}

pub fn analysis(
    deck: &Deck,
    table: &MultiplicityTable,
    identities: &IdentityReport,
    class: &Classification,
    verdict: &MaximalityVerdict,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "deck: n={} c={} l={}",
        deck.order(),
        deck.card_count(),
        deck.length()
    );
    let relation = match class.length_vs_delta {
        LengthVsDelta::Less => "l < delta",
        LengthVsDelta::Equal => "l = delta",
        LengthVsDelta::Greater => "l > delta  !!! longer than the fundamental number",
    };
    let _ = writeln!(
        out,
        "fundamental number: {} ({relation})",
        class.fundamental_number
    );
    let hist: Vec<String> = table
        .histogram
        .iter()
        .map(|(m, k)| format!("{m}:{k}"))
        .collect();
    let _ = writeln!(
        out,
        "multiplicities: mu={} M={} histogram {}",
        table.mu,
        table.cap,
        hist.join(" ")
    );
    let sym = match class.symmetric {
        Some(m) => format!("yes (M={m})"),
        None => "no".into(),
    };
    let _ = writeln!(out, "symmetric: {sym}");
    let _ = writeln!(out, "paired: {}", yes_no(class.paired));
    if let Some((small, large)) = class.two_mult_split {
        let _ = writeln!(out, "per-card split: {small} of mu, {large} of M");
    }
    out.push_str(&maximality(deck, verdict));
    let _ = writeln!(out, "card sums: {:?}", identities.card_sums);
    let _ = writeln!(out, "sum of squares: {}", identities.sum_of_squares);
    let _ = writeln!(out, "identities:");
    for check in &identities.checks {
        let mark = if check.holds { "ok  " } else { "FAIL" };
        match &check.witness {
            Some(w) => {
                let _ = writeln!(out, "  {mark} {} ({w})", check.kind);
            }
            None => {
                let _ = writeln!(out, "  {mark} {}", check.kind);
            }
        }
    }
    out
}

pub fn maximality(deck: &Deck, verdict: &MaximalityVerdict) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "maximal: {} (corollary: {}, counting condition: {}, search: {})",
        yes_no(verdict.exact),
        yes_no(verdict.sufficient_corollary),
        yes_no(verdict.prop_condition),
        yes_no(verdict.exact)
    );
    if verdict.condition_gap() {
        let _ = writeln!(out, "note: maximal although the counting condition fails");
    }
    if let Some(ext) = &verdict.extension {
        let _ = writeln!(out, "extension card: {}", tokens(deck, &ext.symbols));
    }
    out
}

fn canonical(form: &CanonicalForm) -> String {
    form.to_text()
}

pub fn enumeration(run: &Enumeration) -> String {
    let mut out = String::new();
    for (i, form) in run.decks.iter().enumerate() {
        let _ = writeln!(
            out,
            "# class {}: c={} l={} digest {}",
            i + 1,
            form.card_count(),
            form.length(),
            form.digest()
        );
        out.push_str(&canonical(form));
    }
    let _ = writeln!(
        out,
        "# order {}: {} class(es), {} node(s), {}",
        run.order,
        run.decks.len(),
        run.nodes,
        if run.complete {
            "exhausted"
        } else {
            "budget-truncated"
        }
    );
    out
}

pub fn spot(deck: &Deck, cards: &[usize], found: &[(&str, SymbolId)], json: bool) -> String {
    if json {
        let mut value = serde_json::json!({ "cards": cards });
        for (label, s) in found {
            value[label.replace(' ', "_")] = deck.token(*s).into();
        }
        return serde_json::to_string_pretty(&value).unwrap_or_default() + "\n";
    }
    let mut out = String::new();
    for (label, s) in found {
        let holders: Vec<String> = cards
            .iter()
            .filter(|&&i| deck.cards()[i].contains(*s))
            .map(|i| i.to_string())
            .collect();
        let _ = writeln!(
            out,
            "{label}: {} (cards {})",
            deck.token(*s),
            holders.join(",")
        );
    }
    out
}
