use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use spotit_core::format::{
    parse_any, render_json, render_text, DeckJson, MaximalityJson, ReportJson,
};
use spotit_core::{
    build_grid, build_paired, build_two_symmetric, census, check_identities, check_kn2_lemma,
    classify, complete, enumerate_decks, find_common_triple, is_maximal, multiplicities,
    paired_existence, probe_length_conjecture, validate, Deck, EnumerateOptions, GridBlockSpec,
    LengthVsDelta, PairedExistence,
};

mod report;

/// `print!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        write!(io::stdout(), $($arg)*)?
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(io::stdout(), $($arg)*)?
    };
}

#[derive(Parser)]
#[command(
    name = "spotit",
    version,
    about = "Verify, analyze, build and enumerate Spot It! decks"
)]
struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the deck axioms.
    Verify { file: PathBuf },
    /// Multiplicities, identities, classification and maximality.
    Analyze { file: PathBuf },
    /// Print a constructed deck.
    Build {
        kind: BuildKind,
        #[arg(long)]
        n: usize,
        /// Number of grid blocks (grid only).
        #[arg(long)]
        blocks: Option<usize>,
        /// Add the card joining all block symbols (grid with all blocks only).
        #[arg(long)]
        pivot: bool,
    },
    /// Exit 0 if no card can be added, 1 otherwise.
    Maximal { file: PathBuf },
    /// Add extension cards until the deck is maximal.
    Extend {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// All decks of order n up to isomorphism.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cmax: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        parallel: bool,
    },
    /// Look for a deck of order n longer than n² − n + 1.
    ProbeLength {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Group the decks of order n by (n, c, l) and report collisions.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cmax: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Find a symbol shared by several of the given cards (0-based indices).
    Spot {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cards: Vec<usize>,
    },
    /// Whether a paired deck (projective plane) of order n exists.
    Existence {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    TwoSymmetric,
    Paired,
    Grid,
}

/// Exit statuses: 0 success, 1 invalid deck or negative verdict, 2 usage error.
const INVALID: u8 = 1;
const USAGE: u8 = 2;

fn read_deck(path: &Path) -> anyhow::Result<Deck> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_any(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn print_deck(deck: &Deck, json: bool) -> io::Result<()> {
    if json {
        out!("{}", render_json(deck, None));
    } else {
        out!("{}", render_text(deck));
    }
    Ok(())
}

/// Prints violations and returns false when the deck is invalid.
fn require_valid(deck: &Deck, json: bool) -> io::Result<bool> {
    let result = validate(deck);
    if result.is_valid() {
        return Ok(true);
    }
    if json {
        out!("{}", render_json(deck, Some(ReportJson::validation(deck))));
    } else {
        outln!(
            "invalid: n={} c={} l={}",
            deck.order(),
            deck.card_count(),
            deck.length()
        );
        for v in &result.violations {
            outln!("  {}", report::violation(deck, v));
        }
    }
    Ok(false)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let json = cli.json;
    match cli.command {
        Command::Verify { file } => {
            let deck = read_deck(&file)?;
            if !require_valid(&deck, json)? {
                return Ok(INVALID);
            }
            if json {
                out!(
                    "{}",
                    render_json(&deck, Some(ReportJson::validation(&deck)))
                );
            } else {
                outln!(
                    "valid: n={} c={} l={}",
                    deck.order(),
                    deck.card_count(),
                    deck.length()
                );
            }
        }
        Command::Analyze { file } => {
            let deck = read_deck(&file)?;
            if !require_valid(&deck, json)? {
                return Ok(INVALID);
            }
            if json {
                out!("{}", render_json(&deck, Some(ReportJson::full(&deck)?)));
            } else {
                let class = classify(&deck)?;
                out!(
                    "{}",
                    report::analysis(
                        &deck,
                        &multiplicities(&deck),
                        &check_identities(&deck),
                        &class,
                        &is_maximal(&deck)?
                    )
                );
                if class.length_vs_delta == LengthVsDelta::Greater {
                    eprintln!("note: this deck is longer than its fundamental number");
                }
            }
        }
        Command::Build {
            kind,
            n,
            blocks,
            pivot,
        } => {
            let deck = match kind {
                BuildKind::TwoSymmetric => build_two_symmetric(n)?,
                BuildKind::Paired => build_paired(n)?,
                BuildKind::Grid => {
                    let k = blocks.context("grid needs --blocks")?;
                    let mut spec = GridBlockSpec::consecutive(n, k)?;
                    spec.with_pivot = pivot;
                    build_grid(&spec)?
                }
            };
            if blocks.is_some() && !matches!(kind, BuildKind::Grid) {
                bail!("--blocks only applies to grid decks");
            }
            print_deck(&deck, json)?;
        }
        Command::Maximal { file } => {
            let deck = read_deck(&file)?;
            if !require_valid(&deck, json)? {
                return Ok(INVALID);
            }
            let verdict = is_maximal(&deck)?;
            if json {
                outln!(
                    "{}",
                    serde_json::to_string_pretty(&MaximalityJson::new(&deck, &verdict))?
                );
            } else {
                out!("{}", report::maximality(&deck, &verdict));
            }
            if !verdict.exact {
                return Ok(INVALID);
            }
        }
        Command::Extend { file, steps } => {
            let deck = read_deck(&file)?;
            if !require_valid(&deck, json)? {
                return Ok(INVALID);
            }
            let done = complete(&deck, steps)?;
            if json {
                out!("{}", render_json(&done.deck, None));
            } else {
                outln!("# added {} card(s); maximal: {}", done.steps, done.maximal);
                out!("{}", render_text(&done.deck));
            }
        }
        Command::Enumerate {
            n,
            cmax,
            budget,
            parallel,
        } => {
            let mut options = EnumerateOptions::new().parallel(parallel);
            options.c_max = cmax;
            options.node_budget = budget;
            let run = enumerate_decks(n, options)?;
            if json {
                outln!("{}", serde_json::to_string_pretty(&run)?);
            } else {
                out!("{}", report::enumeration(&run));
            }
        }
        Command::ProbeLength { n, budget } => {
            let probe = probe_length_conjecture(n, budget)?;
            if json {
                outln!("{}", serde_json::to_string_pretty(&probe)?);
            } else {
                out!("{probe}");
            }
        }
        Command::Census { n, cmax, budget } => {
            let census = census(n, cmax, budget)?;
            if json {
                outln!("{}", serde_json::to_string_pretty(&census)?);
            } else {
                out!("{census}");
            }
        }
        Command::Spot { file, cards } => {
            let deck = read_deck(&file)?;
            if !require_valid(&deck, json)? {
                return Ok(INVALID);
            }
            let n = deck.order();
            let picked = cards.len();
            if picked == n + 1 && n >= 4 {
                let (triple, single) = find_common_triple(&deck, &cards)?;
                out!(
                    "{}",
                    report::spot(
                        &deck,
                        &cards,
                        &[
                            ("on three or more cards", triple),
                            ("on exactly one card", single)
                        ],
                        json
                    )
                );
            } else if picked >= n + 2 && (picked - 2) % n == 0 {
                let k = (picked - 2) / n;
                let symbol = check_kn2_lemma(&deck, &cards, k)?;
                let label = format!("on at least {} cards", k + 2);
                out!(
                    "{}",
                    report::spot(&deck, &cards, &[(label.as_str(), symbol)], json)
                );
            } else {
                bail!("spot needs n + 1 cards (n ≥ 4) or kn + 2 cards; got {picked} for n = {n}");
            }
        }
        Command::Existence { n } => {
            let answer = paired_existence(n)?;
            if json {
                let mut value = serde_json::json!({ "order": n, "status": answer.label() });
                if let PairedExistence::Exists(deck) = &answer {
                    value["witness"] = serde_json::to_value(DeckJson::new(deck, None))?;
                }
                outln!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                outln!("paired deck of order {n}: {}", answer.label());
                if let PairedExistence::Exists(deck) = &answer {
                    outln!(
                        "witness: {} cards, {} symbols",
                        deck.card_count(),
                        deck.length()
                    );
                }
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
