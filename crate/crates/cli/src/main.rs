//! `zms`: build, verify and search zero-sum magic squares from the shell.
//!
//! Exit status: 0 success, 1 proven impossible (a certificate is printed),
//! 2 error, 3 budget exhausted or construction incomplete.

use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zms::build::{build_zms, replay, BuildOutcome, ConstructionTrace};
use zms::classic::{integer_ms, integer_ms_or_trivial, zero_based};
use zms::kotzig::{build_grouped_kotzig, build_kotzig};
use zms::oracle::{search, spectrum, SearchOptions, DEFAULT_BUDGET, DEFAULT_CAP};
use zms::{Error, GroupElement, GroupSpec, Square};

#[derive(Parser)]
#[command(name = "zms", version, about = "Zero-sum magic squares over finite Abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build a zero-sum square, or print why none exists.
    Build {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also print the derivation trace.
        #[arg(long)]
        trace: bool,
    },
    /// Check the line sums of a square read from a file (`-` for stdin).
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Order, side, involutions and class membership of a group.
    Classify {
        #[arg(long)]
        group: String,
    },
    /// A Kotzig array with the given number of rows.
    Kotzig {
        #[arg(long)]
        group: String,
        #[arg(long)]
        rows: usize,
        /// Split each row into zero-sum groups of this size.
        #[arg(long)]
        grouped: Option<usize>,
    },
    /// A classical integer magic square.
    Classic {
        #[arg(long)]
        n: usize,
        /// Entries 0..n² instead of 1..=n².
        #[arg(long)]
        zero_based: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Backtracking search for magic squares.
    Oracle {
        #[arg(long)]
        group: String,
        /// Side; defaults to the square root of the order.
        #[arg(long)]
        n: Option<usize>,
        /// Only squares with this constant, e.g. `(0,6)`.
        #[arg(long)]
        mu: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Fix the identity in the first cell.
        #[arg(long)]
        fix_first: bool,
    },
    /// Which magic constants occur, with a witness for each.
    Spectrum {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: Option<usize>,
        /// Node budget per constant.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Rows, columns and diagonals of a zero-sum square as design blocks.
    Blocks {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Re-run a derivation trace and print the resulting square.
    Replay {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

struct Output {
    status: u8,
    stdout: String,
}

impl Output {
    fn ok(stdout: impl Into<String>) -> Self {
        Output { status: 0, stdout: stdout.into() }
    }
}

fn status_of(e: &Error) -> u8 {
    match e {
        Error::BudgetExhausted { .. } | Error::Incomplete(_) => 3,
        _ => 2,
    }
}

fn read_input(path: &PathBuf) -> Result<String, Error> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::MalformedInput(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

/// Square JSON, figure-style text, or a `build --trace` object.
fn parse_square(text: &str) -> Result<Square, Error> {
    let t = text.trim_start();
    if !t.starts_with('{') {
        return Square::from_text(text);
    }
    let v: Value = serde_json::from_str(t).map_err(|e| Error::MalformedInput(e.to_string()))?;
    let inner = v.get("square").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| Error::MalformedInput(e.to_string()))
}

fn side_for(spec: &GroupSpec, n: Option<usize>) -> Result<usize, Error> {
    match n {
        Some(n) => Ok(n),
        None => spec.side().map(|s| s as usize).ok_or(Error::NonSquareOrder(spec.order())),
    }
}

fn render(sq: &Square, format: Format) -> String {
    match format {
        Format::Json => sq.to_json(),
        Format::Text => sq.to_text().trim_end().to_string(),
    }
}

fn run(command: Command) -> Result<Output, Error> {
    match command {
        Command::Build { group, format, trace } => {
            let spec = GroupSpec::parse(&group)?;
            match build_zms(&spec)? {
                BuildOutcome::Built { square, trace: t } => Ok(Output::ok(match (format, trace) {
                    (Format::Json, true) => json!({ "square": square, "trace": t }).to_string(),
                    (Format::Text, true) => format!("{}\ntrace: {}", render(&square, format), t.to_json()),
                    _ => render(&square, format),
                })),
                BuildOutcome::Impossible(cert) => Ok(Output { status: 1, stdout: cert.to_json() }),
            }
        }
        Command::Verify { input } => {
            let sq = parse_square(&read_input(&input)?)?;
            let report = sq.verify()?;
            let status = if report.is_magic { 0 } else { 2 };
            let out = json!({ "group": sq.spec(), "n": sq.side(), "report": report });
            Ok(Output { status, stdout: out.to_string() })
        }
        Command::Classify { group } => {
            let spec = GroupSpec::parse(&group)?;
            let (primary, _) = spec.primary_split();
            let out = json!({
                "group": spec,
                "primary": primary,
                "profile": spec.classify(),
                "involutions": spec.involutions(),
            });
            Ok(Output::ok(out.to_string()))
        }
        Command::Kotzig { group, rows, grouped } => {
            let spec = GroupSpec::parse(&group)?;
            let ka = match grouped {
                Some(g) => build_grouped_kotzig(&spec, rows, g)?,
                None => build_kotzig(&spec, rows)?,
            };
            Ok(Output::ok(serde_json::to_string(&ka).expect("Kotzig arrays serialize")))
        }
        Command::Classic { n, zero_based: zb, format } => {
            let sq = if zb { zero_based(&integer_ms(n)?) } else { integer_ms_or_trivial(n)? };
            Ok(Output::ok(match format {
                Format::Json => json!({ "n": n, "base": sq.base(), "constant": sq.magic_constant(), "cells": sq.rows() }).to_string(),
                Format::Text => sq.to_text(),
            }))
        }
        Command::Oracle { group, n, mu, budget, cap, fix_first } => {
            let spec = GroupSpec::parse(&group)?;
            let n = side_for(&spec, n)?;
            let filter = mu.as_deref().map(GroupElement::parse).transpose()?;
            let opts = SearchOptions { filter, budget, cap, stop_after: None, fix_first_cell: fix_first };
            let r = search(&spec, n, &opts)?;
            let status = if r.exhaustive { 0 } else { 3 };
            Ok(Output { status, stdout: serde_json::to_string(&r).expect("reports serialize") })
        }
        Command::Spectrum { group, n, budget } => {
            let spec = GroupSpec::parse(&group)?;
            let n = side_for(&spec, n)?;
            let r = spectrum(&spec, n, budget)?;
            let status = if r.exhaustive { 0 } else { 3 };
            Ok(Output { status, stdout: serde_json::to_string(&r).expect("reports serialize") })
        }
        Command::Blocks { input } => {
            let sq = parse_square(&read_input(&input)?)?;
            Ok(Output::ok(serde_json::to_string(&sq.export_blocks()?).expect("blocks serialize")))
        }
        Command::Replay { input, format } => {
            let text = read_input(&input)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::MalformedInput(e.to_string()))?;
            let inner = v.get("trace").cloned().unwrap_or(v);
            let trace: ConstructionTrace = serde_json::from_value(inner).map_err(|e| Error::MalformedInput(e.to_string()))?;
            Ok(Output::ok(render(&replay(&trace)?, format)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            println!("{}", out.stdout);
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(status_of(&e))
        }
    }
}
