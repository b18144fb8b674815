//! rsc: classify Reed-Solomon separation cells, reproduce the reference
//! parameter table, brute-force collusion properties on small codes, compute
//! subspace-subcode dimension tables, and decide separability of explicit
//! sets.
//!
//! Exit codes for `classify`: 0 when the cell is resolved or trivial, 2 when
//! pending, 1 on input errors. All commands are deterministic: identical
//! invocations produce byte-identical output.

use std::collections::BTreeSet;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rsc_core::classifier::{
    self, build_table, classify, classify_with_oracle, parse_w_rows, render_csv, render_markdown,
    Status,
};
use rsc_core::collusion::{
    is_ipp, is_separating, is_ta, ExplicitCode, IppOutcome, SeparatingOutcome, TaOutcome,
};
use rsc_core::field::{make_field, prime_power};
use rsc_core::rs::{enumerate_codewords, RsSpec};
use rsc_core::separability::{search_separable, Mode, SearchBudget, SearchOutcome};
use rsc_core::ssrs;

#[derive(Parser)]
#[command(name = "rsc", version, about = "Reed-Solomon separation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one parameter cell (q, w1, w2).
    Classify(ClassifyArgs),
    /// Classify a grid of cells and render it as a table.
    Table(TableArgs),
    /// Brute-force a collusion-security property of RS_k(q).
    Verify(VerifyArgs),
    /// Subspace-subcode dimension table for RS_k(2^m).
    Ssrs(SsrsArgs),
    /// Decide separability of an explicit set of field elements.
    Separable(SeparableArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    w1: u64,
    #[arg(long)]
    w2: u64,
    /// Exhaustive polynomial-image search and materialized-code cross-check
    /// (small q only).
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    /// Comma-separated field orders; defaults to the reference study grid.
    #[arg(long = "q-list")]
    q_list: Option<String>,
    /// Comma-separated coalition sizes, ranges allowed ("2,3,14-15");
    /// defaults to the reference study rows.
    #[arg(long = "w-list")]
    w_list: Option<String>,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Separating,
    Ipp,
    Ta,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    property: Property,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    w1: u64,
    /// Defaults to w1.
    #[arg(long)]
    w2: Option<u64>,
    /// Work estimate cap (elementary checks).
    #[arg(long, default_value_t = 100_000_000)]
    guard: u128,
}

#[derive(Args)]
struct SsrsArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    v: u32,
    /// Also compute the exact binary dimension by rank.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Add,
    Mult,
}

#[derive(Args)]
struct SeparableArgs {
    /// Comma-separated element codes (integers in [0, q)).
    #[arg(long)]
    set: String,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    w1: u64,
    #[arg(long)]
    w2: u64,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Node budget for the exhaustive search.
    #[arg(long)]
    budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version go to stdout with success; argument errors are
            // input errors under this tool's exit-code contract.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Table(args) => cmd_table(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Ssrs(args) => cmd_ssrs(args),
        Command::Separable(args) => cmd_separable(args),
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<ExitCode> {
    let verdict = if args.oracle {
        classify_with_oracle(args.q, args.w1, args.w2)?
    } else {
        classify(args.q, args.w1, args.w2)?
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&verdict)?),
        Format::Markdown | Format::Csv => {
            let rows = vec![classifier::WRow { label: args.w1.to_string(), ws: vec![args.w1] }];
            // single-cell table rendering only applies to symmetric cells
            if args.w1 == args.w2 {
                let table = build_table(&[args.q], &rows)?;
                match args.format {
                    Format::Markdown => print!("{}", render_markdown(&table)),
                    _ => print!("{}", render_csv(&table)),
                }
            } else {
                println!("{}", serde_json::to_string_pretty(&verdict)?);
            }
        }
    }
    Ok(match verdict.status {
        Status::Resolved | Status::Trivial => ExitCode::SUCCESS,
        Status::Pending => ExitCode::from(2),
    })
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().with_context(|| format!("cannot parse {t:?}")))
        .collect()
}

fn cmd_table(args: TableArgs) -> Result<ExitCode> {
    let q_list = match &args.q_list {
        Some(s) => parse_u64_list(s)?,
        None => classifier::DEFAULT_Q_GRID.to_vec(),
    };
    let rows = parse_w_rows(args.w_list.as_deref().unwrap_or(classifier::DEFAULT_W_ROWS))?;
    let table = build_table(&q_list, &rows)?;
    match args.format {
        Format::Markdown => print!("{}", render_markdown(&table)),
        Format::Csv => print!("{}", render_csv(&table)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&table)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let (p, m) = prime_power(args.q).ok_or_else(|| anyhow!("{} is not a prime power", args.q))?;
    let field = make_field(p, m)?;
    let spec = RsSpec::new(field.clone(), args.k)?;
    let words = enumerate_codewords(&spec, args.guard)
        .map_err(|e| anyhow!("cannot materialize RS_{}({}): {e}", args.k, args.q))?;
    let code = ExplicitCode::from_codewords(field, words)?;
    let w1 = args.w1;
    let w2 = args.w2.unwrap_or(w1);

    let report = match args.property {
        Property::Separating => match is_separating(&code, w1, w2, args.guard) {
            SeparatingOutcome::Holds => json!({"property": "separating", "verdict": "holds"}),
            SeparatingOutcome::Fails(w) => json!({
                "property": "separating",
                "verdict": "fails",
                "witness": w,
                "verified": w.verify(w1, w2),
            }),
            SeparatingOutcome::GuardExceeded => {
                json!({"property": "separating", "verdict": "guard_exceeded"})
            }
        },
        Property::Ipp => match is_ipp(&code, w1, args.guard) {
            IppOutcome::Holds => json!({"property": "ipp", "verdict": "holds"}),
            IppOutcome::Fails { x, coalitions } => json!({
                "property": "ipp",
                "verdict": "fails",
                "x": x,
                "coalitions": coalitions,
            }),
            IppOutcome::GuardExceeded => json!({"property": "ipp", "verdict": "guard_exceeded"}),
        },
        Property::Ta => match is_ta(&code, w1, args.guard) {
            TaOutcome::Holds => json!({"property": "ta", "verdict": "holds"}),
            TaOutcome::Fails { x, coalition, rival } => json!({
                "property": "ta",
                "verdict": "fails",
                "x": x,
                "coalition": coalition,
                "rival": rival,
            }),
            TaOutcome::GuardExceeded => json!({"property": "ta", "verdict": "guard_exceeded"}),
        },
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_ssrs(args: SsrsArgs) -> Result<ExitCode> {
    let (p, m) = prime_power(args.q).ok_or_else(|| anyhow!("{} is not a prime power", args.q))?;
    if p != 2 {
        bail!("subspace subcode tables are defined over characteristic 2");
    }
    let mut dims = ssrs::lower_bound_l(m, args.k, args.v)?;
    if args.exact {
        let field = make_field(2, m)?;
        let basis = ssrs::canonical_subspace_basis(&field, args.v);
        dims.exact = Some(ssrs::exact_k(&field, args.k, &basis)?);
    }
    match args.format {
        Format::Csv => {
            println!("j,d_j,e_j,a_j,term");
            for row in &dims.rows {
                println!("{},{},{},{},{}", row.j, row.d, row.e, row.a, row.term);
            }
            println!("L,,,,{}", dims.lower_bound);
            if let Some(exact) = dims.exact {
                println!("K,,,,{exact}");
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&dims)?),
        Format::Markdown => {
            println!("| j | d_j | e_j | a_j | term |");
            println!("|---|---|---|---|---|");
            for row in &dims.rows {
                println!("| {} | {} | {} | {} | {} |", row.j, row.d, row.e, row.a, row.term);
            }
            println!();
            println!("L({}, {}) = {}", dims.k, dims.v, dims.lower_bound);
            if let Some(exact) = dims.exact {
                println!("K = {exact}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_separable(args: SeparableArgs) -> Result<ExitCode> {
    let (p, m) = prime_power(args.q).ok_or_else(|| anyhow!("{} is not a prime power", args.q))?;
    let field = make_field(p, m)?;
    let codes = parse_u64_list(&args.set)?;
    let mut set: BTreeSet<u32> = BTreeSet::new();
    for c in codes {
        if c >= args.q {
            bail!("element {c} out of range for GF({})", args.q);
        }
        set.insert(c as u32);
    }
    if set.is_empty() {
        bail!("--set must name at least one element");
    }
    let mode = match args.mode {
        ModeArg::Add => Mode::Additive,
        ModeArg::Mult => Mode::Multiplicative,
    };
    let budget = match args.budget {
        Some(nodes) => SearchBudget { max_nodes: nodes, ..Default::default() },
        None => SearchBudget::default(),
    };
    let report = match search_separable(&field, &set, args.w1, args.w2, mode, &budget) {
        SearchOutcome::Witness(w) => json!({
            "outcome": "separable",
            "witness": w,
        }),
        SearchOutcome::NotSeparable => json!({"outcome": "not_separable"}),
        SearchOutcome::BudgetExceeded => json!({"outcome": "budget_exceeded"}),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}
