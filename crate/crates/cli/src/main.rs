//! `dynatomic`: polynomials, prime classification, special fibers and
//! monodromy graphs from the command line.
//!
//! Exit codes: 0 success, 1 usage or other error, 2 work budget exhausted,
//! 3 arithmetic inconsistency.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dynatomic::budget::Budget;
use dynatomic::cache::Cache;
use dynatomic::dynatomic::Family;
use dynatomic::fibers::{self, TableRow, TABLE_HEADER};
use dynatomic::monodromy::{self, GraphFormat};
use dynatomic::reduction::{self, Classifier, PrimeClassification};
use dynatomic::Error;

#[derive(Parser, Debug)]
#[command(name = "dynatomic", version, about = "Dynatomic curves of x^m + c")]
struct Cli {
    /// Exponent m of the family x^m + c.
    #[arg(long, global = true, default_value_t = 2)]
    m: u64,
    /// Trial division bound for integer factorisation.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    trial_bound: u64,
    /// Work budget in abstract cost units (unlimited when absent).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Directory for cached polynomials.
    #[arg(long, global = true, env = "DYNATOMIC_CACHE")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print phi, psi, delta or Delta:d for period n.
    Poly {
        #[arg(long)]
        n: u64,
        /// phi, psi, delta or Delta:d
        #[arg(long)]
        which: String,
    },
    /// Classify reduction of Y1(n) and Y0(n) at primes.
    Classify {
        #[arg(long)]
        n: u64,
        /// Comma separated primes.
        #[arg(short = 'p', long = "primes", value_delimiter = ',', required_unless_present = "auto")]
        primes: Vec<u64>,
        /// Use candidate bad primes and the primes of the discriminant table.
        #[arg(long, conflicts_with = "primes")]
        auto: bool,
    },
    /// Ramification over c = 0 and c = -2 modulo p.
    Fibers {
        /// Comma separated n:p pairs.
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<String>,
    },
    /// The monodromy graph of period n.
    Graph {
        #[arg(long)]
        n: usize,
        /// Check connectivity after removing every k finite edges.
        #[arg(long)]
        robustness: Option<u64>,
    },
    /// Discriminant and resultant factorisation table.
    Tables {
        #[arg(long)]
        n: u64,
    },
}

struct Ctx {
    family: Family,
    trial_bound: u64,
    budget: Budget,
    format: Option<Format>,
    cache: Option<Cache>,
}

impl Ctx {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            bail!("format {f:?} is not available for this command");
        }
        Ok(f)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Budget { .. }) => 2,
        Some(Error::Inconsistent(_)) => 3,
        _ => 1,
    }
}

fn code_of(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 2,
        Error::Inconsistent(_) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let ctx = Ctx {
        family: Family::new(cli.m)?,
        trial_bound: cli.trial_bound,
        budget: cli.budget.map(Budget::new).unwrap_or_default(),
        format: cli.format,
        cache: cli.cache_dir.map(Cache::new).transpose()?,
    };
    let mut out = std::io::stdout().lock();
    let code = match cli.command {
        Command::Poly { n, which } => cmd_poly(&ctx, n, &which, &mut out)?,
        Command::Classify { n, primes, auto } => cmd_classify(&ctx, n, primes, auto, &mut out)?,
        Command::Fibers { rows } => cmd_fibers(&ctx, &rows, &mut out)?,
        Command::Graph { n, robustness } => cmd_graph(&ctx, n, robustness, &mut out)?,
        Command::Tables { n } => cmd_tables(&ctx, n, &mut out)?,
    };
    out.flush()?;
    Ok(ExitCode::from(code))
}

fn cached<T, F>(ctx: &Ctx, n: u64, name: &str, compute: F) -> Result<T>
where
    T: std::str::FromStr<Err = Error> + std::fmt::Display,
    F: FnOnce() -> dynatomic::Result<T>,
{
    Ok(match &ctx.cache {
        Some(c) => c.get_or_compute(ctx.family.m(), n, name, compute)?,
        None => compute()?,
    })
}

fn cmd_poly(ctx: &Ctx, n: u64, which: &str, out: &mut impl Write) -> Result<u8> {
    let fmt = ctx.format(Format::Text, &[Format::Text, Format::Json])?;
    let fam = ctx.family;
    let (text, degree) = match which {
        "phi" => {
            let p = cached(ctx, n, "phi", || fam.phi(n))?;
            (p.to_string(), p.degree())
        }
        "psi" => {
            let p = cached(ctx, n, "psi", || fam.psi(n))?;
            (p.to_string(), p.degree())
        }
        "delta" => {
            let p = cached(ctx, n, "delta", || fam.delta(n, &ctx.budget))?;
            (p.to_string(), p.degree())
        }
        w => {
            let d: u64 = w
                .strip_prefix("Delta:")
                .ok_or_else(|| anyhow!("--which must be phi, psi, delta or Delta:d, got {w:?}"))?
                .parse()
                .context("bad d in Delta:d")?;
            let p = cached(ctx, n, &format!("Delta_{n}_{d}"), || fam.delta_factor(n, d, &ctx.budget))?;
            (p.to_string(), p.degree())
        }
    };
    match fmt {
        Format::Json => writeln!(out, "{}", json!({"n": n, "m": fam.m(), "which": which, "degree": degree, "poly": text}))?,
        _ => writeln!(out, "{text}")?,
    }
    Ok(0)
}

fn cmd_classify(ctx: &Ctx, n: u64, primes: Vec<u64>, auto: bool, out: &mut impl Write) -> Result<u8> {
    let fmt = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let (classifier, primes) = if auto {
        let table = ctx.family.discriminant_table(n, ctx.trial_bound, &ctx.budget)?;
        let cands = reduction::candidate_bad_primes(ctx.family, n, ctx.trial_bound, &ctx.budget)?;
        if !cands.complete || !cands.large_primes.is_empty() {
            log::warn!("candidate set for n = {n} is incomplete below the trial bound");
        }
        let set: BTreeSet<u64> = table.primes().into_iter().chain(cands.primes).collect();
        (Classifier::from_table(&table)?, set.into_iter().collect::<Vec<_>>())
    } else {
        (Classifier::new(ctx.family, n, &ctx.budget)?, primes)
    };
    let mut rows: Vec<PrimeClassification> = Vec::new();
    let mut code = 0u8;
    for p in primes {
        match classifier.classify(p, &ctx.budget) {
            Ok([y1, y0]) => rows.extend([y1, y0]),
            Err(e) => {
                eprintln!("p = {p}: {e}");
                code = code.max(code_of(&e));
            }
        }
    }
    match fmt {
        Format::Json => {
            let v: Vec<Value> = rows.iter().map(reduction::classification_json).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        _ => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "m", "p", "curve", "reduction", "irreducibility", "rules"])?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    r.m.to_string(),
                    r.p.to_string(),
                    r.curve.to_string(),
                    r.reduction.to_string(),
                    r.irreducibility.to_string(),
                    r.rule_list(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(code)
}

fn parse_row(s: &str) -> Result<(u64, u64)> {
    let (n, p) = s.split_once(':').ok_or_else(|| anyhow!("row {s:?} is not n:p"))?;
    Ok((n.trim().parse().context("bad n")?, p.trim().parse().context("bad p")?))
}

fn cmd_fibers(ctx: &Ctx, rows: &[String], out: &mut impl Write) -> Result<u8> {
    let fmt = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let pairs = rows.iter().map(|s| parse_row(s)).collect::<Result<Vec<_>>>()?;
    if ctx.family.m() != 2 {
        bail!("special fibers are implemented for m = 2 only");
    }
    let table: Vec<TableRow> = match &ctx.cache {
        None => fibers::reduction_table(&pairs, &ctx.budget),
        Some(_) => pairs
            .iter()
            .map(|&(n, p)| {
                let report = cached(ctx, n, &format!("delta_nn_mod_{p}"), || ctx.family.delta_nn_mod_p(n, p, &ctx.budget))
                    .and_then(|dnn| Ok(fibers::fiber_report_from(n, p, &dnn)?));
                TableRow { n, p, report: report.map_err(|e| e.to_string()) }
            })
            .collect(),
    };
    match fmt {
        Format::Json => {
            let v: Vec<Value> = table.iter().map(TableRow::to_json).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        _ => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(TABLE_HEADER)?;
            for r in &table {
                w.write_record(r.fields())?;
            }
            w.flush()?;
        }
    }
    let failed = table.iter().filter(|r| r.report.is_err()).count();
    Ok(if failed > 0 { 1 } else { 0 })
}

fn cmd_graph(ctx: &Ctx, n: usize, k: Option<u64>, out: &mut impl Write) -> Result<u8> {
    let fmt = ctx.format(Format::Dot, &[Format::Dot, Format::Json, Format::Text])?;
    if ctx.family.m() != 2 {
        bail!("monodromy graphs are implemented for m = 2 only");
    }
    let g = monodromy::build_graph(n, &ctx.budget)?;
    let rob = k.map(|k| monodromy::robustness(&g, k, &ctx.budget)).transpose()?;
    let verdict = rob.as_ref().map(|r| match &r.witness {
        None => format!("connected under all {}-removals", r.k),
        Some(w) => {
            let parts: Vec<String> = w.iter().map(|e| format!("{}x({}-{})", e.copies, e.endpoints[0], e.endpoints[1])).collect();
            format!("disconnected by removing {}", parts.join(", "))
        }
    });
    match fmt {
        Format::Dot => {
            write!(out, "{}", monodromy::export_graph(&g, GraphFormat::Dot))?;
            if let Some(v) = verdict {
                writeln!(out, "// {v}")?;
            }
        }
        Format::Json => {
            let graph: Value = serde_json::from_str(&monodromy::export_graph(&g, GraphFormat::Json))?;
            let v = match rob {
                Some(r) => json!({"graph": graph, "robustness": r, "verdict": verdict}),
                None => graph,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        _ => {
            writeln!(out, "n = {n}: {} vertices, {} finite edges, {} infinite edges", g.vertices.len(), g.finite_multiplicity(), g.infinite.len())?;
            if let Some(v) = verdict {
                writeln!(out, "{v}")?;
            }
        }
    }
    Ok(0)
}

fn cmd_tables(ctx: &Ctx, n: u64, out: &mut impl Write) -> Result<u8> {
    let fmt = ctx.format(Format::Text, &[Format::Text, Format::Json])?;
    let t = ctx.family.discriminant_table(n, ctx.trial_bound, &ctx.budget)?;
    match fmt {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&t.to_json())?)?,
        _ => write!(out, "{}", t.render())?,
    }
    Ok(0)
}
