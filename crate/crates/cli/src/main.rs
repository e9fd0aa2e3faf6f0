use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use qfa_core::cutpoint::{cell_of_scalar, CutpointSpec, Relation};
use qfa_core::document::{parse_document_with_tolerance, AnyMachine};
use qfa_core::languages::{oracle, LanguageOracle};
use qfa_core::numeric::Scalar;
use qfa_core::verify::dieu_violation;

mod build;
mod demo;

#[derive(Parser)]
#[command(name = "qfa", version, about = "Simulate, build and verify stochastic and quantum finite automata")]
struct Cli {
    /// Machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,

    /// Tolerance for float comparisons and unitarity checks.
    #[arg(long, global = true, env = "QFA_EPSILON", default_value_t = qfa_core::DEFAULT_EPSILON)]
    epsilon: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the acceptance value of a word.
    Simulate {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Classify a word against a cutpoint.
    Classify {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        cutpoint: String,
        #[arg(long, default_value = "greater")]
        relation: Relation,
    },
    /// Build a machine from others.
    #[command(subcommand)]
    Build(build::Target),
    /// Compare a machine's cutpoint language with an oracle on all words up to a bound.
    Verify {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        cutpoint: String,
        #[arg(long, default_value = "greater")]
        relation: Relation,
        /// eq, neq, mod-<m>, pal, lt, eq-dot-b, eq-prime, wp-<k> or dfa:<file>
        #[arg(long)]
        oracle: String,
        /// Use the complement of the oracle language.
        #[arg(long)]
        complement: bool,
        #[arg(long, default_value_t = qfa_core::cutpoint::DEFAULT_MAXLEN)]
        maxlen: usize,
    },
    /// Search for a failure of the Dieu pumping condition.
    Dieu {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        complement: bool,
        #[arg(long, default_value = "")]
        u: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "")]
        v: String,
        #[arg(long)]
        n: usize,
        /// Largest exponent tried; defaults to `n`.
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Write the bundled example machines into a directory.
    Demo {
        #[arg(long, default_value = "demo")]
        out: PathBuf,
        /// Period of the rotation machine.
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Rotation angle of the inequality machine, in radians.
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
    },
}

/// Result of a successful run: whether a disagreement or counterexample
/// was found.
enum Outcome {
    Ok,
    Counterexample,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Counterexample) => ExitCode::from(1),
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}

pub(crate) fn load_machine(path: &Path, eps: f64) -> Result<AnyMachine> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_document_with_tolerance(&text, eps).with_context(|| format!("loading {}", path.display()))
}

fn load_oracle(id: &str, complement: bool) -> Result<LanguageOracle> {
    let o = oracle(id)?;
    Ok(if complement { o.complement() } else { o })
}

fn cutpoint(machine: &AnyMachine, text: &str, relation: Relation) -> Result<CutpointSpec> {
    let lambda = Scalar::parse_as(text, machine.scalar_kind())
        .with_context(|| format!("cutpoint {text:?} for a {} machine", machine.scalar_kind()))?;
    Ok(CutpointSpec::new(lambda, relation))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let eps = cli.epsilon;
    if !(eps >= 0.0 && eps.is_finite()) {
        bail!("epsilon must be a nonnegative number, got {eps}");
    }
    match &cli.command {
        Command::Simulate { machine, word } => {
            let m = load_machine(machine, eps)?;
            let w = m.alphabet().parse_word(word)?;
            let value = m.evaluate(&w)?;
            if cli.json {
                println!(
                    "{}",
                    json!({ "word": m.alphabet().render(&w), "kind": m.kind().to_string(), "value": value.to_string() })
                );
            } else {
                println!("{value}");
            }
            Ok(Outcome::Ok)
        }
        Command::Classify { machine, word, cutpoint: lambda, relation } => {
            let m = load_machine(machine, eps)?;
            let spec = cutpoint(&m, lambda, *relation)?;
            let w = m.alphabet().parse_word(word)?;
            let value = m.evaluate(&w)?;
            let cell = cell_of_scalar(&value, &spec.lambda, eps)?;
            let member = m.member(&spec, &w, eps)?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "word": m.alphabet().render(&w),
                        "value": value.to_string(),
                        "cell": cell.to_string(),
                        "relation": relation.to_string(),
                        "member": member,
                    })
                );
            } else {
                println!("{} value {value} {cell} cutpoint {}: {}", m.alphabet().render(&w), spec.lambda,
                    if member { "member" } else { "non-member" });
            }
            Ok(Outcome::Ok)
        }
        Command::Build(target) => build::run(target, cli.json, eps),
        Command::Verify { machine, cutpoint: lambda, relation, oracle: id, complement, maxlen } => {
            let m = load_machine(machine, eps)?;
            let spec = cutpoint(&m, lambda, *relation)?;
            let o = load_oracle(id, *complement)?;
            let report = m.agreement(&spec, &o, *maxlen, eps)?;
            if cli.json {
                println!("{}", serde_json::to_string(&report)?);
            } else {
                match &report.first_disagreement {
                    None => println!("agree on all {} words up to length {}", report.tested, report.max_len),
                    Some(w) => println!("disagree on {w:?} (word {} in enumeration order)", report.tested),
                }
            }
            Ok(if report.agrees() { Outcome::Ok } else { Outcome::Counterexample })
        }
        Command::Dieu { oracle: id, complement, u, y, v, n, m_max } => {
            let o = load_oracle(id, *complement)?;
            let parse = |s: &str| o.alphabet().parse_word(s);
            let (u, y, v) = (parse(u)?, parse(y)?, parse(v)?);
            let m_max = m_max.unwrap_or(*n);
            if m_max < *n {
                bail!("--m-max ({m_max}) must be at least --n ({n})");
            }
            let found = dieu_violation(&o, &u, &y, &v, *n, m_max);
            if cli.json {
                println!("{}", json!({ "oracle": o.name(), "n": n, "violation": found }));
            } else {
                match found {
                    Some(m) => println!("violation at m = {m}: u y^m v is outside {}", o.name()),
                    None => println!("no violation for n = {n} up to m = {m_max}"),
                }
            }
            Ok(if found.is_some() { Outcome::Counterexample } else { Outcome::Ok })
        }
        Command::Demo { out, m, theta } => demo::run(out, *m, *theta, cli.json),
    }
}

pub(crate) use Outcome as RunOutcome;
