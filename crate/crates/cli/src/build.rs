use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use serde_json::{json, Value};

use qfa_core::automata::{Alphabet, Automaton, Gpfa};
use qfa_core::constructions::{self as c, Homomorphism, Side};
use qfa_core::document::AnyMachine;
use qfa_core::numeric::{format_rational, parse_rational, Field, Matrix, Rational, Scalar};

use crate::{load_machine, RunOutcome};

#[derive(Subcommand)]
pub enum Target {
    /// PFA with cutpoint ½ to a KWQFA recognising the `≠ ½` language with cutpoint 0.
    Pfa2nqfa {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extended rational machine of a PFA (inspection only).
    Extend {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unitary completions of a PFA's extended machine (inspection only).
    Complete {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concatenation of two GPFAs.
    Concat {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kleene star of a GPFA.
    Star {
        #[arg(long = "in")]
        input: PathBuf,
        /// Add this weight on the empty word first.
        #[arg(long)]
        add_eps: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Homomorphic image of a GPFA.
    Hom {
        #[arg(long = "in")]
        input: PathBuf,
        /// `symbol=image`, once per source symbol; the image may be empty.
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
        /// Comma-separated target alphabet.
        #[arg(long)]
        target: String,
        /// Comma-separated padding bounds, one per erased symbol in alphabet order.
        #[arg(long, value_delimiter = ',')]
        padding: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inverse homomorphic image of a GPFA.
    InvHom {
        #[arg(long = "in")]
        input: PathBuf,
        /// `symbol=image`; the new alphabet is the mapped symbols in the given order.
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reversal of a GPFA.
    Reverse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Left or right quotient of a GPFA by a word.
    Quotient {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        side: Side,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct sum of two GPFAs (values add).
    Union {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tensor product of two GPFAs (values multiply).
    Intersect {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PFA whose comparison with ½ matches the input's comparison with λ.
    ShiftCutpoint {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-state rotation MCQFA over {a} for period m.
    RotMcqfa {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rational GPFA for the free-group word problem of rank k.
    WpGpfa {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// GPFA with extra weight on the empty word.
    AddEps {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "1")]
        delta: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum AnyGpfa {
    Rational(Gpfa<Rational>),
    Float(Gpfa<f64>),
}

fn load_gpfa(path: &Path, eps: f64) -> Result<AnyGpfa> {
    match load_machine(path, eps)? {
        AnyMachine::Gpfa(g) => Ok(AnyGpfa::Rational(g)),
        AnyMachine::GpfaFloat(g) => Ok(AnyGpfa::Float(g)),
        other => bail!("{} holds a {} machine; this construction needs a gpfa", path.display(), other.kind()),
    }
}

fn load_pfa(path: &Path, eps: f64) -> Result<qfa_core::Pfa> {
    match load_machine(path, eps)? {
        AnyMachine::Pfa(p) => Ok(p),
        other => bail!("{} holds a {} machine; this construction needs a pfa", path.display(), other.kind()),
    }
}

/// Applies a kind-generic construction to a loaded GPFA.
macro_rules! on_gpfa {
    ($g:expr, $x:ident => $body:expr) => {
        match $g {
            AnyGpfa::Rational($x) => AnyMachine::from($body),
            AnyGpfa::Float($x) => AnyMachine::from($body),
        }
    };
}

macro_rules! on_gpfa_pair {
    ($a:expr, $b:expr, ($x:ident, $y:ident) => $body:expr) => {
        match ($a, $b) {
            (AnyGpfa::Rational($x), AnyGpfa::Rational($y)) => AnyMachine::from($body),
            (AnyGpfa::Float($x), AnyGpfa::Float($y)) => AnyMachine::from($body),
            _ => bail!("both machines must use the same scalar kind"),
        }
    };
}

fn scalar_as<T: Field>(text: &str) -> Result<T> {
    Ok(T::from_scalar(&Scalar::parse_as(text, T::KIND)?)?)
}

fn split_map(text: &str) -> Result<(&str, &str)> {
    text.split_once('=')
        .with_context(|| format!("mapping {text:?} must look like symbol=image"))
}

fn symbol_list(text: &str) -> Result<Alphabet> {
    Ok(Alphabet::new(text.split(',').map(str::trim).filter(|s| !s.is_empty()))?)
}

fn homomorphism(source: &Alphabet, target: &Alphabet, maps: &[String]) -> Result<Homomorphism> {
    let pairs = maps.iter().map(|m| split_map(m)).collect::<Result<Vec<_>>>()?;
    Ok(Homomorphism::from_pairs(source.clone(), target.clone(), &pairs)?)
}

fn rational_grid(m: &Matrix<Rational>) -> Value {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| Value::String(format_rational(x))).collect::<Vec<_>>())
        .collect()
}

fn emit(doc: String, summary: Value, out: Option<&Path>, json_mode: bool) -> Result<RunOutcome> {
    match out {
        Some(path) => {
            std::fs::write(path, &doc).with_context(|| format!("writing {}", path.display()))?;
            if json_mode {
                let mut s = summary;
                s["out"] = json!(path.display().to_string());
                println!("{s}");
            } else {
                let states = summary.get("states").and_then(Value::as_u64).unwrap_or(0);
                let kind = summary.get("kind").and_then(Value::as_str).unwrap_or("machine");
                println!("wrote {kind} with {states} states to {}", path.display());
            }
        }
        None => print!("{doc}"),
    }
    Ok(RunOutcome::Ok)
}

fn emit_machine(m: AnyMachine, out: &Option<PathBuf>, json_mode: bool) -> Result<RunOutcome> {
    let summary = json!({
        "kind": m.kind().to_string(),
        "scalar": m.scalar_kind().to_string(),
        "states": m.state_count(),
        "alphabet": m.alphabet().symbols(),
    });
    emit(m.to_json(), summary, out.as_deref(), json_mode)
}

pub fn run(target: &Target, json_mode: bool, eps: f64) -> Result<RunOutcome> {
    let machine = match target {
        Target::Pfa2nqfa { input, out } => {
            let p = load_pfa(input, eps)?;
            return emit_machine(c::pfa_to_nqfa(&p)?.into(), out, json_mode);
        }
        Target::Extend { input, out } => {
            let e = c::extend_pfa(&load_pfa(input, eps)?);
            let matrices: serde_json::Map<String, Value> =
                e.matrices().map(|(name, m)| (name.to_string(), rational_grid(m))).collect();
            let doc = json!({
                "original_states": e.original_states(),
                "n": e.state_count(),
                "readout": e.original_states(),
                "matrices": matrices,
            });
            let summary = json!({ "kind": "extended", "states": e.state_count() });
            return emit(serde_json::to_string_pretty(&doc)? + "\n", summary, out.as_deref(), json_mode);
        }
        Target::Complete { input, out } => {
            let p = load_pfa(input, eps)?;
            let e = c::extend_pfa(&p);
            let done = c::unitary_complete(&e);
            let symbols: serde_json::Map<String, Value> = done
                .symbols(p.alphabet())
                .map(|(name, s)| {
                    (
                        name.to_string(),
                        json!({
                            "scale": s.scale,
                            "defect": qfa_core::numeric::unitarity_defect(&s.unitary),
                            "unitary": s.unitary.to_rows(),
                        }),
                    )
                })
                .collect();
            let doc = json!({ "block_dim": done.block_dim, "symbols": symbols });
            let summary = json!({ "kind": "completion", "states": 3 * done.block_dim });
            return emit(serde_json::to_string_pretty(&doc)? + "\n", summary, out.as_deref(), json_mode);
        }
        Target::ShiftCutpoint { input, lambda, out } => {
            let p = load_pfa(input, eps)?;
            let l = parse_rational(lambda)?;
            return emit_machine(c::shift_cutpoint(&p, &l)?.into(), out, json_mode);
        }
        Target::RotMcqfa { m, out } => return emit_machine(c::rotation_mcqfa(*m)?.into(), out, json_mode),
        Target::WpGpfa { k, out } => return emit_machine(c::word_problem_gpfa(*k)?.into(), out, json_mode),
        Target::Concat { first, second, .. } => {
            on_gpfa_pair!(load_gpfa(first, eps)?, load_gpfa(second, eps)?, (a, b) => c::gpfa_concat(&a, &b)?)
        }
        Target::Union { first, second, .. } => {
            on_gpfa_pair!(load_gpfa(first, eps)?, load_gpfa(second, eps)?, (a, b) => c::gpfa_union(&a, &b)?)
        }
        Target::Intersect { first, second, .. } => {
            on_gpfa_pair!(load_gpfa(first, eps)?, load_gpfa(second, eps)?, (a, b) => c::gpfa_intersection(&a, &b)?)
        }
        Target::Star { input, add_eps, .. } => on_gpfa!(load_gpfa(input, eps)?, g => {
            let g = match add_eps {
                Some(d) => c::add_epsilon(&g, scalar_as(d)?),
                None => g,
            };
            c::gpfa_star(&g)
        }),
        Target::AddEps { input, delta, .. } => {
            on_gpfa!(load_gpfa(input, eps)?, g => c::add_epsilon(&g, scalar_as(delta)?))
        }
        Target::Reverse { input, .. } => on_gpfa!(load_gpfa(input, eps)?, g => c::gpfa_reverse(&g)),
        Target::Quotient { input, word, side, .. } => on_gpfa!(load_gpfa(input, eps)?, g => {
            let w = g.alphabet().parse_word(word)?;
            c::gpfa_quotient(&g, &w, *side)?
        }),
        Target::Hom { input, maps, target, padding, .. } => on_gpfa!(load_gpfa(input, eps)?, g => {
            let h = homomorphism(g.alphabet(), &symbol_list(target)?, maps)?;
            c::gpfa_hom(&g, &h, padding)?
        }),
        Target::InvHom { input, maps, .. } => on_gpfa!(load_gpfa(input, eps)?, g => {
            let keys = maps.iter().map(|m| split_map(m).map(|(k, _)| k)).collect::<Result<Vec<_>>>()?;
            let source = Alphabet::new(keys)?;
            let h = homomorphism(&source, g.alphabet(), maps)?;
            c::gpfa_inverse_hom(&g, &h)?
        }),
    };
    let out = match target {
        Target::Concat { out, .. }
        | Target::Union { out, .. }
        | Target::Intersect { out, .. }
        | Target::Star { out, .. }
        | Target::AddEps { out, .. }
        | Target::Reverse { out, .. }
        | Target::Quotient { out, .. }
        | Target::Hom { out, .. }
        | Target::InvHom { out, .. } => out,
        _ => unreachable!("handled above"),
    };
    emit_machine(machine, out, json_mode)
}
