use std::path::Path;

use anyhow::{Context, Result};
use serde_json::json;

use qfa_core::automata::{Alphabet, Pfa};
use qfa_core::constructions::{neq_mcqfa, pfa_to_nqfa, rotation_mcqfa, word_problem_gpfa};
use qfa_core::document::AnyMachine;
use qfa_core::numeric::{ratio, Matrix};

use crate::RunOutcome;

/// Two states over `{a}`: each `a` moves to the absorbing accepting state
/// with probability ½.
pub fn coin_pfa() -> Pfa {
    let a = Matrix::from_rows(vec![
        vec![ratio(1, 2), ratio(1, 2)],
        vec![ratio(0, 1), ratio(1, 1)],
    ])
    .expect("square");
    Pfa::without_markers(Alphabet::chars("a"), vec![a], &[1]).expect("stochastic")
}

pub fn run(dir: &Path, m: u32, theta: f64, json_mode: bool) -> Result<RunOutcome> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let coin = coin_pfa();
    let machines: Vec<(String, AnyMachine)> = vec![
        (format!("rotation-{m}.json"), rotation_mcqfa(m)?.into()),
        ("neq.json".into(), neq_mcqfa(theta).into()),
        ("word-problem-2.json".into(), word_problem_gpfa(2)?.into()),
        ("coin-pfa.json".into(), coin.clone().into()),
        ("coin-nqfa.json".into(), pfa_to_nqfa(&coin)?.into()),
    ];
    let mut written = Vec::new();
    for (name, machine) in &machines {
        let path = dir.join(name);
        std::fs::write(&path, machine.to_json()).with_context(|| format!("writing {}", path.display()))?;
        written.push(json!({
            "file": path.display().to_string(),
            "kind": machine.kind().to_string(),
            "states": machine.state_count(),
        }));
        if !json_mode {
            println!("{}: {} with {} states", path.display(), machine.kind(), machine.state_count());
        }
    }
    if json_mode {
        println!("{}", json!({ "written": written }));
    }
    Ok(RunOutcome::Ok)
}
