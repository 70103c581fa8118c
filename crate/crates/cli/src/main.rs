//! `kripke` — finite Kripke model toolkit.
//!
//! Subcommands: `check`, `force`, `localize`, `verify`, `friedman`,
//! `kuroda`, `prune`, `rank`, `depth`, `krank`, `fuzz`. Exit codes: 0 on
//! success, 1 on semantic failure (validation or verification found a
//! problem), 2 on input errors (unreadable files, parse errors, unknown
//! names).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use kripke_cli::doc::{CertificateDocument, ModelDocument};
use kripke_core::krank::{self, SearchBudget, SearchStatus};
use kripke_core::localize::{self, VerifyConfig};
use kripke_core::testkit::suites;
use kripke_core::{
    classical_truth, forces, infer_signature, parse_formula, validate_model, KripkeModel,
    NodeId, Signature,
};

#[derive(Parser)]
#[command(name = "kripke", version, about = "Finite Kripke models: forcing, translations, localizers, countermodel search")]
struct Cli {
    /// Emit machine-readable JSON instead of prose.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a model document.
    Check { model: PathBuf },
    /// Evaluate forcing and classical truth of a sentence at a node.
    Force { model: PathBuf, node: String, formula: String },
    /// Synthesize a localizer for a node and verify it exhaustively.
    Localize {
        model: PathBuf,
        node: String,
        /// Use parameterized sentential witnesses (requires a tree cone)
        /// and verify through the universally-double-negating translation.
        #[arg(long)]
        sentential: bool,
        /// Propositional exhaustion bound (formula AST size).
        #[arg(long, default_value_t = 7)]
        verify_size: usize,
        /// First-order exhaustion bound (formula AST size).
        #[arg(long, default_value_t = 4)]
        verify_fo_size: usize,
    },
    /// Re-verify a stored certificate against a model.
    Verify {
        model: PathBuf,
        certificate: PathBuf,
        #[arg(long, default_value_t = 7)]
        verify_size: usize,
        #[arg(long, default_value_t = 4)]
        verify_fo_size: usize,
    },
    /// Print the Friedman translation of a formula by a sentence.
    Friedman {
        formula: String,
        rho: String,
        /// Model file supplying the signature; inferred from usage if absent.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Print the universally-double-negating variant of a formula.
    Kuroda {
        formula: String,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Remove every node forcing a sentence.
    Prune { model: PathBuf, rho: String },
    /// Antichain rank of a model.
    Rank { model: PathBuf },
    /// Depth of a node (edges on the longest upward chain).
    Depth { model: PathBuf, node: String },
    /// Bounded countermodel search for a propositional formula.
    Krank {
        formula: String,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
    },
    /// Run a randomized property suite.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// One of: oracle, pruning, assoc, localizer.
        #[arg(long)]
        suite: String,
    },
}

enum Failure {
    /// Exit 1: the inputs were well-formed but a property does not hold.
    Semantic(String),
    /// Exit 2: the inputs could not be understood.
    Input(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Semantic(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_document(path: &Path) -> Result<ModelDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("malformed model document {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<KripkeModel, Failure> {
    let raw = load_document(path)?.to_raw().map_err(Failure::Input)?;
    KripkeModel::from_raw(&raw)
        .map_err(|report| Failure::Input(format!("invalid model {}: {report}", path.display())))
}

fn node_of(m: &KripkeModel, name: &str) -> Result<NodeId, Failure> {
    m.node(name).ok_or_else(|| Failure::Input(format!("unknown node `{name}`")))
}

/// Signature for a standalone formula command: from a model file when given,
/// otherwise inferred jointly from all the texts.
fn standalone_signature(
    model: &Option<PathBuf>,
    texts: &[&str],
) -> Result<Signature, Failure> {
    if let Some(path) = model {
        return Ok(load_model(path)?.signature().clone());
    }
    let mut relations: Vec<(String, usize)> = Vec::new();
    let mut prop_atoms: Vec<String> = Vec::new();
    let mut first_order = false;
    for text in texts {
        let (_, sig) = infer_signature(text).map_err(Failure::input)?;
        match sig {
            Signature::Propositional { atoms } => {
                for a in atoms {
                    if !prop_atoms.contains(&a) {
                        prop_atoms.push(a);
                    }
                }
            }
            Signature::FirstOrder { relations: rels, .. } => {
                first_order = true;
                for (n, a) in rels {
                    match relations.iter().find(|(m, _)| *m == n) {
                        Some((_, b)) if *b != a => {
                            return Err(Failure::Input(format!(
                                "symbol `{n}` used with arities {b} and {a}"
                            )));
                        }
                        Some(_) => {}
                        None => relations.push((n, a)),
                    }
                }
            }
        }
    }
    if first_order {
        for a in prop_atoms {
            if !relations.iter().any(|(n, _)| *n == a) {
                relations.push((a, 0));
            }
        }
        Signature::first_order(relations, Vec::<String>::new()).map_err(Failure::input)
    } else {
        prop_atoms.sort();
        Signature::propositional(prop_atoms).map_err(Failure::input)
    }
}

fn emit(json_mode: bool, value: serde_json::Value, human: String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        println!("{human}");
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Check { model } => {
            let raw = load_document(model)?.to_raw().map_err(Failure::Input)?;
            let report = validate_model(&raw);
            if report.is_valid() {
                emit(cli.json, json!({"valid": true, "errors": []}), "valid".to_string());
                Ok(())
            } else {
                let errors: Vec<String> = report.errors.iter().map(|e| e.to_string()).collect();
                if cli.json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({"valid": false, "errors": errors}))
                            .unwrap()
                    );
                }
                Err(Failure::Semantic(errors.join("\n")))
            }
        }
        Cmd::Force { model, node, formula } => {
            let m = load_model(model)?;
            let alpha = node_of(&m, node)?;
            let f = parse_formula(formula, m.signature()).map_err(Failure::input)?;
            let forced = forces(&m, alpha, &f).map_err(Failure::input)?;
            let classical = classical_truth(&m, alpha, &f).map_err(Failure::input)?;
            emit(
                cli.json,
                json!({"forced": forced, "classical": classical}),
                format!(
                    "forcing: {}\nclassical: {}",
                    if forced { "forced" } else { "not forced" },
                    classical
                ),
            );
            Ok(())
        }
        Cmd::Localize { model, node, sentential, verify_size, verify_fo_size } => {
            let m = load_model(model)?;
            let alpha = node_of(&m, node)?;
            let config = VerifyConfig {
                prop_size: *verify_size,
                fo_size: *verify_fo_size,
                ..VerifyConfig::default()
            };
            let cert = if *sentential {
                localize::localize_sentential(&m, alpha)
            } else {
                localize::localize(&m, alpha)
            }
            .map_err(|e| Failure::Input(e.to_string()))?;
            let report = localize::verify_localizer(&m, &cert, &config)
                .map_err(|e| Failure::Input(e.to_string()))?;
            let document = CertificateDocument::from_certificate(&cert, Some((&report, &config)));
            let human = {
                let mut lines = vec![
                    format!("target: {}", document.target),
                    format!("mode: {}", document.mode),
                    format!("rho: {}", document.rho),
                ];
                for (i, t) in document.trace.iter().enumerate() {
                    lines.push(format!(
                        "step {}: witness {} pruned [{}]",
                        i + 1,
                        t.witness,
                        t.pruned.join(", ")
                    ));
                }
                lines.push(format!(
                    "verification: {} formulas checked, {} mismatches, chain class {}",
                    report.checked,
                    report.mismatches.len(),
                    if report.chain_class_ok { "ok" } else { "violated" }
                ));
                lines.join("\n")
            };
            emit(cli.json, serde_json::to_value(&document).unwrap(), human);
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::Semantic("verification failed".to_string()))
            }
        }
        Cmd::Verify { model, certificate, verify_size, verify_fo_size } => {
            let m = load_model(model)?;
            let text = std::fs::read_to_string(certificate)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", certificate.display())))?;
            let document: CertificateDocument = serde_json::from_str(&text).map_err(|e| {
                Failure::Input(format!("malformed certificate {}: {e}", certificate.display()))
            })?;
            let cert = document.to_certificate(&m).map_err(Failure::Input)?;
            let config = VerifyConfig {
                prop_size: *verify_size,
                fo_size: *verify_fo_size,
                ..VerifyConfig::default()
            };
            let report = localize::verify_localizer(&m, &cert, &config)
                .map_err(|e| Failure::Input(e.to_string()))?;
            let mismatches: Vec<String> =
                report.mismatches.iter().map(|mm| mm.formula.to_string()).collect();
            emit(
                cli.json,
                json!({
                    "checked": report.checked,
                    "mismatches": mismatches,
                    "chain_class_ok": report.chain_class_ok,
                    "ok": report.ok(),
                }),
                format!(
                    "checked: {}\nmismatches: {}\nchain class: {}\nverdict: {}",
                    report.checked,
                    report.mismatches.len(),
                    if report.chain_class_ok { "ok" } else { "violated" },
                    if report.ok() { "verified" } else { "REFUTED" }
                ),
            );
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::Semantic("certificate verification failed".to_string()))
            }
        }
        Cmd::Friedman { formula, rho, model } => {
            let sig = standalone_signature(model, &[formula, rho])?;
            let f = parse_formula(formula, &sig).map_err(Failure::input)?;
            let r = parse_formula(rho, &sig).map_err(Failure::input)?;
            let out = kripke_core::friedman(&f, &r).map_err(Failure::input)?;
            emit(cli.json, json!({"formula": out.to_string()}), out.to_string());
            Ok(())
        }
        Cmd::Kuroda { formula, model } => {
            let sig = standalone_signature(model, &[formula])?;
            let f = parse_formula(formula, &sig).map_err(Failure::input)?;
            let out = kripke_core::kuroda_variant(&f);
            emit(cli.json, json!({"formula": out.to_string()}), out.to_string());
            Ok(())
        }
        Cmd::Prune { model, rho } => {
            let m = load_model(model)?;
            let r = parse_formula(rho, m.signature()).map_err(Failure::input)?;
            let pruned = localize::prune(&m, &r).map_err(|e| match e {
                localize::LocalizeError::PruneEmpty => Failure::Semantic(e.to_string()),
                other => Failure::Input(other.to_string()),
            })?;
            let document = ModelDocument::from_raw(&pruned.to_raw());
            let kept: Vec<String> =
                pruned.nodes().map(|n| pruned.node_name(n).to_string()).collect();
            emit(
                cli.json,
                serde_json::to_value(&document).unwrap(),
                format!("kept {} of {} nodes: [{}]", kept.len(), m.node_count(), kept.join(", ")),
            );
            Ok(())
        }
        Cmd::Rank { model } => {
            let m = load_model(model)?;
            let r = localize::rank(&m);
            emit(
                cli.json,
                json!({"rank": [r.infinite_members, r.max_finite]}),
                format!("rank: {r}"),
            );
            Ok(())
        }
        Cmd::Depth { model, node } => {
            let m = load_model(model)?;
            let alpha = node_of(&m, node)?;
            let d = m.depth(alpha);
            emit(cli.json, json!({"depth": d}), format!("depth: {d}"));
            Ok(())
        }
        Cmd::Krank { formula, max_nodes } => {
            let (f, _) = infer_signature(formula).map_err(Failure::input)?;
            let report = krank::kripke_rank(&f, SearchBudget { max_nodes: *max_nodes })
                .map_err(Failure::input)?;
            let witness_doc = report
                .witness
                .as_ref()
                .map(|(m, root)| {
                    (
                        ModelDocument::from_raw(&m.to_raw()),
                        m.node_name(*root).to_string(),
                    )
                });
            let human = match report.status {
                SearchStatus::Refuted => {
                    let (wm, root) = report.witness.as_ref().unwrap();
                    format!(
                        "status: refuted\nmin depth: {}\nexact within budget (max nodes {}): {}\nwitness root: {}\nwitness nodes: {}",
                        report.min_depth.unwrap(),
                        report.budget.max_nodes,
                        report.exact,
                        wm.node_name(*root),
                        wm.node_count()
                    )
                }
                SearchStatus::NotRefutedWithinBudget => format!(
                    "status: not refuted within budget (max nodes {})\nexact within budget: {}",
                    report.budget.max_nodes, report.exact
                ),
            };
            emit(
                cli.json,
                json!({
                    "status": match report.status {
                        SearchStatus::Refuted => "refuted",
                        SearchStatus::NotRefutedWithinBudget => "not-refuted-within-budget",
                    },
                    "min_depth": report.min_depth,
                    "exact": report.exact,
                    "budget": {"max_nodes": report.budget.max_nodes},
                    "atoms": report.atoms,
                    "witness": witness_doc.as_ref().map(|(d, _)| serde_json::to_value(d).unwrap()),
                    "witness_root": witness_doc.as_ref().map(|(_, r)| r.clone()),
                }),
                human,
            );
            Ok(())
        }
        Cmd::Fuzz { seed, iters, suite } => {
            let outcome = suites::run_named_suite(suite, *seed, *iters).map_err(Failure::Input)?;
            let failures: Vec<serde_json::Value> = outcome
                .failures
                .iter()
                .map(|f| {
                    json!({
                        "iteration": f.iteration,
                        "model": serde_json::to_value(ModelDocument::from_raw(&f.model)).unwrap(),
                        "node": f.node,
                        "formulas": f.formulas.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "detail": f.detail,
                    })
                })
                .collect();
            let mut human = outcome.summary();
            for f in &outcome.failures {
                human.push_str(&format!(
                    "\nfailure at iteration {}: {}\n  node: {}\n  formulas: [{}]\n  model: {}",
                    f.iteration,
                    f.detail,
                    f.node.clone().unwrap_or_else(|| "-".into()),
                    f.formulas.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
                    serde_json::to_string(&ModelDocument::from_raw(&f.model)).unwrap(),
                ));
            }
            emit(
                cli.json,
                json!({
                    "suite": outcome.name,
                    "iterations": outcome.iterations,
                    "comparisons": outcome.comparisons,
                    "failures": failures,
                }),
                human,
            );
            if outcome.passed() {
                Ok(())
            } else {
                Err(Failure::Semantic(format!("{} failures", outcome.failures.len())))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
