//! Reusable randomized and exhaustive property suites. The fuzz command
//! runs them at configurable sizes; the acceptance tests pin the sizes.
//!
//! Every suite reports the number of individual comparisons it made and a
//! list of failures with minimized counterexamples; an honest run of a
//! correct build returns zero failures.

use std::collections::BTreeMap;

use crate::enumerate::{compute_tables, full_mask, EngineCtx, FormulaPool, TableMode, Translation};
use crate::krank;
use crate::localize::{
    localize, localize_sentential, verify_localizer, LocalizeError, Rank, VerifyConfig,
};
use crate::model::{witness_for, KripkeModel, NodeId, RawModel, WitnessPreference};
use crate::semantics::{Evaluator, SemanticsError};
use crate::syntax::Formula;
use crate::testkit::{
    naive_forces, random_formula_with, random_model_with, shrink_formula, shrink_model, GenParams,
};
use crate::translate::friedman;

#[derive(Clone, Debug)]
pub struct Failure {
    pub iteration: usize,
    pub model: RawModel,
    pub node: Option<String>,
    pub formulas: Vec<Formula>,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub iterations: usize,
    pub comparisons: u64,
    pub failures: Vec<Failure>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome { name, iterations: 0, comparisons: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "suite={} iterations={} comparisons={} failures={}",
            self.name,
            self.iterations,
            self.comparisons,
            self.failures.len()
        )
    }
}

/// Alternates the corpus between propositional and first-order shapes.
fn corpus_params(iteration: usize, base_seed: u64) -> GenParams {
    let first_order = iteration % 2 == 1;
    GenParams {
        seed: base_seed ^ (iteration as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        max_nodes: if first_order { 5 } else { 6 },
        first_order,
        ..GenParams::default()
    }
}

/// Elements present in every node's domain, usable as parameters anywhere.
fn shared_elements(m: &KripkeModel) -> Vec<String> {
    let mut nodes = m.nodes();
    let first = match nodes.next() {
        Some(n) => n,
        None => return Vec::new(),
    };
    m.domain_elems(first)
        .filter(|&e| m.nodes().all(|n| m.domain_contains(n, e)))
        .map(|e| m.element_name(e).to_string())
        .collect()
}

/// Differential oracle: the memoized evaluator against the naive clause
/// transcription, on random (model, node, sentence) triples.
pub fn oracle_suite(seed: u64, iterations: usize, max_formula_size: usize) -> SuiteOutcome {
    oracle_suite_with(seed, iterations, max_formula_size, |m, n, f| {
        crate::semantics::forces(m, n, f)
    })
}

/// As [`oracle_suite`] with an injected evaluator, so the harness itself
/// can be tested against deliberately broken evaluators.
pub fn oracle_suite_with(
    seed: u64,
    iterations: usize,
    max_formula_size: usize,
    eval: impl Fn(&KripkeModel, NodeId, &Formula) -> Result<bool, SemanticsError>,
) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("oracle");
    for it in 0..iterations {
        let params =
            GenParams { max_formula_size, ..corpus_params(it, seed) };
        let mut rng = params.rng();
        let m = random_model_with(&mut rng, &params);
        let node = NodeId((it % m.node_count()) as u32);
        let pool: Vec<String> =
            m.domain_elems(node).map(|e| m.element_name(e).to_string()).collect();
        let f = random_formula_with(&mut rng, &params, m.signature(), &pool);
        out.iterations += 1;
        out.comparisons += 1;
        let expected = naive_forces(&m, node, &f).expect("generated queries are valid");
        let got = eval(&m, node, &f).expect("generated queries are valid");
        if expected != got {
            let disagrees = |m: &KripkeModel, f: &Formula| {
                m.nodes().any(|n| match (naive_forces(m, n, f), eval(m, n, f)) {
                    (Ok(a), Ok(b)) => a != b,
                    _ => false,
                })
            };
            let small = shrink_model(&m, |cand| disagrees(cand, &f));
            let small_f = shrink_formula(&f, |g| disagrees(&small, g));
            let node_name = small
                .nodes()
                .find(|&n| match (naive_forces(&small, n, &small_f), eval(&small, n, &small_f)) {
                    (Ok(a), Ok(b)) => a != b,
                    _ => false,
                })
                .map(|n| small.node_name(n).to_string());
            out.failures.push(Failure {
                iteration: it,
                model: small.to_raw(),
                node: node_name,
                formulas: vec![small_f.clone()],
                detail: format!(
                    "evaluator disagrees with naive oracle on `{small_f}` (naive={})",
                    !got
                ),
            });
        }
    }
    out
}

/// Exhaustive differential leg: every enumerated 2-atom model up to
/// `max_nodes` nodes, times every propositional formula up to `prop_size`.
pub fn oracle_exhaustive(max_nodes: usize, prop_size: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("oracle-exhaustive");
    let atoms = vec!["p".to_string(), "q".to_string()];
    let sig = crate::syntax::Signature::propositional(atoms.iter().cloned()).unwrap();
    let pool = FormulaPool::build(&sig, prop_size, 0, 0);
    let formulas: Vec<Formula> = pool.sentence_formulas(&[]).collect();
    for m in krank::enumerate_models(&atoms, max_nodes) {
        out.iterations += 1;
        let mut ev = Evaluator::new(&m);
        for f in &formulas {
            for node in m.nodes() {
                out.comparisons += 1;
                let fast = ev.forces(node, f).unwrap();
                let slow = naive_forces(&m, node, f).unwrap();
                if fast != slow {
                    out.failures.push(Failure {
                        iteration: out.iterations - 1,
                        model: m.to_raw(),
                        node: Some(m.node_name(node).to_string()),
                        formulas: vec![f.clone()],
                        detail: format!("evaluator={fast}, naive={slow} on `{f}`"),
                    });
                }
            }
        }
    }
    out
}

/// Pruning correspondence: for random (model, closed rho) pairs with a
/// nonempty pruned model, forcing in the pruned model agrees with forcing
/// of the translated formula in the full model, at every surviving node,
/// exhaustively over enumerated sentences.
pub fn pruning_suite(seed: u64, pairs: usize, config: &VerifyConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("pruning");
    let mut pools: BTreeMap<(bool, usize), FormulaPool> = BTreeMap::new();
    let mut it = 0usize;
    while out.iterations < pairs {
        let params = corpus_params(it, seed);
        it += 1;
        let mut rng = params.rng();
        let m = random_model_with(&mut rng, &params);
        let shared = shared_elements(&m);
        let rho_params = GenParams { max_formula_size: 6, ..params.clone() };
        let rho = random_formula_with(&mut rng, &rho_params, m.signature(), &shared);

        let mut ev = Evaluator::new(&m);
        let mut rho_forced = 0u64;
        for node in m.nodes() {
            if ev.forces(node, &rho).expect("rho parameters are shared") {
                rho_forced |= 1 << node.index();
            }
        }
        if rho_forced == full_mask(m.node_count()) {
            continue; // empty pruned model; pair does not qualify
        }
        out.iterations += 1;

        let alive = full_mask(m.node_count()) & !rho_forced;
        let (size, qdepth) = if params.first_order {
            (config.fo_size, config.fo_qdepth)
        } else {
            (config.prop_size, 0)
        };
        let slot_elems: Vec<crate::model::ElemId> =
            shared.iter().map(|e| m.element(e).unwrap()).collect();
        let pool = pools.entry((params.first_order, slot_elems.len())).or_insert_with(|| {
            FormulaPool::build(m.signature(), size, qdepth, slot_elems.len())
        });

        let full_ctx = EngineCtx::full(&m, slot_elems.clone());
        let pruned_ctx = EngineCtx { model: &m, slot_elems, alive };
        let translated =
            compute_tables(pool, &full_ctx, TableMode::Force, Some(Translation { rho_forced, kuroda: false }));
        let in_pruned = compute_tables(pool, &pruned_ctx, TableMode::Force, None);
        let n = m.node_count();
        let mut bad: Option<(String, Formula)> = None;
        for &id in &pool.sentences {
            for node in m.nodes() {
                if alive >> node.index() & 1 == 0 {
                    continue;
                }
                out.comparisons += 1;
                let lhs = in_pruned[id as usize * n + node.index()] & 1 == 1;
                let rhs = translated[id as usize * n + node.index()] & 1 == 1;
                if lhs != rhs {
                    bad = Some((
                        m.node_name(node).to_string(),
                        pool.to_formula(id, &shared),
                    ));
                    break;
                }
            }
            if bad.is_some() {
                break;
            }
        }
        if let Some((node, formula)) = bad {
            out.failures.push(Failure {
                iteration: out.iterations - 1,
                model: m.to_raw(),
                node: Some(node),
                formulas: vec![formula.clone(), rho.clone()],
                detail: format!(
                    "pruned forcing of `{formula}` disagrees with forcing of its translation by `{rho}`"
                ),
            });
        }
    }
    out
}

/// Associativity of iterated translation: translating by `rho1^rho2` agrees
/// node-by-node with translating by `rho1` and then `rho2`.
pub fn assoc_suite(seed: u64, iterations: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("assoc");
    for it in 0..iterations {
        let params = corpus_params(it, seed);
        let mut rng = params.rng();
        let m = random_model_with(&mut rng, &params);
        let shared = shared_elements(&m);
        let small = GenParams { max_formula_size: 6, ..params.clone() };
        let a = random_formula_with(&mut rng, &small, m.signature(), &shared);
        let rho1 = random_formula_with(&mut rng, &small, m.signature(), &shared);
        let rho2 = random_formula_with(&mut rng, &small, m.signature(), &shared);

        let lhs = friedman(&a, &friedman(&rho1, &rho2).unwrap()).unwrap();
        let rhs = friedman(&friedman(&a, &rho1).unwrap(), &rho2).unwrap();
        out.iterations += 1;
        let mut ev = Evaluator::new(&m);
        let mismatch = m.nodes().find(|&node| {
            out.comparisons += 1;
            ev.forces(node, &lhs).unwrap() != ev.forces(node, &rhs).unwrap()
        });
        if let Some(node) = mismatch {
            let disagrees = |cand: &KripkeModel| {
                let mut e = Evaluator::new(cand);
                cand.nodes().any(|n| {
                    matches!(
                        (e.forces(n, &lhs), e.forces(n, &rhs)),
                        (Ok(x), Ok(y)) if x != y
                    )
                })
            };
            let smallm = shrink_model(&m, disagrees);
            out.failures.push(Failure {
                iteration: it,
                model: smallm.to_raw(),
                node: Some(m.node_name(node).to_string()),
                formulas: vec![a, rho1, rho2],
                detail: "iterated translation not associative".into(),
            });
        }
    }
    out
}

/// Localizer synthesis plus full verification on every node of a random
/// corpus; in sentential mode restricted to tree cones, also checking that
/// the weakly-classical base case coincides with the structural test.
pub fn localizer_suite(
    seed: u64,
    prop_models: usize,
    fo_models: usize,
    sentential: bool,
    config: &VerifyConfig,
) -> SuiteOutcome {
    let mut out =
        SuiteOutcome::new(if sentential { "localizer-sentential" } else { "localizer" });
    let mut run = |params: GenParams, it: usize| {
        let m = random_model_with(&mut params.rng(), &params);
        out.iterations += 1;
        for node in m.nodes() {
            if sentential && !m.is_tree_cone(node) {
                continue;
            }
            let cert = if sentential {
                localize_sentential(&m, node)
            } else {
                localize(&m, node)
            };
            let cert = match cert {
                Ok(c) => c,
                Err(e) => {
                    out.failures.push(Failure {
                        iteration: it,
                        model: m.to_raw(),
                        node: Some(m.node_name(node).to_string()),
                        formulas: vec![],
                        detail: format!("synthesis failed: {e}"),
                    });
                    continue;
                }
            };
            if cert.trace.len() > m.depth(node) {
                out.failures.push(Failure {
                    iteration: it,
                    model: m.to_raw(),
                    node: Some(m.node_name(node).to_string()),
                    formulas: vec![cert.rho().clone()],
                    detail: format!(
                        "trace length {} exceeds node depth {}",
                        cert.trace.len(),
                        m.depth(node)
                    ),
                });
            }
            if sentential {
                out.comparisons += 1;
                if !weakly_classical_matches_structural(&m, node) {
                    out.failures.push(Failure {
                        iteration: it,
                        model: m.to_raw(),
                        node: Some(m.node_name(node).to_string()),
                        formulas: vec![],
                        detail: "weakly classical test diverges from structural test".into(),
                    });
                }
            }
            match verify_localizer(&m, &cert, config) {
                Ok(report) => {
                    out.comparisons += report.checked as u64;
                    if !report.chain_class_ok {
                        out.failures.push(Failure {
                            iteration: it,
                            model: m.to_raw(),
                            node: Some(m.node_name(node).to_string()),
                            formulas: vec![cert.rho().clone()],
                            detail: "certificate chain fails its class check".into(),
                        });
                    }
                    for mm in report.mismatches {
                        out.failures.push(Failure {
                            iteration: it,
                            model: m.to_raw(),
                            node: Some(m.node_name(node).to_string()),
                            formulas: vec![mm.formula.clone(), cert.rho().clone()],
                            detail: format!(
                                "localizer mismatch on `{}`: translated forcing {} vs classical {}",
                                mm.formula, mm.translated_forced, mm.classical
                            ),
                        });
                    }
                }
                Err(e) => out.failures.push(Failure {
                    iteration: it,
                    model: m.to_raw(),
                    node: Some(m.node_name(node).to_string()),
                    formulas: vec![cert.rho().clone()],
                    detail: format!("verification error: {e}"),
                }),
            }
        }
    };
    for i in 0..prop_models {
        let params = GenParams {
            seed: seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            first_order: false,
            ..GenParams::default()
        };
        run(params, i);
    }
    for i in 0..fo_models {
        let params = GenParams {
            seed: seed ^ 0xabcd ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            first_order: true,
            max_nodes: 5,
            ..GenParams::default()
        };
        run(params, prop_models + i);
    }
    out
}

/// Recognizes `A | ~A`, optionally under a universal prefix.
fn pem_shape(f: &Formula) -> bool {
    let mut cur = f;
    while let Formula::Forall(_, body) = cur {
        cur = body;
    }
    match cur {
        Formula::Or(a, neg) => match &**neg {
            Formula::Imp(a2, bot) => a == a2 && **bot == Formula::Bot,
            _ => false,
        },
        _ => false,
    }
}

/// Weakly classical means forcing every sentential excluded-middle instance
/// over the node's local language; on finite models with identity equality
/// this must agree with the structural cone-stability test. Checked by
/// sampling the witness shapes (parameterized atoms and cardinality
/// sentences) positively and by witness extraction negatively.
pub fn weakly_classical_matches_structural(m: &KripkeModel, node: NodeId) -> bool {
    let mut ev = Evaluator::new(m);
    if m.is_classical(node) {
        // Every sampled sentential instance must be forced.
        for f in crate::localize::targeted_formulas(m, node) {
            if f.parameters().iter().all(|p| {
                m.element(p).map(|e| m.domain_contains(node, e)).unwrap_or(false)
            }) && matches!(f, Formula::Or(..))
                && pem_shape(&f)
                && !ev.forces(node, &f).unwrap_or(true)
            {
                return false;
            }
        }
        if !m.signature().is_first_order() {
            // Propositional: all atom instances.
            for (_, name, _) in m.predicates() {
                let atom = Formula::atom(name);
                let inst = atom.clone().or(atom.neg());
                if !ev.forces(node, &inst).unwrap_or(true) {
                    return false;
                }
            }
        }
        true
    } else {
        // A sentential witness must exist and be unforced.
        match witness_for(m, node, true, WitnessPreference::AtomicFirst) {
            Ok(w) => !ev.forces(node, w.tau.closed()).unwrap_or(true),
            Err(_) => false,
        }
    }
}

/// Classical-node equivalences on a random corpus: the structural test,
/// forcing of sampled rank-1 instances, and agreement of forcing with
/// classical truth over enumerated small sentences must all coincide.
pub fn classical_suite(seed: u64, models: usize, config: &VerifyConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("classical");
    for it in 0..models {
        let params = corpus_params(it, seed);
        let m = random_model_with(&mut params.rng(), &params);
        out.iterations += 1;
        let (size, qdepth) = if params.first_order {
            (config.fo_size, config.fo_qdepth)
        } else {
            (config.prop_size, 0)
        };
        let mut ev = Evaluator::new(&m);
        for node in m.nodes() {
            let structural = m.is_classical(node);
            if structural != crate::model::forces_pem1(&m, node) {
                out.failures.push(Failure {
                    iteration: it,
                    model: m.to_raw(),
                    node: Some(m.node_name(node).to_string()),
                    formulas: vec![],
                    detail: "structural test diverges from forces_pem1".into(),
                });
            }
            // Sampled instances: forced iff classical (negative side via
            // witness extraction).
            out.comparisons += 1;
            if structural {
                for f in crate::localize::targeted_formulas(&m, node) {
                    let params_ok = f
                        .parameters()
                        .iter()
                        .all(|p| m.element(p).map(|e| m.domain_contains(node, e)).unwrap_or(false));
                    if params_ok && pem_shape(&f) {
                        out.comparisons += 1;
                        if !ev.forces(node, &f).unwrap() {
                            out.failures.push(Failure {
                                iteration: it,
                                model: m.to_raw(),
                                node: Some(m.node_name(node).to_string()),
                                formulas: vec![f.clone()],
                                detail: format!("classical node does not force `{f}`"),
                            });
                        }
                    }
                }
            } else {
                match witness_for(&m, node, false, WitnessPreference::GrowthFirst) {
                    Ok(w) => {
                        out.comparisons += 1;
                        if ev.forces(node, w.tau.closed()).unwrap() {
                            out.failures.push(Failure {
                                iteration: it,
                                model: m.to_raw(),
                                node: Some(m.node_name(node).to_string()),
                                formulas: vec![w.tau.closed().clone()],
                                detail: "extracted witness is forced".into(),
                            });
                        }
                        if !crate::localize::is_pem1(&w.tau, config.pem1_budget) {
                            out.failures.push(Failure {
                                iteration: it,
                                model: m.to_raw(),
                                node: Some(m.node_name(node).to_string()),
                                formulas: vec![w.tau.closed().clone()],
                                detail: "witness not classified rank-1".into(),
                            });
                        }
                    }
                    Err(e) => out.failures.push(Failure {
                        iteration: it,
                        model: m.to_raw(),
                        node: Some(m.node_name(node).to_string()),
                        formulas: vec![],
                        detail: format!("no witness at non-classical node: {e}"),
                    }),
                }
            }
        }

        // Forcing agrees with classical truth on all enumerated sentences
        // exactly at structurally classical nodes.
        if EngineCtx::supported(&m, qdepth) {
            for node in m.nodes() {
                let slot_names: Vec<String> =
                    m.domain_elems(node).map(|e| m.element_name(e).to_string()).collect();
                let pool = FormulaPool::build(m.signature(), size, qdepth, slot_names.len());
                let ctx = EngineCtx::full(&m, m.domain_elems(node).collect());
                let forced = compute_tables(&pool, &ctx, TableMode::Force, None);
                let classical = compute_tables(&pool, &ctx, TableMode::Classical, None);
                let n = m.node_count();
                let mut all_agree = true;
                for &id in &pool.sentences {
                    out.comparisons += 1;
                    if forced[id as usize * n + node.index()] & 1
                        != classical[id as usize * n + node.index()] & 1
                    {
                        all_agree = false;
                        break;
                    }
                }
                // The bounded enumeration can miss disagreements at
                // non-classical nodes; the targeted shapes cover those.
                if all_agree && !m.is_classical(node) {
                    let witness = witness_for(&m, node, true, WitnessPreference::AtomicFirst)
                        .map(|w| ev.forces(node, w.tau.closed()).unwrap())
                        .unwrap_or(true);
                    if witness {
                        out.failures.push(Failure {
                            iteration: it,
                            model: m.to_raw(),
                            node: Some(m.node_name(node).to_string()),
                            formulas: vec![],
                            detail: "non-classical node agrees on all sampled sentences".into(),
                        });
                    }
                } else if !all_agree && m.is_classical(node) {
                    out.failures.push(Failure {
                        iteration: it,
                        model: m.to_raw(),
                        node: Some(m.node_name(node).to_string()),
                        formulas: vec![],
                        detail: "classical node disagrees on an enumerated sentence".into(),
                    });
                }
            }
        }
    }
    out
}

/// Dropping non-leaf classical nodes above a node preserves forcing there,
/// exhaustively over enumerated models and propositional sentences.
pub fn restrict_prime_suite(max_nodes: usize, prop_size: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("restrict-prime");
    let atoms = vec!["p".to_string(), "q".to_string()];
    let sig = crate::syntax::Signature::propositional(atoms.iter().cloned()).unwrap();
    let pool = FormulaPool::build(&sig, prop_size, 0, 0);
    for m in krank::enumerate_models(&atoms, max_nodes) {
        out.iterations += 1;
        for node in m.nodes() {
            let prime = m.restrict_prime(node);
            if prime.node_count() == m.node_count() {
                continue;
            }
            let ctx_full = EngineCtx::full(&m, vec![]);
            let ctx_prime = EngineCtx::full(&prime, vec![]);
            let t_full = compute_tables(&pool, &ctx_full, TableMode::Force, None);
            let t_prime = compute_tables(&pool, &ctx_prime, TableMode::Force, None);
            let target_full = node.index();
            let target_prime = prime.node(m.node_name(node)).unwrap().index();
            for &id in &pool.sentences {
                out.comparisons += 1;
                let a = t_full[id as usize * m.node_count() + target_full] & 1;
                let b = t_prime[id as usize * prime.node_count() + target_prime] & 1;
                if a != b {
                    out.failures.push(Failure {
                        iteration: out.iterations - 1,
                        model: m.to_raw(),
                        node: Some(m.node_name(node).to_string()),
                        formulas: vec![pool.to_formula(id, &[])],
                        detail: "forcing changed after dropping classical non-leaves".into(),
                    });
                    break;
                }
            }
        }
    }
    out
}

/// Rank collapses to `(0, depth(root) + 1)` on rooted models, and pruning
/// by an unforced excluded-middle sentence strictly lowers it.
pub fn rank_suite(seed: u64, qualifying: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("rank");
    let mut it = 0usize;
    while out.iterations < qualifying {
        let params = corpus_params(it, seed);
        it += 1;
        let mut rng = params.rng();
        let m = random_model_with(&mut rng, &params);
        let Some(root) = m.root() else { continue };

        let r = crate::localize::rank(&m);
        out.comparisons += 1;
        if r != (Rank { infinite_members: 0, max_finite: m.depth(root) + 1 }) {
            out.failures.push(Failure {
                iteration: it,
                model: m.to_raw(),
                node: Some(m.node_name(root).to_string()),
                formulas: vec![],
                detail: format!("rank {r} but depth(root) = {}", m.depth(root)),
            });
            out.iterations += 1;
            continue;
        }

        // A qualifying instance needs the excluded-middle sentence unforced
        // at the root.
        let shared = shared_elements(&m);
        let small = GenParams { max_formula_size: 4, ..params.clone() };
        let a = random_formula_with(&mut rng, &small, m.signature(), &shared);
        match crate::localize::check_rank_decrease(&m, &a) {
            Ok(d) => {
                out.iterations += 1;
                out.comparisons += 1;
                if !d.decreased() {
                    out.failures.push(Failure {
                        iteration: it,
                        model: m.to_raw(),
                        node: None,
                        formulas: vec![a],
                        detail: format!("rank did not decrease: {} -> {}", d.before, d.after),
                    });
                }
            }
            Err(LocalizeError::RhoForcedAtRoot) => continue,
            Err(e) => {
                out.iterations += 1;
                out.failures.push(Failure {
                    iteration: it,
                    model: m.to_raw(),
                    node: None,
                    formulas: vec![a],
                    detail: format!("rank decrease check errored: {e}"),
                });
            }
        }
    }
    out
}

/// Friedman translation facts checked semantically on random models:
/// if a node forces rho it forces every translation by rho; the translation
/// is classically equivalent to the disjunction; and below `~rho` the
/// translation is forced exactly when the original is.
pub fn friedman_facts_suite(seed: u64, iterations: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("friedman-facts");
    for it in 0..iterations {
        let params = corpus_params(it, seed);
        let mut rng = params.rng();
        let m = random_model_with(&mut rng, &params);
        let shared = shared_elements(&m);
        let small = GenParams { max_formula_size: 6, ..params.clone() };
        let a = random_formula_with(&mut rng, &small, m.signature(), &shared);
        let rho = random_formula_with(&mut rng, &small, m.signature(), &shared);
        let translated = friedman(&a, &rho).unwrap();
        let disj = a.clone().or(rho.clone());
        let not_rho = rho.clone().neg();
        let both_ways = translated.clone().imp(a.clone()).and(a.clone().imp(translated.clone()));
        out.iterations += 1;
        let mut ev = Evaluator::new(&m);
        for node in m.nodes() {
            out.comparisons += 3;
            let forces_rho = ev.forces(node, &rho).unwrap();
            if forces_rho && !ev.forces(node, &translated).unwrap() {
                out.failures.push(Failure {
                    iteration: it,
                    model: m.to_raw(),
                    node: Some(m.node_name(node).to_string()),
                    formulas: vec![a.clone(), rho.clone()],
                    detail: "rho forced but its translation is not".into(),
                });
            }
            if ev.classical(node, &translated).unwrap() != ev.classical(node, &disj).unwrap() {
                out.failures.push(Failure {
                    iteration: it,
                    model: m.to_raw(),
                    node: Some(m.node_name(node).to_string()),
                    formulas: vec![a.clone(), rho.clone()],
                    detail: "translation not classically equivalent to the disjunction".into(),
                });
            }
            if ev.forces(node, &not_rho).unwrap() && !ev.forces(node, &both_ways).unwrap() {
                out.failures.push(Failure {
                    iteration: it,
                    model: m.to_raw(),
                    node: Some(m.node_name(node).to_string()),
                    formulas: vec![a.clone(), rho.clone()],
                    detail: "below ~rho the translation is not equivalent to the original".into(),
                });
            }
        }
    }
    out
}

/// Truncation keeps forcing intact on the cone: random models, every node
/// of every cone, random sentences.
pub fn truncate_suite(seed: u64, iterations: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("truncate");
    for it in 0..iterations {
        let params = corpus_params(it, seed);
        let mut rng = params.rng();
        let m = random_model_with(&mut rng, &params);
        out.iterations += 1;
        for alpha in m.nodes() {
            let cone = m.truncate(alpha);
            for beta in m.up_nodes(alpha) {
                let pool: Vec<String> =
                    m.domain_elems(beta).map(|e| m.element_name(e).to_string()).collect();
                let f = random_formula_with(&mut rng, &params, m.signature(), &pool);
                let in_cone = cone.node(m.node_name(beta)).unwrap();
                out.comparisons += 1;
                if naive_forces(&m, beta, &f).unwrap() != naive_forces(&cone, in_cone, &f).unwrap()
                {
                    out.failures.push(Failure {
                        iteration: it,
                        model: m.to_raw(),
                        node: Some(m.node_name(beta).to_string()),
                        formulas: vec![f],
                        detail: "truncation changed forcing on the cone".into(),
                    });
                    break;
                }
            }
        }
    }
    out
}

/// Monotonicity of forcing along the order, differentially via the oracle.
pub fn monotonicity_suite(seed: u64, iterations: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("monotonicity");
    for it in 0..iterations {
        let params = corpus_params(it, seed);
        let mut rng = params.rng();
        let m = random_model_with(&mut rng, &params);
        out.iterations += 1;
        for alpha in m.nodes() {
            let pool: Vec<String> =
                m.domain_elems(alpha).map(|e| m.element_name(e).to_string()).collect();
            let f = random_formula_with(&mut rng, &params, m.signature(), &pool);
            if naive_forces(&m, alpha, &f).unwrap() {
                for beta in m.strict_up_nodes(alpha) {
                    out.comparisons += 1;
                    if !naive_forces(&m, beta, &f).unwrap() {
                        out.failures.push(Failure {
                            iteration: it,
                            model: m.to_raw(),
                            node: Some(m.node_name(beta).to_string()),
                            formulas: vec![f.clone()],
                            detail: "forcing lost upward".into(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Seeded grab-bag used by the fuzz command.
pub fn run_named_suite(
    name: &str,
    seed: u64,
    iterations: usize,
) -> Result<SuiteOutcome, String> {
    let config = VerifyConfig { prop_size: 5, fo_size: 4, ..VerifyConfig::default() };
    match name {
        "oracle" => Ok(oracle_suite(seed, iterations, 10)),
        "pruning" => Ok(pruning_suite(seed, iterations, &config)),
        "assoc" => Ok(assoc_suite(seed, iterations)),
        "localizer" => {
            let models = iterations.max(2);
            Ok(localizer_suite(seed, models / 2, models - models / 2, false, &config))
        }
        other => Err(format!("unknown suite `{other}`")),
    }
}
