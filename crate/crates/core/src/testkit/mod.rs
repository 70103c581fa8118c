//! Seeded random model and formula generators, the plain recursive forcing
//! oracle used for differential testing, and counterexample shrinking.
//!
//! The oracle transcribes the forcing clauses directly over formula trees,
//! with no interning and no memoization; it shares no evaluation code with
//! `semantics::Evaluator`, which is the whole point.

pub mod suites;

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::model::{KripkeModel, NodeId, RawFact, RawModel};
use crate::semantics::SemanticsError;
use crate::syntax::{Formula, Signature, Term};

pub use crate::enumerate::exhaustive_formulas;

/// Bounds and seed for the generators. The same parameters always produce
/// the same model or formula.
#[derive(Clone, Debug)]
pub struct GenParams {
    pub seed: u64,
    pub max_nodes: usize,
    pub max_atoms: usize,
    pub max_domain: usize,
    pub max_formula_size: usize,
    pub max_quantifier_depth: usize,
    pub first_order: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            max_nodes: 6,
            max_atoms: 2,
            max_domain: 3,
            max_formula_size: 8,
            max_quantifier_depth: 2,
            first_order: false,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// The corpus signature: `max_atoms` propositional atoms, or one unary
    /// and one binary relation in first-order mode.
    pub fn signature(&self) -> Signature {
        if self.first_order {
            Signature::first_order([("R", 1), ("S", 2)], Vec::<String>::new()).unwrap()
        } else {
            let names = ["p", "q", "r", "s", "t", "u"];
            Signature::propositional(names.iter().take(self.max_atoms.clamp(1, 6)).copied())
                .unwrap()
        }
    }
}

/// Generates a valid model: a random layered order (reduced to its Hasse
/// diagram on load), domains grown upward, and facts introduced at a node
/// and propagated to its cone.
pub fn random_model(params: &GenParams) -> KripkeModel {
    let mut rng = params.rng();
    random_model_with(&mut rng, params)
}

pub fn random_model_with(rng: &mut ChaCha8Rng, params: &GenParams) -> KripkeModel {
    let sig = params.signature();
    let n = rng.gen_range(1..=params.max_nodes.max(1));
    let rooted = rng.gen_bool(0.5);

    // Layer assignment, node ids ascending with layers.
    let mut layers: Vec<usize> = if n == 1 {
        vec![0]
    } else if rooted {
        let mut l: Vec<usize> = (1..n).map(|_| rng.gen_range(1..=(n / 2).max(1))).collect();
        l.push(0);
        l.sort_unstable();
        l
    } else {
        let mut l: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=(n / 2).max(1))).collect();
        l.sort_unstable();
        l
    };
    // Dense relabeling so layer 0 exists and layers are contiguous.
    let distinct: Vec<usize> = {
        let mut d = layers.clone();
        d.dedup();
        d
    };
    for l in layers.iter_mut() {
        *l = distinct.iter().position(|x| x == l).unwrap();
    }

    let node_names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for j in 0..n {
        if layers[j] == 0 {
            continue;
        }
        let candidates: Vec<usize> = (0..n).filter(|&i| layers[i] < layers[j]).collect();
        let mut any = false;
        for &i in &candidates {
            if rng.gen_bool(0.45) {
                edges.push((node_names[i].clone(), node_names[j].clone()));
                any = true;
            }
        }
        if !any {
            let &i = candidates.choose(rng).expect("layer > 0 has lower layers");
            edges.push((node_names[i].clone(), node_names[j].clone()));
        }
    }

    // Upward-closed domains.
    let mut domains: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut dom_sets: Vec<Vec<usize>> = vec![Vec::new(); n];
    if params.first_order {
        let max_dom = params.max_domain.max(1);
        for j in 0..n {
            let mut d: Vec<usize> = Vec::new();
            for (a, b) in &edges {
                if *b == node_names[j] {
                    let i = node_names.iter().position(|x| x == a).unwrap();
                    for &e in &dom_sets[i] {
                        if !d.contains(&e) {
                            d.push(e);
                        }
                    }
                }
            }
            if d.is_empty() {
                let k = rng.gen_range(1..=max_dom.min(2));
                d.extend(0..k);
            }
            while d.len() < max_dom && rng.gen_bool(0.35) {
                let next = (0..max_dom).find(|e| !d.contains(e));
                match next {
                    Some(e) => d.push(e),
                    None => break,
                }
            }
            d.sort_unstable();
            dom_sets[j] = d;
        }
        // The construction above only unions direct predecessors; close it
        // under the full order by another upward pass.
        let order = closure_pairs(&node_names, &edges);
        for &(i, j) in &order {
            let lower = dom_sets[i].clone();
            for e in lower {
                if !dom_sets[j].contains(&e) {
                    dom_sets[j].push(e);
                }
            }
            dom_sets[j].sort_unstable();
        }
        for j in 0..n {
            domains.insert(
                node_names[j].clone(),
                dom_sets[j].iter().map(|e| e.to_string()).collect(),
            );
        }
    }

    // Facts introduced at a node, propagated upward.
    let order = closure_pairs(&node_names, &edges);
    let density = rng.gen_range(0.10..0.40);
    let mut atoms: Vec<Vec<RawFact>> = vec![Vec::new(); n];
    for (name, arity) in sig.predicates() {
        for i in 0..n {
            let tuples = arg_tuples(&dom_sets[i], arity, params.first_order);
            for args in tuples {
                let fact = RawFact { name: name.clone(), args };
                if atoms[i].contains(&fact) || !rng.gen_bool(density) {
                    continue;
                }
                atoms[i].push(fact.clone());
                for &(a, b) in &order {
                    if a == i && !atoms[b].contains(&fact) {
                        atoms[b].push(fact.clone());
                    }
                }
            }
        }
    }
    let atoms: BTreeMap<String, Vec<RawFact>> = node_names
        .iter()
        .enumerate()
        .filter(|(i, _)| !atoms[*i].is_empty())
        .map(|(i, name)| (name.clone(), atoms[i].clone()))
        .collect();

    let raw = RawModel { sig, nodes: node_names, edges, domains, atoms };
    KripkeModel::from_raw(&raw).expect("generated models are valid")
}

/// Transitive pairs (i, j) with i strictly below j, in an order where lower
/// nodes come first (node ids ascend with layers).
fn closure_pairs(names: &[String], edges: &[(String, String)]) -> Vec<(usize, usize)> {
    let n = names.len();
    let mut leq = vec![false; n * n];
    for (a, b) in edges {
        let i = names.iter().position(|x| x == a).unwrap();
        let j = names.iter().position(|x| x == b).unwrap();
        leq[i * n + j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i * n + k] {
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && leq[i * n + j] {
                out.push((i, j));
            }
        }
    }
    out
}

fn arg_tuples(domain: &[usize], arity: usize, first_order: bool) -> Vec<Vec<String>> {
    if !first_order || arity == 0 {
        return vec![Vec::new()];
    }
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for prefix in &out {
            for e in domain {
                let mut t = prefix.clone();
                t.push(e.to_string());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Generates a closed formula over `sig` within the size and quantifier
/// bounds, with parameters drawn from `params_from`.
pub fn random_formula(params: &GenParams, sig: &Signature, params_from: &[String]) -> Formula {
    let mut rng = params.rng();
    random_formula_with(&mut rng, params, sig, params_from)
}

pub fn random_formula_with(
    rng: &mut ChaCha8Rng,
    params: &GenParams,
    sig: &Signature,
    params_from: &[String],
) -> Formula {
    let budget = rng.gen_range(1..=params.max_formula_size.max(1));
    gen_formula(rng, sig, params_from, budget, params.max_quantifier_depth, &mut Vec::new())
}

fn gen_formula(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    params: &[String],
    budget: usize,
    qdepth: usize,
    bound: &mut Vec<String>,
) -> Formula {
    let first_order = sig.is_first_order();
    let can_quant = first_order && qdepth > 0 && budget >= 2;
    let can_binary = budget >= 3;
    if !can_quant && !can_binary {
        return gen_leaf(rng, sig, params, bound);
    }
    let pick = rng.gen_range(0..10);
    if can_quant && (pick >= 7 || !can_binary) {
        let var = format!("y{}", bound.len() + 1);
        bound.push(var.clone());
        let body = gen_formula(rng, sig, params, budget - 1, qdepth - 1, bound);
        bound.pop();
        return if rng.gen_bool(0.5) {
            Formula::forall(var, body)
        } else {
            Formula::exists(var, body)
        };
    }
    if pick == 6 && budget >= 2 {
        // Negation shape: A -> _|_.
        let inner = gen_formula(rng, sig, params, budget - 2, qdepth, bound);
        return inner.neg();
    }
    let left = rng.gen_range(1..=(budget - 2));
    let right = budget - 1 - left;
    let a = gen_formula(rng, sig, params, left, qdepth, bound);
    let b = gen_formula(rng, sig, params, right, qdepth, bound);
    match rng.gen_range(0..3) {
        0 => a.and(b),
        1 => a.or(b),
        _ => a.imp(b),
    }
}

fn gen_leaf(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    params: &[String],
    bound: &[String],
) -> Formula {
    match sig {
        Signature::Propositional { atoms } => {
            if atoms.is_empty() || rng.gen_range(0..8) == 0 {
                Formula::Bot
            } else {
                Formula::atom(atoms.choose(rng).unwrap().clone())
            }
        }
        Signature::FirstOrder { relations, .. } => {
            let term = |rng: &mut ChaCha8Rng| -> Option<Term> {
                let n_bound = bound.len();
                let n_par = params.len();
                if n_bound + n_par == 0 {
                    return None;
                }
                let i = rng.gen_range(0..n_bound + n_par);
                Some(if i < n_bound {
                    Term::var(bound[i].clone())
                } else {
                    Term::param(params[i - n_bound].clone())
                })
            };
            if rng.gen_range(0..8) == 0 {
                return Formula::Bot;
            }
            let use_eq = rng.gen_range(0..4) == 0;
            if use_eq {
                if let (Some(s), Some(t)) = (term(rng), term(rng)) {
                    return Formula::eq(s, t);
                }
                return Formula::Bot;
            }
            let (name, arity) = relations.choose(rng).expect("corpus signatures have relations");
            let mut args = Vec::with_capacity(*arity);
            for _ in 0..*arity {
                match term(rng) {
                    Some(t) => args.push(t),
                    None => return Formula::Bot,
                }
            }
            Formula::rel(name.clone(), args)
        }
    }
}

/// Plain recursive transcription of the forcing clauses: atoms by diagram
/// lookup, `_|_` never forced, implication and universal quantification over
/// the upward cone, existential over the node's own domain. Quantifier
/// instances are built by syntactic substitution.
pub fn naive_forces(m: &KripkeModel, node: NodeId, f: &Formula) -> Result<bool, SemanticsError> {
    check_query(m, node, f)?;
    Ok(go(m, node, f))
}

fn check_query(m: &KripkeModel, node: NodeId, f: &Formula) -> Result<(), SemanticsError> {
    if !m.contains_node(node) {
        return Err(SemanticsError::UnknownNode);
    }
    let fv = f.free_variables();
    if let Some(v) = fv.into_iter().next() {
        return Err(SemanticsError::FreeVariable(v));
    }
    for p in f.parameters() {
        match m.element(&p) {
            None => return Err(SemanticsError::UnknownParameter(p)),
            Some(e) => {
                if !m.domain_contains(node, e) {
                    return Err(SemanticsError::ParameterOutsideDomain {
                        element: p,
                        node: m.node_name(node).to_string(),
                    });
                }
            }
        }
    }
    m.signature().check(f).map_err(|e| match e {
        crate::syntax::FormulaError::UndeclaredSymbol(s) => SemanticsError::UndeclaredSymbol(s),
        crate::syntax::FormulaError::ArityMismatch { name, expected, got } => {
            SemanticsError::ArityMismatch { name, expected, got }
        }
        crate::syntax::FormulaError::FirstOrderInPropositional => {
            SemanticsError::FirstOrderInPropositional
        }
        crate::syntax::FormulaError::NotClosed(vs) => {
            SemanticsError::FreeVariable(vs.into_iter().next().unwrap_or_default())
        }
    })
}

fn term_name(t: &Term) -> &str {
    match t {
        Term::Param(p) => p,
        Term::Const(c) => c,
        Term::Var(_) => unreachable!("sentence evaluation never sees free variables"),
    }
}

fn go(m: &KripkeModel, node: NodeId, f: &Formula) -> bool {
    match f {
        Formula::Bot => false,
        Formula::Atom(name) => m.has_raw_fact(node, name, &[]),
        Formula::Rel(name, args) => {
            let names: Vec<&str> = args.iter().map(term_name).collect();
            m.has_raw_fact(node, name, &names)
        }
        Formula::Eq(s, t) => term_name(s) == term_name(t),
        Formula::And(a, b) => go(m, node, a) && go(m, node, b),
        Formula::Or(a, b) => go(m, node, a) || go(m, node, b),
        Formula::Imp(a, b) => m.up_nodes(node).all(|beta| !go(m, beta, a) || go(m, beta, b)),
        Formula::Forall(v, body) => m.up_nodes(node).all(|beta| {
            m.domain_elems(beta).all(|d| {
                let inst = body.substitute(v, &Term::param(m.element_name(d).to_string()));
                go(m, beta, &inst)
            })
        }),
        Formula::Exists(v, body) => m.domain_elems(node).any(|d| {
            let inst = body.substitute(v, &Term::param(m.element_name(d).to_string()));
            go(m, node, &inst)
        }),
    }
}

/// Greedily minimizes a failing model: drops nodes, then fact cones, then
/// elements, as long as `still_fails` keeps returning true. Every candidate
/// is a restriction of a valid model, so shrinking preserves validity.
pub fn shrink_model(
    model: &KripkeModel,
    mut still_fails: impl FnMut(&KripkeModel) -> bool,
) -> KripkeModel {
    let mut current = model.clone();
    loop {
        let mut changed = false;

        // Node removal.
        'nodes: loop {
            for victim in current.nodes() {
                if current.node_count() == 1 {
                    break;
                }
                let keep: std::collections::BTreeSet<NodeId> =
                    current.nodes().filter(|&n| n != victim).collect();
                let candidate = current.restrict_to(&keep);
                if still_fails(&candidate) {
                    current = candidate;
                    changed = true;
                    continue 'nodes;
                }
            }
            break;
        }

        // Fact-cone removal: delete a fact from a node and everything above.
        'facts: loop {
            let raw = current.to_raw();
            let mut candidates: Vec<(String, RawFact)> = Vec::new();
            for node in current.nodes() {
                for fact in current.facts(node) {
                    candidates.push((
                        current.node_name(node).to_string(),
                        RawFact {
                            name: current.pred_name(fact.pred).to_string(),
                            args: fact
                                .args
                                .iter()
                                .map(|&e| current.element_name(e).to_string())
                                .collect(),
                        },
                    ));
                }
            }
            for (name, rf) in candidates {
                let mut cand = raw.clone();
                let at = current.node(&name).unwrap();
                for upper in current.up_nodes(at) {
                    if let Some(list) = cand.atoms.get_mut(current.node_name(upper)) {
                        list.retain(|f| *f != rf);
                    }
                }
                if let Ok(candidate) = KripkeModel::from_raw(&cand) {
                    if still_fails(&candidate) {
                        current = candidate;
                        changed = true;
                        continue 'facts;
                    }
                }
            }
            break;
        }

        // Element removal (first-order): drop an element everywhere.
        if current.signature().is_first_order() {
            'elems: loop {
                let raw = current.to_raw();
                let elems: Vec<String> = raw
                    .domains
                    .values()
                    .flat_map(|d| d.iter().cloned())
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                for victim in elems {
                    let mut cand = raw.clone();
                    let mut empty = false;
                    for dom in cand.domains.values_mut() {
                        dom.retain(|e| *e != victim);
                        empty |= dom.is_empty();
                    }
                    if empty {
                        continue;
                    }
                    for facts in cand.atoms.values_mut() {
                        facts.retain(|f| !f.args.contains(&victim));
                    }
                    if let Ok(candidate) = KripkeModel::from_raw(&cand) {
                        if still_fails(&candidate) {
                            current = candidate;
                            changed = true;
                            continue 'elems;
                        }
                    }
                }
                break;
            }
        }

        if !changed {
            return current;
        }
    }
}

/// Shrinks a failing formula by replacing it with any closed proper
/// subformula that still fails.
pub fn shrink_formula(formula: &Formula, mut still_fails: impl FnMut(&Formula) -> bool) -> Formula {
    let mut current = formula.clone();
    loop {
        let next = current
            .subformulas()
            .into_iter()
            .skip(1)
            .filter(|g| g.is_closed())
            .find(|g| still_fails(g))
            .cloned();
        match next {
            Some(g) => current = g,
            None => return current,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::forces;

    #[test]
    fn generators_are_deterministic_and_valid() {
        for first_order in [false, true] {
            let params = GenParams { first_order, ..GenParams::default() };
            for seed in 0..200 {
                let p = params.clone().with_seed(seed);
                let m1 = random_model(&p);
                let m2 = random_model(&p);
                assert_eq!(m1, m2, "seed {seed} not deterministic");
                assert!(crate::model::validate_model(&m1.to_raw()).is_valid());
            }
        }
    }

    #[test]
    fn random_formulas_are_closed_and_well_formed() {
        for first_order in [false, true] {
            let params = GenParams { first_order, ..GenParams::default() };
            let sig = params.signature();
            let pool: Vec<String> = if first_order { vec!["0".into(), "1".into()] } else { vec![] };
            for seed in 0..300 {
                let p = params.clone().with_seed(seed);
                let f = random_formula(&p, &sig, &pool);
                assert_eq!(f, random_formula(&p, &sig, &pool));
                assert!(f.is_closed(), "{f}");
                assert!(sig.check(&f).is_ok(), "{f}");
                assert!(f.size() <= params.max_formula_size);
            }
        }
    }

    #[test]
    fn oracle_matches_evaluator_on_a_small_sample() {
        for first_order in [false, true] {
            for seed in 0..120 {
                let params =
                    GenParams { first_order, max_nodes: 4, ..GenParams::default() }.with_seed(seed);
                let m = random_model(&params);
                let mut rng = params.rng();
                for node in m.nodes() {
                    let names: Vec<String> =
                        m.domain_elems(node).map(|e| m.element_name(e).to_string()).collect();
                    let f = random_formula_with(&mut rng, &params, m.signature(), &names);
                    assert_eq!(
                        naive_forces(&m, node, &f).unwrap(),
                        forces(&m, node, &f).unwrap(),
                        "seed {seed} node {} formula {f}",
                        m.node_name(node),
                    );
                }
            }
        }
    }

    #[test]
    fn shrinking_keeps_failures_failing() {
        let params = GenParams::default().with_seed(7);
        let m = random_model(&params);
        let pem = Formula::atom("p").or(Formula::atom("p").neg());
        let fails = |m: &KripkeModel| m.nodes().any(|n| !forces(m, n, &pem).unwrap());
        if fails(&m) {
            let small = shrink_model(&m, fails);
            assert!(fails(&small));
            assert!(small.node_count() <= m.node_count());
        }
    }
}
