//! Finite Kripke models: validation, the poset machinery, depth, truncation,
//! classical-node detection with witness extraction, and the chain-stacking
//! construction.
//!
//! A model is loaded from a name-based [`RawModel`] description. Validation
//! checks the partial order, domain growth, atomic monotonicity and symbol
//! well-formedness; the validated [`KripkeModel`] caches the order closure,
//! depths and per-node classicality.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{Formula, Signature, Term};
use crate::translate::{pem_instance, PemInstance};

/// Index of a node within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a domain element within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId(pub(crate) u32);

impl ElemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a predicate symbol (propositional atoms are 0-ary predicates).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub(crate) u32);

/// One atomic fact of a node's diagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub pred: PredId,
    pub args: Vec<ElemId>,
}

/// Name-based fact as it appears in documents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawFact {
    pub name: String,
    pub args: Vec<String>,
}

/// Unvalidated model description. `edges` are upward order pairs (they may
/// contain redundant transitive pairs; the loaded model normalizes them to
/// the Hasse diagram). Propositional models leave `domains` empty.
#[derive(Clone, Debug, PartialEq)]
pub struct RawModel {
    pub sig: Signature,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub domains: BTreeMap<String, Vec<String>>,
    pub atoms: BTreeMap<String, Vec<RawFact>>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("model has no nodes")]
    EmptyModel,
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}` referenced by {1}")]
    UnknownNode(String, &'static str),
    #[error("order is not antisymmetric: `{0}` and `{1}` lie on a cycle")]
    OrderCycle(String, String),
    #[error("node `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("duplicate element `{element}` in domain of `{node}`")]
    DuplicateElement { node: String, element: String },
    #[error("domain shrinks: element `{element}` of `{lower}` is missing at `{upper}`")]
    DomainNotMonotone { lower: String, upper: String, element: String },
    #[error("propositional model declares a domain at node `{0}`")]
    DomainInPropositional(String),
    #[error("fact at `{node}` uses element `{element}` outside the node's domain")]
    ElementOutsideDomain { node: String, element: String },
    #[error("fact at `{node}` uses undeclared predicate `{name}`")]
    UndeclaredPredicate { node: String, name: String },
    #[error("fact `{name}` at `{node}` has {got} arguments, expected {expected}")]
    FactArity { node: String, name: String, expected: usize, got: usize },
    #[error("monotonicity violation: fact `{fact}` holds at `{lower}` but not at `{upper}`")]
    FactNotMonotone { fact: String, lower: String, upper: String },
    #[error("constant `{constant}` does not denote in the domain of `{node}`")]
    ConstantOutsideDomain { constant: String, node: String },
}

/// Everything `validate_model` found wrong; empty iff the model is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<ValidationError>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.errors.is_empty() {
            write!(f, "valid")
        } else {
            for (i, e) in self.errors.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{e}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown node id")]
    UnknownNode,
    #[error("node `{0}` is classical; no witness exists")]
    NodeIsClassical(String),
    #[error("chain stacking requires a single-node base model")]
    StackBaseNotSingleton,
    #[error("chain stacking requires height >= 1")]
    StackZeroHeight,
}

/// A validated finite Kripke model.
#[derive(Clone, Debug)]
pub struct KripkeModel {
    sig: Signature,
    preds: Vec<(String, usize)>,
    node_names: Vec<String>,
    node_index: BTreeMap<String, u32>,
    elements: Vec<String>,
    elem_index: BTreeMap<String, u32>,
    /// Immediate successors (Hasse diagram), each list sorted.
    covers: Vec<Vec<u32>>,
    /// Reflexive-transitive order, flattened n*n.
    leq: Vec<bool>,
    /// Nodes >= each node (including itself), sorted.
    up_sets: Vec<Vec<u32>>,
    domains: Vec<Vec<u32>>,
    facts: Vec<BTreeSet<Fact>>,
    depths: Vec<u32>,
    classical: Vec<bool>,
}

impl PartialEq for KripkeModel {
    fn eq(&self, other: &Self) -> bool {
        self.to_raw() == other.to_raw()
    }
}

/// Lists every violated model invariant; an empty report means valid.
pub fn validate_model(raw: &RawModel) -> ValidationReport {
    match Builder::run(raw) {
        Ok(_) => ValidationReport::default(),
        Err(report) => report,
    }
}

struct Builder;

impl Builder {
    fn run(raw: &RawModel) -> Result<KripkeModel, ValidationReport> {
        let mut errors = Vec::new();
        let n = raw.nodes.len();
        if n == 0 {
            return Err(ValidationReport { errors: vec![ValidationError::EmptyModel] });
        }

        let mut node_index: BTreeMap<String, u32> = BTreeMap::new();
        for (i, name) in raw.nodes.iter().enumerate() {
            if node_index.insert(name.clone(), i as u32).is_some() {
                errors.push(ValidationError::DuplicateNode(name.clone()));
            }
        }
        if !errors.is_empty() {
            return Err(ValidationReport { errors });
        }

        // Order: closure of the given edges, then antisymmetry.
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in &raw.edges {
            match (node_index.get(a), node_index.get(b)) {
                (Some(&i), Some(&j)) => leq[i as usize * n + j as usize] = true,
                (None, _) => errors.push(ValidationError::UnknownNode(a.clone(), "an edge")),
                (_, None) => errors.push(ValidationError::UnknownNode(b.clone(), "an edge")),
            }
        }
        if !errors.is_empty() {
            return Err(ValidationReport { errors });
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
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    errors.push(ValidationError::OrderCycle(
                        raw.nodes[i].clone(),
                        raw.nodes[j].clone(),
                    ));
                }
            }
        }
        if !errors.is_empty() {
            return Err(ValidationReport { errors });
        }

        for name in raw.domains.keys().chain(raw.atoms.keys()) {
            if !node_index.contains_key(name) {
                errors.push(ValidationError::UnknownNode(name.clone(), "a domain or atoms entry"));
            }
        }

        // Elements and domains.
        let first_order = raw.sig.is_first_order();
        let mut elements: Vec<String> = Vec::new();
        let mut elem_index: BTreeMap<String, u32> = BTreeMap::new();
        let mut domains: Vec<Vec<u32>> = vec![Vec::new(); n];
        if first_order {
            for (i, name) in raw.nodes.iter().enumerate() {
                let listed = raw.domains.get(name).map(Vec::as_slice).unwrap_or(&[]);
                if listed.is_empty() {
                    errors.push(ValidationError::EmptyDomain(name.clone()));
                }
                let mut dom = Vec::new();
                for e in listed {
                    let id = *elem_index.entry(e.clone()).or_insert_with(|| {
                        elements.push(e.clone());
                        (elements.len() - 1) as u32
                    });
                    if dom.contains(&id) {
                        errors.push(ValidationError::DuplicateElement {
                            node: name.clone(),
                            element: e.clone(),
                        });
                    } else {
                        dom.push(id);
                    }
                }
                dom.sort_unstable();
                domains[i] = dom;
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j && leq[i * n + j] {
                        for &e in &domains[i] {
                            if domains[j].binary_search(&e).is_err() {
                                errors.push(ValidationError::DomainNotMonotone {
                                    lower: raw.nodes[i].clone(),
                                    upper: raw.nodes[j].clone(),
                                    element: elements[e as usize].clone(),
                                });
                            }
                        }
                    }
                }
            }
            if let Signature::FirstOrder { constants, .. } = &raw.sig {
                for c in constants {
                    match elem_index.get(c) {
                        None => {
                            if let Some(name) = raw.nodes.first() {
                                errors.push(ValidationError::ConstantOutsideDomain {
                                    constant: c.clone(),
                                    node: name.clone(),
                                });
                            }
                        }
                        Some(&id) => {
                            for (i, name) in raw.nodes.iter().enumerate() {
                                if domains[i].binary_search(&id).is_err() {
                                    errors.push(ValidationError::ConstantOutsideDomain {
                                        constant: c.clone(),
                                        node: name.clone(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        } else {
            for (name, dom) in &raw.domains {
                if !dom.is_empty() {
                    errors.push(ValidationError::DomainInPropositional(name.clone()));
                }
            }
        }

        // Facts.
        let preds = raw.sig.predicates();
        let pred_index: BTreeMap<&str, u32> =
            preds.iter().enumerate().map(|(i, (p, _))| (p.as_str(), i as u32)).collect();
        let mut facts: Vec<BTreeSet<Fact>> = vec![BTreeSet::new(); n];
        for (name, listed) in &raw.atoms {
            let Some(&i) = node_index.get(name) else { continue };
            let i = i as usize;
            for rf in listed {
                let Some(&p) = pred_index.get(rf.name.as_str()) else {
                    errors.push(ValidationError::UndeclaredPredicate {
                        node: name.clone(),
                        name: rf.name.clone(),
                    });
                    continue;
                };
                let arity = preds[p as usize].1;
                if rf.args.len() != arity {
                    errors.push(ValidationError::FactArity {
                        node: name.clone(),
                        name: rf.name.clone(),
                        expected: arity,
                        got: rf.args.len(),
                    });
                    continue;
                }
                let mut args = Vec::with_capacity(rf.args.len());
                let mut ok = true;
                for a in &rf.args {
                    match elem_index.get(a) {
                        Some(&e) if domains[i].binary_search(&e).is_ok() => args.push(ElemId(e)),
                        _ => {
                            errors.push(ValidationError::ElementOutsideDomain {
                                node: name.clone(),
                                element: a.clone(),
                            });
                            ok = false;
                        }
                    }
                }
                if ok {
                    facts[i].insert(Fact { pred: PredId(p), args });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] {
                    for f in &facts[i] {
                        if !facts[j].contains(f) {
                            errors.push(ValidationError::FactNotMonotone {
                                fact: display_fact(&preds, &elements, f),
                                lower: raw.nodes[i].clone(),
                                upper: raw.nodes[j].clone(),
                            });
                        }
                    }
                }
            }
        }

        if !errors.is_empty() {
            return Err(ValidationReport { errors });
        }

        // Caches: Hasse covers, up-sets, depths, classicality.
        let lt = |a: usize, b: usize| a != b && leq[a * n + b];
        let covers: Vec<Vec<u32>> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)))
                    .map(|b| b as u32)
                    .collect()
            })
            .collect();
        let up_sets: Vec<Vec<u32>> = (0..n)
            .map(|a| (0..n).filter(|&b| leq[a * n + b]).map(|b| b as u32).collect())
            .collect();
        let mut depths = vec![u32::MAX; n];
        fn depth_of(a: usize, covers: &[Vec<u32>], depths: &mut [u32]) -> u32 {
            if depths[a] != u32::MAX {
                return depths[a];
            }
            let d = covers[a]
                .iter()
                .map(|&b| 1 + depth_of(b as usize, covers, depths))
                .max()
                .unwrap_or(0);
            depths[a] = d;
            d
        }
        for a in 0..n {
            depth_of(a, &covers, &mut depths);
        }
        let mut classical = vec![true; n];
        for a in 0..n {
            classical[a] = up_sets[a].iter().all(|&b| {
                let b = b as usize;
                domains[b] == domains[a] && facts[b] == facts[a]
            });
        }

        Ok(KripkeModel {
            sig: raw.sig.clone(),
            preds,
            node_names: raw.nodes.clone(),
            node_index,
            elements,
            elem_index,
            covers,
            leq,
            up_sets,
            domains,
            facts,
            depths,
            classical,
        })
    }
}

fn display_fact(preds: &[(String, usize)], elements: &[String], f: &Fact) -> String {
    let name = &preds[f.pred.0 as usize].0;
    if f.args.is_empty() {
        name.clone()
    } else {
        let args: Vec<&str> = f.args.iter().map(|e| elements[e.index()].as_str()).collect();
        format!("{name}({})", args.join(", "))
    }
}

impl KripkeModel {
    pub fn from_raw(raw: &RawModel) -> Result<Self, ValidationReport> {
        Builder::run(raw)
    }

    pub fn to_raw(&self) -> RawModel {
        let mut edges = Vec::new();
        for (a, succs) in self.covers.iter().enumerate() {
            for &b in succs {
                edges.push((self.node_names[a].clone(), self.node_names[b as usize].clone()));
            }
        }
        edges.sort();
        let mut domains = BTreeMap::new();
        let mut atoms = BTreeMap::new();
        for (i, name) in self.node_names.iter().enumerate() {
            if self.sig.is_first_order() {
                domains.insert(
                    name.clone(),
                    self.domains[i].iter().map(|&e| self.elements[e as usize].clone()).collect(),
                );
            }
            let listed: Vec<RawFact> = self.facts[i]
                .iter()
                .map(|f| RawFact {
                    name: self.preds[f.pred.0 as usize].0.clone(),
                    args: f.args.iter().map(|e| self.elements[e.index()].clone()).collect(),
                })
                .collect();
            if !listed.is_empty() {
                atoms.insert(name.clone(), listed);
            }
        }
        RawModel { sig: self.sig.clone(), nodes: self.node_names.clone(), edges, domains, atoms }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_names.len() as u32).map(NodeId)
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).map(|&i| NodeId(i))
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.node_names[n.index()]
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        n.index() < self.node_names.len()
    }

    pub fn leq(&self, a: NodeId, b: NodeId) -> bool {
        self.leq[a.index() * self.node_count() + b.index()]
    }

    /// Nodes `>=` the given node, itself included, ascending by id.
    pub fn up_set(&self, n: NodeId) -> &[u32] {
        &self.up_sets[n.index()]
    }

    pub fn up_nodes(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.up_sets[n.index()].iter().map(|&i| NodeId(i))
    }

    pub fn strict_up_nodes(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let own = n.0;
        self.up_sets[n.index()].iter().filter(move |&&i| i != own).map(|&i| NodeId(i))
    }

    /// Immediate successors in the Hasse diagram.
    pub fn cover_nodes(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.covers[n.index()].iter().map(|&i| NodeId(i))
    }

    pub fn domain(&self, n: NodeId) -> &[u32] {
        &self.domains[n.index()]
    }

    pub fn domain_elems(&self, n: NodeId) -> impl Iterator<Item = ElemId> + '_ {
        self.domains[n.index()].iter().map(|&e| ElemId(e))
    }

    pub fn domain_contains(&self, n: NodeId, e: ElemId) -> bool {
        self.domains[n.index()].binary_search(&e.0).is_ok()
    }

    pub fn element(&self, name: &str) -> Option<ElemId> {
        self.elem_index.get(name).map(|&e| ElemId(e))
    }

    pub fn element_name(&self, e: ElemId) -> &str {
        &self.elements[e.index()]
    }

    pub fn pred(&self, name: &str) -> Option<PredId> {
        self.preds.iter().position(|(p, _)| p == name).map(|i| PredId(i as u32))
    }

    pub fn pred_name(&self, p: PredId) -> &str {
        &self.preds[p.0 as usize].0
    }

    pub fn pred_arity(&self, p: PredId) -> usize {
        self.preds[p.0 as usize].1
    }

    pub fn predicates(&self) -> impl Iterator<Item = (PredId, &str, usize)> {
        self.preds.iter().enumerate().map(|(i, (n, a))| (PredId(i as u32), n.as_str(), *a))
    }

    /// The element a declared constant denotes (its own name; validation
    /// guarantees it exists in every node's domain).
    pub fn constant_element(&self, name: &str) -> Option<ElemId> {
        if self.sig.has_constant(name) {
            self.element(name)
        } else {
            None
        }
    }

    pub fn has_fact(&self, n: NodeId, f: &Fact) -> bool {
        self.facts[n.index()].contains(f)
    }

    /// Name-based fact lookup; `None` components that fail to resolve make
    /// the fact absent.
    pub fn has_raw_fact(&self, n: NodeId, name: &str, args: &[&str]) -> bool {
        let Some(pred) = self.pred(name) else { return false };
        let mut ids = Vec::with_capacity(args.len());
        for a in args {
            match self.element(a) {
                Some(e) => ids.push(e),
                None => return false,
            }
        }
        self.has_fact(n, &Fact { pred, args: ids })
    }

    pub fn facts(&self, n: NodeId) -> impl Iterator<Item = &Fact> {
        self.facts[n.index()].iter()
    }

    pub fn display_fact(&self, f: &Fact) -> String {
        display_fact(&self.preds, &self.elements, f)
    }

    /// Length in edges of the longest chain starting at `n`; leaves have
    /// depth 0.
    pub fn depth(&self, n: NodeId) -> usize {
        self.depths[n.index()] as usize
    }

    pub fn is_leaf(&self, n: NodeId) -> bool {
        self.covers[n.index()].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(|&n| self.is_leaf(n))
    }

    /// The unique minimum node, when there is one.
    pub fn root(&self) -> Option<NodeId> {
        let minimal: Vec<NodeId> = self
            .nodes()
            .filter(|&a| self.nodes().all(|b| a == b || !self.leq(b, a)))
            .collect();
        match minimal.as_slice() {
            [r] => Some(*r),
            _ => None,
        }
    }

    /// Structural classicality: the whole upward cone shares this node's
    /// domain and diagram. On finite models with identity equality this is
    /// equivalent to forcing every excluded-middle closure.
    pub fn is_classical(&self, n: NodeId) -> bool {
        self.classical[n.index()]
    }

    pub fn classical_nodes(&self) -> Vec<NodeId> {
        self.nodes().filter(|&n| self.is_classical(n)).collect()
    }

    /// Whether every node strictly above `n` has a unique immediate
    /// predecessor within the cone of `n`.
    pub fn is_tree_cone(&self, n: NodeId) -> bool {
        let cone = self.up_set(n);
        cone.iter().all(|&b| {
            if b == n.0 {
                return true;
            }
            let preds = cone
                .iter()
                .filter(|&&a| {
                    a != b
                        && self.leq(NodeId(a), NodeId(b))
                        && !cone.iter().any(|&c| {
                            c != a && c != b && self.leq(NodeId(a), NodeId(c)) && self.leq(NodeId(c), NodeId(b))
                        })
                })
                .count();
            preds == 1
        })
    }

    /// Restriction to an arbitrary nonempty subset of nodes (induced order,
    /// same domains and diagrams). Any such restriction of a valid model is
    /// valid.
    pub fn restrict_to(&self, keep: &BTreeSet<NodeId>) -> KripkeModel {
        let raw = self.to_raw();
        let names: BTreeSet<&str> = keep.iter().map(|&n| self.node_name(n)).collect();
        let sub = RawModel {
            sig: raw.sig,
            nodes: raw.nodes.iter().filter(|n| names.contains(n.as_str())).cloned().collect(),
            edges: {
                // Induced order, re-reduced on load.
                let mut edges = Vec::new();
                for &a in keep {
                    for &b in keep {
                        if a != b && self.leq(a, b) {
                            edges.push((self.node_name(a).to_string(), self.node_name(b).to_string()));
                        }
                    }
                }
                edges
            },
            domains: raw
                .domains
                .into_iter()
                .filter(|(n, _)| names.contains(n.as_str()))
                .collect(),
            atoms: raw.atoms.into_iter().filter(|(n, _)| names.contains(n.as_str())).collect(),
        };
        KripkeModel::from_raw(&sub).expect("restriction of a valid model is valid")
    }

    /// The truncated model: all nodes `>=` the given node, which becomes the
    /// root. Atomic forcing is unchanged.
    pub fn truncate(&self, n: NodeId) -> KripkeModel {
        self.restrict_to(&self.up_nodes(n).collect())
    }

    /// Drops every classical node strictly above `n` that is not a leaf.
    /// Forcing at `n` itself is preserved.
    pub fn restrict_prime(&self, n: NodeId) -> KripkeModel {
        let keep: BTreeSet<NodeId> = self
            .up_nodes(n)
            .filter(|&b| b == n || !self.is_classical(b) || self.is_leaf(b))
            .collect();
        self.restrict_to(&keep)
    }

    /// Stacks `d - 1` fresh copies of a single-node model beneath it,
    /// producing a `d`-node chain whose nodes all carry the same structure.
    pub fn stack_chain(&self, d: usize) -> Result<KripkeModel, ModelError> {
        if self.node_count() != 1 {
            return Err(ModelError::StackBaseNotSingleton);
        }
        if d == 0 {
            return Err(ModelError::StackZeroHeight);
        }
        if d == 1 {
            return Ok(self.clone());
        }
        let raw = self.to_raw();
        let top = raw.nodes[0].clone();
        // Root first: top_{d-1} < ... < top_1 < top.
        let mut nodes: Vec<String> = (1..d).rev().map(|i| format!("{top}_{i}")).collect();
        nodes.push(top.clone());
        let edges = nodes.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let domains = nodes
            .iter()
            .filter_map(|n| raw.domains.get(&top).map(|d| (n.clone(), d.clone())))
            .collect();
        let atoms = nodes
            .iter()
            .filter_map(|n| raw.atoms.get(&top).map(|a| (n.clone(), a.clone())))
            .collect();
        let stacked = RawModel { sig: raw.sig, nodes, edges, domains, atoms };
        Ok(KripkeModel::from_raw(&stacked).expect("stacked copies of a valid node are valid"))
    }
}

/// How `witness_for` picks between an unstable atomic fact and strict domain
/// growth when both are available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessPreference {
    GrowthFirst,
    AtomicFirst,
}

/// Evidence that a node is not classical, together with the unforced
/// excluded-middle instance it yields.
#[derive(Clone, Debug)]
pub struct NonClassicalWitness {
    pub kind: WitnessKind,
    pub tau: PemInstance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// A fact over the node's own domain that appears strictly above it.
    AtomicDiagram { fact: RawFact, present_at: String },
    /// The domain grows somewhere in the cone.
    DomainGrowth { at: String, from: usize, to: usize },
}

/// The sentence `exists x1 ... xk. /\ xi != xj` asserting `k` distinct
/// elements.
pub fn cardinality_sentence(k: usize) -> Formula {
    assert!(k >= 2, "cardinality sentences need k >= 2");
    let vars: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let mut conj: Option<Formula> = None;
    for i in 0..k {
        for j in (i + 1)..k {
            let ne = Formula::eq(Term::var(vars[i].clone()), Term::var(vars[j].clone())).neg();
            conj = Some(match conj {
                None => ne,
                Some(c) => c.and(ne),
            });
        }
    }
    let mut out = conj.expect("k >= 2 gives at least one pair");
    for v in vars.into_iter().rev() {
        out = Formula::exists(v, out);
    }
    out
}

/// Extracts an excluded-middle instance unforced at `alpha`, preferring
/// strict domain growth over unstable atomic facts. Deterministic: the fact
/// presented at the smallest node id wins, ties broken by fact name.
pub fn non_classical_witness(
    m: &KripkeModel,
    alpha: NodeId,
    sentential: bool,
) -> Result<NonClassicalWitness, ModelError> {
    witness_for(m, alpha, sentential, WitnessPreference::GrowthFirst)
}

/// As [`non_classical_witness`] but with an explicit preference between the
/// two witness classes.
pub fn witness_for(
    m: &KripkeModel,
    alpha: NodeId,
    sentential: bool,
    pref: WitnessPreference,
) -> Result<NonClassicalWitness, ModelError> {
    if !m.contains_node(alpha) {
        return Err(ModelError::UnknownNode);
    }
    if m.is_classical(alpha) {
        return Err(ModelError::NodeIsClassical(m.node_name(alpha).to_string()));
    }

    let growth = || -> Option<NonClassicalWitness> {
        let beta = m.strict_up_nodes(alpha).find(|&b| m.domain(b) != m.domain(alpha))?;
        let k = m.domain(alpha).len() + 1;
        let body = cardinality_sentence(k);
        let tau = pem_instance(&body, sentential).expect("cardinality sentences are closed");
        Some(NonClassicalWitness {
            kind: WitnessKind::DomainGrowth {
                at: m.node_name(beta).to_string(),
                from: k - 1,
                to: m.domain(beta).len(),
            },
            tau,
        })
    };

    let atomic = || -> Option<NonClassicalWitness> {
        // Facts over D(alpha), absent at alpha, present somewhere above;
        // candidates keyed by (first presenting node, fact name key).
        let mut best: Option<(u32, (String, Vec<String>), Fact)> = None;
        for beta in m.strict_up_nodes(alpha) {
            for f in m.facts(beta) {
                if m.has_fact(alpha, f) {
                    continue;
                }
                if !f.args.iter().all(|&e| m.domain_contains(alpha, e)) {
                    continue;
                }
                let key = (
                    m.pred_name(f.pred).to_string(),
                    f.args.iter().map(|&e| m.element_name(e).to_string()).collect::<Vec<_>>(),
                );
                let cand = (beta.0, key, f.clone());
                let better = match &best {
                    None => true,
                    Some((b, k, _)) => (cand.0, &cand.1) < (*b, k),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (beta, (name, arg_names), fact) = best?;
        let body = if m.signature().is_first_order() {
            if sentential {
                Formula::rel(name.clone(), arg_names.iter().map(|a| Term::param(a.clone())).collect())
            } else {
                let arity = m.pred_arity(fact.pred);
                Formula::rel(name.clone(), (1..=arity).map(|i| Term::var(format!("x{i}"))).collect())
            }
        } else {
            Formula::atom(name.clone())
        };
        let tau = pem_instance(&body, sentential).expect("witness bodies satisfy instance preconditions");
        Some(NonClassicalWitness {
            kind: WitnessKind::AtomicDiagram {
                fact: RawFact { name, args: arg_names },
                present_at: m.node_name(NodeId(beta)).to_string(),
            },
            tau,
        })
    };

    let witness = match pref {
        WitnessPreference::GrowthFirst => growth().or_else(atomic),
        WitnessPreference::AtomicFirst => atomic().or_else(growth),
    };
    Ok(witness.expect("a non-classical node has an unstable cone"))
}

/// Whether the node forces every rank-1 excluded-middle closure; on finite
/// models with identity equality this coincides with the structural
/// classicality test.
pub fn forces_pem1(m: &KripkeModel, alpha: NodeId) -> bool {
    m.is_classical(alpha)
}
