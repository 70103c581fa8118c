//! Bounded exhaustive enumeration of closed formulas, plus a vectorized
//! evaluator for whole enumeration pools.
//!
//! The pool shares subformulas: every entry is an operator over earlier
//! entry ids, stratified by quantifier nesting depth (a binder at depth `d`
//! always binds variable `d`, so each alpha-class is generated exactly
//! once, and vacuous binders are skipped). The bulk evaluator computes, per
//! entry and node, a bitmask of truth values over all variable assignments
//! at once; translated evaluation rewrites only the leaves, exactly like
//! the translations do, so the whole family of translated formulas is
//! evaluated without materializing any of them.

use std::collections::HashMap;

use crate::model::{ElemId, KripkeModel, NodeId};
use crate::syntax::{Formula, Signature, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum PTerm {
    Var(u8),
    Slot(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum POp {
    Bot,
    Fact(u16, Box<[PTerm]>),
    Eq(PTerm, PTerm),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Forall(u32),
    Exists(u32),
}

#[derive(Clone, Debug)]
pub(crate) struct PoolNode {
    pub op: POp,
    pub depth: u8,
    pub size: u8,
    /// Free-variable bitmask (variable `i` = bit `i`).
    pub fv: u8,
    /// Parameter slots used anywhere below.
    pub slots: u8,
}

/// All closed formulas over a signature up to a structural size, with
/// parameters drawn from a fixed slot list.
pub struct FormulaPool {
    preds: Vec<(String, usize)>,
    first_order: bool,
    n_slots: usize,
    pub(crate) nodes: Vec<PoolNode>,
    /// Closed formulas (depth 0) in deterministic enumeration order.
    pub(crate) sentences: Vec<u32>,
}

impl FormulaPool {
    /// Enumerates every closed formula of `sig` with at most `max_size` AST
    /// nodes and quantifier depth at most `max_qdepth`, over `n_slots`
    /// parameter slots. Counts grow quickly; the intended budgets are
    /// propositional sizes up to about 7, first-order sizes up to about 5
    /// with quantifier depth 2.
    #[allow(clippy::needless_range_loop)] // sizes both index the strata and parameterize splits
    pub fn build(sig: &Signature, max_size: usize, max_qdepth: usize, n_slots: usize) -> Self {
        assert!(max_qdepth <= 6, "pool supports quantifier depth <= 6");
        assert!(n_slots <= 8, "pool supports at most 8 parameter slots");
        let first_order = sig.is_first_order();
        let maxq = if first_order { max_qdepth } else { 0 };
        let mut pool = FormulaPool {
            preds: sig.predicates(),
            first_order,
            n_slots,
            nodes: Vec::new(),
            sentences: Vec::new(),
        };
        let mut index: HashMap<(POp, u8), u32> = HashMap::new();
        // by[d][s] lists entry ids of depth d and size s.
        let mut by: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); max_size + 1]; maxq + 1];

        for depth in (0..=maxq).rev() {
            let d = depth as u8;
            for size in 1..=max_size {
                let mut created: Vec<u32> = Vec::new();
                if size == 1 {
                    created.push(pool.add(&mut index, POp::Bot, d));
                    let terms = pool.terms_at(depth);
                    for (p, (_, arity)) in pool.preds.clone().into_iter().enumerate() {
                        for args in tuples(&terms, arity) {
                            created.push(pool.add(
                                &mut index,
                                POp::Fact(p as u16, args.into_boxed_slice()),
                                d,
                            ));
                        }
                    }
                    if pool.first_order {
                        for pair in tuples(&terms, 2) {
                            created.push(pool.add(&mut index, POp::Eq(pair[0], pair[1]), d));
                        }
                    }
                } else {
                    if depth < maxq && size >= 2 {
                        let bodies = by[depth + 1][size - 1].clone();
                        for body in bodies {
                            if pool.nodes[body as usize].fv >> depth & 1 == 1 {
                                created.push(pool.add(&mut index, POp::Forall(body), d));
                                created.push(pool.add(&mut index, POp::Exists(body), d));
                            }
                        }
                    }
                    if size >= 3 {
                        for l in 1..=(size - 2) {
                            let r = size - 1 - l;
                            let lefts = by[depth][l].clone();
                            let rights = by[depth][r].clone();
                            for &a in &lefts {
                                for &b in &rights {
                                    created.push(pool.add(&mut index, POp::And(a, b), d));
                                    created.push(pool.add(&mut index, POp::Or(a, b), d));
                                    created.push(pool.add(&mut index, POp::Imp(a, b), d));
                                }
                            }
                        }
                    }
                }
                by[depth][size] = created;
            }
        }
        for size in 1..=max_size {
            pool.sentences.extend(by[0][size].iter().copied());
        }
        pool
    }

    fn terms_at(&self, depth: usize) -> Vec<PTerm> {
        let mut out = Vec::new();
        for v in 0..depth {
            out.push(PTerm::Var(v as u8));
        }
        for s in 0..self.n_slots {
            out.push(PTerm::Slot(s as u8));
        }
        out
    }

    fn add(&mut self, index: &mut HashMap<(POp, u8), u32>, op: POp, depth: u8) -> u32 {
        if let Some(&id) = index.get(&(op.clone(), depth)) {
            return id;
        }
        let (fv, slots, size) = match &op {
            POp::Bot => (0, 0, 1),
            POp::Fact(_, args) => (term_fv(args), term_slots(args), 1),
            POp::Eq(s, t) => {
                let args = [*s, *t];
                (term_fv(&args), term_slots(&args), 1)
            }
            POp::And(a, b) | POp::Or(a, b) | POp::Imp(a, b) => {
                let (na, nb) = (&self.nodes[*a as usize], &self.nodes[*b as usize]);
                (na.fv | nb.fv, na.slots | nb.slots, na.size + nb.size + 1)
            }
            POp::Forall(body) | POp::Exists(body) => {
                let nb = &self.nodes[*body as usize];
                (nb.fv & !(1 << depth), nb.slots, nb.size + 1)
            }
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(PoolNode { op: op.clone(), depth, size, fv, slots });
        index.insert((op, depth), id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// Entry ids of the closed formulas, in enumeration order; valid inputs
    /// to [`FormulaPool::to_formula`] and indices into computed tables.
    pub fn sentence_ids(&self) -> &[u32] {
        &self.sentences
    }

    /// Materializes an entry as a formula tree; slot `i` becomes a parameter
    /// named `slot_names[i]`, the binder at depth `d` is called `x{d+1}`.
    pub fn to_formula(&self, id: u32, slot_names: &[String]) -> Formula {
        let node = &self.nodes[id as usize];
        let term = |t: &PTerm| match t {
            PTerm::Var(v) => Term::var(format!("x{}", v + 1)),
            PTerm::Slot(s) => Term::param(slot_names[*s as usize].clone()),
        };
        match &node.op {
            POp::Bot => Formula::Bot,
            POp::Fact(p, args) => {
                let (name, _) = &self.preds[*p as usize];
                if self.first_order {
                    Formula::rel(name.clone(), args.iter().map(term).collect())
                } else {
                    Formula::atom(name.clone())
                }
            }
            POp::Eq(s, t) => Formula::eq(term(s), term(t)),
            POp::And(a, b) => {
                self.to_formula(*a, slot_names).and(self.to_formula(*b, slot_names))
            }
            POp::Or(a, b) => self.to_formula(*a, slot_names).or(self.to_formula(*b, slot_names)),
            POp::Imp(a, b) => {
                self.to_formula(*a, slot_names).imp(self.to_formula(*b, slot_names))
            }
            POp::Forall(body) => Formula::forall(
                format!("x{}", node.depth + 1),
                self.to_formula(*body, slot_names),
            ),
            POp::Exists(body) => Formula::exists(
                format!("x{}", node.depth + 1),
                self.to_formula(*body, slot_names),
            ),
        }
    }

    /// Closed formulas in enumeration order.
    pub fn sentence_formulas(&self, slot_names: &[String]) -> impl Iterator<Item = Formula> + '_ {
        let names = slot_names.to_vec();
        self.sentences.iter().map(move |&id| self.to_formula(id, &names))
    }
}

fn term_fv(args: &[PTerm]) -> u8 {
    args.iter().fold(0, |m, t| match t {
        PTerm::Var(v) => m | 1 << v,
        PTerm::Slot(_) => m,
    })
}

fn term_slots(args: &[PTerm]) -> u8 {
    args.iter().fold(0, |m, t| match t {
        PTerm::Slot(s) => m | 1 << s,
        PTerm::Var(_) => m,
    })
}

fn tuples(terms: &[PTerm], arity: usize) -> Vec<Vec<PTerm>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * terms.len());
        for prefix in &out {
            for &t in terms {
                let mut tup = prefix.clone();
                tup.push(t);
                next.push(tup);
            }
        }
        out = next;
    }
    out
}

/// Where quantifiers range and how implication is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMode {
    Force,
    Classical,
}

/// Leaf rewriting applied during bulk evaluation: disjoin every atomic
/// leaf with a sentence whose per-node forcing is `rho_forced`, optionally
/// double-negating universal bodies first.
#[derive(Clone, Copy, Debug)]
pub struct Translation {
    pub rho_forced: u64,
    pub kuroda: bool,
}

/// Evaluation context for one model: which nodes are alive (for evaluating
/// inside a pruned submodel) and what each parameter slot denotes.
pub struct EngineCtx<'m> {
    pub model: &'m KripkeModel,
    pub slot_elems: Vec<ElemId>,
    pub alive: u64,
}

impl<'m> EngineCtx<'m> {
    pub fn full(model: &'m KripkeModel, slot_elems: Vec<ElemId>) -> Self {
        let alive = full_mask(model.node_count());
        EngineCtx { model, slot_elems, alive }
    }

    /// Whether the bulk engine's packing limits cover this model.
    pub fn supported(model: &KripkeModel, max_qdepth: usize) -> bool {
        model.node_count() <= 64
            && model.signature().predicates().iter().all(|(_, a)| *a <= 2)
            && model_elem_count(model) <= 4
            && max_qdepth <= 2
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn model_elem_count(model: &KripkeModel) -> usize {
    model
        .nodes()
        .filter_map(|a| model.domain(a).iter().copied().max())
        .map(|e| e as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Computes, for every pool entry and node, the bitmask of truth values over
/// all assignments of the entry's enclosing variables to model elements
/// (mixed-radix by element id). Entry `e` at node `a` lives at
/// `tables[e * n + a]`; closed entries use bit 0. Values at dead nodes or at
/// assignments whose elements are outside a node's domain are garbage;
/// recursion from a live node over in-domain assignments never reads them.
pub fn compute_tables(
    pool: &FormulaPool,
    ctx: &EngineCtx<'_>,
    mode: TableMode,
    trans: Option<Translation>,
) -> Vec<u16> {
    let model = ctx.model;
    let n = model.node_count();
    assert!(n <= 64, "bulk engine supports at most 64 nodes");
    let m = model_elem_count(model).max(1);
    let max_depth = pool.nodes.iter().map(|e| e.depth).max().unwrap_or(0) as u32;
    assert!(
        m.pow(max_depth) <= 16,
        "bulk engine needs elements^depth within a 16-bit mask"
    );

    // Per predicate and node: bitmask over argument tuples (mixed radix m).
    let preds = model.signature().predicates();
    let mut fact_bits = vec![vec![0u16; n]; preds.len()];
    for node in model.nodes() {
        for f in model.facts(node) {
            let mut idx = 0usize;
            for (i, e) in f.args.iter().enumerate() {
                idx += e.index() * m.pow(i as u32);
            }
            fact_bits[f.pred.0 as usize][node.index()] |= 1 << idx;
        }
    }

    let up_live: Vec<Vec<u32>> = model
        .nodes()
        .map(|a| {
            model
                .up_set(a)
                .iter()
                .copied()
                .filter(|&b| ctx.alive >> b & 1 == 1)
                .collect()
        })
        .collect();

    let rho_full = |node: usize| -> u16 {
        match trans {
            Some(t) if t.rho_forced >> node & 1 == 1 => u16::MAX,
            _ => 0,
        }
    };
    let kuroda = trans.map(|t| t.kuroda).unwrap_or(false);

    let mut tables = vec![0u16; pool.nodes.len() * n];
    for (eid, entry) in pool.nodes.iter().enumerate() {
        let stride = m.pow(entry.depth as u32);
        let env_mask = ((1u32 << stride) - 1) as u16;
        for a in 0..n {
            let value: u16 = match &entry.op {
                POp::Bot => rho_full(a) & env_mask,
                POp::Fact(p, args) => {
                    let mut acc = 0u16;
                    for env in 0..stride {
                        let mut idx = 0usize;
                        for (i, t) in args.iter().enumerate() {
                            let e = match t {
                                PTerm::Var(v) => env / m.pow(*v as u32) % m,
                                PTerm::Slot(s) => ctx.slot_elems[*s as usize].index(),
                            };
                            idx += e * m.pow(i as u32);
                        }
                        if fact_bits[*p as usize][a] >> idx & 1 == 1 {
                            acc |= 1 << env;
                        }
                    }
                    (acc | rho_full(a)) & env_mask
                }
                POp::Eq(s, t) => {
                    let mut acc = 0u16;
                    for env in 0..stride {
                        let resolve = |t: &PTerm| match t {
                            PTerm::Var(v) => env / m.pow(*v as u32) % m,
                            PTerm::Slot(s) => ctx.slot_elems[*s as usize].index(),
                        };
                        if resolve(s) == resolve(t) {
                            acc |= 1 << env;
                        }
                    }
                    (acc | rho_full(a)) & env_mask
                }
                POp::And(x, y) => tables[*x as usize * n + a] & tables[*y as usize * n + a],
                POp::Or(x, y) => tables[*x as usize * n + a] | tables[*y as usize * n + a],
                POp::Imp(x, y) => match mode {
                    TableMode::Classical => {
                        (!tables[*x as usize * n + a] | tables[*y as usize * n + a]) & env_mask
                    }
                    TableMode::Force => {
                        let mut acc = env_mask;
                        for &b in &up_live[a] {
                            let b = b as usize;
                            acc &= !tables[*x as usize * n + b] | tables[*y as usize * n + b];
                        }
                        acc
                    }
                },
                POp::Exists(body) => {
                    let mut acc = 0u16;
                    for &d in model.domain(NodeId(a as u32)) {
                        acc |= group(tables[*body as usize * n + a], d as usize, stride);
                    }
                    acc & env_mask
                }
                POp::Forall(body) => match mode {
                    TableMode::Classical => {
                        let mut acc = env_mask;
                        for &d in model.domain(NodeId(a as u32)) {
                            acc &= group(tables[*body as usize * n + a], d as usize, stride);
                        }
                        acc
                    }
                    TableMode::Force => {
                        let mut acc = env_mask;
                        for &b in &up_live[a] {
                            let b = b as usize;
                            let inst = if kuroda {
                                nn_translated(&tables, &up_live, *body as usize, n, b, &rho_full)
                            } else {
                                tables[*body as usize * n + b]
                            };
                            for &d in model.domain(NodeId(b as u32)) {
                                acc &= group(inst, d as usize, stride);
                            }
                        }
                        acc
                    }
                },
            };
            tables[eid * n + a] = value;
        }
    }
    tables
}

/// Forcing table at `node` of the translated double negation
/// `((B' -> _|_ | rho) -> _|_ | rho)` where `B'` is the already-translated
/// body table; used for universal bodies of the double-negating variant.
fn nn_translated(
    tables: &[u16],
    up_live: &[Vec<u32>],
    body: usize,
    n: usize,
    node: usize,
    rho_full: &dyn Fn(usize) -> u16,
) -> u16 {
    let mut outer = u16::MAX;
    for &g in &up_live[node] {
        let g = g as usize;
        let mut inner = u16::MAX;
        for &e in &up_live[g] {
            let e = e as usize;
            inner &= !tables[body * n + e] | rho_full(e);
        }
        outer &= !inner | rho_full(g);
    }
    outer
}

fn group(mask: u16, elem: usize, stride: usize) -> u16 {
    ((mask as u32 >> (elem * stride)) & ((1u32 << stride) - 1)) as u16
}

/// All closed formulas of the signature with at most `size` AST nodes and
/// quantifier depth at most `qdepth`, parameters drawn from `params_from`.
pub fn exhaustive_formulas(
    sig: &Signature,
    size: usize,
    qdepth: usize,
    params_from: &[String],
) -> Vec<Formula> {
    let pool = FormulaPool::build(sig, size, qdepth, params_from.len());
    pool.sentence_formulas(params_from).collect()
}
