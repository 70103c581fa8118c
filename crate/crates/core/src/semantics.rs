//! Forcing and per-node classical truth.
//!
//! The evaluator interns formulas into an arena, substitutes domain elements
//! eagerly, and memoizes per (subformula, node). Results are required to
//! agree with the plain recursive transcription of the forcing clauses in
//! `testkit::naive_forces`; the differential suite enforces that.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{ElemId, Fact, KripkeModel, NodeId, PredId};
use crate::syntax::{Formula, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unknown node id")]
    UnknownNode,
    #[error("formula has a free variable `{0}`")]
    FreeVariable(String),
    #[error("unknown parameter `#{0}`")]
    UnknownParameter(String),
    #[error("parameter `#{element}` outside the domain of `{node}`")]
    ParameterOutsideDomain { element: String, node: String },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("relation `{name}` expects {expected} arguments, got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("first-order construct evaluated against a propositional model")]
    FirstOrderInPropositional,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum ETerm {
    Var(u32),
    Elem(ElemId),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Expr {
    Bot,
    Fact(PredId, Box<[ETerm]>),
    Eq(ETerm, ETerm),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Forall(u32, u32),
    Exists(u32, u32),
}

const UNKNOWN: u8 = 0;
const FALSE: u8 = 1;
const TRUE: u8 = 2;

/// Reusable evaluation state for one model. Interning is shared across
/// queries, so bulk evaluation of related sentences (for instance a family
/// of translations by one sentence) reuses both structure and verdicts.
pub struct Evaluator<'m> {
    model: &'m KripkeModel,
    n: usize,
    exprs: Vec<Expr>,
    index: HashMap<Expr, u32>,
    free: Vec<u64>,
    ground_fact: Vec<Option<Fact>>,
    vars: Vec<String>,
    force_memo: Vec<u8>,
    classical_memo: Vec<u8>,
    subst_memo: HashMap<(u32, u32, ElemId), u32>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m KripkeModel) -> Self {
        Evaluator {
            model,
            n: model.node_count(),
            exprs: Vec::new(),
            index: HashMap::new(),
            free: Vec::new(),
            ground_fact: Vec::new(),
            vars: Vec::new(),
            force_memo: Vec::new(),
            classical_memo: Vec::new(),
            subst_memo: HashMap::new(),
        }
    }

    pub fn model(&self) -> &'m KripkeModel {
        self.model
    }

    /// Kripke forcing at a node. The formula must be a sentence whose
    /// parameters all lie in the node's domain.
    pub fn forces(&mut self, node: NodeId, f: &Formula) -> Result<bool, SemanticsError> {
        let e = self.prepare(node, f)?;
        Ok(self.eval_force(e, node.index()))
    }

    /// Tarskian truth in the classical structure attached to a node:
    /// quantifiers range over the node's own domain and implication is
    /// material.
    pub fn classical(&mut self, node: NodeId, f: &Formula) -> Result<bool, SemanticsError> {
        let e = self.prepare(node, f)?;
        Ok(self.eval_classical(e, node.index()))
    }

    fn prepare(&mut self, node: NodeId, f: &Formula) -> Result<u32, SemanticsError> {
        if !self.model.contains_node(node) {
            return Err(SemanticsError::UnknownNode);
        }
        for p in f.parameters() {
            match self.model.element(&p) {
                None => return Err(SemanticsError::UnknownParameter(p)),
                Some(e) => {
                    if !self.model.domain_contains(node, e) {
                        return Err(SemanticsError::ParameterOutsideDomain {
                            element: p,
                            node: self.model.node_name(node).to_string(),
                        });
                    }
                }
            }
        }
        let e = self.intern(f)?;
        if self.free[e as usize] != 0 {
            let v = (0..64).find(|i| self.free[e as usize] >> i & 1 == 1).unwrap();
            return Err(SemanticsError::FreeVariable(self.vars[v as usize].clone()));
        }
        Ok(e)
    }

    fn var_id(&mut self, name: &str) -> u32 {
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return i as u32;
        }
        assert!(self.vars.len() < 64, "formula uses more than 64 distinct variables");
        self.vars.push(name.to_string());
        (self.vars.len() - 1) as u32
    }

    fn resolve_term(&mut self, t: &Term) -> Result<ETerm, SemanticsError> {
        match t {
            Term::Var(v) => Ok(ETerm::Var(self.var_id(v))),
            Term::Param(p) => match self.model.element(p) {
                Some(e) => Ok(ETerm::Elem(e)),
                None => Err(SemanticsError::UnknownParameter(p.clone())),
            },
            Term::Const(c) => match self.model.constant_element(c) {
                Some(e) => Ok(ETerm::Elem(e)),
                None => Err(SemanticsError::UndeclaredSymbol(c.clone())),
            },
        }
    }

    fn intern(&mut self, f: &Formula) -> Result<u32, SemanticsError> {
        let first_order = self.model.signature().is_first_order();
        let expr = match f {
            Formula::Bot => Expr::Bot,
            Formula::Atom(name) => {
                let pred = self
                    .model
                    .pred(name)
                    .ok_or_else(|| SemanticsError::UndeclaredSymbol(name.clone()))?;
                if self.model.pred_arity(pred) != 0 {
                    return Err(SemanticsError::ArityMismatch {
                        name: name.clone(),
                        expected: self.model.pred_arity(pred),
                        got: 0,
                    });
                }
                Expr::Fact(pred, Box::new([]))
            }
            Formula::Rel(name, args) => {
                if !first_order {
                    return Err(SemanticsError::FirstOrderInPropositional);
                }
                let pred = self
                    .model
                    .pred(name)
                    .ok_or_else(|| SemanticsError::UndeclaredSymbol(name.clone()))?;
                if self.model.pred_arity(pred) != args.len() {
                    return Err(SemanticsError::ArityMismatch {
                        name: name.clone(),
                        expected: self.model.pred_arity(pred),
                        got: args.len(),
                    });
                }
                let terms: Result<Vec<ETerm>, _> =
                    args.iter().map(|t| self.resolve_term(t)).collect();
                Expr::Fact(pred, terms?.into_boxed_slice())
            }
            Formula::Eq(s, t) => {
                if !first_order {
                    return Err(SemanticsError::FirstOrderInPropositional);
                }
                Expr::Eq(self.resolve_term(s)?, self.resolve_term(t)?)
            }
            Formula::And(a, b) => Expr::And(self.intern(a)?, self.intern(b)?),
            Formula::Or(a, b) => Expr::Or(self.intern(a)?, self.intern(b)?),
            Formula::Imp(a, b) => Expr::Imp(self.intern(a)?, self.intern(b)?),
            Formula::Forall(v, body) => {
                if !first_order {
                    return Err(SemanticsError::FirstOrderInPropositional);
                }
                let var = self.var_id(v);
                Expr::Forall(var, self.intern(body)?)
            }
            Formula::Exists(v, body) => {
                if !first_order {
                    return Err(SemanticsError::FirstOrderInPropositional);
                }
                let var = self.var_id(v);
                Expr::Exists(var, self.intern(body)?)
            }
        };
        Ok(self.add(expr))
    }

    fn add(&mut self, expr: Expr) -> u32 {
        if let Some(&id) = self.index.get(&expr) {
            return id;
        }
        let id = self.exprs.len() as u32;
        let free = match &expr {
            Expr::Bot => 0,
            Expr::Fact(_, args) => args.iter().fold(0u64, |m, t| match t {
                ETerm::Var(v) => m | 1 << v,
                ETerm::Elem(_) => m,
            }),
            Expr::Eq(s, t) => {
                let one = |t: &ETerm| match t {
                    ETerm::Var(v) => 1u64 << v,
                    ETerm::Elem(_) => 0,
                };
                one(s) | one(t)
            }
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => {
                self.free[*a as usize] | self.free[*b as usize]
            }
            Expr::Forall(v, body) | Expr::Exists(v, body) => {
                self.free[*body as usize] & !(1 << v)
            }
        };
        let ground = match &expr {
            Expr::Fact(pred, args) if free & args_mask(args) == 0 => {
                let elems: Option<Vec<ElemId>> = args
                    .iter()
                    .map(|t| match t {
                        ETerm::Elem(e) => Some(*e),
                        ETerm::Var(_) => None,
                    })
                    .collect();
                elems.map(|args| Fact { pred: *pred, args })
            }
            _ => None,
        };
        self.exprs.push(expr.clone());
        self.free.push(free);
        self.ground_fact.push(ground);
        self.force_memo.resize(self.force_memo.len() + self.n, UNKNOWN);
        self.classical_memo.resize(self.classical_memo.len() + self.n, UNKNOWN);
        self.index.insert(expr, id);
        id
    }

    /// `expr[var := elem]`, memoized on the arena.
    fn subst(&mut self, expr: u32, var: u32, elem: ElemId) -> u32 {
        if self.free[expr as usize] >> var & 1 == 0 {
            return expr;
        }
        if let Some(&cached) = self.subst_memo.get(&(expr, var, elem)) {
            return cached;
        }
        let sub_term = |t: &ETerm| match t {
            ETerm::Var(v) if *v == var => ETerm::Elem(elem),
            other => *other,
        };
        let replaced = match self.exprs[expr as usize].clone() {
            Expr::Bot => Expr::Bot,
            Expr::Fact(p, args) => Expr::Fact(p, args.iter().map(sub_term).collect()),
            Expr::Eq(s, t) => Expr::Eq(sub_term(&s), sub_term(&t)),
            Expr::And(a, b) => Expr::And(self.subst(a, var, elem), self.subst(b, var, elem)),
            Expr::Or(a, b) => Expr::Or(self.subst(a, var, elem), self.subst(b, var, elem)),
            Expr::Imp(a, b) => Expr::Imp(self.subst(a, var, elem), self.subst(b, var, elem)),
            // A bound occurrence of `var` would have been masked out of the
            // free set, so `v != var` here.
            Expr::Forall(v, body) => Expr::Forall(v, self.subst(body, var, elem)),
            Expr::Exists(v, body) => Expr::Exists(v, self.subst(body, var, elem)),
        };
        let id = self.add(replaced);
        self.subst_memo.insert((expr, var, elem), id);
        id
    }

    fn eval_force(&mut self, expr: u32, node: usize) -> bool {
        match self.force_memo[expr as usize * self.n + node] {
            TRUE => return true,
            FALSE => return false,
            _ => {}
        }
        let model = self.model;
        let value = match self.exprs[expr as usize].clone() {
            Expr::Bot => false,
            Expr::Fact(..) => {
                let fact = self.ground_fact[expr as usize].as_ref().expect("closed at eval");
                model.has_fact(NodeId(node as u32), fact)
            }
            Expr::Eq(ETerm::Elem(a), ETerm::Elem(b)) => a == b,
            Expr::Eq(..) => unreachable!("closed at eval"),
            Expr::And(a, b) => self.eval_force(a, node) && self.eval_force(b, node),
            Expr::Or(a, b) => self.eval_force(a, node) || self.eval_force(b, node),
            Expr::Imp(a, b) => model
                .up_set(NodeId(node as u32))
                .iter()
                .all(|&beta| !self.eval_force(a, beta as usize) || self.eval_force(b, beta as usize)),
            Expr::Forall(v, body) => model.up_set(NodeId(node as u32)).iter().all(|&beta| {
                model.domain(NodeId(beta)).iter().all(|&d| {
                    let inst = self.subst(body, v, ElemId(d));
                    self.eval_force(inst, beta as usize)
                })
            }),
            Expr::Exists(v, body) => model.domain(NodeId(node as u32)).iter().any(|&d| {
                let inst = self.subst(body, v, ElemId(d));
                self.eval_force(inst, node)
            }),
        };
        self.force_memo[expr as usize * self.n + node] = if value { TRUE } else { FALSE };
        value
    }

    fn eval_classical(&mut self, expr: u32, node: usize) -> bool {
        match self.classical_memo[expr as usize * self.n + node] {
            TRUE => return true,
            FALSE => return false,
            _ => {}
        }
        let model = self.model;
        let value = match self.exprs[expr as usize].clone() {
            Expr::Bot => false,
            Expr::Fact(..) => {
                let fact = self.ground_fact[expr as usize].as_ref().expect("closed at eval");
                model.has_fact(NodeId(node as u32), fact)
            }
            Expr::Eq(ETerm::Elem(a), ETerm::Elem(b)) => a == b,
            Expr::Eq(..) => unreachable!("closed at eval"),
            Expr::And(a, b) => self.eval_classical(a, node) && self.eval_classical(b, node),
            Expr::Or(a, b) => self.eval_classical(a, node) || self.eval_classical(b, node),
            Expr::Imp(a, b) => !self.eval_classical(a, node) || self.eval_classical(b, node),
            Expr::Forall(v, body) => model.domain(NodeId(node as u32)).iter().all(|&d| {
                let inst = self.subst(body, v, ElemId(d));
                self.eval_classical(inst, node)
            }),
            Expr::Exists(v, body) => model.domain(NodeId(node as u32)).iter().any(|&d| {
                let inst = self.subst(body, v, ElemId(d));
                self.eval_classical(inst, node)
            }),
        };
        self.classical_memo[expr as usize * self.n + node] = if value { TRUE } else { FALSE };
        value
    }
}

fn args_mask(args: &[ETerm]) -> u64 {
    args.iter().fold(0u64, |m, t| match t {
        ETerm::Var(v) => m | 1 << v,
        ETerm::Elem(_) => m,
    })
}

/// One-shot forcing query; see [`Evaluator::forces`].
pub fn forces(m: &KripkeModel, node: NodeId, f: &Formula) -> Result<bool, SemanticsError> {
    Evaluator::new(m).forces(node, f)
}

/// One-shot classical-truth query; see [`Evaluator::classical`].
pub fn classical_truth(m: &KripkeModel, node: NodeId, f: &Formula) -> Result<bool, SemanticsError> {
    Evaluator::new(m).classical(node, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{KripkeModel, RawModel};
    use crate::syntax::Signature;
    use std::collections::BTreeMap;

    fn two_chain() -> KripkeModel {
        let mut atoms = BTreeMap::new();
        atoms.insert(
            "b".to_string(),
            vec![crate::model::RawFact { name: "p".into(), args: vec![] }],
        );
        KripkeModel::from_raw(&RawModel {
            sig: Signature::propositional(["p"]).unwrap(),
            nodes: vec!["a".into(), "b".into()],
            edges: vec![("a".into(), "b".into())],
            domains: BTreeMap::new(),
            atoms,
        })
        .unwrap()
    }

    fn growth_model() -> KripkeModel {
        let mut domains = BTreeMap::new();
        domains.insert("a".to_string(), vec!["0".to_string()]);
        domains.insert("b".to_string(), vec!["0".to_string(), "1".to_string()]);
        KripkeModel::from_raw(&RawModel {
            sig: Signature::first_order([("R", 1)], Vec::<String>::new()).unwrap(),
            nodes: vec!["a".into(), "b".into()],
            edges: vec![("a".into(), "b".into())],
            domains,
            atoms: BTreeMap::new(),
        })
        .unwrap()
    }

    #[test]
    fn excluded_middle_fails_at_the_root() {
        let m = two_chain();
        let a = m.node("a").unwrap();
        let b = m.node("b").unwrap();
        let pem = Formula::atom("p").or(Formula::atom("p").neg());
        assert!(!forces(&m, a, &pem).unwrap());
        assert!(forces(&m, b, &pem).unwrap());
        assert!(classical_truth(&m, a, &pem).unwrap());
        assert!(!forces(&m, a, &Formula::Bot).unwrap());
    }

    #[test]
    fn quantifiers_over_growing_domains() {
        let m = growth_model();
        let a = m.node("a").unwrap();
        let b = m.node("b").unwrap();
        let two = crate::model::cardinality_sentence(2);
        assert!(!forces(&m, a, &two).unwrap());
        assert!(forces(&m, b, &two).unwrap());
        assert!(!classical_truth(&m, a, &two).unwrap());
        assert!(classical_truth(&m, b, &two).unwrap());

        // forall x. x = #0 is classically true at `a` but not forced there.
        let all_zero = Formula::forall("x", Formula::eq(Term::var("x"), Term::param("0")));
        assert!(classical_truth(&m, a, &all_zero).unwrap());
        assert!(!forces(&m, a, &all_zero).unwrap());
    }

    #[test]
    fn error_paths() {
        let m = growth_model();
        let a = m.node("a").unwrap();
        let open = Formula::rel("R", vec![Term::var("x")]);
        assert!(matches!(forces(&m, a, &open), Err(SemanticsError::FreeVariable(_))));
        let outside = Formula::rel("R", vec![Term::param("1")]);
        assert!(matches!(
            forces(&m, a, &outside),
            Err(SemanticsError::ParameterOutsideDomain { .. })
        ));
        assert!(forces(&m, m.node("b").unwrap(), &outside).is_ok());
        let unknown = Formula::rel("Q", vec![Term::param("0")]);
        assert!(matches!(forces(&m, a, &unknown), Err(SemanticsError::UndeclaredSymbol(_))));
    }
}
