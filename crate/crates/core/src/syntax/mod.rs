//! Formulas of the propositional language and of relational first-order
//! languages with built-in equality, plus the structural operations on them.
//!
//! Negation is not a connective: `~A` abbreviates `A -> _|_` and is stored
//! as [`Formula::Imp`] with a [`Formula::Bot`] consequent. First-order
//! signatures carry relations and constants only; function symbols are not
//! supported, which keeps evaluation over finite domains total.

mod parse;
mod print;

pub use parse::{infer_signature, parse_formula, ParseError, ParseErrorKind};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A symbol table for one of the two supported languages.
///
/// Names must be unique across atoms, relations and constants. First-order
/// signatures always include equality; propositional signatures carry atoms
/// only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Signature {
    Propositional { atoms: Vec<String> },
    FirstOrder { relations: Vec<(String, usize)>, constants: Vec<String> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
    #[error("invalid symbol name `{0}`")]
    BadName(String),
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn propositional<S: Into<String>>(atoms: impl IntoIterator<Item = S>) -> Result<Self, SignatureError> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        check_unique(atoms.iter())?;
        Ok(Signature::Propositional { atoms })
    }

    pub fn first_order<S: Into<String>, T: Into<String>>(
        relations: impl IntoIterator<Item = (S, usize)>,
        constants: impl IntoIterator<Item = T>,
    ) -> Result<Self, SignatureError> {
        let relations: Vec<(String, usize)> = relations.into_iter().map(|(n, a)| (n.into(), a)).collect();
        let constants: Vec<String> = constants.into_iter().map(Into::into).collect();
        check_unique(relations.iter().map(|(n, _)| n).chain(constants.iter()))?;
        Ok(Signature::FirstOrder { relations, constants })
    }

    pub fn is_first_order(&self) -> bool {
        matches!(self, Signature::FirstOrder { .. })
    }

    pub fn has_atom(&self, name: &str) -> bool {
        match self {
            Signature::Propositional { atoms } => atoms.iter().any(|a| a == name),
            Signature::FirstOrder { .. } => false,
        }
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        match self {
            Signature::Propositional { .. } => None,
            Signature::FirstOrder { relations, .. } => {
                relations.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
            }
        }
    }

    pub fn has_constant(&self, name: &str) -> bool {
        match self {
            Signature::Propositional { .. } => false,
            Signature::FirstOrder { constants, .. } => constants.iter().any(|c| c == name),
        }
    }

    /// Predicate symbols with arities: propositional atoms count as 0-ary.
    pub fn predicates(&self) -> Vec<(String, usize)> {
        match self {
            Signature::Propositional { atoms } => atoms.iter().map(|a| (a.clone(), 0)).collect(),
            Signature::FirstOrder { relations, .. } => relations.clone(),
        }
    }

    /// Checks that `f` is well-formed over this signature: symbols declared,
    /// arities matched, and no first-order constructs in a propositional
    /// signature.
    pub fn check(&self, f: &Formula) -> Result<(), FormulaError> {
        match f {
            Formula::Bot => Ok(()),
            Formula::Atom(name) => {
                if self.is_first_order() {
                    if self.relation_arity(name) == Some(0) {
                        Ok(())
                    } else {
                        Err(FormulaError::UndeclaredSymbol(name.clone()))
                    }
                } else if self.has_atom(name) {
                    Ok(())
                } else {
                    Err(FormulaError::UndeclaredSymbol(name.clone()))
                }
            }
            Formula::Rel(name, args) => {
                if !self.is_first_order() {
                    return Err(FormulaError::FirstOrderInPropositional);
                }
                match self.relation_arity(name) {
                    None => Err(FormulaError::UndeclaredSymbol(name.clone())),
                    Some(a) if a != args.len() => Err(FormulaError::ArityMismatch {
                        name: name.clone(),
                        expected: a,
                        got: args.len(),
                    }),
                    Some(_) => args.iter().try_for_each(|t| self.check_term(t)),
                }
            }
            Formula::Eq(s, t) => {
                if !self.is_first_order() {
                    return Err(FormulaError::FirstOrderInPropositional);
                }
                self.check_term(s)?;
                self.check_term(t)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                self.check(a)?;
                self.check(b)
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => {
                if !self.is_first_order() {
                    return Err(FormulaError::FirstOrderInPropositional);
                }
                self.check(body)
            }
        }
    }

    fn check_term(&self, t: &Term) -> Result<(), FormulaError> {
        match t {
            Term::Var(_) | Term::Param(_) => Ok(()),
            Term::Const(name) => {
                if self.has_constant(name) {
                    Ok(())
                } else {
                    Err(FormulaError::UndeclaredSymbol(name.clone()))
                }
            }
        }
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a String>) -> Result<(), SignatureError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !valid_name(n) {
            return Err(SignatureError::BadName(n.clone()));
        }
        if !seen.insert(n.clone()) {
            return Err(SignatureError::Duplicate(n.clone()));
        }
    }
    Ok(())
}

/// A first-order term: a variable, a declared constant, or a parameter
/// naming a domain element of some model node (written `#id`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Param(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn param(id: impl Into<String>) -> Self {
        Term::Param(id.into())
    }
}

/// Formula AST. `~A` is represented as `Imp(A, Bot)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Atom(String),
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("relation `{name}` expects {expected} arguments, got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("first-order construct in a propositional signature")]
    FirstOrderInPropositional,
    #[error("formula has free variables: {0:?}")]
    NotClosed(Vec<String>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Rel(name.into(), args)
    }

    pub fn eq(s: Term, t: Term) -> Self {
        Formula::Eq(s, t)
    }

    pub fn and(self, other: Self) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn imp(self, other: Self) -> Self {
        Formula::Imp(Box::new(self), Box::new(other))
    }

    /// `~self`, i.e. `self -> _|_`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Formula::Imp(Box::new(self), Box::new(Formula::Bot))
    }

    pub fn forall(var: impl Into<String>, body: Self) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Self) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Bot | Formula::Atom(_) | Formula::Rel(..) | Formula::Eq(..))
    }

    /// Number of AST nodes; terms do not count, `_|_` counts as 1.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(_) | Formula::Rel(..) | Formula::Eq(..) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.size(),
        }
    }

    /// Free variables under standard binding semantics. Parameters are
    /// closed terms and never show up here.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term| {
            if let Term::Var(v) = t {
                if !bound.iter().any(|b| b == v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Bot | Formula::Atom(_) => {}
            Formula::Rel(_, args) => args.iter().for_each(&mut term),
            Formula::Eq(s, t) => {
                term(s);
                term(t);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Parameters occurring anywhere in the formula.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Param(p) = t {
                out.insert(p.clone());
            }
        });
        out
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Bot | Formula::Atom(_) => {}
            Formula::Rel(_, args) => args.iter().for_each(&mut *f),
            Formula::Eq(s, t) => {
                f(s);
                f(t);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.visit_terms(f),
        }
    }

    /// Universal closure: a `forall` prefix over the free variables in
    /// lexicographic order (outermost first), so closures are canonical.
    pub fn universal_closure(&self) -> Formula {
        let mut out = self.clone();
        for v in self.free_variables().into_iter().rev() {
            out = Formula::forall(v, out);
        }
        out
    }

    /// Capture-avoiding substitution of `t` for free occurrences of `var`.
    pub fn substitute(&self, var: &str, t: &Term) -> Formula {
        let sub_term = |s: &Term| -> Term {
            match s {
                Term::Var(v) if v == var => t.clone(),
                other => other.clone(),
            }
        };
        match self {
            Formula::Bot | Formula::Atom(_) => self.clone(),
            Formula::Rel(name, args) => Formula::Rel(name.clone(), args.iter().map(sub_term).collect()),
            Formula::Eq(s, u) => Formula::Eq(sub_term(s), sub_term(u)),
            Formula::And(a, b) => a.substitute(var, t).and(b.substitute(var, t)),
            Formula::Or(a, b) => a.substitute(var, t).or(b.substitute(var, t)),
            Formula::Imp(a, b) => a.substitute(var, t).imp(b.substitute(var, t)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let make = |v: String, b: Formula| match self {
                    Formula::Forall(..) => Formula::forall(v, b),
                    _ => Formula::exists(v, b),
                };
                if v == var {
                    return self.clone();
                }
                if !body.free_variables().contains(var) {
                    return self.clone();
                }
                if matches!(t, Term::Var(w) if w == v) {
                    // The substituted variable would be captured: rename the
                    // binder to a fresh name first.
                    let fresh = fresh_variable(v, |cand| {
                        cand != var
                            && !matches!(t, Term::Var(w) if w == cand)
                            && !body.free_variables().contains(cand)
                    });
                    let renamed = body.substitute(v, &Term::var(fresh.clone()));
                    make(fresh, renamed.substitute(var, t))
                } else {
                    make(v.clone(), body.substitute(var, t))
                }
            }
        }
    }

    /// All subformula occurrences in pre-order, structurally deduplicated;
    /// the formula itself comes first.
    pub fn subformulas(&self) -> Vec<&Formula> {
        fn walk<'a>(f: &'a Formula, seen: &mut BTreeSet<&'a Formula>, out: &mut Vec<&'a Formula>) {
            if !seen.insert(f) {
                return;
            }
            out.push(f);
            match f {
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    walk(a, seen, out);
                    walk(b, seen, out);
                }
                Formula::Forall(_, body) | Formula::Exists(_, body) => walk(body, seen, out),
                _ => {}
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        walk(self, &mut seen, &mut out);
        out
    }
}

/// Picks `base` itself if `ok(base)`, otherwise `base_1`, `base_2`, ...
fn fresh_variable(base: &str, ok: impl Fn(&str) -> bool) -> String {
    if ok(base) {
        return base.to_string();
    }
    for i in 1.. {
        let cand = format!("{base}_{i}");
        if ok(&cand) {
            return cand;
        }
    }
    unreachable!()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Param(p) => write!(f, "#{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn free_variables_standard_cases() {
        let f = Formula::forall("x", Formula::rel("R", vec![Term::var("x")]));
        assert!(f.free_variables().is_empty());

        let g = Formula::rel("R", vec![Term::var("x")])
            .imp(Formula::exists("y", Formula::rel("S", vec![Term::var("x"), Term::var("y")])));
        assert_eq!(g.free_variables().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);

        let h = Formula::rel("R", vec![Term::param("3")]);
        assert!(h.free_variables().is_empty());
    }

    #[test]
    fn universal_closure_canonical_order() {
        let f = Formula::rel("S", vec![Term::var("y"), Term::var("x")]);
        let closed = f.universal_closure();
        assert_eq!(
            closed,
            Formula::forall("x", Formula::forall("y", Formula::rel("S", vec![Term::var("y"), Term::var("x")])))
        );
        assert!(closed.free_variables().is_empty());

        let sentence = Formula::forall("x", Formula::rel("R", vec![Term::var("x")]));
        assert_eq!(sentence.universal_closure(), sentence);

        let pem_body = Formula::rel("R", vec![Term::var("x")])
            .or(Formula::rel("R", vec![Term::var("x")]).neg());
        assert_eq!(pem_body.universal_closure(), Formula::forall("x", pem_body.clone()));
    }

    #[test]
    fn substitute_bound_and_capture() {
        let f = Formula::rel("R", vec![Term::var("x")]);
        assert_eq!(f.substitute("x", &Term::param("2")), Formula::rel("R", vec![Term::param("2")]));

        let g = Formula::forall("x", Formula::rel("R", vec![Term::var("x")]));
        assert_eq!(g.substitute("x", &Term::Const("c".into())), g);

        let h = Formula::exists("y", Formula::rel("S", vec![Term::var("x"), Term::var("y")]));
        let subst = h.substitute("x", &Term::var("y"));
        assert_eq!(
            subst,
            Formula::exists("y_1", Formula::rel("S", vec![Term::var("y"), Term::var("y_1")]))
        );
        assert_eq!(subst.free_variables().into_iter().collect::<Vec<_>>(), vec!["y".to_string()]);
    }

    #[test]
    fn subformulas_preorder_dedup() {
        assert_eq!(Formula::Bot.subformulas(), vec![&Formula::Bot]);

        let f = p().or(p().neg());
        let subs = f.subformulas();
        assert_eq!(subs.len(), 4);
        assert_eq!(subs[0], &f);
        assert_eq!(subs[1], &p());
        assert_eq!(subs[2], &p().neg());
        assert_eq!(subs[3], &Formula::Bot);
    }

    #[test]
    fn size_counts_ast_nodes() {
        assert_eq!(Formula::Bot.size(), 1);
        assert_eq!(p().or(p().neg()).size(), 5);
        assert_eq!(Formula::forall("x", Formula::rel("R", vec![Term::var("x")])).size(), 2);
    }

    #[test]
    fn signature_invariants() {
        assert!(Signature::propositional(["p", "p"]).is_err());
        assert!(Signature::first_order([("R", 1)], ["R"]).is_err());
        assert!(Signature::propositional(["1bad"]).is_err());

        let sig = Signature::first_order([("R", 1), ("S", 2)], ["c"]).unwrap();
        assert_eq!(sig.relation_arity("S"), Some(2));
        assert!(sig.has_constant("c"));
        assert!(sig.check(&Formula::rel("R", vec![Term::var("x"), Term::var("y")])).is_err());
    }
}
