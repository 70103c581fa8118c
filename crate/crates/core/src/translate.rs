//! Friedman's translation `A^rho`, the universally-double-negating variant
//! `A^forall`, excluded-middle instances, and iterated translation chains.

use thiserror::Error;

use crate::syntax::Formula;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("translating sentence has free variables: {0:?}")]
    RhoNotClosed(Vec<String>),
    #[error("sentential instance body has free variables: {0:?}")]
    BodyNotClosed(Vec<String>),
    #[error("non-sentential instance body contains parameters: {0:?}")]
    BodyHasParameters(Vec<String>),
}

/// Friedman's translation of `a` by the sentence `rho`: every atomic
/// subformula `B` (including `_|_` and equalities) becomes `B | rho`;
/// connectives and quantifiers pass through unchanged. `rho` must be closed
/// (parameters are fine — they are closed terms, so no capture can occur).
pub fn friedman(a: &Formula, rho: &Formula) -> Result<Formula, TranslateError> {
    let fv = rho.free_variables();
    if !fv.is_empty() {
        return Err(TranslateError::RhoNotClosed(fv.into_iter().collect()));
    }
    Ok(friedman_total(a, rho))
}

fn friedman_total(a: &Formula, rho: &Formula) -> Formula {
    match a {
        Formula::Bot | Formula::Atom(_) | Formula::Rel(..) | Formula::Eq(..) => {
            a.clone().or(rho.clone())
        }
        Formula::And(l, r) => friedman_total(l, rho).and(friedman_total(r, rho)),
        Formula::Or(l, r) => friedman_total(l, rho).or(friedman_total(r, rho)),
        Formula::Imp(l, r) => friedman_total(l, rho).imp(friedman_total(r, rho)),
        Formula::Forall(v, body) => Formula::forall(v.clone(), friedman_total(body, rho)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), friedman_total(body, rho)),
    }
}

/// Replaces every universal subformula `forall x. B` by `forall x. ~~B`,
/// applied at every quantifier from the inside out. Propositional formulas
/// come back unchanged.
pub fn kuroda_variant(a: &Formula) -> Formula {
    match a {
        Formula::Bot | Formula::Atom(_) | Formula::Rel(..) | Formula::Eq(..) => a.clone(),
        Formula::And(l, r) => kuroda_variant(l).and(kuroda_variant(r)),
        Formula::Or(l, r) => kuroda_variant(l).or(kuroda_variant(r)),
        Formula::Imp(l, r) => kuroda_variant(l).imp(kuroda_variant(r)),
        Formula::Forall(v, body) => Formula::forall(v.clone(), kuroda_variant(body).neg().neg()),
        Formula::Exists(v, body) => Formula::exists(v.clone(), kuroda_variant(body)),
    }
}

/// One excluded-middle instance `A | ~A`, either as a universal closure over
/// the body's free variables (non-sentential) or as a parameterized sentence
/// taken verbatim (sentential).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PemInstance {
    body: Formula,
    closed: Formula,
    sentential: bool,
}

impl PemInstance {
    pub fn body(&self) -> &Formula {
        &self.body
    }

    /// The closed instance actually used in translations.
    pub fn closed(&self) -> &Formula {
        &self.closed
    }

    pub fn sentential(&self) -> bool {
        self.sentential
    }
}

/// Builds the instance for body `a`. Sentential instances require a closed
/// body (parameters allowed); non-sentential ones must live in the base
/// language (no parameters) and get universally closed.
pub fn pem_instance(a: &Formula, sentential: bool) -> Result<PemInstance, TranslateError> {
    if sentential {
        let fv = a.free_variables();
        if !fv.is_empty() {
            return Err(TranslateError::BodyNotClosed(fv.into_iter().collect()));
        }
        let closed = a.clone().or(a.clone().neg());
        Ok(PemInstance { body: a.clone(), closed, sentential: true })
    } else {
        let params = a.parameters();
        if !params.is_empty() {
            return Err(TranslateError::BodyHasParameters(params.into_iter().collect()));
        }
        let closed = a.clone().or(a.clone().neg()).universal_closure();
        Ok(PemInstance { body: a.clone(), closed, sentential: false })
    }
}

/// An iterated Friedman translation: `realized` is the fold of `friedman`
/// over `steps`, innermost step applied first (so `steps[0]`, the first
/// witness found during synthesis, is the outermost translation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationChain {
    base: Formula,
    steps: Vec<PemInstance>,
    realized: Formula,
}

impl TranslationChain {
    pub fn base(&self) -> &Formula {
        &self.base
    }

    pub fn steps(&self) -> &[PemInstance] {
        &self.steps
    }

    pub fn realized(&self) -> &Formula {
        &self.realized
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Realizes the chain: `friedman(...friedman(base, steps[last])..., steps[0])`.
pub fn realize_chain(base: Formula, steps: Vec<PemInstance>) -> TranslationChain {
    let mut realized = base.clone();
    for step in steps.iter().rev() {
        realized = friedman_total(&realized, step.closed());
    }
    TranslationChain { base, steps, realized }
}

/// True when the chain starts from `_|_` and every step satisfies `gamma`.
pub fn check_chain_membership(
    chain: &TranslationChain,
    mut gamma: impl FnMut(&PemInstance) -> bool,
) -> bool {
    *chain.base() == Formula::Bot && chain.steps().iter().all(&mut gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn friedman_clauses() {
        assert_eq!(
            friedman(&p().imp(q()), &r()).unwrap(),
            p().or(r()).imp(q().or(r()))
        );
        assert_eq!(friedman(&Formula::Bot, &r()).unwrap(), Formula::Bot.or(r()));
        let all = Formula::forall("x", Formula::rel("R", vec![Term::var("x")]));
        assert_eq!(
            friedman(&all, &r()).unwrap(),
            Formula::forall("x", Formula::rel("R", vec![Term::var("x")]).or(r()))
        );
        let open = Formula::rel("R", vec![Term::var("x")]);
        assert!(matches!(friedman(&p(), &open), Err(TranslateError::RhoNotClosed(_))));
    }

    #[test]
    fn kuroda_clauses() {
        let r_x = Formula::rel("R", vec![Term::var("x")]);
        assert_eq!(
            kuroda_variant(&Formula::forall("x", r_x.clone())),
            Formula::forall("x", r_x.clone().neg().neg())
        );
        assert_eq!(kuroda_variant(&p().imp(q())), p().imp(q()));
        let s_xy = Formula::rel("S", vec![Term::var("x"), Term::var("y")]);
        assert_eq!(
            kuroda_variant(&Formula::forall("x", Formula::forall("y", s_xy.clone()))),
            Formula::forall("x", Formula::forall("y", s_xy.neg().neg()).neg().neg())
        );
    }

    #[test]
    fn pem_instances() {
        let r_x = Formula::rel("R", vec![Term::var("x")]);
        let inst = pem_instance(&r_x, false).unwrap();
        assert_eq!(
            inst.closed(),
            &Formula::forall("x", r_x.clone().or(r_x.clone().neg()))
        );

        let inst = pem_instance(&p(), false).unwrap();
        assert_eq!(inst.closed(), &p().or(p().neg()));

        let r_3 = Formula::rel("R", vec![Term::param("3")]);
        let inst = pem_instance(&r_3, true).unwrap();
        assert_eq!(inst.closed(), &r_3.clone().or(r_3.clone().neg()));
        assert!(inst.sentential());

        assert!(pem_instance(&r_x, true).is_err());
        assert!(pem_instance(&r_3, false).is_err());
    }

    #[test]
    fn chains_fold_innermost_last_step() {
        let empty = realize_chain(Formula::Bot, vec![]);
        assert_eq!(empty.realized(), &Formula::Bot);
        assert!(check_chain_membership(&empty, |_| false));

        let tau = pem_instance(&p(), false).unwrap();
        let one = realize_chain(Formula::Bot, vec![tau.clone()]);
        assert_eq!(one.realized(), &Formula::Bot.or(p().or(p().neg())));

        let tau2 = pem_instance(&q(), false).unwrap();
        let two = realize_chain(Formula::Bot, vec![tau.clone(), tau2.clone()]);
        let inner = friedman(&Formula::Bot, tau2.closed()).unwrap();
        assert_eq!(two.realized(), &friedman(&inner, tau.closed()).unwrap());
    }

    #[test]
    fn chain_membership_structural() {
        let tau = pem_instance(&p(), false).unwrap();
        let chain = realize_chain(Formula::Bot, vec![tau]);
        assert!(check_chain_membership(&chain, |s| s.body().is_atomic()));

        let nn = pem_instance(&p().neg().neg(), false).unwrap();
        let chain = realize_chain(Formula::Bot, vec![nn]);
        assert!(!check_chain_membership(&chain, |s| s.body().is_atomic()));

        let not_bot = realize_chain(p(), vec![]);
        assert!(!check_chain_membership(&not_bot, |_| true));
    }
}
