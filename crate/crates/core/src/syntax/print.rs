//! Pretty printer. Output re-parses to the same AST; parentheses are kept
//! to the minimum the precedence table requires, except that quantified
//! subformulas are always wrapped when they appear as an operand (their
//! bodies scope maximally to the right, so bare ones would swallow the
//! rest of the line).

use std::fmt;

use super::{Formula, Term};

// Precedence levels: -> is 1 (right-associative), | is 2, & is 3, ~ is 4,
// atoms and equalities are 5.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NEG: u8 = 4;
const PREC_ATOM: u8 = 5;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

/// Reconstructed surface form of an implication-to-bottom, if any.
enum NegView<'a> {
    NotEq(&'a Term, &'a Term),
    Not(&'a Formula),
    Plain,
}

fn neg_view(f: &Formula) -> NegView<'_> {
    if let Formula::Imp(a, b) = f {
        if **b == Formula::Bot {
            if let Formula::Eq(s, t) = &**a {
                return NegView::NotEq(s, t);
            }
            return NegView::Not(a);
        }
    }
    NegView::Plain
}

fn write_at(f: &Formula, min_prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match neg_view(f) {
        NegView::NotEq(s, t) => {
            return paren_if(PREC_ATOM < min_prec, out, |out| write!(out, "{s} != {t}"));
        }
        NegView::Not(inner) => {
            return paren_if(PREC_NEG < min_prec, out, |out| {
                write!(out, "~")?;
                write_at(inner, PREC_NEG, out)
            });
        }
        NegView::Plain => {}
    }
    match f {
        Formula::Bot => write!(out, "_|_"),
        Formula::Atom(name) => write!(out, "{name}"),
        Formula::Rel(name, args) => {
            write!(out, "{name}(")?;
            for (i, t) in args.iter().enumerate() {
                if i > 0 {
                    write!(out, ", ")?;
                }
                write!(out, "{t}")?;
            }
            write!(out, ")")
        }
        Formula::Eq(s, t) => paren_if(PREC_ATOM < min_prec, out, |out| write!(out, "{s} = {t}")),
        Formula::Imp(a, b) => paren_if(PREC_IMP < min_prec, out, |out| {
            write_at(a, PREC_OR, out)?;
            write!(out, " -> ")?;
            write_at(b, PREC_IMP, out)
        }),
        Formula::Or(a, b) => paren_if(PREC_OR < min_prec, out, |out| {
            write_at(a, PREC_OR, out)?;
            write!(out, " | ")?;
            write_at(b, PREC_AND, out)
        }),
        Formula::And(a, b) => paren_if(PREC_AND < min_prec, out, |out| {
            write_at(a, PREC_AND, out)?;
            write!(out, " & ")?;
            write_at(b, PREC_NEG, out)
        }),
        Formula::Forall(v, body) => paren_if(min_prec > 0, out, |out| {
            write!(out, "forall {v}. ")?;
            write_at(body, 0, out)
        }),
        Formula::Exists(v, body) => paren_if(min_prec > 0, out, |out| {
            write!(out, "exists {v}. ")?;
            write_at(body, 0, out)
        }),
    }
}

fn paren_if(
    cond: bool,
    out: &mut fmt::Formatter<'_>,
    body: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    if cond {
        write!(out, "(")?;
        body(out)?;
        write!(out, ")")
    } else {
        body(out)
    }
}
