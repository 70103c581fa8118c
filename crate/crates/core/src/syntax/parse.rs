//! Formula parser.
//!
//! Grammar (binding tightness `~` > `&` > `|` > `->`, with `->` right
//! associative and quantifier bodies scoping maximally to the right):
//!
//! ```text
//! formula  := or ("->" formula)?
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "~" unary | ("forall"|"exists") ident "." formula | primary
//! primary  := "_|_" | "(" formula ")" | ident "(" terms ")"
//!           | term (("=" | "!=") term)?
//! term     := ident | "#" id
//! ```
//!
//! Identifiers are `[a-zA-Z][a-zA-Z0-9_]*`; `forall` and `exists` are
//! reserved. `s != t` is sugar for `~(s = t)` and `~A` for `A -> _|_`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Formula, Signature, Term};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    Unexpected { found: String, expected: &'static str },
    UndeclaredSymbol(String),
    ArityMismatch { name: String, expected: usize, got: usize },
    NotFirstOrder(&'static str),
    InconsistentArity { name: String, first: usize, second: usize },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UndeclaredSymbol(name) => write!(f, "undeclared symbol `{name}`"),
            ParseErrorKind::ArityMismatch { name, expected, got } => {
                write!(f, "relation `{name}` expects {expected} arguments, got {got}")
            }
            ParseErrorKind::NotFirstOrder(what) => {
                write!(f, "{what} not allowed in a propositional signature")
            }
            ParseErrorKind::InconsistentArity { name, first, second } => {
                write!(f, "symbol `{name}` used with arities {first} and {second}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Param(String),
    Bot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Dot,
    Comma,
    Eq,
    Neq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Param(s) => format!("`#{s}`"),
            Tok::Bot => "`_|_`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '.' => {
                toks.push((i, Tok::Dot));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '~' => {
                toks.push((i, Tok::Tilde));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::Amp));
                i += 1;
            }
            '=' => {
                toks.push((i, Tok::Eq));
                i += 1;
            }
            '|' => {
                toks.push((i, Tok::Pipe));
                i += 1;
            }
            '_' => {
                if bytes[i..].starts_with(b"_|_") {
                    toks.push((i, Tok::Bot));
                    i += 3;
                } else {
                    return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar('_') });
                }
            }
            '-' => {
                if bytes[i..].starts_with(b"->") {
                    toks.push((i, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar('-') });
                }
            }
            '!' => {
                if bytes[i..].starts_with(b"!=") {
                    toks.push((i, Tok::Neq));
                    i += 2;
                } else {
                    return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar('!') });
                }
            }
            '#' => {
                let start = i;
                i += 1;
                let from = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                if i == from {
                    return Err(ParseError { offset: start, kind: ParseErrorKind::UnexpectedChar('#') });
                }
                toks.push((start, Tok::Param(text[from..i].to_string())));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar(other) });
            }
        }
    }
    toks.push((text.len(), Tok::Eof));
    Ok(toks)
}

/// How identifiers are resolved against a symbol table.
enum Symbols<'a> {
    Declared(&'a Signature),
    Infer(InferredTable),
}

#[derive(Default)]
struct InferredTable {
    /// Name -> arity observed for symbols used in formula position.
    preds: BTreeMap<String, usize>,
    first_order: bool,
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    symbols: Symbols<'a>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected { found: self.peek().describe(), expected },
        }
    }

    fn err(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind }
    }

    fn require_first_order(&mut self, what: &'static str, offset: usize) -> Result<(), ParseError> {
        match &mut self.symbols {
            Symbols::Declared(sig) if !sig.is_first_order() => {
                Err(ParseError { offset, kind: ParseErrorKind::NotFirstOrder(what) })
            }
            Symbols::Declared(_) => Ok(()),
            Symbols::Infer(table) => {
                table.first_order = true;
                Ok(())
            }
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_level()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            Ok(lhs.imp(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_level(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_level()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and_level()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and_level(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                let offset = self.offset();
                self.bump();
                self.require_first_order("quantifier", offset)?;
                let var = match self.bump() {
                    Tok::Ident(v) if v != "forall" && v != "exists" => v,
                    _ => {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::Unexpected {
                                found: self.toks[self.pos - 1].1.describe(),
                                expected: "a variable name",
                            },
                        })
                    }
                };
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = self.formula()?;
                Ok(if kw == "forall" { Formula::forall(var, body) } else { Formula::exists(var, body) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let offset = self.offset();
                self.bump();
                match self.peek() {
                    Tok::LParen => {
                        self.bump();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::RParen {
                            loop {
                                args.push(self.term()?);
                                match self.peek() {
                                    Tok::Comma => {
                                        self.bump();
                                    }
                                    Tok::RParen => break,
                                    _ => return Err(self.unexpected("`,` or `)`")),
                                }
                            }
                        }
                        self.bump(); // RParen
                        self.require_first_order("relation application", offset)?;
                        self.check_pred(&name, args.len(), offset)?;
                        Ok(Formula::Rel(name, args))
                    }
                    Tok::Eq | Tok::Neq => {
                        let lhs = self.resolve_term_ident(name);
                        self.equality(lhs, offset)
                    }
                    _ => {
                        // Bare identifier in formula position: a propositional
                        // atom or a declared 0-ary relation.
                        match &mut self.symbols {
                            Symbols::Declared(sig) => {
                                if sig.is_first_order() {
                                    match sig.relation_arity(&name) {
                                        Some(0) => Ok(Formula::Rel(name, Vec::new())),
                                        Some(a) => Err(self.err(
                                            offset,
                                            ParseErrorKind::ArityMismatch { name, expected: a, got: 0 },
                                        )),
                                        None => {
                                            Err(self.err(offset, ParseErrorKind::UndeclaredSymbol(name)))
                                        }
                                    }
                                } else if sig.has_atom(&name) {
                                    Ok(Formula::Atom(name))
                                } else {
                                    Err(self.err(offset, ParseErrorKind::UndeclaredSymbol(name)))
                                }
                            }
                            Symbols::Infer(_) => {
                                self.check_pred(&name, 0, offset)?;
                                Ok(Formula::Atom(name))
                            }
                        }
                    }
                }
            }
            Tok::Param(id) => {
                let offset = self.offset();
                self.bump();
                self.equality(Term::Param(id), offset)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn equality(&mut self, lhs: Term, offset: usize) -> Result<Formula, ParseError> {
        self.require_first_order("equality", offset)?;
        let negated = match self.bump() {
            Tok::Eq => false,
            Tok::Neq => true,
            _ => return Err(self.unexpected("`=` or `!=`")),
        };
        let rhs = self.term()?;
        let eq = Formula::Eq(lhs, rhs);
        Ok(if negated { eq.neg() } else { eq })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Ident(name) => {
                if name == "forall" || name == "exists" {
                    return Err(self.err(
                        offset,
                        ParseErrorKind::Unexpected { found: format!("`{name}`"), expected: "a term" },
                    ));
                }
                self.require_first_order("term", offset)?;
                Ok(self.resolve_term_ident(name))
            }
            Tok::Param(id) => {
                self.require_first_order("parameter", offset)?;
                Ok(Term::Param(id))
            }
            _ => Err(self.err(
                offset,
                ParseErrorKind::Unexpected {
                    found: self.toks[self.pos - 1].1.describe(),
                    expected: "a term",
                },
            )),
        }
    }

    fn resolve_term_ident(&self, name: String) -> Term {
        match &self.symbols {
            Symbols::Declared(sig) if sig.has_constant(&name) => Term::Const(name),
            _ => Term::Var(name),
        }
    }

    fn check_pred(&mut self, name: &str, arity: usize, offset: usize) -> Result<(), ParseError> {
        match &mut self.symbols {
            Symbols::Declared(sig) => match sig.relation_arity(name) {
                Some(a) if a == arity => Ok(()),
                Some(a) => Err(ParseError {
                    offset,
                    kind: ParseErrorKind::ArityMismatch { name: name.into(), expected: a, got: arity },
                }),
                None => Err(ParseError { offset, kind: ParseErrorKind::UndeclaredSymbol(name.into()) }),
            },
            Symbols::Infer(table) => match table.preds.get(name) {
                Some(&a) if a == arity => Ok(()),
                Some(&a) => Err(ParseError {
                    offset,
                    kind: ParseErrorKind::InconsistentArity { name: name.into(), first: a, second: arity },
                }),
                None => {
                    table.preds.insert(name.into(), arity);
                    Ok(())
                }
            },
        }
    }
}

/// Parses `text` against the declared signature. The returned AST is unique;
/// printing it re-parses to the same AST.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0, symbols: Symbols::Declared(sig) };
    let f = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("end of input"));
    }
    Ok(f)
}

/// Parses `text` while inferring a signature from usage: applied identifiers
/// become relations with the observed arity, bare identifiers in formula
/// position become propositional atoms (or 0-ary relations if anything
/// first-order occurs), identifiers in term position become variables.
pub fn infer_signature(text: &str) -> Result<(Formula, Signature), ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0, symbols: Symbols::Infer(InferredTable::default()) };
    let f = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("end of input"));
    }
    let table = match parser.symbols {
        Symbols::Infer(t) => t,
        Symbols::Declared(_) => unreachable!(),
    };
    if table.first_order || table.preds.values().any(|&a| a > 0) {
        let sig = Signature::first_order(
            table.preds.iter().map(|(n, &a)| (n.clone(), a)),
            Vec::<String>::new(),
        )
        .expect("inferred names are unique");
        Ok((promote_atoms(f), sig))
    } else {
        let sig = Signature::propositional(table.preds.keys().cloned()).expect("unique");
        Ok((f, sig))
    }
}

/// Rewrites propositional atoms into 0-ary relation applications, used when
/// inference concludes the formula is first-order.
fn promote_atoms(f: Formula) -> Formula {
    match f {
        Formula::Atom(name) => Formula::Rel(name, Vec::new()),
        Formula::And(a, b) => promote_atoms(*a).and(promote_atoms(*b)),
        Formula::Or(a, b) => promote_atoms(*a).or(promote_atoms(*b)),
        Formula::Imp(a, b) => promote_atoms(*a).imp(promote_atoms(*b)),
        Formula::Forall(v, body) => Formula::forall(v, promote_atoms(*body)),
        Formula::Exists(v, body) => Formula::exists(v, promote_atoms(*body)),
        other => other,
    }
}
