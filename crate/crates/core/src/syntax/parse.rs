use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{Binder, Formula, Signature, Term, KEYWORDS};
use crate::sexpr::{read_one, Pos, ReadError, Sexp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    Read(ReadError),
    UnknownSymbol(String),
    Arity { symbol: String, expected: usize, found: usize },
    BadIdentifier(String),
    Malformed(String),
}

/// A parse or type error, with the source position when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub pos: Option<Pos>,
}

impl SyntaxError {
    fn at(pos: Pos, kind: SyntaxErrorKind) -> SyntaxError {
        SyntaxError { kind, pos: Some(pos) }
    }

    fn bare(kind: SyntaxErrorKind) -> SyntaxError {
        SyntaxError { kind, pos: None }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let SyntaxErrorKind::Read(e) = &self.kind {
            return write!(f, "{e}");
        }
        if let Some(p) = self.pos {
            write!(f, "{p}: ")?;
        }
        match &self.kind {
            SyntaxErrorKind::Read(_) => unreachable!(),
            SyntaxErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            SyntaxErrorKind::Arity { symbol, expected, found } => {
                write!(f, "`{symbol}` expects {expected} argument(s), found {found}")
            }
            SyntaxErrorKind::BadIdentifier(s) => write!(f, "`{s}` is not a valid variable name"),
            SyntaxErrorKind::Malformed(s) => write!(f, "malformed formula: {s}"),
        }
    }
}

impl core::error::Error for SyntaxError {}

impl From<ReadError> for SyntaxError {
    fn from(e: ReadError) -> Self {
        let pos = e.pos();
        SyntaxError::at(pos, SyntaxErrorKind::Read(e))
    }
}

/// `[A-Za-z_][A-Za-z0-9_'@]*`, excluding grammar keywords.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '@') && !KEYWORDS.contains(&s)
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let sexp = read_one(text)?;
    formula_from_sexp(&sexp, sig)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, SyntaxError> {
    let sexp = read_one(text)?;
    Parser { sig, scope: Vec::new() }.term(&sexp)
}

/// Converts an already-read s-expression into a formula.
pub fn formula_from_sexp(sexp: &Sexp, sig: &Signature) -> Result<Formula, SyntaxError> {
    Parser { sig, scope: Vec::new() }.formula(sexp)
}

struct Parser<'a> {
    sig: &'a Signature,
    /// Bound names, innermost last.
    scope: Vec<String>,
}

impl Parser<'_> {
    fn term(&mut self, s: &Sexp) -> Result<Term, SyntaxError> {
        match s {
            Sexp::Atom(name, pos) => {
                if let Some(i) = self.scope.iter().rev().position(|b| b == name) {
                    return Ok(Term::Bound(i as u32));
                }
                if self.sig.has_constant(name) {
                    return Ok(Term::Const(name.clone()));
                }
                if let Some(a) = self.sig.function_arity(name) {
                    return Err(SyntaxError::at(
                        *pos,
                        SyntaxErrorKind::Arity { symbol: name.clone(), expected: a, found: 0 },
                    ));
                }
                if self.sig.relation_arity(name).is_some() {
                    return Err(SyntaxError::at(*pos, SyntaxErrorKind::Malformed("relation used as a term".into())));
                }
                if !is_identifier(name) {
                    return Err(SyntaxError::at(*pos, SyntaxErrorKind::BadIdentifier(name.clone())));
                }
                Ok(Term::Var(name.clone()))
            }
            Sexp::List(items, pos) => {
                let (head, args) = items
                    .split_first()
                    .ok_or_else(|| SyntaxError::at(*pos, SyntaxErrorKind::Malformed("empty term".into())))?;
                let f = head
                    .as_atom()
                    .ok_or_else(|| SyntaxError::at(head.pos(), SyntaxErrorKind::Malformed("term head must be a symbol".into())))?;
                let arity = self
                    .sig
                    .function_arity(f)
                    .ok_or_else(|| SyntaxError::at(head.pos(), SyntaxErrorKind::UnknownSymbol(f.into())))?;
                if arity != args.len() {
                    return Err(SyntaxError::at(
                        head.pos(),
                        SyntaxErrorKind::Arity { symbol: f.into(), expected: arity, found: args.len() },
                    ));
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::App(f.into(), args))
            }
        }
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula, SyntaxError> {
        let (items, pos) = match s {
            Sexp::List(items, pos) => (items, *pos),
            Sexp::Atom(a, pos) => {
                return Err(SyntaxError::at(*pos, SyntaxErrorKind::Malformed(alloc::format!("expected a formula, found `{a}`"))))
            }
        };
        let (head, rest) =
            items.split_first().ok_or_else(|| SyntaxError::at(pos, SyntaxErrorKind::Malformed("empty formula".into())))?;
        let head_name = head
            .as_atom()
            .ok_or_else(|| SyntaxError::at(head.pos(), SyntaxErrorKind::Malformed("formula head must be a symbol".into())))?;
        let expect = |n: usize| -> Result<(), SyntaxError> {
            if rest.len() != n {
                Err(SyntaxError::at(
                    head.pos(),
                    SyntaxErrorKind::Arity { symbol: head_name.into(), expected: n, found: rest.len() },
                ))
            } else {
                Ok(())
            }
        };
        match head_name {
            "=" => {
                expect(2)?;
                Ok(Formula::Eq(self.term(&rest[0])?, self.term(&rest[1])?))
            }
            "not" => {
                expect(1)?;
                Ok(Formula::Not(Box::new(self.formula(&rest[0])?)))
            }
            "and" => Ok(Formula::And(rest.iter().map(|f| self.formula(f)).collect::<Result<_, _>>()?)),
            "or" => Ok(Formula::Or(rest.iter().map(|f| self.formula(f)).collect::<Result<_, _>>()?)),
            "imp" => {
                expect(2)?;
                Ok(Formula::imp(self.formula(&rest[0])?, self.formula(&rest[1])?))
            }
            "exists" | "forall" => {
                expect(2)?;
                let var = rest[0].as_atom().ok_or_else(|| {
                    SyntaxError::at(rest[0].pos(), SyntaxErrorKind::Malformed("quantified variable must be a name".into()))
                })?;
                if !self.sig.is_variable_name(var) {
                    return Err(SyntaxError::at(rest[0].pos(), SyntaxErrorKind::BadIdentifier(var.into())));
                }
                self.scope.push(var.into());
                let body = self.formula(&rest[1]);
                self.scope.pop();
                let binder = Binder(var.into());
                Ok(if head_name == "exists" {
                    Formula::Exists(binder, Box::new(body?))
                } else {
                    Formula::Forall(binder, Box::new(body?))
                })
            }
            rel => {
                let arity = self
                    .sig
                    .relation_arity(rel)
                    .ok_or_else(|| SyntaxError::at(head.pos(), SyntaxErrorKind::UnknownSymbol(rel.into())))?;
                expect(arity)?;
                let args = rest.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
                Ok(Formula::Rel(rel.into(), args))
            }
        }
    }
}

impl Term {
    /// Arity and symbol check against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), SyntaxError> {
        match self {
            Term::Var(v) => {
                if sig.is_variable_name(v) {
                    Ok(())
                } else {
                    Err(SyntaxError::bare(SyntaxErrorKind::BadIdentifier(v.clone())))
                }
            }
            Term::Bound(_) => Ok(()),
            Term::Const(c) => {
                if sig.has_constant(c) {
                    Ok(())
                } else {
                    Err(SyntaxError::bare(SyntaxErrorKind::UnknownSymbol(c.clone())))
                }
            }
            Term::App(f, args) => {
                let arity =
                    sig.function_arity(f).ok_or_else(|| SyntaxError::bare(SyntaxErrorKind::UnknownSymbol(f.clone())))?;
                if arity != args.len() {
                    return Err(SyntaxError::bare(SyntaxErrorKind::Arity {
                        symbol: f.clone(),
                        expected: arity,
                        found: args.len(),
                    }));
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }
}

impl Formula {
    /// Arity and symbol check against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), SyntaxError> {
        match self {
            Formula::Eq(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Rel(r, args) => {
                let arity =
                    sig.relation_arity(r).ok_or_else(|| SyntaxError::bare(SyntaxErrorKind::UnknownSymbol(r.clone())))?;
                if arity != args.len() {
                    return Err(SyntaxError::bare(SyntaxErrorKind::Arity {
                        symbol: r.clone(),
                        expected: arity,
                        found: args.len(),
                    }));
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.check(sig),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| g.check(sig)),
            Formula::Imp(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
        }
    }
}

impl From<SyntaxError> for String {
    fn from(e: SyntaxError) -> String {
        e.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print_formula;

    #[test]
    fn identity_axiom() {
        let f = parse_formula("(forall x (= x x))", &Signature::ring()).unwrap();
        assert_eq!(f, Formula::forall("x", Formula::eq(Term::var("x"), Term::var("x"))));
        assert_eq!(print_formula(&f), "(forall x (= x x))");
    }

    #[test]
    fn square_root_formula() {
        let f = parse_formula("(exists y (= (* y y) x))", &Signature::ring()).unwrap();
        let expected = Formula::exists("y", Formula::eq(Term::binary("*", Term::var("y"), Term::var("y")), Term::var("x")));
        assert_eq!(f, expected);
        assert_eq!(f.free_vars(), alloc::vec![String::from("x")]);
    }

    #[test]
    fn projector_symbol_is_gated_by_signature() {
        let text = "(= (p u v) w)";
        let err = parse_formula(text, &Signature::ring()).unwrap_err();
        assert_eq!(err.kind, SyntaxErrorKind::UnknownSymbol("p".into()));
        assert_eq!(err.pos, Some(Pos { line: 1, col: 5 }));
        assert!(parse_formula(text, &Signature::ring_projector()).is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        let sig = Signature::ring();
        let err = parse_formula("(and\n  (= (+ x) y))", &sig).unwrap_err();
        assert_eq!(err.kind, SyntaxErrorKind::Arity { symbol: "+".into(), expected: 2, found: 1 });
        assert_eq!(err.pos, Some(Pos { line: 2, col: 7 }));

        let err = parse_formula("(= x (y", &sig).unwrap_err();
        assert!(matches!(err.kind, SyntaxErrorKind::Read(ReadError::Unterminated(_))));

        let err = parse_formula("(exists 0 (= x x))", &sig).unwrap_err();
        assert_eq!(err.kind, SyntaxErrorKind::BadIdentifier("0".into()));

        let err = parse_formula("(= 1x x)", &sig).unwrap_err();
        assert_eq!(err.kind, SyntaxErrorKind::BadIdentifier("1x".into()));
    }

    #[test]
    fn shadowed_binders_resolve_innermost() {
        let f = parse_formula("(exists x (exists x (= x 0)))", &Signature::ring()).unwrap();
        match f {
            Formula::Exists(_, b) => match *b {
                Formula::Exists(_, c) => assert_eq!(*c, Formula::eq(Term::Bound(0), Term::constant("0"))),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        }
    }
}
