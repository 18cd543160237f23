//! Signatures, terms and formulas.
//!
//! Bound variables are de Bruijn indices (`Term::Bound(0)` is the innermost
//! binder); free variables are names. Binders keep their source name only
//! as a display hint, so two formulas that differ only in bound-variable
//! names compare equal.

mod differential;
mod parse;
mod prenex;
mod print;
mod projector;
mod relativize;
mod signature;

pub use differential::{jet_name, unfold_differential_terms, JetSpec, UnfoldError, DELTA};
pub use parse::{formula_from_sexp, is_identifier, parse_formula, parse_term, SyntaxError, SyntaxErrorKind};
pub use prenex::{is_prenex, split_prefix, to_nnf, to_prenex, Quantifier};
pub use print::{formula_to_sexp, print_formula, print_term};
pub use projector::{encode_open, projector_translate, Literal, ProjectorError, PROJECTOR};
pub use relativize::{relativize, RelativizeError};
pub use signature::{Signature, SignatureError, KEYWORDS};

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::hash::{Hash, Hasher};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A free variable.
    Var(String),
    /// A bound variable as a de Bruijn index.
    Bound(u32),
    Const(String),
    App(String, Vec<Term>),
}

/// Display name of a quantified variable. Ignored by comparisons.
#[derive(Clone, Debug)]
pub struct Binder(pub String);

impl PartialEq for Binder {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for Binder {}
impl PartialOrd for Binder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Binder {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}
impl Hash for Binder {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Exists(Binder, Box<Formula>),
    Forall(Binder, Box<Formula>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn app(f: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(f.into(), args)
    }

    pub fn binary(f: &str, a: Term, b: Term) -> Term {
        Term::App(f.into(), alloc::vec![a, b])
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(out)),
            Term::Bound(_) | Term::Const(_) => {}
        }
    }

    /// Rewrites every bound index `i >= cutoff` with `f(i)`.
    pub(crate) fn map_loose(&self, cutoff: u32, f: &impl Fn(u32) -> u32) -> Term {
        match self {
            Term::Bound(i) if *i >= cutoff => Term::Bound(f(*i)),
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.map_loose(cutoff, f)).collect()),
            t => t.clone(),
        }
    }

    pub fn shift(&self, by: u32, cutoff: u32) -> Term {
        self.map_loose(cutoff, &|i| i + by)
    }

    fn abstract_var(&self, name: &str, depth: u32) -> Term {
        match self {
            Term::Var(v) if v == name => Term::Bound(depth),
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.abstract_var(name, depth)).collect()),
            t => t.clone(),
        }
    }

    fn subst_free(&self, map: &dyn Fn(&str) -> Option<Term>, depth: u32) -> Term {
        match self {
            Term::Var(v) => match map(v) {
                Some(t) => t.shift(depth, 0),
                None => self.clone(),
            },
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.subst_free(map, depth)).collect()),
            t => t.clone(),
        }
    }

    fn max_loose(&self, depth: u32) -> Option<u32> {
        match self {
            Term::Bound(i) if *i >= depth => Some(*i - depth),
            Term::App(_, args) => args.iter().filter_map(|a| a.max_loose(depth)).max(),
            _ => None,
        }
    }

    fn instantiate(&self, t: &Term, depth: u32) -> Term {
        match self {
            Term::Bound(i) if *i == depth => t.shift(depth, 0),
            Term::Bound(i) if *i > depth => Term::Bound(i - 1),
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.instantiate(t, depth)).collect()),
            s => s.clone(),
        }
    }

    pub fn contains_bound(&self, index: u32) -> bool {
        match self {
            Term::Bound(i) => *i == index,
            Term::App(_, args) => args.iter().any(|a| a.contains_bound(index)),
            _ => false,
        }
    }

    pub fn map_vars(&self, f: &impl Fn(&str) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
            t => t.clone(),
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn rel(r: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Rel(r.into(), args)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    /// `exists name. body`, binding the free occurrences of `name` in `body`.
    pub fn exists(name: &str, body: Formula) -> Formula {
        Formula::Exists(Binder(name.into()), Box::new(body.abstract_var(name, 0)))
    }

    /// `forall name. body`, binding the free occurrences of `name` in `body`.
    pub fn forall(name: &str, body: Formula) -> Formula {
        Formula::Forall(Binder(name.into()), Box::new(body.abstract_var(name, 0)))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Rel(..))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Imp(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0),
            Formula::Imp(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Free variable names, sorted.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out.into_iter().collect()
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        self.for_each_term(&mut |t| t.collect_free(out));
    }

    /// Visits every term occurring directly in an atom.
    pub fn for_each_term(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Rel(_, args) => args.iter().for_each(|t| f(t)),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.for_each_term(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.for_each_term(f)),
            Formula::Imp(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    /// Maps every atom's terms, passing the number of enclosing binders.
    pub(crate) fn map_terms(&self, depth: u32, f: &impl Fn(&Term, u32) -> Term) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(f(a, depth), f(b, depth)),
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|t| f(t, depth)).collect()),
            Formula::Not(g) => Formula::not(g.map_terms(depth, f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_terms(depth, f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_terms(depth, f)).collect()),
            Formula::Imp(a, b) => Formula::imp(a.map_terms(depth, f), b.map_terms(depth, f)),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.map_terms(depth + 1, f))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.map_terms(depth + 1, f))),
        }
    }

    /// Adds `by` to every loose bound index at or above `cutoff`.
    pub fn shift(&self, by: u32, cutoff: u32) -> Formula {
        self.map_terms(0, &|t, d| t.shift(by, cutoff + d))
    }

    pub(crate) fn abstract_var(&self, name: &str, depth: u32) -> Formula {
        self.map_terms(depth, &|t, d| t.abstract_var(name, d))
    }

    /// Replaces loose index 0 by `t`, lowering the other loose indices.
    /// Used to open a binder body with a fresh free variable.
    pub fn instantiate(&self, t: &Term) -> Formula {
        self.map_terms(0, &|s, d| s.instantiate(t, d))
    }

    /// Capture-avoiding substitution of free variables.
    pub fn subst_free(&self, map: &dyn Fn(&str) -> Option<Term>) -> Formula {
        self.map_terms(0, &|t, d| t.subst_free(map, d))
    }

    pub fn rename_free(&self, f: &impl Fn(&str) -> String) -> Formula {
        self.map_terms(0, &|t, _| t.map_vars(&|v| Term::Var(f(v))))
    }

    /// Number of loose bound indices the formula needs from its context
    /// (0 when locally closed).
    pub fn loose_depth(&self) -> u32 {
        let mut best: Option<u32> = None;
        fn walk(f: &Formula, depth: u32, best: &mut Option<u32>) {
            match f {
                Formula::Eq(a, b) => {
                    for t in [a, b] {
                        if let Some(i) = t.max_loose(depth) {
                            *best = Some(best.map_or(i, |b| b.max(i)));
                        }
                    }
                }
                Formula::Rel(_, args) => {
                    for t in args {
                        if let Some(i) = t.max_loose(depth) {
                            *best = Some(best.map_or(i, |b| b.max(i)));
                        }
                    }
                }
                Formula::Not(g) => walk(g, depth, best),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| walk(g, depth, best)),
                Formula::Imp(a, b) => {
                    walk(a, depth, best);
                    walk(b, depth, best);
                }
                Formula::Exists(_, g) | Formula::Forall(_, g) => walk(g, depth + 1, best),
            }
        }
        walk(self, 0, &mut best);
        best.map_or(0, |i| i + 1)
    }

    /// Whether loose index `index` (relative to this formula) occurs.
    pub fn mentions_bound(&self, index: u32) -> bool {
        let mut hit = false;
        fn walk(f: &Formula, target: u32, hit: &mut bool) {
            match f {
                Formula::Eq(a, b) => *hit |= a.contains_bound(target) || b.contains_bound(target),
                Formula::Rel(_, args) => *hit |= args.iter().any(|t| t.contains_bound(target)),
                Formula::Not(g) => walk(g, target, hit),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| walk(g, target, hit)),
                Formula::Imp(a, b) => {
                    walk(a, target, hit);
                    walk(b, target, hit);
                }
                Formula::Exists(_, g) | Formula::Forall(_, g) => walk(g, target + 1, hit),
            }
        }
        walk(self, index, &mut hit);
        hit
    }

    /// Relation and function symbols used, for signature checks.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn term_syms(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Const(c) => {
                    out.insert(c.clone());
                }
                Term::App(f, args) => {
                    out.insert(f.clone());
                    args.iter().for_each(|a| term_syms(a, out));
                }
                _ => {}
            }
        }
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Eq(a, b) => {
                    term_syms(a, out);
                    term_syms(b, out);
                }
                Formula::Rel(r, args) => {
                    out.insert(r.clone());
                    args.iter().for_each(|a| term_syms(a, out));
                }
                Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => walk(g, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| walk(g, out)),
                Formula::Imp(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Rewrites `or`, `imp` and `forall` into the `not`/`and`/`exists` basis.
    pub fn to_basic(&self) -> Formula {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => self.clone(),
            Formula::Not(g) => Formula::not(g.to_basic()),
            Formula::And(gs) => Formula::And(gs.iter().map(Formula::to_basic).collect()),
            Formula::Or(gs) => Formula::not(Formula::And(gs.iter().map(|g| Formula::not(g.to_basic())).collect())),
            Formula::Imp(a, b) => Formula::not(Formula::And(alloc::vec![a.to_basic(), Formula::not(b.to_basic())])),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.to_basic())),
            Formula::Forall(v, g) => {
                Formula::not(Formula::Exists(v.clone(), Box::new(Formula::not(g.to_basic()))))
            }
        }
    }

    /// Names of all binders, outermost first in traversal order.
    pub fn binder_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn walk(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Eq(..) | Formula::Rel(..) => {}
                Formula::Not(g) => walk(g, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| walk(g, out)),
                Formula::Imp(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    out.push(v.0.clone());
                    walk(g, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

/// Source of variable names guaranteed not to clash with a given set.
pub(crate) struct Fresh {
    used: BTreeSet<String>,
    next: usize,
}

impl Fresh {
    pub(crate) fn avoiding<'a>(names: impl IntoIterator<Item = &'a String>) -> Fresh {
        Fresh { used: names.into_iter().cloned().collect(), next: 0 }
    }

    pub(crate) fn name(&mut self) -> String {
        loop {
            let candidate = alloc::format!("_{}", self.next);
            self.next += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// Builds a quantifier binding the free variable `var`, displayed as `hint`.
pub(crate) fn bind(forall: bool, var: &str, hint: &str, body: Formula) -> Formula {
    let b = Box::new(body.abstract_var(var, 0));
    if forall {
        Formula::Forall(Binder(hint.into()), b)
    } else {
        Formula::Exists(Binder(hint.into()), b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn alpha_equivalent_formulas_are_equal() {
        let a = Formula::exists("u", Formula::eq(Term::var("u"), Term::var("x")));
        let b = Formula::exists("w", Formula::eq(Term::var("w"), Term::var("x")));
        assert_eq!(a, b);
        let c = Formula::exists("u", Formula::eq(Term::var("u"), Term::var("y")));
        assert_ne!(a, c);
    }

    #[test]
    fn free_vars_and_depth() {
        let f = Formula::forall(
            "x",
            Formula::exists("y", Formula::eq(Term::binary("*", Term::var("x"), Term::var("y")), Term::var("z"))),
        );
        assert_eq!(f.free_vars(), vec![String::from("z")]);
        assert_eq!(f.quantifier_depth(), 2);
        assert_eq!(f.loose_depth(), 0);
    }

    #[test]
    fn substitution_shifts_under_binders() {
        // exists u. u = x, with x := Bound(0) from an outer context
        let f = Formula::exists("u", Formula::eq(Term::var("u"), Term::var("x")));
        let g = f.subst_free(&|v| (v == "x").then_some(Term::Bound(0)));
        match g {
            Formula::Exists(_, body) => assert_eq!(*body, Formula::eq(Term::Bound(0), Term::Bound(1))),
            _ => unreachable!(),
        }
    }
}
