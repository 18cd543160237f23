use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Formula, Term};
use crate::sexpr::Sexp;

pub fn print_formula(f: &Formula) -> String {
    formula_to_sexp(f).to_string()
}

/// Prints a term; loose bound indices show as `#i`.
pub fn print_term(t: &Term) -> String {
    term_sexp(t, &[]).to_string()
}

/// Converts to an s-expression, choosing display names for binders.
///
/// A binder keeps its hint unless the hint would capture a free variable of
/// its body or shadow an enclosing binder the body still refers to; then
/// primes are appended until the name is clear.
pub fn formula_to_sexp(f: &Formula) -> Sexp {
    let mut scope = Vec::new();
    sexp(f, &mut scope)
}

fn term_sexp(t: &Term, scope: &[String]) -> Sexp {
    match t {
        Term::Var(v) => Sexp::atom(v.as_str()),
        Term::Const(c) => Sexp::atom(c.as_str()),
        Term::Bound(i) => {
            let i = *i as usize;
            match scope.len().checked_sub(i + 1) {
                Some(k) => Sexp::atom(scope[k].as_str()),
                // Loose index: only reachable when printing a fragment.
                None => Sexp::atom(alloc::format!("#{i}")),
            }
        }
        Term::App(fun, args) => {
            let mut items = vec![Sexp::atom(fun.as_str())];
            items.extend(args.iter().map(|a| term_sexp(a, scope)));
            Sexp::list(items)
        }
    }
}

fn choose_name(hint: &str, body: &Formula, scope: &[String]) -> String {
    let free = body.free_vars();
    let mut name = String::from(hint);
    loop {
        let captures_free = free.iter().any(|v| *v == name);
        let shadows_live = scope
            .iter()
            .rev()
            .enumerate()
            .any(|(j, outer)| *outer == name && body.mentions_bound(j as u32 + 1));
        if !captures_free && !shadows_live {
            return name;
        }
        name.push('\'');
    }
}

fn sexp(f: &Formula, scope: &mut Vec<String>) -> Sexp {
    let tagged = |tag: &str, rest: Vec<Sexp>| {
        let mut items = vec![Sexp::atom(tag)];
        items.extend(rest);
        Sexp::list(items)
    };
    match f {
        Formula::Eq(a, b) => tagged("=", vec![term_sexp(a, scope), term_sexp(b, scope)]),
        Formula::Rel(r, args) => tagged(r, args.iter().map(|a| term_sexp(a, scope)).collect()),
        Formula::Not(g) => {
            let g = sexp(g, scope);
            tagged("not", vec![g])
        }
        Formula::And(gs) => {
            let items = gs.iter().map(|g| sexp(g, scope)).collect();
            tagged("and", items)
        }
        Formula::Or(gs) => {
            let items = gs.iter().map(|g| sexp(g, scope)).collect();
            tagged("or", items)
        }
        Formula::Imp(a, b) => {
            let a = sexp(a, scope);
            let b = sexp(b, scope);
            tagged("imp", vec![a, b])
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let tag = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            let name = choose_name(&v.0, g, scope);
            scope.push(name.clone());
            let body = sexp(g, scope);
            scope.pop();
            tagged(tag, vec![Sexp::atom(name), body])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};

    fn roundtrip(text: &str) -> String {
        let sig = Signature::ring();
        let f = parse_formula(text, &sig).unwrap();
        let printed = print_formula(&f);
        assert_eq!(parse_formula(&printed, &sig).unwrap(), f);
        printed
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(roundtrip("(and  (= x 0)\n (not (= (+ x 1) y)))"), "(and (= x 0) (not (= (+ x 1) y)))");
        assert_eq!(roundtrip("(or)"), "(or)");
    }

    #[test]
    fn dead_shadowing_is_kept() {
        assert_eq!(roundtrip("(exists x (exists x (= x 0)))"), "(exists x (exists x (= x 0)))");
    }

    #[test]
    fn live_shadowing_is_renamed() {
        let body = Formula::And(vec![
            Formula::eq(Term::Bound(1), Term::constant("0")),
            Formula::eq(Term::Bound(0), Term::constant("1")),
        ]);
        let f = Formula::Exists(
            super::super::Binder("x".into()),
            alloc::boxed::Box::new(Formula::Exists(super::super::Binder("x".into()), alloc::boxed::Box::new(body))),
        );
        let once = print_formula(&f);
        assert_eq!(once, "(exists x (exists x' (and (= x 0) (= x' 1))))");
        assert_eq!(roundtrip(&once), once);
    }

    #[test]
    fn binder_never_captures_free_variable() {
        let f = Formula::Exists(
            super::super::Binder("y".into()),
            alloc::boxed::Box::new(Formula::eq(Term::Bound(0), Term::var("y"))),
        );
        assert_eq!(print_formula(&f), "(exists y' (= y' y))");
    }
}
