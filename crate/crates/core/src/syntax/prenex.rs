use alloc::string::String;
use alloc::vec::Vec;

use super::{bind, Formula, Fresh, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Negation normal form: no `imp`, `not` only in front of atoms.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Rel(..) => {
            if negate {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => nnf(g, !negate),
        Formula::And(gs) => {
            let parts = gs.iter().map(|g| nnf(g, negate)).collect();
            if negate {
                Formula::Or(parts)
            } else {
                Formula::And(parts)
            }
        }
        Formula::Or(gs) => {
            let parts = gs.iter().map(|g| nnf(g, negate)).collect();
            if negate {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            }
        }
        Formula::Imp(a, b) => {
            if negate {
                Formula::And(alloc::vec![nnf(a, false), nnf(b, true)])
            } else {
                Formula::Or(alloc::vec![nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let is_exists = matches!(f, Formula::Exists(..)) != negate;
            let body = alloc::boxed::Box::new(nnf(g, negate));
            if is_exists {
                Formula::Exists(v.clone(), body)
            } else {
                Formula::Forall(v.clone(), body)
            }
        }
    }
}

pub fn is_prenex(f: &Formula) -> bool {
    match f {
        Formula::Exists(_, g) | Formula::Forall(_, g) => is_prenex(g),
        g => g.is_quantifier_free(),
    }
}

/// Splits off the leading quantifier block: `(kind, display name)` pairs,
/// outermost first, and the remaining body (whose loose indices refer to
/// the block, innermost binder at index 0).
pub fn split_prefix(f: &Formula) -> (Vec<(Quantifier, String)>, &Formula) {
    let mut prefix = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Exists(v, g) => {
                prefix.push((Quantifier::Exists, v.0.clone()));
                cur = g;
            }
            Formula::Forall(v, g) => {
                prefix.push((Quantifier::Forall, v.0.clone()));
                cur = g;
            }
            _ => return (prefix, cur),
        }
    }
}

struct Slot {
    q: Quantifier,
    var: String,
    hint: String,
}

/// Prenex normal form of the negation normal form of `f`.
///
/// Quantifiers are pulled outside-in. When several conjuncts or disjuncts
/// still have quantifiers to contribute, the leftmost one headed by an
/// existential goes first, otherwise the leftmost universal.
pub fn to_prenex(f: &Formula) -> Formula {
    let f = to_nnf(f);
    let free = f.free_vars();
    let mut fresh = Fresh::avoiding(&free);
    let (prefix, matrix) = pull(&f, &mut fresh);
    prefix
        .iter()
        .rev()
        .fold(matrix, |body, s| bind(s.q == Quantifier::Forall, &s.var, &s.hint, body))
}

fn pull(f: &Formula, fresh: &mut Fresh) -> (Vec<Slot>, Formula) {
    match f {
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let q = if matches!(f, Formula::Exists(..)) { Quantifier::Exists } else { Quantifier::Forall };
            let var = fresh.name();
            let opened = g.instantiate(&Term::Var(var.clone()));
            let (rest, matrix) = pull(&opened, fresh);
            let mut prefix = alloc::vec![Slot { q, var, hint: v.0.clone() }];
            prefix.extend(rest);
            (prefix, matrix)
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let mut prefixes = Vec::with_capacity(gs.len());
            let mut matrices = Vec::with_capacity(gs.len());
            for g in gs {
                let (p, m) = pull(g, fresh);
                prefixes.push(p.into_iter().collect::<alloc::collections::VecDeque<_>>());
                matrices.push(m);
            }
            let mut merged = Vec::new();
            loop {
                let pick = prefixes
                    .iter()
                    .position(|p| p.front().is_some_and(|s| s.q == Quantifier::Exists))
                    .or_else(|| prefixes.iter().position(|p| !p.is_empty()));
                match pick {
                    Some(k) => merged.push(prefixes[k].pop_front().unwrap()),
                    None => break,
                }
            }
            let matrix = if matches!(f, Formula::And(..)) { Formula::And(matrices) } else { Formula::Or(matrices) };
            (merged, matrix)
        }
        g => (Vec::new(), g.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, print_formula, Signature};

    fn prenex(text: &str) -> String {
        let f = parse_formula(text, &Signature::ring()).unwrap();
        let p = to_prenex(&f);
        assert!(is_prenex(&p));
        print_formula(&p)
    }

    #[test]
    fn negated_existential_becomes_universal() {
        assert_eq!(prenex("(not (exists x (= x 0)))"), "(forall x (not (= x 0)))");
    }

    #[test]
    fn parallel_binders_get_fresh_names() {
        assert_eq!(
            prenex("(and (exists x (= x 0)) (exists x (= x 1)))"),
            "(exists x (exists x' (and (= x 0) (= x' 1))))"
        );
    }

    #[test]
    fn existentials_are_pulled_first() {
        assert_eq!(
            prenex("(or (forall u (= u x)) (exists v (= v x)))"),
            "(exists v (forall u (or (= u x) (= v x))))"
        );
    }

    #[test]
    fn implication_is_eliminated() {
        assert_eq!(
            prenex("(imp (exists u (= u x)) (= x 0))"),
            "(forall u (or (not (= u x)) (= x 0)))"
        );
    }

    #[test]
    fn split_prefix_reads_block() {
        let f = parse_formula("(forall a (exists b (= a b)))", &Signature::ring()).unwrap();
        let (prefix, body) = split_prefix(&f);
        assert_eq!(prefix, alloc::vec![(Quantifier::Forall, "a".into()), (Quantifier::Exists, "b".into())]);
        assert_eq!(*body, Formula::eq(Term::Bound(1), Term::Bound(0)));
    }
}
