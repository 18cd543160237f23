use alloc::boxed::Box;
use alloc::string::String;

use super::{Formula, Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RelativizeError {
    #[error("`{0}` is not a unary relation symbol")]
    NotUnary(String),
}

/// Restricts every quantifier of `f` to the unary predicate `p`.
///
/// `p` need not be declared in `sig`; if it is, it must be a unary relation.
pub fn relativize(f: &Formula, p: &str, sig: &Signature) -> Result<Formula, RelativizeError> {
    let declared_badly = match sig.relation_arity(p) {
        Some(n) => n != 1,
        None => sig.is_symbol(p),
    };
    if declared_badly || uses_with_wrong_arity(f, p) {
        return Err(RelativizeError::NotUnary(p.into()));
    }
    Ok(rel(f, p))
}

fn uses_with_wrong_arity(f: &Formula, p: &str) -> bool {
    match f {
        Formula::Rel(r, args) => r == p && args.len() != 1,
        Formula::Eq(..) => false,
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => uses_with_wrong_arity(g, p),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().any(|g| uses_with_wrong_arity(g, p)),
        Formula::Imp(a, b) => uses_with_wrong_arity(a, p) || uses_with_wrong_arity(b, p),
    }
}

fn rel(f: &Formula, p: &str) -> Formula {
    let guard = || Formula::Rel(p.into(), alloc::vec![Term::Bound(0)]);
    match f {
        Formula::Eq(..) | Formula::Rel(..) => f.clone(),
        Formula::Not(g) => Formula::not(rel(g, p)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rel(g, p)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rel(g, p)).collect()),
        Formula::Imp(a, b) => Formula::imp(rel(a, p), rel(b, p)),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(Formula::And(alloc::vec![guard(), rel(g, p)]))),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(Formula::imp(guard(), rel(g, p)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, print_formula};

    #[test]
    fn guards_quantifiers() {
        let sig = Signature::ring_pair();
        let f = parse_formula("(exists x (= (* x x) y))", &sig).unwrap();
        let g = relativize(&f, "P", &sig).unwrap();
        assert_eq!(print_formula(&g), "(exists x (and (P x) (= (* x x) y)))");

        let f = parse_formula("(forall x (exists z (= x z)))", &sig).unwrap();
        let g = relativize(&f, "P", &sig).unwrap();
        assert_eq!(print_formula(&g), "(forall x (imp (P x) (exists z (and (P z) (= x z)))))");
    }

    #[test]
    fn open_formula_unchanged() {
        let sig = Signature::ring_pair();
        let f = parse_formula("(and (P x) (not (= x 1)))", &sig).unwrap();
        assert_eq!(relativize(&f, "P", &sig).unwrap(), f);
    }

    #[test]
    fn rejects_non_unary() {
        let sig = Signature::ring().with_relation("Q", 2);
        let f = parse_formula("(= x x)", &sig).unwrap();
        assert_eq!(relativize(&f, "Q", &sig), Err(RelativizeError::NotUnary("Q".into())));
        assert_eq!(relativize(&f, "*", &sig), Err(RelativizeError::NotUnary("*".into())));
        assert!(relativize(&f, "P", &sig).is_ok());
    }
}
