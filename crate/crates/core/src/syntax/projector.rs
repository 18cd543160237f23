use alloc::string::String;
use alloc::vec::Vec;

use super::{bind, is_prenex, to_nnf, to_prenex, Formula, Fresh, Signature, Term};

/// The projector symbol: `p(u, v)` is `u` when `v = 0` and `0` otherwise.
pub const PROJECTOR: &str = "p";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProjectorError {
    #[error("input is not in prenex form")]
    NotPrenex,
    #[error("signature lacks `+`, `-` or `0`")]
    MissingGroupSymbols,
    #[error("signature already uses `{PROJECTOR}` for something other than a binary function")]
    SymbolClash,
    #[error("negated relation `{0}` has no complement definition")]
    NoEliminator(String),
    #[error("relation `{0}` occurs outside the top-level conjunction of the matrix")]
    RelationNotConjunctive(String),
}

/// An open relation-free formula reduced to a single equation:
/// `Pos(t)` stands for `t = 0` and `Neg(t)` for `t != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Pos(Term),
    Neg(Term),
}

impl Literal {
    pub fn negate(self) -> Literal {
        match self {
            Literal::Pos(t) => Literal::Neg(t),
            Literal::Neg(t) => Literal::Pos(t),
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Literal::Pos(t) => Formula::eq(t.clone(), zero()),
            Literal::Neg(t) => Formula::not(Formula::eq(t.clone(), zero())),
        }
    }

    fn and(self, other: Literal) -> Literal {
        use Literal::*;
        match (self, other) {
            // u=0 & v=0  <->  p(u,v)+v = 0
            (Pos(a), Pos(b)) => Pos(Term::binary("+", proj(a, b.clone()), b)),
            // u!=0 & v!=0  <->  not (u=0 | v=0)  <->  p(u,v)-u != 0
            (Neg(a), Neg(b)) => Neg(Term::binary("-", proj(a.clone(), b), a)),
            // u=0 & v!=0  <->  not (v=0 | u!=0)  <->  p(v,u) != 0
            (Pos(a), Neg(b)) => Neg(proj(b, a)),
            (Neg(a), Pos(b)) => Neg(proj(a, b)),
        }
    }
}

fn zero() -> Term {
    Term::constant("0")
}

fn proj(a: Term, b: Term) -> Term {
    Term::binary(PROJECTOR, a, b)
}

fn diff(a: &Term, b: &Term) -> Term {
    if *b == zero() {
        a.clone()
    } else {
        Term::binary("-", a.clone(), b.clone())
    }
}

/// Encodes an open formula without relation symbols as one literal over the
/// ring language expanded by the projector.
pub fn encode_open(f: &Formula) -> Result<Literal, ProjectorError> {
    encode(&to_nnf(f))
}

fn encode(f: &Formula) -> Result<Literal, ProjectorError> {
    match f {
        Formula::Eq(a, b) => Ok(Literal::Pos(diff(a, b))),
        Formula::Not(g) => match &**g {
            Formula::Eq(a, b) => Ok(Literal::Neg(diff(a, b))),
            Formula::Rel(r, _) => Err(ProjectorError::RelationNotConjunctive(r.clone())),
            _ => unreachable!("input is in negation normal form"),
        },
        Formula::Rel(r, _) => Err(ProjectorError::RelationNotConjunctive(r.clone())),
        Formula::And(gs) => {
            let mut acc: Option<Literal> = None;
            for g in gs {
                let lit = encode(g)?;
                acc = Some(match acc {
                    None => lit,
                    Some(prev) => prev.and(lit),
                });
            }
            Ok(acc.unwrap_or(Literal::Pos(zero())))
        }
        Formula::Or(gs) => {
            let mut acc: Option<Literal> = None;
            for g in gs {
                let lit = encode(g)?.negate();
                acc = Some(match acc {
                    None => lit,
                    Some(prev) => prev.and(lit),
                });
            }
            Ok(acc.map_or(Literal::Neg(zero()), Literal::negate))
        }
        Formula::Imp(..) | Formula::Exists(..) | Formula::Forall(..) => {
            unreachable!("input is open and in negation normal form")
        }
    }
}

fn contains_relation(f: &Formula) -> Option<String> {
    match f {
        Formula::Rel(r, _) => Some(r.clone()),
        Formula::Eq(..) => None,
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => contains_relation(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().find_map(contains_relation),
        Formula::Imp(a, b) => contains_relation(a).or_else(|| contains_relation(b)),
    }
}

fn flatten_and(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(gs) => gs.into_iter().for_each(|g| flatten_and(g, out)),
        g => out.push(g),
    }
}

struct Slot {
    forall: bool,
    var: String,
    hint: String,
}

/// Translates a prenex formula `Q1 u1 ... Qm um psi` into
/// `forall w Q1 u1 ... Qm um [exists y...] h` where `h` is a conjunction of
/// positive relation atoms and at most one equation over the projector
/// expansion. Negated relation atoms are first replaced by the complement
/// definitions of `sig`, whose existential witnesses join the prefix
/// innermost.
pub fn projector_translate(f: &Formula, sig: &Signature) -> Result<Formula, ProjectorError> {
    if !is_prenex(f) {
        return Err(ProjectorError::NotPrenex);
    }
    if sig.function_arity("+") != Some(2) || sig.function_arity("-") != Some(2) || !sig.has_constant("0") {
        return Err(ProjectorError::MissingGroupSymbols);
    }
    if sig.is_symbol(PROJECTOR) && sig.function_arity(PROJECTOR) != Some(2) {
        return Err(ProjectorError::SymbolClash);
    }

    let mut fresh = Fresh::avoiding(&f.free_vars());
    let mut slots = Vec::new();
    let mut cur = f.clone();
    loop {
        let (forall, hint, body) = match cur {
            Formula::Exists(v, g) => (false, v.0, *g),
            Formula::Forall(v, g) => (true, v.0, *g),
            _ => break,
        };
        let var = fresh.name();
        cur = body.instantiate(&Term::Var(var.clone()));
        slots.push(Slot { forall, var, hint });
    }

    let matrix = eliminate_negated_relations(&to_nnf(&cur), sig, &mut fresh, &mut slots)?;
    let mut conjuncts = Vec::new();
    flatten_and(matrix, &mut conjuncts);
    let mut atoms = Vec::new();
    let mut rest = Vec::new();
    for c in conjuncts {
        match c {
            Formula::Rel(..) => atoms.push(c),
            c => {
                if let Some(r) = contains_relation(&c) {
                    return Err(ProjectorError::RelationNotConjunctive(r));
                }
                rest.push(c);
            }
        }
    }

    let w = fresh.name();
    let core = match encode(&Formula::And(rest))? {
        Literal::Pos(t) => Formula::eq(t, zero()),
        Literal::Neg(t) => Formula::eq(proj(Term::Var(w.clone()), t), zero()),
    };
    let hat = if atoms.is_empty() {
        core
    } else {
        atoms.push(core);
        Formula::And(atoms)
    };
    let body = slots.iter().rev().fold(hat, |body, s| bind(s.forall, &s.var, &s.hint, body));
    Ok(bind(true, &w, "w", body))
}

fn eliminate_negated_relations(
    f: &Formula,
    sig: &Signature,
    fresh: &mut Fresh,
    slots: &mut Vec<Slot>,
) -> Result<Formula, ProjectorError> {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Rel(r, args) => {
                let def = sig.dagger.get(r).ok_or_else(|| ProjectorError::NoEliminator(r.clone()))?;
                let params = Signature::dagger_params(args.len());
                let inst = def.subst_free(&|v| params.iter().position(|p| p == v).map(|i| args[i].clone()));
                let mut cur = to_prenex(&inst);
                loop {
                    match cur {
                        Formula::Exists(v, body) => {
                            let var = fresh.name();
                            cur = body.instantiate(&Term::Var(var.clone()));
                            slots.push(Slot { forall: false, var, hint: v.0 });
                        }
                        Formula::Forall(..) => unreachable!("complement definitions are positive existential"),
                        body => return Ok(body),
                    }
                }
            }
            _ => Ok(f.clone()),
        },
        Formula::And(gs) => Ok(Formula::And(
            gs.iter().map(|g| eliminate_negated_relations(g, sig, fresh, slots)).collect::<Result<_, _>>()?,
        )),
        Formula::Or(gs) => Ok(Formula::Or(
            gs.iter().map(|g| eliminate_negated_relations(g, sig, fresh, slots)).collect::<Result<_, _>>()?,
        )),
        _ => Ok(f.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, print_formula};

    fn enc(text: &str) -> Formula {
        let f = parse_formula(text, &Signature::ring()).unwrap();
        encode_open(&f).unwrap().to_formula()
    }

    fn p_fml(text: &str) -> Formula {
        parse_formula(text, &Signature::ring_projector()).unwrap()
    }

    #[test]
    fn disjunction_with_disequation() {
        assert_eq!(enc("(or (= u 0) (not (= v 0)))"), p_fml("(= (p u v) 0)"));
    }

    #[test]
    fn conjunction_of_equations() {
        assert_eq!(enc("(and (= u 0) (= v 0))"), p_fml("(= (+ (p u v) v) 0)"));
    }

    #[test]
    fn disjunction_of_equations() {
        // u=0 | v=0 is the negation of (p(u,v)-u != 0)
        assert_eq!(enc("(or (= u 0) (= v 0))"), p_fml("(= (- (p u v) u) 0)"));
    }

    #[test]
    fn translation_shape() {
        let sig = Signature::ring();
        let f = parse_formula("(exists u (not (= (* u u) x)))", &sig).unwrap();
        let g = projector_translate(&f, &sig).unwrap();
        assert_eq!(print_formula(&g), "(forall w (exists u (= (p w (- (* u u) x)) 0)))");

        let f = parse_formula("(forall u (= u u))", &sig).unwrap();
        let g = projector_translate(&f, &sig).unwrap();
        assert_eq!(print_formula(&g), "(forall w (forall u (= (- u u) 0)))");
    }

    #[test]
    fn negated_relation_uses_complement() {
        let base = Signature::ring().with_relation("Z", 1);
        let def = parse_formula("(exists y (= (* x1 y) 1))", &base).unwrap();
        let sig = base.with_dagger("Z", def).unwrap();
        let f = parse_formula("(forall u (and (not (Z u)) (Z x)))", &sig).unwrap();
        let g = projector_translate(&f, &sig).unwrap();
        assert_eq!(print_formula(&g), "(forall w (forall u (exists y (and (Z x) (= (- (* u y) 1) 0)))))");

        let bare = Signature::ring().with_relation("Z", 1);
        let f = parse_formula("(not (Z x))", &bare).unwrap();
        assert_eq!(projector_translate(&f, &bare), Err(ProjectorError::NoEliminator("Z".into())));
        let f = parse_formula("(or (Z x) (= x 0))", &bare).unwrap();
        assert_eq!(projector_translate(&f, &bare), Err(ProjectorError::RelationNotConjunctive("Z".into())));
    }

    #[test]
    fn rejects_non_prenex() {
        let sig = Signature::ring();
        let f = parse_formula("(and (= x 0) (exists u (= u x)))", &sig).unwrap();
        assert_eq!(projector_translate(&f, &sig), Err(ProjectorError::NotPrenex));
    }
}
