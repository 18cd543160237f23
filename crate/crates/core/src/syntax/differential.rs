use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Formula, Term};

/// The derivation symbol of the differential ring language.
pub const DELTA: &str = "delta";

/// Name of the `k`-th jet variable of `x`, standing for `delta^k(x)`.
pub fn jet_name(var: &str, k: usize) -> String {
    format!("{var}@{k}")
}

/// Highest derivative order needed for each original free variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JetSpec {
    pub orders: BTreeMap<String, usize>,
}

impl JetSpec {
    pub fn order(&self, var: &str) -> Option<usize> {
        self.orders.get(var).copied()
    }

    /// Orders in sorted variable order.
    pub fn as_vec(&self) -> Vec<usize> {
        self.orders.values().copied().collect()
    }

    /// All jet variables `x@0 .. x@m`, grouped by variable.
    pub fn jet_vars(&self) -> Vec<String> {
        self.orders.iter().flat_map(|(v, &m)| (0..=m).map(move |k| jet_name(v, k))).collect()
    }

    /// Values for the jet variables given a value for each original
    /// variable and the derivation `delta`.
    pub fn jet_assignment(
        &self,
        base: &BTreeMap<String, usize>,
        delta: impl Fn(usize) -> usize,
    ) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for (v, &m) in &self.orders {
            let Some(&a) = base.get(v) else { continue };
            let mut cur = a;
            for k in 0..=m {
                out.insert(jet_name(v, k), cur);
                cur = delta(cur);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UnfoldError {
    #[error("formula has quantifiers")]
    Quantified,
    #[error("cannot push `{DELTA}` through `{0}`")]
    Opaque(String),
    #[error("variable `{0}` already looks like a jet variable")]
    JetLikeName(String),
}

/// Rewrites a quantifier-free formula over rings with a derivation into a
/// ring formula over jet variables.
///
/// `delta` is pushed inwards using additivity, the Leibniz rule and
/// `delta(0) = delta(1) = 0`; `delta^k(x)` becomes the variable `x@k`.
pub fn unfold_differential_terms(f: &Formula) -> Result<(Formula, JetSpec), UnfoldError> {
    if !f.is_quantifier_free() {
        return Err(UnfoldError::Quantified);
    }
    let mut spec = JetSpec::default();
    for v in f.free_vars() {
        if v.contains('@') {
            return Err(UnfoldError::JetLikeName(v));
        }
        spec.orders.insert(v, 0);
    }
    let out = unfold_formula(f)?;
    out.for_each_term(&mut |t| collect_orders(t, &mut spec));
    Ok((out, spec))
}

fn unfold_formula(f: &Formula) -> Result<Formula, UnfoldError> {
    let all = |gs: &[Formula]| gs.iter().map(unfold_formula).collect::<Result<Vec<_>, _>>();
    Ok(match f {
        Formula::Eq(a, b) => Formula::Eq(unfold(a)?, unfold(b)?),
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(unfold).collect::<Result<_, _>>()?),
        Formula::Not(g) => Formula::not(unfold_formula(g)?),
        Formula::And(gs) => Formula::And(all(gs)?),
        Formula::Or(gs) => Formula::Or(all(gs)?),
        Formula::Imp(a, b) => Formula::imp(unfold_formula(a)?, unfold_formula(b)?),
        Formula::Exists(..) | Formula::Forall(..) => return Err(UnfoldError::Quantified),
    })
}

fn collect_orders(t: &Term, spec: &mut JetSpec) {
    match t {
        Term::Var(v) => {
            if let Some((base, k)) = v.rsplit_once('@') {
                let k: usize = k.parse().expect("jet variables end in an order");
                let e = spec.orders.entry(base.into()).or_insert(0);
                *e = (*e).max(k);
            }
        }
        Term::App(_, args) => args.iter().for_each(|a| collect_orders(a, spec)),
        _ => {}
    }
}

fn unfold(t: &Term) -> Result<Term, UnfoldError> {
    match t {
        Term::Var(v) => Ok(Term::Var(jet_name(v, 0))),
        Term::App(f, args) if f == DELTA => derive(&unfold(&args[0])?),
        Term::App(f, args) => Ok(Term::App(f.clone(), args.iter().map(unfold).collect::<Result<_, _>>()?)),
        t => Ok(t.clone()),
    }
}

/// Derivative of a term that is already free of `delta`.
fn derive(t: &Term) -> Result<Term, UnfoldError> {
    match t {
        Term::Var(v) => {
            let (base, k) = v.rsplit_once('@').expect("unfolded variables are jet variables");
            let k: usize = k.parse().expect("jet variables end in an order");
            Ok(Term::Var(jet_name(base, k + 1)))
        }
        Term::Const(c) if c == "0" || c == "1" => Ok(Term::constant("0")),
        Term::Const(c) => Err(UnfoldError::Opaque(c.clone())),
        Term::Bound(_) => unreachable!("formula is quantifier-free"),
        Term::App(f, args) => match (f.as_str(), args.as_slice()) {
            ("+" | "-", [a, b]) => Ok(Term::binary(f, derive(a)?, derive(b)?)),
            ("*", [a, b]) => Ok(Term::binary(
                "+",
                Term::binary("*", derive(a)?, b.clone()),
                Term::binary("*", a.clone(), derive(b)?),
            )),
            _ => Err(UnfoldError::Opaque(f.clone())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, print_formula, Signature};

    fn unfolded(text: &str) -> (String, Vec<usize>) {
        let f = parse_formula(text, &Signature::ring_delta()).unwrap();
        let (g, spec) = unfold_differential_terms(&f).unwrap();
        (print_formula(&g), spec.as_vec())
    }

    #[test]
    fn first_order_jet() {
        assert_eq!(unfolded("(= (* (delta x) x) 0)"), ("(= (* x@1 x@0) 0)".into(), alloc::vec![1]));
    }

    #[test]
    fn iterated_delta_and_idle_variable() {
        assert_eq!(unfolded("(= (+ (delta (delta x)) y) 0)"), ("(= (+ x@2 y@0) 0)".into(), alloc::vec![2, 0]));
    }

    #[test]
    fn leibniz_and_constants() {
        assert_eq!(
            unfolded("(= (delta (* x (+ y 1))) 0)"),
            ("(= (+ (* x@1 (+ y@0 1)) (* x@0 (+ y@1 0))) 0)".into(), alloc::vec![1, 1])
        );
    }

    #[test]
    fn rejects_quantifiers_and_opaque_symbols() {
        let sig = Signature::ring_delta();
        let f = parse_formula("(exists x (= (delta x) 0))", &sig).unwrap();
        assert_eq!(unfold_differential_terms(&f), Err(UnfoldError::Quantified));
        let sig = Signature::ring_delta().with_function("f", 1);
        let f = parse_formula("(= (delta (f x)) 0)", &sig).unwrap();
        assert_eq!(unfold_differential_terms(&f), Err(UnfoldError::Opaque("f".into())));
    }

    #[test]
    fn jet_assignment_iterates_delta() {
        let f = parse_formula("(= (delta (delta x)) y)", &Signature::ring_delta()).unwrap();
        let (_, spec) = unfold_differential_terms(&f).unwrap();
        let base = BTreeMap::from([("x".into(), 3usize), ("y".into(), 1usize)]);
        let jets = spec.jet_assignment(&base, |a| a / 2);
        assert_eq!(jets.get("x@0"), Some(&3));
        assert_eq!(jets.get("x@1"), Some(&1));
        assert_eq!(jets.get("x@2"), Some(&0));
        assert_eq!(jets.get("y@0"), Some(&1));
        assert_eq!(spec.jet_vars().len(), 4);
    }
}
