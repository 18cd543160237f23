use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{p_part, pair_boolean_subalgebra, PairError, SetAlgebra};
use crate::product::{BooleanProduct, CoordSet};
use crate::semantics::{tuples, Compiled, FiniteStructure};
use crate::syntax::Formula;

/// Name of the point variable of a neighbourhood formula; its other free
/// variables are parameters.
pub const POINT: &str = "x";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D1Report {
    pub subalgebra: SetAlgebra,
    /// Atoms of the powerset of the index set.
    pub ambient_atoms: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyWitness {
    pub coord: usize,
    /// Coefficients in the factor, constant term first.
    pub coeffs: Vec<usize>,
    /// A root in the factor; none lies in the predicate.
    pub root: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Report {
    pub d_max: usize,
    pub checked: usize,
    /// The first failing polynomial of each failing coordinate.
    pub witnesses: Vec<PolyWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D3Report {
    pub checked: usize,
    /// Parameter tuples (as coordinate vectors) whose ball misses `D`.
    pub failures: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D4Report {
    pub checked: usize,
    /// `(x, e)` with `x` in `e` and no element of the subalgebra between.
    pub failures: Vec<(usize, CoordSet)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseReport {
    pub d1: D1Report,
    pub d2: D2Report,
    pub d3: D3Report,
    pub d4: D4Report,
}

impl DenseReport {
    pub fn passed(&self) -> [bool; 4] {
        [self.d1.equal, self.d2.witnesses.is_empty(), self.d3.failures.is_empty(), self.d4.failures.is_empty()]
    }
}

/// `x^2 + x + 1` style rendering; coefficients are element indices.
pub fn format_poly(coeffs: &[usize]) -> String {
    let mut terms = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => String::from("x"),
            _ => format!("x^{k}"),
        };
        terms.push(match (c, k) {
            (_, 0) => format!("{c}"),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        String::from("0")
    } else {
        terms.join(" + ")
    }
}

fn poly_value(a: &FiniteStructure, coeffs: &[usize], x: usize) -> usize {
    coeffs.iter().rev().fold(a.constant("0").unwrap(), |acc, &c| a.op2("+", a.op2("*", acc, x), c))
}

/// Polynomials of degree `1 ..= d_max` over `d` with a root in `a` but
/// none in `d`; returns the number checked and the first failure.
fn root_closure(a: &FiniteStructure, d: &[usize], d_max: usize) -> (usize, Option<(Vec<usize>, usize)>) {
    let zero = a.constant("0").unwrap();
    let mut checked = 0;
    for deg in 1..=d_max {
        for lower in tuples(d.len(), deg) {
            for &lead in d.iter().filter(|&&c| c != zero) {
                let mut coeffs: Vec<usize> = lower.iter().map(|&i| d[i]).collect();
                coeffs.push(lead);
                checked += 1;
                let root = (0..a.size()).find(|&x| poly_value(a, &coeffs, x) == zero);
                if let Some(root) = root {
                    if !d.iter().any(|&x| poly_value(a, &coeffs, x) == zero) {
                        return (checked, Some((coeffs, root)));
                    }
                }
            }
        }
    }
    (checked, None)
}

/// Checks (D1)-(D4) for the pair product `a` and its predicate part.
///
/// (D1) compares the algebra generated by `corpus` truth sets in the
/// fibers with the full powerset; (D2) is root closure for polynomials up
/// to degree `d_max`; (D3) asks every ball `chi(-, b)` to meet the
/// predicate part, the ball's point being the free variable `x`; (D4)
/// looks for refinements inside the generated algebra.
pub fn dense_pair_check(
    a: &BooleanProduct,
    chi: &Formula,
    d_max: usize,
    corpus: &[Formula],
) -> Result<DenseReport, PairError> {
    let pp = p_part(a)?;
    let d = &pp.embedding;
    let width = a.width();
    let sub = pair_boolean_subalgebra(a, d, corpus)?;
    let d1 = D1Report { equal: sub.elements.len() == 1 << width, ambient_atoms: width, subalgebra: sub };

    let mut d2 = D2Report { d_max, checked: 0, witnesses: Vec::new() };
    for (x, factor) in a.factors().iter().enumerate() {
        let p: Vec<usize> = (0..factor.size()).filter(|&e| factor.holds(super::PREDICATE, &[e]) == Some(true)).collect();
        let (checked, w) = root_closure(factor, &p, d_max);
        d2.checked += checked;
        if let Some((coeffs, root)) = w {
            d2.witnesses.push(PolyWitness { coord: x, coeffs, root });
        }
    }

    let vars = chi.free_vars();
    let point = vars.iter().position(|v| v == POINT);
    let params: Vec<String> = vars.iter().filter(|v| v.as_str() != POINT).cloned().collect();
    let mut order = params.clone();
    if point.is_some() {
        order.push(POINT.into());
    }
    let s = a.structure();
    let compiled = Compiled::new(s, chi, &order).map_err(|e| PairError::Malformed(format!("{e}")))?;
    let mut d3 = D3Report { checked: 0, failures: Vec::new() };
    let mut env = Vec::new();
    for b in tuples(a.len(), params.len()) {
        d3.checked += 1;
        let meets = if point.is_some() {
            d.iter().any(|&e| {
                env.clear();
                env.extend_from_slice(&b);
                env.push(e);
                compiled.eval_in(s, &mut env)
            })
        } else {
            !d.is_empty() && compiled.eval(s, &b)
        };
        if !meets {
            d3.failures.push(b.iter().map(|&e| a.coords(e).to_vec()).collect());
        }
    }

    let mut d4 = D4Report { checked: 0, failures: Vec::new() };
    for x in 0..width {
        for e in CoordSet::all_subsets(width).filter(|e| e.contains(x)) {
            d4.checked += 1;
            if !d1.subalgebra.elements.iter().any(|t| t.contains(x) && t.is_subset(e)) {
                d4.failures.push((x, e));
            }
        }
    }
    Ok(DenseReport { d1, d2, d3, d4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::pairs::{pair_product, PairStructure};
    use crate::syntax::{parse_formula, Signature};

    #[test]
    fn f4_over_f2_is_not_root_closed() {
        let a = pair_product(&[PairStructure::subfield(4, 2).unwrap()]).unwrap();
        let chi = parse_formula("(and)", &Signature::ring_pair()).unwrap();
        let r = dense_pair_check(&a, &chi, 2, &[]).unwrap();
        assert_eq!(r.d2.witnesses, vec![PolyWitness { coord: 0, coeffs: vec![1, 1, 1], root: 2 }]);
        assert_eq!(format_poly(&r.d2.witnesses[0].coeffs), "x^2 + x + 1");
        assert_eq!(r.passed(), [true, false, true, true]);
        let r = dense_pair_check(&a, &chi, 1, &[]).unwrap();
        assert!(r.d2.witnesses.is_empty());
    }

    #[test]
    fn balls_and_refinements() {
        let a = pair_product(&[PairStructure::subfield(4, 2).unwrap(), PairStructure::subfield(4, 2).unwrap()]).unwrap();
        let sig = Signature::ring_pair();
        let corpus = [parse_formula("(= x 0)", &Signature::ring()).unwrap()];
        let ball = parse_formula("(= (* x y) 0)", &sig).unwrap();
        let r = dense_pair_check(&a, &ball, 2, &corpus).unwrap();
        assert!(r.d1.equal);
        assert!(r.d3.failures.is_empty());
        assert!(r.d4.failures.is_empty());
        let unit = parse_formula("(= (* x y) 1)", &sig).unwrap();
        let r = dense_pair_check(&a, &unit, 2, &[]).unwrap();
        assert!(!r.d3.failures.is_empty());
        assert!(!r.d1.equal);
        assert_eq!(r.d4.failures.len(), 2);
    }

    #[test]
    fn polynomial_rendering() {
        assert_eq!(format_poly(&[0, 2, 0, 1]), "x^3 + 2x");
        assert_eq!(format_poly(&[3]), "3");
    }
}
