//! The linear-dependence relations and their positive complements,
//! checked against brute-force independence over the predicate.

use fvkit_core::axioms::{emit_theory, evaluate_theory, TheoryParams};
use fvkit_core::pairs::PairStructure;
use fvkit_core::semantics::{tuples, FiniteStructure};

fn add(a: &FiniteStructure, x: usize, y: usize) -> usize {
    a.apply("+", &[x, y]).unwrap()
}

fn mul(a: &FiniteStructure, x: usize, y: usize) -> usize {
    a.apply("*", &[x, y]).unwrap()
}

/// No nontrivial combination with coefficients in `P` vanishes.
fn independent(a: &FiniteStructure, values: &[usize]) -> bool {
    let zero = a.constant("0").unwrap();
    let p: Vec<usize> = (0..a.size()).filter(|&x| a.holds("P", &[x]).unwrap()).collect();
    !tuples(p.len(), values.len()).any(|c| {
        let c: Vec<usize> = c.iter().map(|&i| p[i]).collect();
        c.iter().any(|&ci| ci != zero) && c.iter().zip(values).fold(zero, |s, (&ci, &v)| add(a, s, mul(a, ci, v))) == zero
    })
}

/// Values of every monomial of total degree at most `k` in `xs`.
fn monomial_values(a: &FiniteStructure, xs: &[usize], k: usize) -> Vec<usize> {
    let one = a.constant("1").unwrap();
    tuples(k + 1, xs.len())
        .filter(|e| e.iter().sum::<usize>() <= k)
        .map(|e| e.iter().zip(xs).fold(one, |m, (&d, &x)| (0..d).fold(m, |m, _| mul(a, m, x))))
        .collect()
}

fn oracle(a: &FiniteStructure, rel: &str, args: &[usize]) -> bool {
    if rel.starts_with("ell") {
        independent(a, args)
    } else if let Some(rest) = rel.strip_prefix("Dt") {
        let k: usize = rest.split('_').nth(1).unwrap().parse().unwrap();
        independent(a, &monomial_values(a, args, k))
    } else {
        panic!("unexpected relation {rel}")
    }
}

fn check(theory: &str, params: TheoryParams, big: usize, small: usize) {
    let entry = emit_theory(theory, &params).unwrap();
    let base = PairStructure::subfield(big, small).unwrap().ambient().clone();
    let a = base
        .expand(
            entry.signature.clone(),
            |f, args| base.apply(f, args).unwrap(),
            |c| base.constant(c).unwrap(),
            |r, args| if r == "P" { base.holds("P", args).unwrap() } else { oracle(&base, r, args) },
        )
        .unwrap();
    let report = evaluate_theory(&entry, &a).unwrap();
    assert!(report.all_hold(), "{theory} on ({big},{small}): {:?}", report.verdicts);
    assert!(report.dagger_violations.is_empty(), "{theory}: {:?}", report.dagger_violations);
}

#[test]
fn ell_relations_on_field_pairs() {
    for n in 1..=3 {
        check("ell_n", TheoryParams { n, ..TheoryParams::default() }, 4, 2);
        check("ell_n", TheoryParams { n, ..TheoryParams::default() }, 8, 2);
    }
    check("ell_n", TheoryParams { n: 2, ..TheoryParams::default() }, 9, 3);
}

#[test]
fn dt_relations_on_field_pairs() {
    for (n, k) in [(1, 1), (1, 2), (2, 1), (1, 3)] {
        check("Dt_n_k", TheoryParams { n, k, ..TheoryParams::default() }, 4, 2);
        check("Dt_n_k", TheoryParams { n, k, ..TheoryParams::default() }, 8, 2);
    }
}
