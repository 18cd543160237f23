use std::collections::BTreeSet;

use fvkit_core::corpus::{corpus_size, formula_at, generate, CorpusSpec};
use fvkit_core::syntax::print_formula;

/// Builds every corpus string with plain nested loops.
fn enumerate(free: &[&str], bound: &[&str]) -> BTreeSet<String> {
    let pool: Vec<&str> = free.iter().chain(bound).copied().collect();
    let mut atoms = Vec::new();
    for a in &pool {
        for b in &pool {
            atoms.push(format!("(= {a} {b})"));
            atoms.push(format!("(= (- {a} {b}) 1)"));
            atoms.push(format!("(= (+ (* {a} {a}) {b}) 0)"));
            for c in &pool {
                atoms.push(format!("(= (* {a} {b}) {c})"));
                atoms.push(format!("(= (+ {a} {b}) {c})"));
            }
        }
        atoms.push(format!("(= {a} 0)"));
        atoms.push(format!("(= {a} 1)"));
    }
    let mut lits = atoms.clone();
    lits.extend(atoms.iter().map(|a| format!("(not {a})")));
    let mut matrices = lits.clone();
    for op in ["and", "or"] {
        for l in &lits {
            for r in &lits {
                matrices.push(format!("({op} {l} {r})"));
            }
        }
    }
    let mut out = BTreeSet::new();
    for m in &matrices {
        let mut forms = vec![m.clone()];
        for u in bound.iter().rev() {
            forms = forms.iter().flat_map(|f| ["exists", "forall"].map(|q| format!("({q} {u} {f})"))).collect();
        }
        out.extend(forms);
    }
    out
}

#[test]
fn depth_two_closed_corpus_matches_enumeration() {
    let expected = enumerate(&[], &["u", "v"]);
    assert_eq!(expected.len() as u64, corpus_size(2, 0));
    let got: BTreeSet<String> = generate(&CorpusSpec { depth: 2, free: 0, sample: None, seed: 0 })
        .iter()
        .map(print_formula)
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn depth_two_count_with_one_free_variable() {
    let expected = enumerate(&["x"], &["u", "v"]);
    assert_eq!(expected.len() as u64, corpus_size(2, 1));
    for i in (0..corpus_size(2, 1)).step_by(997) {
        assert!(expected.contains(&print_formula(&formula_at(2, 1, i))));
    }
}

#[test]
fn depth_zero_uses_only_atoms_and_connectives() {
    let spec = CorpusSpec { depth: 0, free: 2, sample: None, seed: 3 };
    let all = generate(&spec);
    assert_eq!(all.len() as u64, corpus_size(0, 2));
    assert!(all.iter().all(|f| f.quantifier_depth() == 0 && f.free_vars().len() <= 2));
    let again = generate(&spec);
    assert_eq!(all, again);
}
