//! Deterministic prenex formula corpora over the ring signature.
//!
//! A corpus of quantifier depth `d` over `k` free variables contains every
//! formula `Q1 u1 ... Qd ud . M` with each `Qi` in `{exists, forall}` and a
//! matrix `M` over the variable pool `x y z ... u v ...` of size
//! `m = k + d`. Atoms come from seven templates with term depth at most 2:
//!
//! ```text
//! (= a b)  (= a 0)  (= a 1)  (= (* a b) c)  (= (+ a b) c)  (= (- a b) 1)  (= (+ (* a a) b) 0)
//! ```
//!
//! so there are `A(m) = m^2 + m + m + m^3 + m^3 + m^2 + m^2 = 2m^3 + 3m^2 + 2m`
//! atoms. A literal is an atom or its negation (`L = 2A`), and a matrix is a
//! literal or `(and l1 l2)` / `(or l1 l2)` (`M = L + 2L^2`). The corpus has
//! `2^d * M(k + d)` formulas, numbered in the order of [`formula_at`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{parse_formula, Formula, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub depth: usize,
    pub free: usize,
    /// Draw this many distinct formulas instead of all of them.
    pub sample: Option<usize>,
    pub seed: u64,
}

/// `x y z x3 x4 ...`
pub fn free_names(k: usize) -> Vec<String> {
    (0..k).map(|i| if i < 3 { String::from(["x", "y", "z"][i]) } else { format!("x{i}") }).collect()
}

/// `u v u2 u3 ...`
pub fn bound_names(d: usize) -> Vec<String> {
    (0..d).map(|i| if i < 2 { String::from(["u", "v"][i]) } else { format!("u{i}") }).collect()
}

pub fn atom_count(m: u64) -> u64 {
    2 * m * m * m + 3 * m * m + 2 * m
}

pub fn literal_count(m: u64) -> u64 {
    2 * atom_count(m)
}

pub fn matrix_count(m: u64) -> u64 {
    let l = literal_count(m);
    l + 2 * l * l
}

pub fn corpus_size(depth: usize, free: usize) -> u64 {
    (1u64 << depth) * matrix_count((depth + free) as u64)
}

fn atom_text(pool: &[String], mut i: u64) -> String {
    let m = pool.len() as u64;
    let v = |j: u64| pool[j as usize].as_str();
    let sizes = [m * m, m, m, m * m * m, m * m * m, m * m, m * m];
    let mut t = 0;
    while i >= sizes[t] {
        i -= sizes[t];
        t += 1;
    }
    let (a, b, c) = (i / (m * m), (i / m) % m, i % m);
    match t {
        0 => format!("(= {} {})", v(i / m), v(i % m)),
        1 => format!("(= {} 0)", v(i)),
        2 => format!("(= {} 1)", v(i)),
        3 => format!("(= (* {} {}) {})", v(a), v(b), v(c)),
        4 => format!("(= (+ {} {}) {})", v(a), v(b), v(c)),
        5 => format!("(= (- {} {}) 1)", v(i / m), v(i % m)),
        _ => format!("(= (+ (* {} {}) {}) 0)", v(i / m), v(i / m), v(i % m)),
    }
}

fn literal_text(pool: &[String], i: u64) -> String {
    let a = atom_count(pool.len() as u64);
    if i < a {
        atom_text(pool, i)
    } else {
        format!("(not {})", atom_text(pool, i - a))
    }
}

fn matrix_text(pool: &[String], i: u64) -> String {
    let l = literal_count(pool.len() as u64);
    if i < l {
        return literal_text(pool, i);
    }
    let r = i - l;
    let op = if r < l * l { "and" } else { "or" };
    let r = r % (l * l);
    format!("({op} {} {})", literal_text(pool, r / l), literal_text(pool, r % l))
}

/// The formula with the given index; the quantifier prefix is the most
/// significant part, read as binary with `exists = 0`, outermost first.
///
/// # Panics
/// If `index >= corpus_size(depth, free)`.
pub fn formula_at(depth: usize, free: usize, index: u64) -> Formula {
    assert!(index < corpus_size(depth, free), "corpus index out of range");
    let bound = bound_names(depth);
    let mut pool = free_names(free);
    pool.extend(bound.iter().cloned());
    let mc = matrix_count(pool.len() as u64);
    let (prefix, matrix) = (index / mc, index % mc);
    let mut text = matrix_text(&pool, matrix);
    for (j, u) in bound.iter().enumerate().rev() {
        let q = if (prefix >> (depth - 1 - j)) & 1 == 0 { "exists" } else { "forall" };
        text = format!("({q} {u} {text})");
    }
    parse_formula(&text, &Signature::ring()).expect("corpus templates parse")
}

/// Indices of the corpus in ascending order: all of them, or a seeded
/// uniform sample without repetition.
pub fn corpus_indices(spec: &CorpusSpec) -> Vec<u64> {
    let total = corpus_size(spec.depth, spec.free);
    match spec.sample {
        Some(n) if (n as u64) < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let total = usize::try_from(total).expect("corpus size fits in usize");
            let mut idx: Vec<u64> = rand::seq::index::sample(&mut rng, total, n).into_iter().map(|i| i as u64).collect();
            idx.sort_unstable();
            idx
        }
        _ => (0..total).collect(),
    }
}

pub fn generate(spec: &CorpusSpec) -> Vec<Formula> {
    corpus_indices(spec).into_iter().map(|i| formula_at(spec.depth, spec.free, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print_formula;

    #[test]
    fn counts() {
        assert_eq!([1, 2, 3, 4].map(atom_count), [7, 32, 87, 184]);
        assert_eq!(corpus_size(0, 1), 14 + 2 * 14 * 14);
    }

    #[test]
    fn depth_zero_over_one_variable() {
        let all: Vec<String> = (0..14).map(|i| print_formula(&formula_at(0, 1, i))).collect();
        assert_eq!(all[..7], ["(= x x)", "(= x 0)", "(= x 1)", "(= (* x x) x)", "(= (+ x x) x)", "(= (- x x) 1)", "(= (+ (* x x) x) 0)"]);
        assert_eq!(all[7], "(not (= x x))");
    }

    #[test]
    fn prefix_order() {
        let size = matrix_count(2);
        assert!(print_formula(&formula_at(1, 1, 0)).starts_with("(exists u"));
        assert!(print_formula(&formula_at(1, 1, size)).starts_with("(forall u"));
    }

    #[test]
    fn sampling_is_seeded_and_sorted() {
        let spec = CorpusSpec { depth: 2, free: 2, sample: Some(50), seed: 7 };
        let a = corpus_indices(&spec);
        assert_eq!(a, corpus_indices(&spec));
        assert_eq!(a.len(), 50);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_ne!(a, corpus_indices(&CorpusSpec { seed: 8, ..spec }));
    }
}
