//! Small builders for s-expression formula text.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub fn and(parts: &[String]) -> String {
    match parts {
        [one] => one.clone(),
        _ => format!("(and {})", parts.join(" ")),
    }
}

pub fn or(parts: &[String]) -> String {
    match parts {
        [one] => one.clone(),
        _ => format!("(or {})", parts.join(" ")),
    }
}

pub fn not(f: &str) -> String {
    format!("(not {f})")
}

pub fn imp(a: &str, b: &str) -> String {
    format!("(imp {a} {b})")
}

pub fn iff(a: &str, b: &str) -> String {
    format!("(and (imp {a} {b}) (imp {b} {a}))")
}

pub fn eq(a: &str, b: &str) -> String {
    format!("(= {a} {b})")
}

pub fn ne(a: &str, b: &str) -> String {
    not(&eq(a, b))
}

fn quantify(q: &str, vars: &[String], body: String) -> String {
    vars.iter().rev().fold(body, |acc, v| format!("({q} {v} {acc})"))
}

pub fn forall(vars: &[String], body: String) -> String {
    quantify("forall", vars, body)
}

pub fn exists(vars: &[String], body: String) -> String {
    quantify("exists", vars, body)
}

pub fn add(a: &str, b: &str) -> String {
    format!("(+ {a} {b})")
}

pub fn sub(a: &str, b: &str) -> String {
    format!("(- {a} {b})")
}

pub fn mul(a: &str, b: &str) -> String {
    format!("(* {a} {b})")
}

pub fn neg(a: &str) -> String {
    sub("0", a)
}

/// Left-nested sum; `0` when empty.
pub fn sum(terms: &[String]) -> String {
    let mut it = terms.iter();
    match it.next() {
        None => "0".into(),
        Some(first) => it.fold(first.clone(), |acc, t| add(&acc, t)),
    }
}

/// Left-nested product; `1` when empty.
pub fn product(terms: &[String]) -> String {
    let mut it = terms.iter();
    match it.next() {
        None => "1".into(),
        Some(first) => it.fold(first.clone(), |acc, t| mul(&acc, t)),
    }
}

/// `1 + 1 + ... + 1`
pub fn numeral(n: usize) -> String {
    match n {
        0 => "0".into(),
        _ => sum(&alloc::vec!["1".to_string(); n]),
    }
}

pub fn power(t: &str, k: usize) -> String {
    product(&alloc::vec![t.to_string(); k])
}

pub fn vars(prefix: &str, range: core::ops::Range<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

/// `join` through `meet`: `a v b = -((-a) ^ (-b))`.
pub fn join(a: &str, b: &str) -> String {
    neg(&format!("(meet {} {})", neg(a), neg(b)))
}

pub fn abs(a: &str) -> String {
    join(a, &neg(a))
}

/// `a <= b` as `a ^ b = a`.
pub fn le(a: &str, b: &str) -> String {
    eq(&format!("(meet {a} {b})"), a)
}

/// `exists w. t * w = 1`
pub fn unit(t: &str, w: &str) -> String {
    format!("(exists {w} (= (* {t} {w}) 1))")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders() {
        assert_eq!(numeral(3), "(+ (+ 1 1) 1)");
        assert_eq!(power("x", 0), "1");
        assert_eq!(forall(&vars("x", 1..3), "B".into()), "(forall x1 (forall x2 B))");
        assert_eq!(and(&["A".into()]), "A");
    }
}
