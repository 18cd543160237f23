use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{FiniteStructure, StructureError};
use crate::syntax::Signature;

/// The ring `Z/n` (`n >= 1`).
pub fn zmod(n: usize) -> FiniteStructure {
    assert!(n >= 1, "Z/0 is not finite");
    FiniteStructure::from_fns(
        &format!("Z/{n}"),
        Signature::ring(),
        n,
        |f, a| match f {
            "+" => (a[0] + a[1]) % n,
            "-" => (a[0] + n - a[1]) % n,
            _ => (a[0] * a[1]) % n,
        },
        |c| if c == "1" { 1 % n } else { 0 },
        |_, _| false,
    )
    .expect("ring tables are in range")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error("{0} is not a prime power")]
    NotPrimePower(usize),
    #[error("field order {0} is too large")]
    TooLarge(usize),
}

fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Coefficients, constant term first, of a polynomial over `F_p`.
type Poly = Vec<usize>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[usize], m: &[usize], p: usize) -> Poly {
    let mut r = a.to_vec();
    let d = m.len() - 1;
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - lead * c % p) % p;
        }
        r.pop();
    }
    trim(r)
}

fn monic_of_degree(d: usize, p: usize, index: usize) -> Poly {
    let mut i = index;
    let mut coeffs = Vec::with_capacity(d + 1);
    for _ in 0..d {
        coeffs.push(i % p);
        i /= p;
    }
    coeffs.push(1);
    coeffs
}

/// The first monic irreducible polynomial of degree `k` over `F_p`, in the
/// order of the index `sum c_i p^i` of its lower coefficients.
pub fn irreducible(p: usize, k: usize) -> Poly {
    'candidates: for index in 0..p.pow(k as u32) {
        let m = monic_of_degree(k, p, index);
        for d in 1..=k / 2 {
            for j in 0..p.pow(d as u32) {
                if poly_rem(&m, &monic_of_degree(d, p, j), p).is_empty() {
                    continue 'candidates;
                }
            }
        }
        return m;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The field with `q` elements. The element with index `sum c_i p^i`
/// stands for `sum c_i t^i` modulo the polynomial given by
/// [`irreducible`], so the prime field is `{0, .., p-1}`.
pub fn gf(q: usize) -> Result<FiniteStructure, GfError> {
    let (p, k) = prime_power(q).ok_or(GfError::NotPrimePower(q))?;
    if q > 256 {
        return Err(GfError::TooLarge(q));
    }
    let m = irreducible(p, k);
    let decode = |x: usize| -> Poly { (0..k).map(|i| x / p.pow(i as u32) % p).collect() };
    let encode = |a: &[usize]| -> usize { a.iter().enumerate().map(|(i, &c)| c * p.pow(i as u32)).sum() };
    let mul = |x: usize, y: usize| -> usize {
        let (a, b) = (decode(x), decode(y));
        let mut prod = vec![0; 2 * k];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        encode(&poly_rem(&prod, &m, p))
    };
    let add = |x: usize, y: usize, sign: usize| -> usize {
        let (a, b) = (decode(x), decode(y));
        let sum: Vec<usize> = a.iter().zip(&b).map(|(&u, &v)| (u + sign * v) % p).collect();
        encode(&sum)
    };
    let s = FiniteStructure::from_fns(
        &format!("F{q}"),
        Signature::ring(),
        q,
        |f, a| match f {
            "+" => add(a[0], a[1], 1),
            "-" => add(a[0], a[1], p - 1),
            _ => mul(a[0], a[1]),
        },
        |c| usize::from(c == "1"),
        |_, _| false,
    )
    .expect("field tables are in range");
    Ok(s)
}

/// The boolean algebra of subsets of `{0, .., k-1}`; element `s` is the
/// set of positions of the 1 bits of `s`.
pub fn powerset(k: usize) -> FiniteStructure {
    assert!(k < 16, "powerset algebra too large");
    let n = 1usize << k;
    let full = n - 1;
    FiniteStructure::from_fns(
        &format!("2^{k}"),
        Signature::boolean_algebra(),
        n,
        |f, a| match f {
            "meet" => a[0] & a[1],
            "join" => a[0] | a[1],
            _ => full & !a[0],
        },
        |c| if c == "1" { full } else { 0 },
        |_, _| false,
    )
    .expect("powerset tables are in range")
}

/// Element `e` of the product stands for the coordinates of its
/// little-endian mixed-radix expansion (factor 0 varies fastest).
pub fn product_coords(sizes: &[usize], mut e: usize) -> Vec<usize> {
    sizes
        .iter()
        .map(|&n| {
            let c = e % n;
            e /= n;
            c
        })
        .collect()
}

pub fn product_index(sizes: &[usize], coords: &[usize]) -> usize {
    coords.iter().zip(sizes).rev().fold(0, |acc, (&c, &n)| acc * n + c)
}

/// Componentwise product; relations hold where they hold in every factor.
pub fn direct_product(factors: &[FiniteStructure]) -> Result<FiniteStructure, StructureError> {
    let first = factors.first().ok_or(StructureError::Empty)?;
    if factors.iter().any(|f| f.sig() != first.sig()) {
        return Err(StructureError::MixedSignatures);
    }
    let sizes: Vec<usize> = factors.iter().map(FiniteStructure::size).collect();
    let total: usize = sizes.iter().product();
    let name: Vec<&str> = factors.iter().map(|f| f.name.as_str()).collect();
    let split = |args: &[usize]| -> Vec<Vec<usize>> { args.iter().map(|&a| product_coords(&sizes, a)).collect() };
    let name: String = name.join(" x ");
    FiniteStructure::from_fns(
        &name,
        first.sig().clone(),
        total,
        |f, args| {
            let parts = split(args);
            let coords: Vec<usize> = factors
                .iter()
                .enumerate()
                .map(|(i, a)| a.apply(f, &parts.iter().map(|p| p[i]).collect::<Vec<_>>()).unwrap())
                .collect();
            product_index(&sizes, &coords)
        },
        |c| product_index(&sizes, &factors.iter().map(|a| a.constant(c).unwrap()).collect::<Vec<_>>()),
        |r, args| {
            let parts = split(args);
            factors
                .iter()
                .enumerate()
                .all(|(i, a)| a.holds(r, &parts.iter().map(|p| p[i]).collect::<Vec<_>>()).unwrap())
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::tuples;

    #[test]
    fn known_irreducibles() {
        assert_eq!(irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(irreducible(2, 4), vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn fields_have_inverses() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = gf(q).unwrap();
            for x in 1..q {
                assert_eq!((0..q).filter(|&y| f.op2("*", x, y) == 1).count(), 1, "F{q}: {x}");
            }
        }
        assert_eq!(gf(6).unwrap_err(), GfError::NotPrimePower(6));
    }

    #[test]
    fn f4_multiplication() {
        // t * t = t + 1
        let f4 = gf(4).unwrap();
        assert_eq!(f4.op2("*", 2, 2), 3);
        assert_eq!(f4.op2("+", 2, 3), 1);
    }

    #[test]
    fn product_tables() {
        let p = direct_product(&[gf(2).unwrap(), gf(3).unwrap()]).unwrap();
        assert_eq!(p.size(), 6);
        let e = product_index(&[2, 3], &[1, 2]);
        assert_eq!(product_coords(&[2, 3], p.op2("*", e, e)), vec![1, 1]);
        assert_eq!(p.constant("1"), Some(product_index(&[2, 3], &[1, 1])));
    }

    #[test]
    fn powerset_lattice_laws() {
        for k in 0..=4 {
            let b = powerset(k);
            let n = b.size();
            let (m, j, c) = (|x, y| b.op2("meet", x, y), |x, y| b.op2("join", x, y), |x| b.apply("compl", &[x]).unwrap());
            let (zero, one) = (b.constant("0").unwrap(), b.constant("1").unwrap());
            for t in tuples(n, 3) {
                let (x, y, z) = (t[0], t[1], t[2]);
                assert_eq!(m(x, y), m(y, x));
                assert_eq!(j(x, y), j(y, x));
                assert_eq!(m(x, m(y, z)), m(m(x, y), z));
                assert_eq!(j(x, j(y, z)), j(j(x, y), z));
                assert_eq!(m(x, j(x, y)), x);
                assert_eq!(j(x, m(x, y)), x);
                assert_eq!(m(x, j(y, z)), j(m(x, y), m(x, z)));
                assert_eq!(j(x, m(y, z)), m(j(x, y), j(x, z)));
                assert_eq!(m(x, c(x)), zero);
                assert_eq!(j(x, c(x)), one);
            }
        }
    }
}
