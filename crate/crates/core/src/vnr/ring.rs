use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RingError;
use crate::semantics::{direct_product, gf, tuples, zmod, FiniteStructure};
use crate::syntax::Signature;

/// Rings up to this order have their axioms checked on every triple.
pub const EXHAUSTIVE_LIMIT: usize = 32;
const SAMPLES: usize = 20_000;

/// A finite commutative ring with 1 on `0 .. n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRing {
    pub name: String,
    n: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    zero: usize,
    one: usize,
}

impl FiniteRing {
    /// Checks the commutative ring axioms, on every triple up to
    /// [`EXHAUSTIVE_LIMIT`] elements and on a fixed random sample above.
    pub fn new(
        name: &str,
        n: usize,
        add: Vec<usize>,
        mul: Vec<usize>,
        zero: usize,
        one: usize,
    ) -> Result<FiniteRing, RingError> {
        if n == 0 || add.len() != n * n || mul.len() != n * n || zero >= n || one >= n {
            return Err(RingError::Tables);
        }
        if add.iter().chain(&mul).any(|&v| v >= n) {
            return Err(RingError::Tables);
        }
        let mut neg = vec![usize::MAX; n];
        for a in 0..n {
            neg[a] = (0..n).find(|&b| add[a * n + b] == zero).ok_or(RingError::Axiom { law: "inverse", witness: vec![a] })?;
        }
        let r = FiniteRing { name: name.into(), n, add, mul, neg, zero, one };
        r.check_axioms()?;
        Ok(r)
    }

    fn check_axioms(&self) -> Result<(), RingError> {
        let triple = |t: &[usize]| -> Result<(), RingError> {
            let (a, b, c) = (t[0], t[1], t[2]);
            let fail = |law| Err(RingError::Axiom { law, witness: t.to_vec() });
            if self.add(a, self.add(b, c)) != self.add(self.add(a, b), c) {
                return fail("additive associativity");
            }
            if self.mul(a, self.mul(b, c)) != self.mul(self.mul(a, b), c) {
                return fail("multiplicative associativity");
            }
            if self.add(a, b) != self.add(b, a) {
                return fail("additive commutativity");
            }
            if self.mul(a, b) != self.mul(b, a) {
                return fail("multiplicative commutativity");
            }
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                return fail("distributivity");
            }
            if self.add(a, self.zero) != a {
                return fail("additive identity");
            }
            if self.mul(a, self.one) != a {
                return fail("multiplicative identity");
            }
            Ok(())
        };
        if self.n <= EXHAUSTIVE_LIMIT {
            tuples(self.n, 3).try_for_each(|t| triple(&t))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(self.n as u64);
            (0..SAMPLES).try_for_each(|_| {
                let t: Vec<usize> = (0..3).map(|_| rng.random_range(0..self.n)).collect();
                triple(&t)
            })
        }
    }

    /// Reads the ring operations of a structure over the ring signature.
    pub fn from_structure(a: &FiniteStructure) -> Result<FiniteRing, RingError> {
        if !Signature::ring().is_subsignature_of(a.sig()) {
            return Err(RingError::NotRingSignature);
        }
        let n = a.size();
        let table = |f: &str| -> Vec<usize> { tuples(n, 2).map(|t| a.apply(f, &t).unwrap()).collect() };
        let r = FiniteRing::new(&a.name, n, table("+"), table("*"), a.constant("0").unwrap(), a.constant("1").unwrap())?;
        if (0..n).any(|x| (0..n).any(|y| a.op2("-", x, y) != r.sub(x, y))) {
            return Err(RingError::Axiom { law: "subtraction", witness: Vec::new() });
        }
        Ok(r)
    }

    pub fn to_structure(&self) -> FiniteStructure {
        FiniteStructure::from_fns(
            &self.name,
            Signature::ring(),
            self.n,
            |f, a| match f {
                "+" => self.add(a[0], a[1]),
                "-" => self.sub(a[0], a[1]),
                _ => self.mul(a[0], a[1]),
            },
            |c| if c == "1" { self.one } else { self.zero },
            |_, _| false,
        )
        .expect("ring tables are in range")
    }

    pub fn zmod(n: usize) -> FiniteRing {
        FiniteRing::from_structure(&zmod(n)).expect("Z/n is a ring")
    }

    pub fn gf(q: usize) -> Result<FiniteRing, RingError> {
        let f = gf(q).map_err(|e| RingError::Structure(format!("{e}")))?;
        FiniteRing::from_structure(&f)
    }

    /// `F_p[e]/(e^2)`; element `a + p b` stands for `a + b e`.
    pub fn dual_numbers(p: usize) -> Result<FiniteRing, RingError> {
        let f = FiniteRing::gf(p)?;
        if f.n != p || p > 16 {
            return Err(RingError::Structure(format!("dual numbers need a prime below 17, got {p}")));
        }
        let n = p * p;
        let split = |x: usize| (x % p, x / p);
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let ((a, b), (c, d)) = (split(x), split(y));
                add[x * n + y] = (a + c) % p + p * ((b + d) % p);
                mul[x * n + y] = a * c % p + p * ((a * d + b * c) % p);
            }
        }
        FiniteRing::new(&format!("F{p}[e]"), n, add, mul, 0, 1)
    }

    /// Componentwise product; elements are numbered as in
    /// [`crate::semantics::direct_product`].
    pub fn product(factors: &[FiniteRing]) -> Result<FiniteRing, RingError> {
        let structures: Vec<FiniteStructure> = factors.iter().map(FiniteRing::to_structure).collect();
        let p = direct_product(&structures).map_err(|e| RingError::Structure(format!("{e}")))?;
        FiniteRing::from_structure(&p)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b])
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.n
    }

    pub fn is_unit(&self, a: usize) -> bool {
        (0..self.n).any(|b| self.mul(a, b) == self.one)
    }

    /// A finite ring is a field iff it is a nonzero domain; the unit count
    /// is compared as well.
    pub fn is_field(&self) -> bool {
        self.n >= 2
            && (0..self.n).all(|a| a == self.zero || (0..self.n).all(|b| b == self.zero || self.mul(a, b) != self.zero))
            && (0..self.n).filter(|&a| self.is_unit(a)).count() == self.n - 1
    }

    /// The subring on `elements`, if closed, relabelled in the given order.
    pub fn subring(&self, elements: &[usize]) -> Result<FiniteRing, RingError> {
        let (sub, _) = self.to_structure().induced(elements).map_err(|e| RingError::Structure(format!("{e}")))?;
        FiniteRing::from_structure(&sub)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_rings() {
        assert_eq!(FiniteRing::zmod(6).size(), 6);
        assert!(FiniteRing::gf(4).unwrap().is_field());
        assert!(!FiniteRing::zmod(4).is_field());
        let d = FiniteRing::dual_numbers(2).unwrap();
        assert_eq!(d.mul(2, 2), 0);
        assert_eq!(d.mul(3, 3), 1);
        assert!(FiniteRing::zmod(35).size() > EXHAUSTIVE_LIMIT);
    }

    #[test]
    fn rejects_bad_tables() {
        // (a + b) with a * b = 1 for all a, b fails distributivity
        let add = vec![0, 1, 1, 0];
        let mul = vec![1, 1, 1, 1];
        assert!(matches!(FiniteRing::new("bad", 2, add, mul, 0, 1), Err(RingError::Axiom { .. })));
        assert_eq!(FiniteRing::new("short", 2, vec![0], vec![0], 0, 1), Err(RingError::Tables));
    }

    #[test]
    fn product_of_rings() {
        let r = FiniteRing::product(&[FiniteRing::zmod(2), FiniteRing::zmod(3)]).unwrap();
        assert_eq!(r.size(), 6);
        assert_eq!(r.one(), 3);
    }
}
