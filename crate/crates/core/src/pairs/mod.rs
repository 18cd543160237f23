//! Structures with a distinguished substructure `P`, their products, and
//! finite-scale versions of the dense pair conditions.

mod dense;

pub use dense::{dense_pair_check, format_poly, DenseReport, D1Report, D2Report, D3Report, D4Report, PolyWitness};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::product::{BooleanProduct, CoordSet, Exhaustive, FactorFormula, GammaReport, ProductError};
use crate::semantics::{gf, tuples, Compiled, EvalError, FiniteStructure, StructureError};
use crate::syntax::{relativize, Formula, Signature};

/// The predicate naming the substructure.
pub const PREDICATE: &str = "P";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PairError {
    #[error("structure has no unary relation `{PREDICATE}`")]
    NoPredicate,
    #[error("`{PREDICATE}` is empty at coordinate {0}")]
    EmptyPredicate(usize),
    #[error("`{PREDICATE}` is not closed under `{0}`")]
    NotClosed(String),
    #[error("`{PREDICATE}` must be a proper substructure")]
    NotProper,
    #[error("F{small} is not a subfield of F{big}")]
    NotSubfield { big: usize, small: usize },
    #[error("subset is not closed under `{0}`")]
    NotOperationClosed(String),
    #[error("subset is not subdirect: coordinate {coord} misses element {value}")]
    NotSubdirect { coord: usize, value: usize },
    #[error("malformed formula: {0}")]
    Malformed(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `sig` without the predicate.
pub fn base_signature(sig: &Signature) -> Signature {
    let mut base = sig.clone();
    base.relations.retain(|(r, _)| r != PREDICATE);
    base.dagger.remove(PREDICATE);
    base
}

fn predicate_set(a: &FiniteStructure) -> Result<Vec<usize>, PairError> {
    if a.sig().relation_arity(PREDICATE) != Some(1) {
        return Err(PairError::NoPredicate);
    }
    Ok((0..a.size()).filter(|&e| a.holds(PREDICATE, &[e]).unwrap()).collect())
}

/// A structure whose predicate is a proper substructure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairStructure {
    ambient: FiniteStructure,
    p: Vec<usize>,
}

impl PairStructure {
    pub fn new(ambient: FiniteStructure) -> Result<PairStructure, PairError> {
        let p = predicate_set(&ambient)?;
        if p.is_empty() {
            return Err(PairError::EmptyPredicate(0));
        }
        if let Some(sym) = ambient.reduct(&base_signature(ambient.sig()))?.closure_failure(&p) {
            return Err(PairError::NotClosed(sym));
        }
        if p.len() == ambient.size() {
            return Err(PairError::NotProper);
        }
        Ok(PairStructure { ambient, p })
    }

    /// `(F_big, F_small)` with the predicate the elements fixed by
    /// `x -> x^small`.
    pub fn subfield(big: usize, small: usize) -> Result<PairStructure, PairError> {
        let f = gf(big).map_err(|e| PairError::Malformed(format!("{e}")))?;
        let pow = |x: usize| (1..small).fold(x, |acc, _| f.op2("*", acc, x));
        let fixed: Vec<usize> = (0..big).filter(|&x| pow(x) == x).collect();
        if small < 2 || fixed.len() != small {
            return Err(PairError::NotSubfield { big, small });
        }
        let ambient =
            f.with_unary_relation(PREDICATE, |x| fixed.contains(&x))?.with_name(&format!("(F{big},F{small})"));
        PairStructure::new(ambient)
    }

    pub fn ambient(&self) -> &FiniteStructure {
        &self.ambient
    }

    pub fn p_elements(&self) -> &[usize] {
        &self.p
    }
}

pub fn pair_product(pairs: &[PairStructure]) -> Result<BooleanProduct, PairError> {
    Ok(BooleanProduct::full(pairs.iter().map(|p| p.ambient.clone()).collect())?)
}

/// The product of the predicate parts, as structures over the signature
/// without the predicate.
#[derive(Clone, Debug)]
pub struct PPart {
    pub product: BooleanProduct,
    /// Carrier index in `product` to carrier index in the ambient product.
    pub embedding: Vec<usize>,
    pub gamma: GammaReport,
}

/// `D = {a : P(a(x)) for every x}` of a full product.
pub fn p_part(a: &BooleanProduct) -> Result<PPart, PairError> {
    if !a.is_full() {
        return Err(PairError::Product(ProductError::NotClosed("carrier is not full".into())));
    }
    let base = base_signature(a.sig());
    let mut fibers = Vec::with_capacity(a.width());
    let mut embs = Vec::with_capacity(a.width());
    for (x, factor) in a.factors().iter().enumerate() {
        let p = predicate_set(factor)?;
        if p.is_empty() {
            return Err(PairError::EmptyPredicate(x));
        }
        let reduct = factor.reduct(&base)?;
        let (d, emb) = reduct.induced(&p).map_err(|e| match e {
            StructureError::NotClosed(sym) => PairError::NotClosed(sym),
            e => e.into(),
        })?;
        fibers.push(d.with_name(&format!("P({})", factor.name)));
        embs.push(emb);
    }
    let product = BooleanProduct::full(fibers)?;
    let embedding = (0..product.len())
        .map(|e| {
            let coords: Vec<usize> = product.coords(e).iter().zip(&embs).map(|(&c, emb)| emb[c]).collect();
            a.element(&coords).expect("full product contains every coordinate vector")
        })
        .collect();
    let gamma = product.check_gamma_properties(&[])?;
    Ok(PPart { product, embedding, gamma })
}

/// `[phi(f)]` over the predicate part against `[phi^P(f)]` over the
/// ambient product, for every corpus formula and tuple from the predicate
/// part. Failures are the formula index and the tuple's coordinates.
pub fn relativization_check(
    a: &BooleanProduct,
    pp: &PPart,
    corpus: &[Formula],
) -> Result<Exhaustive<(usize, Vec<Vec<usize>>)>, PairError> {
    let mut out = Exhaustive { checked: 0, failures: Vec::new() };
    for (k, phi) in corpus.iter().enumerate() {
        let rel = relativize(phi, PREDICATE, a.sig()).map_err(|e| PairError::Malformed(format!("{e}")))?;
        let vars = phi.free_vars();
        let inner = FactorFormula::new(&pp.product, phi, &vars)?;
        let outer = FactorFormula::new(a, &rel, &vars)?;
        for t in tuples(pp.product.len(), vars.len()) {
            let lifted: Vec<usize> = t.iter().map(|&e| pp.embedding[e]).collect();
            out.checked += 1;
            if inner.truth_set(&pp.product, &t) != outer.truth_set(a, &lifted) {
                out.failures.push((k, lifted.iter().map(|&e| a.coords(e).to_vec()).collect()));
            }
        }
    }
    Ok(out)
}

/// The fibers `D_x = {d(x) : d in D}` of a subset of a product.
#[derive(Clone, Debug)]
pub struct Fibers {
    /// Each fiber as a substructure of its factor, with its embedding.
    pub fibers: Vec<(FiniteStructure, Vec<usize>)>,
    /// Whether `D` is the whole product of its fibers.
    pub is_box: bool,
}

/// `d` lists carrier indices of `a` and must be closed under its
/// operations.
pub fn fiber_substructures(a: &BooleanProduct, d: &[usize]) -> Result<Fibers, PairError> {
    if let Some(&e) = d.iter().find(|&&e| e >= a.len()) {
        return Err(ProductError::BadElement(alloc::vec![e]).into());
    }
    if d.is_empty() {
        return Err(StructureError::Empty.into());
    }
    if let Some(sym) = a.structure().closure_failure(d) {
        return Err(PairError::NotOperationClosed(sym));
    }
    let mut fibers = Vec::with_capacity(a.width());
    for (x, factor) in a.factors().iter().enumerate() {
        let values: BTreeSet<usize> = d.iter().map(|&e| a.coords(e)[x]).collect();
        let values: Vec<usize> = values.into_iter().collect();
        fibers.push(factor.induced(&values)?);
    }
    let distinct: BTreeSet<usize> = d.iter().copied().collect();
    let is_box = distinct.len() == fibers.iter().map(|(f, _)| f.size()).product::<usize>();
    Ok(Fibers { fibers, is_box })
}

/// Whether `d` meets every element of the claimed fibers.
pub fn check_subdirect(a: &BooleanProduct, d: &[usize], claimed: &[Vec<usize>]) -> Result<(), PairError> {
    for (x, values) in claimed.iter().enumerate() {
        for &v in values {
            if !d.iter().any(|&e| a.coords(e)[x] == v) {
                return Err(PairError::NotSubdirect { coord: x, value: v });
            }
        }
    }
    Ok(())
}

/// A subalgebra of the powerset of the index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetAlgebra {
    pub generators: Vec<CoordSet>,
    pub elements: Vec<CoordSet>,
    pub atoms: Vec<CoordSet>,
}

impl SetAlgebra {
    pub fn generated(width: usize, generators: Vec<CoordSet>) -> SetAlgebra {
        let all = CoordSet::full(width);
        let mut elements: BTreeSet<CoordSet> = BTreeSet::from([CoordSet::EMPTY, all]);
        elements.extend(generators.iter().copied());
        loop {
            let cur: Vec<CoordSet> = elements.iter().copied().collect();
            let before = elements.len();
            for &s in &cur {
                elements.insert(s.complement(all));
                for &t in &cur {
                    elements.insert(s.intersect(t));
                }
            }
            if elements.len() == before {
                break;
            }
        }
        let elements: Vec<CoordSet> = elements.into_iter().collect();
        let atoms = elements
            .iter()
            .copied()
            .filter(|s| !s.is_empty() && !elements.iter().any(|t| !t.is_empty() && *t != *s && t.is_subset(*s)))
            .collect();
        SetAlgebra { generators, elements, atoms }
    }

    pub fn contains(&self, s: CoordSet) -> bool {
        self.elements.binary_search(&s).is_ok()
    }
}

/// The algebra generated by `[phi(f)]^D`, computed in the fibers of `d`,
/// for every corpus formula and tuple from `d`.
pub fn pair_boolean_subalgebra(a: &BooleanProduct, d: &[usize], corpus: &[Formula]) -> Result<SetAlgebra, PairError> {
    let fibers = fiber_substructures(a, d)?;
    let mut gens = BTreeSet::new();
    for phi in corpus {
        let vars = phi.free_vars();
        let compiled = fibers
            .fibers
            .iter()
            .map(|(f, _)| Compiled::new(f, phi, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        for t in tuples(d.len(), vars.len()) {
            let s = CoordSet::from_fn(a.width(), |x| {
                let (fiber, emb) = &fibers.fibers[x];
                let values: Vec<usize> =
                    t.iter().map(|&i| emb.iter().position(|&v| v == a.coords(d[i])[x]).unwrap()).collect();
                compiled[x].eval(fiber, &values)
            });
            gens.insert(s);
        }
    }
    Ok(SetAlgebra::generated(a.width(), gens.into_iter().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;
    use alloc::vec;

    fn f4f2() -> PairStructure {
        PairStructure::subfield(4, 2).unwrap()
    }

    #[test]
    fn subfield_pairs() {
        assert_eq!(f4f2().p_elements(), [0, 1]);
        assert_eq!(PairStructure::subfield(9, 3).unwrap().p_elements(), [0, 1, 2]);
        assert_eq!(PairStructure::subfield(8, 4), Err(PairError::NotSubfield { big: 8, small: 4 }));
        assert_eq!(PairStructure::subfield(4, 4), Err(PairError::NotProper));
    }

    #[test]
    fn p_part_of_square() {
        let a = pair_product(&[f4f2(), f4f2()]).unwrap();
        let pp = p_part(&a).unwrap();
        assert_eq!(pp.product.len(), 4);
        assert!(pp.gamma.p2());
        assert_eq!(pp.product.sig(), &Signature::ring());
        let corpus = vec![parse_formula("(exists y (= (* y y) x))", &Signature::ring()).unwrap()];
        assert!(relativization_check(&a, &pp, &corpus).unwrap().passed());
    }

    #[test]
    fn fibers() {
        let f2 = gf(2).unwrap();
        let a = BooleanProduct::full(vec![f2.clone(), f2]).unwrap();
        let diag = [a.element(&[0, 0]).unwrap(), a.element(&[1, 1]).unwrap()];
        let fib = fiber_substructures(&a, &diag).unwrap();
        assert!(fib.fibers.iter().all(|(f, _)| f.size() == 2));
        assert!(!fib.is_box);
        let f4 = gf(4).unwrap();
        let b = BooleanProduct::full(vec![f4.clone(), f4]).unwrap();
        let box_ = [[0, 0], [0, 1], [1, 0], [1, 1]].map(|c| b.element(&c).unwrap());
        assert!(fiber_substructures(&b, &box_).unwrap().is_box);
        assert_eq!(
            check_subdirect(&b, &box_, &[vec![0, 1, 2, 3], vec![0, 1]]),
            Err(PairError::NotSubdirect { coord: 0, value: 2 })
        );
        let bad = [b.element(&[2, 0]).unwrap()];
        assert!(matches!(fiber_substructures(&b, &bad), Err(PairError::NotOperationClosed(_))));
    }

    #[test]
    fn generated_algebras() {
        let s = SetAlgebra::generated(3, vec![CoordSet(0b001)]);
        assert_eq!(s.elements.len(), 4);
        assert_eq!(s.atoms, [CoordSet(0b001), CoordSet(0b110)]);
        let a = pair_product(&[f4f2(), f4f2()]).unwrap();
        let d = p_part(&a).unwrap().embedding;
        let triv = pair_boolean_subalgebra(&a, &d, &[parse_formula("(= x x)", &Signature::ring()).unwrap()]).unwrap();
        assert_eq!(triv.elements, [CoordSet::EMPTY, CoordSet(0b11)]);
        let zero = pair_boolean_subalgebra(&a, &d, &[parse_formula("(= x 0)", &Signature::ring()).unwrap()]).unwrap();
        assert_eq!(zero.elements.len(), 4);
    }
}
