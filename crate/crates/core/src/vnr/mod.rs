//! Finite commutative rings: idempotents, regularity, stalks and
//! derivations.

mod derivation;
mod ring;

pub use derivation::{
    check_derivation, check_differential_ideals, constants_subring, enumerate_derivations, DerivationReport,
    DerivationTable, IdealReport,
};
pub use ring::{FiniteRing, EXHAUSTIVE_LIMIT};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::semantics::{powerset, product_index, FiniteStructure};
use crate::syntax::Signature;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("tables have the wrong size or out-of-range entries")]
    Tables,
    #[error("{law} fails at {witness:?}")]
    Axiom { law: &'static str, witness: Vec<usize> },
    #[error("structure does not interpret the ring signature")]
    NotRingSignature,
    #[error("ring is not von Neumann regular: {witness} has no quasi-inverse")]
    NotVnr { witness: usize },
    #[error("{0}")]
    Structure(String),
    #[error("derivation table has {found} entries for a ring of order {expected}")]
    DerivationSize { expected: usize, found: usize },
}

/// An ideal as its sorted elements.
pub type Ideal = Vec<usize>;

pub fn idempotents(r: &FiniteRing) -> Vec<usize> {
    r.elements().filter(|&e| r.mul(e, e) == e).collect()
}

/// The boolean algebra of idempotents: meet `ef`, join `e + f - ef`,
/// complement `1 - e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentAlgebra {
    pub elements: Vec<usize>,
    /// Minimal nonzero idempotents.
    pub atoms: Vec<usize>,
}

impl IdempotentAlgebra {
    pub fn meet(r: &FiniteRing, e: usize, f: usize) -> usize {
        r.mul(e, f)
    }

    pub fn join(r: &FiniteRing, e: usize, f: usize) -> usize {
        r.sub(r.add(e, f), r.mul(e, f))
    }

    pub fn complement(r: &FiniteRing, e: usize) -> usize {
        r.sub(r.one(), e)
    }

    /// The algebra as a structure over the boolean algebra signature,
    /// elements numbered in the order of [`IdempotentAlgebra::elements`].
    pub fn to_structure(&self, r: &FiniteRing) -> FiniteStructure {
        let pos: BTreeMap<usize, usize> = self.elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let el = &self.elements;
        FiniteStructure::from_fns(
            "B(R)",
            Signature::boolean_algebra(),
            el.len(),
            |f, a| {
                pos[&match f {
                    "meet" => Self::meet(r, el[a[0]], el[a[1]]),
                    "join" => Self::join(r, el[a[0]], el[a[1]]),
                    _ => Self::complement(r, el[a[0]]),
                }]
            },
            |c| pos[&if c == "1" { r.one() } else { r.zero() }],
            |_, _| false,
        )
        .expect("idempotents are closed under the boolean operations")
    }

    /// Sends each idempotent to the set of atoms below it, as a bitmask
    /// over [`IdempotentAlgebra::atoms`]; checks that this is an
    /// isomorphism onto the powerset algebra.
    pub fn powerset_isomorphism(&self, r: &FiniteRing) -> Option<Vec<usize>> {
        if self.atoms.len() >= 16 {
            return None;
        }
        let map: Vec<usize> = self
            .elements
            .iter()
            .map(|&e| self.atoms.iter().enumerate().filter(|&(_, &a)| r.mul(a, e) == a).map(|(i, _)| 1 << i).sum())
            .collect();
        self.to_structure(r).is_isomorphism(&powerset(self.atoms.len()), &map).then_some(map)
    }
}

pub fn idempotent_algebra(r: &FiniteRing) -> IdempotentAlgebra {
    let elements = idempotents(r);
    let below = |a: usize, e: usize| r.mul(a, e) == a;
    let atoms = elements
        .iter()
        .copied()
        .filter(|&a| a != r.zero() && elements.iter().all(|&e| e == r.zero() || e == a || !below(e, a)))
        .collect();
    IdempotentAlgebra { elements, atoms }
}

/// Elements without a quasi-inverse `y`, `x y x = x`.
pub fn vnr_failures(r: &FiniteRing) -> Vec<usize> {
    r.elements().filter(|&x| !r.elements().any(|y| r.mul(r.mul(x, y), x) == x)).collect()
}

pub fn is_vnr(r: &FiniteRing) -> bool {
    vnr_failures(r).is_empty()
}

/// The ideal generated by `gens`.
pub fn ideal_generated(r: &FiniteRing, gens: &[usize]) -> Ideal {
    let mut set: BTreeSet<usize> = BTreeSet::from([r.zero()]);
    let mut frontier: Vec<usize> = gens.iter().flat_map(|&g| r.elements().map(move |x| (g, x))).map(|(g, x)| r.mul(g, x)).collect();
    while let Some(a) = frontier.pop() {
        if set.insert(a) {
            frontier.extend(set.iter().map(|&b| r.add(a, b)));
        }
    }
    set.into_iter().collect()
}

/// Every ideal, ordered by size and then elementwise.
pub fn all_ideals(r: &FiniteRing) -> Vec<Ideal> {
    let mut found: BTreeSet<Ideal> = BTreeSet::from([vec![r.zero()]]);
    let mut todo = vec![vec![r.zero()]];
    while let Some(i) = todo.pop() {
        for a in r.elements() {
            if i.binary_search(&a).is_err() {
                let mut gens = i.clone();
                gens.push(a);
                let j = ideal_generated(r, &gens);
                if found.insert(j.clone()) {
                    todo.push(j);
                }
            }
        }
    }
    let mut out: Vec<Ideal> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Maximal ideals by exhaustive search.
pub fn maximal_ideals_exhaustive(r: &FiniteRing) -> Vec<Ideal> {
    let ideals = all_ideals(r);
    let proper: Vec<&Ideal> = ideals.iter().filter(|i| i.len() < r.size()).collect();
    proper
        .iter()
        .filter(|i| !proper.iter().any(|j| j.len() > i.len() && is_subset(i, j)))
        .map(|i| (*i).clone())
        .collect()
}

/// Maximal ideals: `(1 - a)R` for the atoms `a` of the idempotents when
/// `r` is regular, exhaustive search otherwise.
pub fn maximal_ideals(r: &FiniteRing) -> Vec<Ideal> {
    if is_vnr(r) {
        idempotent_algebra(r)
            .atoms
            .iter()
            .map(|&a| ideal_generated(r, &[IdempotentAlgebra::complement(r, a)]))
            .collect()
    } else {
        maximal_ideals_exhaustive(r)
    }
}

/// `R/I` with cosets numbered by their least element, and the projection.
pub fn quotient(r: &FiniteRing, ideal: &[usize]) -> Result<(FiniteRing, Vec<usize>), RingError> {
    let mut proj = vec![usize::MAX; r.size()];
    let mut reps = Vec::new();
    for x in r.elements() {
        if proj[x] != usize::MAX {
            continue;
        }
        for &m in ideal {
            proj[r.add(x, m)] = reps.len();
        }
        reps.push(x);
    }
    let k = reps.len();
    let table = |op: &dyn Fn(usize, usize) -> usize| -> Vec<usize> {
        (0..k * k).map(|i| proj[op(reps[i / k], reps[i % k])]).collect()
    };
    let add = table(&|a, b| r.add(a, b));
    let mul = table(&|a, b| r.mul(a, b));
    let name = alloc::format!("{}/I", r.name);
    Ok((FiniteRing::new(&name, k, add, mul, proj[r.zero()], proj[r.one()])?, proj))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stalk {
    pub atom: usize,
    /// `(1 - atom)R`
    pub ideal: Ideal,
    pub field: FiniteRing,
    pub is_field: bool,
    /// `R -> R/ideal`
    pub projection: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkDecomposition {
    pub stalks: Vec<Stalk>,
    /// The product of the stalks, numbered as in
    /// [`crate::semantics::direct_product`].
    pub product: FiniteRing,
    /// `R -> product`, `x` to its tuple of projections.
    pub iso: Vec<usize>,
    pub is_isomorphism: bool,
}

impl StalkDecomposition {
    pub fn passed(&self) -> bool {
        self.is_isomorphism && self.stalks.iter().all(|s| s.is_field)
    }
}

/// One stalk `R/(1 - a)R` per atom `a` of the idempotents, and the
/// canonical map into their product.
pub fn decompose_stalks(r: &FiniteRing) -> Result<StalkDecomposition, RingError> {
    if let Some(&witness) = vnr_failures(r).first() {
        return Err(RingError::NotVnr { witness });
    }
    let atoms = idempotent_algebra(r).atoms;
    let mut stalks = Vec::with_capacity(atoms.len());
    for atom in atoms {
        let ideal = ideal_generated(r, &[IdempotentAlgebra::complement(r, atom)]);
        let (field, projection) = quotient(r, &ideal)?;
        stalks.push(Stalk { atom, ideal, is_field: field.is_field(), field, projection });
    }
    let (product, iso) = canonical_map(r, stalks.iter().map(|s| (&s.field, &s.projection)))?;
    let is_isomorphism = r.to_structure().is_isomorphism(&product.to_structure(), &iso);
    Ok(StalkDecomposition { stalks, product, iso, is_isomorphism })
}

fn canonical_map<'a>(
    r: &FiniteRing,
    parts: impl Iterator<Item = (&'a FiniteRing, &'a Vec<usize>)>,
) -> Result<(FiniteRing, Vec<usize>), RingError> {
    let (fields, projs): (Vec<FiniteRing>, Vec<&Vec<usize>>) = parts.map(|(f, p)| (f.clone(), p)).unzip();
    let sizes: Vec<usize> = fields.iter().map(FiniteRing::size).collect();
    let product = FiniteRing::product(&fields)?;
    let iso = r.elements().map(|x| product_index(&sizes, &projs.iter().map(|p| p[x]).collect::<Vec<_>>())).collect();
    Ok((product, iso))
}

/// The Chinese remainder cross-check: every quotient by a maximal ideal
/// (found exhaustively) is a field and the map into their product is a
/// bijection. Agrees with [`is_vnr`] on finite rings.
pub fn crt_check(r: &FiniteRing) -> Result<bool, RingError> {
    let maximal = maximal_ideals_exhaustive(r);
    let mut parts = Vec::with_capacity(maximal.len());
    for m in &maximal {
        let (f, p) = quotient(r, m)?;
        if !f.is_field() {
            return Ok(false);
        }
        parts.push((f, p));
    }
    let (product, iso) = canonical_map(r, parts.iter().map(|(f, p)| (f, p)))?;
    let mut seen = vec![false; product.size()];
    Ok(product.size() == r.size() && iso.iter().all(|&i| !core::mem::replace(&mut seen[i], true)))
}
