//! Finite boolean products.
//!
//! With a finite index set every subset is clopen, so a boolean product is
//! a subdirect product given by its carrier: either every choice function
//! (`Carrier::Full`) or an explicit list of coordinate vectors.

mod coordset;

pub use coordset::CoordSet;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::semantics::{
    direct_product, product_coords, product_index, tuples, Compiled, EvalError, FiniteStructure, StructureError,
};
use crate::syntax::{parse_formula, Formula, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    Full,
    Elements(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProductError {
    #[error("a product needs at least one factor")]
    NoFactors,
    #[error("at most {max} factors are supported, found {found}")]
    TooManyFactors { max: usize, found: usize },
    #[error("element {0:?} has the wrong length or an out-of-range coordinate")]
    BadElement(Vec<usize>),
    #[error("element {0:?} is not in the carrier")]
    NotInCarrier(Vec<usize>),
    #[error("carrier is not closed under `{0}`")]
    NotClosed(String),
    #[error("carrier is not subdirect: coordinate {coord} misses factor element {value}")]
    NotSubdirect { coord: usize, value: usize },
    #[error("no patch witness in the carrier")]
    NoPatchWitness,
    #[error("factors lack the symbols `{0}`")]
    MissingSymbols(String),
    #[error("carrier is not closed under the projector")]
    NotClosedUnderProjector,
    #[error("expected {expected} tuple entries, found {found}")]
    TupleLength { expected: usize, found: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Largest supported index set.
pub const MAX_FACTORS: usize = 64;

#[derive(Clone, Debug)]
pub struct BooleanProduct {
    factors: Vec<FiniteStructure>,
    carrier: Carrier,
    structure: FiniteStructure,
    coords: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
}

/// A patchwork failure: no carrier element agrees with `f` on `u` and with
/// `g` off `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchWitness {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub u: CoordSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaReport {
    /// Atomic truth sets computed; each is clopen at finite scale.
    pub p1_checked: usize,
    pub p2_checked: usize,
    pub p2_failures: Vec<PatchWitness>,
    /// Truth sets of corpus formulas computed.
    pub p3_checked: usize,
}

impl GammaReport {
    pub fn p1(&self) -> bool {
        true
    }

    pub fn p2(&self) -> bool {
        self.p2_failures.is_empty()
    }

    pub fn p3(&self) -> bool {
        true
    }
}

/// Outcome of an exhaustive check: the number of cases and the failing ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exhaustive<W> {
    pub checked: usize,
    pub failures: Vec<W>,
}

impl<W> Exhaustive<W> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The right-hand side of the existential definition of `c = p(a, b)` in
/// boolean products of domains.
pub const PROJECTOR_DEFINITION: &str =
    "(exists d (and (= (* (* b d) b) b) (= (* b c) 0) (= (* (- c a) (- 1 (* b d))) 0)))";

impl BooleanProduct {
    pub fn full(factors: Vec<FiniteStructure>) -> Result<BooleanProduct, ProductError> {
        Self::check_factors(&factors)?;
        let structure = direct_product(&factors)?;
        let sizes: Vec<usize> = factors.iter().map(FiniteStructure::size).collect();
        let coords: Vec<Vec<usize>> = (0..structure.size()).map(|e| product_coords(&sizes, e)).collect();
        let index = coords.iter().cloned().zip(0..).collect();
        Ok(BooleanProduct { factors, carrier: Carrier::Full, structure, coords, index })
    }

    /// A subdirect product with an explicit carrier, which must be closed
    /// under the operations and hit every factor element.
    pub fn with_carrier(factors: Vec<FiniteStructure>, elements: Vec<Vec<usize>>) -> Result<BooleanProduct, ProductError> {
        Self::check_factors(&factors)?;
        let sizes: Vec<usize> = factors.iter().map(FiniteStructure::size).collect();
        let mut seen = BTreeMap::new();
        for e in &elements {
            if e.len() != sizes.len() || e.iter().zip(&sizes).any(|(&c, &n)| c >= n) {
                return Err(ProductError::BadElement(e.clone()));
            }
            if seen.insert(e.clone(), seen.len()).is_some() {
                return Err(ProductError::BadElement(e.clone()));
            }
        }
        for (i, &n) in sizes.iter().enumerate() {
            for value in 0..n {
                if !elements.iter().any(|e| e[i] == value) {
                    return Err(ProductError::NotSubdirect { coord: i, value });
                }
            }
        }
        let direct = direct_product(&factors)?;
        let picks: Vec<usize> = elements.iter().map(|e| product_index(&sizes, e)).collect();
        let structure = match direct.induced(&picks) {
            Ok((s, _)) => s,
            Err(StructureError::NotClosed(f)) => return Err(ProductError::NotClosed(f)),
            Err(e) => return Err(e.into()),
        };
        Ok(BooleanProduct { factors, carrier: Carrier::Elements(elements.clone()), structure, coords: elements, index: seen })
    }

    fn check_factors(factors: &[FiniteStructure]) -> Result<(), ProductError> {
        if factors.is_empty() {
            return Err(ProductError::NoFactors);
        }
        if factors.len() > MAX_FACTORS {
            return Err(ProductError::TooManyFactors { max: MAX_FACTORS, found: factors.len() });
        }
        if factors.iter().any(|f| f.sig() != factors[0].sig()) {
            return Err(StructureError::MixedSignatures.into());
        }
        Ok(())
    }

    pub fn factors(&self) -> &[FiniteStructure] {
        &self.factors
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn is_full(&self) -> bool {
        self.carrier == Carrier::Full
    }

    pub fn sig(&self) -> &Signature {
        self.factors[0].sig()
    }

    /// Size of the index set `X`.
    pub fn width(&self) -> usize {
        self.factors.len()
    }

    pub fn all_coords(&self) -> CoordSet {
        CoordSet::full(self.width())
    }

    /// The carrier as a structure; element `e` has coordinates
    /// [`BooleanProduct::coords`]`(e)`.
    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self, e: usize) -> &[usize] {
        &self.coords[e]
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.coords
    }

    pub fn element(&self, coords: &[usize]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    /// `[f(tuple)]`, the coordinates where the factor satisfies `f`; the
    /// tuple lists coordinate vectors for the sorted free variables of `f`.
    pub fn truth_set(&self, f: &Formula, tuple: &[Vec<usize>]) -> Result<CoordSet, ProductError> {
        let vars = f.free_vars();
        if vars.len() != tuple.len() {
            return Err(ProductError::TupleLength { expected: vars.len(), found: tuple.len() });
        }
        let elems = tuple
            .iter()
            .map(|t| self.element(t).ok_or_else(|| ProductError::NotInCarrier(t.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FactorFormula::new(self, f, &vars)?.truth_set(self, &elems))
    }

    /// Checks the boolean product properties against `corpus`. At finite
    /// scale (P1) and (P3) only require the truth sets to be computable;
    /// (P2) searches the carrier for every patch.
    pub fn check_gamma_properties(&self, corpus: &[Formula]) -> Result<GammaReport, ProductError> {
        let mut atoms = Vec::new();
        for f in corpus {
            collect_open_atoms(f, &mut atoms);
        }
        let p1_checked = self.count_truth_sets(&atoms)?;
        let p3_checked = self.count_truth_sets(corpus)?;
        let mut p2_checked = 0;
        let mut p2_failures = Vec::new();
        for f in &self.coords {
            for g in &self.coords {
                for u in CoordSet::all_subsets(self.width()) {
                    p2_checked += 1;
                    if self.element(&splice(f, g, u)).is_none() {
                        p2_failures.push(PatchWitness { f: f.clone(), g: g.clone(), u });
                    }
                }
            }
        }
        Ok(GammaReport { p1_checked, p2_checked, p2_failures, p3_checked })
    }

    fn count_truth_sets(&self, fs: &[Formula]) -> Result<usize, ProductError> {
        let mut n = 0;
        for f in fs {
            let vars = f.free_vars();
            let ff = FactorFormula::new(self, f, &vars)?;
            for t in tuples(self.len(), vars.len()) {
                let s = ff.truth_set(self, &t);
                debug_assert!(s.is_subset(self.all_coords()));
                n += 1;
            }
        }
        Ok(n)
    }

    /// The element equal to `f` on `u` and to `g` elsewhere.
    pub fn patch(&self, f: &[usize], g: &[usize], u: CoordSet) -> Result<Vec<usize>, ProductError> {
        for e in [f, g] {
            if self.element(e).is_none() {
                return Err(ProductError::NotInCarrier(e.to_vec()));
            }
        }
        let h = splice(f, g, u);
        if self.element(&h).is_some() {
            Ok(h)
        } else {
            Err(ProductError::NoPatchWitness)
        }
    }

    fn zero_coords(&self) -> Result<Vec<usize>, ProductError> {
        let missing = ["+", "-"].iter().any(|s| self.sig().function_arity(s) != Some(2)) || !self.sig().has_constant("0");
        if missing {
            return Err(ProductError::MissingSymbols("+ - 0".into()));
        }
        Ok(self.factors.iter().map(|a| a.constant("0").unwrap()).collect())
    }

    fn projector_coords(&self, zero: &[usize], a: &[usize], b: &[usize]) -> Vec<usize> {
        (0..self.width()).map(|i| if b[i] == zero[i] { a[i] } else { zero[i] }).collect()
    }

    /// Componentwise `p(a, b)`: `a(x)` where `b(x) = 0`, else `0`.
    pub fn projector_apply(&self, a: &[usize], b: &[usize]) -> Result<Vec<usize>, ProductError> {
        let zero = self.zero_coords()?;
        for e in [a, b] {
            if self.element(e).is_none() {
                return Err(ProductError::NotInCarrier(e.to_vec()));
            }
        }
        let c = self.projector_coords(&zero, a, b);
        if self.element(&c).is_none() {
            return Err(ProductError::NotClosedUnderProjector);
        }
        Ok(c)
    }

    /// Checks, for every triple `(a, b, c)` of the carrier, that the
    /// existential ring formula [`PROJECTOR_DEFINITION`] holds exactly when
    /// `c = p(a, b)`. Failures are the offending triples.
    pub fn projector_definability_check(&self) -> Result<Exhaustive<[Vec<usize>; 3]>, ProductError> {
        let zero = self.zero_coords()?;
        let sig = self.sig();
        if sig.function_arity("*") != Some(2) || !sig.has_constant("1") {
            return Err(ProductError::MissingSymbols("* 1".into()));
        }
        let def = parse_formula(PROJECTOR_DEFINITION, &Signature::ring()).expect("definition parses");
        let vars: Vec<String> = ["a", "b", "c"].iter().map(|s| String::from(*s)).collect();
        let rhs = Compiled::new(&self.structure, &def, &vars)?;
        let n = self.len();
        let mut env = Vec::new();
        let mut out = Exhaustive { checked: 0, failures: Vec::new() };
        for a in 0..n {
            for b in 0..n {
                let p = self.element(&self.projector_coords(&zero, &self.coords[a], &self.coords[b]));
                for c in 0..n {
                    env.clear();
                    env.extend_from_slice(&[a, b, c]);
                    out.checked += 1;
                    if rhs.eval_in(&self.structure, &mut env) != (Some(c) == p) {
                        out.failures.push([self.coords[a].clone(), self.coords[b].clone(), self.coords[c].clone()]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// The three truth-set identities relating the projector to `=`:
    /// `[u=0] | [v=0] = [p(u,v)=u]`, `[u=0] & [v=0] = [p(u,v)+v=0]` and
    /// `[u=0] | [v!=0] = [p(u,v)=0]`, for all `u, v` in the carrier.
    /// Failures are `(identity number, u, v)`.
    pub fn projector_identities_check(&self) -> Result<Exhaustive<(usize, Vec<usize>, Vec<usize>)>, ProductError> {
        let zero = self.zero_coords()?;
        let mut out = Exhaustive { checked: 0, failures: Vec::new() };
        let eq_set = |x: &[usize], y: &[usize]| CoordSet::from_fn(self.width(), |i| x[i] == y[i]);
        for u in &self.coords {
            for v in &self.coords {
                let p = self.projector_coords(&zero, u, v);
                let pv: Vec<usize> = (0..self.width()).map(|i| self.factors[i].op2("+", p[i], v[i])).collect();
                let (u0, v0) = (eq_set(u, &zero), eq_set(v, &zero));
                let all = self.all_coords();
                let checks = [
                    u0.union(v0) == eq_set(&p, u),
                    u0.intersect(v0) == eq_set(&pv, &zero),
                    u0.union(v0.complement(all)) == eq_set(&p, &zero),
                ];
                for (k, ok) in checks.iter().enumerate() {
                    out.checked += 1;
                    if !ok {
                        out.failures.push((k + 1, u.clone(), v.clone()));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The discriminator law as a truth-set identity:
    /// `[p(u-w, u-v) = u-z] = ([u=v] & [w=z]) | ([u!=v] & [u=z])` for all
    /// quadruples of the carrier.
    pub fn discriminator_check(&self) -> Result<Exhaustive<[Vec<usize>; 4]>, ProductError> {
        let zero = self.zero_coords()?;
        let w = self.width();
        let all = self.all_coords();
        let sub = |x: &[usize], y: &[usize]| -> Vec<usize> { (0..w).map(|i| self.factors[i].op2("-", x[i], y[i])).collect() };
        let eq_set = |x: &[usize], y: &[usize]| CoordSet::from_fn(w, |i| x[i] == y[i]);
        let mut out = Exhaustive { checked: 0, failures: Vec::new() };
        let n = self.len();
        for q in tuples(n, 4) {
            let [u, v, wv, z] = [0, 1, 2, 3].map(|k| self.coords[q[k]].as_slice());
            let lhs = eq_set(&self.projector_coords(&zero, &sub(u, wv), &sub(u, v)), &sub(u, z));
            let uv = eq_set(u, v);
            let rhs = uv.intersect(eq_set(wv, z)).union(uv.complement(all).intersect(eq_set(u, z)));
            out.checked += 1;
            if lhs != rhs {
                out.failures.push([u.to_vec(), v.to_vec(), wv.to_vec(), z.to_vec()]);
            }
        }
        Ok(out)
    }
}

fn splice(f: &[usize], g: &[usize], u: CoordSet) -> Vec<usize> {
    (0..f.len()).map(|i| if u.contains(i) { f[i] } else { g[i] }).collect()
}

/// Atomic subformulas without bound variables.
fn collect_open_atoms(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Eq(..) | Formula::Rel(..) => {
            if f.loose_depth() == 0 && !out.contains(f) {
                out.push(f.clone());
            }
        }
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => collect_open_atoms(g, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_open_atoms(g, out)),
        Formula::Imp(a, b) => {
            collect_open_atoms(a, out);
            collect_open_atoms(b, out);
        }
    }
}

/// A formula compiled against every factor, for repeated truth-set
/// computation.
#[derive(Clone, Debug)]
pub struct FactorFormula {
    per_factor: Vec<Compiled>,
}

impl FactorFormula {
    pub fn new(p: &BooleanProduct, f: &Formula, vars: &[String]) -> Result<FactorFormula, EvalError> {
        let per_factor = p.factors.iter().map(|a| Compiled::new(a, f, vars)).collect::<Result<_, _>>()?;
        Ok(FactorFormula { per_factor })
    }

    /// Truth set for carrier elements `tuple` (indices into the carrier).
    pub fn truth_set(&self, p: &BooleanProduct, tuple: &[usize]) -> CoordSet {
        let mut env = Vec::with_capacity(tuple.len());
        let mut out = CoordSet::EMPTY;
        for (i, (c, a)) in self.per_factor.iter().zip(&p.factors).enumerate() {
            env.clear();
            env.extend(tuple.iter().map(|&e| p.coords[e][i]));
            if c.eval_in(a, &mut env) {
                out.insert(i);
            }
        }
        out
    }

    /// Truth value at coordinate `i` of raw factor values.
    pub fn holds_at(&self, p: &BooleanProduct, i: usize, values: &[usize]) -> bool {
        self.per_factor[i].eval(&p.factors[i], values)
    }
}
