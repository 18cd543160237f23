//! Finite structures and a brute-force model checker.
//!
//! Elements are the integers `0..size`. Function tables are stored in the
//! order of the signature's function list, indexed row-major by argument
//! tuple.

mod builtin;
mod eval;

pub use builtin::{direct_product, gf, irreducible, powerset, product_coords, product_index, zmod, GfError};
pub use eval::{definable_set, eval_formula, eval_sentence, Assignment, Compiled, EvalError};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::syntax::{Formula, Signature};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("universe must be nonempty")]
    Empty,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("value {value} out of range for a universe of size {size}")]
    OutOfRange { value: usize, size: usize },
    #[error("table for `{0}` is incomplete")]
    Incomplete(String),
    #[error("conflicting entries for `{0}`")]
    Conflict(String),
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("subset is not closed under `{0}`")]
    NotClosed(String),
    #[error("factors have different signatures")]
    MixedSignatures,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    pub name: String,
    sig: Signature,
    size: usize,
    funcs: Vec<Vec<usize>>,
    consts: Vec<usize>,
    rels: Vec<Vec<bool>>,
}

/// Row-major index of an argument tuple.
pub(crate) fn tuple_index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// All `k`-tuples over `0..n` in lexicographic order.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if n == 0 && k > 0 { 0 } else { n.pow(k as u32) };
    (0..total).map(move |mut i| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        t
    })
}

/// Relation complement violation: `holds` is the value of the relation,
/// which should differ from the value of its complement definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaggerViolation {
    pub relation: String,
    pub args: Vec<usize>,
    pub holds: bool,
}

impl FiniteStructure {
    /// Builds every table from callbacks. The signature is validated and
    /// every value range-checked.
    pub fn from_fns(
        name: &str,
        sig: Signature,
        size: usize,
        mut fun: impl FnMut(&str, &[usize]) -> usize,
        mut cons: impl FnMut(&str) -> usize,
        mut rel: impl FnMut(&str, &[usize]) -> bool,
    ) -> Result<FiniteStructure, StructureError> {
        if size == 0 {
            return Err(StructureError::Empty);
        }
        sig.validate().map_err(|e| StructureError::Signature(e.to_string()))?;
        let check = |v: usize| if v < size { Ok(v) } else { Err(StructureError::OutOfRange { value: v, size }) };
        let mut funcs = Vec::with_capacity(sig.functions.len());
        for (f, arity) in &sig.functions {
            let table = tuples(size, *arity).map(|args| check(fun(f, &args))).collect::<Result<Vec<_>, _>>()?;
            funcs.push(table);
        }
        let consts = sig.constants.iter().map(|c| check(cons(c))).collect::<Result<Vec<_>, _>>()?;
        let rels = sig.relations.iter().map(|(r, arity)| tuples(size, *arity).map(|args| rel(r, &args)).collect()).collect();
        Ok(FiniteStructure { name: name.into(), sig, size, funcs, consts, rels })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn with_name(mut self, name: &str) -> FiniteStructure {
        self.name = name.into();
        self
    }

    pub fn apply(&self, sym: &str, args: &[usize]) -> Option<usize> {
        let i = self.sig.function_index(sym)?;
        (self.sig.functions[i].1 == args.len()).then(|| self.apply_index(i, args))
    }

    pub(crate) fn apply_index(&self, fi: usize, args: &[usize]) -> usize {
        self.funcs[fi][tuple_index(self.size, args)]
    }

    pub(crate) fn table(&self, fi: usize) -> &[usize] {
        &self.funcs[fi]
    }

    pub(crate) fn relation_table(&self, ri: usize) -> &[bool] {
        &self.rels[ri]
    }

    pub fn constant(&self, sym: &str) -> Option<usize> {
        self.sig.constant_index(sym).map(|i| self.consts[i])
    }

    pub fn holds(&self, rel: &str, args: &[usize]) -> Option<bool> {
        let i = self.sig.relation_index(rel)?;
        (self.sig.relations[i].1 == args.len()).then(|| self.rels[i][tuple_index(self.size, args)])
    }

    /// Binary operation shorthand; panics if `sym` is not a binary function.
    pub fn op2(&self, sym: &str, a: usize, b: usize) -> usize {
        self.apply(sym, &[a, b]).expect("binary function symbol")
    }

    /// Adds or replaces symbols. `fun` and `rel` are consulted only for
    /// symbols of `sig` missing from `self`.
    pub fn expand(
        &self,
        sig: Signature,
        mut fun: impl FnMut(&str, &[usize]) -> usize,
        mut cons: impl FnMut(&str) -> usize,
        mut rel: impl FnMut(&str, &[usize]) -> bool,
    ) -> Result<FiniteStructure, StructureError> {
        let name = self.name.clone();
        FiniteStructure::from_fns(
            &name,
            sig,
            self.size,
            |f, args| self.apply(f, args).unwrap_or_else(|| fun(f, args)),
            |c| self.constant(c).unwrap_or_else(|| cons(c)),
            |r, args| self.holds(r, args).unwrap_or_else(|| rel(r, args)),
        )
    }

    /// Expansion by the projector `p(a, b) = a` if `b = 0`, else `0`.
    pub fn with_projector(&self) -> Result<FiniteStructure, StructureError> {
        let zero = self.constant("0").ok_or_else(|| StructureError::UnknownSymbol("0".into()))?;
        let mut sig = self.sig.clone().with_function(crate::syntax::PROJECTOR, 2);
        sig.name = alloc::format!("{}_p", self.sig.name);
        self.expand(sig, |_, args| if args[1] == zero { args[0] } else { zero }, |_| 0, |_, _| false)
    }

    /// Expansion by a unary relation.
    pub fn with_unary_relation(&self, sym: &str, pred: impl Fn(usize) -> bool) -> Result<FiniteStructure, StructureError> {
        let sig = self.sig.clone().with_relation(sym, 1);
        self.expand(sig, |_, _| 0, |_| 0, |_, args| pred(args[0]))
    }

    /// Forgets every symbol not in `sig`.
    pub fn reduct(&self, sig: &Signature) -> Result<FiniteStructure, StructureError> {
        if !sig.is_subsignature_of(&self.sig) {
            return Err(StructureError::Signature("not a subsignature".into()));
        }
        self.expand(sig.clone(), |_, _| 0, |_| 0, |_, _| false)
    }

    /// Whether `elements` contains the constants and is closed under every
    /// function; returns the first offending symbol otherwise.
    pub fn closure_failure(&self, elements: &[usize]) -> Option<String> {
        let mut member = vec![false; self.size];
        elements.iter().for_each(|&e| member[e] = true);
        for (i, c) in self.sig.constants.iter().enumerate() {
            if !member[self.consts[i]] {
                return Some(c.clone());
            }
        }
        for (fi, (f, arity)) in self.sig.functions.iter().enumerate() {
            let k = elements.len();
            for pick in tuples(k, *arity) {
                let args: Vec<usize> = pick.iter().map(|&j| elements[j]).collect();
                if !member[self.apply_index(fi, &args)] {
                    return Some(f.clone());
                }
            }
        }
        None
    }

    /// The substructure on `elements` (which must be closed), relabelled
    /// densely in the given order. Also returns the embedding.
    pub fn induced(&self, elements: &[usize]) -> Result<(FiniteStructure, Vec<usize>), StructureError> {
        if elements.is_empty() {
            return Err(StructureError::Empty);
        }
        if let Some(f) = self.closure_failure(elements) {
            return Err(StructureError::NotClosed(f));
        }
        let mut back = BTreeMap::new();
        for (i, &e) in elements.iter().enumerate() {
            if back.insert(e, i).is_some() {
                return Err(StructureError::Conflict(alloc::format!("element {e} listed twice")));
            }
        }
        let emb = elements.to_vec();
        let lift = |args: &[usize]| -> Vec<usize> { args.iter().map(|&a| emb[a]).collect() };
        let sub = FiniteStructure::from_fns(
            &self.name,
            self.sig.clone(),
            elements.len(),
            |f, args| back[&self.apply(f, &lift(args)).unwrap()],
            |c| back[&self.constant(c).unwrap()],
            |r, args| self.holds(r, &lift(args)).unwrap(),
        )?;
        Ok((sub, emb))
    }

    /// Checks each complement definition of the signature against the
    /// relation tables.
    pub fn check_dagger(&self) -> Vec<DaggerViolation> {
        let mut out = Vec::new();
        for (r, def) in &self.sig.dagger {
            let arity = self.sig.relation_arity(r).unwrap();
            let params = Signature::dagger_params(arity);
            let compiled = Compiled::new(self, def, &params).expect("complement definitions type-check");
            for args in tuples(self.size, arity) {
                let holds = self.holds(r, &args).unwrap();
                if compiled.eval(self, &args) == holds {
                    out.push(DaggerViolation { relation: r.clone(), args, holds });
                }
            }
        }
        out
    }

    /// Whether `map` is an isomorphism from `self` onto `other` (same
    /// symbols required).
    pub fn is_isomorphism(&self, other: &FiniteStructure, map: &[usize]) -> bool {
        if self.size != other.size || map.len() != self.size || !self.sig.same_symbols(&other.sig) {
            return false;
        }
        let mut seen = vec![false; other.size];
        for &m in map {
            if m >= other.size || core::mem::replace(&mut seen[m], true) {
                return false;
            }
        }
        let img = |args: &[usize]| -> Vec<usize> { args.iter().map(|&a| map[a]).collect() };
        self.sig.constants.iter().all(|c| map[self.constant(c).unwrap()] == other.constant(c).unwrap())
            && self.sig.functions.iter().all(|(f, k)| {
                tuples(self.size, *k).all(|args| map[self.apply(f, &args).unwrap()] == other.apply(f, &img(&args)).unwrap())
            })
            && self.sig.relations.iter().all(|(r, k)| {
                tuples(self.size, *k).all(|args| self.holds(r, &args) == other.holds(r, &img(&args)))
            })
    }

    /// Whether `f` (a sentence) holds.
    pub fn satisfies(&self, f: &Formula) -> Result<bool, EvalError> {
        eval_sentence(self, f)
    }
}

/// Incremental construction from explicit table entries, as read from
/// structure files.
#[derive(Clone, Debug)]
pub struct StructureBuilder {
    name: String,
    sig: Signature,
    size: usize,
    funcs: Vec<Vec<Option<usize>>>,
    consts: Vec<Option<usize>>,
    rels: Vec<Vec<bool>>,
}

impl StructureBuilder {
    pub fn new(name: &str, sig: Signature, size: usize) -> Result<StructureBuilder, StructureError> {
        if size == 0 {
            return Err(StructureError::Empty);
        }
        sig.validate().map_err(|e| StructureError::Signature(e.to_string()))?;
        let funcs = sig.functions.iter().map(|(_, k)| vec![None; size.pow(*k as u32)]).collect();
        let consts = vec![None; sig.constants.len()];
        let rels = sig.relations.iter().map(|(_, k)| vec![false; size.pow(*k as u32)]).collect();
        Ok(StructureBuilder { name: name.into(), sig, size, funcs, consts, rels })
    }

    fn check(&self, v: usize) -> Result<(), StructureError> {
        if v < self.size {
            Ok(())
        } else {
            Err(StructureError::OutOfRange { value: v, size: self.size })
        }
    }

    pub fn set_function(&mut self, sym: &str, args: &[usize], value: usize) -> Result<(), StructureError> {
        let fi = self.sig.function_index(sym).ok_or_else(|| StructureError::UnknownSymbol(sym.into()))?;
        let arity = self.sig.functions[fi].1;
        if arity != args.len() {
            return Err(StructureError::Arity { symbol: sym.into(), expected: arity, found: args.len() });
        }
        args.iter().chain([&value]).try_for_each(|&v| self.check(v))?;
        let slot = &mut self.funcs[fi][tuple_index(self.size, args)];
        match slot {
            Some(old) if *old != value => Err(StructureError::Conflict(sym.into())),
            _ => {
                *slot = Some(value);
                Ok(())
            }
        }
    }

    pub fn set_constant(&mut self, sym: &str, value: usize) -> Result<(), StructureError> {
        let ci = self.sig.constant_index(sym).ok_or_else(|| StructureError::UnknownSymbol(sym.into()))?;
        self.check(value)?;
        match self.consts[ci] {
            Some(old) if old != value => Err(StructureError::Conflict(sym.into())),
            _ => {
                self.consts[ci] = Some(value);
                Ok(())
            }
        }
    }

    pub fn add_tuple(&mut self, sym: &str, args: &[usize]) -> Result<(), StructureError> {
        let ri = self.sig.relation_index(sym).ok_or_else(|| StructureError::UnknownSymbol(sym.into()))?;
        let arity = self.sig.relations[ri].1;
        if arity != args.len() {
            return Err(StructureError::Arity { symbol: sym.into(), expected: arity, found: args.len() });
        }
        args.iter().try_for_each(|&v| self.check(v))?;
        self.rels[ri][tuple_index(self.size, args)] = true;
        Ok(())
    }

    pub fn build(self) -> Result<FiniteStructure, StructureError> {
        let mut funcs = Vec::with_capacity(self.funcs.len());
        for (table, (f, _)) in self.funcs.into_iter().zip(&self.sig.functions) {
            funcs.push(table.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| StructureError::Incomplete(f.clone()))?);
        }
        let consts = self
            .consts
            .iter()
            .zip(&self.sig.constants)
            .map(|(v, c)| v.ok_or_else(|| StructureError::Incomplete(c.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FiniteStructure { name: self.name, sig: self.sig, size: self.size, funcs, consts, rels: self.rels })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_are_lexicographic() {
        let all: Vec<_> = tuples(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0).count(), 1);
    }

    #[test]
    fn builder_requires_total_tables() {
        let sig = Signature::new("s").with_function("f", 1).with_constant("c");
        let mut b = StructureBuilder::new("t", sig, 2).unwrap();
        b.set_function("f", &[0], 1).unwrap();
        b.set_constant("c", 0).unwrap();
        assert_eq!(b.clone().build().unwrap_err(), StructureError::Incomplete("f".into()));
        assert_eq!(b.set_function("f", &[0], 0), Err(StructureError::Conflict("f".into())));
        assert_eq!(b.set_function("f", &[1], 2), Err(StructureError::OutOfRange { value: 2, size: 2 }));
        b.set_function("f", &[1], 0).unwrap();
        let s = b.build().unwrap();
        assert_eq!(s.apply("f", &[1]), Some(0));
    }

    #[test]
    fn induced_substructure() {
        let z6 = zmod(6);
        assert_eq!(z6.induced(&[0, 3]).unwrap_err(), StructureError::NotClosed("1".into()));
        assert_eq!(z6.closure_failure(&[0, 2, 4]), Some("1".into()));
        let f4 = gf(4).unwrap();
        let (f2, emb) = f4.induced(&[0, 1]).unwrap();
        assert_eq!(emb, vec![0, 1]);
        assert!(f2.is_isomorphism(&gf(2).unwrap(), &[0, 1]));
    }
}
