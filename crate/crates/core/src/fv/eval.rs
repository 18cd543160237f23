use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use super::{fv_compile_with, DeterminingSequence, Family, FvConfig, FvError, Psi};
use crate::product::{BooleanProduct, CoordSet};
use crate::semantics::{tuples, Compiled};
use crate::syntax::Formula;

enum Node {
    Plain(usize),
    Type { family: usize, mask: u64 },
}

/// A determining sequence prepared for repeated evaluation on one product.
pub struct FvEvaluator<'a> {
    p: &'a BooleanProduct,
    ds: &'a DeterminingSequence,
    /// Per plain factor formula, one compiled copy per factor.
    plain: Vec<Vec<Compiled>>,
    families: Vec<Vec<Node>>,
    top: Vec<Node>,
    /// Per factor, top-level truth values by coordinate assignment.
    memo: Vec<RefCell<Vec<Option<Vec<bool>>>>>,
}

const MEMO_LIMIT: usize = 1 << 16;

type Realized = BTreeMap<usize, BTreeSet<u64>>;

impl<'a> FvEvaluator<'a> {
    pub fn new(p: &'a BooleanProduct, ds: &'a DeterminingSequence) -> Result<FvEvaluator<'a>, FvError> {
        if !p.is_full() {
            return Err(FvError::NotFull);
        }
        ds.check()?;
        let memo = p
            .factors()
            .iter()
            .map(|a| {
                let slots = a.size().checked_pow(ds.vars.len() as u32).filter(|&n| n <= MEMO_LIMIT).unwrap_or(0);
                RefCell::new(vec![None; slots])
            })
            .collect();
        let mut ev = FvEvaluator { p, ds, plain: Vec::new(), families: Vec::new(), top: Vec::new(), memo };
        let mut index = BTreeMap::new();
        let top = ds.psis.iter().map(|psi| ev.node(psi, 0, &mut index)).collect::<Result<_, _>>()?;
        ev.top = top;
        Ok(ev)
    }

    fn node(&mut self, psi: &Psi, ctx: usize, index: &mut BTreeMap<*const Family, usize>) -> Result<Node, FvError> {
        Ok(match psi {
            Psi::Plain(f) => {
                let per_factor = self
                    .p
                    .factors()
                    .iter()
                    .map(|a| Compiled::with_context(a, f, &self.ds.vars, ctx))
                    .collect::<Result<_, _>>()?;
                self.plain.push(per_factor);
                Node::Plain(self.plain.len() - 1)
            }
            Psi::Type { family, mask } => {
                let key = alloc::sync::Arc::as_ptr(family);
                let family = match index.get(&key) {
                    Some(&k) => k,
                    None => {
                        let members =
                            family.members.iter().map(|m| self.node(m, ctx + 1, index)).collect::<Result<_, _>>()?;
                        self.families.push(members);
                        index.insert(key, self.families.len() - 1);
                        self.families.len() - 1
                    }
                };
                Node::Type { family, mask: *mask }
            }
        })
    }

    /// Truth of the formula at carrier elements `tuple`, aligned with the
    /// sequence's variables.
    pub fn eval(&self, tuple: &[usize]) -> bool {
        let mut vals = vec![CoordSet::EMPTY; self.top.len()];
        let mut env = Vec::new();
        for x in 0..self.p.width() {
            env.clear();
            env.extend(tuple.iter().map(|&e| self.p.coords(e)[x]));
            let mut memo = self.memo[x].borrow_mut();
            let slot = if memo.is_empty() {
                None
            } else {
                let n = self.p.factors()[x].size();
                Some(env.iter().fold(0, |acc, &v| acc * n + v))
            };
            if let Some(row) = slot.and_then(|k| memo[k].as_ref()) {
                for (i, _) in row.iter().enumerate().filter(|(_, &b)| b) {
                    vals[i].insert(x);
                }
                continue;
            }
            let mut cache = Realized::new();
            let row: Vec<bool> = self.top.iter().map(|node| self.holds(node, x, &mut env, &mut cache)).collect();
            for (i, _) in row.iter().enumerate().filter(|(_, &b)| b) {
                vals[i].insert(x);
            }
            if let Some(k) = slot {
                memo[k] = Some(row);
            }
        }
        self.ds.phi.eval(&vals, self.p.all_coords())
    }

    fn holds(&self, node: &Node, x: usize, env: &mut Vec<usize>, cache: &mut Realized) -> bool {
        match node {
            Node::Plain(k) => {
                let len = env.len();
                let r = self.plain[*k][x].eval_in(&self.p.factors()[x], env);
                env.truncate(len);
                r
            }
            Node::Type { family, mask } => {
                if !cache.contains_key(family) {
                    let r = self.realized(*family, x, env);
                    cache.insert(*family, r);
                }
                cache[family].contains(mask)
            }
        }
    }

    /// Types over the family members realized by some element of factor
    /// `x`.
    fn realized(&self, family: usize, x: usize, env: &mut Vec<usize>) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for u in 0..self.p.factors()[x].size() {
            env.push(u);
            let mut cache = Realized::new();
            let mut mask = 0;
            for (i, m) in self.families[family].iter().enumerate() {
                if self.holds(m, x, env, &mut cache) {
                    mask |= 1 << i;
                }
            }
            env.pop();
            out.insert(mask);
        }
        out
    }
}

/// Evaluates `ds` at carrier elements `tuple` through the truth sets of its
/// factor formulas.
pub fn fv_eval(p: &BooleanProduct, ds: &DeterminingSequence, tuple: &[usize]) -> Result<bool, FvError> {
    if tuple.len() != ds.vars.len() {
        return Err(FvError::TupleLength { expected: ds.vars.len(), found: tuple.len() });
    }
    if let Some(&e) = tuple.iter().find(|&&e| e >= p.len()) {
        return Err(crate::product::ProductError::BadElement(vec![e]).into());
    }
    Ok(FvEvaluator::new(p, ds)?.eval(tuple))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    /// Coordinate vectors of the assigned elements.
    pub tuple: Vec<Vec<usize>>,
    pub direct: bool,
    pub fv: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvReport {
    pub vars: Vec<alloc::string::String>,
    pub psi_count: usize,
    /// `(direct, fv)` per assignment, in lexicographic order of element
    /// tuples.
    pub verdicts: Vec<(bool, bool)>,
    pub disagreements: Vec<Disagreement>,
}

impl FvReport {
    pub fn checked(&self) -> usize {
        self.verdicts.len()
    }

    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares direct evaluation in the product with evaluation through the
/// determining sequence, for every assignment of carrier elements.
pub fn fv_verify(p: &BooleanProduct, f: &Formula, cfg: &FvConfig) -> Result<FvReport, FvError> {
    let ds = fv_compile_with(f, cfg)?;
    let ev = FvEvaluator::new(p, &ds)?;
    let a = p.structure();
    let direct = Compiled::new(a, f, &ds.vars)?;
    let mut report =
        FvReport { vars: ds.vars.clone(), psi_count: ds.len(), verdicts: Vec::new(), disagreements: Vec::new() };
    for t in tuples(p.len(), ds.vars.len()) {
        let d = direct.eval(a, &t);
        let v = ev.eval(&t);
        report.verdicts.push((d, v));
        if d != v {
            let tuple = t.iter().map(|&e| p.coords(e).to_vec()).collect();
            report.disagreements.push(Disagreement { tuple, direct: d, fv: v });
        }
    }
    Ok(report)
}
