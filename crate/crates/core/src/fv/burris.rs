use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{conj, BaFormula, DeterminingSequence, FvError, Psi};
use crate::product::{BooleanProduct, CoordSet, FactorFormula};
use crate::semantics::{tuples, Compiled, FiniteStructure};
use crate::syntax::{bind, print_formula, Binder, Formula, Fresh, Term};

/// Splits `exists u.. (and ..)` into its binders and its positive and
/// negated atoms, which keep their loose indices.
fn existential_shape(f: &Formula) -> Result<(Vec<Binder>, Vec<Formula>, Vec<Formula>), FvError> {
    let mut binders = Vec::new();
    let mut g = f;
    while let Formula::Exists(b, body) = g {
        binders.push(b.clone());
        g = body;
    }
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    fn literals(g: &Formula, pos: &mut Vec<Formula>, neg: &mut Vec<Formula>) -> bool {
        match g {
            Formula::And(gs) => gs.iter().all(|h| literals(h, pos, neg)),
            Formula::Not(a) if a.is_atomic() => {
                neg.push((**a).clone());
                true
            }
            a if a.is_atomic() => {
                pos.push(a.clone());
                true
            }
            _ => false,
        }
    }
    if !literals(g, &mut pos, &mut neg) {
        return Err(FvError::Shape(print_formula(f)));
    }
    Ok((binders, pos, neg))
}

fn wrap(binders: &[Binder], body: Formula) -> Formula {
    binders.iter().rev().fold(body, |acc, b| Formula::Exists(b.clone(), Box::new(acc)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurrisDecomposition {
    pub phi0: Formula,
    /// One formula per negated atom, in order.
    pub phis: Vec<Formula>,
}

impl BurrisDecomposition {
    /// `phi0 and phi_1 and ..`, implied by the decomposed formula.
    pub fn rhs(&self) -> Formula {
        let mut all = vec![self.phi0.clone()];
        all.extend(self.phis.iter().cloned());
        conj(all)
    }
}

/// `phi0` keeps the positive atoms; `phi_j` adds the `j`-th negated atom.
pub fn burris_decompose(f: &Formula) -> Result<BurrisDecomposition, FvError> {
    let (binders, pos, neg) = existential_shape(f)?;
    if neg.is_empty() {
        return Ok(BurrisDecomposition { phi0: f.clone(), phis: Vec::new() });
    }
    let phi0 = wrap(&binders, conj(pos.clone()));
    let phis = neg
        .into_iter()
        .map(|n| {
            let mut lits = pos.clone();
            lits.push(Formula::not(n));
            wrap(&binders, conj(lits))
        })
        .collect();
    Ok(BurrisDecomposition { phi0, phis })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurrisReport {
    pub checked: usize,
    /// Assignments where the formula holds and the right-hand side fails.
    pub forward_failures: Vec<Vec<usize>>,
    /// Assignments where the right-hand side holds and the formula fails.
    pub converse_failures: Vec<Vec<usize>>,
}

/// Both directions of `f <-> phi0 and phi_1 ..` on every assignment of
/// the free variables of `f` in `a`.
pub fn burris_check(a: &FiniteStructure, f: &Formula, dec: &BurrisDecomposition) -> Result<BurrisReport, FvError> {
    let vars = f.free_vars();
    let lhs = Compiled::new(a, f, &vars)?;
    let rhs = Compiled::new(a, &dec.rhs(), &vars)?;
    let mut report = BurrisReport { checked: 0, forward_failures: Vec::new(), converse_failures: Vec::new() };
    for t in tuples(a.size(), vars.len()) {
        let (l, r) = (lhs.eval(a, &t), rhs.eval(a, &t));
        report.checked += 1;
        if l && !r {
            report.forward_failures.push(t);
        } else if r && !l {
            report.converse_failures.push(t);
        }
    }
    Ok(report)
}

/// The simple sequence `z0 = 1 and z1 != 0 and ..` over `phi0, phi_1, ..`.
/// It decides `f` only where the converse of the decomposition holds.
pub fn eq3_sequence(f: &Formula) -> Result<DeterminingSequence, FvError> {
    let dec = burris_decompose(f)?;
    let mut parts = vec![BaFormula::Top(0)];
    parts.extend((1..=dec.phis.len()).map(|j| BaFormula::not(BaFormula::Empty(j))));
    let mut psis = vec![Psi::Plain(dec.phi0)];
    psis.extend(dec.phis.into_iter().map(Psi::Plain));
    Ok(DeterminingSequence { vars: f.free_vars(), phi: BaFormula::And(parts), psis })
}

/// Open formulas over the named bound variables of a pair decomposition
/// for one nonempty set of negated atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Indices into [`PairDecomposition::negated`].
    pub atoms: Vec<usize>,
    pub psi: Formula,
    pub psi_plus: Formula,
    pub phi: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDecomposition {
    pub formula: Formula,
    pub predicate: String,
    /// The formula after each `P(t)` with `t` not a variable became
    /// `P(w) and w = t`.
    pub rewritten: Formula,
    /// All bound variables, new ones last.
    pub bound: Vec<String>,
    /// Bound variables `u` with a conjunct `P(u)`.
    pub u0: Vec<String>,
    pub u1: Vec<String>,
    pub psi0: Formula,
    /// `psi0` without its `P` atoms.
    pub psi0_plus: Formula,
    pub phi0: Formula,
    pub negated: Vec<Formula>,
    /// One entry per nonempty subset of the negated atoms, in bitmask order.
    pub blocks: Vec<Block>,
}

impl PairDecomposition {
    /// The block for the atom set given as a bitmask.
    pub fn block(&self, mask: usize) -> &Block {
        &self.blocks[mask - 1]
    }
}

/// Prepares an existential formula over a pair signature for the
/// coordinatewise criterion: `f` holds iff `phi0` holds at every
/// coordinate and, for some partition of the negated atoms, each block's
/// formula holds at some coordinate.
pub fn pair_decompose(f: &Formula, predicate: &str) -> Result<PairDecomposition, FvError> {
    existential_shape(f)?;
    let mut used: BTreeSet<String> = f.free_vars().into_iter().collect();
    let mut fresh = Fresh::avoiding(&used);
    let mut next_name = |hint: &str, used: &mut BTreeSet<String>| -> String {
        let name = if used.contains(hint) {
            loop {
                let n = fresh.name();
                if !used.contains(&n) {
                    break n;
                }
            }
        } else {
            hint.into()
        };
        used.insert(name.clone());
        name
    };
    let mut bound = Vec::new();
    let mut g = f.clone();
    while let Formula::Exists(b, body) = g {
        let name = next_name(&b.0, &mut used);
        g = body.instantiate(&Term::Var(name.clone()));
        bound.push(name);
    }
    let (_, pos, neg) = existential_shape(&g)?;
    let mut lits = Vec::new();
    for a in pos {
        match &a {
            Formula::Rel(r, args) if r == predicate && args.len() == 1 && !matches!(args[0], Term::Var(_)) => {
                let w = next_name("w", &mut used);
                lits.push(Formula::rel(r.clone(), vec![Term::Var(w.clone())]));
                lits.push(Formula::eq(Term::Var(w.clone()), args[0].clone()));
                bound.push(w);
            }
            _ => lits.push(a),
        }
    }
    let is_p = |a: &Formula| matches!(a, Formula::Rel(r, _) if r == predicate);
    let (u0, u1): (Vec<String>, Vec<String>) = bound.iter().cloned().partition(|u| {
        lits.iter().any(|a| matches!(a, Formula::Rel(r, args) if r == predicate && args[..] == [Term::Var(u.clone())]))
    });
    let close = |body: Formula| bound.iter().rev().fold(body, |acc, u| bind(false, u, u, acc));
    let plus: Vec<Formula> = lits.iter().filter(|a| !is_p(a)).cloned().collect();
    let mut all = lits.clone();
    all.extend(neg.iter().map(|n| Formula::not(n.clone())));
    let rewritten = close(conj(all));
    let mut blocks = Vec::new();
    for mask in 1usize..1 << neg.len() {
        let atoms: Vec<usize> = (0..neg.len()).filter(|j| mask >> j & 1 == 1).collect();
        let extra = atoms.iter().map(|&j| Formula::not(neg[j].clone()));
        let psi = conj(lits.iter().cloned().chain(extra.clone()).collect());
        let psi_plus = conj(plus.iter().cloned().chain(extra).collect());
        let phi = close(psi.clone());
        blocks.push(Block { atoms, psi, psi_plus, phi });
    }
    Ok(PairDecomposition {
        formula: f.clone(),
        predicate: predicate.into(),
        rewritten,
        bound: bound.clone(),
        u0,
        u1,
        psi0: conj(lits.clone()),
        psi0_plus: conj(plus),
        phi0: close(conj(lits)),
        negated: neg,
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimReport {
    pub checked: usize,
    /// Assignments (as coordinate vectors) where the formula holds in the
    /// product but the coordinatewise criterion fails.
    pub forward_failures: Vec<Vec<Vec<usize>>>,
    /// Assignments where the criterion holds but the formula fails.
    pub converse_failures: Vec<Vec<Vec<usize>>>,
}

impl ClaimReport {
    pub fn forward_holds(&self) -> bool {
        self.forward_failures.is_empty()
    }
}

/// Whether the atoms in `remaining` split into blocks each true somewhere.
fn partition_exists(remaining: usize, ok: &[bool]) -> bool {
    if remaining == 0 {
        return true;
    }
    let low = remaining & remaining.wrapping_neg();
    let rest = remaining & !low;
    let mut sub = rest;
    loop {
        let block = sub | low;
        if ok[block] && partition_exists(remaining & !block, ok) {
            return true;
        }
        if sub == 0 {
            return false;
        }
        sub = (sub - 1) & rest;
    }
}

/// Compares the formula in the product `p` of pair structures with the
/// coordinatewise criterion of `dec`, for every assignment of carrier
/// elements to the free variables.
pub fn pair_claim_check(p: &BooleanProduct, dec: &PairDecomposition) -> Result<ClaimReport, FvError> {
    let vars = dec.formula.free_vars();
    let a = p.structure();
    let lhs = Compiled::new(a, &dec.formula, &vars)?;
    let phi0 = FactorFormula::new(p, &dec.phi0, &vars)?;
    let blocks =
        dec.blocks.iter().map(|b| FactorFormula::new(p, &b.phi, &vars)).collect::<Result<Vec<_>, _>>()?;
    let all = p.all_coords();
    let mut report = ClaimReport { checked: 0, forward_failures: Vec::new(), converse_failures: Vec::new() };
    let mut ok = vec![false; blocks.len() + 1];
    for t in tuples(p.len(), vars.len()) {
        let l = lhs.eval(a, &t);
        let r = phi0.truth_set(p, &t) == all && {
            for (i, b) in blocks.iter().enumerate() {
                ok[i + 1] = b.truth_set(p, &t) != CoordSet::EMPTY;
            }
            partition_exists((1 << dec.negated.len()) - 1, &ok)
        };
        report.checked += 1;
        if l != r {
            let coords = t.iter().map(|&e| p.coords(e).to_vec()).collect();
            if l {
                report.forward_failures.push(coords);
            } else {
                report.converse_failures.push(coords);
            }
        }
    }
    Ok(report)
}
