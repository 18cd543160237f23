//! Feferman-Vaught determining sequences for full finite products.

mod ba;
mod burris;
mod eval;

pub use ba::BaFormula;
pub use burris::{
    burris_check, burris_decompose, eq3_sequence, pair_claim_check, pair_decompose, Block, BurrisDecomposition,
    BurrisReport, ClaimReport, PairDecomposition,
};
pub use eval::{fv_eval, fv_verify, Disagreement, FvEvaluator, FvReport};

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::product::ProductError;
use crate::semantics::EvalError;
use crate::syntax::{Binder, Formula};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FvError {
    #[error("an existential step would need {found} factor formulas, above the cap of {cap}")]
    CapExceeded { found: usize, cap: usize },
    #[error("the boolean formula needs {needed} designated variables, the sequence has {found}")]
    DesignatedCount { needed: usize, found: usize },
    #[error("determining sequences are only evaluated on full products")]
    NotFull,
    #[error("expected {expected} tuple entries, found {found}")]
    TupleLength { expected: usize, found: usize },
    #[error("formula is not of the form exists u (atoms and negated atoms): {0}")]
    Shape(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// Largest cap accepted by [`FvConfig`].
pub const MAX_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FvConfig {
    /// Largest number of factor formulas entering an existential step.
    pub cap: usize,
    /// Merge equal factor formulas.
    pub dedup: bool,
}

impl Default for FvConfig {
    fn default() -> Self {
        FvConfig { cap: 12, dedup: true }
    }
}

/// A factor formula. Those produced by an existential step are kept as a
/// family plus a selector, since a step over `l` formulas yields `2^l`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Psi {
    Plain(Formula),
    /// `exists u (and_{i in S} m_i and and_{i not in S} not m_i)` where the
    /// `m_i` are the family members and `S` is given by the bits of `mask`.
    Type { family: Arc<Family>, mask: u64 },
}

/// Members may mention the quantified variable as loose index 0, and
/// enclosing family variables as higher indices.
#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Family {
    pub binder: Binder,
    pub members: Vec<Psi>,
}

impl Psi {
    pub fn to_formula(&self) -> Formula {
        match self {
            Psi::Plain(f) => f.clone(),
            Psi::Type { family, mask } => {
                let lits = family
                    .members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| if mask >> i & 1 == 1 { m.to_formula() } else { Formula::not(m.to_formula()) })
                    .collect();
                Formula::Exists(family.binder.clone(), Box::new(conj(lits)))
            }
        }
    }
}

pub(crate) fn conj(mut fs: Vec<Formula>) -> Formula {
    if fs.len() == 1 {
        fs.pop().unwrap()
    } else {
        Formula::And(fs)
    }
}

/// `phi` read over the truth sets of `psis` decides the formula in every
/// full product. The factor formulas have free variables among `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminingSequence {
    pub vars: Vec<String>,
    pub phi: BaFormula,
    pub psis: Vec<Psi>,
}

impl DeterminingSequence {
    pub fn len(&self) -> usize {
        self.psis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psis.is_empty()
    }

    pub fn check(&self) -> Result<(), FvError> {
        if self.phi.well_formed(self.psis.len()) {
            Ok(())
        } else {
            Err(FvError::DesignatedCount { needed: self.phi.arity(), found: self.psis.len() })
        }
    }

    pub fn psi_formulas(&self) -> Vec<Formula> {
        self.psis.iter().map(Psi::to_formula).collect()
    }
}

pub fn fv_compile(f: &Formula) -> Result<DeterminingSequence, FvError> {
    fv_compile_with(f, &FvConfig::default())
}

/// Builds a determining sequence by induction on `f` in the `not`/`and`/
/// `exists` basis; other connectives are rewritten first.
pub fn fv_compile_with(f: &Formula, cfg: &FvConfig) -> Result<DeterminingSequence, FvError> {
    assert!(cfg.cap <= MAX_CAP, "cap above {MAX_CAP}");
    let (phi, psis) = compile(&f.to_basic(), cfg)?;
    let (phi, psis) = if cfg.dedup { dedup(phi, psis) } else { (phi, psis) };
    Ok(DeterminingSequence { vars: f.free_vars(), phi, psis })
}

fn compile(f: &Formula, cfg: &FvConfig) -> Result<(BaFormula, Vec<Psi>), FvError> {
    Ok(match f {
        Formula::Eq(..) | Formula::Rel(..) => (BaFormula::Top(0), vec![Psi::Plain(f.clone())]),
        Formula::Not(g) => {
            let (phi, psis) = compile(g, cfg)?;
            (BaFormula::not(phi), psis)
        }
        Formula::And(gs) => {
            let mut parts = Vec::with_capacity(gs.len());
            let mut psis = Vec::new();
            for g in gs {
                let (phi, more) = compile(g, cfg)?;
                let offset = psis.len();
                parts.push(phi.map_vars(&|i| i + offset));
                psis.extend(more);
            }
            (BaFormula::And(parts), psis)
        }
        Formula::Exists(b, g) => {
            let (phi, psis) = compile(g, cfg)?;
            let (phi, psis) = if cfg.dedup { dedup(phi, psis) } else { (phi, psis) };
            if psis.len() > cfg.cap {
                return Err(FvError::CapExceeded { found: psis.len(), cap: cfg.cap });
            }
            let n = 1usize << psis.len();
            let family = Arc::new(Family { binder: b.clone(), members: psis });
            let types = (0..n as u64).map(|mask| Psi::Type { family: family.clone(), mask }).collect();
            (BaFormula::Partition { args: (0..n).collect(), body: Box::new(phi) }, types)
        }
        Formula::Or(..) | Formula::Imp(..) | Formula::Forall(..) => unreachable!("input is in the basic connectives"),
    })
}

fn dedup(phi: BaFormula, psis: Vec<Psi>) -> (BaFormula, Vec<Psi>) {
    let mut seen: BTreeMap<&Psi, usize> = BTreeMap::new();
    let mut remap = Vec::with_capacity(psis.len());
    let mut keep = Vec::new();
    for (i, p) in psis.iter().enumerate() {
        let next = seen.len();
        let j = *seen.entry(p).or_insert(next);
        if j == next {
            keep.push(i);
        }
        remap.push(j);
    }
    let phi = phi.map_vars(&|i| remap[i]);
    let mut psis: Vec<Option<Psi>> = psis.into_iter().map(Some).collect();
    (phi, keep.into_iter().map(|i| psis[i].take().unwrap()).collect())
}
