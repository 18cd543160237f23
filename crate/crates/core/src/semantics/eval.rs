use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{tuples, FiniteStructure};
use crate::syntax::{Formula, Term};

pub type Assignment = BTreeMap<String, usize>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("symbol `{0}` is not interpreted by the structure")]
    SignatureMismatch(String),
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("free variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("value {0} assigned to `{1}` is outside the universe")]
    OutOfRange(usize, String),
}

#[derive(Clone, Debug)]
enum CTerm {
    Slot(usize),
    Value(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
enum CForm {
    Eq(CTerm, CTerm),
    Rel(usize, Vec<CTerm>),
    Not(Box<CForm>),
    And(Vec<CForm>),
    Or(Vec<CForm>),
    Imp(Box<CForm>, Box<CForm>),
    Exists(usize, Box<CForm>),
    Forall(usize, Box<CForm>),
}

/// A formula resolved against one structure's symbol tables, with its free
/// variables bound to positional slots.
#[derive(Clone, Debug)]
pub struct Compiled {
    form: CForm,
    vars: usize,
    slots: usize,
}

impl Compiled {
    /// `vars` fixes the order of the values passed to [`Compiled::eval`];
    /// it must cover the free variables of `f`.
    pub fn new(a: &FiniteStructure, f: &Formula, vars: &[String]) -> Result<Compiled, EvalError> {
        Self::with_context(a, f, vars, 0)
    }

    /// Like [`Compiled::new`] for a formula with loose bound variables
    /// `0 .. ctx`. Their values follow the free variables, outermost binder
    /// first.
    pub fn with_context(a: &FiniteStructure, f: &Formula, vars: &[String], ctx: usize) -> Result<Compiled, EvalError> {
        let mut c = Compiler { a, vars, ctx, depth: 0, max_depth: 0 };
        let form = c.formula(f)?;
        let inputs = vars.len() + ctx;
        Ok(Compiled { form, vars: inputs, slots: inputs + c.max_depth })
    }

    /// Evaluates with `values[i]` assigned to the `i`-th variable.
    pub fn eval(&self, a: &FiniteStructure, values: &[usize]) -> bool {
        debug_assert_eq!(values.len(), self.vars);
        let mut env = vec![0; self.slots];
        env[..self.vars].copy_from_slice(values);
        holds(a, &self.form, &mut env)
    }

    /// Evaluates reusing `env`, whose first entries hold the variable values.
    pub fn eval_in(&self, a: &FiniteStructure, env: &mut Vec<usize>) -> bool {
        env.resize(self.slots, 0);
        holds(a, &self.form, env)
    }
}

struct Compiler<'a> {
    a: &'a FiniteStructure,
    vars: &'a [String],
    ctx: usize,
    depth: usize,
    max_depth: usize,
}

impl Compiler<'_> {
    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        let sig = self.a.sig();
        match t {
            Term::Var(v) => self
                .vars
                .iter()
                .position(|x| x == v)
                .map(CTerm::Slot)
                .ok_or_else(|| EvalError::Unassigned(v.clone())),
            Term::Bound(i) => {
                let i = *i as usize;
                let base = self.vars.len() + self.ctx;
                if i < self.depth {
                    Ok(CTerm::Slot(base + self.depth - 1 - i))
                } else {
                    assert!(i - self.depth < self.ctx, "formula has a loose bound variable");
                    Ok(CTerm::Slot(base - 1 - (i - self.depth)))
                }
            }
            Term::Const(c) => self.a.constant(c).map(CTerm::Value).ok_or_else(|| EvalError::SignatureMismatch(c.clone())),
            Term::App(f, args) => {
                let fi = sig.function_index(f).ok_or_else(|| EvalError::SignatureMismatch(f.clone()))?;
                let arity = sig.functions[fi].1;
                if arity != args.len() {
                    return Err(EvalError::Arity { symbol: f.clone(), expected: arity, found: args.len() });
                }
                Ok(CTerm::App(fi, args.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<CForm, EvalError> {
        Ok(match f {
            Formula::Eq(a, b) => CForm::Eq(self.term(a)?, self.term(b)?),
            Formula::Rel(r, args) => {
                let sig = self.a.sig();
                let ri = sig.relation_index(r).ok_or_else(|| EvalError::SignatureMismatch(r.clone()))?;
                let arity = sig.relations[ri].1;
                if arity != args.len() {
                    return Err(EvalError::Arity { symbol: r.clone(), expected: arity, found: args.len() });
                }
                CForm::Rel(ri, args.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?)
            }
            Formula::Not(g) => CForm::Not(Box::new(self.formula(g)?)),
            Formula::And(gs) => CForm::And(gs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => CForm::Or(gs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Imp(a, b) => CForm::Imp(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Exists(_, g) | Formula::Forall(_, g) => {
                let slot = self.vars.len() + self.ctx + self.depth;
                self.depth += 1;
                self.max_depth = self.max_depth.max(self.depth);
                let body = self.formula(g);
                self.depth -= 1;
                let body = Box::new(body?);
                if matches!(f, Formula::Exists(..)) {
                    CForm::Exists(slot, body)
                } else {
                    CForm::Forall(slot, body)
                }
            }
        })
    }
}

fn value(a: &FiniteStructure, t: &CTerm, env: &[usize]) -> usize {
    match t {
        CTerm::Slot(s) => env[*s],
        CTerm::Value(v) => *v,
        CTerm::App(fi, args) => {
            let n = a.size();
            let idx = args.iter().fold(0, |acc, t| acc * n + value(a, t, env));
            a.table(*fi)[idx]
        }
    }
}

fn holds(a: &FiniteStructure, f: &CForm, env: &mut Vec<usize>) -> bool {
    match f {
        CForm::Eq(s, t) => value(a, s, env) == value(a, t, env),
        CForm::Rel(ri, args) => {
            let n = a.size();
            let idx = args.iter().fold(0, |acc, t| acc * n + value(a, t, env));
            a.relation_table(*ri)[idx]
        }
        CForm::Not(g) => !holds(a, g, env),
        CForm::And(gs) => gs.iter().all(|g| holds(a, g, env)),
        CForm::Or(gs) => gs.iter().any(|g| holds(a, g, env)),
        CForm::Imp(p, q) => !holds(a, p, env) || holds(a, q, env),
        CForm::Exists(slot, g) => (0..a.size()).any(|v| {
            env[*slot] = v;
            holds(a, g, env)
        }),
        CForm::Forall(slot, g) => (0..a.size()).all(|v| {
            env[*slot] = v;
            holds(a, g, env)
        }),
    }
}

/// `a |= f[asg]`, by exhaustive expansion of the quantifiers.
pub fn eval_formula(a: &FiniteStructure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    let vars = f.free_vars();
    let mut values = Vec::with_capacity(vars.len());
    for v in &vars {
        let x = *asg.get(v).ok_or_else(|| EvalError::Unassigned(v.clone()))?;
        if x >= a.size() {
            return Err(EvalError::OutOfRange(x, v.clone()));
        }
        values.push(x);
    }
    Ok(Compiled::new(a, f, &vars)?.eval(a, &values))
}

pub fn eval_sentence(a: &FiniteStructure, f: &Formula) -> Result<bool, EvalError> {
    eval_formula(a, f, &Assignment::new())
}

/// `{t : a |= f[t, params]}` for tuples `t` over `free`, in lexicographic
/// order.
pub fn definable_set(
    a: &FiniteStructure,
    f: &Formula,
    params: &Assignment,
    free: &[String],
) -> Result<Vec<Vec<usize>>, EvalError> {
    let mut vars: Vec<String> = free.to_vec();
    let mut fixed = Vec::new();
    for v in f.free_vars() {
        if free.contains(&v) {
            continue;
        }
        let x = *params.get(&v).ok_or_else(|| EvalError::Unassigned(v.clone()))?;
        if x >= a.size() {
            return Err(EvalError::OutOfRange(x, v.clone()));
        }
        vars.push(v);
        fixed.push(x);
    }
    let compiled = Compiled::new(a, f, &vars)?;
    let mut env = Vec::new();
    let mut out = Vec::new();
    for t in tuples(a.size(), free.len()) {
        env.clear();
        env.extend_from_slice(&t);
        env.extend_from_slice(&fixed);
        if compiled.eval_in(a, &mut env) {
            out.push(t);
        }
    }
    Ok(out)
}
