use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::product::CoordSet;
use crate::sexpr::Sexp;

/// A boolean-algebra formula in designated set variables `z_0 .. z_{l-1}`,
/// read in the powerset algebra of a finite index set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaFormula {
    /// `z_i = 1`
    Top(usize),
    /// `z_i = 0`
    Empty(usize),
    Not(Box<BaFormula>),
    And(Vec<BaFormula>),
    /// There is a partition `(b_S)` of 1, indexed by the subsets `S` of
    /// `{0 .. w-1}` where `args.len() == 2^w`, with `b_S <= z_{args[S]}`,
    /// such that `body` holds of `z'_i := join of the b_S with i in S`.
    ///
    /// `body` speaks about the `w` variables `z'_i` only.
    Partition { args: Vec<usize>, body: Box<BaFormula> },
}

impl BaFormula {
    pub fn not(f: BaFormula) -> BaFormula {
        BaFormula::Not(Box::new(f))
    }

    /// Width `w` of a partition node with `args.len() == 2^w`.
    pub fn partition_width(args: &[usize]) -> Option<usize> {
        args.len().is_power_of_two().then(|| args.len().trailing_zeros() as usize)
    }

    /// One more than the largest designated variable used at the top level.
    pub fn arity(&self) -> usize {
        match self {
            BaFormula::Top(i) | BaFormula::Empty(i) => i + 1,
            BaFormula::Not(g) => g.arity(),
            BaFormula::And(gs) => gs.iter().map(BaFormula::arity).max().unwrap_or(0),
            BaFormula::Partition { args, .. } => args.iter().map(|i| i + 1).max().unwrap_or(0),
        }
    }

    /// Checks that every variable is below `available` at its level and
    /// that partition sizes are powers of two.
    pub fn well_formed(&self, available: usize) -> bool {
        match self {
            BaFormula::Top(i) | BaFormula::Empty(i) => *i < available,
            BaFormula::Not(g) => g.well_formed(available),
            BaFormula::And(gs) => gs.iter().all(|g| g.well_formed(available)),
            BaFormula::Partition { args, body } => match Self::partition_width(args) {
                Some(w) => args.iter().all(|&i| i < available) && body.well_formed(w),
                None => false,
            },
        }
    }

    /// Renames the top-level variables.
    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> BaFormula {
        match self {
            BaFormula::Top(i) => BaFormula::Top(f(*i)),
            BaFormula::Empty(i) => BaFormula::Empty(f(*i)),
            BaFormula::Not(g) => BaFormula::not(g.map_vars(f)),
            BaFormula::And(gs) => BaFormula::And(gs.iter().map(|g| g.map_vars(f)).collect()),
            BaFormula::Partition { args, body } => {
                BaFormula::Partition { args: args.iter().map(|&i| f(i)).collect(), body: body.clone() }
            }
        }
    }

    /// Truth in the powerset algebra of `all`, with `z_i` read as `vals[i]`.
    ///
    /// Partitions are found by labelling each point of `all` with the
    /// subset `S` whose block it falls in.
    pub fn eval(&self, vals: &[CoordSet], all: CoordSet) -> bool {
        match self {
            BaFormula::Top(i) => vals[*i] == all,
            BaFormula::Empty(i) => vals[*i].is_empty(),
            BaFormula::Not(g) => !g.eval(vals, all),
            BaFormula::And(gs) => gs.iter().all(|g| g.eval(vals, all)),
            BaFormula::Partition { args, body } => {
                let w = Self::partition_width(args).expect("partition size is a power of two");
                let points: Vec<usize> = all.iter().collect();
                let options: Vec<Vec<usize>> = points
                    .iter()
                    .map(|&x| (0..args.len()).filter(|&s| vals[args[s]].contains(x)).collect())
                    .collect();
                if options.iter().any(Vec::is_empty) {
                    return false;
                }
                let mut pick = vec![0; points.len()];
                let mut inner = vec![CoordSet::EMPTY; w];
                loop {
                    inner.iter_mut().for_each(|z| *z = CoordSet::EMPTY);
                    for (k, &x) in points.iter().enumerate() {
                        let s = options[k][pick[k]];
                        for (i, z) in inner.iter_mut().enumerate() {
                            if s >> i & 1 == 1 {
                                z.insert(x);
                            }
                        }
                    }
                    if body.eval(&inner, all) {
                        return true;
                    }
                    let mut k = 0;
                    loop {
                        if k == points.len() {
                            return false;
                        }
                        pick[k] += 1;
                        if pick[k] < options[k].len() {
                            break;
                        }
                        pick[k] = 0;
                        k += 1;
                    }
                }
            }
        }
    }

    /// S-expression with variables `z1 ..` at the top level, `z'1 ..`
    /// inside one partition, and so on.
    pub fn to_sexp(&self) -> Sexp {
        self.sexp_at(0)
    }

    fn sexp_at(&self, level: usize) -> Sexp {
        let var = |i: usize| Sexp::atom(format!("z{}{}", "'".repeat(level), i + 1));
        match self {
            BaFormula::Top(i) => Sexp::list(vec![Sexp::atom("="), var(*i), Sexp::atom("1")]),
            BaFormula::Empty(i) => Sexp::list(vec![Sexp::atom("="), var(*i), Sexp::atom("0")]),
            BaFormula::Not(g) => Sexp::list(vec![Sexp::atom("not"), g.sexp_at(level)]),
            BaFormula::And(gs) => {
                let mut items = vec![Sexp::atom("and")];
                items.extend(gs.iter().map(|g| g.sexp_at(level)));
                Sexp::list(items)
            }
            BaFormula::Partition { args, body } => Sexp::list(vec![
                Sexp::atom("partition"),
                Sexp::list(args.iter().map(|&i| var(i)).collect()),
                body.sexp_at(level + 1),
            ]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_reads_as_existential() {
        // exists u: z'1 = 1, over the family z1 = chi_{}, z2 = chi_{0}
        let f = BaFormula::Partition { args: vec![0, 1], body: Box::new(BaFormula::Top(0)) };
        let all = CoordSet::full(2);
        assert!(f.eval(&[CoordSet::EMPTY, all], all));
        assert!(!f.eval(&[all, CoordSet(1)], all));
        assert!(!f.eval(&[CoordSet::EMPTY, CoordSet(1)], all));
    }

    #[test]
    fn sexp_names_levels() {
        let f = BaFormula::And(vec![
            BaFormula::not(BaFormula::Empty(1)),
            BaFormula::Partition { args: vec![2, 3], body: Box::new(BaFormula::Top(0)) },
        ]);
        assert_eq!(
            alloc::string::ToString::to_string(&f.to_sexp()),
            "(and (not (= z2 0)) (partition (z3 z4) (= z'1 1)))"
        );
        assert_eq!(f.arity(), 4);
        assert!(f.well_formed(4));
        assert!(!f.well_formed(3));
    }
}
