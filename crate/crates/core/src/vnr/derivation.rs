use alloc::vec;
use alloc::vec::Vec;

use super::{idempotents, maximal_ideals, FiniteRing, Ideal, RingError};
use crate::semantics::{product_coords, product_index};

/// A map `R -> R` given by its values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivationTable(pub Vec<usize>);

impl DerivationTable {
    pub fn zero(r: &FiniteRing) -> DerivationTable {
        DerivationTable(vec![r.zero(); r.size()])
    }

    /// `d/de` on the dual numbers `F_p[e]`: `a + b e` goes to `b`.
    pub fn dual_derivative(p: usize) -> DerivationTable {
        DerivationTable((0..p * p).map(|x| x / p).collect())
    }

    /// Acts coordinatewise on a product ring with factors of the given
    /// sizes.
    pub fn componentwise(parts: &[DerivationTable]) -> DerivationTable {
        let sizes: Vec<usize> = parts.iter().map(|d| d.0.len()).collect();
        let n = sizes.iter().product();
        DerivationTable(
            (0..n)
                .map(|x| {
                    let c = product_coords(&sizes, x);
                    product_index(&sizes, &c.iter().zip(parts).map(|(&v, d)| d.0[v]).collect::<Vec<_>>())
                })
                .collect(),
        )
    }

    pub fn is_zero(&self, r: &FiniteRing) -> bool {
        self.0.iter().all(|&v| v == r.zero())
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationReport {
    pub additive_failures: Vec<(usize, usize)>,
    pub leibniz_failures: Vec<(usize, usize)>,
    /// Idempotents with a nonzero image.
    pub idempotent_failures: Vec<usize>,
    /// `{r : d(r) = 0}`
    pub constants: Vec<usize>,
    pub constants_contain_idempotents: bool,
}

impl DerivationReport {
    pub fn is_derivation(&self) -> bool {
        self.additive_failures.is_empty() && self.leibniz_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.is_derivation() && self.idempotent_failures.is_empty() && self.constants_contain_idempotents
    }
}

fn check_size(r: &FiniteRing, d: &DerivationTable) -> Result<(), RingError> {
    if d.0.len() != r.size() || d.0.iter().any(|&v| v >= r.size()) {
        return Err(RingError::DerivationSize { expected: r.size(), found: d.0.len() });
    }
    Ok(())
}

fn leibniz(r: &FiniteRing, d: &DerivationTable, a: usize, b: usize) -> bool {
    d.0[r.mul(a, b)] == r.add(r.mul(d.0[a], b), r.mul(a, d.0[b]))
}

/// Additivity and the Leibniz rule on every pair, then the vanishing on
/// idempotents.
pub fn check_derivation(r: &FiniteRing, d: &DerivationTable) -> Result<DerivationReport, RingError> {
    check_size(r, d)?;
    let mut report = DerivationReport {
        additive_failures: Vec::new(),
        leibniz_failures: Vec::new(),
        idempotent_failures: Vec::new(),
        constants: r.elements().filter(|&x| d.0[x] == r.zero()).collect(),
        constants_contain_idempotents: false,
    };
    for a in r.elements() {
        for b in r.elements() {
            if d.0[r.add(a, b)] != r.add(d.0[a], d.0[b]) {
                report.additive_failures.push((a, b));
            }
            if !leibniz(r, d, a, b) {
                report.leibniz_failures.push((a, b));
            }
        }
    }
    let idem = idempotents(r);
    report.idempotent_failures = idem.iter().copied().filter(|&e| d.0[e] != r.zero()).collect();
    report.constants_contain_idempotents = idem.iter().all(|e| report.constants.binary_search(e).is_ok());
    Ok(report)
}

/// Additive generators chosen greedily in element order.
fn additive_generators(r: &FiniteRing) -> Vec<usize> {
    let mut span = vec![false; r.size()];
    span[r.zero()] = true;
    let mut gens = Vec::new();
    for x in r.elements() {
        if span[x] {
            continue;
        }
        gens.push(x);
        let mut frontier: Vec<usize> = r.elements().filter(|&y| span[y]).collect();
        while let Some(y) = frontier.pop() {
            let z = r.add(y, x);
            if !span[z] {
                span[z] = true;
                frontier.push(z);
            }
        }
    }
    gens
}

/// Extends values on the generators additively; `None` if that is not
/// well defined.
fn extend_additively(r: &FiniteRing, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut d = vec![usize::MAX; r.size()];
    d[r.zero()] = r.zero();
    let mut frontier = vec![r.zero()];
    while let Some(x) = frontier.pop() {
        for (&g, &dg) in gens.iter().zip(images) {
            let y = r.add(x, g);
            let dy = r.add(d[x], dg);
            if d[y] == usize::MAX {
                d[y] = dy;
                frontier.push(y);
            } else if d[y] != dy {
                return None;
            }
        }
    }
    Some(d)
}

/// Every derivation of `r`: images of the additive generators are
/// enumerated (with `d(1) = 0` forced), extended additively, and kept if
/// the Leibniz rule holds.
pub fn enumerate_derivations(r: &FiniteRing) -> Vec<DerivationTable> {
    let gens = additive_generators(r);
    let n = r.size();
    let choices: Vec<Vec<usize>> =
        gens.iter().map(|&g| if g == r.one() { vec![r.zero()] } else { r.elements().collect() }).collect();
    let mut out = Vec::new();
    let mut pick = vec![0; gens.len()];
    loop {
        let images: Vec<usize> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        if let Some(d) = extend_additively(r, &gens, &images) {
            let d = DerivationTable(d);
            if (0..n).all(|a| (a..n).all(|b| leibniz(r, &d, a, b))) {
                out.push(d);
            }
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                out.sort();
                return out;
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealReport {
    /// Each maximal ideal with an element whose image leaves it, if any.
    pub ideals: Vec<(Ideal, Option<usize>)>,
}

impl IdealReport {
    pub fn passed(&self) -> bool {
        self.ideals.iter().all(|(_, w)| w.is_none())
    }
}

/// Whether `d` maps every maximal ideal into itself.
pub fn check_differential_ideals(r: &FiniteRing, d: &DerivationTable) -> Result<IdealReport, RingError> {
    check_size(r, d)?;
    let ideals = maximal_ideals(r)
        .into_iter()
        .map(|m| {
            let witness = m.iter().copied().find(|&x| m.binary_search(&d.0[x]).is_err());
            (m, witness)
        })
        .collect();
    Ok(IdealReport { ideals })
}

/// The ring of constants `{r : d(r) = 0}` and its embedding.
pub fn constants_subring(r: &FiniteRing, d: &DerivationTable) -> Result<(FiniteRing, Vec<usize>), RingError> {
    check_size(r, d)?;
    let c: Vec<usize> = r.elements().filter(|&x| d.0[x] == r.zero()).collect();
    Ok((r.subring(&c)?, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vnr::is_vnr;

    #[test]
    fn dual_derivative_is_a_derivation() {
        let r = FiniteRing::dual_numbers(2).unwrap();
        let d = DerivationTable::dual_derivative(2);
        let rep = check_derivation(&r, &d).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.constants, [0, 1]);
        let ideals = check_differential_ideals(&r, &d).unwrap();
        assert_eq!(ideals.ideals, [(vec![0, 2], Some(2))]);
        let (c, emb) = constants_subring(&r, &d).unwrap();
        assert!(c.is_field());
        assert_eq!(emb, [0, 1]);
    }

    #[test]
    fn dual_derivative_needs_characteristic_two() {
        let r = FiniteRing::dual_numbers(3).unwrap();
        let rep = check_derivation(&r, &DerivationTable::dual_derivative(3)).unwrap();
        assert!(!rep.leibniz_failures.is_empty());
    }

    #[test]
    fn enumeration() {
        for r in [FiniteRing::zmod(6), FiniteRing::gf(4).unwrap(), FiniteRing::zmod(10)] {
            assert!(is_vnr(&r));
            assert_eq!(enumerate_derivations(&r), [DerivationTable::zero(&r)]);
        }
        let dual = FiniteRing::dual_numbers(2).unwrap();
        let ds = enumerate_derivations(&dual);
        assert_eq!(ds.len(), 4);
        assert!(ds.contains(&DerivationTable::dual_derivative(2)));
    }

    #[test]
    fn componentwise_on_products() {
        let dual = FiniteRing::dual_numbers(2).unwrap();
        let r = FiniteRing::product(&[dual.clone(), dual]).unwrap();
        let d = DerivationTable::componentwise(&[DerivationTable::dual_derivative(2), DerivationTable::dual_derivative(2)]);
        let rep = check_derivation(&r, &d).unwrap();
        assert!(rep.passed());
        let (c, _) = constants_subring(&r, &d).unwrap();
        assert_eq!(c.size(), 4);
        assert_eq!(enumerate_derivations(&r).len(), 16);
    }

    #[test]
    fn rejects_short_tables() {
        let r = FiniteRing::zmod(3);
        assert!(check_derivation(&r, &DerivationTable(vec![0])).is_err());
    }
}
