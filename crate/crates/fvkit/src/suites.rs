//! Verification suites. Each returns [`Check`] records; independent
//! (structure, formula) tasks run on the rayon pool and come back in input
//! order.

use rayon::prelude::*;
use serde_json::{json, Value};

use fvkit_core::axioms::{emit_theory, evaluate_theory, TheoryParams};
use fvkit_core::fv::{burris_check, burris_decompose, fv_verify, pair_claim_check, pair_decompose, FvConfig, FvError};
use fvkit_core::pairs::{dense_pair_check, format_poly, p_part, relativization_check, PREDICATE};
use fvkit_core::product::BooleanProduct;
use fvkit_core::semantics::{tuples, Compiled, FiniteStructure};
use fvkit_core::syntax::{is_prenex, print_formula, projector_translate, to_prenex, Formula};
use fvkit_core::vnr::{
    check_derivation, check_differential_ideals, crt_check, decompose_stalks, enumerate_derivations, idempotent_algebra,
    is_vnr, vnr_failures, DerivationTable, FiniteRing,
};

use crate::report::Check;

/// A labelled input.
pub type Named<T> = (String, T);

fn error_check(check: &str, inputs: &str, err: impl std::fmt::Display) -> Check {
    Check::new(check, inputs, 0, vec![json!({ "error": err.to_string() })])
}

fn inputs(structure: &str, f: &Formula) -> String {
    format!("{structure}|{}", print_formula(f))
}

/// Direct evaluation against the determining sequence on one product.
pub fn fv_verify_one(pname: &str, p: &BooleanProduct, label: &str, f: &Formula, cfg: &FvConfig) -> Check {
    let key = inputs(pname, f);
    match fv_verify(p, f, cfg) {
        Ok(r) => {
            let witnesses =
                r.disagreements.iter().map(|d| json!({ "tuple": d.tuple, "direct": d.direct, "fv": d.fv })).collect();
            Check::new("fv-verify", &key, r.checked(), witnesses)
                .with_detail(json!({ "product": pname, "formula": label, "psis": r.psi_count }))
        }
        Err(e) => error_check("fv-verify", &key, e).with_detail(json!({ "product": pname, "formula": label })),
    }
}

pub fn fv_verify_suite(products: &[Named<BooleanProduct>], formulas: &[Named<Formula>], cfg: &FvConfig) -> Vec<Check> {
    let tasks: Vec<(&Named<BooleanProduct>, &Named<Formula>)> =
        products.iter().flat_map(|p| formulas.iter().map(move |f| (p, f))).collect();
    tasks.par_iter().map(|((pn, p), (fl, f))| fv_verify_one(pn, p, fl, f, cfg)).collect()
}

/// `phi` against its projector translation on every assignment in `a`.
pub fn projector_translation_one(name: &str, a: &FiniteStructure, label: &str, f: &Formula) -> Check {
    let key = inputs(name, f);
    let run = || -> Result<Check, String> {
        let prenex = if is_prenex(f) { f.clone() } else { to_prenex(f) };
        let fp = projector_translate(&prenex, a.sig()).map_err(|e| e.to_string())?;
        let ap = a.with_projector().map_err(|e| e.to_string())?;
        let vars = f.free_vars();
        let lhs = Compiled::new(a, f, &vars).map_err(|e| e.to_string())?;
        let rhs = Compiled::new(&ap, &fp, &vars).map_err(|e| e.to_string())?;
        let mut checked = 0;
        let mut witnesses = Vec::new();
        for t in tuples(a.size(), vars.len()) {
            checked += 1;
            let (l, r) = (lhs.eval(a, &t), rhs.eval(&ap, &t));
            if l != r {
                witnesses.push(json!({ "tuple": t, "phi": l, "phi_p": r }));
            }
        }
        Ok(Check::new("projector-translation", &key, checked, witnesses)
            .with_detail(json!({ "structure": name, "formula": label })))
    };
    run().unwrap_or_else(|e| error_check("projector-translation", &key, e))
}

pub fn projector_translation_suite(structures: &[Named<FiniteStructure>], formulas: &[Named<Formula>]) -> Vec<Check> {
    let tasks: Vec<_> = structures.iter().flat_map(|s| formulas.iter().map(move |f| (s, f))).collect();
    tasks.par_iter().map(|((sn, s), (fl, f))| projector_translation_one(sn, s, fl, f)).collect()
}

fn coords_json<const N: usize>(xs: &[Vec<usize>; N]) -> Value {
    json!(xs.to_vec())
}

/// The three projector identities, the discriminator law and the
/// existential definition of the projector.
pub fn projector_laws(name: &str, p: &BooleanProduct) -> Vec<Check> {
    let mut out = Vec::new();
    match p.projector_identities_check() {
        Ok(r) => out.push(Check::new(
            "projector-identities",
            name,
            r.checked,
            r.failures.iter().map(|(k, u, v)| json!({ "identity": k, "u": u, "v": v })).collect(),
        )),
        Err(e) => out.push(error_check("projector-identities", name, e)),
    }
    match p.discriminator_check() {
        Ok(r) => out.push(Check::new("discriminator", name, r.checked, r.failures.iter().map(coords_json).collect())),
        Err(e) => out.push(error_check("discriminator", name, e)),
    }
    match p.projector_definability_check() {
        Ok(r) => out.push(Check::new("projector-definability", name, r.checked, r.failures.iter().map(coords_json).collect())),
        Err(e) => out.push(error_check("projector-definability", name, e)),
    }
    out
}

/// Stalk decomposition, the idempotent algebra and its agreement with the
/// maximal ideal count, for one ring. Non-regular rings only get the
/// regularity record.
pub fn ring_structure_checks(name: &str, r: &FiniteRing) -> Vec<Check> {
    let vnr = is_vnr(r);
    let mut out = vec![Check::new("crt-agreement", name, 1, match crt_check(r) {
        Ok(c) if c == vnr => vec![],
        Ok(c) => vec![json!({ "crt": c, "vnr": vnr })],
        Err(e) => vec![json!({ "error": e.to_string() })],
    })
    .with_detail(json!({ "vnr": vnr, "regularity_witnesses": vnr_failures(r) }))];
    if !vnr {
        return out;
    }
    match decompose_stalks(r) {
        Ok(d) => {
            let mut w = Vec::new();
            if !d.is_isomorphism {
                w.push(json!({ "not_isomorphism": d.iso }));
            }
            for s in d.stalks.iter().filter(|s| !s.is_field) {
                w.push(json!({ "atom": s.atom, "stalk_not_field": s.field.size() }));
            }
            let stalks: Vec<Value> =
                d.stalks.iter().map(|s| json!({ "atom": s.atom, "ideal": s.ideal, "order": s.field.size() })).collect();
            out.push(Check::new("stalk-decomposition", name, d.stalks.len(), w).with_detail(json!({ "stalks": stalks, "iso": d.iso })));
        }
        Err(e) => out.push(error_check("stalk-decomposition", name, e)),
    }
    let b = idempotent_algebra(r);
    let iso = b.powerset_isomorphism(r);
    let w = if iso.is_some() { vec![] } else { vec![json!({ "atoms": b.atoms })] };
    out.push(Check::new("idempotent-powerset", name, b.elements.len(), w).with_detail(json!({ "atoms": b.atoms, "iso": iso })));
    out
}

/// Every derivation (given, or else all of them) kills the idempotents;
/// on a regular ring it also maps every maximal ideal into itself. For
/// other rings, ideals left by some derivation are recorded in the detail.
pub fn derivation_checks(name: &str, r: &FiniteRing, given: Option<&[DerivationTable]>) -> Vec<Check> {
    let enumerated;
    let ds = match given {
        Some(ds) => ds,
        None => {
            enumerated = enumerate_derivations(r);
            &enumerated[..]
        }
    };
    let vnr = is_vnr(r);
    let mut idem_w = Vec::new();
    let mut ideal_w = Vec::new();
    let mut escapes = Vec::new();
    for (k, d) in ds.iter().enumerate() {
        let rep = match check_derivation(r, d) {
            Ok(rep) => rep,
            Err(e) => {
                idem_w.push(json!({ "derivation": k, "error": e.to_string() }));
                continue;
            }
        };
        if !rep.is_derivation() {
            idem_w.push(json!({
                "derivation": k,
                "additive_failures": rep.additive_failures.len(),
                "leibniz_failures": rep.leibniz_failures.len(),
            }));
            continue;
        }
        if !rep.passed() {
            idem_w.push(json!({ "derivation": k, "table": d.0, "idempotents": rep.idempotent_failures }));
        }
        if let Ok(ideals) = check_differential_ideals(r, d) {
            for (m, w) in ideals.ideals.iter().filter_map(|(m, w)| w.map(|w| (m, w))) {
                let rec = json!({ "derivation": k, "table": d.0, "ideal": m, "element": w, "image": d.0[w] });
                if vnr {
                    ideal_w.push(rec);
                } else {
                    escapes.push(rec);
                }
            }
        }
    }
    let mut out = vec![Check::new("derivation-idempotents", name, ds.len(), idem_w)];
    let ideals = Check::new("differential-ideals", name, ds.len(), ideal_w);
    out.push(if vnr { ideals } else { ideals.with_detail(json!({ "vnr": false, "escaping_ideals": escapes })) });
    out
}

/// (P1)/(P2) for the predicate part and the relativization identity.
pub fn pair_checks(name: &str, a: &BooleanProduct, corpus: &[Formula]) -> Vec<Check> {
    let pp = match p_part(a) {
        Ok(pp) => pp,
        Err(e) => return vec![error_check("p-part", name, e)],
    };
    let g = &pp.gamma;
    let patch: Vec<Value> = g.p2_failures.iter().map(|w| json!({ "f": w.f, "g": w.g, "u": w.u.iter().collect::<Vec<_>>() })).collect();
    let mut out = vec![Check::new("p-part", name, g.p1_checked + g.p2_checked, patch)
        .with_status(g.p1() && g.p2())
        .with_detail(json!({ "size": pp.product.len(), "embedding": pp.embedding }))];
    let key = format!("{name}|{}", corpus.iter().map(print_formula).collect::<Vec<_>>().join("|"));
    out.push(match relativization_check(a, &pp, corpus) {
        Ok(r) => Check::new(
            "relativization",
            &key,
            r.checked,
            r.failures.iter().map(|(k, t)| json!({ "formula": print_formula(&corpus[*k]), "tuple": t })).collect(),
        ),
        Err(e) => error_check("relativization", &key, e),
    });
    out
}

/// The finite-scale density conditions (D1)-(D4).
pub fn dense_checks(name: &str, a: &BooleanProduct, chi: &Formula, d_max: usize, corpus: &[Formula]) -> Vec<Check> {
    let key = inputs(name, chi);
    let r = match dense_pair_check(a, chi, d_max, corpus) {
        Ok(r) => r,
        Err(e) => return vec![error_check("D1", &key, e)],
    };
    let d2: Vec<Value> = r
        .d2
        .witnesses
        .iter()
        .map(|w| json!({ "coord": w.coord, "polynomial": format_poly(&w.coeffs), "root": w.root }))
        .collect();
    vec![
        Check::new("D1", &key, r.d1.subalgebra.elements.len(), vec![])
            .with_status(r.d1.equal)
            .with_detail(json!({ "generated": r.d1.subalgebra.elements.len(), "powerset": 1usize << r.d1.ambient_atoms })),
        Check::new("D2", &key, r.d2.checked, d2).with_detail(json!({ "d_max": d_max })),
        Check::new("D3", &key, r.d3.checked, r.d3.failures.iter().map(|b| json!(b)).collect()),
        Check::new(
            "D4",
            &key,
            r.d4.checked,
            r.d4.failures.iter().map(|(x, e)| json!({ "point": x, "set": e.iter().collect::<Vec<_>>() })).collect(),
        ),
    ]
}

/// Forward and converse direction of the existential decomposition, as
/// two checks. Formulas of another shape are skipped and counted.
pub fn burris_one(name: &str, a: &FiniteStructure, label: &str, f: &Formula) -> Option<(Check, Check)> {
    let dec = match burris_decompose(f) {
        Ok(d) => d,
        Err(FvError::Shape(_)) => return None,
        Err(e) => {
            let key = inputs(name, f);
            return Some((error_check("burris-forward", &key, &e), error_check("burris-converse", &key, e)));
        }
    };
    let key = inputs(name, f);
    let detail = json!({ "structure": name, "formula": label });
    Some(match burris_check(a, f, &dec) {
        Ok(r) => (
            Check::new("burris-forward", &key, r.checked, r.forward_failures.iter().map(|t| json!(t)).collect())
                .with_detail(detail.clone()),
            Check::new("burris-converse", &key, r.checked, r.converse_failures.iter().map(|t| json!(t)).collect())
                .with_detail(detail),
        ),
        Err(e) => (error_check("burris-forward", &key, &e), error_check("burris-converse", &key, e)),
    })
}

pub fn burris_suite(structures: &[Named<FiniteStructure>], formulas: &[Named<Formula>]) -> (Vec<Check>, Vec<Check>, usize) {
    let tasks: Vec<_> = structures.iter().flat_map(|s| formulas.iter().map(move |f| (s, f))).collect();
    let results: Vec<Option<(Check, Check)>> = tasks.par_iter().map(|((sn, s), (fl, f))| burris_one(sn, s, fl, f)).collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let (fwd, conv) = results.into_iter().flatten().unzip();
    (fwd, conv, skipped)
}

/// The coordinatewise criterion for existential pair formulas, forward
/// and converse.
pub fn claim_one(name: &str, p: &BooleanProduct, label: &str, f: &Formula) -> Option<(Check, Check)> {
    let key = inputs(name, f);
    let dec = match pair_decompose(f, PREDICATE) {
        Ok(d) => d,
        Err(FvError::Shape(_)) => return None,
        Err(e) => return Some((error_check("claim-forward", &key, &e), error_check("claim-converse", &key, e))),
    };
    let detail = json!({ "product": name, "formula": label });
    Some(match pair_claim_check(p, &dec) {
        Ok(r) => (
            Check::new("claim-forward", &key, r.checked, r.forward_failures.iter().map(|t| json!(t)).collect())
                .with_detail(detail.clone()),
            Check::new("claim-converse", &key, r.checked, r.converse_failures.iter().map(|t| json!(t)).collect())
                .with_detail(detail),
        ),
        Err(e) => (error_check("claim-forward", &key, &e), error_check("claim-converse", &key, e)),
    })
}

/// Emission (with the roundtrip check), then evaluation on each structure.
/// Axiom verdicts are asserted only when `expect_all_hold` is set; the
/// complement definitions are always cross-checked.
pub fn axioms_checks(
    theory: &str,
    params: &TheoryParams,
    structures: &[Named<FiniteStructure>],
    expect_all_hold: bool,
) -> Vec<Check> {
    let entry = match emit_theory(theory, params) {
        Ok(e) => e,
        Err(e) => return vec![error_check("axioms-emit", theory, e)],
    };
    let key: String = entry.axioms.iter().map(|a| print_formula(&a.formula)).collect::<Vec<_>>().join("\n");
    let mut out = vec![Check::new(
        "axioms-roundtrip",
        &key,
        entry.axioms.len(),
        entry.roundtrip_failures().into_iter().map(Value::from).collect(),
    )];
    for (name, a) in structures {
        let key = format!("{name}|{key}");
        match evaluate_theory(&entry, a) {
            Ok(r) => {
                let failing: Vec<Value> = r.verdicts.iter().filter(|(_, h)| !h).map(|(l, _)| json!(l)).collect();
                let verdicts = Check::new("axiom-verdicts", &key, r.verdicts.len(), failing.clone())
                    .with_detail(json!({ "structure": name, "failing": failing }));
                out.push(if expect_all_hold { verdicts } else { verdicts.with_status(true) });
                out.push(Check::new(
                    "dagger",
                    &key,
                    r.verdicts.len(),
                    r.dagger_violations
                        .iter()
                        .map(|v| json!({ "relation": v.relation, "args": v.args, "holds": v.holds }))
                        .collect(),
                ));
            }
            Err(e) => out.push(error_check("axiom-verdicts", &key, e)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use fvkit_core::semantics::gf;
    use fvkit_core::syntax::{parse_formula, Signature};

    fn ring(text: &str) -> Formula {
        parse_formula(text, &Signature::ring()).unwrap()
    }

    #[test]
    fn fv_on_small_product() {
        let p = BooleanProduct::full(vec![gf(2).unwrap(), gf(3).unwrap()]).unwrap();
        let f = ring("(exists u (= (* x u) 1))");
        let c = fv_verify_one("F2xF3", &p, "unit", &f, &FvConfig::default());
        assert!(c.passed());
        assert_eq!(c.checked, 6);
    }

    #[test]
    fn translation_agrees_on_fields() {
        let f = ring("(forall u (exists v (or (= u 0) (= (* u v) 1))))");
        for q in [2, 3, 4, 5] {
            assert!(projector_translation_one("F", &gf(q).unwrap(), "inv", &f).passed());
        }
    }

    #[test]
    fn derivations_on_dual_numbers() {
        let r = FiniteRing::dual_numbers(2).unwrap();
        let checks = derivation_checks("F2[e]", &r, Some(&[DerivationTable::dual_derivative(2)]));
        assert!(checks.iter().all(Check::passed));
        let escapes = &checks[1].detail.as_ref().unwrap()["escaping_ideals"];
        assert_eq!(escapes[0]["ideal"], json!([0, 2]));
        assert_eq!(escapes[0]["element"], json!(2));
    }

    #[test]
    fn burris_skips_other_shapes() {
        let s = vec![("F2".to_string(), gf(2).unwrap())];
        let fs = vec![
            ("a".to_string(), ring("(exists u (and (not (= u 0)) (not (= u 1))))")),
            ("b".to_string(), ring("(forall u (= u u))")),
        ];
        let (fwd, conv, skipped) = burris_suite(&s, &fs);
        assert_eq!(skipped, 1);
        assert!(fwd[0].passed());
        assert!(!conv[0].passed());
        assert_eq!(conv[0].witnesses, vec![json!([])]);
    }
}
