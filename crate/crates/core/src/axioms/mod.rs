//! Axiom systems as labelled formula lists, generated from templates with
//! explicit schema bounds.

mod text;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::semantics::{eval_sentence, Compiled, DaggerViolation, EvalError, FiniteStructure, StructureError};
use crate::syntax::{parse_formula, print_formula, Formula, Signature, SignatureError, SyntaxError, Term, DELTA};
use text::*;

/// Every theory name understood by [`emit_theory`].
pub const THEORIES: &[&str] = &[
    "ring",
    "vnr",
    "projector_def",
    "A",
    "T_f",
    "T_reg",
    "T_v",
    "char0",
    "T_reg_v_0",
    "T_reg_v_p",
    "pair",
    "Dt_n_k",
    "ell_n",
    "lambda_n_i",
    "chi_order",
    "chi_valuation",
    "G",
    "RCVF",
];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("parameter `{param}` must be at least {min}, got {value}")]
    Bound { param: &'static str, min: usize, value: usize },
    #[error("parameter `i` must lie in 1..={n}, got {i}")]
    Index { i: usize, n: usize },
    #[error("scheme formula: {0}")]
    Sigma(String),
    #[error("template `{label}` failed to parse: {err}")]
    Template { label: String, err: SyntaxError },
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("structure lacks symbols of signature `{0}`")]
    SignatureMismatch(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Schema bounds and instance data.
///
/// `n` bounds degree, arity and numeral schemas, `k` is the degree for
/// `Dt_n_k`, `i` the component for `lambda_n_i`, `p` the residue
/// characteristic for `T_reg_v_p`, and `sigma` the defining formula of a
/// (G) instance over `y0 ... yn` (other free variables are parameters).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryParams {
    pub n: usize,
    pub k: usize,
    pub i: usize,
    pub p: usize,
    pub sigma: Option<String>,
}

impl Default for TheoryParams {
    fn default() -> TheoryParams {
        TheoryParams { n: 3, k: 2, i: 1, p: 2, sigma: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub label: String,
    pub formula: Formula,
    /// Set when the template fixes a reading the source leaves open.
    pub interpretation: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCorpusEntry {
    pub theory: String,
    pub params: TheoryParams,
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
}

impl AxiomCorpusEntry {
    /// Labels whose formula does not print, reparse and reprint to the same
    /// text.
    pub fn roundtrip_failures(&self) -> Vec<String> {
        self.axioms
            .iter()
            .filter(|a| {
                let printed = print_formula(&a.formula);
                match parse_formula(&printed, &self.signature) {
                    Ok(g) => g != a.formula || print_formula(&g) != printed,
                    Err(_) => true,
                }
            })
            .map(|a| a.label.clone())
            .collect()
    }
}

struct Builder {
    sig: Signature,
    axioms: Vec<Axiom>,
}

impl Builder {
    fn new(sig: Signature) -> Builder {
        Builder { sig, axioms: Vec::new() }
    }

    fn push(&mut self, label: impl Into<String>, text: String) -> Result<(), AxiomError> {
        self.push_flagged(label, text, false)
    }

    fn push_flagged(&mut self, label: impl Into<String>, text: String, interpretation: bool) -> Result<(), AxiomError> {
        let label = label.into();
        let formula = parse_formula(&text, &self.sig).map_err(|err| AxiomError::Template { label: label.clone(), err })?;
        self.axioms.push(Axiom { label, formula, interpretation });
        Ok(())
    }
}

fn one(v: &str) -> Vec<String> {
    vec![v.into()]
}

fn names(vs: &[&str]) -> Vec<String> {
    vs.iter().map(|v| v.to_string()).collect()
}

fn at_least(param: &'static str, value: usize, min: usize) -> Result<(), AxiomError> {
    if value < min {
        Err(AxiomError::Bound { param, min, value })
    } else {
        Ok(())
    }
}

fn dagger_parse(sig: &Signature, text: &str) -> Formula {
    parse_formula(text, sig).expect("complement templates parse")
}

/// Ring plus `div` (`v(x) <= v(y)`) and `Div` (`v(x) < v(y)`), each the
/// complement of the other with arguments swapped.
pub fn valued_ring_signature() -> Signature {
    let sig = Signature::ring().with_relation("div", 2).with_relation("Div", 2).with_name("ring_div");
    let d = dagger_parse(&sig, "(Div x2 x1)");
    let big = dagger_parse(&sig, "(div x2 x1)");
    sig.with_dagger("div", d).and_then(|s| s.with_dagger("Div", big)).expect("valued ring complements are positive")
}

pub fn lattice_ring_signature() -> Signature {
    Signature::ring().with_function("meet", 2).with_name("ring_meet")
}

/// The language of real closed valued fields: `div`, `Div` and `meet`.
pub fn rcvf_signature() -> Signature {
    let mut sig = valued_ring_signature().with_function("meet", 2);
    sig.name = "rcvf".into();
    sig
}

fn ring_axioms(b: &mut Builder) -> Result<(), AxiomError> {
    let xyz = names(&["x", "y", "z"]);
    let xy = names(&["x", "y"]);
    b.push("ring.add_assoc", forall(&xyz, eq("(+ x (+ y z))", "(+ (+ x y) z)")))?;
    b.push("ring.add_comm", forall(&xy, eq("(+ x y)", "(+ y x)")))?;
    b.push("ring.add_zero", forall(&one("x"), eq("(+ x 0)", "x")))?;
    b.push("ring.sub", forall(&xy, eq("(+ (- x y) y)", "x")))?;
    b.push("ring.mul_assoc", forall(&xyz, eq("(* x (* y z))", "(* (* x y) z)")))?;
    b.push("ring.mul_comm", forall(&xy, eq("(* x y)", "(* y x)")))?;
    b.push("ring.mul_one", forall(&one("x"), eq("(* x 1)", "x")))?;
    b.push("ring.distrib", forall(&xyz, eq("(* x (+ y z))", "(+ (* x y) (* x z))")))
}

fn regular(b: &mut Builder) -> Result<(), AxiomError> {
    b.push("vnr.regular", forall(&one("x"), exists(&one("y"), eq("(* (* x y) x)", "x"))))
}

fn no_minimal_idempotent(b: &mut Builder) -> Result<(), AxiomError> {
    let idem = |e: &str| and(&[eq(&mul(e, e), e), ne(e, "0")]);
    let below = and(&[idem("f"), ne("f", "e"), eq("(* f e)", "f")]);
    b.push("no_minimal_idempotent", forall(&one("e"), imp(&idem("e"), &exists(&one("f"), below))))
}

/// Monic polynomials of the given degrees have a root.
fn monic_roots(b: &mut Builder, degrees: impl Iterator<Item = usize>) -> Result<(), AxiomError> {
    for d in degrees {
        let us = vars("u", 0..d);
        let mut terms = vec![power("x", d)];
        terms.extend(us.iter().enumerate().rev().map(|(j, u)| if j == 0 { u.clone() } else { mul(u, &power("x", j)) }));
        b.push(format!("monic.{d}"), forall(&us, exists(&one("x"), eq(&sum(&terms), "0"))))?;
    }
    Ok(())
}

fn char0(b: &mut Builder, n: usize) -> Result<(), AxiomError> {
    for m in 1..=n {
        let body = imp(&and(&[eq("(* e e)", "e"), ne("e", "0")]), &ne(&mul(&numeral(m), "e"), "0"));
        b.push_flagged(format!("char0.{m}"), forall(&one("e"), body), true)?;
    }
    Ok(())
}

fn o(t: &str) -> String {
    format!("(div 1 {t})")
}

fn m(t: &str) -> String {
    format!("(Div 1 {t})")
}

fn t_v(b: &mut Builder) -> Result<(), AxiomError> {
    let xy = names(&["x", "y"]);
    b.push("T_v.1", o("1"))?;
    let closed = and(&[o(&add("x", "y")), o(&sub("x", "y")), o(&mul("x", "y"))]);
    b.push("T_v.2", forall(&xy, imp(&and(&[o("x"), o("y")]), &closed)))?;
    let comparable = exists(&one("z"), and(&[o("z"), eq(&mul(&sub("(* y z)", "x"), &sub("(* z x)", "y")), "0")]));
    b.push_flagged("T_v.3", forall(&xy, imp(&and(&[o("x"), o("y")]), &comparable)), true)?;
    let either = and(&[o("y"), o("z"), eq(&mul(&sub("y", "x"), &sub("1", "(* x z)")), "0")]);
    b.push("T_v.4", forall(&one("x"), exists(&names(&["y", "z"]), either)))?;
    b.push("T_v.M_ideal", forall(&xy, imp(&and(&[o("x"), m("y")]), &m("(* x y)"))))?;
    let units = imp(&and(&[o("x"), o("y"), not(&m("x"))]), &m(&sub("1", "(* x y)")));
    b.push("T_v.M_units", forall(&one("x"), exists(&one("y"), units)))
}

fn lattice_ring(b: &mut Builder) -> Result<(), AxiomError> {
    let abc = names(&["a", "b", "c"]);
    let ab = names(&["a", "b"]);
    b.push("T_f.meet_idem", forall(&one("a"), eq("(meet a a)", "a")))?;
    b.push("T_f.meet_comm", forall(&ab, eq("(meet a b)", "(meet b a)")))?;
    b.push("T_f.meet_assoc", forall(&abc, eq("(meet a (meet b c))", "(meet (meet a b) c)")))?;
    b.push("T_f.absorb_meet", forall(&ab, eq(&format!("(meet a {})", join("a", "b")), "a")))?;
    b.push("T_f.absorb_join", forall(&ab, eq(&join("a", "(meet a b)"), "a")))?;
    b.push("T_f.translate", forall(&abc, eq("(+ (meet a b) c)", "(meet (+ a c) (+ b c))")))?;
    let pos = |t: &str| eq(&format!("(meet {t} 0)"), "0");
    b.push("T_f.positive_mul", forall(&ab, imp(&and(&[pos("a"), pos("b")]), &pos("(* a b)"))))?;
    b.push("T_f.reduced", forall(&one("x"), imp(&eq("(* x x)", "0"), &eq("x", "0"))))?;
    b.push("T_f.f_ring", forall(&ab, imp(&eq("(meet a b)", "0"), &eq("(* a b)", "0"))))
}

fn pair_axioms(b: &mut Builder) -> Result<(), AxiomError> {
    let xy = names(&["x", "y"]);
    b.push("pair.zero", "(P 0)".into())?;
    b.push("pair.one", "(P 1)".into())?;
    let closed = and(&["(P (+ x y))".into(), "(P (- x y))".into(), "(P (* x y))".into()]);
    b.push("pair.closed", forall(&xy, imp("(and (P x) (P y))", &closed)))?;
    b.push("pair.proper", exists(&one("x"), not("(P x)")))
}

/// Exponent vectors of total degree `<= k` in `n` variables, by degree and
/// then lexicographically.
fn monomials(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for d in 0..=k {
        let mut cur = vec![0; n];
        fill(&mut cur, 0, d, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e;
        fill(cur, pos + 1, left - e, out);
    }
}

/// `exists c. (some c_j nonzero) and (all c_j in P) and sum c_j t_j = 0`;
/// nonzero is `c != 0` or, positively, invertibility.
fn dependence(coeffs: &[String], terms: &[String], positive: bool) -> String {
    let nonzero: Vec<String> =
        coeffs.iter().map(|c| if positive { unit(c, &format!("w_{c}")) } else { ne(c, "0") }).collect();
    let in_p: Vec<String> = coeffs.iter().map(|c| format!("(P {c})")).collect();
    let combo: Vec<String> = coeffs.iter().zip(terms).map(|(c, t)| if t == "1" { c.clone() } else { mul(c, t) }).collect();
    exists(coeffs, and(&[or(&nonzero), and(&in_p), eq(&sum(&combo), "0")]))
}

fn dt_name(n: usize, k: usize) -> String {
    format!("Dt{n}_{k}")
}

fn dt_dependence(n: usize, k: usize, positive: bool) -> String {
    let xs = vars("x", 1..n + 1);
    let terms: Vec<String> = monomials(n, k)
        .iter()
        .map(|e| product(&e.iter().zip(&xs).filter(|(&p, _)| p > 0).map(|(&p, x)| power(x, p)).collect::<Vec<_>>()))
        .collect();
    dependence(&vars("c", 0..terms.len()), &terms, positive)
}

fn ell_name(n: usize) -> String {
    format!("ell{n}")
}

fn ell_dependence(n: usize, positive: bool) -> String {
    dependence(&vars("z", 1..n + 1), &vars("x", 1..n + 1), positive)
}

fn with_relation_once(sig: Signature, name: &str, arity: usize) -> Signature {
    if sig.relation_arity(name).is_some() {
        sig
    } else {
        sig.with_relation(name, arity)
    }
}

fn dt_signature(n: usize, k: usize) -> Result<Signature, AxiomError> {
    let mut sig = with_relation_once(with_relation_once(Signature::ring_pair(), &dt_name(1, 1), 1), &dt_name(n, k), n);
    sig.name = format!("ring_P_{}", dt_name(n, k));
    for (a, d) in [(1, 1), (n, k)] {
        let def = dagger_parse(&sig, &dt_dependence(a, d, true));
        sig = sig.with_dagger(&dt_name(a, d), def)?;
    }
    let p = dagger_parse(&sig, "(Dt1_1 x1)");
    Ok(sig.with_dagger("P", p)?)
}

fn ell_signature(arities: &[usize]) -> Result<Signature, AxiomError> {
    let mut sig = Signature::ring_pair();
    for &a in core::iter::once(&2).chain(arities) {
        sig = with_relation_once(sig, &ell_name(a), a);
    }
    sig.name = format!("ring_P_{}", arities.iter().map(|a| ell_name(*a)).collect::<Vec<_>>().join("_"));
    for &a in core::iter::once(&2).chain(arities) {
        let def = dagger_parse(&sig, &ell_dependence(a, true));
        sig = sig.with_dagger(&ell_name(a), def)?;
    }
    let p = dagger_parse(&sig, "(ell2 1 x1)");
    Ok(sig.with_dagger("P", p)?)
}

fn rel_app(r: &str, args: &[String]) -> String {
    format!("({r} {})", args.join(" "))
}

/// Definitional biconditional of a relation with a dependence complement,
/// in the source form and in the positive form.
fn complement_pair(b: &mut Builder, rel: &str, arity: usize, source: String, positive: String) -> Result<(), AxiomError> {
    let xs = vars("x", 1..arity + 1);
    let neg_r = not(&rel_app(rel, &xs));
    b.push(format!("{rel}.def"), forall(&xs, iff(&neg_r, &source)))?;
    b.push_flagged(format!("{rel}.dagger"), forall(&xs, iff(&neg_r, &positive)), true)
}

fn chi_order_text(u: &str, v: &str) -> String {
    and(&[le(&abs(u), &abs(v)), unit(v, "w")])
}

fn g_scheme(b: &mut Builder, n: usize, sigma: Option<&str>) -> Result<(), AxiomError> {
    let ys = vars("y", 0..n + 1);
    let default = format!("(= y{n} (* y0 y0))");
    let sigma_text = sigma.unwrap_or(&default);
    let sigma = parse_formula(sigma_text, &b.sig).map_err(|e| AxiomError::Sigma(format!("{e}")))?;
    let params: Vec<String> = sigma.free_vars().into_iter().filter(|v| !ys.contains(v)).collect();
    let zs = vars("g_z", 0..n + 1);
    let cs = vars("g_c", 0..n);
    let at = |vals: &dyn Fn(usize) -> Term| sigma.subst_free(&|v| ys.iter().position(|y| y == v).map(vals));
    let inner = Formula::exists(&zs[n], at(&|j| Term::var(zs[j].as_str())));
    let ball: Vec<String> = (0..n).map(|j| chi_order_text(&sub(&zs[j], &cs[j]), "g_b")).collect();
    let ball = parse_formula(&and(&ball), &b.sig).map_err(|err| AxiomError::Template { label: "G".into(), err })?;
    let mut contains = Formula::imp(ball, inner);
    for z in zs[..n].iter().rev() {
        contains = Formula::forall(z, contains);
    }
    let centre = parse_formula(&chi_order_text("0", "g_b"), &b.sig).expect("ball template parses");
    let mut open = Formula::And(vec![centre, contains]);
    open = Formula::exists("g_b", open);
    for c in cs.iter().rev() {
        open = Formula::exists(c, open);
    }
    let jet = |j: usize| (0..j).fold(Term::var("g_a"), |t, _| Term::app(DELTA, vec![t]));
    let witness = Formula::exists("g_a", at(&jet));
    let mut axiom = Formula::imp(open, witness);
    for v in params.iter().rev() {
        axiom = Formula::forall(v, axiom);
    }
    b.axioms.push(Axiom { label: format!("G.{n}"), formula: axiom, interpretation: true });
    Ok(())
}

/// Builds the named theory; schema instances run up to the bounds in
/// `params`.
pub fn emit_theory(name: &str, params: &TheoryParams) -> Result<AxiomCorpusEntry, AxiomError> {
    let n = params.n;
    let b = match name {
        "ring" => {
            let mut b = Builder::new(Signature::ring());
            ring_axioms(&mut b)?;
            b
        }
        "vnr" => {
            let mut b = Builder::new(Signature::ring());
            ring_axioms(&mut b)?;
            regular(&mut b)?;
            b
        }
        "projector_def" => {
            let mut b = Builder::new(Signature::ring_projector());
            let body = and(&[eq("(* (* b d) b)", "b"), eq("(* (- (p a b) a) (- 1 (* b d)))", "0"), eq("(* (p a b) b)", "0")]);
            b.push("B", forall(&names(&["a", "b"]), exists(&one("d"), body)))?;
            b
        }
        "A" => {
            let mut b = Builder::new(Signature::ring_delta());
            ring_axioms(&mut b)?;
            regular(&mut b)?;
            let ab = names(&["a", "b"]);
            b.push("A.additive", forall(&ab, eq("(delta (+ a b))", "(+ (delta a) (delta b))")))?;
            b.push("A.leibniz", forall(&ab, eq("(delta (* a b))", "(+ (* (delta a) b) (* a (delta b)))")))?;
            no_minimal_idempotent(&mut b)?;
            b
        }
        "T_f" => {
            let mut b = Builder::new(lattice_ring_signature());
            ring_axioms(&mut b)?;
            lattice_ring(&mut b)?;
            b
        }
        "T_reg" => {
            at_least("n", n, 1)?;
            let mut b = Builder::new(lattice_ring_signature());
            ring_axioms(&mut b)?;
            regular(&mut b)?;
            lattice_ring(&mut b)?;
            no_minimal_idempotent(&mut b)?;
            monic_roots(&mut b, (1..=n).filter(|d| d % 2 == 1))?;
            let sqrt = imp(&eq("(meet x 0)", "0"), &exists(&one("y"), eq("(* y y)", "x")));
            b.push("T_reg.sqrt", forall(&one("x"), sqrt))?;
            b
        }
        "T_v" => {
            let mut b = Builder::new(valued_ring_signature());
            t_v(&mut b)?;
            b
        }
        "char0" => {
            at_least("n", n, 1)?;
            let mut b = Builder::new(Signature::ring());
            char0(&mut b, n)?;
            b
        }
        "T_reg_v_0" => {
            at_least("n", n, 1)?;
            let mut b = Builder::new(valued_ring_signature());
            ring_axioms(&mut b)?;
            regular(&mut b)?;
            t_v(&mut b)?;
            char0(&mut b, n)?;
            no_minimal_idempotent(&mut b)?;
            monic_roots(&mut b, 1..=n)?;
            b
        }
        "T_reg_v_p" => {
            at_least("n", n, 1)?;
            at_least("p", params.p, 2)?;
            let p = params.p;
            let mut b = Builder::new(valued_ring_signature());
            ring_axioms(&mut b)?;
            regular(&mut b)?;
            t_v(&mut b)?;
            char0(&mut b, n)?;
            no_minimal_idempotent(&mut b)?;
            for d in 2..=n {
                let us = vars("u", 0..d - 1);
                let mut terms = vec![power("x", d), power("x", d - 1)];
                terms.extend(us.iter().enumerate().rev().map(|(j, u)| if j == 0 { u.clone() } else { mul(u, &power("x", j)) }));
                let small: Vec<String> = us.iter().map(|u| m(u)).collect();
                let root = exists(&one("x"), eq(&sum(&terms), "0"));
                let body = if us.is_empty() { root } else { imp(&and(&small), &root) };
                b.push_flagged(format!("T_reg_v_p.henselian.{d}"), forall(&us, body), true)?;
            }
            let discrete = imp("(Div x y)", &format!("(div {} y)", mul(&numeral(p), "x")));
            b.push("T_reg_v_p.discrete", forall(&names(&["x", "y"]), discrete))?;
            for k in 2..=n {
                let cosets: Vec<String> = (0..k)
                    .map(|l| eq(&product(&["a".into(), "e".into(), power(&numeral(p), l)]), &power("b", k)))
                    .collect();
                let body = imp(&ne("a", "0"), &and(&[o("e"), o("e'"), eq("(* e e')", "1"), or(&cosets)]));
                b.push(format!("T_reg_v_p.z_group.{k}"), forall(&one("a"), exists(&names(&["b", "e", "e'"]), body)))?;
            }
            let falling = product(&(0..p).map(|j| if j == 0 { "x".into() } else { sub("x", &numeral(j)) }).collect::<Vec<_>>());
            b.push("T_reg_v_p.residue", forall(&one("x"), imp(&o("x"), &m(&falling))))?;
            b
        }
        "pair" => {
            let mut b = Builder::new(Signature::ring_pair());
            pair_axioms(&mut b)?;
            b
        }
        "Dt_n_k" => {
            at_least("n", n, 1)?;
            at_least("k", params.k, 1)?;
            let k = params.k;
            let mut b = Builder::new(dt_signature(n, k)?);
            complement_pair(&mut b, "Dt1_1", 1, dt_dependence(1, 1, false), dt_dependence(1, 1, true))?;
            if (n, k) != (1, 1) {
                complement_pair(&mut b, &dt_name(n, k), n, dt_dependence(n, k, false), dt_dependence(n, k, true))?;
            }
            b.push("P.dagger", forall(&one("x"), iff("(not (P x))", "(Dt1_1 x)")))?;
            b
        }
        "ell_n" => {
            at_least("n", n, 1)?;
            let mut b = Builder::new(ell_signature(&[n])?);
            complement_pair(&mut b, &ell_name(n), n, ell_dependence(n, false), ell_dependence(n, true))?;
            b.push("P.dagger", forall(&one("x"), iff("(not (P x))", "(ell2 1 x)")))?;
            b
        }
        "lambda_n_i" => {
            at_least("n", n, 1)?;
            if params.i == 0 || params.i > n {
                return Err(AxiomError::Index { i: params.i, n });
            }
            let lam = format!("lam{n}_{}", params.i);
            let mut sig = ell_signature(&[n, n + 1])?.with_function(&lam, n + 1);
            sig.name = format!("ring_P_{lam}");
            let mut b = Builder::new(sig);
            let xs = vars("x", 1..n + 1);
            let zs = vars("z", 1..n + 1);
            let mut xs_y = xs.clone();
            xs_y.push("y".into());
            let in_span = exists(
                &zs,
                and(&[
                    and(&zs.iter().map(|z| format!("(P {z})")).collect::<Vec<_>>()),
                    eq("y", &sum(&xs.iter().zip(&zs).map(|(x, z)| mul(x, z)).collect::<Vec<_>>())),
                    eq(&zs[params.i - 1], "z"),
                ]),
            );
            let dependent = and(&[rel_app(&ell_name(n), &xs), not(&rel_app(&ell_name(n + 1), &xs_y)), in_span]);
            let independent = and(&[rel_app(&ell_name(n + 1), &xs_y), eq("z", "0")]);
            let mut args = vec!["y".to_string()];
            args.extend(xs.iter().cloned());
            let lhs = eq("z", &format!("({lam} {})", args.join(" ")));
            let mut all = args.clone();
            all.push("z".into());
            b.push(format!("{lam}.def"), forall(&all, iff(&lhs, &or(&[dependent, independent]))))?;
            b
        }
        "chi_order" => {
            let sig = lattice_ring_signature().with_relation("chi", 2).with_name("ring_meet_chi");
            let mut b = Builder::new(sig);
            b.push("chi_order.def", forall(&names(&["x", "y"]), iff("(chi x y)", &chi_order_text("x", "y"))))?;
            b
        }
        "chi_valuation" => {
            let mut sig = valued_ring_signature().with_relation("chi", 2);
            sig.name = "ring_div_chi".into();
            let mut b = Builder::new(sig);
            let def = and(&["(div x y)".into(), unit("x", "w")]);
            b.push("chi_valuation.def", forall(&names(&["x", "y"]), iff("(chi x y)", &def)))?;
            b
        }
        "G" => {
            at_least("n", n, 1)?;
            let sig = Signature::ring_delta().with_function("meet", 2).with_name("ring_delta_meet");
            let mut b = Builder::new(sig);
            g_scheme(&mut b, n, params.sigma.as_deref())?;
            b
        }
        "RCVF" => {
            let mut b = Builder::new(rcvf_signature());
            let xy = names(&["x", "y"]);
            b.push("div.dagger", forall(&xy, iff("(not (div x y))", "(Div y x)")))?;
            b.push("Div.dagger", forall(&xy, iff("(not (Div x y))", "(div y x)")))?;
            b
        }
        other => return Err(AxiomError::UnknownTheory(other.into())),
    };
    Ok(AxiomCorpusEntry { theory: name.into(), params: params.clone(), signature: b.sig, axioms: b.axioms })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryReport {
    /// `(label, holds)` in axiom order.
    pub verdicts: Vec<(String, bool)>,
    /// Tuples where a relation and its complement formula agree.
    pub dagger_violations: Vec<DaggerViolation>,
}

impl TheoryReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|(_, h)| *h)
    }
}

/// Evaluates every axiom on `a` and cross-checks each complement
/// definition of the entry's signature.
pub fn evaluate_theory(entry: &AxiomCorpusEntry, a: &FiniteStructure) -> Result<TheoryReport, AxiomError> {
    if !entry.signature.is_subsignature_of(a.sig()) {
        return Err(AxiomError::SignatureMismatch(entry.signature.name.clone()));
    }
    let verdicts = entry
        .axioms
        .iter()
        .map(|ax| Ok((ax.label.clone(), eval_sentence(a, &ax.formula)?)))
        .collect::<Result<Vec<_>, AxiomError>>()?;
    let mut dagger_violations = Vec::new();
    for (r, def) in &entry.signature.dagger {
        let arity = entry.signature.relation_arity(r).expect("validated signature");
        let compiled = Compiled::new(a, def, &Signature::dagger_params(arity))?;
        for args in crate::semantics::tuples(a.size(), arity) {
            let holds = a.holds(r, &args).expect("relation present");
            if compiled.eval(a, &args) == holds {
                dagger_violations.push(DaggerViolation { relation: r.clone(), args, holds });
            }
        }
    }
    Ok(TheoryReport { verdicts, dagger_violations })
}

/// Expands a field by the trivial valuation: `x div y` iff `x != 0` or
/// `y = 0`, and `x Div y` iff `x != 0` and `y = 0`.
pub fn trivially_valued(field: &FiniteStructure) -> Result<FiniteStructure, AxiomError> {
    let zero = field.constant("0").ok_or_else(|| AxiomError::SignatureMismatch("ring".into()))?;
    let mut sig = field.sig().clone();
    for (r, _) in &valued_ring_signature().relations {
        sig = sig.with_relation(r, 2);
    }
    for (r, def) in valued_ring_signature().dagger {
        sig.dagger.insert(r, def);
    }
    Ok(field.expand(
        sig,
        |_, _| 0,
        |_| 0,
        |r, args| match r {
            "div" => args[0] != zero || args[1] == zero,
            _ => args[0] != zero && args[1] == zero,
        },
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{gf, zmod};

    fn verdict(r: &TheoryReport, label: &str) -> bool {
        r.verdicts.iter().find(|(l, _)| l == label).unwrap().1
    }

    #[test]
    fn every_theory_emits_and_roundtrips() {
        for name in THEORIES {
            let e = emit_theory(name, &TheoryParams::default()).unwrap();
            assert!(!e.axioms.is_empty(), "{name}");
            assert!(e.roundtrip_failures().is_empty(), "{name}: {:?}", e.roundtrip_failures());
        }
    }

    #[test]
    fn projector_axiom_text() {
        let e = emit_theory("projector_def", &TheoryParams::default()).unwrap();
        assert_eq!(e.axioms.len(), 1);
        assert_eq!(
            print_formula(&e.axioms[0].formula),
            "(forall a (forall b (exists d (and (= (* (* b d) b) b) (= (* (- (p a b) a) (- 1 (* b d))) 0) (= (* (p a b) b) 0)))))"
        );
        let f = gf(4).unwrap().with_projector().unwrap();
        assert!(evaluate_theory(&e, &f).unwrap().all_hold());
    }

    #[test]
    fn regularity_and_minimal_idempotents() {
        let e = emit_theory("vnr", &TheoryParams::default()).unwrap();
        assert!(evaluate_theory(&e, &zmod(6)).unwrap().all_hold());
        assert!(!verdict(&evaluate_theory(&e, &zmod(4)).unwrap(), "vnr.regular"));
        let a = emit_theory("A", &TheoryParams::default()).unwrap();
        let z6 = zmod(6);
        let sig = Signature::ring_delta();
        let s = z6.expand(sig, |_, _| 0, |_| 0, |_, _| false).unwrap();
        let r = evaluate_theory(&a, &s).unwrap();
        assert!(verdict(&r, "A.leibniz"));
        assert!(!verdict(&r, "no_minimal_idempotent"));
    }

    #[test]
    fn valuation_axioms_on_trivially_valued_fields() {
        let e = emit_theory("T_v", &TheoryParams::default()).unwrap();
        assert_eq!(e.axioms.len(), 6);
        for q in [2, 3, 4, 5] {
            let f = trivially_valued(&gf(q).unwrap()).unwrap();
            let r = evaluate_theory(&e, &f).unwrap();
            assert!(r.all_hold(), "{q}: {:?}", r.verdicts);
            assert!(r.dagger_violations.is_empty());
        }
    }

    #[test]
    fn characteristic_schema_fails_on_finite_fields() {
        let e = emit_theory("char0", &TheoryParams { n: 3, ..TheoryParams::default() }).unwrap();
        let r = evaluate_theory(&e, &gf(3).unwrap()).unwrap();
        assert_eq!(r.verdicts.iter().map(|(_, h)| *h).collect::<Vec<_>>(), [true, true, false]);
    }

    #[test]
    fn ell_complement_shape() {
        let e = emit_theory("ell_n", &TheoryParams { n: 3, ..TheoryParams::default() }).unwrap();
        let def = print_formula(&e.axioms[0].formula);
        assert_eq!(
            def,
            "(forall x1 (forall x2 (forall x3 (and (imp (not (ell3 x1 x2 x3)) (exists z1 (exists z2 (exists z3 (and (or (not (= z1 0)) (not (= z2 0)) (not (= z3 0))) (and (P z1) (P z2) (P z3)) (= (+ (+ (* z1 x1) (* z2 x2)) (* z3 x3)) 0)))))) (imp (exists z1 (exists z2 (exists z3 (and (or (not (= z1 0)) (not (= z2 0)) (not (= z3 0))) (and (P z1) (P z2) (P z3)) (= (+ (+ (* z1 x1) (* z2 x2)) (* z3 x3)) 0))))) (not (ell3 x1 x2 x3)))))))"
        );
        assert!(e.signature.dagger.contains_key("ell3"));
        assert!(e.signature.dagger.contains_key("P"));
    }

    #[test]
    fn monomial_order() {
        assert_eq!(monomials(2, 1), [vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(monomials(2, 2).len(), 6);
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(emit_theory("nope", &TheoryParams::default()), Err(AxiomError::UnknownTheory("nope".into())));
        let zero = TheoryParams { n: 0, ..TheoryParams::default() };
        assert!(matches!(emit_theory("char0", &zero), Err(AxiomError::Bound { .. })));
        let k0 = TheoryParams { k: 0, ..TheoryParams::default() };
        assert!(matches!(emit_theory("Dt_n_k", &k0), Err(AxiomError::Bound { .. })));
        let i = TheoryParams { n: 2, i: 3, ..TheoryParams::default() };
        assert_eq!(emit_theory("lambda_n_i", &i), Err(AxiomError::Index { i: 3, n: 2 }));
        let bad = TheoryParams { sigma: Some("(= q".into()), ..TheoryParams::default() };
        assert!(matches!(emit_theory("G", &bad), Err(AxiomError::Sigma(_))));
    }

    #[test]
    fn signature_mismatch() {
        let e = emit_theory("T_v", &TheoryParams::default()).unwrap();
        assert!(matches!(evaluate_theory(&e, &zmod(3)), Err(AxiomError::SignatureMismatch(_))));
    }

    #[test]
    fn g_instance_mentions_jets() {
        let e = emit_theory("G", &TheoryParams { n: 1, ..TheoryParams::default() }).unwrap();
        let s = print_formula(&e.axioms[0].formula);
        assert!(s.ends_with("(exists g_a (= (delta g_a) (* g_a g_a))))"), "{s}");
        assert!(e.axioms[0].interpretation);
    }
}
