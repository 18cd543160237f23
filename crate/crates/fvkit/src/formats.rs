//! Text formats: signatures (`.sig`), formulas (`.fml`), structures
//! (`.str`), products (`.prod`) and derivation tables.
//!
//! Every file holds one s-expression. References to other files are
//! resolved relative to the directory of the referring file.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fvkit_core::pairs::PairStructure;
use fvkit_core::product::BooleanProduct;
use fvkit_core::semantics::{direct_product, gf, powerset, tuples, zmod, FiniteStructure, StructureBuilder};
use fvkit_core::sexpr::{read_one, Pos, ReadError, Sexp};
use fvkit_core::syntax::{formula_from_sexp, print_formula, Formula, Signature};
use fvkit_core::vnr::{DerivationTable, FiniteRing};

use crate::report::sha256_hex;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: file not found")]
    NotFound { path: PathBuf },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    InFile { path: PathBuf, message: String },
    #[error("{0}")]
    Read(#[from] ReadError),
    #[error("{pos}: {message}")]
    Malformed { pos: Pos, message: String },
}

impl FormatError {
    fn at(s: &Sexp, message: impl Into<String>) -> FormatError {
        FormatError::Malformed { pos: s.pos(), message: message.into() }
    }

    fn in_file(self, path: &Path) -> FormatError {
        match self {
            FormatError::Malformed { .. } | FormatError::Read(_) => {
                FormatError::InFile { path: path.to_path_buf(), message: self.to_string() }
            }
            other => other,
        }
    }
}

type Result<T> = std::result::Result<T, FormatError>;

/// Reads input files and records the SHA-256 of each one read.
#[derive(Debug, Default)]
pub struct Files {
    hashes: RefCell<BTreeMap<String, String>>,
}

impl Files {
    pub fn new() -> Files {
        Files::default()
    }

    /// Path (as given) to hex digest, for every file read so far.
    pub fn hashes(&self) -> BTreeMap<String, String> {
        self.hashes.borrow().clone()
    }

    pub fn read_text(&self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => FormatError::NotFound { path: path.to_path_buf() },
            _ => FormatError::Io { path: path.to_path_buf(), source: e },
        })?;
        self.hashes.borrow_mut().insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn read_sexp(&self, path: &Path) -> Result<Sexp> {
        read_one(&self.read_text(path)?).map_err(|e| FormatError::from(e).in_file(path))
    }

    pub fn signature(&self, path: &Path) -> Result<Signature> {
        signature_from_sexp(&self.read_sexp(path)?).map_err(|e| e.in_file(path))
    }

    /// A builtin signature name or a path.
    pub fn signature_ref(&self, text: &str, base: &Path) -> Result<Signature> {
        match Signature::builtin(text) {
            Some(sig) => Ok(sig),
            None => self.signature(&base.join(text)),
        }
    }

    pub fn formula(&self, path: &Path, sig: &Signature) -> Result<Formula> {
        let s = self.read_sexp(path)?;
        formula_from_sexp(&s, sig).map_err(|e| FormatError::InFile { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn structure(&self, path: &Path) -> Result<FiniteStructure> {
        structure_from_sexp(&self.read_sexp(path)?, &base_dir(path), self).map_err(|e| e.in_file(path))
    }

    /// A path or inline text such as `(builtin gf 4)`.
    pub fn structure_ref(&self, text: &str, base: &Path) -> Result<FiniteStructure> {
        if text.trim_start().starts_with('(') {
            structure_from_sexp(&read_one(text)?, base, self)
        } else {
            self.structure(&base.join(text))
        }
    }

    pub fn product(&self, path: &Path) -> Result<BooleanProduct> {
        product_from_sexp(&self.read_sexp(path)?, &base_dir(path), self).map_err(|e| e.in_file(path))
    }

    /// A path or inline `(product ..)` text.
    pub fn product_ref(&self, text: &str, base: &Path) -> Result<BooleanProduct> {
        if text.trim_start().starts_with('(') {
            product_from_sexp(&read_one(text)?, base, self)
        } else {
            self.product(&base.join(text))
        }
    }

    pub fn derivation(&self, path: &Path, r: &FiniteRing) -> Result<DerivationTable> {
        derivation_from_sexp(&self.read_sexp(path)?, r).map_err(|e| e.in_file(path))
    }
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp]> {
    s.as_list().ok_or_else(|| FormatError::at(s, format!("expected a list for {what}")))
}

fn atom<'a>(s: &'a Sexp, what: &str) -> Result<&'a str> {
    s.as_atom().ok_or_else(|| FormatError::at(s, format!("expected {what}")))
}

fn number(s: &Sexp) -> Result<usize> {
    let a = atom(s, "a number")?;
    a.parse().map_err(|_| FormatError::at(s, format!("`{a}` is not a nonnegative integer")))
}

fn tagged<'a>(s: &'a Sexp, tag: &str) -> Result<&'a [Sexp]> {
    match s.head() {
        Some(h) if h == tag => Ok(&list(s, tag)?[1..]),
        _ => Err(FormatError::at(s, format!("expected `({tag} ...)`"))),
    }
}

fn symbol_arity(s: &Sexp) -> Result<(String, usize)> {
    match list(s, "a symbol declaration")? {
        [sym, arity] => Ok((atom(sym, "a symbol")?.to_string(), number(arity)?)),
        _ => Err(FormatError::at(s, "expected `(<symbol> <arity>)`")),
    }
}

/// `(signature <name> (functions ..) (constants ..) (relations ..) (dagger ..))`
pub fn signature_from_sexp(s: &Sexp) -> Result<Signature> {
    let items = tagged(s, "signature")?;
    let (name, sections) = items.split_first().ok_or_else(|| FormatError::at(s, "signature needs a name"))?;
    let mut sig = Signature::new(atom(name, "a signature name")?);
    let mut daggers = Vec::new();
    for sec in sections {
        let body = &list(sec, "a signature section")?[1..];
        match sec.head() {
            Some("functions") => {
                for d in body {
                    sig.functions.push(symbol_arity(d)?);
                }
            }
            Some("constants") => {
                for c in body {
                    sig.constants.push(atom(c, "a constant")?.to_string());
                }
            }
            Some("relations") => {
                for d in body {
                    sig.relations.push(symbol_arity(d)?);
                }
            }
            Some("dagger") => daggers.extend(body),
            _ => return Err(FormatError::at(sec, "unknown signature section")),
        }
    }
    sig.validate().map_err(|e| FormatError::at(s, e.to_string()))?;
    for d in daggers {
        let [rel, def] = list(d, "a complement definition")? else {
            return Err(FormatError::at(d, "expected `(<relation> <formula>)`"));
        };
        let rel = atom(rel, "a relation")?;
        let f = formula_from_sexp(def, &sig).map_err(|e| FormatError::at(def, e.to_string()))?;
        sig = sig.with_dagger(rel, f).map_err(|e| FormatError::at(d, e.to_string()))?;
    }
    Ok(sig)
}

pub fn print_signature(sig: &Signature) -> String {
    let mut out = format!("(signature {}", sig.name);
    let decls = |xs: &[(String, usize)]| xs.iter().map(|(s, k)| format!(" ({s} {k})")).collect::<String>();
    if !sig.functions.is_empty() {
        let _ = write!(out, "\n  (functions{})", decls(&sig.functions));
    }
    if !sig.constants.is_empty() {
        let _ = write!(out, "\n  (constants {})", sig.constants.join(" "));
    }
    if !sig.relations.is_empty() {
        let _ = write!(out, "\n  (relations{})", decls(&sig.relations));
    }
    if !sig.dagger.is_empty() {
        out.push_str("\n  (dagger");
        for (rel, f) in &sig.dagger {
            let _ = write!(out, "\n    ({rel} {})", print_formula(f));
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

/// A builtin signature name, a path to a `.sig` file, or an inline
/// `(signature ..)` form.
pub fn resolve_signature(s: &Sexp, base: &Path, files: &Files) -> Result<Signature> {
    match s.as_atom() {
        Some(name) => match Signature::builtin(name) {
            Some(sig) => Ok(sig),
            None => files.signature(&base.join(name)),
        },
        None => signature_from_sexp(s),
    }
}

fn builtin_structure(s: &Sexp, base: &Path, files: &Files) -> Result<FiniteStructure> {
    let args = tagged(s, "builtin")?;
    let (kind, rest) = args.split_first().ok_or_else(|| FormatError::at(s, "builtin needs a kind"))?;
    let one_number = || match rest {
        [n] => number(n),
        _ => Err(FormatError::at(s, "expected one numeric argument")),
    };
    let fail = |e: &dyn std::fmt::Display| FormatError::at(s, e.to_string());
    match atom(kind, "a builtin kind")? {
        "zmod" => match one_number()? {
            0 | 1 => Err(FormatError::at(s, "zmod needs a modulus of at least 2")),
            n => Ok(zmod(n)),
        },
        "gf" => gf(one_number()?).map_err(|e| fail(&e)),
        "powerset" => match one_number()? {
            k @ 0..=6 => Ok(powerset(k)),
            _ => Err(FormatError::at(s, "powerset supports at most 6 atoms")),
        },
        "dual" => FiniteRing::dual_numbers(one_number()?).map(|r| r.to_structure()).map_err(|e| fail(&e)),
        "gf-pair" => match rest {
            [big, small] => {
                PairStructure::subfield(number(big)?, number(small)?).map(|p| p.ambient().clone()).map_err(|e| fail(&e))
            }
            _ => Err(FormatError::at(s, "expected `(builtin gf-pair <big> <small>)`")),
        },
        "product" => {
            let factors = rest.iter().map(|f| resolve_structure(f, base, files)).collect::<Result<Vec<_>>>()?;
            if factors.is_empty() {
                return Err(FormatError::at(s, "product needs at least one factor"));
            }
            direct_product(&factors).map_err(|e| fail(&e))
        }
        other => Err(FormatError::at(kind, format!("unknown builtin `{other}`"))),
    }
}

/// `(structure ..)` or `(builtin ..)`.
pub fn structure_from_sexp(s: &Sexp, base: &Path, files: &Files) -> Result<FiniteStructure> {
    if s.head() == Some("builtin") {
        return builtin_structure(s, base, files);
    }
    let items = tagged(s, "structure")?;
    let (name, sections) = items.split_first().ok_or_else(|| FormatError::at(s, "structure needs a name"))?;
    let name = atom(name, "a structure name")?;
    let section = |tag: &str| sections.iter().find(|x| x.head() == Some(tag));
    let sig_sec = section("signature").ok_or_else(|| FormatError::at(s, "missing `(signature ..)`"))?;
    let sig = match tagged(sig_sec, "signature")? {
        [r] => resolve_signature(r, base, files)?,
        _ => signature_from_sexp(sig_sec)?,
    };
    let size_sec = section("size").ok_or_else(|| FormatError::at(s, "missing `(size n)`"))?;
    let size = match tagged(size_sec, "size")? {
        [n] => number(n)?,
        _ => return Err(FormatError::at(size_sec, "expected `(size n)`")),
    };
    let mut b = StructureBuilder::new(name, sig, size).map_err(|e| FormatError::at(s, e.to_string()))?;
    for sec in sections {
        let body = list(sec, "a structure section")?;
        let err = |e: fvkit_core::semantics::StructureError| FormatError::at(sec, e.to_string());
        match sec.head() {
            Some("signature") | Some("size") => {}
            Some("fun") => {
                let sym = atom(body.get(1).ok_or_else(|| FormatError::at(sec, "fun needs a symbol"))?, "a symbol")?;
                for row in &body[2..] {
                    let nums = list(row, "a table row")?.iter().map(number).collect::<Result<Vec<_>>>()?;
                    let (value, args) = nums.split_last().ok_or_else(|| FormatError::at(row, "empty table row"))?;
                    b.set_function(sym, args, *value).map_err(err)?;
                }
            }
            Some("const") => match &body[1..] {
                [sym, v] => b.set_constant(atom(sym, "a constant")?, number(v)?).map_err(err)?,
                _ => return Err(FormatError::at(sec, "expected `(const <sym> <val>)`")),
            },
            Some("rel") => {
                let sym = atom(body.get(1).ok_or_else(|| FormatError::at(sec, "rel needs a symbol"))?, "a symbol")?;
                for row in &body[2..] {
                    let nums = list(row, "a tuple")?.iter().map(number).collect::<Result<Vec<_>>>()?;
                    b.add_tuple(sym, &nums).map_err(err)?;
                }
            }
            _ => return Err(FormatError::at(sec, "unknown structure section")),
        }
    }
    b.build().map_err(|e| FormatError::at(s, e.to_string()))
}

/// A path to a `.str` file, or an inline `(builtin ..)` / `(structure ..)`.
pub fn resolve_structure(s: &Sexp, base: &Path, files: &Files) -> Result<FiniteStructure> {
    match s.as_atom() {
        Some(path) => files.structure(&base.join(path)),
        None => structure_from_sexp(s, base, files),
    }
}

/// The full tables of `a`, with the signature inlined unless it is a
/// builtin.
pub fn print_structure(a: &FiniteStructure) -> String {
    let sig = a.sig();
    let sig_text = match Signature::builtin(&sig.name) {
        Some(b) if &b == sig => sig.name.clone(),
        _ => print_signature(sig).trim_end().replace('\n', "\n    "),
    };
    let name = if fvkit_core::syntax::is_identifier(&a.name) { a.name.clone() } else { "structure".into() };
    let mut out = format!("(structure {name}\n  (signature {sig_text})\n  (size {})", a.size());
    for (f, k) in &sig.functions {
        let _ = write!(out, "\n  (fun {f}");
        for args in tuples(a.size(), *k) {
            let v = a.apply(f, &args).unwrap();
            let row: Vec<String> = args.iter().chain([&v]).map(usize::to_string).collect();
            let _ = write!(out, " ({})", row.join(" "));
        }
        out.push(')');
    }
    for c in &sig.constants {
        let _ = write!(out, "\n  (const {c} {})", a.constant(c).unwrap());
    }
    for (r, k) in &sig.relations {
        let _ = write!(out, "\n  (rel {r}");
        for args in tuples(a.size(), *k).filter(|t| a.holds(r, t) == Some(true)) {
            let row: Vec<String> = args.iter().map(usize::to_string).collect();
            let _ = write!(out, " ({})", row.join(" "));
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

/// `(product (factors <strref>..) (carrier full | (elements (..)..)))`
pub fn product_from_sexp(s: &Sexp, base: &Path, files: &Files) -> Result<BooleanProduct> {
    let sections = tagged(s, "product")?;
    let section = |tag: &str| sections.iter().find(|x| x.head() == Some(tag));
    let fs = section("factors").ok_or_else(|| FormatError::at(s, "missing `(factors ..)`"))?;
    let factors = tagged(fs, "factors")?.iter().map(|f| resolve_structure(f, base, files)).collect::<Result<Vec<_>>>()?;
    let err = |e: fvkit_core::product::ProductError| FormatError::at(s, e.to_string());
    let Some(carrier) = section("carrier") else {
        return BooleanProduct::full(factors).map_err(err);
    };
    match tagged(carrier, "carrier")? {
        [c] if c.as_atom() == Some("full") => BooleanProduct::full(factors).map_err(err),
        [c] if c.head() == Some("elements") => {
            let elements = tagged(c, "elements")?
                .iter()
                .map(|e| list(e, "an element")?.iter().map(number).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            BooleanProduct::with_carrier(factors, elements).map_err(err)
        }
        _ => Err(FormatError::at(carrier, "expected `full` or `(elements ..)`")),
    }
}

/// `(derivation (<elem> <image>)..)`; every element of `r` must appear.
pub fn derivation_from_sexp(s: &Sexp, r: &FiniteRing) -> Result<DerivationTable> {
    let mut table = vec![None; r.size()];
    for row in tagged(s, "derivation")? {
        let [x, y] = list(row, "a derivation entry")? else {
            return Err(FormatError::at(row, "expected `(<elem> <image>)`"));
        };
        let (x, y) = (number(x)?, number(y)?);
        if x >= r.size() || y >= r.size() {
            return Err(FormatError::at(row, format!("element out of range for a ring of order {}", r.size())));
        }
        match table[x] {
            Some(old) if old != y => return Err(FormatError::at(row, format!("conflicting images for {x}"))),
            _ => table[x] = Some(y),
        }
    }
    table
        .iter()
        .enumerate()
        .map(|(x, v)| v.ok_or_else(|| FormatError::at(s, format!("no image for element {x}"))))
        .collect::<Result<Vec<_>>>()
        .map(DerivationTable)
}

pub fn print_derivation(d: &DerivationTable) -> String {
    let rows: Vec<String> = d.0.iter().enumerate().map(|(x, y)| format!("({x} {y})")).collect();
    format!("(derivation {})\n", rows.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fvkit_core::syntax::parse_formula;

    fn sexp(text: &str) -> Sexp {
        read_one(text).unwrap()
    }

    #[test]
    fn signature_roundtrip() {
        let text = "(signature vr (functions (+ 2) (- 2) (* 2)) (constants 0 1) (relations (div 2) (Div 2)) \
                    (dagger (div (Div x2 x1)) (Div (div x2 x1))))";
        let sig = signature_from_sexp(&sexp(text)).unwrap();
        assert_eq!(sig.relation_arity("Div"), Some(2));
        assert_eq!(sig.dagger.len(), 2);
        assert_eq!(signature_from_sexp(&sexp(&print_signature(&sig))).unwrap(), sig);
    }

    #[test]
    fn dagger_must_be_positive() {
        let text = "(signature s (relations (R 1)) (dagger (R (not (R x1)))))";
        let err = signature_from_sexp(&sexp(text)).unwrap_err();
        assert!(err.to_string().contains("positive existential"), "{err}");
    }

    #[test]
    fn structure_tables() {
        let text = "(structure two (signature ring) (size 2) \
                    (fun + (0 0 0) (0 1 1) (1 0 1) (1 1 0)) (fun - (0 0 0) (0 1 1) (1 0 1) (1 1 0)) \
                    (fun * (0 0 0) (0 1 0) (1 0 0) (1 1 1)) (const 0 0) (const 1 1))";
        let a = structure_from_sexp(&sexp(text), Path::new("."), &Files::new()).unwrap();
        assert!(FiniteRing::from_structure(&a).unwrap().is_field());
        let again = structure_from_sexp(&sexp(&print_structure(&a)), Path::new("."), &Files::new()).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn incomplete_table_is_reported() {
        let text = "(structure s (signature ring) (size 2) (fun + (0 0 0)))";
        let err = structure_from_sexp(&sexp(text), Path::new("."), &Files::new()).unwrap_err();
        assert!(err.to_string().contains("incomplete"), "{err}");
    }

    #[test]
    fn builtins() {
        let base = Path::new(".");
        let files = Files::new();
        assert_eq!(structure_from_sexp(&sexp("(builtin zmod 6)"), base, &files).unwrap().size(), 6);
        assert_eq!(structure_from_sexp(&sexp("(builtin powerset 3)"), base, &files).unwrap().size(), 8);
        assert_eq!(structure_from_sexp(&sexp("(builtin dual 2)"), base, &files).unwrap().size(), 4);
        let p = structure_from_sexp(&sexp("(builtin gf-pair 4 2)"), base, &files).unwrap();
        assert_eq!((0..4).filter(|&x| p.holds("P", &[x]) == Some(true)).count(), 2);
        let prod = structure_from_sexp(&sexp("(builtin product (builtin gf 2) (builtin gf 3))"), base, &files).unwrap();
        assert_eq!(prod.size(), 6);
        assert!(structure_from_sexp(&sexp("(builtin gf 6)"), base, &files).is_err());
        assert!(structure_from_sexp(&sexp("(builtin zmod 1)"), base, &files).is_err());
    }

    #[test]
    fn products() {
        let base = Path::new(".");
        let files = Files::new();
        let full = product_from_sexp(&sexp("(product (factors (builtin gf 2) (builtin gf 3)) (carrier full))"), base, &files).unwrap();
        assert_eq!(full.len(), 6);
        let diag = "(product (factors (builtin gf 2) (builtin gf 2)) (carrier (elements (0 0) (1 1))))";
        assert_eq!(product_from_sexp(&sexp(diag), base, &files).unwrap().len(), 2);
        let bad = "(product (factors (builtin gf 2) (builtin gf 2)) (carrier (elements (0 0) (0 1))))";
        assert!(product_from_sexp(&sexp(bad), base, &files).is_err());
    }

    #[test]
    fn derivations() {
        let r = FiniteRing::dual_numbers(2).unwrap();
        let d = derivation_from_sexp(&sexp("(derivation (0 0) (1 0) (2 1) (3 1))"), &r).unwrap();
        assert_eq!(d, DerivationTable::dual_derivative(2));
        assert_eq!(derivation_from_sexp(&sexp(&print_derivation(&d)), &r).unwrap(), d);
        assert!(derivation_from_sexp(&sexp("(derivation (0 0))"), &r).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = structure_from_sexp(&sexp("(structure s (signature ring)\n (size x))"), Path::new("."), &Files::new()).unwrap_err();
        assert!(err.to_string().starts_with("2:8"), "{err}");
        assert!(parse_formula("(= x", &Signature::ring()).is_err());
    }
}
