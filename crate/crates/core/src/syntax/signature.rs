use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{is_identifier, Formula};

/// Words reserved by the formula grammar.
pub const KEYWORDS: &[&str] = &["=", "not", "and", "or", "imp", "exists", "forall"];

/// Function, constant and relation symbols, plus optional positive
/// existential definitions of relation complements.
///
/// A complement definition for an `n`-ary relation uses exactly the free
/// variables `x1 … xn`, where `xi` stands for the `i`-th argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub functions: Vec<(String, usize)>,
    pub constants: Vec<String>,
    pub relations: Vec<(String, usize)>,
    pub dagger: BTreeMap<String, Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol `{0}` declared more than once")]
    Duplicate(String),
    #[error("symbol `{0}` is reserved")]
    Reserved(String),
    #[error("symbol `{0}` must have arity >= 1")]
    ZeroArity(String),
    #[error("complement definition for unknown relation `{0}`")]
    DaggerUnknown(String),
    #[error("complement definition for `{rel}` must have free variables exactly {expected:?}, found {found:?}")]
    DaggerFreeVars { rel: String, expected: Vec<String>, found: Vec<String> },
    #[error("complement definition for `{0}` is not positive existential")]
    DaggerNotPositive(String),
    #[error("complement definition for `{0}`: {1}")]
    DaggerIllTyped(String, String),
}

impl Signature {
    pub fn new(name: impl Into<String>) -> Signature {
        Signature {
            name: name.into(),
            functions: Vec::new(),
            constants: Vec::new(),
            relations: Vec::new(),
            dagger: BTreeMap::new(),
        }
    }

    pub fn with_function(mut self, sym: &str, arity: usize) -> Signature {
        self.functions.push((sym.into(), arity));
        self
    }

    pub fn with_constant(mut self, sym: &str) -> Signature {
        self.constants.push(sym.into());
        self
    }

    pub fn with_relation(mut self, sym: &str, arity: usize) -> Signature {
        self.relations.push((sym.into(), arity));
        self
    }

    pub fn with_name(mut self, name: &str) -> Signature {
        self.name = name.into();
        self
    }

    /// Commutative rings with identity: `+ - *`, `0`, `1`.
    pub fn ring() -> Signature {
        Signature::new("ring")
            .with_function("+", 2)
            .with_function("-", 2)
            .with_function("*", 2)
            .with_constant("0")
            .with_constant("1")
    }

    /// Rings expanded by the projector `p`.
    pub fn ring_projector() -> Signature {
        Signature::ring().with_function(super::PROJECTOR, 2).with_name("ring_p")
    }

    /// Rings expanded by a unary predicate `P`.
    pub fn ring_pair() -> Signature {
        Signature::ring().with_relation("P", 1).with_name("ring_P")
    }

    /// Rings expanded by a derivation `delta`.
    pub fn ring_delta() -> Signature {
        Signature::ring().with_function(super::DELTA, 1).with_name("ring_delta")
    }

    /// Boolean algebras: `meet join compl`, `0`, `1`.
    pub fn boolean_algebra() -> Signature {
        Signature::new("ba")
            .with_function("meet", 2)
            .with_function("join", 2)
            .with_function("compl", 1)
            .with_constant("0")
            .with_constant("1")
    }

    /// Looks up a builtin signature by name.
    pub fn builtin(name: &str) -> Option<Signature> {
        match name {
            "ring" => Some(Signature::ring()),
            "ring_p" => Some(Signature::ring_projector()),
            "ring_P" => Some(Signature::ring_pair()),
            "ring_delta" => Some(Signature::ring_delta()),
            "ba" => Some(Signature::boolean_algebra()),
            _ => None,
        }
    }

    pub fn function_arity(&self, sym: &str) -> Option<usize> {
        self.functions.iter().find(|(s, _)| s == sym).map(|(_, a)| *a)
    }

    pub fn relation_arity(&self, sym: &str) -> Option<usize> {
        self.relations.iter().find(|(s, _)| s == sym).map(|(_, a)| *a)
    }

    pub fn has_constant(&self, sym: &str) -> bool {
        self.constants.iter().any(|c| c == sym)
    }

    pub fn function_index(&self, sym: &str) -> Option<usize> {
        self.functions.iter().position(|(s, _)| s == sym)
    }

    pub fn constant_index(&self, sym: &str) -> Option<usize> {
        self.constants.iter().position(|s| s == sym)
    }

    pub fn relation_index(&self, sym: &str) -> Option<usize> {
        self.relations.iter().position(|(s, _)| s == sym)
    }

    pub fn is_symbol(&self, sym: &str) -> bool {
        self.function_arity(sym).is_some() || self.relation_arity(sym).is_some() || self.has_constant(sym)
    }

    /// True when every symbol of `self` is declared in `other` with the same
    /// kind and arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.functions.iter().all(|(s, a)| other.function_arity(s) == Some(*a))
            && self.constants.iter().all(|c| other.has_constant(c))
            && self.relations.iter().all(|(s, a)| other.relation_arity(s) == Some(*a))
    }

    /// Same symbols with the same kinds and arities, ignoring order and name.
    pub fn same_symbols(&self, other: &Signature) -> bool {
        self.is_subsignature_of(other) && other.is_subsignature_of(self)
    }

    /// Adds a complement definition; parse it against `self` first.
    pub fn with_dagger(mut self, rel: &str, def: Formula) -> Result<Signature, SignatureError> {
        self.dagger.insert(rel.into(), def);
        self.validate()?;
        Ok(self)
    }

    /// Argument variable names `x1 … xn` used by complement definitions.
    pub fn dagger_params(arity: usize) -> Vec<String> {
        (1..=arity).map(|i| format!("x{i}")).collect()
    }

    pub fn validate(&self) -> Result<(), SignatureError> {
        let mut seen = BTreeSet::new();
        let all = self
            .functions
            .iter()
            .map(|(s, a)| (s, Some(*a)))
            .chain(self.constants.iter().map(|s| (s, None)))
            .chain(self.relations.iter().map(|(s, a)| (s, Some(*a))));
        for (sym, arity) in all {
            if KEYWORDS.contains(&sym.as_str()) || sym.is_empty() || sym.contains(|c: char| c == '(' || c == ')' || c == ';' || c.is_whitespace()) {
                return Err(SignatureError::Reserved(sym.clone()));
            }
            if !seen.insert(sym.clone()) {
                return Err(SignatureError::Duplicate(sym.clone()));
            }
            if arity == Some(0) {
                return Err(SignatureError::ZeroArity(sym.clone()));
            }
        }
        for (rel, def) in &self.dagger {
            let arity = self.relation_arity(rel).ok_or_else(|| SignatureError::DaggerUnknown(rel.clone()))?;
            let expected = Signature::dagger_params(arity);
            let found = def.free_vars();
            let expected_set: BTreeSet<&String> = expected.iter().collect();
            if found.iter().collect::<BTreeSet<_>>() != expected_set {
                return Err(SignatureError::DaggerFreeVars { rel: rel.clone(), expected, found });
            }
            if !is_positive_existential(def) {
                return Err(SignatureError::DaggerNotPositive(rel.clone()));
            }
            def.check(self).map_err(|e| SignatureError::DaggerIllTyped(rel.clone(), e.to_string()))?;
        }
        Ok(())
    }

    /// Symbols that cannot double as variable names.
    pub fn symbol_names(&self) -> BTreeSet<&str> {
        self.functions
            .iter()
            .map(|(s, _)| s.as_str())
            .chain(self.constants.iter().map(String::as_str))
            .chain(self.relations.iter().map(|(s, _)| s.as_str()))
            .collect()
    }

    /// Whether `name` may be used as a variable under this signature.
    pub fn is_variable_name(&self, name: &str) -> bool {
        is_identifier(name) && !self.is_symbol(name)
    }
}

/// Built from atoms with `and`, `or` and `exists` only.
pub fn is_positive_existential(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) | Formula::Rel(..) => true,
        Formula::And(gs) | Formula::Or(gs) => gs.iter().all(is_positive_existential),
        Formula::Exists(_, g) => is_positive_existential(g),
        Formula::Not(_) | Formula::Imp(..) | Formula::Forall(..) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn rejects_duplicates_and_reserved() {
        let s = Signature::ring().with_relation("+", 2);
        assert_eq!(s.validate(), Err(SignatureError::Duplicate("+".into())));
        let s = Signature::ring().with_relation("and", 2);
        assert_eq!(s.validate(), Err(SignatureError::Reserved("and".into())));
        let s = Signature::ring().with_function("f", 0);
        assert_eq!(s.validate(), Err(SignatureError::ZeroArity("f".into())));
    }

    #[test]
    fn dagger_requires_positive_existential_on_argument_variables() {
        let base = Signature::ring().with_relation("div", 2).with_relation("Div", 2);
        let ok = parse_formula("(Div x2 x1)", &base).unwrap();
        assert!(base.clone().with_dagger("div", ok).is_ok());

        let neg = parse_formula("(not (div x1 x2))", &base).unwrap();
        assert_eq!(base.clone().with_dagger("div", neg), Err(SignatureError::DaggerNotPositive("div".into())));

        let wrong = parse_formula("(Div x1 y)", &base).unwrap();
        assert!(matches!(
            base.clone().with_dagger("div", wrong),
            Err(SignatureError::DaggerFreeVars { .. })
        ));
    }
}
