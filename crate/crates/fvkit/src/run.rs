//! `fvkit run`: a TOML file naming suites and their inputs.
//!
//! ```toml
//! seed = 7
//!
//! [[suite]]
//! name = "fv-core"
//! kind = "fv-verify"
//! products = ["f2f3.prod", "(product (factors (builtin gf 2) (builtin gf 4)))"]
//! formulas = ["unit.fml"]
//! corpus = { depth = 1, free = 1, sample = 40 }
//! ```
//!
//! Paths are relative to the config file. Structure and product entries
//! may also be inline s-expressions.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use fvkit_core::axioms::TheoryParams;
use fvkit_core::corpus::{corpus_indices, formula_at, CorpusSpec};
use fvkit_core::fv::{FvConfig, MAX_CAP};
use fvkit_core::product::BooleanProduct;
use fvkit_core::semantics::FiniteStructure;
use fvkit_core::syntax::{Formula, Signature};
use fvkit_core::vnr::{DerivationTable, FiniteRing};

use crate::formats::{FormatError, Files};
use crate::report::{Report, SuiteReport};
use crate::suites::{self, Named};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    FvVerify,
    Projector,
    Vnr,
    Pairs,
    Dense,
    Axioms,
    Burris,
    Claim,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::FvVerify => "fv-verify",
            SuiteKind::Projector => "projector",
            SuiteKind::Vnr => "vnr",
            SuiteKind::Pairs => "pairs",
            SuiteKind::Dense => "dense",
            SuiteKind::Axioms => "axioms",
            SuiteKind::Burris => "burris",
            SuiteKind::Claim => "claim",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub depth: usize,
    pub free: usize,
    pub sample: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationRef {
    pub ring: String,
    pub table: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: Option<String>,
    pub kind: SuiteKind,
    /// Signature for formula files; `ring` by default.
    pub signature: Option<String>,
    #[serde(default)]
    pub products: Vec<String>,
    #[serde(default)]
    pub structures: Vec<String>,
    #[serde(default)]
    pub rings: Vec<String>,
    #[serde(default)]
    pub formulas: Vec<String>,
    pub corpus: Option<CorpusConfig>,
    #[serde(default)]
    pub derivations: Vec<DerivationRef>,
    pub chi: Option<String>,
    pub d_max: Option<usize>,
    pub theory: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub i: Option<usize>,
    pub p: Option<usize>,
    pub sigma: Option<String>,
    #[serde(default)]
    pub expect_all_hold: bool,
    pub cap: Option<usize>,
    pub dedup: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub max_factors: Option<usize>,
    pub max_depth: Option<usize>,
    #[serde(rename = "suite", default)]
    pub suites: Vec<SuiteConfig>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_factors: Option<usize>,
    pub max_depth: Option<usize>,
}

struct Ctx<'a> {
    files: &'a Files,
    base: PathBuf,
    path: PathBuf,
    seed: u64,
    max_factors: Option<usize>,
    max_depth: Option<usize>,
}

impl Ctx<'_> {
    fn config_error(&self, message: impl Into<String>) -> RunError {
        RunError::Config { path: self.path.clone(), message: message.into() }
    }

    fn signature(&self, s: &SuiteConfig) -> Result<Signature, RunError> {
        match &s.signature {
            Some(r) => Ok(self.files.signature_ref(r, &self.base)?),
            None => Ok(Signature::ring()),
        }
    }

    fn formulas(&self, s: &SuiteConfig, sig: &Signature) -> Result<Vec<Named<Formula>>, RunError> {
        let mut out = Vec::new();
        for f in &s.formulas {
            out.push((f.clone(), self.files.formula(&self.base.join(f), sig)?));
        }
        if let Some(c) = &s.corpus {
            if let Some(max) = self.max_depth.filter(|&m| c.depth > m) {
                return Err(self.config_error(format!("corpus depth {} exceeds --max-depth {max}", c.depth)));
            }
            let spec = CorpusSpec { depth: c.depth, free: c.free, sample: c.sample, seed: c.seed.unwrap_or(self.seed) };
            for i in corpus_indices(&spec) {
                out.push((format!("corpus[{},{}]#{i}", c.depth, c.free), formula_at(c.depth, c.free, i)));
            }
        }
        Ok(out)
    }

    fn check_factors(&self, name: &str, count: usize) -> Result<(), RunError> {
        match self.max_factors {
            Some(max) if count > max => Err(self.config_error(format!("`{name}` has {count} factors, above --max-factors {max}"))),
            _ => Ok(()),
        }
    }

    fn products(&self, s: &SuiteConfig) -> Result<Vec<Named<BooleanProduct>>, RunError> {
        s.products
            .iter()
            .map(|p| {
                let prod = self.files.product_ref(p, &self.base)?;
                self.check_factors(p, prod.width())?;
                Ok((p.clone(), prod))
            })
            .collect()
    }

    fn structures(&self, refs: &[String]) -> Result<Vec<Named<FiniteStructure>>, RunError> {
        refs.iter().map(|r| Ok((r.clone(), self.files.structure_ref(r, &self.base)?))).collect()
    }

    fn ring(&self, r: &str) -> Result<FiniteRing, RunError> {
        let a = self.files.structure_ref(r, &self.base)?;
        FiniteRing::from_structure(&a).map_err(|e| self.config_error(format!("`{r}` is not a ring: {e}")))
    }

    fn require<'s, T>(&self, s: &SuiteConfig, v: &'s Option<T>, field: &str) -> Result<&'s T, RunError> {
        v.as_ref().ok_or_else(|| self.config_error(format!("suite `{}` needs `{field}`", s.kind.name())))
    }
}

/// Runs one suite; returns `(report, assertive)` pairs. Burris and claim
/// suites split into an assertive forward part and a report-only converse
/// part; dense-pair suites are report-only.
fn run_suite(ctx: &Ctx, s: &SuiteConfig) -> Result<Vec<(SuiteReport, bool)>, RunError> {
    let name = s.name.clone().unwrap_or_else(|| s.kind.name().to_string());
    let sig = ctx.signature(s)?;
    let start = Instant::now();
    let mut out = match s.kind {
        SuiteKind::FvVerify => {
            let cap = s.cap.unwrap_or(FvConfig::default().cap);
            if cap == 0 || cap > MAX_CAP {
                return Err(ctx.config_error(format!("cap must lie in 1..={MAX_CAP}")));
            }
            let cfg = FvConfig { cap, dedup: s.dedup.unwrap_or(true) };
            let checks = suites::fv_verify_suite(&ctx.products(s)?, &ctx.formulas(s, &sig)?, &cfg);
            vec![(SuiteReport::new(&name, "fv-verify", checks), true)]
        }
        SuiteKind::Projector => {
            let mut checks = suites::projector_translation_suite(&ctx.structures(&s.structures)?, &ctx.formulas(s, &sig)?);
            for (pn, p) in ctx.products(s)? {
                checks.extend(suites::projector_laws(&pn, &p));
            }
            vec![(SuiteReport::new(&name, "projector", checks), true)]
        }
        SuiteKind::Vnr => {
            let mut checks = Vec::new();
            for r in &s.rings {
                let ring = ctx.ring(r)?;
                checks.extend(suites::ring_structure_checks(r, &ring));
                let given: Vec<DerivationTable> = s
                    .derivations
                    .iter()
                    .filter(|d| &d.ring == r)
                    .map(|d| ctx.files.derivation(&ctx.base.join(&d.table), &ring))
                    .collect::<Result<_, _>>()?;
                checks.extend(suites::derivation_checks(r, &ring, (!given.is_empty()).then_some(&given[..])));
            }
            if let Some(d) = s.derivations.iter().find(|d| !s.rings.contains(&d.ring)) {
                return Err(ctx.config_error(format!("derivation `{}` names a ring not in `rings`", d.table)));
            }
            vec![(SuiteReport::new(&name, "vnr", checks), true)]
        }
        SuiteKind::Pairs => {
            let corpus: Vec<Formula> = ctx.formulas(s, &sig)?.into_iter().map(|(_, f)| f).collect();
            let mut checks = Vec::new();
            for (pn, p) in ctx.products(s)? {
                checks.extend(suites::pair_checks(&pn, &p, &corpus));
            }
            vec![(SuiteReport::new(&name, "pairs", checks), true)]
        }
        SuiteKind::Dense => {
            let pair_sig = if s.signature.is_some() { sig.clone() } else { Signature::ring_pair() };
            let chi = ctx.files.formula(&ctx.base.join(ctx.require(s, &s.chi, "chi")?), &pair_sig)?;
            let corpus: Vec<Formula> = ctx.formulas(s, &sig)?.into_iter().map(|(_, f)| f).collect();
            let mut checks = Vec::new();
            for (pn, p) in ctx.products(s)? {
                checks.extend(suites::dense_checks(&pn, &p, &chi, s.d_max.unwrap_or(2), &corpus));
            }
            vec![(SuiteReport::new(&name, "dense", checks), false)]
        }
        SuiteKind::Axioms => {
            let theory = ctx.require(s, &s.theory, "theory")?;
            let d = TheoryParams::default();
            let sigma = match &s.sigma {
                Some(path) => Some(ctx.files.read_text(&ctx.base.join(path))?),
                None => None,
            };
            let params = TheoryParams { n: s.n.unwrap_or(d.n), k: s.k.unwrap_or(d.k), i: s.i.unwrap_or(d.i), p: s.p.unwrap_or(d.p), sigma };
            let checks = suites::axioms_checks(theory, &params, &ctx.structures(&s.structures)?, s.expect_all_hold);
            vec![(SuiteReport::new(&name, "axioms", checks), true)]
        }
        SuiteKind::Burris => {
            let (fwd, conv, skipped) = suites::burris_suite(&ctx.structures(&s.structures)?, &ctx.formulas(s, &sig)?);
            let mut fwd = SuiteReport::new(&name, "burris-forward", fwd);
            if let Some(c) = fwd.checks.first_mut() {
                c.detail.get_or_insert_with(|| serde_json::json!({}))["skipped_formulas"] = skipped.into();
            }
            vec![(fwd, true), (SuiteReport::new(&format!("{name}-converse"), "burris-converse", conv), false)]
        }
        SuiteKind::Claim => {
            let pair_sig = if s.signature.is_some() { sig.clone() } else { Signature::ring_pair() };
            let products = ctx.products(s)?;
            let formulas = ctx.formulas(s, &pair_sig)?;
            let (mut fwd, mut conv) = (Vec::new(), Vec::new());
            for (pn, p) in &products {
                for (fl, f) in &formulas {
                    if let Some((a, b)) = suites::claim_one(pn, p, fl, f) {
                        fwd.push(a);
                        conv.push(b);
                    }
                }
            }
            vec![
                (SuiteReport::new(&name, "claim-forward", fwd), true),
                (SuiteReport::new(&format!("{name}-converse"), "claim-converse", conv), false),
            ]
        }
    };
    let ms = start.elapsed().as_millis() as u64;
    for (r, _) in &mut out {
        r.timing_ms = ms;
    }
    Ok(out)
}

pub fn parse_config(text: &str, path: &Path) -> Result<RunConfig, RunError> {
    toml::from_str(text).map_err(|e| RunError::Config { path: path.to_path_buf(), message: e.to_string() })
}

/// Loads the config at `path`, runs every suite and assembles the report.
pub fn run_config(path: &Path, over: &Overrides) -> Result<Report, RunError> {
    let start = Instant::now();
    let files = Files::new();
    let cfg = parse_config(&files.read_text(path)?, path)?;
    let ctx = Ctx {
        files: &files,
        base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        path: path.to_path_buf(),
        seed: over.seed.unwrap_or(cfg.seed),
        max_factors: over.max_factors.or(cfg.max_factors),
        max_depth: over.max_depth.or(cfg.max_depth),
    };
    if cfg.suites.is_empty() {
        return Err(ctx.config_error("no `[[suite]]` entries"));
    }
    let mut suites = Vec::new();
    for s in &cfg.suites {
        suites.extend(run_suite(&ctx, s)?);
    }
    let config_key = path.display().to_string();
    let hashes = files
        .hashes()
        .into_iter()
        .map(|(k, v)| {
            if k == config_key {
                return ("config".to_string(), v);
            }
            let rel = Path::new(&k).strip_prefix(&ctx.base).map(|p| p.display().to_string());
            (rel.unwrap_or(k), v)
        })
        .collect();
    let mut report = Report::new(ctx.seed, hashes, suites);
    report.timing_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}
