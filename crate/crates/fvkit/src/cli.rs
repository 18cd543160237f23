//! Command-line interface. Exit codes: 0 when every assertive check
//! passes, 1 when one fails, 2 on missing files or malformed input.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fvkit_core::axioms::{emit_theory, TheoryParams, THEORIES};
use fvkit_core::corpus::{corpus_size, generate, CorpusSpec};
use fvkit_core::fv::{fv_compile_with, fv_eval, FvConfig, MAX_CAP};
use fvkit_core::product::BooleanProduct;
use fvkit_core::semantics::{definable_set, Assignment};
use fvkit_core::syntax::{print_formula, to_prenex, Formula, Signature};
use fvkit_core::vnr::{enumerate_derivations, FiniteRing};

use crate::formats::{print_derivation, print_signature, FormatError, Files};
use crate::report::{sha256_hex, Check, SuiteReport};
use crate::run::{run_config, Overrides, RunError};
use crate::suites;

#[derive(Debug, Parser)]
#[command(name = "fvkit", version, about = "Finite model checking and Feferman-Vaught verification")]
pub struct Cli {
    /// Seed for sampled corpora.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest corpus quantifier depth.
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Largest number of product factors accepted.
    #[arg(long, global = true)]
    pub max_factors: Option<usize>,
    /// Output file (JSON commands) or directory (emitting commands).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula file and print it canonically.
    Parse {
        file: PathBuf,
        #[arg(long, default_value = "ring")]
        sig: String,
        /// Print the prenex form instead.
        #[arg(long)]
        prenex: bool,
    },
    /// Evaluate a formula in a structure.
    Eval {
        /// Structure file or inline `(builtin ..)` text.
        #[arg(long)]
        structure: String,
        file: PathBuf,
        #[arg(long)]
        sig: Option<String>,
        /// `var=element`; unassigned free variables are enumerated.
        #[arg(long = "assign", value_parser = parse_assign)]
        assign: Vec<(String, usize)>,
    },
    /// Summarize a product file and check the patchwork property.
    Product { file: PathBuf },
    /// Determining sequences: compile, evaluate, verify.
    #[command(subcommand)]
    Fv(FvCommand),
    /// Finite commutative rings: decomposition and derivations.
    #[command(subcommand)]
    Ring(RingCommand),
    /// Pair products over the predicate `P`.
    #[command(subcommand)]
    Pair(PairCommand),
    /// Axiom corpora.
    #[command(subcommand)]
    Axioms(AxiomsCommand),
    /// Run the suites of a TOML config and write a JSON report.
    Run { config: PathBuf },
    /// Write every corpus formula up to `--max-depth` as `.fml` files.
    Corpus {
        #[arg(long, default_value_t = 2)]
        free: usize,
        /// Draw this many formulas per depth instead of all.
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct FvArgs {
    file: PathBuf,
    #[arg(long, default_value = "ring")]
    sig: String,
    #[arg(long, default_value_t = FvConfig::default().cap)]
    cap: usize,
    #[arg(long)]
    no_dedup: bool,
}

#[derive(Debug, Subcommand)]
pub enum FvCommand {
    /// Print the determining sequence as JSON.
    Compile(FvArgs),
    /// Evaluate through the determining sequence in a product.
    Eval {
        product: PathBuf,
        #[command(flatten)]
        args: FvArgs,
        /// `var=element`, the element a carrier index or comma-separated
        /// coordinates.
        #[arg(long = "assign", value_parser = parse_raw_assign)]
        assign: Vec<(String, String)>,
    },
    /// Compare direct and determining-sequence evaluation everywhere.
    Verify {
        product: PathBuf,
        #[command(flatten)]
        args: FvArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum RingCommand {
    /// Stalk decomposition and idempotent algebra.
    Decompose { structure: String },
    /// Print every derivation.
    Derivations { structure: String },
    /// Check derivations: the given table, or all of them.
    Check {
        structure: String,
        #[arg(long)]
        derivation: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PairCommand {
    /// Predicate part, relativization and (D1)-(D4) for a pair product.
    Check {
        product: PathBuf,
        /// Ball formula over the pair signature; point variable `x`.
        #[arg(long)]
        chi: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        d_max: usize,
        /// Free variables of the relativization corpus.
        #[arg(long, default_value_t = 1)]
        free: usize,
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AxiomsCommand {
    /// Write one `.fml` per axiom plus `signature.sig` and `manifest.json`.
    Emit {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// File holding the defining formula of a (G) instance.
        #[arg(long)]
        sigma: Option<PathBuf>,
    },
    /// List the theory names.
    List,
}

fn parse_raw_assign(s: &str) -> Result<(String, String), String> {
    let (v, e) = s.split_once('=').ok_or_else(|| format!("expected var=value, got `{s}`"))?;
    Ok((v.trim().to_string(), e.trim().to_string()))
}

fn parse_assign(s: &str) -> Result<(String, usize), String> {
    let (v, e) = parse_raw_assign(s)?;
    Ok((v, e.parse().map_err(|_| format!("`{e}` is not an element index"))?))
}

/// A failure that ends the command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

struct Out<'a> {
    stdout: &'a mut dyn Write,
    file: Option<PathBuf>,
}

impl Out<'_> {
    fn text(&mut self, s: &str) -> Result<(), CliError> {
        match &self.file {
            Some(p) => std::fs::write(p, s)?,
            None => self.stdout.write_all(s.as_bytes())?,
        }
        Ok(())
    }

    fn json(&mut self, v: &Value) -> Result<(), CliError> {
        self.text(&(serde_json::to_string_pretty(v).expect("json") + "\n"))
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        self.file.as_deref().ok_or_else(|| CliError::Input("`--out <dir>` is required".into()))
    }
}

fn signature(files: &Files, r: &str) -> Result<Signature, CliError> {
    Ok(files.signature_ref(r, Path::new(""))?)
}

fn fv_config(a: &FvArgs) -> Result<FvConfig, CliError> {
    if a.cap == 0 || a.cap > MAX_CAP {
        return Err(CliError::Input(format!("--cap must lie in 1..={MAX_CAP}")));
    }
    Ok(FvConfig { cap: a.cap, dedup: !a.no_dedup })
}

fn load_product(files: &Files, path: &Path, max_factors: Option<usize>) -> Result<BooleanProduct, CliError> {
    let p = files.product(path)?;
    match max_factors {
        Some(m) if p.width() > m => Err(CliError::Input(format!("{}: {} factors, above --max-factors {m}", path.display(), p.width()))),
        _ => Ok(p),
    }
}

fn suite_json(s: &SuiteReport) -> Value {
    serde_json::to_value(s).expect("json")
}

fn product_element(p: &BooleanProduct, text: &str) -> Result<usize, CliError> {
    if text.contains(',') {
        let coords = text.split(',').map(|c| c.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(input)?;
        p.element(&coords).ok_or_else(|| CliError::Input(format!("({text}) is not in the carrier")))
    } else {
        let e: usize = text.parse().map_err(|_| CliError::Input(format!("`{text}` is not an element")))?;
        if e < p.len() {
            Ok(e)
        } else {
            Err(CliError::Input(format!("element {e} out of range for a carrier of {}", p.len())))
        }
    }
}

/// One-line summaries of the theories, written into emitted manifests.
pub fn theory_description(name: &str) -> &'static str {
    match name {
        "ring" => "commutative rings with identity",
        "vnr" => "commutative von Neumann regular rings",
        "projector_def" => "existential definition of the projector p(a,b) in regular rings",
        "A" => "regular rings with a derivation and no minimal idempotent",
        "T_f" => "lattice-ordered rings with the f-ring condition",
        "T_reg" => "regular f-rings with real closed stalks, bounded by odd degree n",
        "T_v" => "valuation ring predicate O and maximal ideal predicate M through div and Div",
        "char0" => "characteristic zero on every idempotent, numerals up to n",
        "T_reg_v_0" => "regular rings with henselian valued stalks of residue characteristic 0",
        "T_reg_v_p" => "regular rings with p-adically closed stalks",
        "pair" => "pairs (K, P(K)) with P a proper subfield",
        "Dt_n_k" => "polynomial dependence relations of pairs, with positive existential complements",
        "ell_n" => "linear independence over P, with positive existential complements",
        "lambda_n_i" => "coordinate functions of a vector in the P-span of independent elements",
        "chi_order" => "ball relation of the order topology",
        "chi_valuation" => "ball relation of the valuation topology",
        "G" => "generic derivations: open projections contain differential solutions",
        "RCVF" => "real closed valued fields, signature and complement sentences only",
        _ => "",
    }
}

fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect()
}

fn emit(dir: &Path, theory: &str, params: &TheoryParams) -> Result<Value, CliError> {
    let entry = emit_theory(theory, params).map_err(input)?;
    std::fs::create_dir_all(dir)?;
    let sig_text = print_signature(&entry.signature);
    std::fs::write(dir.join("signature.sig"), &sig_text)?;
    let mut axioms = Vec::new();
    for (k, ax) in entry.axioms.iter().enumerate() {
        let name = format!("{:03}_{}.fml", k + 1, file_stem(&ax.label));
        let text = format!("; {}\n{}\n", ax.label, print_formula(&ax.formula));
        std::fs::write(dir.join(&name), &text)?;
        axioms.push(json!({
            "label": ax.label,
            "file": name,
            "interpretation": ax.interpretation,
            "sha256": sha256_hex(text.as_bytes()),
        }));
    }
    let manifest = json!({
        "theory": theory,
        "anchor": theory_description(theory),
        "params": { "n": params.n, "k": params.k, "i": params.i, "p": params.p, "sigma": params.sigma },
        "signature": { "file": "signature.sig", "sha256": sha256_hex(sig_text.as_bytes()) },
        "roundtrip_failures": entry.roundtrip_failures(),
        "axioms": axioms,
    });
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("json") + "\n")?;
    Ok(manifest)
}

fn write_corpus(dir: &Path, max_depth: usize, free: usize, sample: Option<usize>, seed: u64) -> Result<Value, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut depths = Vec::new();
    for depth in 0..=max_depth {
        let spec = CorpusSpec { depth, free, sample, seed };
        let formulas = generate(&spec);
        let sub = dir.join(format!("depth{depth}"));
        std::fs::create_dir_all(&sub)?;
        let mut listing = String::new();
        for (k, f) in formulas.iter().enumerate() {
            let text = print_formula(f) + "\n";
            std::fs::write(sub.join(format!("{k:08}.fml")), &text)?;
            listing.push_str(&text);
        }
        depths.push(json!({
            "depth": depth,
            "size": corpus_size(depth, free),
            "written": formulas.len(),
            "sha256": sha256_hex(listing.as_bytes()),
        }));
    }
    let manifest = json!({ "free": free, "sample": sample, "seed": seed, "depths": depths });
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("json") + "\n")?;
    Ok(manifest)
}

/// Runs a parsed command line; returns the exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let files = Files::new();
    let mut out = Out { stdout, file: cli.out.clone() };
    match cli.command {
        Command::Parse { file, sig, prenex } => {
            let f = files.formula(&file, &signature(&files, &sig)?)?;
            let f = if prenex { to_prenex(&f) } else { f };
            out.text(&(print_formula(&f) + "\n"))?;
            Ok(0)
        }
        Command::Eval { structure, file, sig, assign } => {
            let a = files.structure_ref(&structure, Path::new(""))?;
            let sig = match sig {
                Some(s) => signature(&files, &s)?,
                None => a.sig().clone(),
            };
            let f = files.formula(&file, &sig)?;
            let params: Assignment = assign.into_iter().collect();
            let free: Vec<String> = f.free_vars().into_iter().filter(|v| !params.contains_key(v)).collect();
            let set = definable_set(&a, &f, &params, &free).map_err(input)?;
            if free.is_empty() {
                out.text(&format!("{}\n", !set.is_empty()))?;
            } else {
                out.json(&json!({ "vars": free, "tuples": set }))?;
            }
            Ok(0)
        }
        Command::Product { file } => {
            let p = load_product(&files, &file, cli.max_factors)?;
            let name = file.display().to_string();
            let gamma = p.check_gamma_properties(&[]).map_err(input)?;
            let witnesses = gamma.p2_failures.iter().map(|w| json!({ "f": w.f, "g": w.g, "u": w.u.iter().collect::<Vec<_>>() })).collect();
            let check = Check::new("patchwork", &name, gamma.p2_checked, witnesses);
            let factors: Vec<Value> = p.factors().iter().map(|f| json!({ "name": f.name, "size": f.size() })).collect();
            let ok = check.passed();
            out.json(&json!({ "product": name, "size": p.len(), "full": p.is_full(), "factors": factors, "checks": [check] }))?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Fv(cmd) => {
            let (args, product) = match &cmd {
                FvCommand::Compile(a) => (a, None),
                FvCommand::Eval { product, args, .. } | FvCommand::Verify { product, args } => (args, Some(product)),
            };
            let cfg = fv_config(args)?;
            let f: Formula = files.formula(&args.file, &signature(&files, &args.sig)?)?;
            match &cmd {
                FvCommand::Compile(_) => {
                    let ds = fv_compile_with(&f, &cfg).map_err(input)?;
                    let psis: Vec<String> = ds.psi_formulas().iter().map(print_formula).collect();
                    out.json(&json!({ "vars": ds.vars, "phi_star": ds.phi.to_sexp().to_string(), "psis": psis }))?;
                    Ok(0)
                }
                FvCommand::Eval { assign, .. } => {
                    let assign = assign.clone();
                    let p = load_product(&files, product.unwrap(), cli.max_factors)?;
                    let ds = fv_compile_with(&f, &cfg).map_err(input)?;
                    let values: BTreeMap<String, String> = assign.into_iter().collect();
                    let tuple = ds
                        .vars
                        .iter()
                        .map(|v| {
                            let t = values.get(v).ok_or_else(|| CliError::Input(format!("free variable `{v}` is not assigned")))?;
                            product_element(&p, t)
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    out.text(&format!("{}\n", fv_eval(&p, &ds, &tuple).map_err(input)?))?;
                    Ok(0)
                }
                FvCommand::Verify { .. } => {
                    let path = product.unwrap();
                    let p = load_product(&files, path, cli.max_factors)?;
                    let c = suites::fv_verify_one(&path.display().to_string(), &p, &args.file.display().to_string(), &f, &cfg);
                    let ok = c.passed();
                    out.json(&serde_json::to_value(&c).expect("json"))?;
                    Ok(if ok { 0 } else { 1 })
                }
            }
        }
        Command::Ring(cmd) => {
            let (RingCommand::Decompose { structure } | RingCommand::Derivations { structure } | RingCommand::Check { structure, .. }) = &cmd;
            let a = files.structure_ref(structure, Path::new(""))?;
            let r = FiniteRing::from_structure(&a).map_err(input)?;
            match cmd {
                RingCommand::Decompose { structure } => {
                    let s = SuiteReport::new(&structure, "vnr", suites::ring_structure_checks(&structure, &r));
                    out.json(&suite_json(&s))?;
                    Ok(if s.passed() { 0 } else { 1 })
                }
                RingCommand::Derivations { .. } => {
                    let text: String = enumerate_derivations(&r).iter().map(print_derivation).collect();
                    out.text(&text)?;
                    Ok(0)
                }
                RingCommand::Check { structure, derivation } => {
                    let given = match derivation {
                        Some(path) => Some(vec![files.derivation(&path, &r)?]),
                        None => None,
                    };
                    let s = SuiteReport::new(&structure, "vnr", suites::derivation_checks(&structure, &r, given.as_deref()));
                    out.json(&suite_json(&s))?;
                    Ok(if s.passed() { 0 } else { 1 })
                }
            }
        }
        Command::Pair(PairCommand::Check { product, chi, d_max, free, sample }) => {
            let p = load_product(&files, &product, cli.max_factors)?;
            let name = product.display().to_string();
            let depth = cli.max_depth.unwrap_or(1);
            let corpus: Vec<Formula> =
                (0..=depth).flat_map(|d| generate(&CorpusSpec { depth: d, free, sample, seed: cli.seed.unwrap_or(0) })).collect();
            let assertive = SuiteReport::new(&name, "pairs", suites::pair_checks(&name, &p, &corpus));
            let mut report = json!({ "product": name, "assertive": suite_json(&assertive) });
            if let Some(chi) = chi {
                let chi = files.formula(&chi, &Signature::ring_pair())?;
                let dense = SuiteReport::new(&name, "dense", suites::dense_checks(&name, &p, &chi, d_max, &corpus));
                report["report_only"] = suite_json(&dense);
            }
            out.json(&report)?;
            Ok(if assertive.passed() { 0 } else { 1 })
        }
        Command::Axioms(AxiomsCommand::List) => {
            let text: String = THEORIES.iter().map(|t| format!("{t}\t{}\n", theory_description(t))).collect();
            out.text(&text)?;
            Ok(0)
        }
        Command::Axioms(AxiomsCommand::Emit { theory, n, k, i, p, sigma }) => {
            let d = TheoryParams::default();
            let sigma = match sigma {
                Some(path) => Some(files.read_text(&path)?),
                None => None,
            };
            let params = TheoryParams { n: n.unwrap_or(d.n), k: k.unwrap_or(d.k), i: i.unwrap_or(d.i), p: p.unwrap_or(d.p), sigma };
            let dir = out.out_dir()?.to_path_buf();
            let manifest = emit(&dir, &theory, &params)?;
            let count = manifest["axioms"].as_array().map_or(0, Vec::len);
            out.stdout.write_all(format!("{count} axioms written to {}\n", dir.display()).as_bytes())?;
            Ok(if manifest["roundtrip_failures"].as_array().is_some_and(Vec::is_empty) { 0 } else { 1 })
        }
        Command::Run { config } => {
            let over = Overrides { seed: cli.seed, max_factors: cli.max_factors, max_depth: cli.max_depth };
            let report = run_config(&config, &over)?;
            out.text(&report.to_json())?;
            let failing: Vec<String> = report
                .assertive
                .iter()
                .filter(|s| !s.passed())
                .map(|s| format!("{} ({} failing checks)", s.suite, s.failures().count()))
                .collect();
            let summary = if failing.is_empty() {
                format!("all assertive suites passed; digest {}\n", report.digest)
            } else {
                format!("failing suites: {}\n", failing.join(", "))
            };
            if out.file.is_some() {
                out.stdout.write_all(summary.as_bytes())?;
            } else {
                eprint!("{summary}");
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Corpus { free, sample } => {
            let dir = out.out_dir()?.to_path_buf();
            let manifest = write_corpus(&dir, cli.max_depth.unwrap_or(0), free, sample, cli.seed.unwrap_or(0))?;
            out.stdout.write_all(format!("{}\n", serde_json::to_string(&manifest).expect("json")).as_bytes())?;
            Ok(0)
        }
    }
}

/// Parses arguments, runs, and maps errors to exit code 2.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(cli, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
