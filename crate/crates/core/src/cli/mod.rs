//! The `fabry` subcommands. Every command writes one JSON document carrying
//! a [`RunManifest`]; rerunning with the manifest's config on the same inputs
//! reproduces the document byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::analysis::{audit_cover, select_cover, CoverAudit, IntervalSet};
use crate::density::{d3_estimate, family_report, D3Estimate, DensityReport, EstimatorConfig, LimitInput, SelfSimilarDoc, SelfSimilarSpec};
use crate::envelope::{PwlDoc, PwlFunction};
use crate::probe::{arc_consistency, run_probe, ArcConsistency, ArcForm, ProbeConfig, ProbeReport, ProbeRequest};
use crate::seqcore::{extract_windows, generate, CoefficientSequence, GeneratorSpec, GroundTruth, LambdaKind, WindowPolicy};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Exit status for an error: input problems get [`EXIT_INPUT`], numerical
/// failures (singular systems, truncation, quadrature) [`EXIT_FAILURE`].
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Singular(_) | Error::Truncation(_) | Error::Quadrature(_) | Error::Infeasible(_) => EXIT_FAILURE,
        _ => EXIT_INPUT,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SideSel {
    Plus,
    Minus,
    #[default]
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LambdaArg {
    SignChanges,
    Nonzero,
}

/// Every numeric setting of a run. Config files (TOML or JSON) deserialize
/// into this, missing fields taking defaults; a report document is also
/// accepted, in which case its manifest's config is used.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub estimator: EstimatorConfig,
    pub windows: WindowPolicy,
    pub side: SideSel,
    /// Use the generator's declared limit when a truth sidecar is present.
    pub use_truth: bool,
    pub probe: ProbeConfig,
    pub request: ProbeRequest,
    pub arc_form: Option<ArcForm>,
    pub cover_probes: usize,
    pub cover_seed: u64,
}

impl RunConfig {
    fn fresh() -> Self {
        Self { use_truth: true, cover_probes: 10_000, ..Default::default() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let v: Value = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?,
            _ => serde_json::from_str(&text)?,
        };
        let v = match v.get("manifest").and_then(|m| m.get("config")) {
            Some(c) => c.clone(),
            None => v,
        };
        let mut base = serde_json::to_value(Self::fresh())?;
        merge(&mut base, v);
        Ok(serde_json::from_value(base)?)
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    pub grids: BTreeMap<String, Value>,
    pub precision: String,
    pub tool_version: String,
    /// Keyed by role (`coefficients`, `truth`, `density_report`, …).
    pub inputs: BTreeMap<String, InputDigest>,
}

impl RunManifest {
    fn new(command: &str, config: &RunConfig) -> Self {
        let mut grids = BTreeMap::new();
        grids.insert("r".into(), serde_json::json!(config.estimator.r_grid));
        grids.insert("delta".into(), serde_json::json!(config.estimator.delta_grid));
        grids.insert("helly".into(), serde_json::json!(config.estimator.helly_grid));
        Self {
            command: command.into(),
            config: config.clone(),
            seeds: Vec::new(),
            grids,
            precision: "coefficients and envelopes exact (rational); densities and probes in f64, \
                        ray sums checked in double-double"
                .into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            inputs: BTreeMap::new(),
        }
    }

    fn record(&mut self, role: &str, path: &Path, bytes: &[u8]) {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.inputs.insert(role.into(), InputDigest { name, sha256: sha256_hex(bytes) });
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// The envelope every command writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document<T> {
    pub schema_version: u32,
    pub kind: String,
    pub manifest: RunManifest,
    pub body: T,
}

impl<T: Serialize + DeserializeOwned> Document<T> {
    fn new(kind: &str, manifest: RunManifest, body: T) -> Self {
        Self { schema_version: SCHEMA_VERSION, kind: kind.into(), manifest, body }
    }

    pub fn read(path: &Path, kind: &str) -> Result<Self> {
        let doc: Self = serde_json::from_slice(&fs::read(path)?)?;
        if doc.schema_version != SCHEMA_VERSION || doc.kind != kind {
            return Err(Error::InvalidArgument(format!(
                "{}: expected a `{kind}` document of schema {SCHEMA_VERSION}, found `{}` of schema {}",
                path.display(),
                doc.kind,
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut s = serde_json::to_vec_pretty(self)?;
        s.push(b'\n');
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeBody {
    pub side: SideSel,
    /// `Δ` over the selected sides.
    pub delta: f64,
    pub inconclusive: bool,
    pub report: DensityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeBody {
    pub report: ProbeReport,
    pub arc_consistency: Option<ArcConsistency>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverBody {
    pub input_count: usize,
    pub selected: IntervalSet,
    pub audit: CoverAudit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityBody {
    pub limit: Value,
    pub d3: D3Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthBody {
    pub spec: GeneratorSpec,
    pub truth: GroundTruth,
}

#[derive(Parser, Debug)]
#[command(name = "fabry", version, about = "Sign-change and gap densities of power series, and singularity probes")]
pub struct Cli {
    /// Config file (TOML or JSON, or a previous report to reuse its settings).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a coefficient file from a family spec.
    Generate(GenerateArgs),
    /// Windows, Helly limits and the density report of a coefficient file.
    Analyze(AnalyzeArgs),
    /// Padé poles and ray growth, optionally checked against a density report.
    Probe(ProbeArgs),
    /// Bounded-multiplicity subcover of a family of open intervals.
    Cover(CoverArgs),
    /// `d3` of a limit function given as a PWL or self-similar document.
    Density(DensityArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    pub spec: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub coeffs: PathBuf,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub side: Option<SideSel>,
    /// Comma-separated r grid.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    /// Comma-separated δ grid (exact decimals or p/q).
    #[arg(long, value_delimiter = ',')]
    pub delta_grid: Option<Vec<String>>,
    #[arg(long)]
    pub a_tol: Option<f64>,
    /// Envelope arithmetic is always exact; the flag is accepted and recorded.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum)]
    pub lambda: Option<LambdaArg>,
    /// Ground-truth sidecar; defaults to `<coeffs>.truth.json` when present.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Ignore any ground-truth sidecar.
    #[arg(long)]
    pub no_truth: bool,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    pub coeffs: PathBuf,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// `[L/M]` approximant; repeatable.
    #[arg(long, num_args = 2, value_names = ["L", "M"], action = clap::ArgAction::Append)]
    pub pade: Vec<usize>,
    /// Comma-separated ray angles in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rays: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Density report of the same coefficient file, for the arc check.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Check every arc of length πΔ instead of the arc around θ = 0.
    #[arg(long)]
    pub every_arc: bool,
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    /// JSON list of `[lo, hi]` pairs, or an IntervalSet document.
    pub intervals: PathBuf,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub probes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    pub limit: PathBuf,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub delta_grid: Option<Vec<String>>,
    #[arg(long)]
    pub a_tol: Option<f64>,
}

/// What a command produced: the document bytes and the exit status.
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub code: i32,
    pub summary: String,
}

fn emit(out: Option<&Path>, o: &Outcome) -> Result<()> {
    match out {
        Some(p) => fs::write(p, &o.bytes)?,
        None => std::io::stdout().write_all(&o.bytes)?,
    }
    Ok(())
}

/// Runs a parsed command line and returns its exit status.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::fresh(),
    };
    let (outcome, out) = match cli.command {
        Command::Generate(a) => {
            let o = cmd_generate(&a.spec, &a.out)?;
            eprintln!("{}", o.summary);
            return Ok(o.code);
        }
        Command::Analyze(a) => {
            apply_analyze_flags(&mut cfg, &a);
            let truth = if a.no_truth { None } else { a.truth.clone().or_else(|| sidecar(&a.coeffs)) };
            (cmd_analyze(&a.coeffs, truth.as_deref(), &cfg)?, a.out)
        }
        Command::Probe(a) => {
            if !a.pade.is_empty() {
                cfg.request.pade = a.pade.chunks(2).map(|c| (c[0], c[1])).collect();
            }
            if let Some(r) = a.rays {
                cfg.request.rays = r;
            }
            if let Some(r) = a.radii {
                cfg.request.radii = r;
            }
            if a.every_arc {
                cfg.arc_form = Some(ArcForm::EveryArc);
            }
            (cmd_probe(&a.coeffs, a.report.as_deref(), &cfg)?, a.out)
        }
        Command::Cover(a) => {
            if let Some(p) = a.probes {
                cfg.cover_probes = p;
            }
            if let Some(s) = a.seed {
                cfg.cover_seed = s;
            }
            (cmd_cover(&a.intervals, &cfg)?, a.out)
        }
        Command::Density(a) => {
            if let Some(d) = a.delta_grid {
                cfg.estimator.delta_grid = d;
            }
            if let Some(t) = a.a_tol {
                cfg.estimator.a_tol = t;
            }
            (cmd_density(&a.limit, &cfg)?, a.out)
        }
    };
    emit(out.as_deref(), &outcome)?;
    eprintln!("{}", outcome.summary);
    Ok(outcome.code)
}

fn apply_analyze_flags(cfg: &mut RunConfig, a: &AnalyzeArgs) {
    if let Some(s) = a.side {
        cfg.side = s;
    }
    if let Some(r) = &a.r {
        cfg.estimator.r_grid = r.clone();
    }
    if let Some(d) = &a.delta_grid {
        cfg.estimator.delta_grid = d.clone();
    }
    if let Some(t) = a.a_tol {
        cfg.estimator.a_tol = t;
    }
    if let Some(l) = a.lambda {
        cfg.windows.lambda = match l {
            LambdaArg::SignChanges => LambdaKind::SignChanges,
            LambdaArg::Nonzero => LambdaKind::NonZero,
        };
    }
    if a.no_truth {
        cfg.use_truth = false;
    }
}

/// `<coeffs>.truth.json`, when it exists.
pub fn sidecar(coeffs: &Path) -> Option<PathBuf> {
    let mut s = coeffs.as_os_str().to_owned();
    s.push(".truth.json");
    let p = PathBuf::from(s);
    p.exists().then_some(p)
}

fn read_coeffs(path: &Path, manifest: &mut RunManifest) -> Result<CoefficientSequence> {
    let bytes = fs::read(path)?;
    manifest.record("coefficients", path, &bytes);
    CoefficientSequence::read_jsonl(BufReader::new(bytes.as_slice()))
}

/// Writes the coefficient file and its ground-truth sidecar.
pub fn cmd_generate(spec_path: &Path, out: &Path) -> Result<Outcome> {
    let spec_bytes = fs::read(spec_path)?;
    let spec = GeneratorSpec::load(spec_path)?;
    let g = generate(&spec)?;
    let mut coeffs = Vec::new();
    g.seq.write_jsonl(&mut coeffs)?;
    fs::write(out, &coeffs)?;
    let mut manifest = RunManifest::new("generate", &RunConfig::fresh());
    manifest.seeds.push(spec.seed);
    manifest.record("spec", spec_path, &spec_bytes);
    let summary = format!("{}: N = {}, wrote {} records to {}", spec.family, spec.n, g.seq.len(), out.display());
    let doc = Document::new("ground_truth", manifest, TruthBody { spec, truth: g.truth });
    let mut side = out.as_os_str().to_owned();
    side.push(".truth.json");
    fs::write(PathBuf::from(side), doc.to_bytes()?)?;
    Ok(Outcome { bytes: coeffs, code: EXIT_OK, summary })
}

/// Density report of a coefficient file: window extraction, window counts,
/// Helly limits and the estimators.
pub fn cmd_analyze(coeffs: &Path, truth: Option<&Path>, cfg: &RunConfig) -> Result<Outcome> {
    let mut manifest = RunManifest::new("analyze", cfg);
    let seq = read_coeffs(coeffs, &mut manifest)?;
    let mut declared = None;
    if let (Some(t), true) = (truth, cfg.use_truth) {
        let bytes = fs::read(t)?;
        manifest.record("truth", t, &bytes);
        let doc: Document<TruthBody> = serde_json::from_slice(&bytes)?;
        manifest.seeds.push(doc.body.spec.seed);
        if let Some(d) = &doc.body.truth.declared_limit {
            declared = Some(SelfSimilarSpec::from_doc(d)?);
        }
    }
    let fam = extract_windows(&seq, &cfg.windows)?;
    let report = family_report(&fam, &cfg.estimator, declared.as_ref())?;
    let (d3s, ratios): (Vec<&D3Estimate>, Vec<Option<f64>>) = match cfg.side {
        SideSel::Plus => (vec![&report.d3_plus], vec![report.plus.liminf_ratio]),
        SideSel::Minus => (vec![&report.d3_minus], vec![report.minus.liminf_ratio]),
        SideSel::Both => (vec![&report.d3_plus, &report.d3_minus], vec![report.plus.liminf_ratio, report.minus.liminf_ratio]),
    };
    let delta = d3s.iter().map(|d| Some(d.bracket.1)).chain(ratios).flatten().fold(1.0, f64::min).clamp(0.0, 1.0);
    let inconclusive = d3s.iter().any(|d| d.inconclusive);
    let summary = format!(
        "d1+ {:.4}  d1- {:.4}  d2 {:.4}  d3+ {:.4}  d3- {:.4}  d4 {:.4}  Δ {:.4}  chain_ok {}{}",
        report.d1_plus.value,
        report.d1_minus.value,
        report.d2.value,
        report.d3_plus.value,
        report.d3_minus.value,
        report.d4.value,
        delta,
        report.chain_ok,
        if inconclusive { "  (inconclusive d3)" } else { "" }
    );
    let body = AnalyzeBody { side: cfg.side, delta, inconclusive, report };
    let bytes = Document::new("density_report", manifest, body).to_bytes()?;
    Ok(Outcome { bytes, code: if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK }, summary })
}

/// Padé and ray probes of a coefficient file; with a density report of the
/// same file, also the arc consistency check.
pub fn cmd_probe(coeffs: &Path, density: Option<&Path>, cfg: &RunConfig) -> Result<Outcome> {
    if cfg.request.pade.is_empty() && cfg.request.rays.is_empty() {
        return Err(Error::InvalidArgument("nothing to probe: give --pade L M and/or --rays".into()));
    }
    let mut manifest = RunManifest::new("probe", cfg);
    let seq = read_coeffs(coeffs, &mut manifest)?;
    let prior = match density {
        Some(p) => {
            let bytes = fs::read(p)?;
            manifest.record("density_report", p, &bytes);
            let doc: Document<AnalyzeBody> = Document::read(p, "density_report")?;
            if doc.manifest.inputs.get("coefficients").map(|d| &d.sha256) != manifest.inputs.get("coefficients").map(|d| &d.sha256) {
                return Err(Error::InvalidArgument(format!("{} was computed from a different coefficient file", p.display())));
            }
            Some(doc.body)
        }
        None => None,
    };
    let report = run_probe(&seq, &cfg.request, &cfg.probe, prior.as_ref().map(|b| b.delta))?;
    let arc = match &prior {
        Some(b) => {
            let mut dr = b.report.clone();
            dr.delta = b.delta;
            let form = cfg.arc_form.unwrap_or(if report.natural_boundary { ArcForm::EveryArc } else { ArcForm::Single });
            Some(arc_consistency(&dr, &report, form)?)
        }
        None => None,
    };
    let summary = match &arc {
        Some(a) => format!("{} detections; {}", report.detections.len(), a.narrative),
        None => format!("{} detections; no density report given", report.detections.len()),
    };
    let bytes = Document::new("probe_report", manifest, ProbeBody { report, arc_consistency: arc }).to_bytes()?;
    Ok(Outcome { bytes, code: EXIT_OK, summary })
}

fn read_intervals(bytes: &[u8]) -> Result<IntervalSet> {
    if let Ok(pairs) = serde_json::from_slice::<Vec<(f64, f64)>>(bytes) {
        return IntervalSet::new(&pairs);
    }
    let set: IntervalSet = serde_json::from_slice(bytes)?;
    IntervalSet::new(&set.pairs())
}

pub fn cmd_cover(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let mut manifest = RunManifest::new("cover", cfg);
    let bytes = fs::read(path)?;
    manifest.record("intervals", path, &bytes);
    manifest.seeds.push(cfg.cover_seed);
    let input = read_intervals(&bytes)?;
    let selected = select_cover(&input);
    let (lo, hi) = input.intervals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), i| (l.min(i.lo), h.max(i.hi)));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.cover_seed);
    let probes: Vec<f64> = if lo < hi { (0..cfg.cover_probes).map(|_| rng.random_range(lo..hi)).collect() } else { Vec::new() };
    let audit = audit_cover(&input, &selected, &probes);
    let summary = format!(
        "kept {} of {} intervals; union preserved {}; max multiplicity {} (probes {}); minimal {}",
        selected.intervals.len(),
        input.intervals.len(),
        audit.union_preserved,
        audit.max_multiplicity,
        audit.probe_multiplicity,
        audit.minimal
    );
    let body = CoverBody { input_count: input.intervals.len(), selected, audit };
    Ok(Outcome { bytes: Document::new("cover", manifest, body).to_bytes()?, code: EXIT_OK, summary })
}

fn read_limit(v: &Value) -> Result<LimitInput> {
    if v.get("rho").is_some() {
        let doc: SelfSimilarDoc = serde_json::from_value(v.clone())?;
        return Ok(LimitInput::SelfSimilar(SelfSimilarSpec::from_doc(&doc)?));
    }
    let doc: PwlDoc = serde_json::from_value(v.clone())?;
    Ok(LimitInput::Pwl(PwlFunction::<BigRational>::from_doc(&doc)?))
}

/// `d3` of one limit function, with the divergence verdict at the bracket
/// top for each `δ`.
pub fn cmd_density(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let mut manifest = RunManifest::new("density", cfg);
    let bytes = fs::read(path)?;
    manifest.record("limit", path, &bytes);
    let v: Value = serde_json::from_slice(&bytes)?;
    let limit = read_limit(&v)?;
    if !limit.is_zero_at_origin() {
        return Err(Error::InvalidArgument("a limit function must start at n(0) = 0".into()));
    }
    if !(cfg.estimator.a_tol > 0.0 && cfg.estimator.a_tol < 1.0) {
        return Err(Error::InvalidArgument(format!("a_tol {} outside (0, 1)", cfg.estimator.a_tol)));
    }
    let d3 = d3_estimate(&limit, &cfg.estimator.deltas()?, cfg.estimator.a_tol)?;
    let summary =
        format!("d3 {:.4} in [{:.4}, {:.4}]{}", d3.value, d3.bracket.0, d3.bracket.1, if d3.inconclusive { " (inconclusive)" } else { "" });
    let code = if d3.inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK };
    let bytes = Document::new("density", manifest, DensityBody { limit: v, d3 }).to_bytes()?;
    Ok(Outcome { bytes, code, summary })
}
