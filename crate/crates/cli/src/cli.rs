//! Argument parsing and the subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use planar_qldpc::distance::{DistanceError, DistancePolicy};
use planar_qldpc::fractal::{fractal_upper_bound, DEFAULT_MAX_LEVEL};
use planar_qldpc::graft::GraftConfig;
use planar_qldpc::lattice::{build_from_polys, build_open_code, family_registry, find_family, BuildOptions, LatticeCode, LatticeSpec, Promotion};
use planar_qldpc::search::{family_mask, sweep_one, SearchRange};
use planar_qldpc::{CssCode, FamilyPoly, MaskRule, Pauli};

use crate::formats::Format;
use crate::manifest::{verify, GraftSection, Manifest, RemovalEntry};
use crate::{par, svg, table};

/// A check that failed: exit code 1 rather than 2.
#[derive(Debug)]
pub struct VerificationFailure(pub String);

impl std::fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailure {}

#[derive(Parser, Debug)]
#[command(name = "pqldpc", version, about = "Planar quantum LDPC codes from bivariate polynomials")]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "PQLDPC_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the registered families (as TOML).
    Families,
    /// Build a code and write its manifest.
    Build(BuildArgs),
    /// Compute the distance of a manifest's code and record it.
    Distance(DistanceArgs),
    /// Shrink a code by boundary grafting.
    Graft(GraftArgs),
    /// Distances of one family over a range of sizes, as CSV.
    Sweep(SweepArgs),
    /// Minimal-n table over enumerated families.
    Search(SearchArgs),
    /// Fractal-operator distance bounds.
    Fractal(FractalArgs),
    /// Write Hx and Hz as alist or MatrixMarket files.
    Export(ExportArgs),
    /// Read Hx and Hz from alist or MatrixMarket files.
    Import(ImportArgs),
    /// Draw a lattice code as SVG.
    Render(RenderArgs),
    /// Re-check a manifest: commutation, k and certificate.
    Verify(ManifestArg),
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Registered family name (see `families`).
    #[arg(long, conflicts_with_all = ["f", "g"])]
    pub family: Option<String>,
    /// Inline f, e.g. "1+x+x^-1*y^2" (shifted into the first quadrant).
    #[arg(long, requires = "g")]
    pub f: Option<String>,
    #[arg(long, requires = "f")]
    pub g: Option<String>,
    /// Mask for inline polynomials ("full" or e.g. "V:right:0"); derived if omitted.
    #[arg(long)]
    pub mask: Option<String>,
    /// Corner promotion order.
    #[arg(long, default_value = "larger", value_parser = ["larger", "smaller"])]
    pub promotion: String,
    #[arg(long)]
    pub corner_radius: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub lx: usize,
    #[arg(long)]
    pub ly: usize,
    #[arg(long, short, default_value = "code.toml")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ManifestArg {
    #[arg(long, short)]
    pub manifest: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct PolicyArgs {
    /// Exact search (falls back to ISD if the budget runs out).
    #[arg(long, conflicts_with = "isd")]
    pub exact: bool,
    /// ISD only.
    #[arg(long)]
    pub isd: bool,
    #[arg(long, default_value_t = 64)]
    pub dmax: usize,
    /// Combination budget for the exact search.
    #[arg(long, default_value_t = 2_000_000_000)]
    pub budget: u64,
    /// ISD trials per side (default depends on n).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl PolicyArgs {
    fn policy(&self, auto_exact_n: usize) -> DistancePolicy {
        let exact_max_n = if self.exact {
            usize::MAX
        } else if self.isd {
            0
        } else {
            auto_exact_n
        };
        DistancePolicy { exact_max_n, dmax: self.dmax, exact_budget: self.budget, isd_trials: self.trials, seed: self.seed }
    }

    fn method(&self, n: usize, auto_exact_n: usize) -> &'static str {
        if self.exact || (!self.isd && n <= auto_exact_n) {
            "exact"
        } else {
            "isd"
        }
    }
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long, short)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Write here instead of updating the manifest in place.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GraftArgs {
    #[arg(long, short)]
    pub manifest: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allow qubits on several checks of the removed label (chain products).
    #[arg(long)]
    pub general: bool,
    #[arg(long)]
    pub max_weight: Option<usize>,
    #[arg(long)]
    pub allow_weight_growth: bool,
    /// ISD trials for the per-step distance check (default depends on n).
    #[arg(long)]
    pub step_trials: Option<u64>,
    /// Distance to preserve (default: the manifest's, else computed).
    #[arg(long)]
    pub target_d: Option<usize>,
    /// ISD trials for the final re-verification.
    #[arg(long, default_value_t = 10_000)]
    pub final_trials: u64,
    /// Use the exact search for the final re-verification up to this n.
    #[arg(long, default_value_t = 150)]
    pub exact_max_n: usize,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Inclusive range, e.g. 8..14, or a single value.
    #[arg(long)]
    pub lx: String,
    #[arg(long)]
    pub ly: String,
    /// Only sizes with Lx = Ly.
    #[arg(long)]
    pub diagonal: bool,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, default_value_t = 0)]
    pub exact_max_n: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Logical dimensions, e.g. 2,3,6,8 or 2..8.
    #[arg(long, default_value = "2..13")]
    pub k: String,
    #[arg(long, default_value = "4..9")]
    pub d: String,
    /// Exponent range for a, b, c and d.
    #[arg(long, default_value = "-2..3", allow_hyphen_values = true)]
    pub exps: String,
    #[arg(long, default_value = "3..20")]
    pub lx: String,
    #[arg(long, default_value = "3..20")]
    pub ly: String,
    #[arg(long, default_value_t = 300)]
    pub max_n: usize,
    #[arg(long)]
    pub no_dedup: bool,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub exact_max_n: usize,
    /// CSV of every measured size.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Resume from / record progress in this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FractalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Square sizes, e.g. 6,8,10,12,14.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    pub max_level: u32,
    /// Write one SVG per size here.
    #[arg(long)]
    pub svg_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[arg(long, short)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "alist")]
    pub format: Format,
    /// Output prefix: writes <prefix>.hx.<ext>, <prefix>.hz.<ext>, <prefix>.labels
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ImportArgs {
    #[arg(long)]
    pub hx: PathBuf,
    #[arg(long)]
    pub hz: PathBuf,
    #[arg(long, default_value = "alist")]
    pub format: Format,
    /// One label per line; qubit indices are used if omitted.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(long, short)]
    pub manifest: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Overlay the recorded distance certificate.
    #[arg(long)]
    pub certificate: bool,
}

/// `a..b` (inclusive), `a,b,c`, or `a`.
pub fn parse_list<T: TryFrom<i64>>(s: &str) -> Result<Vec<T>> {
    let p = |x: &str| -> Result<i64> { x.trim().parse::<i64>().map_err(|e| anyhow::anyhow!("bad value '{x}': {e}")) };
    let v: Vec<i64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (p(a)?, p(b.trim_start_matches('='))?);
        if a > b {
            bail!("empty range '{s}'");
        }
        (a..=b).collect()
    } else {
        s.split(',').map(p).collect::<Result<_>>()?
    };
    v.into_iter().map(|x| T::try_from(x).map_err(|_| anyhow::anyhow!("value {x} out of range"))).collect()
}

fn range_of<T: TryFrom<i64> + Copy>(s: &str) -> Result<std::ops::RangeInclusive<T>> {
    let v = parse_list::<T>(s)?;
    Ok(v[0]..=*v.last().unwrap())
}

pub struct Selected {
    pub polys: FamilyPoly,
    pub mask: MaskRule,
    pub name: Option<String>,
    registered: bool,
    opts: BuildOptions,
}

impl Selected {
    pub fn build(&self, lx: usize, ly: usize) -> Result<LatticeCode> {
        let r = if self.registered {
            let fam = find_family(self.name.as_deref().unwrap()).unwrap();
            build_open_code(&fam, lx, ly, &self.opts)
        } else {
            build_from_polys(&self.polys, LatticeSpec::new(lx, ly, self.mask.clone())?, &self.opts)
        };
        r.map_err(|e| anyhow::anyhow!("{e}"))
    }
}

pub fn select(a: &FamilyArgs) -> Result<Selected> {
    let opts = BuildOptions {
        corner_radius: a.corner_radius,
        promotion: if a.promotion == "smaller" { Promotion::SmallerWeight } else { Promotion::LargerWeight },
    };
    if let Some(name) = &a.family {
        let fam = find_family(name).with_context(|| format!("unknown family '{name}' (see `pqldpc families`)"))?;
        return Ok(Selected { polys: fam.polys.clone(), mask: fam.mask.clone(), name: Some(name.clone()), registered: true, opts });
    }
    let (Some(f), Some(g)) = (&a.f, &a.g) else { bail!("give --family or both --f and --g") };
    // Each polynomial is shifted into the first quadrant, as in the search.
    let polys = FamilyPoly::parse("inline", f, g).map_err(|e| anyhow::anyhow!("{e}"))?.normalized();
    let mask = match &a.mask {
        Some(m) => m.parse().map_err(anyhow::Error::msg)?,
        None => family_mask(&polys),
    };
    Ok(Selected { polys, mask, name: None, registered: false, opts })
}

fn distance_err(e: DistanceError) -> anyhow::Error {
    match e {
        DistanceError::CertificateRejected { side } => VerificationFailure(format!("{side} certificate did not re-verify")).into(),
        e => anyhow::anyhow!("{e}"),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    par::init_threads(cli.threads);
    match cli.cmd {
        Command::Families => cmd_families(),
        Command::Build(a) => cmd_build(&a),
        Command::Distance(a) => cmd_distance(&a),
        Command::Graft(a) => cmd_graft(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Search(a) => cmd_search(&a),
        Command::Fractal(a) => cmd_fractal(&a),
        Command::Export(a) => cmd_export(&a),
        Command::Import(a) => cmd_import(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Verify(a) => cmd_verify(&a.manifest),
    }
}

fn cmd_families() -> Result<()> {
    #[derive(serde::Serialize)]
    struct Entry {
        name: String,
        f: String,
        g: String,
        mask: String,
        k: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        n_formula: Option<String>,
    }
    #[derive(serde::Serialize)]
    struct Registry {
        family: Vec<Entry>,
    }
    let family = family_registry()
        .into_iter()
        .map(|f| Entry {
            name: f.name().to_string(),
            f: f.polys.f.to_string(),
            g: f.polys.g.to_string(),
            mask: f.mask.to_string(),
            k: f.expected_k,
            n_formula: Some(f.n_formula.to_string()),
        })
        .collect();
    print!("{}", toml::to_string(&Registry { family })?);
    Ok(())
}

fn cmd_build(a: &BuildArgs) -> Result<()> {
    let sel = select(&a.family)?;
    let lc = sel.build(a.lx, a.ly)?;
    let mut m = Manifest::from_lattice(&lc, sel.name.as_deref());
    m.provenance = format!("build {} {}x{}", sel.name.as_deref().unwrap_or("inline"), a.lx, a.ly);
    m.save(&a.out)?;
    println!("{}", lc.code.summary());
    Ok(())
}

fn load_code(path: &Path) -> Result<(Manifest, CssCode)> {
    let m = Manifest::load(path)?;
    let c = m.to_code()?;
    Ok((m, c))
}

const AUTO_EXACT_N: usize = 150;

fn cmd_distance(a: &DistanceArgs) -> Result<()> {
    let (mut m, code) = load_code(&a.manifest)?;
    let policy = a.policy.policy(AUTO_EXACT_N);
    let report = par::distance(&code, &policy).map_err(distance_err)?;
    m.set_report(&report, a.policy.method(code.n(), AUTO_EXACT_N));
    m.save(a.out.as_ref().unwrap_or(&a.manifest))?;
    println!("{} ({}, kd^2/n = {:.3})", report.params, report.params.certainty, report.params.metric());
    Ok(())
}

fn cmd_graft(a: &GraftArgs) -> Result<()> {
    let (m, code) = load_code(&a.manifest)?;
    let target = a.target_d.or(m.params.as_ref().map(|p| p.d));
    let cfg = GraftConfig {
        trials: a.trials.max(1),
        seed: a.seed,
        restrict_r1: !a.general,
        max_weight: a.max_weight,
        allow_weight_growth: a.allow_weight_growth,
        step_isd_trials: a.step_trials,
        final_policy: DistancePolicy { exact_max_n: a.exact_max_n, dmax: 64, isd_trials: Some(a.final_trials), seed: a.seed, ..Default::default() },
        target_distance: target,
        check_invariants: true,
    };
    let r = par::graft_search(&code, &cfg).map_err(|e| match e {
        planar_qldpc::graft::GraftError::Invariant(s) => VerificationFailure(s).into(),
        e => anyhow::anyhow!("{e}"),
    })?;
    let mut out = Manifest::from_code(&r.best.code);
    out.source = m.source.clone();
    out.provenance = format!("graft of {} (trials {}, seed {})", a.manifest.display(), cfg.trials, cfg.seed);
    out.set_report(&r.report, if r.best.code.n() <= a.exact_max_n { "exact" } else { "isd" });
    out.graft = Some(GraftSection {
        input_n: code.n(),
        input_d: r.input_distance,
        trials: cfg.trials,
        seed: cfg.seed,
        best_trial: r.best.trial,
        log: r.best.log.iter().map(RemovalEntry::from).collect(),
    });
    out.save(&a.out)?;
    if !r.discarded.is_empty() {
        eprintln!("trials that lost distance on re-verification: {:?}", r.discarded);
    }
    eprintln!("final n per trial: {:?}", r.trial_sizes);
    println!("[[{},{},{}]] -> {} ({} removals, trial {})", code.n(), code.logical_dim(), r.input_distance, r.report.params, r.best.log.len(), r.best.trial);
    if r.report.params.d < r.input_distance {
        return Err(VerificationFailure(format!("distance dropped to {}", r.report.params.d)).into());
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    use rayon::prelude::*;
    let sel = select(&a.family)?;
    let lxs: Vec<usize> = parse_list(&a.lx)?;
    let lys: Vec<usize> = parse_list(&a.ly)?;
    let sizes: Vec<(usize, usize)> = lxs.iter().flat_map(|&x| lys.iter().map(move |&y| (x, y))).filter(|(x, y)| !a.diagonal || x == y).collect();
    let mut policy = a.policy.policy(a.exact_max_n);
    if a.policy.exact {
        policy.exact_max_n = usize::MAX;
    }
    let name = sel.name.clone().unwrap_or_else(|| "inline".into());
    let rows: Vec<_> = sizes
        .par_iter()
        .map(|&(lx, ly)| {
            let mut row = if sel.registered {
                match sel.build(lx, ly) {
                    Ok(lc) => {
                        let mut polys = lc.polys.clone();
                        polys.name = name.clone();
                        sweep_one(&polys, &lc.spec.mask, lx, ly, 0, &policy)
                    }
                    Err(e) => planar_qldpc::search::SweepRow { family: name.clone(), exps: None, lx, ly, n: 0, k: 0, d: None, certainty: planar_qldpc::Certainty::BoundedBelow, metric: 0.0, error: Some(e.to_string()) },
                }
            } else {
                sweep_one(&sel.polys, &sel.mask, lx, ly, 0, &policy)
            };
            row.family = name.clone();
            row
        })
        .collect();
    for r in &rows {
        match (&r.error, r.d) {
            (None, Some(d)) => println!("{}x{}: [[{},{},{}]] {}", r.lx, r.ly, r.n, r.k, d, r.certainty),
            (e, _) => println!("{}x{}: failed ({})", r.lx, r.ly, e.as_deref().unwrap_or("?")),
        }
    }
    if let Some(out) = &a.out {
        table::write_rows(out, &rows)?;
    }
    Ok(())
}

fn cmd_search(a: &SearchArgs) -> Result<()> {
    let exps = range_of::<i32>(&a.exps)?;
    let range = SearchRange { a: exps.clone(), b: exps.clone(), c: exps.clone(), d: exps, lx: range_of(&a.lx)?, ly: range_of(&a.ly)?, max_n: a.max_n, dedup: !a.no_dedup };
    let ks: Vec<usize> = parse_list(&a.k)?;
    let ds: Vec<usize> = parse_list(&a.d)?;
    let policy = DistancePolicy { exact_max_n: a.exact_max_n, dmax: 32, exact_budget: 50_000_000, isd_trials: a.trials, seed: a.seed };
    let (ck, seed_rows) = match &a.checkpoint {
        Some(p) => {
            let (c, r) = table::Checkpoint::open(p)?;
            (Some(std::sync::Mutex::new(c)), r)
        }
        None => (None, Vec::new()),
    };
    let on_family = |f: &planar_qldpc::search::EnumeratedFamily, rows: &[planar_qldpc::search::SweepRow]| {
        if let Some(ck) = &ck {
            if let Err(e) = ck.lock().unwrap().record_family(&f.id, rows) {
                eprintln!("checkpoint write failed: {e}");
            }
        }
    };
    let t = par::optimal_table(&range, &ks, &ds, &policy, &seed_rows, &on_family);
    print!("{}", table::format_table(&t));
    if let Some(out) = &a.out {
        table::write_rows(out, &t.rows)?;
    }
    Ok(())
}

fn cmd_fractal(a: &FractalArgs) -> Result<()> {
    let sel = select(&a.family)?;
    if a.sizes.is_empty() {
        bail!("give --sizes");
    }
    let mut weights = Vec::new();
    for &l in &a.sizes {
        let lc = sel.build(l, l)?;
        let b = fractal_upper_bound(&lc, a.max_level).map_err(|e| anyhow::anyhow!("L={l}: {e}"))?;
        println!("L={l}: weight {} (level {}, offset {:?}, residual violations {})", b.weight, b.operator.level, b.offset, b.operator.residual_violations.len());
        if let Some(dir) = &a.svg_dir {
            std::fs::create_dir_all(dir)?;
            let s = svg::render(&lc.code, Some(svg::Overlay { pauli: Pauli::X, support: &b.support }))?;
            std::fs::write(dir.join(format!("fractal_L{l}.svg")), s)?;
        }
        weights.push(b.weight.to_string());
    }
    println!("{}", weights.join(","));
    Ok(())
}

fn cmd_export(a: &ExportArgs) -> Result<()> {
    let (_, code) = load_code(&a.manifest)?;
    let ext = a.format.extension();
    let path = |s: &str| PathBuf::from(format!("{}.{s}", a.out.display()));
    std::fs::write(path(&format!("hx.{ext}")), a.format.write(code.hx()))?;
    std::fs::write(path(&format!("hz.{ext}")), a.format.write(code.hz()))?;
    let labels: Vec<String> = code.labels().iter().map(|l| l.to_string()).collect();
    std::fs::write(path("labels"), labels.join("\n") + "\n")?;
    println!("wrote {}.{{hx.{ext},hz.{ext},labels}}", a.out.display());
    Ok(())
}

fn cmd_import(a: &ImportArgs) -> Result<()> {
    let read = |p: &Path| -> Result<_> { a.format.read(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?) };
    let (hx, hz) = (read(&a.hx)?, read(&a.hz)?);
    let labels = match &a.labels {
        Some(p) => std::fs::read_to_string(p)?.lines().filter(|l| !l.is_empty()).map(|l| l.parse().map_err(anyhow::Error::msg)).collect::<Result<Vec<_>>>()?,
        None => (0..hx.cols()).map(planar_qldpc::QubitLabel::Index).collect(),
    };
    let code = CssCode::new_unchecked_columns(hx, hz, labels, format!("import {}", a.hx.display())).map_err(|e| VerificationFailure(e.to_string()))?;
    Manifest::from_code(&code).save(&a.out)?;
    println!("{}", code.summary());
    Ok(())
}

fn cmd_render(a: &RenderArgs) -> Result<()> {
    let (m, code) = load_code(&a.manifest)?;
    let cert = if a.certificate { m.certificate_vec()?.context("manifest has no certificate")?.into() } else { None };
    let overlay = cert.as_ref().map(|(p, v)| svg::Overlay { pauli: *p, support: v });
    std::fs::write(&a.out, svg::render(&code, overlay)?)?;
    Ok(())
}

fn cmd_verify(path: &Path) -> Result<()> {
    let m = Manifest::load(path)?;
    // A manifest that loads but does not describe a valid code fails verification.
    let problems = verify(&m).map_err(|e| VerificationFailure(format!("{e:#}")))?;
    if !problems.is_empty() {
        return Err(VerificationFailure(problems.join("; ")).into());
    }
    match &m.params {
        Some(p) => println!("ok: [[{},{},{}]] {}", m.code.n, m.code.k, p.d, p.certainty),
        None => println!("ok: [[{},{},?]]", m.code.n, m.code.k),
    }
    Ok(())
}

/// Map an error to the documented exit codes.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<VerificationFailure>().is_some() {
        1
    } else {
        2
    }
}
