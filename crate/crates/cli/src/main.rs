//! `xili`: batch front end for the coefficient engine.
//!
//! Exit status: 0 success, 1 usage or I/O error, 2 the requested precision
//! or range cannot be honoured, 3 a computed result violates an invariant.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;
use serde::Serialize;

use xili_core::analysis::{
    asym_check, circle_scan, cnp_fit, dip_heights, fit_log_an, jm_exponent, jm_scan, mean_nearest_distance,
    pa_row, peak_row, sandwich_scan_real, strictly_interleaved, theta_for_t, CircleScanOptions, CnpShift, FitResult,
    ScanReport,
};
use xili_core::cache::{verify_cache, CacheFile, Family};
use xili_core::lambda::{lambda_sequence, reciprocal_phi, singularity_diagnostics};
use xili_core::li::{
    a1_closed_form, an_bounds_check, an_oracle, an_recurrence_residual, li_an_streaming, max_rel_disagreement,
    sigma_table, CnpMode, CnpRow, CnpStream, CnpTable, LiCoefficients, LiMethod,
};
use xili_core::mobius::{locus_emit, MapKind};
use xili_core::precision::{format_decimal, rel_diff};
use xili_core::xi::{xi_r_table, XiCoefficients};
use xili_core::{Error, PrecisionContext, GENERATOR_VERSION};

#[derive(Parser, Debug)]
#[command(name = "xili", version, about = "Riemann xi, Li and Keiper-Li coefficients at configurable precision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the ξ_r table by quadrature.
    Xi(XiArgs),
    /// Compute a_n from C_{n,p} and Σ_p, with bounds and oracle reports.
    Li(LiArgs),
    /// λ_n (both normalizations), A_j, b_n and R_n from an a_n cache.
    Lambda(LambdaArgs),
    /// Real-axis sandwich scan, unit-circle scan and w-plane loci.
    Scan(ScanArgs),
    /// Fits, asymptotic ratios, j_m scan and peak-summand rows.
    Fit(FitArgs),
    /// Re-check the invariants of cache files.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Decimal digits of working precision (>= 20).
    #[arg(long, default_value_t = 50)]
    digits: u32,
    /// Guard digits carried beyond --digits.
    #[arg(long, default_value_t = 10)]
    guard: u32,
    /// tail_tol = 10^-K; defaults to 10^-digits.
    #[arg(long, value_name = "K")]
    tail_tol: Option<u32>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Enable the full-scale checks.
    #[arg(long)]
    long_running: bool,
}

impl Common {
    fn ctx(&self) -> Result<PrecisionContext, Error> {
        PrecisionContext::with_params(self.digits, self.guard, PrecisionContext::DEFAULT_SERIES_ORDER, self.tail_tol)
    }

    fn params(&self) -> BTreeMap<String, String> {
        let mut p = BTreeMap::new();
        p.insert("guard".into(), self.guard.to_string());
        p.insert("tail_tol".into(), format!("1e-{}", self.tail_tol.unwrap_or(self.digits)));
        p
    }
}

#[derive(Args, Debug, Serialize)]
struct XiArgs {
    #[command(flatten)]
    common: Common,
    /// Truncation order R.
    #[arg(long, default_value_t = 300)]
    terms: usize,
}

#[derive(Args, Debug, Serialize)]
struct LiArgs {
    #[command(flatten)]
    common: Common,
    /// ξ_r cache; computed with --terms when absent.
    #[arg(long)]
    xi: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    terms: usize,
    /// Highest n.
    #[arg(long, default_value_t = 1000)]
    nmax: usize,
    /// Highest n compared against the composition oracle.
    #[arg(long, default_value_t = 100)]
    oracle_limit: usize,
}

#[derive(Args, Debug, Serialize)]
struct LambdaArgs {
    #[command(flatten)]
    common: Common,
    /// a_n cache.
    #[arg(long)]
    a: PathBuf,
    /// Highest λ index J (needs a_n up to J + 1); defaults to N − 1.
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    xi: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    terms: usize,
    /// Real-axis σ range.
    #[arg(long, default_value = "1:30", value_parser = parse_range)]
    range: (f64, f64),
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Height range t of the circle scan.
    #[arg(long, default_value = "10:60", value_parser = parse_range)]
    t_range: (f64, f64),
    /// Number of θ steps of the circle scan.
    #[arg(long, default_value_t = 6000)]
    steps: usize,
}

#[derive(Args, Debug, Serialize)]
struct FitArgs {
    #[command(flatten)]
    common: Common,
    /// a_n cache.
    #[arg(long)]
    a: PathBuf,
    /// ξ_r cache for the Σ_p based rows; computed with --terms when absent.
    #[arg(long)]
    xi: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    terms: usize,
    /// n range of the log a_n fit and the asymptotic ratio.
    #[arg(long, default_value = "500:1000", value_parser = parse_range_usize)]
    range: (usize, usize),
    /// Rows of the peak-summand table.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    table_n: Vec<usize>,
    /// Largest n of the j_m scan (0 skips it).
    #[arg(long, default_value_t = 0)]
    jm_nmax: usize,
    /// Row of the C_{n,p} fit; its p window is [n/50, n/5].
    #[arg(long, default_value_t = 2000)]
    cnp_n: usize,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    files: Vec<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if hi < lo {
        return Err("HI must not be below LO".into());
    }
    Ok((lo, hi))
}

fn parse_range_usize(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if hi < lo {
        return Err("HI must not be below LO".into());
    }
    Ok((lo, hi))
}

/// A detected invariant violation (exit status 3).
#[derive(Debug)]
struct Violation(String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invariant violated: {}", self.0)
    }
}

impl std::error::Error for Violation {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<Violation>().is_some() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            if e.is_refusal() {
                return 2;
            }
            if matches!(e, Error::Invariant(_) | Error::NonPositiveCoefficient { .. }) {
                return 3;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    // clap exits with 2 on bad arguments, which would read as a refusal here
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Xi(a) => cmd_xi(a),
        Command::Li(a) => cmd_li(a),
        Command::Lambda(a) => cmd_lambda(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xili: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// JSON document `{generator, config, result}`.
fn write_json<C: Serialize, T: Serialize>(path: &Path, config: &C, result: &T) -> anyhow::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, C, T> {
        generator: &'a str,
        config: &'a C,
        result: &'a T,
    }
    let doc = Doc { generator: GENERATOR_VERSION, config, result };
    write_text(path, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

/// CSV with `# key: value` config lines ahead of the header row.
fn write_csv<C: Serialize>(path: &Path, config: &C, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut out = format!("# generator: {GENERATOR_VERSION}\n# config: {}\n", serde_json::to_string(config)?);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    out.push_str(std::str::from_utf8(&w.into_inner().map_err(|e| anyhow!("{e}"))?)?);
    write_text(path, &out)
}

fn load_or_compute_xi(path: Option<&Path>, terms: usize, ctx: &PrecisionContext) -> anyhow::Result<XiCoefficients> {
    match path {
        Some(p) => {
            let file = CacheFile::read(p).with_context(|| format!("reading {}", p.display()))?;
            if file.family != Family::XiR {
                bail!("{} is a {} cache, not xi_r", p.display(), file.family.tag());
            }
            if file.digits < ctx.digits() {
                return Err(Error::InvalidContext(format!(
                    "xi cache has {} digits, {} requested",
                    file.digits,
                    ctx.digits()
                ))
                .into());
            }
            Ok(XiCoefficients::imported(file.values(ctx.guard_digits())?, file.digits)?)
        }
        None => Ok(xi_r_table(terms, ctx)?),
    }
}

fn load_an(path: &Path, ctx: &PrecisionContext) -> anyhow::Result<LiCoefficients> {
    let file = CacheFile::read(path).with_context(|| format!("reading {}", path.display()))?;
    if file.family != Family::An {
        bail!("{} is a {} cache, not a_n", path.display(), file.family.tag());
    }
    if file.digits < ctx.digits() {
        return Err(Error::InvalidContext(format!("a_n cache has {} digits, {} requested", file.digits, ctx.digits())).into());
    }
    Ok(LiCoefficients::new(file.values(ctx.guard_digits())?, LiMethod::Imported, file.digits)?)
}

fn dec(x: &Float, digits: u32) -> String {
    format_decimal(x, digits)
}

fn cmd_xi(args: &XiArgs) -> anyhow::Result<()> {
    let ctx = args.common.ctx()?;
    ensure_dir(&args.common.out)?;
    let xi = xi_r_table(args.terms, &ctx)?;
    let mut params = args.common.params();
    params.insert("R".into(), args.terms.to_string());
    if let Some(q) = xi.quadrature() {
        params.insert("quadrature_step".into(), format!("{:e}", q.step));
        params.insert("quadrature_upper".into(), format!("{}", q.upper));
        params.insert("quadrature_nodes".into(), q.nodes.to_string());
    }
    let file = CacheFile::from_floats(Family::XiR, ctx.digits(), xi.method().as_str(), params, xi.values());
    file.write(&args.common.out.join("xi_r.txt"))?;
    let unit = Float::with_val(ctx.prec(), xi.two_xi_at_one() - 1u32);
    println!("xi_0 = {}", dec(xi.get(0), ctx.digits()));
    println!("2*sum xi_r/4^r - 1 = {}", dec(&unit, 6));
    Ok(())
}

#[derive(Serialize)]
struct LiReport {
    n_max: usize,
    a1: String,
    a1_closed_form: String,
    a1_rel_diff: f64,
    oracle_limit: usize,
    oracle_max_rel_diff: f64,
    oracle_worst_n: usize,
    oracle_tolerance: f64,
    recurrence_max_rel_residual: f64,
    recurrence_checked_to: usize,
    bounds: xili_core::li::BoundsReport,
}

fn cmd_li(args: &LiArgs) -> anyhow::Result<()> {
    let ctx = args.common.ctx()?;
    ensure_dir(&args.common.out)?;
    let xi = load_or_compute_xi(args.xi.as_deref(), args.terms, &ctx)?;
    let n = args.nmax;
    let sig = sigma_table(n, &xi, &ctx)?;
    let li = li_an_streaming(n, &sig, &ctx)?;

    let mut params = args.common.params();
    params.insert("N".into(), n.to_string());
    params.insert("R".into(), xi.order().to_string());
    params.insert("xi_method".into(), xi.method().as_str().into());
    let out = &args.common.out;
    CacheFile::from_floats(Family::An, ctx.digits(), li.method().as_str(), params.clone(), li.values())
        .write(&out.join("a_n.txt"))?;
    CacheFile::from_floats(Family::SigmaP, ctx.digits(), "moment-sum", params, sig.values())
        .write(&out.join("Sigma_p.txt"))?;

    let closed = a1_closed_form(&ctx);
    let a1_rel = rel_diff(li.get(1)?, &closed).to_f64();
    let lim = args.oracle_limit.min(n);
    let oracle = an_oracle(lim.max(1), &xi, &ctx)?;
    let (worst_n, worst) = max_rel_disagreement(&li, &oracle, lim.max(1))?;
    let tol = 10f64.powi(-(ctx.digits() as i32 - 10));
    let rec_to = n.min(300);
    let mut rec_max = 0.0f64;
    if rec_to >= 3 {
        let cnp = CnpTable::build(rec_to, CnpMode::Bigfloat, &ctx)?;
        for k in 3..=rec_to {
            let r = an_recurrence_residual(&li, &cnp, &sig, k)?;
            rec_max = rec_max.max((r / li.get(k)?).to_f64().abs());
        }
    }
    let bounds = an_bounds_check(&li, &sig)?;
    let report = LiReport {
        n_max: n,
        a1: dec(li.get(1)?, ctx.digits()),
        a1_closed_form: dec(&closed, ctx.digits()),
        a1_rel_diff: a1_rel,
        oracle_limit: lim,
        oracle_max_rel_diff: worst.to_f64(),
        oracle_worst_n: worst_n,
        oracle_tolerance: tol,
        recurrence_max_rel_residual: rec_max,
        recurrence_checked_to: rec_to,
        bounds,
    };
    write_json(&out.join("li_report.json"), args, &report)?;
    println!("a_1 = {}", report.a1);
    println!("oracle agreement n <= {lim}: max rel diff {:e}", report.oracle_max_rel_diff);
    println!("bound violations: {}", report.bounds.violations.len());
    if !report.bounds.is_clean() {
        return Err(Violation(format!("{} bound violations", report.bounds.violations.len())).into());
    }
    if report.oracle_max_rel_diff > tol || a1_rel > tol || rec_max > tol {
        return Err(Violation("a_n disagrees with an independent route".into()).into());
    }
    Ok(())
}

fn cmd_lambda(args: &LambdaArgs) -> anyhow::Result<()> {
    let ctx = args.common.ctx()?;
    ensure_dir(&args.common.out)?;
    let li = load_an(&args.a, &ctx)?;
    let j = args.nmax.unwrap_or(li.n_max().saturating_sub(1));
    let lam = lambda_sequence(&li, j)?;
    let recip = reciprocal_phi(&li, j)?;
    let diag = singularity_diagnostics(&li, li.n_max())?;
    let mut params = args.common.params();
    params.insert("J".into(), j.to_string());
    params.insert("N".into(), li.n_max().to_string());
    let d = ctx.digits();
    let out = &args.common.out;
    CacheFile::from_floats(Family::LambdaLi, d, "phi-prime-over-phi", params.clone(), lam.li()).write(&out.join("lambda_n.txt"))?;
    CacheFile::from_floats(Family::LambdaKeiper, d, "phi-prime-over-phi", params.clone(), lam.keiper())
        .write(&out.join("lambda_n_keiper.txt"))?;
    CacheFile::from_floats(Family::Aj, d, "reciprocal-recurrence", params.clone(), recip.coeffs()).write(&out.join("A_j.txt"))?;
    CacheFile::from_floats(Family::Bn, d, "binomial-transform", params.clone(), &diag.b).write(&out.join("b_n.txt"))?;
    CacheFile::from_floats(Family::Rn, d, "root-test", params, &diag.radius).write(&out.join("R_n.txt"))?;
    println!("lambda_1 = {}", dec(lam.li_at(1), d));
    let bad: Vec<usize> = lam.li().iter().enumerate().filter(|(_, v)| **v <= 0).map(|(i, _)| i + 1).collect();
    if !bad.is_empty() {
        return Err(Violation(format!("non-positive lambda_n at n = {bad:?}")).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanSummary {
    violations: BTreeMap<String, usize>,
    dips: BTreeMap<String, usize>,
    first_xi_dip_t: Option<f64>,
    plus_minus_interleaved: bool,
    mean_distance_plus_to_xi: f64,
    mean_distance_minus_to_xi: f64,
    refused_events: usize,
}

fn scan_csv(report: &ScanReport) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["param".to_string()];
    header.extend(report.columns.iter().cloned());
    header.push("events".into());
    let mut marks: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for e in &report.events {
        let idx = report.samples.partition_point(|s| s.param < e.location).min(report.samples.len().saturating_sub(1));
        let kind = serde_json::to_value(e.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        marks.entry(idx).or_default().push(format!("{kind}:{}", e.function));
    }
    let rows = report
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut r = vec![format!("{:.12e}", s.param)];
            r.extend(s.values.iter().map(|v| format!("{v:.15e}")));
            r.push(marks.get(&i).map(|m| m.join(";")).unwrap_or_default());
            r
        })
        .collect();
    (header, rows)
}

fn write_scan(path_stem: &Path, args: &ScanArgs, report: &ScanReport) -> anyhow::Result<()> {
    match args.common.format {
        Format::Json => write_json(&path_stem.with_extension("json"), args, report),
        Format::Csv => {
            let (h, rows) = scan_csv(report);
            let h: Vec<&str> = h.iter().map(String::as_str).collect();
            write_csv(&path_stem.with_extension("csv"), args, &h, &rows)
        }
    }
}

fn cmd_scan(args: &ScanArgs) -> anyhow::Result<()> {
    let ctx = args.common.ctx()?;
    let out = &args.common.out;
    ensure_dir(out)?;
    let xi = load_or_compute_xi(args.xi.as_deref(), args.terms, &ctx)?;
    let real = sandwich_scan_real(args.range.0, args.range.1, args.step, &xi, &ctx)?;
    write_scan(&out.join("sandwich"), args, &real)?;

    let (t_lo, t_hi) = args.t_range;
    let circle = circle_scan(theta_for_t(t_hi), theta_for_t(t_lo), args.steps, &xi, &ctx, &CircleScanOptions::default())?;
    write_scan(&out.join("circle"), args, &circle)?;

    let loci = [(MapKind::W, 1.0), (MapKind::WM, 1.0), (MapKind::WM, 3.0), (MapKind::WH, 1.0), (MapKind::WH, 2.0)];
    for (kind, m) in loci {
        let locus = locus_emit(kind, m, 401)?;
        let rows: Vec<Vec<String>> = locus.points().iter().map(|(x, y)| vec![format!("{x:.15e}"), format!("{y:.15e}")]).collect();
        write_csv(&out.join(format!("locus_{}_{m}.csv", kind.as_str())), args, &["x", "y"], &rows)?;
    }

    let mut violations = BTreeMap::new();
    for e in real.violations("") {
        *violations.entry(e.function.clone()).or_insert(0) += 1;
    }
    let mut dips = BTreeMap::new();
    for f in xili_core::analysis::CIRCLE_FUNCTIONS {
        dips.insert(f.to_string(), circle.dips(f).len());
    }
    let (txi, tp, tm) = (dip_heights(&circle, "2xi"), dip_heights(&circle, "xi_plus"), dip_heights(&circle, "xi_minus"));
    let summary = ScanSummary {
        violations: violations.clone(),
        dips,
        first_xi_dip_t: txi.first().copied(),
        plus_minus_interleaved: strictly_interleaved(&tp, &tm),
        mean_distance_plus_to_xi: mean_nearest_distance(&tp, &txi),
        mean_distance_minus_to_xi: mean_nearest_distance(&tm, &txi),
        refused_events: circle.events_of(xili_core::analysis::EventKind::Refused).count(),
    };
    write_json(&out.join("scan_summary.json"), args, &summary)?;
    println!("sandwich violations: {violations:?}");
    if let Some(t) = summary.first_xi_dip_t {
        println!("first xi dip at t = {t:.6}");
    }
    // log ξ₋(σ) > 0 cannot hold near σ = 1, where ξ₋(1) < 1; it is reported, not enforced
    let hard: usize = violations.iter().filter(|(k, _)| k.as_str() != "log:positive").map(|(_, v)| v).sum();
    if hard > 0 || !summary.plus_minus_interleaved {
        return Err(Violation(format!("{hard} sandwich violations, interleaved = {}", summary.plus_minus_interleaved)).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    p_a: usize,
    log_summand: String,
    log_sigma: String,
    nd_central: String,
    nd_forward: String,
}

#[derive(Serialize)]
struct FitOutput {
    log_an: FitResult,
    log_an_full_scale: Option<FitResult>,
    asym_min_ratio: f64,
    asym_max_ratio: f64,
    jm: Vec<(usize, usize)>,
    jm_exponent: Option<FitResult>,
    table: Vec<TableRow>,
    cnp_peak: xili_core::analysis::PeakRow,
    cnp_fit_log_n: FitResult,
    cnp_fit_two_log_n: FitResult,
    cnp_fit_full_scale: Option<FitResult>,
}

fn stream_rows(ns: &[usize], prec: u32) -> Vec<CnpRow<Float>> {
    let max = ns.iter().copied().max().unwrap_or(0);
    CnpStream::new(prec).take(max).filter(|r| ns.contains(&r.n())).collect()
}

fn cmd_fit(args: &FitArgs) -> anyhow::Result<()> {
    let ctx = args.common.ctx()?;
    let out = &args.common.out;
    ensure_dir(out)?;
    let li = load_an(&args.a, &ctx)?;
    let (lo, hi) = args.range;
    let log_an = fit_log_an(&li, lo, hi)?;
    let asym = asym_check(&li, lo, hi)?;
    let log_an_full_scale = if args.common.long_running && li.n_max() >= 4000 {
        Some(fit_log_an(&li, 1000, 4000)?)
    } else {
        None
    };
    let jm = if args.jm_nmax >= 2 { jm_scan(&li, args.jm_nmax)? } else { Vec::new() };
    let jm_exp = if jm.len() >= 3 { Some(jm_exponent(&jm)?) } else { None };

    let mut wanted: Vec<usize> = args.table_n.clone();
    wanted.push(args.cnp_n);
    if args.common.long_running {
        wanted.push(10000);
    }
    let rows = stream_rows(&wanted, ctx.prec());
    let row_of = |n: usize| rows.iter().find(|r| r.n() == n).ok_or_else(|| anyhow!("row {n} missing"));

    let mut table = Vec::new();
    if !args.table_n.is_empty() {
        let xi = load_or_compute_xi(args.xi.as_deref(), args.terms, &ctx)?;
        let p_max = args.table_n.iter().copied().max().unwrap_or(1) + 1;
        let sig = sigma_table(p_max, &xi, &ctx)?;
        for &n in &args.table_n {
            let r = pa_row(row_of(n)?, &sig)?;
            table.push(TableRow {
                n,
                p_a: r.p_a,
                log_summand: dec(&r.log_summand, 25),
                log_sigma: dec(&r.log_sigma, 20),
                nd_central: dec(&r.nd_central, 15),
                nd_forward: dec(&r.nd_forward, 15),
            });
        }
    }
    let crow = row_of(args.cnp_n)?;
    let (plo, phi) = (args.cnp_n / 50, args.cnp_n / 5);
    let output = FitOutput {
        log_an,
        log_an_full_scale,
        asym_min_ratio: asym.min_ratio,
        asym_max_ratio: asym.max_ratio,
        jm: jm.clone(),
        jm_exponent: jm_exp,
        cnp_peak: peak_row(crow),
        cnp_fit_log_n: cnp_fit(crow, plo, phi, CnpShift::LogN)?,
        cnp_fit_two_log_n: cnp_fit(crow, plo, phi, CnpShift::TwoLogN)?,
        cnp_fit_full_scale: if args.common.long_running {
            Some(cnp_fit(row_of(10000)?, 200, 1000, CnpShift::TwoLogN)?)
        } else {
            None
        },
        table,
    };
    match args.common.format {
        Format::Json => write_json(&out.join("fits.json"), args, &output)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = output
                .table
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.p_a.to_string(),
                        r.log_summand.clone(),
                        r.log_sigma.clone(),
                        r.nd_central.clone(),
                        r.nd_forward.clone(),
                    ]
                })
                .collect();
            write_csv(
                &out.join("table1.csv"),
                args,
                &["n", "p_a", "log_summand", "log_sigma", "nd_central", "nd_forward"],
                &rows,
            )?;
            let rows: Vec<Vec<String>> = asym
                .samples
                .iter()
                .map(|(n, la, f, r)| vec![n.to_string(), format!("{la:.15e}"), format!("{f:.15e}"), format!("{r:.15e}")])
                .collect();
            write_csv(&out.join("asym.csv"), args, &["n", "log_a_n", "formula", "ratio"], &rows)?;
            let rows: Vec<Vec<String>> = jm.iter().map(|(n, j)| vec![n.to_string(), j.to_string()]).collect();
            write_csv(&out.join("jm.csv"), args, &["n", "j_m"], &rows)?;
            write_json(&out.join("fits.json"), args, &output)?;
        }
    }
    println!("log a_n/n slope on [{lo}, {hi}] = {:.8}", output.log_an.param("c1"));
    for r in &output.table {
        println!("n = {}: p_a = {}, log summand = {}", r.n, r.p_a, r.log_summand);
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<()> {
    if args.files.is_empty() {
        bail!("no files given");
    }
    let mut total = 0;
    for path in &args.files {
        let file = CacheFile::read(path).with_context(|| format!("reading {}", path.display()))?;
        let problems = verify_cache(&file)?;
        println!("{}: {} ({} rows), {} problems", path.display(), file.family.tag(), file.rows.len(), problems.len());
        for p in &problems {
            println!("  {p}");
        }
        total += problems.len();
    }
    if total > 0 {
        return Err(Violation(format!("{total} problems")).into());
    }
    Ok(())
}
