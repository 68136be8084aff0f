//! Scans along the real axis and the unit circle, least-squares fits and the
//! asymptotic checks on a_n and C_{n,p}.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::li::{CnpRow, CnpTable, LiCoefficients, SigmaTable};
use crate::precision::{cabs, ln_abs, PrecisionContext};
use crate::xi::{xi_eval, xi_eval_real, xi_pm_eval, XiCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    RealAxis,
    UnitCircle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPath {
    pub kind: PathKind,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Dip,
    SignChange,
    InequalityViolation,
    /// Evaluation refused for lack of certified accuracy.
    Refused,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEvent {
    pub kind: EventKind,
    /// Function or inequality link the event belongs to.
    pub function: String,
    pub location: f64,
    pub refined_location: f64,
    /// log|f| at the refined location for dips; margin for violations.
    pub value: f64,
    /// Height t of s = 1/2 + it on the circle path.
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub param: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub path: ScanPath,
    pub columns: Vec<String>,
    pub samples: Vec<Sample>,
    pub events: Vec<ScanEvent>,
}

impl ScanReport {
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &ScanEvent> + '_ {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// Violations whose link label starts with `prefix`.
    pub fn violations(&self, prefix: &str) -> Vec<&ScanEvent> {
        self.events_of(EventKind::InequalityViolation)
            .filter(|e| e.function.starts_with(prefix))
            .collect()
    }

    /// Refined dip locations of one function, in path order.
    pub fn dips(&self, function: &str) -> Vec<&ScanEvent> {
        self.events_of(EventKind::Dip).filter(|e| e.function == function).collect()
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || hi < lo {
        return Err(Error::Degenerate(format!("bad grid [{lo}, {hi}] step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

/// Real-axis values at σ: ξ(σ+½), ξ(σ), ξ(σ−½), ξ₊(σ), ξ₋(σ).
fn real_axis_values(sigma: f64, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<[Float; 5]> {
    let prec = ctx.prec();
    let s = ctx.float(sigma);
    let up = xi_eval_real(&Float::with_val(prec, &s + 0.5f64), xi, ctx)?;
    let mid = xi_eval_real(&s, xi, ctx)?;
    let down = xi_eval_real(&Float::with_val(prec, &s - 0.5f64), xi, ctx)?;
    let plus = Float::with_val(prec, &up + &down);
    let minus = Float::with_val(prec, &up - &down);
    Ok([up, mid, down, plus, minus])
}

/// Checks `ξ(σ+½) > ξ(σ) > ξ(σ−½) > 0` for σ ≥ 3/2, `ξ₊ > ξ > ξ₋ > 0` for
/// σ ≥ 1 and `log ξ₊ > log ξ > log ξ₋ > 0` for σ ≥ 1 on the grid. Each
/// failing link is an inequality-violation event labelled
/// `shift:*`, `pm:*` or `log:*`.
pub fn sandwich_scan_real(lo: f64, hi: f64, step: f64, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<ScanReport> {
    let sigmas = grid(lo, hi, step)?;
    let rows: Vec<[Float; 5]> = sigmas
        .par_iter()
        .map(|&s| real_axis_values(s, xi, ctx))
        .collect::<Result<_>>()?;
    let prec = ctx.prec();
    let mut events = Vec::new();
    let mut samples = Vec::with_capacity(rows.len());
    for (&sigma, v) in sigmas.iter().zip(&rows) {
        let [up, mid, down, plus, minus] = v;
        let mut check = |label: &str, lhs: &Float, rhs: &Float| {
            if lhs <= rhs {
                let margin = Float::with_val(prec, lhs - rhs).to_f64();
                events.push(ScanEvent {
                    kind: EventKind::InequalityViolation,
                    function: label.to_string(),
                    location: sigma,
                    refined_location: sigma,
                    value: margin,
                    t: None,
                });
            }
        };
        let zero = Float::new(prec);
        if sigma >= 1.5 {
            check("shift:upper", up, mid);
            check("shift:lower", mid, down);
            check("shift:positive", down, &zero);
        }
        if sigma >= 1.0 {
            check("pm:upper", plus, mid);
            check("pm:lower", mid, minus);
            check("pm:positive", minus, &zero);
            if *minus > 0 {
                let lp = Float::with_val(prec, plus.ln_ref());
                let lm = Float::with_val(prec, mid.ln_ref());
                let ln = Float::with_val(prec, minus.ln_ref());
                check("log:upper", &lp, &lm);
                check("log:lower", &lm, &ln);
                check("log:positive", &ln, &zero);
            }
        }
        samples.push(Sample { param: sigma, values: v.iter().map(Float::to_f64).collect() });
    }
    Ok(ScanReport {
        path: ScanPath { kind: PathKind::RealAxis, lo, hi, step },
        columns: ["xi(s+1/2)", "xi(s)", "xi(s-1/2)", "xi_plus", "xi_minus"].map(String::from).to_vec(),
        samples,
        events,
    })
}

/// θ on the unit circle whose image s = 1/(1 − e^{iθ}) has height t.
pub fn theta_for_t(t: f64) -> f64 {
    2.0 * (1.0 / (2.0 * t)).atan()
}

/// Height t of s = 1/(1 − e^{iθ}) = 1/2 + (i/2) cot(θ/2).
pub fn t_for_theta(theta: f64) -> f64 {
    0.5 / (0.5 * theta).tan()
}

pub const CIRCLE_FUNCTIONS: [&str; 3] = ["2xi", "xi_plus", "xi_minus"];

fn circle_point(theta: f64, ctx: &PrecisionContext) -> Complex {
    let prec = ctx.prec();
    let half = Float::with_val(prec, theta) / 2u32;
    let t = Float::with_val(prec, half.tan_ref()).recip() / 2u32;
    Complex::with_val(prec, (0.5f64, t))
}

/// (2ξ(s), ξ₊(s), ξ₋(s)) at the circle point.
fn circle_values(theta: f64, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<[Complex; 3]> {
    let s = circle_point(theta, ctx);
    let two = Complex::with_val(ctx.prec(), xi_eval(&s, xi, ctx)? * 2u32);
    let (plus, minus) = xi_pm_eval(&s, xi, ctx)?;
    Ok([two, plus, minus])
}

fn circle_abs(theta: f64, which: usize, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<Float> {
    let s = circle_point(theta, ctx);
    let v = match which {
        0 => Complex::with_val(ctx.prec(), xi_eval(&s, xi, ctx)? * 2u32),
        1 => xi_pm_eval(&s, xi, ctx)?.0,
        _ => xi_pm_eval(&s, xi, ctx)?.1,
    };
    Ok(cabs(&v))
}

/// Minimum of |f| on [a, b] by golden-section search.
fn golden_min<F>(mut a: f64, mut b: f64, f: F) -> Result<(f64, Float)>
where
    F: Fn(f64) -> Result<Float>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Options of [`circle_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct CircleScanOptions {
    /// Minimum drop of the refined log|f| below the neighbourhood median.
    pub dip_depth: f64,
    /// Samples on each side forming the neighbourhood.
    pub half_window: usize,
}

impl Default for CircleScanOptions {
    fn default() -> Self {
        Self { dip_depth: 3.0, half_window: 10 }
    }
}

/// Samples log|2ξ|, log|ξ₊|, log|ξ₋| at s = 1/(1 − e^{iθ}) for `steps + 1`
/// equally spaced θ in [θ_lo, θ_hi], detects dips (local minima whose
/// golden-section refined log|f| lies `dip_depth` below the median of the
/// surrounding samples) and the sign changes of the real-valued 2ξ, ξ₊ and
/// iξ₋ along the critical line. Points where evaluation is refused are
/// dropped and reported as refused events.
pub fn circle_scan(
    theta_lo: f64,
    theta_hi: f64,
    steps: usize,
    xi: &XiCoefficients,
    ctx: &PrecisionContext,
    opts: &CircleScanOptions,
) -> Result<ScanReport> {
    if !(theta_lo > 0.0 && theta_hi > theta_lo && theta_hi < std::f64::consts::TAU) || steps < 2 {
        return Err(Error::Degenerate(format!("bad θ range [{theta_lo}, {theta_hi}] with {steps} steps")));
    }
    let step = (theta_hi - theta_lo) / steps as f64;
    let thetas: Vec<f64> = (0..=steps).map(|k| theta_lo + k as f64 * step).collect();
    let evaluated: Vec<(f64, Result<[Complex; 3]>)> =
        thetas.par_iter().map(|&th| (th, circle_values(th, xi, ctx))).collect();

    let mut events = Vec::new();
    let mut kept: Vec<(f64, [Complex; 3])> = Vec::new();
    let mut in_refusal = false;
    for (th, r) in evaluated {
        match r {
            Ok(v) => {
                in_refusal = false;
                kept.push((th, v));
            }
            Err(e) if e.is_refusal() => {
                if !in_refusal {
                    events.push(ScanEvent {
                        kind: EventKind::Refused,
                        function: "all".into(),
                        location: th,
                        refined_location: th,
                        value: f64::NAN,
                        t: Some(t_for_theta(th)),
                    });
                }
                in_refusal = true;
            }
            Err(e) => return Err(e),
        }
    }
    let samples: Vec<Sample> = kept
        .iter()
        .map(|(th, v)| {
            let mut values = vec![t_for_theta(*th)];
            values.extend(v.iter().map(|z| ln_abs(&cabs(z))));
            Sample { param: *th, values }
        })
        .collect();

    for (f, name) in CIRCLE_FUNCTIONS.iter().enumerate() {
        // sign changes: 2ξ and ξ₊ are real on the line, ξ₋ is imaginary
        for w in kept.windows(2) {
            let part = |z: &Complex| if f == 2 { z.imag().is_sign_negative() } else { z.real().is_sign_negative() };
            if part(&w[0].1[f]) != part(&w[1].1[f]) {
                let mid = 0.5 * (w[0].0 + w[1].0);
                events.push(ScanEvent {
                    kind: EventKind::SignChange,
                    function: name.to_string(),
                    location: w[0].0,
                    refined_location: mid,
                    value: f64::NAN,
                    t: Some(t_for_theta(mid)),
                });
            }
        }
        let col: Vec<f64> = samples.iter().map(|s| s.values[f + 1]).collect();
        let candidates: Vec<usize> = (1..col.len().saturating_sub(1))
            .filter(|&i| col[i] < col[i - 1] && col[i] <= col[i + 1])
            .collect();
        let refined: Vec<Result<Option<ScanEvent>>> = candidates
            .par_iter()
            .map(|&i| {
                let (a, b) = (samples[i - 1].param, samples[i + 1].param);
                let (th, v) = golden_min(a, b, |x| circle_abs(x, f, xi, ctx))?;
                let lo = i.saturating_sub(opts.half_window);
                let hi = (i + opts.half_window).min(col.len() - 1);
                let neighbourhood = col[lo..=hi].to_vec();
                let depth = median(neighbourhood) - ln_abs(&v);
                Ok((depth >= opts.dip_depth).then(|| ScanEvent {
                    kind: EventKind::Dip,
                    function: name.to_string(),
                    location: samples[i].param,
                    refined_location: th,
                    value: ln_abs(&v),
                    t: Some(t_for_theta(th)),
                }))
            })
            .collect();
        for r in refined {
            if let Some(e) = r? {
                events.push(e);
            }
        }
    }
    events.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut columns = vec!["t".to_string()];
    columns.extend(CIRCLE_FUNCTIONS.iter().map(|c| format!("log|{c}|")));
    Ok(ScanReport {
        path: ScanPath { kind: PathKind::UnitCircle, lo: theta_lo, hi: theta_hi, step },
        columns,
        samples,
        events,
    })
}

/// Dip heights t of one function, increasing.
pub fn dip_heights(report: &ScanReport, function: &str) -> Vec<f64> {
    let mut t: Vec<f64> = report.dips(function).iter().filter_map(|e| e.t).collect();
    t.sort_by(f64::total_cmp);
    t
}

/// True when between any two consecutive `a` dips there is exactly one `b`
/// dip and vice versa (strict interleaving of the merged sequence).
pub fn strictly_interleaved(a: &[f64], b: &[f64]) -> bool {
    let mut merged: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    merged.sort_by(|x, y| x.0.total_cmp(&y.0));
    merged.windows(2).all(|w| w[0].1 != w[1].1 && w[0].0 < w[1].0)
}

/// Mean distance from each dip in `from` to the nearest dip in `to`.
pub fn mean_nearest_distance(from: &[f64], to: &[f64]) -> f64 {
    if from.is_empty() || to.is_empty() {
        return f64::NAN;
    }
    from.iter()
        .map(|x| to.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
        .sum::<f64>()
        / from.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub residual_rms: f64,
    pub max_abs_residual: f64,
    pub range: (f64, f64),
    pub sample_count: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }
}

/// Ordinary least squares `y ≈ Σ_k β_k x_k` with column scaling and an SVD
/// solve. Returns β and the residuals.
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = y.len();
    let k = design.first().map_or(0, Vec::len);
    if k == 0 || m < k + 1 || design.len() != m {
        return Err(Error::Degenerate(format!("{m} samples for {k} parameters")));
    }
    let a = DMatrix::from_fn(m, k, |i, j| design[i][j]);
    let scale: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    if scale.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return Err(Error::Degenerate("zero or non-finite design column".into()));
    }
    let scaled = DMatrix::from_fn(m, k, |i, j| design[i][j] / scale[j]);
    let svd = scaled.svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() <= sv.max() * 1e-13 {
        return Err(Error::Degenerate("design matrix is rank deficient".into()));
    }
    let b = DVector::from_column_slice(y);
    let beta = svd.solve(&b, 0.0).map_err(|e| Error::Degenerate(e.to_string()))?;
    let beta: Vec<f64> = beta.iter().zip(&scale).map(|(x, s)| x / s).collect();
    let resid = (0..m)
        .map(|i| y[i] - design[i].iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>())
        .collect();
    Ok((beta, resid))
}

fn fit_result(model: &str, names: &[&str], design: Vec<Vec<f64>>, y: Vec<f64>, range: (f64, f64)) -> Result<FitResult> {
    let (beta, resid) = least_squares(&design, &y)?;
    let rms = (resid.iter().map(|r| r * r).sum::<f64>() / resid.len() as f64).sqrt();
    let max_abs = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !rms.is_finite() {
        return Err(Error::Degenerate("non-finite residual".into()));
    }
    Ok(FitResult {
        model: model.to_string(),
        params: names.iter().map(|n| n.to_string()).zip(beta).collect(),
        residual_rms: rms,
        max_abs_residual: max_abs,
        range,
        sample_count: y.len(),
    })
}

/// Fit `log a_n / n ≈ c0 + c1 log n` over n ∈ [lo, hi].
pub fn fit_log_an(li: &LiCoefficients, lo: usize, hi: usize) -> Result<FitResult> {
    if lo < 2 || hi <= lo || hi > li.n_max() {
        return Err(Error::Degenerate(format!("fit range [{lo}, {hi}] with N = {}", li.n_max())));
    }
    let (mut design, mut y) = (Vec::new(), Vec::new());
    for n in lo..=hi {
        let ln_a = Float::with_val(li.prec(), li.get(n)?.ln_ref()).to_f64();
        design.push(vec![1.0, (n as f64).ln()]);
        y.push(ln_a / n as f64);
    }
    fit_result("log(a_n)/n = c0 + c1*log(n)", &["c0", "c1"], design, y, (lo as f64, hi as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymReport {
    /// (n, log a_n, 15n/log³n, ratio).
    pub samples: Vec<(usize, f64, f64, f64)>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// `15 n / log(n)^3`.
pub fn asym_formula(n: usize) -> f64 {
    let l = (n as f64).ln();
    15.0 * n as f64 / (l * l * l)
}

/// Ratio log a_n / (15n/log³n) for n ∈ [lo, hi].
pub fn asym_check(li: &LiCoefficients, lo: usize, hi: usize) -> Result<AsymReport> {
    if lo < 2 || hi < lo || hi > li.n_max() {
        return Err(Error::Range(format!("asymptotic check range [{lo}, {hi}] with N = {}", li.n_max())));
    }
    let samples: Vec<_> = (lo..=hi)
        .map(|n| {
            let la = Float::with_val(li.prec(), li.get(n).unwrap().ln_ref()).to_f64();
            let f = asym_formula(n);
            (n, la, f, la / f)
        })
        .collect();
    let min_ratio = samples.iter().map(|s| s.3).fold(f64::INFINITY, f64::min);
    let max_ratio = samples.iter().map(|s| s.3).fold(f64::NEG_INFINITY, f64::max);
    Ok(AsymReport { samples, min_ratio, max_ratio })
}

/// j_m(n) = argmax_j a_j (1 − 1/n)^j for n = 2..=n_max; refuses when the
/// maximiser sits at the last available j.
pub fn jm_scan(li: &LiCoefficients, n_max: usize) -> Result<Vec<(usize, usize)>> {
    let ln_a: Vec<Float> = li.values().iter().map(|a| Float::with_val(li.prec(), a.ln_ref())).collect();
    let big_j = ln_a.len();
    (2..=n_max)
        .map(|n| {
            let ln_q = Float::with_val(li.prec(), 1u32 - Float::with_val(li.prec(), 1u32) / n as u32).ln();
            let mut best = (1usize, Float::with_val(li.prec(), f64::NEG_INFINITY));
            for (i, la) in ln_a.iter().enumerate() {
                let j = i + 1;
                let v = Float::with_val(li.prec(), &ln_q * j as u32) + la;
                if v > best.1 {
                    best = (j, v);
                }
            }
            if best.0 == big_j {
                return Err(Error::InsufficientTerms(format!("j_m({n}) reaches the last available a_j (J = {big_j})")));
            }
            Ok((n, best.0))
        })
        .collect()
}

/// Power-law fit log j_m = c + e log n.
pub fn jm_exponent(scan: &[(usize, usize)]) -> Result<FitResult> {
    let design = scan.iter().map(|&(n, _)| vec![1.0, (n as f64).ln()]).collect();
    let y = scan.iter().map(|&(_, j)| (j as f64).ln()).collect();
    let lo = scan.first().map_or(0.0, |s| s.0 as f64);
    let hi = scan.last().map_or(0.0, |s| s.0 as f64);
    fit_result("log(j_m) = c + e*log(n)", &["c", "e"], design, y, (lo, hi))
}

/// One row of the peak-summand table.
#[derive(Debug, Clone)]
pub struct PaRow {
    pub n: usize,
    pub p_a: usize,
    /// log(C_{n,p_a} Σ_{p_a}).
    pub log_summand: Float,
    pub log_sigma: Float,
    /// (log Σ_{p+1} − log Σ_{p−1})/2 at p_a.
    pub nd_central: Float,
    /// log Σ_{p+1} − log Σ_p at p_a.
    pub nd_forward: Float,
}

fn ln_f(x: &Float) -> Float {
    Float::with_val(x.prec(), x.ln_ref())
}

/// Peak of `C_{n,p} Σ_p` over the admissible p of a row.
pub fn pa_row(row: &CnpRow<Float>, sig: &SigmaTable) -> Result<PaRow> {
    let mut best: Option<(usize, Float)> = None;
    for (p, c) in row.iter() {
        let v = Float::with_val(c.prec(), c * sig.get(p)?);
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((p, v));
        }
    }
    let (p_a, peak) = best.ok_or_else(|| Error::Range("empty row".into()))?;
    let ls = |p: usize| -> Result<Float> { Ok(ln_f(sig.get(p)?)) };
    let lp = ls(p_a + 1)?;
    let nd_central = Float::with_val(peak.prec(), &lp - &ls(p_a.max(1) - 1)?) / 2u32;
    let log_sigma = ls(p_a)?;
    let nd_forward = Float::with_val(peak.prec(), &lp - &log_sigma);
    Ok(PaRow { n: row.n(), p_a, log_summand: ln_f(&peak), log_sigma, nd_central, nd_forward })
}

pub fn pa_table(cnp: &CnpTable, sig: &SigmaTable, n_list: &[usize]) -> Result<Vec<PaRow>> {
    n_list.iter().map(|&n| pa_row(&cnp.row(n)?, sig)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakRow {
    pub n: usize,
    pub p_m: usize,
    pub value: f64,
    /// 0.78237057 n + 151.978136.
    pub linear_estimate: f64,
    pub two_log_n: f64,
    /// |Σ_p C_{n,p} − 4n| / 4n.
    pub row_sum_rel_err: f64,
}

/// Peak position and value of one row.
pub fn peak_row(row: &CnpRow<Float>) -> PeakRow {
    let n = row.n();
    let (mut p_m, mut best) = (0, Float::new(64));
    let mut sum = Float::new(row.values().first().map_or(64, Float::prec));
    for (p, c) in row.iter() {
        sum += c;
        if p_m == 0 || *c > best {
            p_m = p;
            best = c.clone();
        }
    }
    let four_n = 4.0 * n as f64;
    PeakRow {
        n,
        p_m,
        value: best.to_f64(),
        linear_estimate: 0.78237057 * n as f64 + 151.978136,
        two_log_n: 2.0 * (n as f64).ln(),
        row_sum_rel_err: ((sum - four_n).to_f64() / four_n).abs(),
    }
}

pub fn cnp_peak_scan(cnp: &CnpTable, lo: usize, hi: usize, step: usize) -> Result<Vec<PeakRow>> {
    if lo == 0 || hi < lo || step == 0 {
        return Err(Error::Range(format!("bad peak-scan range {lo}..={hi} step {step}")));
    }
    (lo..=hi).step_by(step).map(|n| Ok(peak_row(&cnp.row(n)?))).collect()
}

/// Shift k in x = p − k log n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CnpShift {
    LogN,
    TwoLogN,
}

impl CnpShift {
    fn factor(&self) -> f64 {
        match self {
            CnpShift::LogN => 1.0,
            CnpShift::TwoLogN => 2.0,
        }
    }
}

/// Fit `log C_{n,p} − log n ≈ a x log x + b x + c`, x = p − k log n, over the
/// admissible p in [p_lo, p_hi].
pub fn cnp_fit(row: &CnpRow<Float>, p_lo: usize, p_hi: usize, shift: CnpShift) -> Result<FitResult> {
    let n = row.n();
    if p_lo < 1 || p_hi > n || p_hi <= p_lo {
        return Err(Error::Degenerate(format!("p range [{p_lo}, {p_hi}] for n = {n}")));
    }
    let ln_n = (n as f64).ln();
    let (mut design, mut y) = (Vec::new(), Vec::new());
    for (p, c) in row.iter().filter(|(p, _)| (p_lo..=p_hi).contains(p)) {
        if *c <= 0 {
            return Err(Error::Degenerate(format!("C_{{{n},{p}}} is not positive")));
        }
        let x = p as f64 - shift.factor() * ln_n;
        if x <= 0.0 {
            return Err(Error::Degenerate(format!("x = p - k log n <= 0 at p = {p}")));
        }
        design.push(vec![x * x.ln(), x, 1.0]);
        y.push(ln_f(c).to_f64() - ln_n);
    }
    let model = match shift {
        CnpShift::LogN => "log C = a x log x + b x + c + log n, x = p - log n",
        CnpShift::TwoLogN => "log C = a x log x + b x + c + log n, x = p - 2 log n",
    };
    fit_result(model, &["a", "b", "c"], design, y, (p_lo as f64, p_hi as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseReport {
    /// (n_a, n_b, sup |F_a − F_b| on the common x window, window lo, window hi).
    pub distances: Vec<(usize, usize, f64, f64, f64)>,
    /// (n, Σ_p C_{n,p}/n).
    pub sums: Vec<(usize, f64)>,
    /// (n, log(4^n/(n! n)), truncated expansion, difference).
    pub stirling: Vec<(usize, f64, f64, f64)>,
}

fn curve(row: &CnpRow<Float>) -> Vec<(f64, f64)> {
    let n = row.n() as f64;
    let shift = 2.0 * n.ln();
    row.iter().map(|(p, c)| (p as f64 - shift, c.to_f64() / n)).collect()
}

fn interp(curve: &[(f64, f64)], x: f64) -> f64 {
    let i = curve.partition_point(|q| q.0 < x);
    if i == 0 {
        return curve[0].1;
    }
    if i >= curve.len() {
        return curve[curve.len() - 1].1;
    }
    let ((x0, y0), (x1, y1)) = (curve[i - 1], curve[i]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// `log(4^n/(n! n))` exactly and by the Stirling form
/// `−n log n + (1 + log 4) n − (3/2) log n − log(2π)/2 − 1/(12n)`.
pub fn stirling_check(n: usize, ctx: &PrecisionContext) -> (f64, f64) {
    let prec = ctx.prec();
    let ln_fact = Float::with_val(prec, Float::factorial(n as u32)).ln();
    let nf = Float::with_val(prec, n as u32);
    let exact = Float::with_val(prec, 4u32).ln() * n as u32 - ln_fact - Float::with_val(prec, nf.ln_ref());
    let x = n as f64;
    let approx = -x * x.ln() + (1.0 + 4f64.ln()) * x - 1.5 * x.ln() - 0.5 * std::f64::consts::TAU.ln() - 1.0 / (12.0 * x);
    (exact.to_f64(), approx)
}

/// Overlay of C_{n,p}/n against x = p − 2 log n for several rows.
pub fn continuum_collapse(rows: &[CnpRow<Float>], ctx: &PrecisionContext) -> Result<CollapseReport> {
    let mut ns: Vec<usize> = rows.iter().map(CnpRow::n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != rows.len() || ns.first().is_some_and(|&n| n < 100) {
        return Err(Error::Degenerate("rows must be distinct with n >= 100".into()));
    }
    let curves: Vec<Vec<(f64, f64)>> = rows.iter().map(curve).collect();
    let mut distances = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&curves[i], &curves[j]);
            let lo = a[0].0.max(b[0].0);
            let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
            if hi <= lo {
                return Err(Error::Degenerate(format!("no overlap between n = {} and n = {}", rows[i].n(), rows[j].n())));
            }
            let sup = a
                .iter()
                .chain(b.iter())
                .filter(|q| q.0 >= lo && q.0 <= hi)
                .map(|q| (interp(a, q.0) - interp(b, q.0)).abs())
                .fold(0.0f64, f64::max);
            distances.push((rows[i].n(), rows[j].n(), sup, lo, hi));
        }
    }
    let sums = rows
        .iter()
        .map(|r| {
            let mut s = Float::new(ctx.prec());
            for (_, c) in r.iter() {
                s += c;
            }
            (r.n(), (s / r.n() as u32).to_f64())
        })
        .collect();
    let stirling = rows
        .iter()
        .map(|r| {
            let (e, a) = stirling_check(r.n(), ctx);
            (r.n(), e, a, e - a)
        })
        .collect();
    Ok(CollapseReport { distances, sums, stirling })
}
