//! φ(z) = 1 + Σ a_j z^j and what is derived from it: 1/φ, φ′/φ (the λ_n),
//! the log ξ series, the binomial transform b_n and the radius estimates R_n.

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::li::LiCoefficients;
use crate::precision::PrecisionContext;
use crate::series::{series_log, series_mul, series_reciprocal, PowerSeries};
use crate::xi::{two_xi_series, XiCoefficients};

/// `1 + a_1 z + .. + a_J z^J`.
pub fn phi_series(li: &LiCoefficients, j: usize) -> Result<PowerSeries> {
    if li.n_max() < j {
        return Err(Error::InsufficientTerms(format!("φ to order {j} needs a_n up to n = {j}")));
    }
    let mut coeffs = Vec::with_capacity(j + 1);
    coeffs.push(Float::with_val(li.prec(), 1u32));
    coeffs.extend(li.values()[..j].iter().cloned());
    Ok(PowerSeries::at_zero(coeffs))
}

/// Coefficients A_0 = 1, A_1..A_J of 1/φ(z).
pub fn reciprocal_phi(li: &LiCoefficients, j: usize) -> Result<PowerSeries> {
    series_reciprocal(&phi_series(li, j)?)
}

/// λ_n in Li's normalization (`φ′/φ = Σ λ_{n+1} z^n`) and Keiper's
/// (`λ_n^K = λ_n^L / n`), n = 1..=J.
#[derive(Debug, Clone)]
pub struct LambdaSequence {
    li_values: Vec<Float>,
    keiper_values: Vec<Float>,
}

impl LambdaSequence {
    pub fn li(&self) -> &[Float] {
        &self.li_values
    }

    pub fn keiper(&self) -> &[Float] {
        &self.keiper_values
    }

    /// λ_n^L, 1-based.
    pub fn li_at(&self, n: usize) -> &Float {
        &self.li_values[n - 1]
    }

    pub fn len(&self) -> usize {
        self.li_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.li_values.is_empty()
    }
}

/// λ_1..λ_J from the product of φ′ with 1/φ; requires a_n for n ≤ J + 1.
pub fn lambda_sequence(li: &LiCoefficients, j: usize) -> Result<LambdaSequence> {
    if j == 0 {
        return Err(Error::Range("J must be at least 1".into()));
    }
    if li.n_max() < j + 1 {
        return Err(Error::InsufficientTerms(format!(
            "λ up to J = {j} needs a_n for n <= {}, have {}",
            j + 1,
            li.n_max()
        )));
    }
    let phi = phi_series(li, j)?;
    let recip = series_reciprocal(&phi)?;
    let deriv = phi.derivative();
    let ratio = series_mul(&deriv, &recip.truncate(j))?;
    let prec = li.prec();
    let li_values: Vec<Float> = ratio.coeffs()[..j].to_vec();
    let keiper_values = li_values
        .iter()
        .enumerate()
        .map(|(i, v)| Float::with_val(prec, v / (i as u32 + 1)))
        .collect();
    Ok(LambdaSequence { li_values, keiper_values })
}

/// Series of log ξ(s) about s = 0 with `order` coefficients: `series_log` of
/// the 2ξ series, minus log 2.
pub fn log_xi_series(order: usize, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<PowerSeries> {
    if order > 2 * xi.order() {
        return Err(Error::InsufficientTerms(format!("order {order} exceeds 2R = {}", 2 * xi.order())));
    }
    let log2xi = series_log(&two_xi_series(order, xi, ctx)?)?;
    let mut coeffs = log2xi.into_coeffs();
    coeffs[0] -= Float::with_val(ctx.prec(), 2u32).ln();
    Ok(PowerSeries::at_zero(coeffs))
}

/// b_n with a_0 = 1, b_n^{−1/n} and R_n = exp(−log a_n / n). Index 0 of
/// `b` is b_0; `root_estimates[k]` and `radius[k]` belong to n = k + 1.
#[derive(Debug, Clone, Default)]
pub struct SingularityDiagnostics {
    pub b: Vec<Float>,
    pub root_estimates: Vec<Float>,
    pub radius: Vec<Float>,
}

/// `b_n = Σ_{m=0}^n C(n,m) a_m` for n = 0..=N with exact binomials.
pub fn titchmarsh_bn(li: &LiCoefficients, n: usize) -> Result<SingularityDiagnostics> {
    if n > li.n_max() {
        return Err(Error::Range(format!("b_n up to {n} needs a_n up to {n}, have {}", li.n_max())));
    }
    let prec = li.prec();
    let a = |m: usize| -> Float {
        if m == 0 {
            Float::with_val(prec, 1u32)
        } else {
            li.values()[m - 1].clone()
        }
    };
    let b: Vec<Float> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let mut acc = Float::new(prec);
            let mut binom = Integer::from(1);
            for m in 0..=k {
                acc += Float::with_val(prec, &binom * a(m));
                binom *= (k - m) as u32;
                binom /= (m + 1) as u32;
            }
            acc
        })
        .collect();
    let root_estimates = b[1..]
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let ln = Float::with_val(prec, v.ln_ref());
            (-ln / (i as u32 + 1)).exp()
        })
        .collect();
    Ok(SingularityDiagnostics { b, root_estimates, radius: Vec::new() })
}

/// R_n = exp(−log a_n / n) for n = 1..=N.
pub fn radius_estimates(li: &LiCoefficients) -> Vec<Float> {
    let prec = li.prec();
    li.values()
        .iter()
        .enumerate()
        .map(|(i, a)| (-Float::with_val(prec, a.ln_ref()) / (i as u32 + 1)).exp())
        .collect()
}

/// Both halves of the diagnostics.
pub fn singularity_diagnostics(li: &LiCoefficients, n: usize) -> Result<SingularityDiagnostics> {
    let mut d = titchmarsh_bn(li, n)?;
    d.radius = radius_estimates(li);
    Ok(d)
}

/// Summary of how a sequence behaves over an index window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSummary {
    pub lo: usize,
    pub hi: usize,
    pub min: f64,
    pub max: f64,
    /// Indices n in (lo, hi] where the value exceeds the one at n − 1.
    pub increases: Vec<usize>,
    /// Indices where it falls.
    pub decreases: Vec<usize>,
}

/// Trend of `values[n - offset]` over n ∈ [lo, hi].
pub fn trend(values: &[Float], offset: usize, lo: usize, hi: usize) -> Result<TrendSummary> {
    if lo < offset || hi + 1 > values.len() + offset || lo >= hi {
        return Err(Error::Range(format!("window [{lo}, {hi}] outside the sequence")));
    }
    let v = |n: usize| &values[n - offset];
    let mut s = TrendSummary { lo, hi, min: f64::INFINITY, max: f64::NEG_INFINITY, increases: vec![], decreases: vec![] };
    for n in lo..=hi {
        let x = v(n).to_f64();
        s.min = s.min.min(x);
        s.max = s.max.max(x);
        if n > lo {
            if v(n) > v(n - 1) {
                s.increases.push(n);
            } else if v(n) < v(n - 1) {
                s.decreases.push(n);
            }
        }
    }
    Ok(s)
}
