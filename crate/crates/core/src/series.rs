//! Dense truncated power series over MPFR reals.
//!
//! A series of order `k` holds the coefficients of `z^0 .. z^(k-1)` about its
//! center; binary operations truncate to the smaller order of the operands.

use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    center: Complex,
    coeffs: Vec<Float>,
}

impl PowerSeries {
    pub fn new(center: Complex, coeffs: Vec<Float>) -> Self {
        Self { center, coeffs }
    }

    /// Series about the origin.
    pub fn at_zero(coeffs: Vec<Float>) -> Self {
        let prec = coeffs.first().map_or(64, |c| c.prec());
        Self::new(Complex::new(prec), coeffs)
    }

    pub fn from_i64(ctx: &PrecisionContext, coeffs: &[i64]) -> Self {
        Self::at_zero(coeffs.iter().map(|&c| ctx.float(c)).collect())
    }

    pub fn center(&self) -> &Complex {
        &self.center
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Float> {
        self.coeffs
    }

    /// Number of stored coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> Option<&Float> {
        self.coeffs.get(k)
    }

    fn prec(&self) -> u32 {
        self.coeffs.iter().map(Float::prec).max().unwrap_or(64)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(
            self.center.clone(),
            self.coeffs.iter().take(order).cloned().collect(),
        )
    }

    pub fn scale(&self, k: &Float) -> Self {
        let prec = self.prec();
        Self::new(
            self.center.clone(),
            self.coeffs
                .iter()
                .map(|c| Float::with_val(prec, c * k))
                .collect(),
        )
    }

    /// Termwise derivative; order drops by one.
    pub fn derivative(&self) -> Self {
        let prec = self.prec();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Float::with_val(prec, c * k as u32))
            .collect();
        Self::new(self.center.clone(), coeffs)
    }

    /// Antiderivative with the given constant term; order grows by one.
    pub fn integral(&self, constant: Float) -> Self {
        let prec = self.prec().max(constant.prec());
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        coeffs.push(Float::with_val(prec, constant));
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| Float::with_val(prec, c / (k as u32 + 1))),
        );
        Self::new(self.center.clone(), coeffs)
    }

    /// Horner evaluation at `center + h` for complex `h`.
    pub fn eval_offset(&self, h: &Complex) -> Complex {
        let prec = self.prec().max(h.prec().0);
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= h;
            acc += c;
        }
        acc
    }
}

fn check_centers(a: &PowerSeries, b: &PowerSeries) -> Result<()> {
    if a.center != b.center {
        return Err(Error::CenterMismatch);
    }
    Ok(())
}

/// Coefficientwise sum truncated to the smaller order.
pub fn series_add(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries> {
    check_centers(a, b)?;
    let prec = a.prec().max(b.prec());
    let coeffs = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| Float::with_val(prec, x + y))
        .collect();
    Ok(PowerSeries::new(a.center.clone(), coeffs))
}

/// Cauchy product truncated to the smaller order.
pub fn series_mul(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries> {
    check_centers(a, b)?;
    let prec = a.prec().max(b.prec());
    let order = a.order().min(b.order());
    let coeffs = (0..order)
        .map(|k| {
            let mut acc = Float::new(prec);
            for i in 0..=k {
                acc += Float::with_val(prec, &a.coeffs[i] * &b.coeffs[k - i]);
            }
            acc
        })
        .collect();
    Ok(PowerSeries::new(a.center.clone(), coeffs))
}

/// Multiplicative inverse to the same order, by the triangular recurrence
/// `B_0 = 1/a_0`, `B_j = -(1/a_0) Σ_{p=1..j} a_p B_{j-p}`.
pub fn series_reciprocal(a: &PowerSeries) -> Result<PowerSeries> {
    let a0 = a.coeffs.first().ok_or(Error::ZeroConstantTerm)?;
    if a0.is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let prec = a.prec();
    let inv0 = Float::with_val(prec, a0.recip_ref());
    let mut out: Vec<Float> = Vec::with_capacity(a.order());
    out.push(inv0.clone());
    for j in 1..a.order() {
        let mut acc = Float::new(prec);
        for p in 1..=j {
            acc += Float::with_val(prec, &a.coeffs[p] * &out[j - p]);
        }
        acc *= &inv0;
        out.push(-acc);
    }
    Ok(PowerSeries::new(a.center.clone(), out))
}

/// Logarithm by differentiating, dividing by the series and integrating:
/// `log a = log a_0 + ∫ a'/a`. Order is preserved.
pub fn series_log(a: &PowerSeries) -> Result<PowerSeries> {
    let a0 = a.coeffs.first().ok_or(Error::NonPositiveConstantTerm)?;
    if *a0 <= 0 {
        return Err(Error::NonPositiveConstantTerm);
    }
    let log0 = Float::with_val(a.prec(), a0.ln_ref());
    if a.order() == 1 {
        return Ok(PowerSeries::new(a.center.clone(), vec![log0]));
    }
    let inv = series_reciprocal(&a.truncate(a.order() - 1))?;
    let quotient = series_mul(&a.derivative(), &inv)?;
    Ok(quotient.integral(log0))
}

/// Exact coefficients of `((1+w)/(1-w))^r` for powers `0..=order`, from the
/// Cauchy product of `(1+w)^r` and `(1-w)^(-r)`.
pub fn binomial_ratio_coeffs(r: u32, order: usize) -> Vec<Integer> {
    let numer: Vec<Integer> = (0..=order)
        .map(|k| {
            if k as u64 > r as u64 {
                Integer::new()
            } else {
                Integer::from(Integer::binomial_u(r, k as u32))
            }
        })
        .collect();
    // coefficient of w^k in (1-w)^(-r) is C(r+k-1, k)
    let denom: Vec<Integer> = (0..=order)
        .map(|k| {
            if r == 0 {
                Integer::from((k == 0) as u32)
            } else {
                Integer::from(Integer::binomial_u(r + k as u32 - 1, k as u32))
            }
        })
        .collect();
    (0..=order)
        .map(|n| {
            let mut acc = Integer::new();
            for k in 0..=n.min(r as usize) {
                acc += Integer::from(&numer[k] * &denom[n - k]);
            }
            acc
        })
        .collect()
}

/// `((1+w)/(1-w))^r` as a series about 0 of order `order + 1`, exact integers
/// cast to working precision.
pub fn binomial_ratio_series(r: u32, order: usize, ctx: &PrecisionContext) -> Result<PowerSeries> {
    if order == 0 {
        return Err(Error::Degenerate("binomial ratio series needs order >= 1".into()));
    }
    Ok(PowerSeries::at_zero(
        binomial_ratio_coeffs(r, order)
            .iter()
            .map(|c| ctx.float(c))
            .collect(),
    ))
}
