//! The Riemann ξ function through its Pustyl'nikov coefficients.
//!
//! `ξ(s + 1/2) = Σ_r ξ_r s^{2r}` with every `ξ_r > 0`. The ξ_r are computed as
//! moments of the Jacobi-theta weight
//!
//! ```text
//! Φ(u) = 2 Σ_{n≥1} (2π²n⁴e^{9u/2} − 3πn²e^{5u/2}) exp(−πn²e^{2u}),
//! ξ_r  = 2/(2r)! ∫₀^∞ Φ(u) u^{2r} du,
//! ```
//!
//! and every other ξ-related quantity (point values of ξ, ξ₊, ξ₋, their
//! series about s = 0, and the E_l/O_l coefficients of 2ξ(s)) is assembled
//! from them.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::precision::{cabs, log10_abs, PrecisionContext};
use crate::quadrature::MomentRule;
use crate::series::PowerSeries;

/// Decimal value of ξ(1/2) to 20 places.
pub const XI_HALF_20: &str = "0.49712077818831410991";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiMethod {
    Quadrature,
    Imported,
}

impl XiMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            XiMethod::Quadrature => "quadrature",
            XiMethod::Imported => "imported",
        }
    }
}

/// Diagnostics of the quadrature that produced a table.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureInfo {
    pub achieved_log10_err: f64,
    pub step: f64,
    pub upper: f64,
    pub nodes: usize,
}

/// ξ_r for r = 0..=R.
#[derive(Debug, Clone)]
pub struct XiCoefficients {
    values: Vec<Float>,
    method: XiMethod,
    digits: u32,
    /// log10 of the relative accuracy claimed for each ξ_r.
    accuracy_log10: f64,
    quadrature: Option<QuadratureInfo>,
}

impl XiCoefficients {
    /// Wraps externally supplied values, rejecting any non-positive entry.
    pub fn imported(values: Vec<Float>, digits: u32) -> Result<Self> {
        Self::checked(values, XiMethod::Imported, digits, -(digits as f64), None)
    }

    fn checked(
        values: Vec<Float>,
        method: XiMethod,
        digits: u32,
        accuracy_log10: f64,
        quadrature: Option<QuadratureInfo>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientTerms("empty ξ_r table".into()));
        }
        if let Some(index) = values.iter().position(|v| *v <= 0) {
            return Err(Error::NonPositiveCoefficient { name: "xi_r", index });
        }
        Ok(Self { values, method, digits, accuracy_log10, quadrature })
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn get(&self, r: usize) -> &Float {
        &self.values[r]
    }

    /// Truncation order R (highest index present).
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn method(&self) -> XiMethod {
        self.method
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn accuracy_log10(&self) -> f64 {
        self.accuracy_log10
    }

    pub fn quadrature(&self) -> Option<&QuadratureInfo> {
        self.quadrature.as_ref()
    }

    pub fn prec(&self) -> u32 {
        self.values[0].prec()
    }

    /// First `r + 1` coefficients as a new table.
    pub fn truncated(&self, r: usize) -> Self {
        Self { values: self.values[..=r.min(self.order())].to_vec(), ..self.clone() }
    }

    /// `2 Σ_r ξ_r / 4^r`, which is `2ξ(1) = 1` up to truncation.
    pub fn two_xi_at_one(&self) -> Float {
        let prec = self.prec();
        let mut acc = Float::new(prec);
        for (r, x) in self.values.iter().enumerate() {
            acc += Float::with_val(prec, x >> (2 * r as i32));
        }
        acc * 2u32
    }
}

/// The weight Φ(u) for u ≥ 0, summed until terms fall below the working
/// rounding level of the partial sum.
pub fn phi_weight(u: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if *u < 0 {
        return Err(Error::Degenerate(format!("Φ needs u >= 0, got {}", u.to_f64())));
    }
    Ok(phi_weight_unchecked(u, ctx.prec()))
}

fn phi_weight_unchecked(u: &Float, prec: u32) -> Float {
    let pi = Float::with_val(prec, Constant::Pi);
    let e2 = Float::with_val(prec, u * 2u32).exp();
    let e52 = Float::with_val(prec, u * 2.5f64).exp();
    let e92 = Float::with_val(prec, u * 4.5f64).exp();
    let a = Float::with_val(prec, &pi * &pi) * &e92 * 2u32;
    let b = Float::with_val(prec, &pi * &e52) * 3u32;
    let pe2 = Float::with_val(prec, &pi * &e2);
    let mut sum = Float::new(prec);
    for n in 1u32.. {
        let n2 = n * n;
        let decay = Float::with_val(prec, -Float::with_val(prec, &pe2 * n2)).exp();
        let poly = Float::with_val(prec, &a * (n2 * n2)) - Float::with_val(prec, &b * n2);
        let term = poly * decay;
        sum += &term;
        if term.is_zero() || log10_abs(&term) < log10_abs(&sum) - prec as f64 * 0.302 - 2.0 {
            break;
        }
    }
    sum * 2u32
}

/// log of the first-term majorant of Φ(u)·u^{2r}, in f64.
fn log_integrand_bound(u: f64, r: usize) -> f64 {
    let pi = std::f64::consts::PI;
    // n >= 2 terms add less than a factor 1.01 for u >= 0
    (8.0 * pi * pi * 1.01).ln() + 4.5 * u - pi * (2.0 * u).exp()
        + if r == 0 { 0.0 } else { 2.0 * r as f64 * u.ln() }
}

/// Truncation point U: past the peak of every integrand r = 0..=max_r, the
/// first-term bound at U sits `drop_log10` decades below that peak and the
/// integrand decays at least like e^{-(u-U)} beyond U.
fn truncation_point(max_r: usize, drop_log10: f64) -> f64 {
    let drop = drop_log10 * std::f64::consts::LN_10;
    let step = 1.0 / 512.0;
    let grid: Vec<f64> = (1..=8 * 512).map(|k| k as f64 * step).collect();
    let mut upper: f64 = 0.0;
    for r in [0, max_r / 4, max_r / 2, 3 * max_r / 4, max_r] {
        let logs: Vec<f64> = grid.iter().map(|&u| log_integrand_bound(u, r)).collect();
        let (imax, lmax) = logs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc });
        let lmax = lmax.max(log_integrand_bound(0.0, r));
        let u = (imax..grid.len())
            .find(|&i| {
                let u = grid[i];
                let slope = 4.5 - 2.0 * std::f64::consts::PI * (2.0 * u).exp() + 2.0 * r as f64 / u;
                logs[i] < lmax - drop && slope < -1.0
            })
            .map_or(8.0, |i| grid[i]);
        upper = upper.max(u);
    }
    upper
}

/// ξ_r for r = 0..=R by quadrature to relative accuracy `tail_tol / 100`.
pub fn xi_r_table(max_r: usize, ctx: &PrecisionContext) -> Result<XiCoefficients> {
    let prec = ctx.prec();
    // coefficient error is amplified by Σ ξ_r |x|^{2r} off the real axis, so
    // aim for the working precision even when tail_tol is looser
    let tol_log10 = (log10_abs(ctx.tail_tol()) - 2.0).min(-(ctx.digits() as f64));
    let upper = truncation_point(max_r, -tol_log10 + 5.0);
    let rule = MomentRule { initial_step: 1.0 / 16.0, upper, max_halvings: 9 };
    let moments = rule.even_moments(|u| phi_weight_unchecked(u, prec), max_r, prec, tol_log10)?;
    let values = moments
        .values
        .iter()
        .enumerate()
        .map(|(r, m)| {
            let fact = Float::with_val(prec, Float::factorial(2 * r as u32));
            Float::with_val(prec, m * 2u32) / fact
        })
        .collect();
    let info = QuadratureInfo {
        achieved_log10_err: moments.achieved_log10_err,
        step: moments.step,
        upper: moments.upper,
        nodes: moments.nodes,
    };
    let accuracy = moments.achieved_log10_err.max(-(ctx.digits() as f64 + ctx.guard_digits() as f64));
    XiCoefficients::checked(values, XiMethod::Quadrature, ctx.digits(), accuracy, Some(info))
}

/// `Σ_r ξ_r x^{2r}`, i.e. ξ(x + 1/2), refusing when the truncation tail plus
/// rounding and coefficient error exceed `tail_tol · max(1, |value|)`.
fn eval_shifted(x: &Complex, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<Complex> {
    let prec = ctx.prec().max(xi.prec());
    let y = Complex::with_val(prec, x.square_ref());
    let ay = cabs(&y);
    let mut acc = Complex::new(prec);
    let mut abs_sum = Float::new(prec);
    for c in xi.values.iter().rev() {
        acc *= &y;
        acc += c;
        abs_sum *= &ay;
        abs_sum += c;
    }
    let big_r = xi.order();
    let tail = if big_r == 0 {
        if ay.is_zero() { Float::new(prec) } else { Float::with_val(prec, f64::INFINITY) }
    } else {
        let q = Float::with_val(prec, &ay * &xi.values[big_r]) / &xi.values[big_r - 1];
        if q >= 0.5 {
            Float::with_val(prec, f64::INFINITY)
        } else {
            let last = Float::with_val(prec, &ay).pow(big_r as u32) * &xi.values[big_r];
            let one_minus = Float::with_val(prec, 1u32 - &q);
            last * q / one_minus
        }
    };
    let coeff_err = Float::with_val(prec, 10f64).pow(xi.accuracy_log10.max(-1.0e6));
    let round = Float::with_val(prec, &abs_sum * (4 * (big_r as u32 + 1))) * ctx.eps();
    let bound = tail + round + abs_sum * coeff_err;
    let scale = cabs(&acc).max(&Float::with_val(prec, 1u32));
    if bound > Float::with_val(prec, ctx.tail_tol() * &scale) {
        let re = Float::with_val(53, x.real() + 0.5f64).to_f64();
        return Err(Error::UncertifiedEvaluation {
            point: format!("{} + {}i", re, x.imag().to_f64()),
            bound: bound.to_f64(),
        });
    }
    Ok(acc)
}

/// ξ(s) from `Σ_r ξ_r (s − 1/2)^{2r}`.
pub fn xi_eval(s: &Complex, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<Complex> {
    let x = Complex::with_val(ctx.prec(), s - 0.5f64);
    eval_shifted(&x, xi, ctx)
}

/// Real-argument convenience wrapper around [`xi_eval`].
pub fn xi_eval_real(sigma: &Float, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<Float> {
    let s = Complex::with_val(ctx.prec(), (sigma, 0u32));
    Ok(xi_eval(&s, xi, ctx)?.into_real_imag().0)
}

/// (ξ₊(s), ξ₋(s)) with ξ± = ξ(s + 1/2) ± ξ(s − 1/2).
pub fn xi_pm_eval(s: &Complex, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<(Complex, Complex)> {
    let prec = ctx.prec();
    let up = eval_shifted(s, xi, ctx)?;
    let down = eval_shifted(&Complex::with_val(prec, s - 1u32), xi, ctx)?;
    Ok((Complex::with_val(prec, &up + &down), up - down))
}

fn binom_f(prec: u32, n: u32, k: u32) -> Float {
    Float::with_val(prec, Integer::from(Integer::binomial_u(n, k)))
}

/// `Σ_{r ≥ r0} weight(r) ξ_r` with a check that the last retained term is
/// below `tail_tol` relative to the sum.
fn tail_checked_sum<F>(xi: &XiCoefficients, r0: usize, ctx: &PrecisionContext, what: &str, weight: F) -> Result<Float>
where
    F: Fn(usize) -> Float,
{
    let prec = ctx.prec();
    if r0 > xi.order() {
        return Err(Error::InsufficientTerms(format!("{what}: needs ξ_r beyond R = {}", xi.order())));
    }
    let mut acc = Float::new(prec);
    let mut last = Float::new(prec);
    for r in r0..=xi.order() {
        last = weight(r) * &xi.values[r];
        acc += &last;
    }
    if r0 < xi.order() && Float::with_val(prec, last.abs_ref()) > Float::with_val(prec, ctx.tail_tol() * &acc) {
        return Err(Error::InsufficientTerms(format!(
            "{what}: ξ_R term not negligible at R = {}",
            xi.order()
        )));
    }
    Ok(acc)
}

/// Series of ξ₊ and ξ₋ about s = 0 with coefficients of s^0..s^{order-1},
/// from the double sums
/// `ξ₋(s) = Σ_n Σ_{r>n} [s C(2r,2n+1) − C(2r,2n)] ξ_r s^{2n}` and
/// `ξ₊(s) = 2 Σ_n ξ_n s^{2n} − ξ₋(s)`.
pub fn xi_pm_series(order: usize, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<(PowerSeries, PowerSeries)> {
    let prec = ctx.prec();
    if order == 0 {
        return Err(Error::Degenerate("series order must be positive".into()));
    }
    if order > 2 * xi.order() {
        return Err(Error::InsufficientTerms(format!(
            "order {order} needs more than R = {} coefficients",
            xi.order()
        )));
    }
    let mut minus = Vec::with_capacity(order);
    for k in 0..order {
        let n = k / 2;
        let v = tail_checked_sum(xi, n + 1, ctx, "ξ₋ series", |r| binom_f(prec, 2 * r as u32, k as u32))?;
        minus.push(if k % 2 == 0 { -v } else { v });
    }
    let plus = minus
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let direct = if k % 2 == 0 && k / 2 <= xi.order() {
                Float::with_val(prec, &xi.values[k / 2] * 2u32)
            } else {
                Float::new(prec)
            };
            direct - m
        })
        .collect();
    Ok((PowerSeries::at_zero(plus), PowerSeries::at_zero(minus)))
}

/// E_l and O_l for l = 1..=L, the even and odd coefficients of
/// `2ξ(s) = 1 + Σ E_l s^{2l} − Σ O_l s^{2l−1}`.
#[derive(Debug, Clone)]
pub struct EvenOddCoefficients {
    even: Vec<Float>,
    odd: Vec<Float>,
}

impl EvenOddCoefficients {
    /// E_l, 1-based.
    pub fn e(&self, l: usize) -> &Float {
        &self.even[l - 1]
    }

    /// O_l, 1-based.
    pub fn o(&self, l: usize) -> &Float {
        &self.odd[l - 1]
    }

    pub fn order(&self) -> usize {
        self.even.len()
    }

    pub fn evens(&self) -> &[Float] {
        &self.even
    }

    pub fn odds(&self) -> &[Float] {
        &self.odd
    }
}

pub fn even_odd_coeffs(big_l: usize, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<EvenOddCoefficients> {
    let prec = ctx.prec();
    if big_l > xi.order() {
        return Err(Error::InsufficientTerms(format!("L = {big_l} exceeds R = {}", xi.order())));
    }
    let mut even = Vec::with_capacity(big_l);
    let mut odd = Vec::with_capacity(big_l);
    for l in 1..=big_l {
        let e = tail_checked_sum(xi, l, ctx, "E_l", |r| {
            binom_f(prec, 2 * r as u32, 2 * l as u32) >> (2 * (r - l) as i32)
        })? * 2u32;
        let o = tail_checked_sum(xi, l, ctx, "O_l", |r| {
            binom_f(prec, 2 * r as u32, 2 * l as u32 - 1) >> (2 * (r - l) as i32 + 1)
        })? * 2u32;
        for (name, v) in [("E_l", &e), ("O_l", &o)] {
            if *v <= 0 {
                return Err(Error::NonPositiveCoefficient { name, index: l });
            }
        }
        even.push(e);
        odd.push(o);
    }
    Ok(EvenOddCoefficients { even, odd })
}

/// Series of 2ξ(s) about s = 0 with `order` coefficients. The constant term
/// is the computed `2 Σ ξ_r/4^r` rather than the exact 1.
pub fn two_xi_series(order: usize, xi: &XiCoefficients, ctx: &PrecisionContext) -> Result<PowerSeries> {
    if order == 0 {
        return Err(Error::Degenerate("series order must be positive".into()));
    }
    let eo = even_odd_coeffs(order / 2, xi, ctx)?;
    let mut coeffs = Vec::with_capacity(order);
    coeffs.push(Float::with_val(ctx.prec(), xi.two_xi_at_one()));
    for k in 1..order {
        coeffs.push(if k % 2 == 0 {
            eo.e(k / 2).clone()
        } else {
            Float::with_val(ctx.prec(), -eo.o(k.div_ceil(2)))
        });
    }
    Ok(PowerSeries::at_zero(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{printed_ulps, rel_diff};
    use std::sync::OnceLock;

    fn ctx() -> &'static PrecisionContext {
        static C: OnceLock<PrecisionContext> = OnceLock::new();
        C.get_or_init(|| PrecisionContext::new(40).unwrap())
    }

    fn table() -> &'static XiCoefficients {
        static T: OnceLock<XiCoefficients> = OnceLock::new();
        T.get_or_init(|| xi_r_table(80, ctx()).unwrap())
    }

    #[test]
    fn phi_positive_and_decaying() {
        let c = PrecisionContext::new(50).unwrap();
        for k in 0..=60 {
            let u = c.float(k) / 20u32;
            assert!(phi_weight(&u, &c).unwrap() > 0, "u = {}", k as f64 / 20.0);
        }
        let at3 = phi_weight(&c.float(3), &c).unwrap();
        assert!(log10_abs(&at3) < -40.0);
        assert!(phi_weight(&c.float(-0.1), &c).is_err());
    }

    #[test]
    fn xi0_and_unit_sum() {
        let xi = table();
        assert!(printed_ulps(xi.get(0), XI_HALF_20) < 0.5);
        let one = xi.two_xi_at_one();
        assert!(Float::with_val(ctx().prec(), one - 1u32).abs() < *ctx().tail_tol());
        assert_eq!(xi.method(), XiMethod::Quadrature);
        assert!(xi.quadrature().unwrap().achieved_log10_err < -40.0);
    }

    #[test]
    fn a1_from_first_moment() {
        let xi = table();
        let prec = ctx().prec();
        let mut s = Float::new(prec);
        for r in 1..=xi.order() {
            s += Float::with_val(prec, xi.get(r) * r as u32) >> (2 * r as i32);
        }
        assert!(printed_ulps(&(s * 8u32), "0.023095708966121033814") < 0.5);
    }

    #[test]
    fn imported_rejects_non_positive() {
        let c = ctx();
        let bad = vec![c.float(0.5), c.float(0)];
        assert!(matches!(
            XiCoefficients::imported(bad, 40),
            Err(Error::NonPositiveCoefficient { index: 1, .. })
        ));
    }

    #[test]
    fn eval_special_points() {
        let (c, xi) = (ctx(), table());
        let half = xi_eval(&c.complex((0.5, 0)), xi, c).unwrap();
        assert_eq!(half.real(), xi.get(0));
        for s in [0.0, 1.0] {
            let v = xi_eval(&c.complex((s, 0)), xi, c).unwrap();
            assert!(Float::with_val(c.prec(), v.real() - 0.5f64).abs() < *c.tail_tol());
        }
    }

    #[test]
    fn eval_refuses_outside_certified_region() {
        let (c, xi) = (ctx(), table());
        let small = xi.truncated(10);
        assert!(matches!(
            xi_eval(&c.complex((0.5, 20)), &small, c),
            Err(Error::UncertifiedEvaluation { .. })
        ));
    }

    #[test]
    fn symmetry_on_sample_points() {
        let (c, xi) = (ctx(), table());
        for (re, im) in [(0.1, 0.3), (1.7, -2.0), (-0.4, 5.5), (2.5, 1.25)] {
            let s = c.complex((re, im));
            let t = Complex::with_val(c.prec(), 1u32 - &s);
            let a = xi_eval(&s, xi, c).unwrap();
            let b = xi_eval(&t, xi, c).unwrap();
            assert!(cabs(&Complex::with_val(c.prec(), &a - &b)) < *c.tail_tol());
        }
    }

    #[test]
    fn xi_pm_at_half() {
        let (c, xi) = (ctx(), table());
        let (p, m) = xi_pm_eval(&c.complex((0.5, 0)), xi, c).unwrap();
        assert!(cabs(&m) < *c.tail_tol());
        assert!(Float::with_val(c.prec(), p.real() - 1u32).abs() < *c.tail_tol());
    }

    #[test]
    fn xi_pm_series_consistency() {
        let (c, xi) = (ctx(), table());
        let (plus, minus) = xi_pm_series(12, xi, c).unwrap();
        assert!(minus.coeffs()[0] < 0);
        for k in 0..12 {
            let sum = Float::with_val(c.prec(), &plus.coeffs()[k] + &minus.coeffs()[k]);
            let expect = if k % 2 == 0 { Float::with_val(c.prec(), xi.get(k / 2) * 2u32) } else { c.zero() };
            assert!(Float::with_val(c.prec(), &sum - &expect).abs() < *c.tail_tol());
        }
        // ξ₋(1/2) = 0 through the series
        let m = minus.eval_offset(&c.complex((0.5, 0)));
        assert!(cabs(&m) < 1e-6, "{}", m.real().to_f64());
        // independent route: coefficient of s^k in Σ ξ_r (s−1)^{2r} is (−1)^k Σ_r C(2r,k) ξ_r
        for k in 0..12u32 {
            let mut down = c.zero();
            for r in 0..=xi.order() as u32 {
                if 2 * r >= k {
                    down += binom_f(c.prec(), 2 * r, k) * xi.get(r as usize);
                }
            }
            if k % 2 == 1 {
                down = -down;
            }
            let up = if k % 2 == 0 { xi.get(k as usize / 2).clone() } else { c.zero() };
            let expect = Float::with_val(c.prec(), &up - &down);
            let got = &minus.coeffs()[k as usize];
            assert!(Float::with_val(c.prec(), got - &expect).abs() < *c.tail_tol());
        }
        assert!(xi_pm_series(2 * xi.order() + 1, xi, c).is_err());
    }

    #[test]
    fn even_odd_first_values() {
        let (c, xi) = (ctx(), table());
        let eo = even_odd_coeffs(10, xi, c).unwrap();
        assert!(printed_ulps(eo.e(1), "0.023343864534226183135") < 0.5);
        assert!(printed_ulps(eo.o(1), "0.023095708966121033814") < 0.5);
        assert!(printed_ulps(eo.o(2), "0.00049798384992294867235") < 0.5);
        assert!(eo.evens().iter().chain(eo.odds()).all(|v| *v > 0));
        assert!(even_odd_coeffs(81, xi, c).is_err());
    }

    #[test]
    fn even_odd_reproduces_point_values() {
        let (c, xi) = (ctx(), table());
        let series = two_xi_series(70, xi, c).unwrap();
        let pts = [(0.3, 0.2), (-1.1, 0.7), (1.5, -1.2), (0.0, 1.9), (-0.5, -0.5), (1.2, 1.4)];
        for (re, im) in pts {
            let s = c.complex((re, im));
            let direct = Complex::with_val(c.prec(), xi_eval(&s, xi, c).unwrap() * 2u32);
            let via = series.eval_offset(&s);
            let diff = cabs(&Complex::with_val(c.prec(), &direct - &via));
            assert!(diff < *c.tail_tol(), "{re} {im}: {}", diff.to_f64());
        }
    }

    #[test]
    fn quadrature_converged_under_node_doubling() {
        let c = PrecisionContext::new(30).unwrap();
        let base = xi_r_table(40, &c).unwrap();
        let fine = base.quadrature().unwrap();
        assert!(fine.achieved_log10_err < -30.0);
        // re-evaluate with half the final step: relative changes stay below tail_tol
        let prec = c.prec();
        let rule = MomentRule { initial_step: fine.step / 2.0, upper: fine.upper, max_halvings: 1 };
        let m = rule
            .even_moments(|u| phi_weight_unchecked(u, prec), 40, prec, -1000.0)
            .err();
        assert!(m.is_some()); // the tolerance is never reached; only the values matter below
        let rule = MomentRule { initial_step: fine.step, upper: fine.upper, max_halvings: 1 };
        let m = rule.even_moments(|u| phi_weight_unchecked(u, prec), 40, prec, -20.0).unwrap();
        for r in 0..=40 {
            let fact = Float::with_val(prec, Float::factorial(2 * r as u32));
            let v = Float::with_val(prec, &m.values[r] * 2u32) / fact;
            assert!(rel_diff(&v, base.get(r)) < *c.tail_tol(), "r = {r}");
        }
    }
}
