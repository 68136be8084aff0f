//! Even-moment quadrature on the half line.
//!
//! For an even integrand `f` analytic in a strip about the real axis, the
//! trapezoid rule on the whole line converges geometrically in `1/h`. The
//! half-line moments `∫₀^∞ f(u) u^{2r} du` are half of the whole-line values,
//! so a trapezoid sum over `0, h, 2h, ..` with weight `1/2` at the origin is
//! used. The step is halved (reusing all previous nodes) until the relative
//! change of every moment drops below the tolerance.

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::log10_abs;

const NODE_CHUNK: usize = 32;

#[derive(Debug, Clone)]
pub struct MomentRule {
    /// Initial step.
    pub initial_step: f64,
    /// Truncation point of the half line.
    pub upper: f64,
    /// Number of step halvings allowed after the initial level.
    pub max_halvings: u32,
}

#[derive(Debug, Clone)]
pub struct Moments {
    /// `values[r] = ∫₀^U f(u) u^{2r} du`.
    pub values: Vec<Float>,
    /// log10 of the largest relative change between the last two levels.
    pub achieved_log10_err: f64,
    pub step: f64,
    pub nodes: usize,
    pub upper: f64,
}

impl MomentRule {
    /// Moments `r = 0..=max_r` to relative tolerance `10^tol_log10`.
    pub fn even_moments<F>(&self, f: F, max_r: usize, prec: u32, tol_log10: f64) -> Result<Moments>
    where
        F: Fn(&Float) -> Float + Sync,
    {
        let mut h = self.initial_step;
        let mut hf = Float::with_val(prec, h);
        let count = (self.upper / h).floor() as usize;
        // level 0: nodes k*h for k = 1..=count, plus f(0)/2 on the zeroth moment
        let mut sums = accumulate(&f, (1..=count).collect(), &hf, max_r, prec);
        sums[0] += Float::with_val(prec, f(&Float::new(prec)) / 2u32);
        let mut nodes = count + 1;
        let mut prev = scaled(&sums, &hf, prec);
        let mut achieved = f64::INFINITY;

        for _ in 0..self.max_halvings {
            h /= 2.0;
            hf /= 2u32;
            let count = (self.upper / h).floor() as usize;
            let fresh: Vec<usize> = (1..=count).step_by(2).collect();
            nodes += fresh.len();
            let extra = accumulate(&f, fresh, &hf, max_r, prec);
            for (s, e) in sums.iter_mut().zip(extra) {
                *s += e;
            }
            let cur = scaled(&sums, &hf, prec);
            achieved = cur
                .iter()
                .zip(&prev)
                .map(|(c, p)| {
                    let d = Float::with_val(prec, c - p);
                    if d.is_zero() {
                        f64::NEG_INFINITY
                    } else {
                        log10_abs(&d) - log10_abs(c)
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max);
            prev = cur;
            if achieved <= tol_log10 {
                return Ok(Moments {
                    values: prev,
                    achieved_log10_err: achieved,
                    step: h,
                    nodes,
                    upper: self.upper,
                });
            }
        }
        Err(Error::QuadratureTolerance {
            requested: 10f64.powf(tol_log10),
            achieved: 10f64.powf(achieved),
        })
    }
}

fn scaled(sums: &[Float], h: &Float, prec: u32) -> Vec<Float> {
    sums.iter().map(|s| Float::with_val(prec, s * h)).collect()
}

/// `Σ_k f(kh) (kh)^{2r}` for each r. Chunks are summed in a fixed order so
/// the result does not depend on thread scheduling.
fn accumulate<F>(f: &F, ks: Vec<usize>, h: &Float, max_r: usize, prec: u32) -> Vec<Float>
where
    F: Fn(&Float) -> Float + Sync,
{
    let partials: Vec<Vec<Float>> = ks
        .par_chunks(NODE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![Float::new(prec); max_r + 1];
            for &k in chunk {
                let u = Float::with_val(prec, h * k);
                let u2 = Float::with_val(prec, u.square_ref());
                let mut term = f(&u);
                for slot in acc.iter_mut() {
                    *slot += &term;
                    term *= &u2;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Float::new(prec); max_r + 1];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_diff;
    use rug::float::Constant;

    #[test]
    fn gaussian_moments() {
        // ∫₀^∞ e^{-u²} u^{2r} du = Γ(r + 1/2) / 2
        let prec = 200;
        let rule = MomentRule { initial_step: 0.25, upper: 12.0, max_halvings: 8 };
        let m = rule
            .even_moments(|u| Float::with_val(prec, -u.clone().square()).exp(), 6, prec, -50.0)
            .unwrap();
        assert!(m.achieved_log10_err <= -50.0);
        let sqrt_pi = Float::with_val(prec, Constant::Pi).sqrt();
        let mut gamma = sqrt_pi; // Γ(1/2)
        for r in 0..=6u32 {
            let expect = Float::with_val(prec, &gamma / 2u32);
            assert!(rel_diff(&m.values[r as usize], &expect) < 1e-45, "r = {r}");
            gamma *= Float::with_val(prec, r) + 0.5f64;
        }
    }

    #[test]
    fn reports_failure_to_converge() {
        let prec = 100;
        let rule = MomentRule { initial_step: 0.5, upper: 4.0, max_halvings: 1 };
        // |u| has a kink at the origin; the trapezoid rule converges only algebraically
        let err = rule
            .even_moments(|u| Float::with_val(prec, -u.clone().abs()).exp(), 0, prec, -25.0)
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureTolerance { .. }));
    }

    #[test]
    fn deterministic_across_runs() {
        let prec = 128;
        let rule = MomentRule { initial_step: 0.1, upper: 9.0, max_halvings: 6 };
        let f = |u: &Float| Float::with_val(prec, -u.clone().square()).exp();
        let a = rule.even_moments(f, 3, prec, -30.0).unwrap();
        let b = rule.even_moments(f, 3, prec, -30.0).unwrap();
        assert_eq!(a.values, b.values);
    }
}
