//! The fractional-linear maps between the s-plane and the w-plane.
//!
//! `w = (s − 1)/s` sends the critical line to the unit circle; `w_h` and
//! `w_m` do the same for the lines σ = 0 and σ = 1. Each map is stored as a
//! coefficient tuple `(a, b, c, d)` acting as `p ↦ (ap + b)/(cp + d)`; the
//! w_h and w_m tuples act on s, and [`MobiusMap::in_w_plane`] composes them
//! with the inverse of w so that loci can be drawn in the w-plane.

use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::{cabs, PrecisionContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    W,
    WH,
    WM,
}

impl MapKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "w" => Some(MapKind::W),
            "w_h" | "wh" => Some(MapKind::WH),
            "w_m" | "wm" => Some(MapKind::WM),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MapKind::W => "w",
            MapKind::WH => "w_h",
            MapKind::WM => "w_m",
        }
    }

    /// σ of the vertical line sent to the unit circle.
    pub fn unit_line_sigma(&self) -> f64 {
        match self {
            MapKind::W => 0.5,
            MapKind::WH => 0.0,
            MapKind::WM => 1.0,
        }
    }
}

/// `(a, b, c, d)` for `p ↦ (ap + b)/(cp + d)`.
pub type Coeffs = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub kind: MapKind,
    pub forward: Coeffs,
    pub inverse: Coeffs,
}

impl MobiusMap {
    pub fn new(kind: MapKind) -> Self {
        let (forward, inverse) = match kind {
            // w = (s − 1)/s, s = 1/(1 − w)
            MapKind::W => ([1.0, -1.0, 1.0, 0.0], [0.0, 1.0, -1.0, 1.0]),
            // w_h = (s − 1/2)/(s + 1/2)
            MapKind::WH => ([1.0, -0.5, 1.0, 0.5], [0.5, 0.5, -1.0, 1.0]),
            // w_m = (s − 3/2)/(s − 1/2)
            MapKind::WM => ([1.0, -1.5, 1.0, -0.5], [-0.5, 1.5, -1.0, 1.0]),
        };
        Self { kind, forward, inverse }
    }

    /// The same map expressed as a function of w: `forward ∘ w⁻¹`.
    pub fn in_w_plane(&self) -> Coeffs {
        compose(self.forward, MobiusMap::new(MapKind::W).inverse)
    }
}

/// `f ∘ g` as coefficient tuples (2×2 matrix product).
pub fn compose(f: Coeffs, g: Coeffs) -> Coeffs {
    let [a, b, c, d] = f;
    let [e, g2, h, k] = g;
    [a * e + b * h, a * g2 + b * k, c * e + d * h, c * g2 + d * k]
}

fn apply_coeffs(m: Coeffs, p: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let prec = ctx.prec();
    let num = Complex::with_val(prec, p * m[0]) + m[1];
    let den = Complex::with_val(prec, p * m[2]) + m[3];
    let tiny = Float::with_val(prec, ctx.eps() * 16u32) * cabs(&num).max(&ctx.float(1));
    if cabs(&den) <= tiny {
        return Err(Error::Pole(format!(
            "{} + {}i is a pole",
            p.real().to_f64(),
            p.imag().to_f64()
        )));
    }
    Ok(num / den)
}

/// Image of `p` under the forward map.
pub fn mobius_apply(map: &MobiusMap, p: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    apply_coeffs(map.forward, p, ctx)
}

/// Preimage of `q` under the map.
pub fn mobius_invert(map: &MobiusMap, q: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    apply_coeffs(map.inverse, q, ctx)
}

/// Image in the map's target plane of a w-plane point.
pub fn mobius_apply_w(map: &MobiusMap, w: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    apply_coeffs(map.in_w_plane(), w, ctx)
}

/// A locus `{w : |map(w)| = modulus}` in the w-plane: an Apollonius circle,
/// or a line when the modulus equals the ratio of the pole and zero scalings.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Locus {
    Circle { center: (f64, f64), radius: f64, points: Vec<(f64, f64)> },
    /// Points `x` with `normal · x = offset`.
    Line { normal: (f64, f64), offset: f64, points: Vec<(f64, f64)> },
}

impl Locus {
    pub fn points(&self) -> &[(f64, f64)] {
        match self {
            Locus::Circle { points, .. } | Locus::Line { points, .. } => points,
        }
    }
}

/// Samples the locus `|map(w)| = modulus` with `samples` points. Lines are
/// sampled over a window of half-width 2 about the point nearest the origin.
pub fn locus_emit(kind: MapKind, modulus: f64, samples: usize) -> Result<Locus> {
    if samples < 2 {
        return Err(Error::Degenerate("a locus needs at least 2 samples".into()));
    }
    if !(modulus > 0.0 && modulus.is_finite()) {
        return Err(Error::Degenerate(format!("modulus must be positive, got {modulus}")));
    }
    let [a, b, c, d] = MobiusMap::new(kind).in_w_plane();
    let n = samples;
    let circle = |center: f64, radius: f64| {
        let points = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / (n - 1) as f64;
                (center + radius * t.cos(), radius * t.sin())
            })
            .collect();
        Locus::Circle { center: (center, 0.0), radius, points }
    };
    if a == 0.0 {
        return Err(Error::Degenerate(format!("{} has no zero in the finite plane", kind.as_str())));
    }
    if c == 0.0 {
        // affine: |a w + b| = m |d|
        return Ok(circle(-b / a, modulus * (d / a).abs()));
    }
    // |w − z|² = k² |w − q|², z = −b/a, q = −d/c, k = m|c|/|a|
    let z = -b / a;
    let q = -d / c;
    let k2 = (modulus * c / a).powi(2);
    if (k2 - 1.0).abs() < 1e-12 {
        // perpendicular bisector of z and q on the real axis: u = (z + q)/2
        let u = 0.5 * (z + q);
        let points = (0..n).map(|i| (u, -2.0 + 4.0 * i as f64 / (n - 1) as f64)).collect();
        return Ok(Locus::Line { normal: (1.0, 0.0), offset: u, points });
    }
    // (1 − k²)|w|² − 2 Re(w (z − k² q)) + z² − k² q² = 0
    let center = (z - k2 * q) / (1.0 - k2);
    let r2 = center * center - (z * z - k2 * q * q) / (1.0 - k2);
    if r2 <= 0.0 {
        return Err(Error::Degenerate("empty locus".into()));
    }
    Ok(circle(center, r2.sqrt()))
}

/// CSV rendering `x,y` with a header row.
pub fn locus_csv(locus: &Locus) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in locus.points() {
        out.push_str(&format!("{x:.15e},{y:.15e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    fn close(z: &Complex, re: f64, im: f64) -> bool {
        (z.real().to_f64() - re).abs() < 1e-25 && (z.imag().to_f64() - im).abs() < 1e-25
    }

    #[test]
    fn critical_line_to_unit_circle() {
        let c = ctx();
        let m = MobiusMap::new(MapKind::W);
        for t in [1.0, 5.0, 14.0] {
            let w = mobius_apply(&m, &c.complex((0.5, t)), &c).unwrap();
            let r = cabs(&w).to_f64();
            assert!((r - 1.0).abs() < 1e-28, "t = {t}");
        }
    }

    #[test]
    fn each_map_sends_its_line_to_the_circle() {
        let c = ctx();
        for kind in [MapKind::W, MapKind::WH, MapKind::WM] {
            let m = MobiusMap::new(kind);
            for t in [-3.0, 0.25, 7.5] {
                let s = c.complex((kind.unit_line_sigma(), t));
                let r = cabs(&mobius_apply(&m, &s, &c).unwrap()).to_f64();
                assert!((r - 1.0).abs() < 1e-28, "{kind:?} t = {t}");
            }
        }
    }

    #[test]
    fn forward_inverse_identity() {
        let c = ctx();
        for kind in [MapKind::W, MapKind::WH, MapKind::WM] {
            let m = MobiusMap::new(kind);
            for (re, im) in [(0.3, 0.7), (-2.0, 1.0), (4.0, -0.5)] {
                let p = c.complex((re, im));
                let back = mobius_invert(&m, &mobius_apply(&m, &p, &c).unwrap(), &c).unwrap();
                assert!(close(&back, re, im), "{kind:?}");
            }
        }
    }

    #[test]
    fn pole_is_refused() {
        let c = ctx();
        let m = MobiusMap::new(MapKind::W);
        assert!(matches!(mobius_apply(&m, &c.complex((0, 0)), &c), Err(Error::Pole(_))));
        let wm = MobiusMap::new(MapKind::WM);
        assert!(mobius_apply(&wm, &c.complex((0.5, 0)), &c).is_err());
    }

    #[test]
    fn w_h_double_fixed_point() {
        let c = ctx();
        let wh = MobiusMap::new(MapKind::WH);
        let one = mobius_apply_w(&wh, &c.complex((1, 0)), &c).unwrap();
        assert!(close(&one, 1.0, 0.0));
        // w = (w + 1)/(3 − w) ⇔ (w − 1)² = 0
        let [a, b, cc, d] = wh.in_w_plane();
        let (qa, qb, qc) = (cc, d - a, -b);
        assert!((qb * qb - 4.0 * qa * qc).abs() < 1e-15);
        assert!((-qb / (2.0 * qa) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn w_m_loci() {
        match locus_emit(MapKind::WM, 3.0, 5).unwrap() {
            Locus::Line { offset, points, .. } => {
                assert!((offset + 1.0 / 3.0).abs() < 1e-14);
                assert!(points.iter().all(|p| (p.0 + 1.0 / 3.0).abs() < 1e-14));
            }
            other => panic!("expected a line, got {other:?}"),
        }
        match locus_emit(MapKind::WM, 1.0, 9).unwrap() {
            Locus::Circle { center, radius, .. } => {
                assert!((center.0 - 0.5).abs() < 1e-14 && (radius - 0.5).abs() < 1e-14);
            }
            other => panic!("expected a circle, got {other:?}"),
        }
        // a boundary point of that circle has |w_m| = 1
        let c = ctx();
        let wm = MobiusMap::new(MapKind::WM);
        let w = c.complex((0.5 + 0.5 * 0.6, 0.5 * 0.8));
        let r = cabs(&mobius_apply_w(&wm, &w, &c).unwrap()).to_f64();
        assert!((r - 1.0).abs() < 1e-25);
    }

    #[test]
    fn w_and_w_h_unit_loci() {
        match locus_emit(MapKind::W, 1.0, 17).unwrap() {
            Locus::Circle { center, radius, points } => {
                assert!(center.0.abs() < 1e-14 && (radius - 1.0).abs() < 1e-14);
                assert!(points.iter().all(|(x, y)| (x.hypot(*y) - 1.0).abs() < 1e-14));
            }
            other => panic!("{other:?}"),
        }
        match locus_emit(MapKind::WH, 1.0, 3).unwrap() {
            Locus::Line { offset, .. } => assert!((offset - 1.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
        assert!(locus_emit(MapKind::W, 1.0, 1).is_err());
    }

    #[test]
    fn locus_points_satisfy_modulus() {
        let c = ctx();
        for kind in [MapKind::W, MapKind::WH, MapKind::WM] {
            let m = MobiusMap::new(kind);
            for modulus in [0.5, 2.0, 3.0] {
                let locus = locus_emit(kind, modulus, 12).unwrap();
                for &(x, y) in locus.points() {
                    let Ok(img) = mobius_apply_w(&m, &c.complex((x, y)), &c) else { continue };
                    let r = cabs(&img).to_f64();
                    assert!((r - modulus).abs() < 1e-9 * modulus.max(1.0), "{kind:?} {modulus}");
                }
            }
        }
    }
}
