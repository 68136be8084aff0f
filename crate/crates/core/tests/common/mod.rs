//! Shared desk-scale fixtures: 50 digits, R = 300, N = 1000.
#![allow(dead_code)]

use std::sync::OnceLock;

use rug::Float;
use xili_core::li::{li_an_streaming, sigma_table, LiCoefficients, SigmaTable};
use xili_core::xi::{xi_r_table, XiCoefficients};
use xili_core::PrecisionContext;

pub const DIGITS: u32 = 50;
pub const TERMS: usize = 300;
pub const N: usize = 1000;

pub fn ctx() -> &'static PrecisionContext {
    static C: OnceLock<PrecisionContext> = OnceLock::new();
    C.get_or_init(|| PrecisionContext::new(DIGITS).unwrap())
}

pub fn xi() -> &'static XiCoefficients {
    static X: OnceLock<XiCoefficients> = OnceLock::new();
    X.get_or_init(|| xi_r_table(TERMS, ctx()).unwrap())
}

/// Σ_p for p ≤ 2001, enough for the n = 2000 peak-summand row.
pub fn sigma() -> &'static SigmaTable {
    static S: OnceLock<SigmaTable> = OnceLock::new();
    S.get_or_init(|| sigma_table(2001, xi(), ctx()).unwrap())
}

pub fn li() -> &'static LiCoefficients {
    static L: OnceLock<LiCoefficients> = OnceLock::new();
    L.get_or_init(|| li_an_streaming(N, sigma(), ctx()).unwrap())
}

pub fn f(x: &str) -> Float {
    ctx().parse(x).unwrap()
}
