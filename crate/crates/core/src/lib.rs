//! High-precision engine for the Riemann ξ function, its Pustyl'nikov
//! coefficients ξ_r, the Li coefficients a_n and the Keiper-Li constants λ_n.
//!
//! Every computation is threaded through a [`PrecisionContext`]; all
//! high-precision values are MPFR floats from `rug`.
//!
//! Module map:
//! - [`precision`], [`series`]: working precision and the truncated power-series kernel.
//! - [`quadrature`], [`xi`], [`mobius`]: ξ_r by quadrature, ξ/ξ₊/ξ₋ evaluation, the
//!   E_l/O_l coefficients and the three fractional-linear maps.
//! - [`li`]: the C_{n,p} triangle, the Σ_p moment sums and a_n by two independent routes.
//! - [`lambda`]: 1/φ, φ′/φ, λ_n, the log ξ series and singularity diagnostics.
//! - [`analysis`]: real-axis and circle scans, fits and asymptotic checks.
//! - [`cache`]: the text cache format shared with the command-line tool.

pub mod analysis;
pub mod cache;
pub mod error;
pub mod lambda;
pub mod li;
pub mod mobius;
pub mod precision;
pub mod quadrature;
pub mod series;
pub mod xi;

pub use error::{Error, Result};
pub use precision::PrecisionContext;
pub use series::PowerSeries;

/// Version string stamped into cache headers.
pub const GENERATOR_VERSION: &str = concat!("xili ", env!("CARGO_PKG_VERSION"));
