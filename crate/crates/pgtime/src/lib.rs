//! Exact probability laws, transforms and moments of Poisson and Skellam
//! processes whose internal clock is a compound Poisson–Gamma subordinator
//! `G(N(t))`, its exponential/Erlang special cases, or the inverse
//! (first-passage) processes of those subordinators — together with the exact
//! Monte Carlo samplers and statistical verification harness used to check
//! every closed form in the crate.
//!
//! Module map:
//! - [`specfun`]: truncated-series special functions (modified Bessel I,
//!   Wright, two- and three-parameter Mittag-Leffler) with overflow-safe
//!   log-domain accumulation.
//! - [`levy`]: base-process parameterizations, Bernstein/Lévy data, transition
//!   laws of the subordinator family, and the Skellam law.
//! - [`timechange`]: laws of Poisson/Skellam processes subordinated by the
//!   compound Poisson–Gamma clock.
//! - [`inverse`]: the inverse (first-passage) clocks, their densities and
//!   moments, and counting laws driven by them.
//! - [`mc`]: reproducible Monte Carlo samplers for every process above.
//! - [`verify`]: chi-square / moment / transform checks and the named
//!   verification suites.

pub mod error;
pub mod inverse;
pub mod levy;
pub mod mc;
pub mod quad;
pub mod specfun;
pub mod timechange;
pub mod verify;

pub use error::{Error, Result};

/// Library version, re-exported for frontends that report it.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
