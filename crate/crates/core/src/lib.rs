//! Geometric quantization of principally polarized abelian varieties.
//!
//! The quantum space at level `k` over a point `Z` of the Siegel upper half
//! space is spanned by the level-`k` theta functions. This crate evaluates
//! them, integrates against them, and builds the operator calculus that lives
//! on top:
//!
//! - [`siegel`]: Siegel points, the induced complex structures and their
//!   `Z`-derivatives, the bivectors of the formal Hitchin connection.
//! - [`fourier`]: pure phases `F_{r,s}` and finite Fourier series on the torus.
//! - [`theta`]: truncated lattice sums with certified tails.
//! - [`quantization`]: `L²` pairings by periodic trapezoidal quadrature.
//! - [`toeplitz`]: Toeplitz matrices in the theta frame, closed form and
//!   quadrature, norms, traces and asymptotic fits.
//! - [`formal`]: the heat-operator trivialization, flatness and the Moyal
//!   product.
//! - [`tqft`]: abelian Chern–Simons curve operators.
//!
//! Heavy loops (quadrature nodes, level sweeps) run through [`parallel`],
//! which uses rayon when the `parallel` feature is enabled and falls back to
//! plain iteration otherwise. Reductions always happen in a fixed order, so
//! both paths produce identical bits.

pub mod error;
pub mod fit;
pub mod formal;
pub mod fourier;
pub mod linalg;
pub mod parallel;
pub mod quantization;
pub mod siegel;
pub mod theta;
pub mod toeplitz;
pub mod tqft;

pub use error::{Error, Result};
pub use fourier::{poisson_bracket, FourierFunction, FourierMode};
pub use parallel::Execution;
pub use siegel::{DirectionKind, SiegelPoint, TangentDirection};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
