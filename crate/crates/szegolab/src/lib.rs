//! szegolab: a numerical laboratory for the Szegő minimum problem
//!
//! The central quantity is
//!
//! ```text
//! e_n(ρ)² = min ∫_T |t^n + q_{n-1} t^{n-1} + … + q_0|² dρ(t)
//! ```
//!
//! over monic polynomials of degree n, for measures ρ on the unit circle.
//! The crate provides:
//!
//! * a measure model (atoms, piecewise densities, truncated Riesz products)
//!   with trigonometric moments computed exactly where the structure allows
//!   it and by oscillation-aware quadrature otherwise ([`measure`]);
//! * a Levinson-type solver for e_n, the monic extremal polynomial and the
//!   recursion coefficients in configurable extended precision, together
//!   with an independent dense-solve oracle ([`szego`]);
//! * the explicit polynomial constructions used in upper-bound arguments:
//!   Halász polynomials and products, concentrated kernels, outer-function
//!   convolutions, vanishing-power polynomials, near-minimax monic
//!   polynomials off an arc, and sublevel-set extraction ([`poly`],
//!   [`halasz`], [`fourier`]);
//! * equilibrium measures and logarithmic capacity for unions of closed
//!   arcs, a discretization polynomial with a per-run certificate, and
//!   certificates for super-exponential decay of e_n ([`potential`]);
//! * generators for the structured measure families the experiments run on
//!   ([`construct`]) and a report layer shared with the CLI ([`report`]).

pub mod arcs;
pub mod construct;
pub mod error;
pub mod fourier;
pub mod halasz;
pub mod linalg;
pub mod measure;
pub mod poly;
pub mod potential;
pub mod precision;
pub mod quad;
pub mod report;
pub mod szego;

pub use arcs::{Arc, ArcSet};
pub use error::{Error, Result};
pub use measure::{Angle, Measure, MomentSequence};
pub use poly::CirclePolynomial;
pub use precision::{CFloat, PrecisionContext};
pub use szego::SzegoResult;
