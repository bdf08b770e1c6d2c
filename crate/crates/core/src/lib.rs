//! Dunkl-operator calculus and weighted orthogonal polynomial projection on
//! the unit ball `B^d`, for weights of the reflection-invariant form
//! `(1 - |x|^2)^alpha * prod_i |x_i|^{gamma_i}` with `alpha, gamma_i > -1`.
//!
//! The crate is organized in layers:
//!
//! * [`multipoly`] - sparse multivariate polynomials over an exchangeable
//!   scalar backend (`f64` or exact rationals), reflections, parity
//!   projections and the exponent-shift operators they induce;
//! * [`dunkl`] - Dunkl operators, their adjoints, angular operators, the
//!   h-Laplacian and the Sturm-Liouville operator, all acting on polynomials;
//! * [`moments`] - exact weighted integration of polynomials, inner products,
//!   Sobolev-type inner products and the Sturm-Liouville bilinear forms;
//! * [`orthobasis`] - orthogonal bases of the spaces `V_k`, projectors,
//!   truncation operators and Jacobi polynomial utilities;
//! * [`propcheck`] - a registry of executable identity checks, each returning
//!   a structured pass/fail report;
//! * [`harness`] - convergence and sharpness experiments with CSV output.

pub mod dunkl;
pub mod error;
pub mod harness;
pub mod jacobi;
pub mod moments;
pub mod multipoly;
pub mod orthobasis;
pub mod propcheck;
pub mod scalar;
pub mod weights;

pub use error::Error;
pub use multipoly::{MultiIndex, Polynomial};
pub use scalar::{Rational, Scalar};
pub use weights::WeightParams;
