//! Slow divergence integrals for regularized planar piecewise-smooth systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] and [`pws`] describe the two vector fields `Z±`, the switching
//!   function `h` and the classification of the switching line (sliding,
//!   crossing, folds and two-folds), together with Filippov sliding dynamics
//!   and coordinate changes.
//! * [`regularization`] provides transition functions `φ` and the composite
//!   `q(p) = φ'(φ⁻¹(p))`.
//! * [`sdi`] integrates the slow divergence along sliding segments, up to
//!   two-fold points and up to one-sided tangencies.
//! * [`canard`] builds slow relation functions and entry-exit sequences near a
//!   balanced canard cycle through a visible-invisible two-fold.
//! * [`fractal`] estimates Minkowski dimensions of sequences and planar curves.
//! * [`simulator`] integrates the regularized system and studies its return
//!   map on a section.
//! * [`cli`] exposes everything as a command-line tool writing CSV and JSON.
//!
//! Supporting numerics live in [`quadrature`], [`roots`] and [`ode`].

pub mod canard;
pub mod cli;
pub mod error;
pub mod field;
pub mod fractal;
pub mod models;
pub mod ode;
pub mod output;
pub mod pws;
pub mod quadrature;
pub mod regularization;
pub mod roots;
pub mod sdi;
pub mod simulator;

pub use error::{Error, Result};
pub use field::{Monomial, Partial, Poly2, ScalarField, SmoothMap2, VectorField};
pub use pws::{BoundaryClass, BoundaryTag, Domain, PwsSystem, Side, TwoFoldType};
pub use regularization::Regularizer;
pub use sdi::SdiResult;
