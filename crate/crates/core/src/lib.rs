//! Lie point symmetries of planar non-relativistic charged-particle motion.
//!
//! The crate builds the four families of electromagnetic fields `(E₁, E₂, B)`
//! whose Lorentz dynamics
//!
//! ```text
//! ẍ = E₁(x, y, t) + ẏ B(x, y, t)
//! ÿ = E₂(x, y, t) − ẋ B(x, y, t)
//! ```
//!
//! admit a Lie point symmetry with generator
//! `G = τ ∂t + η₁ ∂x + η₂ ∂y`, maps between lab and canonical group
//! coordinates, integrates trajectories in either frame and checks every
//! symmetry and consistency condition numerically.
//!
//! Modules:
//! - [`expr`]: expression parsing, evaluation and symbolic differentiation.
//! - [`symcore`]: symmetry parameters, generator, canonical coordinate maps.
//! - [`fieldgen`]: the four field families and the Faraday completion helpers.
//! - [`verify`]: determining-equation, Faraday and orbit-perturbation checks.
//! - [`dynamics`]: fixed-step RK4 integration and frame transforms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod expr;
pub mod fd;
pub mod fieldgen;
pub mod interp;
pub mod output;
pub mod quad;
pub mod symcore;
pub mod verify;

use thiserror::Error;

pub use expr::{ExprError, Expression};

/// Variable list for functions of time.
pub const TIME_VARS: [&str; 1] = ["t"];
/// Variable list for functions of the canonical spatial coordinates (x̄, ȳ).
pub const PLANE_VARS: [&str; 2] = ["xb", "yb"];

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("quadrature did not converge on [{a}, {b}] within the maximum refinement depth")]
    Quadrature { a: f64, b: f64 },
    #[error("singular point at (x, y, t) = ({x}, {y}, {t}): {what}")]
    Singular { x: f64, y: f64, t: f64, what: &'static str },
    #[error("time {t} outside the working interval [{start}, {end}]")]
    OutOfInterval { t: f64, start: f64, end: f64 },
    #[error("{what} {value} outside the cached range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0}")]
    NonMonotone(String),
    #[error("integration stopped at t = {last_good_time}: {source}")]
    Integration {
        last_good_time: f64,
        partial: Vec<dynamics::Sample>,
        source: Box<Error>,
    },
    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
