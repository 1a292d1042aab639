//! Numerical verification of weighted Hardy, Rellich and
//! uncertainty-principle inequalities for radial functions on hyperbolic
//! space, with Euclidean space as a cross-check.
//!
//! The crate is organized bottom-up: [`geometry`] holds the radial model,
//! [`quadrature`] integrates weighted radial terms, [`profiles`] supplies
//! test functions, [`catalog`] describes inequalities as data and
//! [`sharpness`] measures residuals, quotients and discrete minima.

pub mod catalog;
pub mod geometry;
pub mod profiles;
pub mod quadrature;
pub mod sharpness;

pub use catalog::{BuiltInequality, CatalogError, InequalitySpec, Params, Registry};
pub use geometry::{GeometryError, ModelKind, RadialFunction, SpaceModel};
pub use profiles::{FamilyKind, FamilyOptions, ProfileError, RadialProfile};
pub use quadrature::{QuadError, QuadOptions, QuadResult, TermError};
pub use sharpness::{Problem, SharpnessError};

use thiserror::Error;

/// Any error raised by the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Sharpness(#[from] SharpnessError),
}
