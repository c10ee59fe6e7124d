//! Restricted root data, Weyl chamber faces, selection matrices and the
//! doubled-frame matching for Riemannian symmetric spaces of noncompact type.

pub mod acceptance;
pub mod chamber;
pub mod cli;
pub mod error;
pub mod framematrix;
pub mod fuzz;
pub mod matcher;
pub mod modelgeom;
pub mod rational;
pub mod rootdata;

pub use error::{Error, Result};
