//! Bicomplex and hyperbolic scalar algebra, hyperbolic-valued norms on
//! `BC^n`, BC-linear operators, and finite-dimensional checks of Zabreiko's
//! lemma and the continuity theorems that follow from it.

pub mod dmodule;
pub mod dop;
pub mod error;
pub mod hyperscalar;
pub mod json;
pub mod sampling;
pub mod theoremlab;

pub use dmodule::{BCVector, ComponentNorm, DNormConfig, DSeminorm, SeriesReport, SeriesSource};
pub use dop::BCMatrix;
pub use error::{Error, Result};
pub use hyperscalar::{Bicomplex, DPlus, Hyperbolic, OrderRel};
