//! Exact computer algebra for Brown-Peterson cohomology operations, categories of
//! fractions on finite categories, and localization of finitely generated abelian groups.

pub mod abloc;
pub mod arith;
pub mod catfrac;
pub mod error;
pub mod grading;
pub mod hopf;
pub mod opcalc;
pub mod report;

pub use error::{Error, Result};
