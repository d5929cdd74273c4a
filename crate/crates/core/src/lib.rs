//! Exact-arithmetic workbench for topological measures and their
//! generalizations on two finitely-presented compact-space models.
//!
//! The pipeline: build a space model (`space`), define set functions on
//! it (`setfn`, `instances`), classify them against the measure/TM/DTM
//! axioms (`classify`), run the variation and cover-infimum transforms
//! with certificates (`search`, `transforms`), and assemble the
//! Radon/proper decompositions and theorem suites (`decomp`, `suites`)
//! into machine-readable reports (`report`).

pub mod certs;
pub mod classify;
pub mod decomp;
pub mod error;
pub mod instances;
pub mod lp;
pub mod mask;
pub mod probes;
pub mod report;
pub mod search;
pub mod setfn;
pub mod space;
pub mod suites;
pub mod transforms;
pub mod value;

pub use error::{Error, Result};
