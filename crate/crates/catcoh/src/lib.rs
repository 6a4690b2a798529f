//! Exact computation of deformation cohomology for skeletally presented
//! tensor and bitensor categories.
//!
//! The engine builds the cochain complex of natural transformations between
//! iterated product functors as explicit sparse matrices over an exact
//! field (rationals, prime fields, cyclotomic fields), computes cohomology
//! and cobounding witnesses, evaluates deformation candidates with truncated
//! polynomial arithmetic, assembles the double complex of a bitensor
//! category, and cross-checks the group-based families against a
//! bar-resolution oracle.

pub mod bicomplex;
pub mod category;
pub mod complex;
pub mod deform;
pub mod error;
pub mod group;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod tree;
pub mod word;

pub use error::{Error, Result};
pub use matrix::{ExactMatrix, Mat};
pub use scalar::{FieldSpec, Scalar};
