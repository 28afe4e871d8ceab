//! Symmetries (self-adjoint unitaries) that intertwine an idempotent matrix
//! `P` with `I − P` or with `I − P*`.
//!
//! [`idempotent`] validates `P` and exposes its block form, [`halmos`] builds
//! the positive symmetry attached to `P`, [`families`] parameterizes the two
//! families of intertwining symmetries and [`decompose`] relates them.
//! [`codec`], [`report`] and [`cli`] drive the `idemsym` binary.

pub mod codec;
pub mod cli;
pub mod decompose;
pub mod error;
pub mod families;
pub mod halmos;
pub mod idempotent;
pub mod linalg;
pub mod report;
pub mod symmetry;

pub use error::{Error, Result};
