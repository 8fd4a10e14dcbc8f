//! Computational algebra for multilinear forms over GF(2).
//!
//! The crate provides bit-packed linear algebra ([`gf2`]), coefficient-tensor
//! multilinear forms ([`forms`]), partition-rank certificates, analytic rank
//! and an exhaustive rank oracle ([`prank`]), the bilinear regularity and
//! counting machinery ([`regularity`]), and the construction and
//! verification of an approximately symmetric 4-linear form far from every
//! symmetric one ([`counterexample`]).

pub mod cli;
pub mod counterexample;
pub mod error;
pub mod forms;
pub mod gf2;
pub mod prank;
pub mod regularity;

pub use error::{Error, Result};
pub use forms::{BilinearForm, MultilinearForm, Permutation, SparseForm};
pub use gf2::{BitMatrix, BitVec, Subspace};
pub use prank::{Dyadic, PartitionCertificate, PartitionSummand};
