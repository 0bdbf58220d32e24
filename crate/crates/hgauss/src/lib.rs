//! Test harness and command line companion to `hgauss-core`.
//!
//! The core crate computes everything analytically. This crate provides the
//! independent side of every cross check: finite-difference derivatives and
//! a finite-difference tension field ([`fd`]), surface references parsed
//! from the command line ([`surface_ref`]), grid sampling and CSV/JSON
//! export ([`grid`]), and the named check suites ([`suite`]).

pub mod fd;
pub mod grid;
pub mod suite;
pub mod surface_ref;
