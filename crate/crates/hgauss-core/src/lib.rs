//! Geometry of surfaces in the 3-dimensional Heisenberg group.
//!
//! The crate is organized around five building blocks:
//!
//! * [`expr`] parses textual definitions of scalar functions and evaluates
//!   them together with all partial derivatives up to order three.
//! * [`gans`] implements the Gans model of the hyperbolic plane (the model
//!   the Gauss map of a surface takes values in): metric, isometries,
//!   Christoffel symbols and geodesics.
//! * [`heis`] is the Heisenberg group itself, with its left-invariant
//!   metric, orthonormal frame and Riemannian connection.
//! * [`surface`] evaluates graphs and vertical ruled surfaces: fundamental
//!   forms, unit normal, mean curvature and a catalog of named examples.
//! * [`gaussmap`] computes the Gans-valued Gauss map of a graph, its
//!   Jacobian and determinant, and the tension field together with the
//!   closed-form identities it satisfies.
//!
//! Everything is plain `f64` arithmetic on immutable values, usable from
//! `no_std` environments (an allocator is required for expressions).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod expr;
pub mod gans;
pub mod gaussmap;
pub mod heis;
pub mod surface;

mod fmath;
