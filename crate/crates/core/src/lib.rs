//! Numerical toolkit for the shadowing property of smooth maps near
//! nonhyperbolic fixed points.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel drivers live in the `shadowlab` crate.

#![no_std]
// `!(a <= b)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod conditions;
pub mod error;
pub mod geometry;
pub mod maps;
pub mod pseudo;
pub mod rng;
pub mod scaling;
pub mod solver;

pub use conditions::{Admissibility, CheckParams, ConditionReport};
pub use error::{Error, Result};
pub use geometry::{LyapunovPair, Region, RegionPart};
pub use maps::{Jacobian, MapSpec, Monomial, Neighborhood, Planar, PlanarMap, Point, Point2, ScalarMap};
pub use pseudo::{ErrorModel, Pseudotrajectory, Push};
pub use scaling::{ModelKind, ScalingConfig, ScalingResult, ScalingRow, TrialFamily};
pub use solver::{Certificate, SearchOptions, ShadowResult};
