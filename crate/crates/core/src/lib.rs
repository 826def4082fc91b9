//! Optimal stopping boundaries for geometric Brownian motion.
//!
//! The library constructs candidate value functions of potential form
//! `V(x) = ∫_S G_r(x,y) σ(y) m(dy)` for candidate stopping sets `S` and
//! locates the stopping boundary as the unique set on which the candidate
//! matches the reward. Three problems are solved this way:
//!
//! * the 1D perpetual put ([`perpetual`]), where the boundary is a single
//!   threshold with a closed form,
//! * the 2D infinite-horizon investment problem ([`invest2d`]), where the
//!   boundary curve is fitted in a superellipse family against the
//!   value-matching integral equation,
//! * the finite-horizon American put ([`amput`]), where the time-dependent
//!   boundary solves a backward integral equation and the value splits into
//!   an early-exercise premium plus the European price.
//!
//! [`verify`] provides a Monte Carlo harness for the structural identities
//! (self-duality of the resolvent, the Dynkin-type representation formula,
//! policy-value cross checks) and [`docsmap`] checks the provenance manifest
//! shipped with the repository.

pub mod amput;
pub mod config;
pub mod docsmap;
pub mod error;
pub mod invest2d;
pub mod kernels;
pub mod model;
pub mod perpetual;
pub mod quad;
pub mod riesz;
pub mod roots;
pub mod simplex;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use model::GbmParams;
