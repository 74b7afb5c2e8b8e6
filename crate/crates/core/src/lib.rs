//! Pure-state reconstruction from eigenvalue distributions of several
//! observables, by iterating the physical imposition operator.
//!
//! The crate enumerates Pauli partners (distinct states sharing every
//! measured distribution), assembles mutually unbiased bases from the
//! partners of a flat generator, and maps basins of attraction.

pub mod basin;
pub mod basis;
pub mod cli;
pub mod config;
pub mod distribution;
pub mod error;
pub mod imposition;
pub mod io;
pub mod metrics;
pub mod mubs;
pub mod partners;
pub mod record;
pub mod refine;
pub mod sampling;
pub mod seed;
pub mod state;
