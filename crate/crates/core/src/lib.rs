//! Simulation and verification toolkit for anisotropic random walks on the
//! planar lattice.
//!
//! The walk lives on `Z^2`; from a site on the horizontal line `y = j` it
//! steps to either vertical neighbour with probability `p(j)` and to either
//! horizontal neighbour with probability `1/2 - p(j)`. The crate provides
//!
//! * [`env`] — level-probability environments `p(j)` and their Cesaro
//!   constants `(gamma1, gamma2, tau)`,
//! * [`walk`] — the walk itself, simulated both by its Markov kernel and by
//!   the equivalent geometric-block construction, plus local times,
//! * [`timechange`] — Wiener paths, the occupation-time functional `A(t)`,
//!   its inverse, oscillating Brownian motion and the closed-form laws of
//!   `A^{-1}(t)` and `t - A^{-1}(t)`,
//! * [`verify`] — exact identities, goodness-of-fit runs, scaling-exponent
//!   scans and iterated-logarithm diagnostics,
//! * [`cli`] — the `aniso` command-line front end.
//!
//! Everything downstream of a seed is deterministic: ensembles derive one
//! RNG per replica from `(master_seed, label, replica)` so results do not
//! depend on worker count or scheduling.

pub mod cli;
pub mod config;
pub mod env;
pub mod error;
pub mod seed;
pub mod stats;
pub mod timechange;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
