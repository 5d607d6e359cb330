//! Percolation laboratory core.
//!
//! Product measures on `{0,1}^E`, increasing events and pivotality, exact
//! enumeration oracles, finite lattice geometries, union-find clustering,
//! counter-based Monte Carlo estimators, box-crossing and sharp-threshold
//! checks, plaquette duality in three dimensions and a small Ising sampler.
//!
//! The crate is `no_std` and only needs `alloc`. Parallelism is injected
//! through [`exec::Executor`]; the `percolab` crate supplies a thread-pool
//! implementation together with the CLI and file formats.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clusters;
pub mod config;
pub mod cube;
pub mod error;
pub mod estimate;
pub mod events;
pub mod exec;
pub mod gf2;
pub mod ising;
pub mod lattice;
pub mod montecarlo;
pub mod oracle;
pub mod plaquette;
pub mod poly;
pub mod rng;
pub mod rsw;
pub mod unionfind;

pub use config::{Configuration, GroundSet, Probability};
pub use cube::{Event, MonotoneEvent};
pub use error::{Error, Result};
pub use estimate::Estimate;
pub use exec::{Executor, Sequential};
pub use lattice::{LatticeGraph, Model};
pub use montecarlo::SamplerSpec;
