//! Decentralization and scalability analysis for blockchains.
//!
//! The crate is organised around five areas:
//!
//! * [`metrics`]: centralization level `N_ε`, central trust and cumulative share curves
//!   computed from producer distributions.
//! * [`bounds`]: latency and throughput formulas, and the bandwidth-limited throughput cap.
//! * [`scaling`]: sharding and payment-channel analyses built on the
//!   centralization-throughput product.
//! * [`simnet`]: a deterministic discrete-event simulator of proof-of-work mining with
//!   gossip block propagation.
//! * [`ingest`]: file formats, unit conversions and report export.
//!
//! [`batch`] runs many simulations at once, in parallel when the `parallel` feature is on.

pub mod batch;
pub mod bounds;
mod error;
pub mod ingest;
pub mod metrics;
pub mod presets;
pub mod scaling;
pub mod simnet;

pub use error::{Error, Result};
