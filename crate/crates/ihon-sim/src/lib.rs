//! Discrete-event model of a hybrid optical network node carrying
//! circuit-like guaranteed traffic (GST) and best-effort statistically
//! multiplexed traffic (SM) on one output wavelength, with an analytical
//! link-budget calculator for fronthaul deployments of such nodes.
//!
//! GST packets pass through a fixed delay line sized to the largest SM
//! serialization time. The delay gives the scheduler exact lookahead over
//! upcoming GST departures: SM packets are inserted only into gaps they
//! fully fit, so GST keeps a constant node delay with zero delay variation
//! and zero loss while SM fills the leftover capacity. A non-preemptive
//! strict-priority switch (HP/LP) is included as the comparison discipline.
//!
//! Typical entry points:
//!
//! - [`config::RunConfig`] describes one experiment; [`runner::run_single`]
//!   executes it over all configured seeds and aggregates.
//! - [`runner::run_sweep`] drives load sweeps and
//!   [`runner::write_sweep_csv`] emits the results.
//! - [`budget::budget_table`] computes node-count vs. link-length tables.
//!
//! The `ihon` binary wraps these behind a CLI.

pub mod budget;
pub mod config;
mod error;
pub mod event;
pub mod eventlog;
pub mod metrics;
pub mod node;
pub mod packet;
pub mod rng;
pub mod runner;
pub mod sim;
pub mod time;
pub mod traffic;

pub use error::SimError;
