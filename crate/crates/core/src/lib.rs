//! Confluent flows in static and dynamic networks.
//!
//! All capacities, supplies and flow values are exact rationals. Lengths are
//! non-negative integers. See the README for an overview of the modules.

pub mod cli;
pub mod config;
pub mod dynamic;
pub mod instances;
pub mod monotonic;
pub mod multilayer;
pub mod netcore;
pub mod oracle;
pub mod rounding;
pub mod staticflow;

pub use netcore::{Arc, ConfluentRouting, Error, FlowStats, Network, Path, PathFlow, Rat, Result};
