//! Network model, flows, routings and JSON I/O.

mod flow;
mod io;
mod network;
pub mod rat;

pub use flow::{
    flow_stats, routing_paths, routing_to_pathflow, ConfluentRouting, FlowStats, Path, PathFlow,
};
pub use io::{read_network, write_network, NetworkDoc};
pub(crate) use network::check;
pub use network::{validate, Arc, Edge, Network, Violation};
pub use rat::Rat;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("not confluent: {0}")]
    NotConfluent(String),
    #[error("cycle detected: {0}")]
    Cycle(String),
    #[error("horizon exceeded: {0}")]
    HorizonExceeded(String),
    #[error("search budget exhausted: {0}")]
    Exhausted(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
