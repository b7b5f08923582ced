//! Dynamic flows: simulation, static/dynamic transformations and the drivers for
//! quickest flow and maximum flow over time.

mod drivers;
mod sim;

pub use drivers::*;
pub use sim::{
    makespan, simulate, single_edge_time, trans1, trans2, DynamicRouting, Release, Routing,
    SimOptions, SimTrace, StepRecord, Stream,
};
