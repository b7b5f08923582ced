//! Instance generators: the half-grid with its cut construction, the two-source and
//! 3-dimensional-matching gadgets, and random corpora.

mod corpus;
mod gadgets;
mod halfgrid;

pub use corpus::{gen_instance, gen_random_corpus, CorpusSpec};
pub use gadgets::{gen_alphabeta, gen_bo3dm, GadgetInstance, GadgetKind};
pub use halfgrid::{
    build_cut, canonical_family, canonical_path, canonical_routing, check_edge_confluent,
    crossing_witness, gen_half_grid, gen_tree_family, harmonic, min_support_cut, separates,
    Crossing, Cut, Gadget, GridEdge, GridPath, GridRole, HalfGrid,
};

use std::fmt::Write;

use crate::netcore::rat::lcm_denoms;
use crate::netcore::{Network, Rat};

/// DIMACS max-flow projection: node `n+1` is a super source feeding every supply node
/// with its supply, node `n+2` a super sink fed by every sink. Capacities are scaled to
/// integers by the common denominator, reported in a comment line.
pub fn to_dimacs(net: &Network) -> String {
    let scale = lcm_denoms(net.edges.iter().map(|e| &e.cap).chain(net.supply.iter()));
    let int = |x: &Rat| (x * Rat::from_integer(scale.clone())).to_integer();
    let n = net.n();
    let arcs = net.arcs();
    let srcs = net.sources();
    let total: num_bigint::BigInt = net.supply.iter().map(&int).sum();
    let mut s = String::new();
    let _ = writeln!(s, "c scale {scale}");
    let _ = writeln!(
        s,
        "p max {} {}",
        n + 2,
        arcs.len() + srcs.len() + net.sinks.len()
    );
    let _ = writeln!(s, "n {} s", n + 1);
    let _ = writeln!(s, "n {} t", n + 2);
    for &v in &srcs {
        let _ = writeln!(s, "a {} {} {}", n + 1, v + 1, int(&net.supply[v]));
    }
    for a in arcs {
        let _ = writeln!(
            s,
            "a {} {} {}",
            net.tail(a) + 1,
            net.head(a) + 1,
            int(net.cap(a))
        );
    }
    for &t in &net.sinks {
        let _ = writeln!(s, "a {} {} {}", t + 1, n + 2, total);
    }
    s
}
