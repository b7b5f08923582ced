use num_traits::{One, Zero};

use crate::monotonic::{route_monotone, route_monotone_relaxed, MonotoneParams};
use crate::netcore::rat::{floor_log2, pow2};
use crate::netcore::{flow_stats, Arc, ConfluentRouting, Error, Network, Rat, Result};
use crate::staticflow::{length_bounded_flow, max_flow, node_to_edge_capacitated};

use super::MultilayerParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerNode {
    Copy { base: usize, layer: u32 },
    Dummy { base: usize, layer: u32 },
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerArc {
    /// Copy of a base arc inside one layer.
    Vertical {
        arc: Arc,
        layer: u32,
    },
    /// `u^i -> u^{i+1}`.
    Horizontal {
        base: usize,
        layer: u32,
    },
    /// `u^i -> t_u^i` for a base arc `(u, t)` of capacity `2^i`.
    DummyEntry {
        arc: Arc,
        layer: u32,
    },
    DummyChain {
        base: usize,
        layer: u32,
    },
    DummyExit {
        base: usize,
    },
}

#[derive(Debug, Clone)]
pub struct LayeredNetwork {
    pub net: Network,
    pub k: u32,
    pub node: Vec<LayerNode>,
    pub arc: Vec<LayerArc>,
    /// `copy[u][i]` is the node of `u^i` (unused for the sink).
    pub copy: Vec<Vec<usize>>,
    pub sink: usize,
    pub base_sink: usize,
}

impl LayeredNetwork {
    /// Puts unit supply on `v^0` for the given base nodes and clears the rest.
    pub fn set_sources(&mut self, sources: &[usize]) {
        for s in self.net.supply.iter_mut() {
            *s = Rat::zero();
        }
        for &v in sources {
            self.net.supply[self.copy[v][0]] = Rat::one();
        }
    }
}

/// Layered network of a unit-normalised network whose capacities are powers of 2 and
/// at least 1, with a single sink.
pub fn build_layers(unit: &Network) -> Result<LayeredNetwork> {
    if unit.sinks.len() != 1 {
        return Err(Error::Precondition(
            "layered network needs a single sink".into(),
        ));
    }
    let t = unit.sinks[0];
    let mut cmax = Rat::one();
    for e in &unit.edges {
        if e.cap < Rat::one() || pow2(floor_log2(&e.cap)) != e.cap {
            return Err(Error::Precondition(
                "unit capacities must be powers of 2 and at least 1".into(),
            ));
        }
        if e.cap > cmax {
            cmax = e.cap.clone();
        }
    }
    let k = floor_log2(&cmax) as u32 + 1;
    let mut g = Network::new(true);
    let mut node = Vec::new();
    let mut arc = Vec::new();
    let mut copy = vec![Vec::new(); unit.n()];
    for u in 0..unit.n() {
        if u == t {
            continue;
        }
        for i in 0..k {
            let x = g.add_node(&format!("{}@{}", unit.nodes[u], i));
            g.set_node_cap(x, pow2(i as i64));
            node.push(LayerNode::Copy { base: u, layer: i });
            copy[u].push(x);
        }
        if unit.supply[u] > Rat::zero() {
            g.supply[copy[u][0]] = unit.supply[u].clone();
        }
    }
    let sink = g.add_node(&unit.nodes[t]);
    node.push(LayerNode::Sink);
    g.add_sink(sink);
    for u in 0..unit.n() {
        if u == t {
            continue;
        }
        for i in 0..k.saturating_sub(1) {
            g.add_edge(
                copy[u][i as usize],
                copy[u][i as usize + 1],
                pow2(i as i64),
                0,
            );
            arc.push(LayerArc::Horizontal { base: u, layer: i });
        }
    }
    let mut to_sink: Vec<Option<(u32, Arc)>> = vec![None; unit.n()];
    for a in unit.arcs() {
        let (u, v) = (unit.tail(a), unit.head(a));
        if u == t {
            continue;
        }
        let i = floor_log2(unit.cap(a)) as u32;
        if v == t {
            if to_sink[u].map_or(true, |(j, _)| i > j) {
                to_sink[u] = Some((i, a));
            }
            continue;
        }
        for l in 0..=i {
            g.add_edge(
                copy[u][l as usize],
                copy[v][l as usize],
                pow2(l as i64),
                unit.len(a),
            );
            arc.push(LayerArc::Vertical { arc: a, layer: l });
        }
    }
    for u in 0..unit.n() {
        let Some((i, a)) = to_sink[u] else { continue };
        let mut chain = Vec::new();
        for j in i..k {
            let x = g.add_node(&format!("{}#{}@{}", unit.nodes[t], unit.nodes[u], j));
            g.set_node_cap(x, pow2(j as i64));
            node.push(LayerNode::Dummy { base: u, layer: j });
            chain.push(x);
        }
        g.add_edge(copy[u][i as usize], chain[0], pow2(i as i64), unit.len(a));
        arc.push(LayerArc::DummyEntry { arc: a, layer: i });
        for (n, j) in (i..k - 1).enumerate() {
            g.add_edge(chain[n], chain[n + 1], pow2(j as i64), 0);
            arc.push(LayerArc::DummyChain { base: u, layer: j });
        }
        g.add_edge(*chain.last().unwrap(), sink, pow2(k as i64 - 1), 0);
        arc.push(LayerArc::DummyExit { base: u });
    }
    g.monotone = true;
    crate::netcore::check(&g)?;
    Ok(LayeredNetwork {
        net: g,
        k,
        node,
        arc,
        copy,
        sink,
        base_sink: t,
    })
}

#[derive(Debug, Clone)]
pub struct LayerRouting {
    pub routing: ConfluentRouting,
    pub node_congestion: Rat,
    pub max_length: u64,
}

/// Confluent routing of the unit supplies on the layered network. A splittable flow with
/// node congestion at most 1 (within `budget`) must exist.
pub fn route_layers(
    h: &LayeredNetwork,
    budget: Option<u64>,
    params: &MultilayerParams,
) -> Result<LayerRouting> {
    let (split, map) = node_to_edge_capacitated(&h.net);
    let f = match budget {
        Some(b) => length_bounded_flow(&split, &split.supply, Some(b))?,
        None => {
            let f = max_flow(&split, &split.supply)?;
            if f.value() < split.total_supply() {
                return Err(Error::Infeasible(
                    "layered network cannot route all unit supplies".into(),
                ));
            }
            f
        }
    };
    let fh = map.flow_back(&h.net, &f);
    route_layers_with_flow(h, &fh, params)
}

pub fn route_layers_with_flow(
    h: &LayeredNetwork,
    f: &crate::netcore::PathFlow,
    params: &MultilayerParams,
) -> Result<LayerRouting> {
    let mp = MonotoneParams {
        base: Some(params.layer_base),
        trials: params.trials,
        seed: params.seed,
    };
    let res = route_monotone(&h.net, f, &mp)?;
    Ok(LayerRouting {
        routing: res.routing,
        node_congestion: res.node_congestion,
        max_length: res.max_length,
    })
}

pub(crate) fn route_layers_relaxed(
    h: &LayeredNetwork,
    params: &MultilayerParams,
) -> Result<LayerRouting> {
    let mp = MonotoneParams {
        base: Some(params.layer_base),
        trials: params.trials,
        seed: params.seed,
    };
    let res = route_monotone_relaxed(&h.net, &mp)?;
    let st = flow_stats(&h.net, &res.flow);
    Ok(LayerRouting {
        routing: res.routing,
        node_congestion: st.node_congestion,
        max_length: st.max_length,
    })
}
