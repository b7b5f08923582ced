//! Confluent flows in monotone node-capacitated networks via capacity classes.
//!
//! Capacities are scaled so the smallest is 1 and rounded up to powers of a base
//! `b`. Class `i` holds the nodes of capacity `b^i`; its sinks are the higher-class
//! nodes it feeds. Each class is rounded on its own and the results are linked.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::RngCore;

use crate::netcore::rat::{ceil_log_base, log2f, pow_base};
use crate::netcore::{
    flow_stats, routing_to_pathflow, Arc, ConfluentRouting, Error, Network, Path, PathFlow, Rat,
    Result,
};
use crate::rounding::{round_best, trial_rng, DagArc, FlowDag};
use crate::staticflow::{node_to_edge_capacitated, unsplittable_flow};

#[derive(Debug, Clone)]
pub struct MonotoneParams {
    pub base: Option<u64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for MonotoneParams {
    fn default() -> Self {
        MonotoneParams {
            base: None,
            trials: 8,
            seed: 0,
        }
    }
}

/// `max(2, ceil(log2(x)^4))`.
pub fn default_base(x: usize) -> u64 {
    let l = log2f(x as f64);
    (l.powi(4).ceil() as u64).max(2)
}

#[derive(Debug, Clone)]
pub struct ClassNet {
    pub index: u32,
    /// Non-sink nodes of the class (extended-network indices).
    pub nodes: Vec<usize>,
    /// Nodes of higher classes, dummies and global sinks fed by the class.
    pub sinks: Vec<usize>,
    pub arcs: Vec<(Arc, Rat)>,
    pub induced_supply: BTreeMap<usize, Rat>,
}

#[derive(Debug, Clone)]
pub struct ClassDecomposition {
    pub base: u64,
    pub scale: Rat,
    /// The network with one dummy node per capacity-jumping arc.
    pub ext: Network,
    pub ext_flow: PathFlow,
    /// Class per extended node; None for global sinks.
    pub class_of: Vec<Option<u32>>,
    /// For a dummy node, the original arc it subdivides.
    pub dummy_of: Vec<Option<Arc>>,
    /// Original arc for every extended edge.
    pub orig_arc: Vec<Arc>,
    pub classes: Vec<ClassNet>,
}

/// Splits a monotone network and a flow with node congestion at most 1 into classes.
pub fn decompose(net: &Network, f: &PathFlow, base: u64) -> Result<ClassDecomposition> {
    if flow_stats(net, f).node_congestion > Rat::from_integer(1.into()) {
        return Err(Error::Precondition(
            "flow has node congestion above 1".into(),
        ));
    }
    decompose_unchecked(net, f, base)
}

fn decompose_unchecked(net: &Network, f: &PathFlow, base: u64) -> Result<ClassDecomposition> {
    if !net.monotone {
        return Err(Error::Precondition(
            "network is not flagged monotone".into(),
        ));
    }
    crate::netcore::validate(net).map_err(|v| Error::Invalid(format!("{v:?}")))?;
    if base < 2 {
        return Err(Error::Precondition("base must be at least 2".into()));
    }
    let scale = (0..net.n())
        .filter(|&v| !net.is_sink(v))
        .filter_map(|v| net.node_cap(v).cloned())
        .min()
        .ok_or_else(|| Error::Precondition("no capacitated node".into()))?;
    let class = |g: &Network, v: usize| -> Option<u32> {
        if g.is_sink(v) {
            None
        } else {
            Some(ceil_log_base(&(g.node_cap(v).unwrap() / &scale), base))
        }
    };
    let mut ext = net.clone();
    let mut orig_arc: Vec<Arc> = (0..net.edges.len()).map(Arc::fwd).collect();
    let mut dummy_of: Vec<Option<Arc>> = vec![None; net.n()];
    let mut replace: BTreeMap<Arc, (Arc, Arc)> = BTreeMap::new();
    for a in net.arcs() {
        let (u, v) = (net.tail(a), net.head(a));
        let (Some(cu), Some(cv)) = (class(net, u), class(net, v)) else {
            continue;
        };
        if cv > cu + 1 {
            if !net.directed {
                return Err(Error::Precondition(
                    "capacity jump on an undirected edge".into(),
                ));
            }
            let name = format!("{}~{}#{}", net.nodes[u], net.nodes[v], a.edge);
            let d = ext.add_node(&name);
            ext.set_node_cap(d, &scale * pow_base(base, cu + 1));
            dummy_of.push(None);
            dummy_of[d] = Some(a);
            let e = &net.edges[a.edge];
            let e1 = ext.add_edge(u, d, e.cap.clone(), e.len);
            let e2 = ext.add_edge(d, v, e.cap.clone(), 0);
            orig_arc.push(a);
            orig_arc.push(a);
            replace.insert(a, (Arc::fwd(e1), Arc::fwd(e2)));
        }
    }
    let mut ext_entries = Vec::new();
    for (p, x) in &f.entries {
        let mut arcs = Vec::new();
        for a in &p.arcs {
            match replace.get(a) {
                Some((a1, a2)) => {
                    arcs.push(*a1);
                    arcs.push(*a2);
                }
                None => arcs.push(*a),
            }
        }
        ext_entries.push((Path::from_arcs(&ext, p.source(), arcs)?, x.clone()));
    }
    let ext_flow = PathFlow {
        entries: ext_entries,
    };
    let class_of: Vec<Option<u32>> = (0..ext.n())
        .map(|v| {
            if dummy_of[v].is_some() {
                Some(class(&ext, v).unwrap())
            } else {
                class(&ext, v)
            }
        })
        .collect();
    let top = class_of.iter().flatten().copied().max().unwrap_or(0);
    let loads = ext_flow.arc_loads(&ext);
    let mut classes = Vec::new();
    for i in 0..=top {
        let nodes: Vec<usize> = (0..ext.n())
            .filter(|&v| class_of[v] == Some(i) && dummy_of[v].is_none())
            .collect();
        let mut arcs = Vec::new();
        let mut sinks = Vec::new();
        for (a, x) in &loads {
            let u = ext.tail(*a);
            if class_of[u] == Some(i) && dummy_of[u].is_none() && x.is_positive() {
                arcs.push((*a, x.clone()));
                let w = ext.head(*a);
                if class_of[w] != Some(i) || dummy_of[w].is_some() {
                    if !sinks.contains(&w) {
                        sinks.push(w);
                    }
                }
            }
        }
        sinks.sort();
        let mut induced = BTreeMap::new();
        for &v in &nodes {
            let mut d = ext.supply[v].clone();
            for (a, x) in &loads {
                if ext.head(*a) != v {
                    continue;
                }
                let u = ext.tail(*a);
                let lower = dummy_of[u].is_some() || class_of[u].map_or(false, |c| c < i);
                if lower {
                    d += x;
                }
            }
            if d.is_positive() {
                induced.insert(v, d);
            }
        }
        classes.push(ClassNet {
            index: i,
            nodes,
            sinks,
            arcs,
            induced_supply: induced,
        });
    }
    Ok(ClassDecomposition {
        base,
        scale,
        ext,
        ext_flow,
        class_of,
        dummy_of,
        orig_arc,
        classes,
    })
}

#[derive(Debug, Clone)]
pub struct ClassStat {
    pub index: u32,
    pub nodes: usize,
    pub sources: usize,
    pub max_congestion: u64,
    pub trial: usize,
}

#[derive(Debug, Clone)]
pub struct MonotoneResult {
    pub routing: ConfluentRouting,
    pub flow: PathFlow,
    pub node_congestion: Rat,
    pub max_length: u64,
    pub base: u64,
    pub classes: Vec<ClassStat>,
}

fn class_seed(master: u64, i: u32) -> u64 {
    trial_rng(master, (1u64 << 40) | i as u64).next_u64()
}

fn round_classes(
    net: &Network,
    dec: &ClassDecomposition,
    trials: usize,
    seed: u64,
) -> Result<MonotoneResult> {
    let ext = &dec.ext;
    let mut ext_route = ConfluentRouting::empty(ext.n());
    let mut stats = Vec::new();
    for c in &dec.classes {
        if c.arcs.is_empty() {
            continue;
        }
        let mut fout: BTreeMap<usize, Rat> = BTreeMap::new();
        for (a, x) in &c.arcs {
            *fout.entry(ext.tail(*a)).or_insert_with(Rat::zero) += x;
        }
        let dag_arcs: Vec<DagArc> = c
            .arcs
            .iter()
            .map(|(a, x)| DagArc {
                from: ext.tail(*a),
                to: ext.head(*a),
                p: x / &fout[&ext.tail(*a)],
                base: Some(*a),
            })
            .collect();
        let mut supply = vec![Rat::zero(); ext.n()];
        for v in c.induced_supply.keys() {
            supply[*v] = Rat::from_integer(1.into());
        }
        let mut sink = vec![false; ext.n()];
        for &s in &c.sinks {
            sink[s] = true;
        }
        let dag = FlowDag::new(ext.n(), dag_arcs, supply, sink)?;
        let res = round_best(&dag, trials, class_seed(seed, c.index))?;
        for (v, ch) in res.choice.iter().enumerate() {
            if let Some(i) = ch {
                ext_route.out[v] = dag.arcs[*i].base;
            }
        }
        stats.push(ClassStat {
            index: c.index,
            nodes: c.nodes.len(),
            sources: c.induced_supply.len(),
            max_congestion: res.diagnostics.max_congestion,
            trial: res.trial,
        });
    }
    let mut routing = ConfluentRouting::empty(net.n());
    for v in 0..net.n() {
        if let Some(a) = ext_route.out[v] {
            routing.out[v] = Some(if a.edge < net.edges.len() {
                a
            } else {
                dec.orig_arc[a.edge]
            });
        }
    }
    routing.validate(net)?;
    let flow = routing_to_pathflow(net, &routing, &net.supply)?;
    let st = flow_stats(net, &flow);
    Ok(MonotoneResult {
        routing,
        flow,
        node_congestion: st.node_congestion,
        max_length: st.max_length,
        base: dec.base,
        classes: stats,
    })
}

/// Rounds a splittable flow with node congestion at most 1 into a confluent flow
/// routing all supplies.
pub fn route_monotone(
    net: &Network,
    f: &PathFlow,
    params: &MonotoneParams,
) -> Result<MonotoneResult> {
    let base = params.base.unwrap_or_else(|| default_base(net.n()));
    let dec = decompose(net, f, base)?;
    round_classes(net, &dec, params.trials, params.seed)
}

/// Variant without a given flow: a single-sink unsplittable flow with node congestion
/// at most 2 is computed on the node-split network, then rounded with base
/// `max(2, ceil(log^4 kappa))`. Needs `max supply <= min node capacity`.
pub fn route_monotone_relaxed(net: &Network, params: &MonotoneParams) -> Result<MonotoneResult> {
    if net.sinks.len() != 1 {
        return Err(Error::Precondition(
            "relaxed monotone routing needs a single sink".into(),
        ));
    }
    let cmin = (0..net.n())
        .filter(|&v| !net.is_sink(v))
        .filter_map(|v| net.node_cap(v).cloned())
        .min();
    if let Some(c) = cmin {
        if net.max_supply() > c {
            return Err(Error::Precondition(
                "max supply exceeds min node capacity".into(),
            ));
        }
    }
    let (split, map) = node_to_edge_capacitated(net);
    let uf = unsplittable_flow(&split, &split.supply)?;
    let f = map.flow_back(net, &uf);
    let base = params.base.unwrap_or_else(|| default_base(net.kappa()));
    let dec = decompose_unchecked(net, &f, base)?;
    round_classes(net, &dec, params.trials, params.seed)
}
