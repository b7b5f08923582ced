use num_traits::{One, Signed, Zero};

use super::network::{Arc, Network};
use super::rat::Rat;
use super::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<usize>,
    pub arcs: Vec<Arc>,
}

impl Path {
    pub fn from_arcs(net: &Network, start: usize, arcs: Vec<Arc>) -> Result<Path> {
        let mut nodes = vec![start];
        for &a in &arcs {
            if net.tail(a) != *nodes.last().unwrap() {
                return Err(Error::Invalid(format!(
                    "arc {:?} does not continue the path",
                    a
                )));
            }
            nodes.push(net.head(a));
        }
        Ok(Path { nodes, arcs })
    }

    pub fn source(&self) -> usize {
        self.nodes[0]
    }

    pub fn end(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    pub fn length(&self, net: &Network) -> u64 {
        self.arcs.iter().map(|&a| net.len(a)).sum()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.nodes.iter().all(|v| seen.insert(*v))
    }

    /// Removes cycles, keeping the last visit of every node.
    pub fn shortcut(&self) -> Path {
        let mut nodes: Vec<usize> = Vec::new();
        let mut arcs: Vec<Arc> = Vec::new();
        for (i, &v) in self.nodes.iter().enumerate() {
            if let Some(p) = nodes.iter().position(|&x| x == v) {
                nodes.truncate(p + 1);
                arcs.truncate(p);
            } else {
                if i > 0 {
                    arcs.push(self.arcs[i - 1]);
                }
                nodes.push(v);
            }
        }
        Path { nodes, arcs }
    }
}

/// Paths with values. Each path starts at a source and ends at a sink.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathFlow {
    pub entries: Vec<(Path, Rat)>,
}

impl PathFlow {
    pub fn value(&self) -> Rat {
        self.entries.iter().fold(Rat::zero(), |a, (_, x)| a + x)
    }

    /// Flow per edge; the two directions of an undirected edge add up.
    pub fn edge_loads(&self, net: &Network) -> Vec<Rat> {
        let mut load = vec![Rat::zero(); net.edges.len()];
        for (p, x) in &self.entries {
            for a in &p.arcs {
                load[a.edge] += x;
            }
        }
        load
    }

    pub fn arc_loads(&self, net: &Network) -> std::collections::BTreeMap<Arc, Rat> {
        let _ = net;
        let mut m = std::collections::BTreeMap::new();
        for (p, x) in &self.entries {
            for a in &p.arcs {
                *m.entry(*a).or_insert_with(Rat::zero) += x;
            }
        }
        m
    }

    /// Flow leaving each node, including its own supply.
    pub fn node_outflow(&self, net: &Network) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); net.n()];
        for (p, x) in &self.entries {
            for a in &p.arcs {
                out[net.tail(*a)] += x;
            }
        }
        out
    }

    pub fn source_values(&self, net: &Network) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); net.n()];
        for (p, x) in &self.entries {
            v[p.source()] += x;
        }
        v
    }

    pub fn scaled(&self, s: &Rat) -> PathFlow {
        PathFlow {
            entries: self
                .entries
                .iter()
                .map(|(p, x)| (p.clone(), x * s))
                .collect(),
        }
    }
}

/// One chosen out-arc per node (None for sinks and unused nodes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluentRouting {
    pub out: Vec<Option<Arc>>,
}

impl ConfluentRouting {
    pub fn empty(n: usize) -> ConfluentRouting {
        ConfluentRouting { out: vec![None; n] }
    }

    /// Checks tails, sink rules and acyclicity, and that every routed node reaches a sink.
    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.out.len() != net.n() {
            return Err(Error::NotConfluent(
                "routing size differs from node count".into(),
            ));
        }
        for (v, a) in self.out.iter().enumerate() {
            if let Some(a) = a {
                if a.edge >= net.edges.len() || (net.directed && a.rev) {
                    return Err(Error::NotConfluent(format!("bad arc at {}", net.nodes[v])));
                }
                if net.tail(*a) != v {
                    return Err(Error::NotConfluent(format!(
                        "arc chosen at {} does not leave it",
                        net.nodes[v]
                    )));
                }
                if net.is_sink(v) {
                    return Err(Error::NotConfluent(format!(
                        "sink {} has an out-arc",
                        net.nodes[v]
                    )));
                }
            }
        }
        // 0 unseen, 1 on current walk, 2 done and reaches a sink, 3 done and is an unrouted non-sink
        let mut state = vec![0u8; net.n()];
        for s in 0..net.n() {
            let mut walk = Vec::new();
            let mut v = s;
            let fin = loop {
                match state[v] {
                    1 => {
                        return Err(Error::Cycle(format!(
                            "routing cycles through {}",
                            net.nodes[v]
                        )))
                    }
                    2 | 3 => break state[v],
                    _ => {}
                }
                state[v] = 1;
                walk.push(v);
                match self.out[v] {
                    Some(a) => v = net.head(a),
                    None => break if net.is_sink(v) { 2 } else { 3 },
                }
            };
            if fin == 3 && self.out[s].is_some() {
                return Err(Error::NotConfluent(format!(
                    "{} is routed into {} which does not reach a sink",
                    net.nodes[s], net.nodes[v]
                )));
            }
            for w in walk {
                state[w] = fin;
            }
        }
        Ok(())
    }

    /// Path from `v` to the root of its tree.
    pub fn path_from(&self, net: &Network, v: usize) -> Path {
        let mut nodes = vec![v];
        let mut arcs = Vec::new();
        let mut x = v;
        while let Some(a) = self.out[x] {
            arcs.push(a);
            x = net.head(a);
            nodes.push(x);
            if nodes.len() > net.n() + 1 {
                break;
            }
        }
        Path { nodes, arcs }
    }

    /// Amount passing through each node when every node sends `supply[v]`.
    pub fn node_loads(&self, net: &Network, supply: &[Rat]) -> Vec<Rat> {
        let mut load = vec![Rat::zero(); net.n()];
        for v in 0..net.n() {
            if supply[v].is_positive() {
                for x in self.path_from(net, v).nodes {
                    load[x] += &supply[v];
                }
            }
        }
        load
    }

    pub fn routed_nodes(&self) -> Vec<usize> {
        (0..self.out.len())
            .filter(|&v| self.out[v].is_some())
            .collect()
    }

    /// Keeps only the arcs on paths from the given nodes.
    pub fn restrict_to(&self, net: &Network, from: &[usize]) -> ConfluentRouting {
        let mut r = ConfluentRouting::empty(net.n());
        for &s in from {
            let p = self.path_from(net, s);
            for (i, a) in p.arcs.iter().enumerate() {
                r.out[p.nodes[i]] = Some(*a);
            }
        }
        r
    }
}

/// Source paths of a routing, one per positive-supply node in `supply`.
pub fn routing_paths(net: &Network, r: &ConfluentRouting, supply: &[Rat]) -> Vec<Path> {
    (0..net.n())
        .filter(|&v| supply[v].is_positive())
        .map(|v| r.path_from(net, v))
        .collect()
}

/// The routing as a path flow carrying `supply[v]` from each node that has it.
/// Fails if a supply node does not reach a sink.
pub fn routing_to_pathflow(
    net: &Network,
    r: &ConfluentRouting,
    supply: &[Rat],
) -> Result<PathFlow> {
    let mut entries = Vec::new();
    for v in 0..net.n() {
        if supply[v].is_positive() {
            let p = r.path_from(net, v);
            if !net.is_sink(p.end()) {
                return Err(Error::NotConfluent(format!(
                    "{} does not reach a sink",
                    net.nodes[v]
                )));
            }
            entries.push((p, supply[v].clone()));
        }
    }
    Ok(PathFlow { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowStats {
    pub value: Rat,
    pub edge_congestion: Rat,
    /// Node congestion over non-sink nodes; nodes without a capacity count as capacity 1.
    pub node_congestion: Rat,
    pub max_length: u64,
    pub edge_loads: Vec<Rat>,
    pub node_outflow: Vec<Rat>,
}

pub fn flow_stats(net: &Network, f: &PathFlow) -> FlowStats {
    let edge_loads = f.edge_loads(net);
    let node_outflow = f.node_outflow(net);
    let mut ec = Rat::zero();
    for (e, l) in edge_loads.iter().enumerate() {
        let c = l / &net.edges[e].cap;
        if c > ec {
            ec = c;
        }
    }
    let mut nc = Rat::zero();
    for (v, o) in node_outflow.iter().enumerate() {
        if net.is_sink(v) {
            continue;
        }
        let c = match net.node_cap(v) {
            Some(c) => o / c,
            None => o / Rat::one(),
        };
        if c > nc {
            nc = c;
        }
    }
    let max_length = f
        .entries
        .iter()
        .filter(|(_, x)| x.is_positive())
        .map(|(p, _)| p.length(net))
        .max()
        .unwrap_or(0);
    FlowStats {
        value: f.value(),
        edge_congestion: ec,
        node_congestion: nc,
        max_length,
        edge_loads,
        node_outflow,
    }
}
