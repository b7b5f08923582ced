use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::rat::Rat;
use super::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cap: Rat,
    pub len: u64,
}

/// An edge traversed in a direction. `rev` is only meaningful for undirected edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub edge: usize,
    pub rev: bool,
}

impl Arc {
    pub fn fwd(edge: usize) -> Arc {
        Arc { edge, rev: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub directed: bool,
    pub monotone: bool,
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub supply: Vec<Rat>,
    pub sinks: Vec<usize>,
    pub node_caps: Option<Vec<Option<Rat>>>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub element: String,
    pub message: String,
}

impl Network {
    pub fn new(directed: bool) -> Network {
        Network {
            directed,
            monotone: false,
            nodes: Vec::new(),
            edges: Vec::new(),
            supply: Vec::new(),
            sinks: Vec::new(),
            node_caps: None,
            index: HashMap::new(),
        }
    }

    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.supply.push(Rat::zero());
        if let Some(c) = self.node_caps.as_mut() {
            c.push(None);
        }
        i
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: Rat, len: u64) -> usize {
        self.edges.push(Edge { u, v, cap, len });
        self.edges.len() - 1
    }

    pub fn add_sink(&mut self, v: usize) {
        if !self.sinks.contains(&v) {
            self.sinks.push(v);
        }
    }

    pub fn set_node_cap(&mut self, v: usize, cap: Rat) {
        let n = self.nodes.len();
        let caps = self.node_caps.get_or_insert_with(|| vec![None; n]);
        caps.resize(n, None);
        caps[v] = Some(cap);
    }

    pub fn node_cap(&self, v: usize) -> Option<&Rat> {
        self.node_caps
            .as_ref()
            .and_then(|c| c.get(v))
            .and_then(|c| c.as_ref())
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.sinks.contains(&v)
    }

    pub fn sink_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n()];
        for &s in &self.sinks {
            m[s] = true;
        }
        m
    }

    /// Nodes with positive supply, in index order.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| self.supply[v].is_positive())
            .collect()
    }

    pub fn kappa(&self) -> usize {
        self.sources().len()
    }

    pub fn total_supply(&self) -> Rat {
        self.supply.iter().fold(Rat::zero(), |a, b| a + b)
    }

    pub fn tail(&self, a: Arc) -> usize {
        let e = &self.edges[a.edge];
        if a.rev {
            e.v
        } else {
            e.u
        }
    }

    pub fn head(&self, a: Arc) -> usize {
        let e = &self.edges[a.edge];
        if a.rev {
            e.u
        } else {
            e.v
        }
    }

    pub fn cap(&self, a: Arc) -> &Rat {
        &self.edges[a.edge].cap
    }

    pub fn len(&self, a: Arc) -> u64 {
        self.edges[a.edge].len
    }

    /// All arcs: one per directed edge, two per undirected edge.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::with_capacity(self.edges.len() * 2);
        for e in 0..self.edges.len() {
            out.push(Arc {
                edge: e,
                rev: false,
            });
            if !self.directed {
                out.push(Arc { edge: e, rev: true });
            }
        }
        out
    }

    /// Outgoing arcs per node, in edge order.
    pub fn out_arcs(&self) -> Vec<Vec<Arc>> {
        let mut out = vec![Vec::new(); self.n()];
        for a in self.arcs() {
            out[self.tail(a)].push(a);
        }
        out
    }

    pub fn in_arcs(&self) -> Vec<Vec<Arc>> {
        let mut inc = vec![Vec::new(); self.n()];
        for a in self.arcs() {
            inc[self.head(a)].push(a);
        }
        inc
    }

    pub fn min_cap(&self) -> Option<Rat> {
        self.edges.iter().map(|e| e.cap.clone()).min()
    }

    pub fn max_supply(&self) -> Rat {
        super::rat::max_rat(self.supply.iter())
    }

    /// Shortest length from each node to the nearest sink (None if unreachable).
    pub fn dist_to_sink(&self) -> Vec<Option<u64>> {
        let inc = self.in_arcs();
        let mut dist: Vec<Option<u64>> = vec![None; self.n()];
        let mut heap = std::collections::BinaryHeap::new();
        for &t in &self.sinks {
            dist[t] = Some(0);
            heap.push(std::cmp::Reverse((0u64, t)));
        }
        while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
            if dist[v] != Some(d) {
                continue;
            }
            for &a in &inc[v] {
                let u = self.tail(a);
                let nd = d + self.len(a);
                if dist[u].map_or(true, |x| nd < x) {
                    dist[u] = Some(nd);
                    heap.push(std::cmp::Reverse((nd, u)));
                }
            }
        }
        dist
    }

    /// Copy with all supplies replaced.
    pub fn with_supply(&self, supply: Vec<Rat>) -> Network {
        let mut g = self.clone();
        g.supply = supply;
        g
    }

    pub fn rebuild_index(&mut self) {
        self.index = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
    }
}

/// Checks the network invariants and returns every violation found.
pub fn validate(net: &Network) -> std::result::Result<(), Vec<Violation>> {
    let mut bad = Vec::new();
    let mut push = |element: String, message: &str| {
        bad.push(Violation {
            element,
            message: message.to_string(),
        })
    };
    if net.sinks.is_empty() {
        push("sinks".into(), "at least one sink is required");
    }
    let mut seen = HashMap::new();
    for (i, name) in net.nodes.iter().enumerate() {
        if let Some(j) = seen.insert(name.clone(), i) {
            push(
                format!("node {name}"),
                &format!("duplicate name (also index {j})"),
            );
        }
    }
    for (i, e) in net.edges.iter().enumerate() {
        let el = format!("edge {i} ({} -> {})", net.nodes[e.u], net.nodes[e.v]);
        if e.u == e.v {
            push(el.clone(), "self-loop");
        }
        if !e.cap.is_positive() {
            push(el, "capacity must be positive");
        }
    }
    for (v, d) in net.supply.iter().enumerate() {
        if d.is_negative() {
            push(format!("node {}", net.nodes[v]), "negative supply");
        }
        if d.is_positive() && net.is_sink(v) {
            push(format!("node {}", net.nodes[v]), "sink carries supply");
        }
    }
    if let Some(caps) = &net.node_caps {
        for (v, c) in caps.iter().enumerate() {
            if let Some(c) = c {
                if !c.is_positive() {
                    push(
                        format!("node {}", net.nodes[v]),
                        "node capacity must be positive",
                    );
                }
            }
        }
    }
    if net.monotone {
        for a in net.arcs() {
            let (u, v) = (net.tail(a), net.head(a));
            if net.is_sink(v) {
                continue;
            }
            match (net.node_cap(u), net.node_cap(v)) {
                (Some(cu), Some(cv)) if cu <= cv => {}
                (Some(_), Some(_)) => push(
                    format!("arc {} -> {}", net.nodes[u], net.nodes[v]),
                    "monotone network has a decreasing arc",
                ),
                _ => push(
                    format!("arc {} -> {}", net.nodes[u], net.nodes[v]),
                    "monotone network needs capacities on non-sink nodes",
                ),
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

pub(crate) fn check(net: &Network) -> Result<()> {
    validate(net).map_err(|v| {
        Error::Invalid(
            v.iter()
                .map(|x| format!("{}: {}", x.element, x.message))
                .collect::<Vec<_>>()
                .join("; "),
        )
    })
}
