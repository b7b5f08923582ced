//! Static flows: max flow, length-bounded flow, decomposition, node splitting and
//! single-sink unsplittable flow.

mod lp;
mod maxflow;
mod pricing;
mod unsplittable;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::netcore::rat::lcm_denoms;
use crate::netcore::{Arc, Error, Network, Path, PathFlow, Rat, Result};

pub use lp::PackingLp;
pub use maxflow::Dinic;
pub use pricing::best_paths;
pub use unsplittable::unsplittable_flow;

/// Maximum flow from the nodes with `caps[v] > 0` (each limited to `caps[v]`) to the
/// sinks, respecting edge capacities. Node capacities are ignored; split nodes first.
pub fn max_flow(net: &Network, caps: &[Rat]) -> Result<PathFlow> {
    let n = net.n();
    let scale = lcm_denoms(net.edges.iter().map(|e| &e.cap).chain(caps.iter()));
    let to_int = |x: &Rat| (x * Rat::from_integer(scale.clone())).to_integer();
    let s = n;
    let t = n + 1;
    let mut d = Dinic::new(n + 2);
    let mut arc_ids = Vec::new();
    for a in net.arcs() {
        let id = d.add(net.tail(a), net.head(a), to_int(net.cap(a)));
        arc_ids.push((a, id));
    }
    let mut total = BigInt::zero();
    for v in 0..n {
        if caps[v].is_positive() && !net.is_sink(v) {
            let c = to_int(&caps[v]);
            total += &c;
            d.add(s, v, c);
        }
    }
    for &k in &net.sinks {
        d.add(k, t, total.clone() + 1);
    }
    d.run(s, t);
    let mut per_edge: HashMap<usize, BigInt> = HashMap::new();
    let mut flows = BTreeMap::new();
    for (a, id) in &arc_ids {
        let f = d.flow(*id);
        let signed = if a.rev { -f } else { f };
        *per_edge.entry(a.edge).or_insert_with(BigInt::zero) += signed;
    }
    for (e, f) in per_edge {
        if f.is_zero() {
            continue;
        }
        let (a, x) = if f.is_positive() {
            (
                Arc {
                    edge: e,
                    rev: false,
                },
                f,
            )
        } else {
            (Arc { edge: e, rev: true }, -f)
        };
        flows.insert(a, Rat::new(x, scale.clone()));
    }
    decompose(net, &flows)
}

/// Splits arc flows into source-sink paths and drops cycles. Sources are the
/// non-sink nodes with positive excess (outflow minus inflow).
pub fn decompose(net: &Network, flows: &BTreeMap<Arc, Rat>) -> Result<PathFlow> {
    let mut rem: BTreeMap<Arc, Rat> = flows
        .iter()
        .filter(|(_, x)| x.is_positive())
        .map(|(a, x)| (*a, x.clone()))
        .collect();
    let mut excess = vec![Rat::zero(); net.n()];
    for (a, x) in &rem {
        excess[net.tail(*a)] += x;
        excess[net.head(*a)] -= x;
    }
    for v in 0..net.n() {
        if !net.is_sink(v) && excess[v].is_negative() {
            return Err(Error::Precondition(format!(
                "flow is not conserved at {}",
                net.nodes[v]
            )));
        }
    }
    let mut out_of: Vec<Vec<Arc>> = vec![Vec::new(); net.n()];
    for a in rem.keys() {
        out_of[net.tail(*a)].push(*a);
    }
    let mut entries: Vec<(Path, Rat)> = Vec::new();
    loop {
        let Some(s) = (0..net.n()).find(|&v| !net.is_sink(v) && excess[v].is_positive()) else {
            break;
        };
        let mut nodes = vec![s];
        let mut arcs: Vec<Arc> = Vec::new();
        loop {
            let v = *nodes.last().unwrap();
            if net.is_sink(v) {
                break;
            }
            let Some(&a) = out_of[v]
                .iter()
                .find(|a| rem.get(a).map_or(false, |x| x.is_positive()))
            else {
                return Err(Error::Precondition(format!(
                    "flow is not conserved at {}",
                    net.nodes[v]
                )));
            };
            let w = net.head(a);
            if let Some(p) = nodes.iter().position(|&x| x == w) {
                let mut cyc: Vec<Arc> = arcs[p..].to_vec();
                cyc.push(a);
                let m = cyc.iter().map(|c| rem[c].clone()).min().unwrap();
                for c in &cyc {
                    *rem.get_mut(c).unwrap() -= &m;
                }
                nodes.truncate(p + 1);
                arcs.truncate(p);
                continue;
            }
            arcs.push(a);
            nodes.push(w);
        }
        let mut m = excess[s].clone();
        for a in &arcs {
            if rem[a] < m {
                m = rem[a].clone();
            }
        }
        for a in &arcs {
            *rem.get_mut(a).unwrap() -= &m;
        }
        excess[s] -= &m;
        let t = *nodes.last().unwrap();
        excess[t] += &m;
        let path = Path { nodes, arcs };
        if let Some(e) = entries.iter_mut().find(|(p, _)| *p == path) {
            e.1 += m;
        } else {
            entries.push((path, m));
        }
    }
    Ok(PathFlow { entries })
}

/// Largest flow from nodes with `caps[v] > 0` to the sinks along paths of length at most
/// `budget`. Solved exactly as a path LP with column generation. With `node_caps`
/// set, node capacities bound each node's outflow as well.
pub fn length_bounded_max_flow(
    net: &Network,
    caps: &[Rat],
    budget: Option<u64>,
    node_caps: bool,
) -> PathFlow {
    let m = net.edges.len();
    let n = net.n();
    let budget = budget.unwrap_or(u64::MAX);
    let node_res = |v: usize| -> Option<usize> {
        if node_caps && !net.is_sink(v) && net.node_cap(v).is_some() {
            Some(m + v)
        } else {
            None
        }
    };
    let cap_of = |r: usize| -> Rat {
        if r < m {
            net.edges[r].cap.clone()
        } else if r < m + n {
            net.node_cap(r - m).cloned().unwrap_or_else(Rat::one)
        } else {
            caps[r - m - n].clone()
        }
    };
    let sources: Vec<usize> = (0..n)
        .filter(|&v| caps[v].is_positive() && !net.is_sink(v))
        .collect();
    let mut lp = PackingLp::new();
    let mut paths: Vec<Path> = Vec::new();
    loop {
        lp.optimize_existing();
        let y = lp.duals();
        let dual = |r: usize| y.get(&r).cloned().unwrap_or_else(Rat::zero);
        let weight = |a: Arc| {
            let mut w = dual(a.edge);
            if let Some(r) = node_res(net.tail(a)) {
                w += dual(r);
            }
            w
        };
        let best = best_paths(net, &weight, budget);
        let mut added = false;
        for &s in &sources {
            let Some((w, p)) = &best[s] else { continue };
            let rc = Rat::one() - dual(m + n + s) - w;
            if rc.is_positive() {
                let mut entries: Vec<(usize, Rat)> =
                    p.arcs.iter().map(|a| (a.edge, Rat::one())).collect();
                for &v in &p.nodes[..p.nodes.len() - 1] {
                    if let Some(r) = node_res(v) {
                        entries.push((r, Rat::one()));
                    }
                }
                entries.push((m + n + s, Rat::one()));
                lp.add_column(&entries, Rat::one(), &cap_of);
                paths.push(p.clone());
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    let entries = lp
        .solution()
        .into_iter()
        .map(|(j, x)| (paths[j].clone(), x))
        .collect();
    PathFlow { entries }
}

/// A splittable flow routing every `demands[v]` with edge congestion at most 1 and all
/// paths of length at most `budget`, or `Infeasible`.
pub fn length_bounded_flow(
    net: &Network,
    demands: &[Rat],
    budget: Option<u64>,
) -> Result<PathFlow> {
    let f = length_bounded_max_flow(net, demands, budget, false);
    let need: Rat = demands.iter().fold(Rat::zero(), |a, b| a + b);
    if f.value() < need {
        return Err(Error::Infeasible(format!(
            "length-bounded flow routes {} of {}",
            crate::netcore::rat::fmt_rat(&f.value()),
            crate::netcore::rat::fmt_rat(&need)
        )));
    }
    Ok(f)
}

/// Correspondence between a network and its node-split version.
#[derive(Debug, Clone)]
pub struct SplitMap {
    pub v_in: Vec<usize>,
    pub v_out: Vec<usize>,
    /// Split edge `v_in -> v_out` per original node, when it was split.
    pub split_edge: Vec<Option<usize>>,
    /// Original arc per edge of the split network (None for split edges).
    pub orig: Vec<Option<Arc>>,
}

impl SplitMap {
    /// Maps a path of the split network back to the original network.
    pub fn path_back(&self, net: &Network, p: &Path) -> Path {
        let arcs: Vec<Arc> = p.arcs.iter().filter_map(|a| self.orig[a.edge]).collect();
        let start = self
            .v_in
            .iter()
            .position(|&x| x == p.source())
            .or_else(|| self.v_out.iter().position(|&x| x == p.source()))
            .unwrap();
        Path::from_arcs(net, start, arcs).expect("split path maps back")
    }

    pub fn flow_back(&self, net: &Network, f: &PathFlow) -> PathFlow {
        let mut entries: Vec<(Path, Rat)> = Vec::new();
        for (p, x) in &f.entries {
            let q = self.path_back(net, p);
            if let Some(e) = entries.iter_mut().find(|(r, _)| *r == q) {
                e.1 += x;
            } else {
                entries.push((q, x.clone()));
            }
        }
        PathFlow { entries }
    }
}

/// Replaces every capacitated non-sink node `v` by `v_in -> v_out` with capacity `c(v)`
/// and gives each arc `(u, v)` capacity `min(c(e), c(u), c(v))`. The result is directed.
/// Supplies sit on `v_in`.
pub fn node_to_edge_capacitated(net: &Network) -> (Network, SplitMap) {
    let mut g = Network::new(true);
    let n = net.n();
    let mut v_in = vec![0; n];
    let mut v_out = vec![0; n];
    let mut split_edge = vec![None; n];
    let mut orig = Vec::new();
    for v in 0..n {
        let split = !net.is_sink(v) && net.node_cap(v).is_some();
        if split {
            v_in[v] = g.add_node(&format!("{}#in", net.nodes[v]));
            v_out[v] = g.add_node(&format!("{}#out", net.nodes[v]));
            let e = g.add_edge(v_in[v], v_out[v], net.node_cap(v).unwrap().clone(), 0);
            orig.push(None);
            split_edge[v] = Some(e);
        } else {
            v_in[v] = g.add_node(&net.nodes[v]);
            v_out[v] = v_in[v];
        }
        g.supply[v_in[v]] = net.supply[v].clone();
        if net.is_sink(v) {
            g.add_sink(v_in[v]);
        }
    }
    for a in net.arcs() {
        let (u, v) = (net.tail(a), net.head(a));
        let mut c = net.cap(a).clone();
        for x in [u, v] {
            if let Some(cx) = net.node_cap(x) {
                if !net.is_sink(x) && *cx < c {
                    c = cx.clone();
                }
            }
        }
        g.add_edge(v_out[u], v_in[v], c, net.len(a));
        orig.push(Some(a));
    }
    (
        g,
        SplitMap {
            v_in,
            v_out,
            split_edge,
            orig,
        },
    )
}
