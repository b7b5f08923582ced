use num_traits::{Signed, Zero};

use crate::netcore::{ConfluentRouting, Network, Rat};

/// Greedy demand selection on a confluent tree: sources with `gamma > 0` in decreasing
/// demand order, each kept if every edge on its path still fits. Under the no-bottleneck
/// assumption the kept value is at least half of `sum gamma_i d_i` for any feasible `gamma`.
pub fn select_demands_on_tree(
    net: &Network,
    routing: &ConfluentRouting,
    demand: &[Rat],
    gamma: &[Rat],
) -> Vec<usize> {
    let mut cand: Vec<usize> = (0..net.n())
        .filter(|&v| gamma[v].is_positive() && demand[v].is_positive())
        .collect();
    cand.sort_by(|a, b| demand[*b].cmp(&demand[*a]).then(a.cmp(b)));
    let mut load = vec![Rat::zero(); net.edges.len()];
    let mut out = Vec::new();
    for v in cand {
        let p = routing.path_from(net, v);
        if !net.is_sink(p.end()) {
            continue;
        }
        if p.arcs
            .iter()
            .all(|a| &load[a.edge] + &demand[v] <= net.edges[a.edge].cap)
        {
            for a in &p.arcs {
                load[a.edge] += &demand[v];
            }
            out.push(v);
        }
    }
    out.sort();
    out
}
