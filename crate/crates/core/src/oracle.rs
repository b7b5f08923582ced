//! Exhaustive solvers for small instances: every confluent tree is enumerated and
//! evaluated exactly.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::dynamic::{greedy_schedule, simulate, DynamicRouting, SimOptions};
use crate::netcore::rat::lcm_denoms;
use crate::netcore::{Arc, ConfluentRouting, Error, Network, Rat, Result};
use crate::staticflow::Dinic;

/// Upper limit on the product of out-degrees explored by the enumeration.
pub const TREE_GUARD: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_time: Option<u64>,
    pub best_value: Option<Rat>,
    pub best_routing: ConfluentRouting,
    pub instances_enumerated: usize,
}

/// Positive-supply nodes that can reach a sink.
fn coverable_sources(net: &Network) -> Vec<usize> {
    let dist = net.dist_to_sink();
    (0..net.n())
        .filter(|&v| net.supply[v].is_positive() && !net.is_sink(v) && dist[v].is_some())
        .collect()
}

fn choices(net: &Network) -> Vec<Vec<Arc>> {
    let dist = net.dist_to_sink();
    net.out_arcs()
        .into_iter()
        .enumerate()
        .map(|(v, arcs)| {
            if net.is_sink(v) {
                return vec![];
            }
            arcs.into_iter()
                .filter(|&a| dist[net.head(a)].is_some())
                .collect()
        })
        .collect()
}

fn guard(net: &Network, ch: &[Vec<Arc>], sources: &[usize]) -> Result<()> {
    let mut seen = vec![false; net.n()];
    let mut stack: Vec<usize> = sources.to_vec();
    for &s in sources {
        seen[s] = true;
    }
    let mut prod: u64 = 1;
    while let Some(v) = stack.pop() {
        prod = prod.saturating_mul(ch[v].len().max(1) as u64);
        if prod > TREE_GUARD {
            return Err(Error::Precondition(format!(
                "tree enumeration exceeds {TREE_GUARD} assignments"
            )));
        }
        for &a in &ch[v] {
            let w = net.head(a);
            if !seen[w] && !net.is_sink(w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    Ok(())
}

/// Calls `f` once for every confluent tree covering the positive-supply nodes that can
/// reach a sink. Only nodes on paths from those sources are assigned an out-arc.
pub fn for_each_confluent_tree(net: &Network, f: &mut dyn FnMut(&ConfluentRouting)) -> Result<()> {
    let sources = coverable_sources(net);
    let ch = choices(net);
    guard(net, &ch, &sources)?;
    let mut r = ConfluentRouting::empty(net.n());
    let pending: BTreeSet<usize> = sources.into_iter().collect();
    rec(net, &ch, &mut r, pending, f);
    Ok(())
}

fn rec(
    net: &Network,
    ch: &[Vec<Arc>],
    r: &mut ConfluentRouting,
    mut pending: BTreeSet<usize>,
    f: &mut dyn FnMut(&ConfluentRouting),
) {
    let Some(p) = pending.pop_first() else {
        f(r);
        return;
    };
    for &a in &ch[p] {
        let w = net.head(a);
        let mut x = w;
        while let Some(b) = r.out[x] {
            x = net.head(b);
        }
        if x == p {
            continue;
        }
        r.out[p] = Some(a);
        let mut next = pending.clone();
        if !net.is_sink(w) && r.out[w].is_none() {
            next.insert(w);
        }
        rec(net, ch, r, next, f);
        r.out[p] = None;
    }
}

pub fn enumerate_confluent_trees(net: &Network) -> Result<Vec<ConfluentRouting>> {
    let mut out = Vec::new();
    for_each_confluent_tree(net, &mut |r| out.push(r.clone()))?;
    Ok(out)
}

fn unroutable(net: &Network) -> Result<()> {
    let dist = net.dist_to_sink();
    match (0..net.n()).find(|&v| net.supply[v].is_positive() && dist[v].is_none()) {
        Some(v) => Err(Error::Infeasible(format!(
            "sink unreachable from source {}",
            net.nodes[v]
        ))),
        None => Ok(()),
    }
}

/// Minimum over confluent trees of the greedy schedule's makespan.
pub fn oracle_quickest(net: &Network) -> Result<OracleResult> {
    unroutable(net)?;
    let trees = enumerate_confluent_trees(net)?;
    let times: Vec<Result<u64>> = trees
        .par_iter()
        .map(|r| {
            let (_, tr) = greedy_schedule(net, r)?;
            tr.makespan
                .ok_or_else(|| Error::HorizonExceeded("greedy schedule did not finish".into()))
        })
        .collect();
    let mut best: Option<(u64, usize)> = None;
    for (i, t) in times.into_iter().enumerate() {
        let t = t?;
        if best.map_or(true, |b| t < b.0) {
            best = Some((t, i));
        }
    }
    let (t, i) = best.ok_or_else(|| Error::Infeasible("no confluent tree".into()))?;
    Ok(OracleResult {
        best_time: Some(t),
        best_value: None,
        best_routing: trees[i].clone(),
        instances_enumerated: trees.len(),
    })
}

/// Maximum over confluent trees of the amount the greedy schedule delivers by step `t`.
pub fn oracle_maxflow_over_time(net: &Network, t: u64) -> Result<OracleResult> {
    let trees = enumerate_confluent_trees(net)?;
    let vals: Vec<Result<Rat>> = trees
        .par_iter()
        .map(|r| {
            let dr = DynamicRouting::greedy(net, r.clone(), &net.supply);
            Ok(simulate(net, &dr, t, SimOptions::default())?.delivered_by(t))
        })
        .collect();
    let mut best: Option<(Rat, usize)> = None;
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        if best.as_ref().map_or(true, |b| v > b.0) {
            best = Some((v, i));
        }
    }
    let (v, i) = best.ok_or_else(|| Error::Infeasible("no confluent tree".into()))?;
    Ok(OracleResult {
        best_time: None,
        best_value: Some(v),
        best_routing: trees[i].clone(),
        instances_enumerated: trees.len(),
    })
}

/// Largest total demand of a source subset routable on one confluent tree with edge
/// congestion at most 1.
pub fn oracle_demand_max(net: &Network) -> Result<OracleResult> {
    let sources = coverable_sources(net);
    if sources.len() > 16 {
        return Err(Error::Precondition(
            "demand oracle supports at most 16 sources".into(),
        ));
    }
    let trees = enumerate_confluent_trees(net)?;
    let results: Vec<(Rat, u32)> = trees
        .par_iter()
        .map(|r| {
            let paths: Vec<Vec<usize>> = sources
                .iter()
                .map(|&s| r.path_from(net, s).arcs.iter().map(|a| a.edge).collect())
                .collect();
            let mut best = (Rat::zero(), 0u32);
            for mask in 0u32..(1 << sources.len()) {
                let mut load = vec![Rat::zero(); net.edges.len()];
                let mut val = Rat::zero();
                for (i, &s) in sources.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        val += &net.supply[s];
                        for &e in &paths[i] {
                            load[e] += &net.supply[s];
                        }
                    }
                }
                if val > best.0 && load.iter().zip(&net.edges).all(|(l, e)| *l <= e.cap) {
                    best = (val, mask);
                }
            }
            best
        })
        .collect();
    let mut best: Option<(Rat, usize, u32)> = None;
    for (i, (v, m)) in results.into_iter().enumerate() {
        if best.as_ref().map_or(true, |b| v > b.0) {
            best = Some((v, i, m));
        }
    }
    let (v, i, m) = best.ok_or_else(|| Error::Infeasible("no confluent tree".into()))?;
    let kept: Vec<usize> = sources
        .iter()
        .enumerate()
        .filter(|(j, _)| m >> j & 1 == 1)
        .map(|(_, &s)| s)
        .collect();
    Ok(OracleResult {
        best_time: None,
        best_value: Some(v),
        best_routing: trees[i].restrict_to(net, &kept),
        instances_enumerated: trees.len(),
    })
}

/// Whether all supply can reach the sink by step `t` using only the arcs of `r`, in the
/// time-expanded network with unlimited holdover at nodes.
pub fn tree_feasible_by(net: &Network, r: &ConfluentRouting, t: u64) -> bool {
    let n = net.n();
    let layers = t as usize + 1;
    let id = |v: usize, k: usize| v * layers + k;
    let src = n * layers;
    let snk = src + 1;
    let scale = lcm_denoms(net.edges.iter().map(|e| &e.cap).chain(net.supply.iter()));
    let to_int = |x: &Rat| (x * Rat::from_integer(scale.clone())).to_integer();
    let total: BigInt = net.supply.iter().map(&to_int).sum();
    if total.is_zero() {
        return true;
    }
    let mut d = Dinic::new(src + 2);
    for v in 0..n {
        for k in 0..layers {
            if k + 1 < layers {
                d.add(id(v, k), id(v, k + 1), total.clone());
            }
            if net.is_sink(v) {
                d.add(id(v, k), snk, total.clone());
            }
        }
        if net.supply[v].is_positive() {
            d.add(src, id(v, 0), to_int(&net.supply[v]));
        }
        if let Some(a) = r.out[v] {
            let w = net.head(a);
            let l = net.len(a) as usize;
            for k in 0..layers.saturating_sub(l) {
                d.add(id(v, k), id(w, k + l), to_int(net.cap(a)));
            }
        }
    }
    d.run(src, snk) == total
}

/// Second quickest oracle: for every tree, the smallest horizon at which the
/// time-expanded network carries all supply, minimised over trees.
pub fn oracle_quickest_time_expanded(net: &Network) -> Result<OracleResult> {
    unroutable(net)?;
    let trees = enumerate_confluent_trees(net)?;
    let times: Vec<u64> = trees
        .par_iter()
        .map(|r| {
            let used: Vec<usize> = (0..net.n())
                .filter(|&v| net.supply[v].is_positive())
                .collect();
            let r = r.restrict_to(net, &used);
            let mut lo = 0u64;
            if tree_feasible_by(net, &r, 0) {
                return 0;
            }
            let mut hi = 1u64;
            while !tree_feasible_by(net, &r, hi) {
                lo = hi;
                hi *= 2;
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if tree_feasible_by(net, &r, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        })
        .collect();
    let (i, &t) = times
        .iter()
        .enumerate()
        .min_by_key(|(i, t)| (**t, *i))
        .ok_or_else(|| Error::Infeasible("no confluent tree".into()))?;
    Ok(OracleResult {
        best_time: Some(t),
        best_value: None,
        best_routing: trees[i].clone(),
        instances_enumerated: trees.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::rat::rat;

    fn diamond(block: bool) -> Network {
        let mut g = Network::new(true);
        for x in ["s", "a", "b", "t"] {
            g.add_node(x);
        }
        g.add_edge(0, 1, rat(1), 1);
        g.add_edge(0, 2, rat(1), 1);
        g.add_edge(1, 3, rat(1), 1);
        g.add_edge(
            2,
            3,
            if block { rat(1) } else { rat(4) },
            if block { 20 } else { 1 },
        );
        g.add_sink(3);
        g.supply[0] = rat(4);
        g
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_confluent_trees(&diamond(false)).unwrap().len(), 2);
        let mut g = Network::new(true);
        for x in ["a", "b", "t"] {
            g.add_node(x);
        }
        g.add_edge(0, 1, rat(1), 1);
        g.add_edge(1, 2, rat(1), 1);
        g.add_sink(2);
        g.supply[0] = rat(1);
        assert_eq!(enumerate_confluent_trees(&g).unwrap().len(), 1);
    }

    #[test]
    fn quickest_on_diamond() {
        let g = diamond(true);
        let o = oracle_quickest(&g).unwrap();
        assert_eq!(o.best_time, Some(5));
        assert_eq!(o.best_routing.out[0], Some(Arc::fwd(0)));
        assert_eq!(
            oracle_quickest_time_expanded(&g).unwrap().best_time,
            Some(5)
        );
    }

    #[test]
    fn maxflow_over_time_single_edge() {
        let mut g = Network::new(true);
        g.add_node("s");
        g.add_node("t");
        g.add_edge(0, 1, rat(1), 1);
        g.add_sink(1);
        g.supply[0] = rat(100);
        assert_eq!(
            oracle_maxflow_over_time(&g, 10).unwrap().best_value,
            Some(rat(10))
        );
        assert_eq!(
            oracle_maxflow_over_time(&g, 0).unwrap().best_value,
            Some(rat(0))
        );
        g.supply[0] = rat(1);
        g.add_node("u");
        g.supply[2] = rat(1);
        g.add_edge(2, 0, rat(1), 1);
        assert_eq!(oracle_demand_max(&g).unwrap().best_value, Some(rat(1)));
    }
}
