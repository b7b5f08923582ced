//! Single-sink unsplittable flow with edge congestion at most 2 under the
//! no-bottleneck assumption.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use crate::netcore::{Arc, Error, Network, Path, PathFlow, Rat, Result};

const SEARCH_BUDGET: usize = 200_000;
const PATHS_PER_DEMAND: usize = 64;

/// Routes each `demands[v] > 0` on a single path to a sink with edge congestion at most 2.
/// Requires `max demand <= min capacity` and a feasible splittable flow.
pub fn unsplittable_flow(net: &Network, demands: &[Rat]) -> Result<PathFlow> {
    let dmax = crate::netcore::rat::max_rat(demands.iter());
    if dmax.is_zero() {
        return Ok(PathFlow::default());
    }
    if let Some(cmin) = net.min_cap() {
        if dmax > cmin {
            return Err(Error::Precondition(
                "max demand exceeds min capacity".into(),
            ));
        }
    }
    let f = super::max_flow(net, demands)?;
    let need = demands.iter().fold(Rat::zero(), |a, b| a + b);
    if f.value() < need {
        return Err(Error::Infeasible(
            "no splittable flow routes all demands".into(),
        ));
    }
    let loads = f.edge_loads(net);
    let support: BTreeSet<Arc> = f
        .entries
        .iter()
        .flat_map(|(p, _)| p.arcs.iter().copied())
        .collect();
    let mut order: Vec<usize> = (0..net.n()).filter(|&v| demands[v].is_positive()).collect();
    order.sort_by(|a, b| demands[*b].cmp(&demands[*a]).then(a.cmp(b)));

    let tight: Vec<Rat> = loads.iter().map(|l| l + &dmax).collect();
    let loose: Vec<Rat> = net
        .edges
        .iter()
        .map(|e| &e.cap * Rat::from_integer(2.into()))
        .collect();
    let all: BTreeSet<Arc> = net.arcs().into_iter().collect();
    for (allowed, bound) in [(&support, &tight), (&all, &loose)] {
        if let Some(paths) = assign(net, demands, &order, allowed, bound) {
            let entries = order
                .iter()
                .zip(paths)
                .map(|(&v, p)| (p, demands[v].clone()))
                .collect();
            return Ok(PathFlow { entries });
        }
    }
    Err(Error::Exhausted(
        "unsplittable search found no assignment".into(),
    ))
}

fn assign(
    net: &Network,
    demands: &[Rat],
    order: &[usize],
    allowed: &BTreeSet<Arc>,
    bound: &[Rat],
) -> Option<Vec<Path>> {
    let mut load = vec![Rat::zero(); net.edges.len()];
    let mut out = Vec::new();
    let mut ok = true;
    for &v in order {
        match widest(net, v, &demands[v], allowed, bound, &load) {
            Some(p) => {
                for a in &p.arcs {
                    load[a.edge] += &demands[v];
                }
                out.push(p);
            }
            None => {
                ok = false;
                break;
            }
        }
    }
    if ok {
        return Some(out);
    }
    let mut load = vec![Rat::zero(); net.edges.len()];
    let mut chosen = Vec::new();
    let mut steps = 0;
    if backtrack(
        net,
        demands,
        order,
        allowed,
        bound,
        &mut load,
        &mut chosen,
        &mut steps,
    ) {
        Some(chosen)
    } else {
        None
    }
}

/// Path maximising the minimum remaining slack `bound - load - d`.
fn widest(
    net: &Network,
    s: usize,
    d: &Rat,
    allowed: &BTreeSet<Arc>,
    bound: &[Rat],
    load: &[Rat],
) -> Option<Path> {
    let n = net.n();
    let mut out: Vec<Vec<Arc>> = vec![Vec::new(); n];
    for a in allowed {
        out[net.tail(*a)].push(*a);
    }
    let mut best: Vec<Option<Rat>> = vec![None; n];
    let mut pred: Vec<Option<Arc>> = vec![None; n];
    let mut done = vec![false; n];
    let big = bound.iter().fold(Rat::zero(), |a, b| a + b) + Rat::from_integer(1.into());
    best[s] = Some(big);
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if !done[v] && best[v].is_some() && pick.map_or(true, |p| best[v] > best[p]) {
                pick = Some(v);
            }
        }
        let Some(u) = pick else { break };
        done[u] = true;
        if net.is_sink(u) {
            let mut arcs = Vec::new();
            let mut x = u;
            while x != s {
                let a = pred[x].unwrap();
                arcs.push(a);
                x = net.tail(a);
            }
            arcs.reverse();
            return Path::from_arcs(net, s, arcs).ok();
        }
        let bu = best[u].clone().unwrap();
        for &a in &out[u] {
            let w = net.head(a);
            if done[w] {
                continue;
            }
            let slack = &bound[a.edge] - &load[a.edge] - d;
            if slack.is_negative() {
                continue;
            }
            let cand = if slack < bu { slack } else { bu.clone() };
            if best[w].as_ref().map_or(true, |b| cand > *b) {
                best[w] = Some(cand);
                pred[w] = Some(a);
            }
        }
    }
    None
}

fn simple_paths(
    net: &Network,
    s: usize,
    d: &Rat,
    allowed: &BTreeSet<Arc>,
    bound: &[Rat],
    load: &[Rat],
) -> Vec<Path> {
    let mut out_arcs: HashMap<usize, Vec<Arc>> = HashMap::new();
    for a in allowed {
        out_arcs.entry(net.tail(*a)).or_default().push(*a);
    }
    let mut res = Vec::new();
    let mut stack = vec![s];
    let mut arcs = Vec::new();
    fn rec(
        net: &Network,
        d: &Rat,
        out_arcs: &HashMap<usize, Vec<Arc>>,
        bound: &[Rat],
        load: &[Rat],
        stack: &mut Vec<usize>,
        arcs: &mut Vec<Arc>,
        res: &mut Vec<Path>,
    ) {
        if res.len() >= PATHS_PER_DEMAND {
            return;
        }
        let u = *stack.last().unwrap();
        if net.is_sink(u) {
            res.push(Path {
                nodes: stack.clone(),
                arcs: arcs.clone(),
            });
            return;
        }
        for a in out_arcs.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
            let w = net.head(*a);
            if stack.contains(&w) || &load[a.edge] + d > bound[a.edge] {
                continue;
            }
            stack.push(w);
            arcs.push(*a);
            rec(net, d, out_arcs, bound, load, stack, arcs, res);
            stack.pop();
            arcs.pop();
        }
    }
    rec(
        net, d, &out_arcs, bound, load, &mut stack, &mut arcs, &mut res,
    );
    res
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    net: &Network,
    demands: &[Rat],
    order: &[usize],
    allowed: &BTreeSet<Arc>,
    bound: &[Rat],
    load: &mut Vec<Rat>,
    chosen: &mut Vec<Path>,
    steps: &mut usize,
) -> bool {
    let i = chosen.len();
    if i == order.len() {
        return true;
    }
    *steps += 1;
    if *steps > SEARCH_BUDGET {
        return false;
    }
    let v = order[i];
    for p in simple_paths(net, v, &demands[v], allowed, bound, load) {
        for a in &p.arcs {
            load[a.edge] += &demands[v];
        }
        chosen.push(p);
        if backtrack(net, demands, order, allowed, bound, load, chosen, steps) {
            return true;
        }
        let p = chosen.pop().unwrap();
        for a in &p.arcs {
            load[a.edge] -= &demands[v];
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::flow_stats;
    use crate::netcore::rat::{frac, rat};

    #[test]
    fn two_paths_congestion_two() {
        let mut g = Network::new(true);
        let a = g.add_node("a");
        let b = g.add_node("b");
        let t = g.add_node("t");
        g.add_edge(a, t, rat(1), 1);
        g.add_edge(a, b, rat(1), 1);
        g.add_edge(b, t, rat(1), 1);
        g.add_sink(t);
        let d = vec![frac(3, 2), frac(1, 2), rat(0)];
        assert!(unsplittable_flow(&g, &d).is_err());
        let d = vec![rat(1), frac(1, 2), rat(0)];
        let f = unsplittable_flow(&g, &d).unwrap();
        assert_eq!(f.entries.len(), 2);
        assert!(flow_stats(&g, &f).edge_congestion <= rat(2));
    }
}
