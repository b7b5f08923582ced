use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;

use crate::netcore::{
    flow_stats, routing_to_pathflow, Arc, ConfluentRouting, Error, Network, Rat, Result,
};
use crate::rounding::trial_rng;

use super::layers::{LayerArc, LayeredNetwork};

const EXHAUSTIVE_LIMIT: usize = 20;
const GREEDY_ROUNDS: u64 = 64;

#[derive(Debug, Clone)]
pub struct Reroute {
    pub routing: ConfluentRouting,
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    /// Edge congestion on the unit network (unit supply per kept source).
    pub edge_congestion: Rat,
    pub layered_node_congestion: Rat,
    /// Which scheme produced the result: "lowest", "exhaustive" or "greedy".
    pub scheme: &'static str,
}

type Exit = (u32, Arc);

/// Base-node exits of a source's layered path, with cycles of the projection removed.
fn requirements(
    unit: &Network,
    h: &LayeredNetwork,
    hr: &ConfluentRouting,
    v: usize,
) -> Result<Vec<(usize, Exit)>> {
    let p = hr.path_from(&h.net, h.copy[v][0]);
    if p.end() != h.sink {
        return Err(Error::NotConfluent(format!(
            "layered path of {} misses the sink",
            unit.nodes[v]
        )));
    }
    let mut exits: Vec<(usize, Exit)> = Vec::new();
    for a in &p.arcs {
        let (arc, layer) = match h.arc[a.edge] {
            LayerArc::Vertical { arc, layer } | LayerArc::DummyEntry { arc, layer } => (arc, layer),
            _ => continue,
        };
        let x = unit.tail(arc);
        if let Some(pos) = exits.iter().position(|(y, _)| *y == x) {
            exits.truncate(pos);
        }
        exits.push((x, (layer, arc)));
    }
    Ok(exits)
}

fn kept_under(reqs: &[(usize, Vec<(usize, Exit)>)], assign: &BTreeMap<usize, Exit>) -> Vec<usize> {
    reqs.iter()
        .filter(|(_, r)| r.iter().all(|(x, e)| assign.get(x) == Some(e)))
        .map(|(v, _)| *v)
        .collect()
}

/// Projects a confluent routing of the layered network back to the base network.
/// Every base node is committed to one layer copy and its exit arc; sources whose
/// projected paths agree with all commitments are kept. Edge congestion of the result
/// is at most the node congestion of the layered routing.
pub fn reroute_to_base(
    unit: &Network,
    h: &LayeredNetwork,
    hr: &ConfluentRouting,
    sources: &[usize],
    seed: u64,
) -> Result<Reroute> {
    let mut supply_h = vec![Rat::from_integer(0.into()); h.net.n()];
    for &v in sources {
        supply_h[h.copy[v][0]] = Rat::from_integer(1.into());
    }
    let hflow = routing_to_pathflow(&h.net, hr, &supply_h)?;
    let nc_h = flow_stats(&h.net, &hflow).node_congestion;
    let mut reqs = Vec::new();
    for &v in sources {
        reqs.push((v, requirements(unit, h, hr, v)?));
    }
    let mut cands: BTreeMap<usize, BTreeSet<Exit>> = BTreeMap::new();
    for (_, r) in &reqs {
        for (x, e) in r {
            cands.entry(*x).or_default().insert(*e);
        }
    }
    let lowest: BTreeMap<usize, Exit> = cands
        .iter()
        .map(|(x, s)| (*x, *s.iter().next().unwrap()))
        .collect();
    let target = sources.len().div_ceil(2 * h.k as usize - 1);
    let mut best = (kept_under(&reqs, &lowest), "lowest");
    let conflicted: Vec<usize> = cands
        .iter()
        .filter(|(_, s)| s.len() > 1)
        .map(|(x, _)| *x)
        .collect();
    if best.0.len() < target && h.k as usize * conflicted.len() <= EXHAUSTIVE_LIMIT {
        let options: Vec<Vec<Exit>> = conflicted
            .iter()
            .map(|x| cands[x].iter().copied().collect())
            .collect();
        let mut idx = vec![0usize; conflicted.len()];
        let mut assign = lowest.clone();
        loop {
            for (i, x) in conflicted.iter().enumerate() {
                assign.insert(*x, options[i][idx[i]]);
            }
            let k = kept_under(&reqs, &assign);
            if k.len() > best.0.len() {
                best = (k, "exhaustive");
            }
            let mut i = 0;
            while i < idx.len() {
                idx[i] += 1;
                if idx[i] < options[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == idx.len() {
                break;
            }
        }
    }
    if best.0.len() < target {
        for round in 0..GREEDY_ROUNDS {
            let mut order: Vec<usize> = (0..reqs.len()).collect();
            if round > 0 {
                order.shuffle(&mut trial_rng(seed, (2u64 << 40) | round));
            }
            let mut assign: BTreeMap<usize, Exit> = BTreeMap::new();
            for i in order {
                let r = &reqs[i].1;
                if r.iter()
                    .all(|(x, e)| assign.get(x).map_or(true, |f| f == e))
                {
                    for (x, e) in r {
                        assign.insert(*x, *e);
                    }
                }
            }
            let k = kept_under(&reqs, &assign);
            if k.len() > best.0.len() {
                best = (k, "greedy");
            }
            if best.0.len() >= target {
                break;
            }
        }
    }
    let (kept, scheme) = best;
    let mut routing = ConfluentRouting::empty(unit.n());
    for (v, r) in &reqs {
        if kept.contains(v) {
            for (x, (_, a)) in r {
                routing.out[*x] = Some(*a);
            }
        }
    }
    routing.validate(unit)?;
    let mut supply = vec![Rat::from_integer(0.into()); unit.n()];
    for &v in &kept {
        supply[v] = Rat::from_integer(1.into());
    }
    let f = routing_to_pathflow(unit, &routing, &supply)?;
    let ec = flow_stats(unit, &f).edge_congestion;
    if ec > nc_h {
        return Err(Error::Precondition(format!(
            "re-routed congestion {ec} exceeds layered congestion {nc_h}"
        )));
    }
    let discarded = sources
        .iter()
        .copied()
        .filter(|v| !kept.contains(v))
        .collect();
    Ok(Reroute {
        routing,
        kept,
        discarded,
        edge_congestion: ec,
        layered_node_congestion: nc_h,
        scheme,
    })
}
