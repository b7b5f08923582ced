//! Multilayer reduction for confluent flows in edge-capacitated networks.
//!
//! Supplies are grouped by size, each group is unit-normalised, and the network is
//! turned into a monotone layered network where copy `u^i` has capacity `2^i`.
//! A confluent flow found there is projected back onto the base network.

mod layers;
mod reroute;
mod select;

pub use layers::{
    build_layers, route_layers, route_layers_with_flow, LayerArc, LayerNode, LayerRouting,
    LayeredNetwork,
};
pub use reroute::{reroute_to_base, Reroute};
pub use select::select_demands_on_tree;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::config::Calibration;
use crate::netcore::rat::{ceil_log2, fmt_rat, pow2, round_up_pow2};
use crate::netcore::{
    flow_stats, routing_to_pathflow, Arc, ConfluentRouting, Error, Network, Rat, Result,
};
use crate::staticflow::{length_bounded_max_flow, max_flow, node_to_edge_capacitated};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupplyGroup {
    pub exponent: i64,
    pub size: Rat,
    pub sources: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedSupplies {
    pub kappa: usize,
    pub d_max: Rat,
    pub dropped: Vec<usize>,
    /// Groups in increasing size.
    pub groups: Vec<SupplyGroup>,
}

/// Drops supplies at most `d_max / (2 kappa)` and groups the rest by rounding up to powers of 2.
pub fn group_supplies(net: &Network) -> GroupedSupplies {
    let sources = net.sources();
    let kappa = sources.len();
    let d_max = net.max_supply();
    let mut dropped = Vec::new();
    let mut groups: Vec<SupplyGroup> = Vec::new();
    if kappa == 0 {
        return GroupedSupplies {
            kappa,
            d_max,
            dropped,
            groups,
        };
    }
    let thr = &d_max / Rat::from_integer((2 * kappa).into());
    for v in sources {
        let d = &net.supply[v];
        if *d <= thr {
            dropped.push(v);
            continue;
        }
        let j = ceil_log2(d);
        match groups.iter_mut().find(|g| g.exponent == j) {
            Some(g) => g.sources.push(v),
            None => groups.push(SupplyGroup {
                exponent: j,
                size: pow2(j),
                sources: vec![v],
            }),
        }
    }
    groups.sort_by_key(|g| g.exponent);
    GroupedSupplies {
        kappa,
        d_max,
        dropped,
        groups,
    }
}

/// A group's unit-normalised network: capacities divided by the group size, rounded up to
/// powers of 2 and clamped; edges below the group size are removed.
#[derive(Debug, Clone)]
pub struct UnitNetwork {
    pub net: Network,
    /// Base edge of every unit edge.
    pub edge_map: Vec<usize>,
}

impl UnitNetwork {
    pub fn arc_to_base(&self, a: Arc) -> Arc {
        Arc {
            edge: self.edge_map[a.edge],
            rev: a.rev,
        }
    }
}

pub fn unit_network(net: &Network, group: &SupplyGroup, kappa: usize, d_max: &Rat) -> UnitNetwork {
    let mut g = Network::new(net.directed);
    for name in &net.nodes {
        g.add_node(name);
    }
    for &t in &net.sinks {
        g.add_sink(t);
    }
    for &v in &group.sources {
        g.supply[v] = Rat::one();
    }
    let clamp =
        round_up_pow2(&(Rat::from_integer(kappa.into()) * d_max / &group.size)).max(Rat::one());
    let mut edge_map = Vec::new();
    for (i, e) in net.edges.iter().enumerate() {
        let c = &e.cap / &group.size;
        if c < Rat::one() {
            continue;
        }
        let c = round_up_pow2(&c).min(clamp.clone());
        g.add_edge(e.u, e.v, c, e.len);
        edge_map.push(i);
    }
    UnitNetwork { net: g, edge_map }
}

#[derive(Debug, Clone)]
pub struct MultilayerParams {
    pub trials: usize,
    pub seed: u64,
    pub layer_base: u64,
    pub calibration: Calibration,
}

impl Default for MultilayerParams {
    fn default() -> Self {
        MultilayerParams {
            trials: 8,
            seed: 0,
            layer_base: 2,
            calibration: Calibration::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub size: String,
    pub sources: usize,
    pub routable: usize,
    pub kept: usize,
    pub layers: u32,
    pub layered_node_congestion: String,
    pub base_congestion: String,
    pub selected: usize,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct GroupOutcome {
    pub group: SupplyGroup,
    /// Confluent routing on the base network of the kept sources.
    pub routing: ConfluentRouting,
    pub kept: Vec<usize>,
    /// Edge congestion of the kept sources with their real supplies.
    pub congestion: Rat,
    pub selected: Vec<usize>,
    pub value: Rat,
    pub report: GroupReport,
}

#[derive(Debug, Clone)]
pub struct DemandMaxResult {
    pub routing: ConfluentRouting,
    pub selected: Vec<usize>,
    pub value: Rat,
    /// Value of a splittable (length-bounded) max flow, an upper bound on the optimum.
    pub upper_bound: Rat,
    pub best_group: Option<usize>,
    pub groups: Vec<GroupReport>,
    pub dropped: Vec<usize>,
}

fn single_sink(net: &Network) -> Result<usize> {
    if net.sinks.len() != 1 {
        return Err(Error::Precondition(
            "multilayer routing needs exactly one sink".into(),
        ));
    }
    Ok(net.sinks[0])
}

/// Largest subset of the layered sources that can all be routed with node congestion
/// at most 1 (and within `budget`).
fn routable_subset(h: &LayeredNetwork, sources: &[usize], budget: Option<u64>) -> Vec<usize> {
    let mut cur: Vec<usize> = sources.to_vec();
    let (split, map) = node_to_edge_capacitated(&h.net);
    loop {
        if cur.is_empty() {
            return cur;
        }
        let mut caps = vec![Rat::zero(); split.n()];
        for &s in &cur {
            caps[map.v_in[h.copy[s][0]]] = Rat::one();
        }
        let f = match budget {
            None => max_flow(&split, &caps).expect("max flow on split network"),
            Some(b) => length_bounded_max_flow(&split, &caps, Some(b), false),
        };
        let sent = f.source_values(&split);
        let served: Vec<(usize, Rat)> = cur
            .iter()
            .map(|&s| (s, sent[map.v_in[h.copy[s][0]]].clone()))
            .collect();
        if served.iter().all(|(_, x)| *x == Rat::one()) {
            return cur;
        }
        if budget.is_none() {
            return served
                .into_iter()
                .filter(|(_, x)| *x == Rat::one())
                .map(|(s, _)| s)
                .collect();
        }
        let worst = served
            .iter()
            .min_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap()
            .0;
        cur.retain(|&s| s != worst);
    }
}

/// Routes one supply group through the layered network and back to the base network.
pub fn route_group(
    net: &Network,
    group: &SupplyGroup,
    grouped: &GroupedSupplies,
    budget: Option<u64>,
    params: &MultilayerParams,
    gamma_select: bool,
) -> Result<GroupOutcome> {
    single_sink(net)?;
    let unit = unit_network(net, group, grouped.kappa, &grouped.d_max);
    let mut h = build_layers(&unit.net)?;
    let routable = routable_subset(&h, &group.sources, budget);
    let empty = |report: GroupReport| GroupOutcome {
        group: group.clone(),
        routing: ConfluentRouting::empty(net.n()),
        kept: vec![],
        congestion: Rat::zero(),
        selected: vec![],
        value: Rat::zero(),
        report,
    };
    let mut report = GroupReport {
        size: fmt_rat(&group.size),
        sources: group.sources.len(),
        routable: routable.len(),
        kept: 0,
        layers: h.k,
        layered_node_congestion: "0".into(),
        base_congestion: "0".into(),
        selected: 0,
        value: "0".into(),
    };
    if routable.is_empty() {
        return Ok(empty(report));
    }
    h.set_sources(&routable);
    let lr = if budget.is_none() && params.calibration.relaxed_without_budget {
        layers::route_layers_relaxed(&h, params)?
    } else {
        route_layers(&h, budget, params)?
    };
    let rr = reroute_to_base(&unit.net, &h, &lr.routing, &routable, params.seed)?;
    report.kept = rr.kept.len();
    report.layered_node_congestion = fmt_rat(&lr.node_congestion);
    let mut routing = ConfluentRouting::empty(net.n());
    for v in 0..net.n() {
        if let Some(a) = rr.routing.out[v] {
            routing.out[v] = Some(unit.arc_to_base(a));
        }
    }
    let mut supply = vec![Rat::zero(); net.n()];
    for &v in &rr.kept {
        supply[v] = net.supply[v].clone();
    }
    let f = routing_to_pathflow(net, &routing, &supply)?;
    let congestion = flow_stats(net, &f).edge_congestion;
    report.base_congestion = fmt_rat(&congestion);
    let gamma = Rat::one() / congestion.clone().max(Rat::one());
    let selected = if gamma_select {
        let g: Vec<Rat> = (0..net.n())
            .map(|v| {
                if supply[v].is_positive() {
                    gamma.clone()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        select_demands_on_tree(net, &routing, &net.supply, &g)
    } else {
        rr.kept.clone()
    };
    let value = selected
        .iter()
        .fold(Rat::zero(), |a, &v| a + &net.supply[v]);
    report.selected = selected.len();
    report.value = fmt_rat(&value);
    let routing = routing.restrict_to(net, &selected);
    Ok(GroupOutcome {
        group: group.clone(),
        routing,
        kept: rr.kept,
        congestion,
        selected,
        value,
        report,
    })
}

/// Static confluent demand maximisation: the best group routed through the layered
/// network, followed by demand selection on the resulting tree so that edge congestion is
/// at most 1. `budget` bounds path lengths in the layered routing.
pub fn demand_max_static(
    net: &Network,
    budget: Option<u64>,
    params: &MultilayerParams,
) -> Result<DemandMaxResult> {
    single_sink(net)?;
    let grouped = group_supplies(net);
    let mut best: Option<(usize, GroupOutcome)> = None;
    let mut reports = Vec::new();
    for (i, g) in grouped.groups.iter().enumerate() {
        let out = route_group(net, g, &grouped, budget, params, true)?;
        reports.push(out.report.clone());
        if best.as_ref().map_or(true, |(_, b)| out.value > b.value) {
            best = Some((i, out));
        }
    }
    let upper_bound = match budget {
        None => max_flow(net, &net.supply)?.value(),
        Some(b) => length_bounded_max_flow(net, &net.supply, Some(b), false).value(),
    };
    let (best_group, routing, selected, value) = match best {
        Some((i, o)) => (Some(i), o.routing, o.selected, o.value),
        None => (None, ConfluentRouting::empty(net.n()), vec![], Rat::zero()),
    };
    Ok(DemandMaxResult {
        routing,
        selected,
        value,
        upper_bound,
        best_group,
        groups: reports,
        dropped: grouped.dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::rat::{frac, rat};

    #[test]
    fn grouping_example() {
        let mut g = Network::new(true);
        for x in ["a", "b", "c", "t"] {
            g.add_node(x);
        }
        g.add_sink(3);
        g.supply[0] = rat(1);
        g.supply[1] = rat(3);
        g.supply[2] = rat(8);
        let gr = group_supplies(&g);
        assert_eq!(gr.dropped, vec![0]);
        assert_eq!(gr.groups.len(), 2);
        assert_eq!(gr.groups[0].size, rat(4));
        assert_eq!(gr.groups[0].sources, vec![1]);
        assert_eq!(gr.groups[1].size, rat(8));
        let _ = frac(1, 2);
    }

    #[test]
    fn unit_network_rounds_and_deletes() {
        let mut g = Network::new(true);
        for x in ["a", "b", "t"] {
            g.add_node(x);
        }
        g.add_edge(0, 1, frac(1, 2), 1);
        g.add_edge(1, 2, rat(3), 1);
        g.add_edge(0, 2, rat(100), 1);
        g.add_sink(2);
        g.supply[0] = rat(1);
        let grp = SupplyGroup {
            exponent: 0,
            size: rat(1),
            sources: vec![0],
        };
        let u = unit_network(&g, &grp, 1, &rat(1));
        assert_eq!(u.edge_map, vec![1, 2]);
        assert_eq!(u.net.edges[0].cap, rat(1));
        assert_eq!(u.net.edges[1].cap, rat(1));
    }
}
