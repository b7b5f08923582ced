use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::sim::{simulate, trans2, DynamicRouting, Routing, SimOptions, SimTrace};
use crate::config::Calibration;
use crate::multilayer::{demand_max_static, MultilayerParams};
use crate::netcore::rat::{ceil_u64, fmt_rat};
use crate::netcore::{ConfluentRouting, Error, Network, Path, PathFlow, Rat, Result};

#[derive(Debug, Clone)]
pub struct SolveParams {
    pub trials: usize,
    pub seed: u64,
    pub calibration: Calibration,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            trials: 8,
            seed: 0,
            calibration: Calibration::default(),
        }
    }
}

impl SolveParams {
    fn multilayer(&self) -> MultilayerParams {
        MultilayerParams {
            trials: self.trials,
            seed: self.seed,
            layer_base: self.calibration.layer_base,
            calibration: self.calibration.clone(),
        }
    }
}

/// Measured quality of a quickest-flow answer.
#[derive(Debug, Clone, Serialize)]
pub struct QuickestCertificates {
    /// Smallest horizon whose length-bounded static probe is feasible; a lower bound on OPT.
    pub lower_bound: u64,
    /// Largest horizon known infeasible (by probe or by distance); None when the bound is 0.
    pub infeasible_below: Option<u64>,
    /// Edge congestion of the layered routing before demand selection.
    pub congestion: String,
    /// Fraction of the supply sent by the pipeline schedule.
    pub pipeline_fraction: String,
    /// Makespan of the pipeline schedule restricted to the selected sources.
    pub pipeline_time: Option<u64>,
    /// `claimed_time / lower_bound`.
    pub time_factor: String,
    /// Which candidate tree produced the claim.
    pub chosen: String,
}

#[derive(Debug, Clone)]
pub struct QuickestResult {
    pub routing: DynamicRouting,
    pub claimed_time: u64,
    pub delivered_fraction: Rat,
    pub certificates: QuickestCertificates,
}

fn single_sink(net: &Network) -> Result<usize> {
    if net.sinks.len() != 1 {
        return Err(Error::Precondition(
            "dynamic drivers need exactly one sink".into(),
        ));
    }
    Ok(net.sinks[0])
}

/// Safe scan cap for greedy schedules on a tree.
fn scan_cap(net: &Network, supply: &[Rat]) -> u64 {
    let total: Rat = supply.iter().sum();
    let c_min = net.min_cap().unwrap_or_else(Rat::one);
    let per_edge = ceil_u64(&(total / c_min)) + 1;
    let lens: u64 = net.edges.iter().map(|e| e.len).sum();
    (net.n() as u64 + 1) * per_edge + lens + 1
}

/// Scan cap large enough for any schedule of `dr` under FIFO queueing: the last release
/// step plus, per node, the time to drain everything released through the narrowest edge.
pub fn scan_horizon(net: &Network, dr: &DynamicRouting) -> u64 {
    let last = dr
        .schedule
        .values()
        .flatten()
        .map(|r| r.start + r.duration)
        .max()
        .unwrap_or(0);
    let total = dr.total_release();
    let c_min = net.min_cap().unwrap_or_else(Rat::one);
    let lens: u64 = net.edges.iter().map(|e| e.len).sum();
    last + (net.n() as u64 + 1) * (ceil_u64(&(total / c_min)) + 1) + lens + 1
}

/// Constructive horizon at which the static probe is always feasible.
pub fn quickest_upper_horizon(net: &Network) -> u64 {
    let total = net.total_supply();
    let c_min = net.min_cap().unwrap_or_else(Rat::one);
    ceil_u64(&(total / c_min)) + net.edges.iter().map(|e| e.len).sum::<u64>()
}

fn zero_length_into_sink(net: &Network) -> bool {
    net.arcs()
        .into_iter()
        .any(|a| net.is_sink(net.head(a)) && net.len(a) == 0)
}

/// Static probe for horizon `t`: can every source send `d_i / t` (or `d_i / (t+1)` when a
/// zero-length arc enters the sink) along paths of length at most `t`? Horizon 0 is only
/// reachable through zero-length arcs into the sink.
pub fn quickest_probe(net: &Network, t: u64) -> bool {
    if net.total_supply().is_zero() {
        return true;
    }
    if t == 0 && !zero_length_into_sink(net) {
        return false;
    }
    let div = if zero_length_into_sink(net) { t + 1 } else { t };
    let d = Rat::from_integer(div.into());
    let demands: Vec<Rat> = net.supply.iter().map(|x| x / &d).collect();
    crate::staticflow::length_bounded_flow(net, &demands, Some(t)).is_ok()
}

/// Extends a partial routing so every node that can reach a sink is routed. New nodes hang
/// off already covered nodes in breadth-first order.
pub fn extend_routing(net: &Network, r: &ConfluentRouting) -> ConfluentRouting {
    let mut out = r.out.clone();
    let mut covered = vec![false; net.n()];
    let mut queue = VecDeque::new();
    for v in 0..net.n() {
        if net.is_sink(v) {
            covered[v] = true;
        }
    }
    for v in 0..net.n() {
        if out[v].is_some() && net.is_sink(r.path_from(net, v).end()) {
            covered[v] = true;
        } else if !net.is_sink(v) {
            out[v] = None;
        }
    }
    for v in 0..net.n() {
        if covered[v] {
            queue.push_back(v);
        }
    }
    let inc = net.in_arcs();
    while let Some(v) = queue.pop_front() {
        for &a in &inc[v] {
            let u = net.tail(a);
            if !covered[u] {
                covered[u] = true;
                out[u] = Some(a);
                queue.push_back(u);
            }
        }
    }
    ConfluentRouting { out }
}

/// Shortest-path in-tree towards the sinks. Nodes join the tree breadth-first from the
/// sinks over tight arcs, so zero-length cycles cannot close.
pub fn shortest_path_tree(net: &Network) -> ConfluentRouting {
    let dist = net.dist_to_sink();
    let mut out = vec![None; net.n()];
    let mut inc = net.in_arcs();
    for l in inc.iter_mut() {
        l.sort_by_key(|a| (a.edge, a.rev));
    }
    let mut done: Vec<bool> = (0..net.n()).map(|v| net.is_sink(v)).collect();
    let mut queue: VecDeque<usize> = net.sinks.iter().copied().collect();
    while let Some(w) = queue.pop_front() {
        let Some(dw) = dist[w] else { continue };
        for &a in &inc[w] {
            let u = net.tail(a);
            if !done[u] && dist[u] == Some(dw + net.len(a)) {
                done[u] = true;
                out[u] = Some(a);
                queue.push_back(u);
            }
        }
    }
    ConfluentRouting { out }
}

/// Greedy schedule on `r` for the positive supplies; returns the routing and its trace.
pub fn greedy_schedule(net: &Network, r: &ConfluentRouting) -> Result<(DynamicRouting, SimTrace)> {
    let used: Vec<usize> = (0..net.n())
        .filter(|&v| net.supply[v].is_positive())
        .collect();
    let r = r.restrict_to(net, &used);
    let dr = DynamicRouting::greedy(net, r, &net.supply);
    let tr = simulate(net, &dr, scan_cap(net, &net.supply), SimOptions::default())?;
    Ok((dr, tr))
}

fn unreachable_source(net: &Network) -> Option<usize> {
    let dist = net.dist_to_sink();
    (0..net.n()).find(|&v| net.supply[v].is_positive() && dist[v].is_none())
}

/// Confluent quickest flow: binary search on the horizon with a length-bounded static
/// probe, the multilayer pipeline at the smallest feasible horizon, and a greedy schedule
/// on the resulting tree extended to every source.
pub fn solve_quickest(net: &Network, params: &SolveParams) -> Result<QuickestResult> {
    single_sink(net)?;
    if let Some(v) = unreachable_source(net) {
        return Err(Error::Infeasible(format!(
            "sink unreachable from source {}",
            net.nodes[v]
        )));
    }
    let total = net.total_supply();
    if total.is_zero() {
        return Ok(QuickestResult {
            routing: DynamicRouting {
                routing: Routing::Confluent(ConfluentRouting::empty(net.n())),
                schedule: Default::default(),
            },
            claimed_time: 0,
            delivered_fraction: Rat::one(),
            certificates: QuickestCertificates {
                lower_bound: 0,
                infeasible_below: None,
                congestion: "0".into(),
                pipeline_fraction: "1".into(),
                pipeline_time: Some(0),
                time_factor: "1".into(),
                chosen: "empty".into(),
            },
        });
    }
    let dist = net.dist_to_sink();
    let t_low = (0..net.n())
        .filter(|&v| net.supply[v].is_positive())
        .filter_map(|v| dist[v])
        .max()
        .unwrap_or(0);
    let mut hi = quickest_upper_horizon(net).max(t_low);
    if !quickest_probe(net, hi) {
        return Err(Error::Precondition(format!(
            "probe infeasible at the constructive bound {hi}"
        )));
    }
    // `lo` is infeasible: below the farthest source's distance, or probed.
    let mut lo: Option<u64> = t_low.checked_sub(1);
    if lo.is_none() && quickest_probe(net, 0) {
        hi = 0;
    } else if lo.is_none() {
        lo = Some(0);
    }
    while let Some(l) = lo.filter(|&l| hi - l > 1) {
        let mid = l + (hi - l) / 2;
        if quickest_probe(net, mid) {
            hi = mid;
        } else {
            lo = Some(mid);
        }
    }
    let t_star = hi;

    let tq = Rat::from_integer(t_star.max(1).into());
    let rates: Vec<Rat> = net.supply.iter().map(|x| x / &tq).collect();
    let scaled = net.with_supply(rates.clone());
    let budget = params.calibration.budget_multiplier * t_star;
    let dm = demand_max_static(&scaled, Some(budget), &params.multilayer())?;

    let congestion = dm
        .groups
        .get(dm.best_group.unwrap_or(usize::MAX))
        .map(|g| g.base_congestion.clone())
        .unwrap_or_else(|| "0".into());
    let sel_supply: Rat = dm.selected.iter().map(|&v| &net.supply[v]).sum();
    let pipeline_time = if dm.selected.is_empty() {
        None
    } else {
        let f = pipeline_flow(net, &dm.routing, &dm.selected, &rates);
        let dr = trans2(net, &f, t_star.max(1))?;
        let tr = simulate(
            net,
            &dr,
            scan_cap(net, &net.supply) + budget + t_star,
            SimOptions::default(),
        )?;
        tr.makespan
    };

    let pipeline_tree = extend_routing(net, &dm.routing);
    let candidates = [
        ("pipeline", pipeline_tree),
        ("shortest-path", shortest_path_tree(net)),
    ];
    let mut best: Option<(&str, DynamicRouting, u64)> = None;
    for (name, r) in candidates {
        let (dr, tr) = greedy_schedule(net, &r)?;
        let m = tr
            .makespan
            .ok_or_else(|| Error::HorizonExceeded("greedy schedule did not finish".into()))?;
        if best.as_ref().map_or(true, |b| m < b.2) {
            best = Some((name, dr, m));
        }
    }
    let (chosen, routing, claimed_time) = best.unwrap();
    Ok(QuickestResult {
        routing,
        claimed_time,
        delivered_fraction: Rat::one(),
        certificates: QuickestCertificates {
            lower_bound: t_star,
            infeasible_below: lo,
            congestion,
            pipeline_fraction: fmt_rat(&(sel_supply / &total)),
            pipeline_time,
            time_factor: match (claimed_time, t_star) {
                (0, 0) => "1".into(),
                (_, 0) => "inf".into(),
                _ => fmt_rat(&Rat::new(claimed_time.into(), t_star.into())),
            },
            chosen: chosen.into(),
        },
    })
}

fn pipeline_flow(
    net: &Network,
    r: &ConfluentRouting,
    selected: &[usize],
    rates: &[Rat],
) -> PathFlow {
    let entries: Vec<(Path, Rat)> = selected
        .iter()
        .filter(|&&v| rates[v].is_positive())
        .map(|&v| (r.path_from(net, v), rates[v].clone()))
        .collect();
    PathFlow { entries }
}

#[derive(Debug, Clone)]
pub struct MaxFlowOverTime {
    pub horizon: u64,
    /// Horizon within which delivery is counted: `T + ceil(slack * T)`.
    pub realized_horizon: u64,
    pub routing: DynamicRouting,
    pub delivered: Rat,
    /// `T` times the value of the length-bounded static max flow.
    pub static_bound: Rat,
    pub max_inflow_ratio: Rat,
}

pub fn realized_horizon(t: u64, cal: &Calibration) -> u64 {
    t + cal.horizon_slack * t
}

fn empty_dynamic(net: &Network) -> DynamicRouting {
    DynamicRouting {
        routing: Routing::Confluent(ConfluentRouting::empty(net.n())),
        schedule: Default::default(),
    }
}

/// Confluent maximum flow over time `t`: length-bounded static max flow at rates `d_i/t`,
/// the multilayer pipeline on those rates, and `trans2` for `t` steps. Delivery is measured
/// by simulation within the realized horizon.
pub fn solve_maxflow_over_time(
    net: &Network,
    t: u64,
    params: &SolveParams,
) -> Result<MaxFlowOverTime> {
    single_sink(net)?;
    let h = realized_horizon(t, &params.calibration);
    let none = |static_bound: Rat| MaxFlowOverTime {
        horizon: t,
        realized_horizon: h,
        routing: empty_dynamic(net),
        delivered: Rat::zero(),
        static_bound,
        max_inflow_ratio: Rat::zero(),
    };
    if t == 0 || net.total_supply().is_zero() {
        return Ok(none(Rat::zero()));
    }
    let tq = Rat::from_integer(t.into());
    let caps: Vec<Rat> = net.supply.iter().map(|x| x / &tq).collect();
    let budget = params.calibration.budget_multiplier * t;
    let f = crate::staticflow::length_bounded_max_flow(net, &caps, Some(budget), false);
    let static_bound = f.value() * &tq;
    if f.value().is_zero() {
        return Ok(none(static_bound));
    }
    let rates = f.source_values(net);
    let scaled = net.with_supply(rates.clone());
    let dm = demand_max_static(&scaled, Some(budget), &params.multilayer())?;
    if dm.selected.is_empty() {
        return Ok(none(static_bound));
    }
    let pf = pipeline_flow(net, &dm.routing, &dm.selected, &rates);
    let dr = trans2(net, &pf, t)?;
    let tr = simulate(net, &dr, h, SimOptions::default())?;
    Ok(MaxFlowOverTime {
        horizon: t,
        realized_horizon: h,
        delivered: tr.delivered_by(h),
        routing: dr,
        static_bound,
        max_inflow_ratio: tr.max_inflow_ratio,
    })
}

/// Solves for every horizon in increasing order. A schedule found for a smaller horizon is
/// kept when it still delivers more within the larger realized horizon.
pub fn maxflow_over_time_sweep(
    net: &Network,
    horizons: &[u64],
    params: &SolveParams,
) -> Result<Vec<MaxFlowOverTime>> {
    let mut ts = horizons.to_vec();
    ts.sort_unstable();
    ts.dedup();
    let mut out: Vec<MaxFlowOverTime> = Vec::new();
    for t in ts {
        let mut cur = solve_maxflow_over_time(net, t, params)?;
        if let Some(prev) = out.last() {
            let tr = simulate(
                net,
                &prev.routing,
                cur.realized_horizon,
                SimOptions::default(),
            )?;
            let d = tr.delivered_by(cur.realized_horizon);
            if d > cur.delivered {
                cur.routing = prev.routing.clone();
                cur.delivered = d;
                cur.max_inflow_ratio = tr.max_inflow_ratio;
            }
        }
        out.push(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::rat::{frac, rat};

    fn edge(d: Rat, c: Rat, l: u64) -> Network {
        let mut g = Network::new(true);
        let s = g.add_node("s");
        let t = g.add_node("t");
        g.add_edge(s, t, c, l);
        g.add_sink(t);
        g.supply[s] = d;
        g
    }

    #[test]
    fn quickest_single_edge() {
        let g = edge(rat(5), rat(2), 3);
        let q = solve_quickest(&g, &SolveParams::default()).unwrap();
        assert_eq!(q.claimed_time, 5);
        assert_eq!(q.delivered_fraction, rat(1));
        assert!(q.certificates.lower_bound <= 5);
        let tr = simulate(&g, &q.routing, 100, SimOptions::default()).unwrap();
        assert_eq!(tr.makespan, Some(5));
    }

    #[test]
    fn shortest_tree_zero_length_undirected() {
        let mut g = Network::new(false);
        for x in ["a", "b", "c", "t"] {
            g.add_node(x);
        }
        g.add_edge(0, 3, rat(1), 0);
        g.add_edge(1, 2, rat(1), 0);
        g.add_edge(2, 3, rat(1), 2);
        g.add_edge(0, 2, rat(1), 0);
        g.add_sink(3);
        g.supply[1] = rat(2);
        let r = shortest_path_tree(&g);
        r.validate(&g).unwrap();
        assert_eq!(r.path_from(&g, 1).length(&g), 0);
        assert!(solve_quickest(&g, &SolveParams::default()).is_ok());
    }

    #[test]
    fn quickest_empty_and_unreachable() {
        let g = edge(rat(0), rat(1), 1);
        assert_eq!(
            solve_quickest(&g, &SolveParams::default())
                .unwrap()
                .claimed_time,
            0
        );
        let mut g = edge(rat(1), rat(1), 1);
        let x = g.add_node("x");
        g.supply[x] = rat(1);
        assert!(matches!(
            solve_quickest(&g, &SolveParams::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn maxflow_over_time_single_edge() {
        let g = edge(rat(100), rat(1), 1);
        let p = SolveParams::default();
        let r = solve_maxflow_over_time(&g, 10, &p).unwrap();
        assert!(r.delivered >= rat(9));
        assert!(r.max_inflow_ratio <= rat(1));
        let g = edge(rat(5), rat(1), 4);
        assert_eq!(
            solve_maxflow_over_time(&g, 1, &p).unwrap().delivered,
            rat(0)
        );
    }

    #[test]
    fn sweep_is_monotone() {
        let g = edge(frac(7, 2), rat(1), 2);
        let s = maxflow_over_time_sweep(&g, &[1, 2, 3, 5, 8], &SolveParams::default()).unwrap();
        for w in s.windows(2) {
            assert!(w[0].delivered <= w[1].delivered);
        }
    }
}
