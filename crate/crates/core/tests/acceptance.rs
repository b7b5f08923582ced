//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::Rng;

use confluent::config::Calibration;
use confluent::dynamic::{
    greedy_schedule, maxflow_over_time_sweep, shortest_path_tree, simulate, single_edge_time,
    solve_maxflow_over_time, solve_quickest, trans1, trans2, DynamicRouting, Routing, SimOptions,
    SimTrace, SolveParams,
};
use confluent::instances::{
    build_cut, canonical_routing, crossing_witness, gen_alphabeta, gen_half_grid, gen_instance,
    gen_tree_family, harmonic, separates, CorpusSpec, Gadget,
};
use confluent::monotonic::{route_monotone_relaxed, MonotoneParams};
use confluent::multilayer::{
    build_layers, demand_max_static, reroute_to_base, route_layers, MultilayerParams,
};
use confluent::netcore::rat::{frac, rat, to_f64};
use confluent::netcore::{flow_stats, write_network, ConfluentRouting, Network, Rat};
use confluent::oracle::{oracle_quickest, oracle_quickest_time_expanded};
use confluent::rounding::{
    diagnostics, expected_congestion, round_best, trial_rng, trials_for, DagArc, FlowDag,
};
use confluent::Error;

type Outcome = std::result::Result<String, String>;

fn sim_ok(tr: &SimTrace) -> bool {
    tr.conservation_ok && tr.max_inflow_ratio <= Rat::one()
}

fn full_sim(net: &Network, dr: &DynamicRouting) -> confluent::Result<SimTrace> {
    let h = confluent::dynamic::scan_horizon(net, dr);
    simulate(net, dr, h, SimOptions::default())
}

/// Every node used by a path routing leaves on a single arc.
fn paths_confluent(net: &Network, dr: &DynamicRouting) -> std::result::Result<(), String> {
    let f = match &dr.routing {
        Routing::Confluent(r) => return r.validate(net).map_err(|e| e.to_string()),
        Routing::Paths(f) => f,
    };
    let mut out: BTreeMap<usize, confluent::Arc> = BTreeMap::new();
    for (p, _) in &f.entries {
        for (&v, &a) in p.nodes.iter().zip(&p.arcs) {
            if *out.entry(v).or_insert(a) != a {
                return Err(format!("node {} leaves on two arcs", net.nodes[v]));
            }
        }
    }
    Ok(())
}

fn c1() -> Outcome {
    let mut n = 0;
    for d in 1..=20i64 {
        for c in 1..=5i64 {
            for l in 0..=5u64 {
                let mut g = Network::new(true);
                let s = g.add_node("s");
                let t = g.add_node("t");
                g.add_edge(s, t, rat(c), l);
                g.add_sink(t);
                g.supply[s] = rat(d);
                let r = ConfluentRouting {
                    out: vec![Some(confluent::Arc::fwd(0)), None],
                };
                let dr = DynamicRouting::greedy(&g, r, &g.supply.clone());
                let tr = full_sim(&g, &dr).map_err(|e| e.to_string())?;
                let want = ((d + c - 1) / c - 1) as u64 + l;
                if tr.makespan != Some(want) || single_edge_time(&rat(d), &rat(c), l) != want {
                    return Err(format!(
                        "d={d} c={c} l={l}: makespan {:?}, expected {want}",
                        tr.makespan
                    ));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} cases"))
}

fn corpus_spec(directed: bool) -> CorpusSpec {
    CorpusSpec {
        directed,
        ..CorpusSpec::default()
    }
}

fn c2() -> Outcome {
    let mut routings = 0;
    for i in 0..500u64 {
        let g = gen_instance(&corpus_spec(i % 4 != 3), 2024, i).map_err(|e| e.to_string())?;
        let params = SolveParams {
            seed: i,
            ..SolveParams::default()
        };
        let ctx = |e: Error| format!("instance {i}: {e}");
        match solve_quickest(&g, &params) {
            Ok(q) => {
                if let Routing::Confluent(r) = &q.routing.routing {
                    r.validate(&g).map_err(ctx)?;
                }
                let tr = full_sim(&g, &q.routing).map_err(ctx)?;
                if !sim_ok(&tr) || tr.delivered_by(tr.last_step) != tr.total_released {
                    return Err(format!(
                        "instance {i}: quickest schedule violates the ledger"
                    ));
                }
                routings += 1;
            }
            Err(Error::Infeasible(_)) => {}
            Err(e) => return Err(ctx(e)),
        }
        let budget = 2 * g.edges.iter().map(|e| e.len).sum::<u64>().max(1);
        let dm = demand_max_static(
            &g,
            Some(budget),
            &MultilayerParams {
                seed: i,
                ..Default::default()
            },
        )
        .map_err(ctx)?;
        dm.routing.validate(&g).map_err(ctx)?;
        let mut sup = vec![Rat::zero(); g.n()];
        for &v in &dm.selected {
            sup[v] = g.supply[v].clone();
        }
        let dr = DynamicRouting::greedy(&g, dm.routing.clone(), &sup);
        let tr = full_sim(&g, &dr).map_err(ctx)?;
        if !tr.conservation_ok || tr.delivered_by(tr.last_step) != tr.total_released {
            return Err(format!(
                "instance {i}: demand-max routing violates the ledger"
            ));
        }
        routings += 1;
        let mf = solve_maxflow_over_time(&g, 1 + i % 9, &params).map_err(ctx)?;
        paths_confluent(&g, &mf.routing).map_err(|m| format!("instance {i}: {m}"))?;
        let tr =
            simulate(&g, &mf.routing, mf.realized_horizon, SimOptions::default()).map_err(ctx)?;
        if !sim_ok(&tr) {
            return Err(format!(
                "instance {i}: max-flow-over-time schedule violates the ledger"
            ));
        }
        routings += 1;
        if i % 5 == 0 {
            let m = gen_instance(
                &CorpusSpec {
                    monotone: true,
                    supply: (1, 1),
                    ..CorpusSpec::default()
                },
                2025,
                i,
            )
            .map_err(ctx)?;
            match route_monotone_relaxed(
                &m,
                &MonotoneParams {
                    seed: i,
                    ..Default::default()
                },
            ) {
                Ok(res) => {
                    res.routing.validate(&m).map_err(ctx)?;
                    let dr = DynamicRouting::greedy(&m, res.routing, &m.supply);
                    let tr = full_sim(&m, &dr).map_err(ctx)?;
                    if !tr.conservation_ok || tr.delivered_by(tr.last_step) != tr.total_released {
                        return Err(format!(
                            "instance {i}: monotone routing violates the ledger"
                        ));
                    }
                    routings += 1;
                }
                Err(Error::Infeasible(_)) | Err(Error::Precondition(_)) => {}
                Err(e) => return Err(ctx(e)),
            }
        }
    }
    Ok(format!("{routings} routings checked"))
}

fn c3() -> Outcome {
    let spec = CorpusSpec {
        nodes: (3, 7),
        max_sources: 4,
        ..CorpusSpec::default()
    };
    let mut n = 0;
    let mut gap = 0u64;
    for i in 0..200u64 {
        let g = gen_instance(&spec, 77, i).map_err(|e| e.to_string())?;
        let ctx = |e: Error| format!("instance {i}: {e}");
        let q = match solve_quickest(
            &g,
            &SolveParams {
                seed: i,
                ..SolveParams::default()
            },
        ) {
            Ok(q) => q,
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(ctx(e)),
        };
        let greedy = oracle_quickest(&g)
            .map_err(ctx)?
            .best_time
            .ok_or("oracle found no tree")?;
        let exact = oracle_quickest_time_expanded(&g)
            .map_err(ctx)?
            .best_time
            .ok_or("oracle found no tree")?;
        if q.certificates.lower_bound > exact {
            return Err(format!(
                "instance {i}: probe bound {} above oracle {exact}",
                q.certificates.lower_bound
            ));
        }
        if q.claimed_time < greedy || q.claimed_time < exact {
            return Err(format!(
                "instance {i}: claimed {} below oracle {greedy}/{exact}",
                q.claimed_time
            ));
        }
        let tr = full_sim(&g, &q.routing).map_err(ctx)?;
        if tr.makespan != Some(q.claimed_time) {
            return Err(format!(
                "instance {i}: simulated {:?} != claimed {}",
                tr.makespan, q.claimed_time
            ));
        }
        gap = gap.max(q.claimed_time - exact);
        n += 1;
    }
    Ok(format!("{n} instances, largest gap to oracle {gap}"))
}

fn c4() -> Outcome {
    let mut n = 0;
    let mut i = 0u64;
    while n < 100 {
        let g = gen_instance(&CorpusSpec::default(), 404, i).map_err(|e| e.to_string())?;
        i += 1;
        let ctx = |e: Error| format!("instance {}: {e}", i - 1);
        let tree = shortest_path_tree(&g);
        let (dr, tr) = greedy_schedule(&g, &tree).map_err(ctx)?;
        let Some(ms) = tr.makespan else { continue };
        let t = ms.max(tr.last_entry_step.map_or(0, |s| s + 1)).max(1);
        let f = trans1(&g, &dr, t).map_err(ctx)?;
        let st = flow_stats(&g, &f);
        if st.edge_congestion > Rat::one() || st.max_length > t {
            return Err(format!(
                "instance {}: trans1 EC {} L {} T {t}",
                i - 1,
                st.edge_congestion,
                st.max_length
            ));
        }
        for z in [1u64, 3, 7] {
            let d2 = trans2(&g, &f, z).map_err(ctx)?;
            let tr2 = simulate(&g, &d2, t + z, SimOptions::default()).map_err(ctx)?;
            let zq = Rat::from_integer(z.into());
            for (j, (p, x)) in f.entries.iter().enumerate() {
                let got = &tr2.delivered_by_stream[j];
                if *got != x * &zq {
                    return Err(format!(
                        "instance {}: path {j} from {} got {got} by T+z",
                        i - 1,
                        p.source()
                    ));
                }
            }
            if tr2.delivered_by(t + z) != f.value() * &zq || !sim_ok(&tr2) {
                return Err(format!(
                    "instance {}: trans2 z={z} delivers {}",
                    i - 1,
                    tr2.delivered_by(t + z)
                ));
            }
        }
        n += 1;
    }
    Ok(format!("{n} flows"))
}

fn layered_instance(seed: u64) -> Network {
    let mut rng = trial_rng(seed, 5);
    let n = rng.gen_range(4..=8);
    let mut g = Network::new(true);
    for v in 0..n {
        g.add_node(&format!("v{v}"));
    }
    let t = n - 1;
    g.add_sink(t);
    for u in 0..t {
        let deg = rng.gen_range(1..=3);
        for _ in 0..deg {
            let v = rng.gen_range(u + 1..n);
            g.add_edge(u, v, rat(1 << rng.gen_range(0..4)), rng.gen_range(1..=3));
        }
        if rng.gen_bool(0.7) {
            g.supply[u] = Rat::one();
        }
    }
    g
}

fn c5() -> Outcome {
    let mut n = 0;
    let mut seed = 0u64;
    let mut worst = 1.0f64;
    while n < 100 {
        seed += 1;
        let g = layered_instance(seed);
        let mut h = build_layers(&g).map_err(|e| e.to_string())?;
        if h.k > 4 {
            return Err(format!("seed {seed}: {} layers", h.k));
        }
        let mut sources: Vec<usize> = g.sources();
        let params = MultilayerParams {
            seed,
            ..Default::default()
        };
        let lr = loop {
            if sources.is_empty() {
                break None;
            }
            h.set_sources(&sources);
            match route_layers(&h, None, &params) {
                Ok(lr) => break Some(lr),
                Err(Error::Infeasible(_)) => {
                    sources.pop();
                }
                Err(e) => return Err(format!("seed {seed}: {e}")),
            }
        };
        let Some(lr) = lr else { continue };
        let rr = reroute_to_base(&g, &h, &lr.routing, &sources, seed)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let k = h.k as usize;
        if rr.kept.len() * (2 * k - 1) < sources.len() {
            return Err(format!(
                "seed {seed}: kept {} of {} with k={k}",
                rr.kept.len(),
                sources.len()
            ));
        }
        if rr.edge_congestion > lr.node_congestion {
            return Err(format!(
                "seed {seed}: EC {} > NC(h) {}",
                rr.edge_congestion, lr.node_congestion
            ));
        }
        worst = worst.min(rr.kept.len() as f64 / sources.len() as f64);
        n += 1;
    }
    Ok(format!("{n} instances, smallest kept fraction {worst:.3}"))
}

fn c6() -> Outcome {
    let mut n = 0;
    let mut heaviest = Rat::zero();
    for size in 1..=6 {
        for keep in [0.4, 0.7, 1.0] {
            for seed in 0..60u64 {
                let fam = gen_tree_family(size, keep, seed);
                if fam.is_empty() || crossing_witness(&fam).is_some() {
                    continue;
                }
                let cut =
                    build_cut(size, &fam).map_err(|e| format!("N={size} seed {seed}: {e}"))?;
                if cut.weight > rat(2) || !separates(&fam, &cut.edges) {
                    return Err(format!(
                        "N={size} seed {seed}: weight {} separates {}",
                        cut.weight,
                        separates(&fam, &cut.edges)
                    ));
                }
                heaviest = heaviest.max(cut.weight);
                n += 1;
            }
        }
    }
    Ok(format!("{n} families, heaviest cut {heaviest}"))
}

fn c7() -> Outcome {
    let hg = gen_half_grid(4, 50, Gadget::Yes).map_err(|e| e.to_string())?;
    let total = hg.net.total_supply();
    if total != rat(2500) * harmonic(4) || harmonic(4) != frac(25, 12) {
        return Err(format!("supply {total}"));
    }
    let r = canonical_routing(&hg).map_err(|e| e.to_string())?;
    let (_, tr) = greedy_schedule(&hg.net, &r).map_err(|e| e.to_string())?;
    let ms = tr.makespan.ok_or("canonical routing does not finish")?;
    if ms > hg.yes_bound() {
        return Err(format!("makespan {ms} > {}", hg.yes_bound()));
    }
    Ok(format!(
        "makespan {ms} <= {}, supply {total}",
        hg.yes_bound()
    ))
}

fn c8() -> Outcome {
    let m = 10;
    let yes = gen_alphabeta(1, m, true).map_err(|e| e.to_string())?;
    let no = gen_alphabeta(1, m, false).map_err(|e| e.to_string())?;
    let ty = oracle_quickest(&yes.net)
        .map_err(|e| e.to_string())?
        .best_time
        .ok_or("no YES tree")?;
    let tn = oracle_quickest_time_expanded(&no.net)
        .map_err(|e| e.to_string())?
        .best_time
        .ok_or("no NO tree")?;
    if ty > m + yes.p + 2 || tn < 3 * m / 2 {
        return Err(format!(
            "YES {ty} (bound {}), NO {tn} (bound {})",
            m + yes.p + 2,
            3 * m / 2
        ));
    }
    Ok(format!(
        "YES {ty} <= {}, NO {tn} >= {}",
        m + yes.p + 2,
        3 * m / 2
    ))
}

/// Random layered DAG with unit-supply sources and one sink.
fn calibration_dag(idx: u64) -> FlowDag {
    let mut rng = trial_rng(9000, idx);
    let n = rng.gen_range(40..=300);
    let layers = rng.gen_range(4..=12usize);
    let sink = n - 1;
    let layer: Vec<usize> = (0..sink).map(|v| v * layers / sink).collect();
    let mut arcs = Vec::new();
    for u in 0..sink {
        let next: Vec<usize> = (0..sink).filter(|&v| layer[v] == layer[u] + 1).collect();
        if next.is_empty() {
            arcs.push(DagArc {
                from: u,
                to: sink,
                p: Rat::one(),
                base: None,
            });
            continue;
        }
        let deg = rng.gen_range(1..=3.min(next.len()));
        let mut targets: Vec<usize> = Vec::new();
        while targets.len() < deg {
            let v = next[rng.gen_range(0..next.len())];
            if !targets.contains(&v) {
                targets.push(v);
            }
        }
        let w: Vec<i64> = targets.iter().map(|_| rng.gen_range(1..=4)).collect();
        let sum: i64 = w.iter().sum();
        for (v, x) in targets.into_iter().zip(w) {
            arcs.push(DagArc {
                from: u,
                to: v,
                p: frac(x, sum),
                base: None,
            });
        }
    }
    let kappa = rng.gen_range(2..=64.min(sink));
    let mut supply = vec![Rat::zero(); n];
    for v in rand::seq::index::sample(&mut rng, sink, kappa) {
        supply[v] = Rat::one();
    }
    let mut is_sink = vec![false; n];
    is_sink[sink] = true;
    FlowDag::new(n, arcs, supply, is_sink).unwrap()
}

fn c9() -> Outcome {
    let cal = Calibration::default();
    let (mut pairs, mut fails, mut recovered) = (0, 0, 0);
    for idx in 0..10u64 {
        let dag = calibration_dag(idx);
        let ec = expected_congestion(&dag);
        let peak = ec.iter().fold(Rat::zero(), |a, x| a.max(x.clone()));
        // Uniform node capacity putting the splittable congestion at most 2.
        let cap = (peak.clone() / rat(2)).ceil().max(Rat::one());
        let nc = to_f64(&(peak / &cap));
        let kappa = dag.kappa();
        let trials = trials_for(dag.n, cal.trials_c);
        let pass = |t: usize, seed: u64| -> bool {
            let r = round_best(&dag, t, seed).unwrap();
            let cong = r.diagnostics.max_congestion as f64 / to_f64(&cap);
            let height = r
                .diagnostics
                .effective_heights
                .values()
                .copied()
                .max()
                .unwrap_or(0) as f64;
            cong <= cal.congestion_bound(nc, kappa) && height <= cal.height_bound(nc, dag.n)
        };
        for seed in 0..50u64 {
            pairs += 1;
            if !pass(trials, seed) {
                fails += 1;
                if pass(2 * trials, seed) {
                    recovered += 1;
                }
            }
        }
    }
    let rate = 1.0 - fails as f64 / pairs as f64;
    let msg = format!(
        "{pairs} pairs, pass rate {:.3}, {recovered}/{fails} failures recovered",
        rate
    );
    if rate >= 0.98 && recovered == fails {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fixed_dags() -> Vec<FlowDag> {
    let specs: [(&[(usize, usize, i64, i64)], &[usize]); 5] = [
        (
            &[
                (0, 2, 1, 2),
                (0, 3, 1, 2),
                (1, 3, 1, 3),
                (1, 4, 2, 3),
                (2, 5, 1, 1),
                (3, 5, 1, 2),
                (3, 6, 1, 2),
                (4, 6, 3, 4),
                (4, 5, 1, 4),
                (5, 7, 1, 1),
                (6, 7, 1, 1),
            ],
            &[0, 1, 2, 4],
        ),
        (
            &[
                (0, 1, 1, 2),
                (0, 2, 1, 2),
                (1, 3, 1, 2),
                (1, 4, 1, 2),
                (2, 4, 1, 2),
                (2, 5, 1, 2),
                (3, 6, 1, 1),
                (4, 6, 1, 2),
                (4, 7, 1, 2),
                (5, 7, 1, 1),
                (6, 7, 1, 1),
            ],
            &[0, 1, 2, 3, 5],
        ),
        (
            &[
                (0, 3, 1, 3),
                (0, 4, 1, 3),
                (0, 5, 1, 3),
                (1, 3, 1, 2),
                (1, 5, 1, 2),
                (2, 4, 1, 1),
                (3, 6, 1, 1),
                (4, 6, 2, 3),
                (4, 7, 1, 3),
                (5, 6, 1, 2),
                (5, 7, 1, 2),
                (6, 7, 1, 1),
            ],
            &[0, 1, 2],
        ),
        (
            &[
                (0, 1, 1, 1),
                (1, 2, 1, 2),
                (1, 3, 1, 2),
                (2, 4, 1, 1),
                (3, 4, 1, 4),
                (3, 5, 3, 4),
                (4, 6, 1, 1),
                (5, 6, 1, 2),
                (5, 7, 1, 2),
                (6, 7, 1, 1),
            ],
            &[0, 1, 2, 3, 4, 5, 6],
        ),
        (
            &[
                (0, 4, 1, 2),
                (0, 5, 1, 2),
                (1, 4, 1, 4),
                (1, 5, 3, 4),
                (2, 5, 1, 2),
                (2, 6, 1, 2),
                (3, 6, 2, 3),
                (3, 4, 1, 3),
                (4, 7, 1, 1),
                (5, 7, 1, 1),
                (6, 7, 1, 1),
            ],
            &[0, 1, 2, 3],
        ),
    ];
    specs
        .iter()
        .map(|(arcs, sources)| {
            let arcs = arcs
                .iter()
                .map(|&(u, v, a, b)| DagArc {
                    from: u,
                    to: v,
                    p: frac(a, b),
                    base: None,
                })
                .collect();
            let mut supply = vec![Rat::zero(); 8];
            for &s in *sources {
                supply[s] = Rat::one();
            }
            let mut sink = vec![false; 8];
            sink[7] = true;
            FlowDag::new(8, arcs, supply, sink).unwrap()
        })
        .collect()
}

fn c10() -> Outcome {
    const TRIALS: u64 = 10_000;
    let mut worst = 0.0f64;
    for (d, dag) in fixed_dags().iter().enumerate() {
        let want = expected_congestion(dag);
        let mut sum = vec![0u64; dag.n];
        for i in 0..TRIALS {
            let choice = confluent::rounding::round_with(dag, &mut trial_rng(31337 + d as u64, i));
            for (v, c) in diagnostics(dag, &choice).node_congestion.iter().enumerate() {
                sum[v] += c;
            }
        }
        for v in 0..dag.n {
            if !want[v].is_positive() {
                continue;
            }
            let w = to_f64(&want[v]);
            let rel = (sum[v] as f64 / TRIALS as f64 - w).abs() / w;
            worst = worst.max(rel);
            if rel > 0.05 {
                return Err(format!(
                    "dag {d} node {v}: mean {} vs {w}",
                    sum[v] as f64 / TRIALS as f64
                ));
            }
        }
    }
    Ok(format!("largest relative error {worst:.4}"))
}

fn c11() -> Outcome {
    let spec = CorpusSpec {
        nodes: (3, 7),
        ..CorpusSpec::default()
    };
    let horizons = [1u64, 2, 3, 5, 8, 12, 20];
    let mut n = 0;
    let mut i = 0u64;
    while n < 50 {
        let g = gen_instance(&spec, 1111, i).map_err(|e| e.to_string())?;
        i += 1;
        let ctx = |e: Error| format!("instance {}: {e}", i - 1);
        let sweep = maxflow_over_time_sweep(
            &g,
            &horizons,
            &SolveParams {
                seed: i,
                ..SolveParams::default()
            },
        )
        .map_err(ctx)?;
        let mut prev = Rat::zero();
        for pt in &sweep {
            if pt.delivered < prev {
                return Err(format!(
                    "instance {}: delivered drops to {} at T={}",
                    i - 1,
                    pt.delivered,
                    pt.horizon
                ));
            }
            prev = pt.delivered.clone();
            let tr = simulate(&g, &pt.routing, pt.realized_horizon, SimOptions::default())
                .map_err(ctx)?;
            if !sim_ok(&tr)
                || tr.delivered_by(pt.realized_horizon) != pt.delivered
                || pt.delivered > g.total_supply()
            {
                return Err(format!(
                    "instance {}: schedule at T={} infeasible",
                    i - 1,
                    pt.horizon
                ));
            }
        }
        n += 1;
    }
    Ok(format!("{n} sweeps over {} horizons", horizons.len()))
}

fn c12() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let g = gen_instance(
        &CorpusSpec {
            nodes: (8, 8),
            ..CorpusSpec::default()
        },
        12,
        0,
    )
    .map_err(|e| e.to_string())?;
    let input = dir.path().join("net.json");
    std::fs::write(&input, write_network(&g)).map_err(|e| e.to_string())?;
    let mut results = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.json"));
        let args: Vec<String> = [
            "confluent",
            "solve",
            "quickest",
            input.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let code = confluent::cli::main_with_args(&args);
        if code != 0 {
            return Err(format!("exit code {code}"));
        }
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
        results.push(v["result"].clone());
    }
    if results[0] != results[1] || results[0].is_null() {
        return Err("results differ".into());
    }
    Ok(format!("claimed_time {}", results[0]["claimed_time"]))
}

fn main() {
    let criteria: Vec<(u32, &str, u64, fn() -> Outcome)> = vec![
        (1, "edge-transit formula", 1, c1),
        (2, "confluence and conservation", 120, c2),
        (3, "oracle soundness", 300, c3),
        (4, "flow-over-time transforms", 60, c4),
        (5, "re-routing contracts", 120, c5),
        (6, "separating cuts", 30, c6),
        (7, "half-grid bounds", 30, c7),
        (8, "gadget dichotomy", 60, c8),
        (9, "rounding statistics", 600, c9),
        (10, "Monte-Carlo expectation", 60, c10),
        (11, "max-flow-over-time sweep", 120, c11),
        (12, "determinism", 10, c12),
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = BTreeMap::new();
    for (id, name, limit, f) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let res = f();
        let dt = t0.elapsed();
        let res = match res {
            Ok(m) if dt > Duration::from_secs(limit) => {
                Err(format!("{m}; over the {limit}s limit"))
            }
            r => r,
        };
        match &res {
            Ok(m) => println!(
                "criterion {id:>2} PASS  {name}: {m} ({:.2}s)",
                dt.as_secs_f64()
            ),
            Err(m) => {
                println!(
                    "criterion {id:>2} FAIL  {name}: {m} ({:.2}s)",
                    dt.as_secs_f64()
                );
                failed.insert(id, m.clone());
            }
        }
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
