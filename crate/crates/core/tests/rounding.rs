use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use confluent::netcore::rat::frac;
use confluent::netcore::{Error, Rat};
use confluent::rounding::{
    diagnostics, expected_congestion, round_best, round_once, trial_rng, DagArc, FlowDag,
};

/// Layered random DAG on `n` nodes (last node is the sink) with unit supplies.
fn random_dag(seed: u64, n: usize, max_deg: usize) -> FlowDag {
    let mut rng = trial_rng(seed, 0);
    let sink = n - 1;
    let mut arcs = Vec::new();
    for u in 0..sink {
        let cands: Vec<usize> = (u + 1..n).collect();
        let deg = rng.gen_range(1..=max_deg.min(cands.len()));
        let mut targets = Vec::new();
        while targets.len() < deg {
            let v = cands[rng.gen_range(0..cands.len())];
            if !targets.contains(&v) {
                targets.push(v);
            }
        }
        let w: Vec<i64> = targets.iter().map(|_| rng.gen_range(1..=3)).collect();
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
    let supply = (0..n)
        .map(|v| {
            if v < sink && rng.gen_bool(0.6) {
                Rat::one()
            } else {
                Rat::zero()
            }
        })
        .collect();
    let mut is_sink = vec![false; n];
    is_sink[sink] = true;
    FlowDag::new(n, arcs, supply, is_sink).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rounding_is_confluent(seed in 0u64..100_000, n in 2usize..30) {
        let dag = random_dag(seed, n, 3);
        let choice = round_once(&dag, seed);
        for v in 0..n {
            match choice[v] {
                Some(i) => prop_assert_eq!(dag.arcs[i].from, v),
                None => prop_assert!(dag.out[v].is_empty()),
            }
            let mut x = v;
            let mut steps = 0;
            while let Some(i) = choice[x] {
                x = dag.arcs[i].to;
                steps += 1;
                prop_assert!(steps <= n, "chosen arcs form a cycle");
            }
            prop_assert!(dag.sink[x]);
        }
    }

    #[test]
    fn edge_count_at_most_node_count(seed in 0u64..100_000, n in 2usize..30) {
        let dag = random_dag(seed, n, 3);
        let choice = round_once(&dag, seed ^ 0xabc);
        let d = diagnostics(&dag, &choice);
        let mut edge_max = 0;
        for (v, c) in choice.iter().enumerate() {
            if let Some(i) = c {
                let through = d.node_congestion[v];
                prop_assert!(through <= d.node_congestion[dag.arcs[*i].to]);
                edge_max = edge_max.max(through);
            }
        }
        prop_assert!(edge_max <= d.max_congestion);
        let sources = dag.kappa() as u64;
        let at_sink: u64 = (0..n).filter(|&v| dag.sink[v]).map(|v| d.node_congestion[v]).sum();
        prop_assert_eq!(at_sink, sources);
    }

    #[test]
    fn expectation_matches_enumeration(seed in 0u64..100_000, n in 2usize..8) {
        let dag = random_dag(seed, n, 2);
        let mut exact = vec![Rat::zero(); n];
        let nodes: Vec<usize> = (0..n).filter(|&v| !dag.out[v].is_empty()).collect();
        let mut idx = vec![0usize; nodes.len()];
        loop {
            let mut choice = vec![None; n];
            let mut p = Rat::one();
            for (k, &v) in nodes.iter().enumerate() {
                let i = dag.out[v][idx[k]];
                choice[v] = Some(i);
                p *= &dag.arcs[i].p;
            }
            let d = diagnostics(&dag, &choice);
            for v in 0..n {
                exact[v] += &p * Rat::from_integer(d.node_congestion[v].into());
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < dag.out[nodes[k]].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        prop_assert_eq!(expected_congestion(&dag), exact);
    }
}

#[test]
fn best_of_trials_ignores_thread_count() {
    let dag = random_dag(5, 60, 3);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| round_best(&dag, 16, 99).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.choice, b.choice);
    assert_eq!(a.trial, b.trial);
}

#[test]
fn non_uniform_supplies_rejected() {
    let arcs = vec![
        DagArc {
            from: 0,
            to: 2,
            p: Rat::one(),
            base: None,
        },
        DagArc {
            from: 1,
            to: 2,
            p: Rat::one(),
            base: None,
        },
    ];
    let dag = FlowDag::new(
        3,
        arcs,
        vec![Rat::one(), frac(2, 1), Rat::zero()],
        vec![false, false, true],
    )
    .unwrap();
    assert!(matches!(
        round_best(&dag, 4, 0),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn probabilities_must_sum_to_one() {
    let arcs = vec![DagArc {
        from: 0,
        to: 1,
        p: frac(1, 2),
        base: None,
    }];
    assert!(FlowDag::new(2, arcs, vec![Rat::one(), Rat::zero()], vec![false, true]).is_err());
}
