use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;

use confluent::instances::{gen_instance, CorpusSpec};
use confluent::monotonic::{route_monotone, route_monotone_relaxed, MonotoneParams};
use confluent::multilayer::{build_layers, demand_max_static, LayerArc, MultilayerParams};
use confluent::netcore::rat::rat;
use confluent::netcore::{flow_stats, routing_to_pathflow, validate, Network, Rat};
use confluent::staticflow::{max_flow, node_to_edge_capacitated};

fn monotone(seed: u64) -> Network {
    let spec = CorpusSpec {
        monotone: true,
        supply: (1, 1),
        nodes: (3, 12),
        max_sources: 6,
        ..CorpusSpec::default()
    };
    gen_instance(&spec, seed, 0).unwrap()
}

fn unit_caps(seed: u64) -> Network {
    let spec = CorpusSpec {
        supply: (1, 1),
        cap: (1, 8),
        nodes: (3, 9),
        dag: true,
        ..CorpusSpec::default()
    };
    let mut g = gen_instance(&spec, seed, 0).unwrap();
    for e in g.edges.iter_mut() {
        let mut c = Rat::one();
        while c < e.cap {
            c *= rat(2);
        }
        e.cap = c;
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relaxed_monotone_routes_every_supply(seed in 0u64..100_000) {
        let g = monotone(seed);
        match route_monotone_relaxed(&g, &MonotoneParams { seed, ..Default::default() }) {
            Ok(res) => {
                prop_assert_eq!(res.routing.out.len(), g.n());
                res.routing.validate(&g).unwrap();
                let f = routing_to_pathflow(&g, &res.routing, &g.supply).unwrap();
                prop_assert_eq!(f.value(), g.total_supply());
                prop_assert_eq!(res.flow.value(), g.total_supply());
            }
            Err(confluent::Error::Infeasible(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn monotone_rounding_of_given_flow(seed in 0u64..100_000) {
        let g = monotone(seed);
        let (split, map) = node_to_edge_capacitated(&g);
        let sf = max_flow(&split, &split.supply).unwrap();
        prop_assume!(sf.value() == g.total_supply());
        let f = map.flow_back(&g, &sf);
        prop_assert!(flow_stats(&g, &f).node_congestion <= Rat::one());
        let res = route_monotone(&g, &f, &MonotoneParams { base: Some(2), trials: 4, seed }).unwrap();
        res.routing.validate(&g).unwrap();
        let routed = routing_to_pathflow(&g, &res.routing, &g.supply).unwrap();
        prop_assert_eq!(routed.value(), g.total_supply());
        prop_assert_eq!(&res.node_congestion, &flow_stats(&g, &res.flow).node_congestion);
    }

    #[test]
    fn layers_are_monotone(seed in 0u64..100_000) {
        let g = unit_caps(seed);
        let h = build_layers(&g).unwrap();
        prop_assert!(h.net.monotone);
        prop_assert!(validate(&h.net).is_ok());
        let vertical = h.arc.iter().filter(|a| matches!(a, LayerArc::Vertical { .. } | LayerArc::DummyEntry { .. })).count();
        prop_assert!(vertical >= g.edges.len());
    }

    #[test]
    fn demand_max_bookkeeping(seed in 0u64..100_000, budget in 1u64..12) {
        let spec = CorpusSpec { supply: (1, 8), ..CorpusSpec::default() };
        let g = gen_instance(&spec, seed, 3).unwrap();
        let dm = demand_max_static(&g, Some(budget), &MultilayerParams { seed, ..Default::default() }).unwrap();
        dm.routing.validate(&g).unwrap();
        let selected: BTreeSet<usize> = dm.selected.iter().copied().collect();
        prop_assert!(dm.dropped.iter().all(|v| !selected.contains(v)));
        let value: Rat = dm.selected.iter().map(|&v| g.supply[v].clone()).sum();
        prop_assert_eq!(&dm.value, &value);
        prop_assert!(dm.value <= dm.upper_bound);
        let mut sup = vec![Rat::zero(); g.n()];
        for &v in &dm.selected {
            sup[v] = g.supply[v].clone();
        }
        let f = routing_to_pathflow(&g, &dm.routing, &sup).unwrap();
        let st = flow_stats(&g, &f);
        prop_assert!(st.edge_congestion <= Rat::one());
        prop_assert!(st.max_length <= budget);
    }
}
