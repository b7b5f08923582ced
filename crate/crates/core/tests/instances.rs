use std::collections::BTreeSet;

use num_traits::Zero;

use confluent::dynamic::{simulate, DynamicRouting, Release, Routing, SimOptions};
use confluent::instances::{
    build_cut, gen_alphabeta, gen_bo3dm, gen_half_grid, gen_tree_family, harmonic, separates,
    to_dimacs, Gadget,
};
use confluent::netcore::rat::{frac, rat};
use confluent::netcore::{Arc, Network, Path, PathFlow, Rat};

/// Releases each path's full value at step 0.
fn release_all(f: PathFlow) -> DynamicRouting {
    let schedule = f
        .entries
        .iter()
        .enumerate()
        .map(|(j, (_, x))| {
            (
                j,
                vec![Release {
                    start: 0,
                    rate: x.clone(),
                    duration: 1,
                }],
            )
        })
        .collect();
    DynamicRouting {
        routing: Routing::Paths(f),
        schedule,
    }
}

#[test]
fn half_grid_supply_is_harmonic() {
    for (n, h) in [
        (1, frac(1, 1)),
        (2, frac(3, 2)),
        (3, frac(11, 6)),
        (4, frac(25, 12)),
    ] {
        assert_eq!(harmonic(n), h);
        let hg = gen_half_grid(n, 6, Gadget::None).unwrap();
        assert_eq!(hg.net.total_supply(), rat(36) * h);
    }
}

#[test]
fn light_cut_forces_long_completion() {
    let m = 12u64;
    let mut checked = 0;
    for n in 2..=5 {
        let hg = gen_half_grid(n, m, Gadget::None).unwrap();
        let lens: u64 = hg.net.edges.iter().map(|e| e.len).sum();
        let need = Rat::from_integer((m * m).into()) * harmonic(n) / rat(2)
            - Rat::from_integer(lens.into());
        for seed in 0..30 {
            let fam = gen_tree_family(n, 1.0, seed);
            if fam.len() != n {
                continue;
            }
            let cut = build_cut(n, &fam).unwrap();
            assert!(cut.weight <= rat(2) && separates(&fam, &cut.edges));
            let entries = fam
                .iter()
                .map(|p| {
                    (
                        hg.realize(p).unwrap(),
                        hg.net.supply[hg.source(p.row)].clone(),
                    )
                })
                .collect();
            let dr = release_all(PathFlow { entries });
            let tr = simulate(&hg.net, &dr, 10 * m * m, SimOptions::default()).unwrap();
            let done = tr.makespan.expect("family finishes");
            assert!(
                Rat::from_integer(done.into()) >= need,
                "N={n} seed {seed}: {done} < {need}"
            );
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn bo3dm_matching_gives_disjoint_short_paths() {
    let triples = [(1, 1, 1), (2, 2, 2), (1, 2, 2), (2, 1, 1)];
    let gi = gen_bo3dm(&triples, true).unwrap();
    let g = &gi.net;
    assert_eq!(gi.horizon, Some(14));
    assert!(g.edges.iter().all(|e| e.cap == rat(1)));
    let walks: [&[&str]; 4] = [
        &["s1", "s", "b1", "x1", "y1", "c1", "t"],
        &["s2", "s", "b2", "x2", "y2", "c2", "t"],
        &["sp3", "s", "x3", "y3", "a1_1", "t"],
        &["sp4", "s", "x4", "y4", "a2_1", "t"],
    ];
    let mut used = BTreeSet::new();
    let mut entries = Vec::new();
    for w in walks {
        let nodes: Vec<usize> = w.iter().map(|x| g.id(x).unwrap()).collect();
        let arcs: Vec<Arc> = nodes
            .windows(2)
            .map(|p| {
                Arc::fwd(
                    g.edges
                        .iter()
                        .position(|e| e.u == p[0] && e.v == p[1])
                        .unwrap(),
                )
            })
            .collect();
        for a in &arcs {
            assert!(used.insert(a.edge), "edge {} reused", a.edge);
        }
        let path = Path { nodes, arcs };
        assert!(path.length(g) <= 14);
        entries.push((path, rat(1)));
    }
    let tr = simulate(
        g,
        &release_all(PathFlow { entries }),
        14,
        SimOptions::default(),
    )
    .unwrap();
    assert_eq!(tr.delivered_by(14), rat(4));
}

#[test]
fn bo3dm_rejects_uneven_occurrence() {
    assert!(gen_bo3dm(&[(1, 1, 1), (1, 2, 2), (2, 2, 1)], true).is_err());
    assert!(gen_bo3dm(&[(0, 1, 1)], true).is_err());
}

#[test]
fn alphabeta_supplies() {
    for yes in [true, false] {
        let gi = gen_alphabeta(2, 10, yes).unwrap();
        let mut s: Vec<Rat> = gi
            .net
            .supply
            .iter()
            .filter(|x| !x.is_zero())
            .cloned()
            .collect();
        s.sort();
        assert_eq!(s, vec![rat(20), rat(40)]);
    }
}

#[test]
fn dimacs_lists_every_arc() {
    let hg = gen_half_grid(3, 4, Gadget::Yes).unwrap();
    let g: &Network = &hg.net;
    let text = to_dimacs(g);
    let arcs = text.lines().filter(|l| l.starts_with("a ")).count();
    assert_eq!(arcs, g.edges.len() + g.sources().len() + g.sinks.len());
    let p = text.lines().find(|l| l.starts_with("p max")).unwrap();
    assert_eq!(p, format!("p max {} {arcs}", g.n() + 2));
}
