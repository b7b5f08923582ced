//! Minimum-weight length-bounded paths to the sinks (Pareto labels).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::netcore::{Arc, Network, Path, Rat};

struct Label {
    w: Rat,
    next: Option<(Arc, usize)>,
}

/// For every node, the minimum-weight path to any sink with length at most `budget`.
/// Arc weights must be non-negative.
pub fn best_paths(
    net: &Network,
    weight: &dyn Fn(Arc) -> Rat,
    budget: u64,
) -> Vec<Option<(Rat, Path)>> {
    let n = net.n();
    let inc = net.in_arcs();
    let mut labels: Vec<Label> = Vec::new();
    let mut min_len: Vec<Option<u64>> = vec![None; n];
    let mut best: Vec<Option<usize>> = vec![None; n];
    let mut node_of: Vec<usize> = Vec::new();
    let mut heap = BinaryHeap::new();
    for &t in &net.sinks {
        labels.push(Label {
            w: Rat::from_integer(0.into()),
            next: None,
        });
        node_of.push(t);
        heap.push(Reverse((
            labels[labels.len() - 1].w.clone(),
            0u64,
            labels.len() - 1,
        )));
    }
    let weights: std::collections::HashMap<Arc, Rat> =
        net.arcs().into_iter().map(|a| (a, weight(a))).collect();
    while let Some(Reverse((w, l, id))) = heap.pop() {
        let v = node_of[id];
        if min_len[v].map_or(false, |m| m <= l) {
            continue;
        }
        min_len[v] = Some(l);
        if best[v].is_none() {
            best[v] = Some(id);
        }
        for &a in &inc[v] {
            let u = net.tail(a);
            if net.is_sink(u) {
                continue;
            }
            let nl = l.saturating_add(net.len(a));
            if nl > budget || min_len[u].map_or(false, |m| m <= nl) {
                continue;
            }
            let nw = &w + &weights[&a];
            labels.push(Label {
                w: nw.clone(),
                next: Some((a, id)),
            });
            node_of.push(u);
            heap.push(Reverse((nw, nl, labels.len() - 1)));
        }
    }
    (0..n)
        .map(|v| {
            best[v].map(|id| {
                let mut arcs = Vec::new();
                let mut cur = id;
                while let Some((a, nx)) = labels[cur].next {
                    arcs.push(a);
                    cur = nx;
                }
                let p = Path::from_arcs(net, v, arcs).expect("label chain is a path");
                (labels[id].w.clone(), p)
            })
        })
        .collect()
}
