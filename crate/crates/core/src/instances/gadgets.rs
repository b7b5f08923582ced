use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::netcore::rat::rat;
use crate::netcore::{Error, Network, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GadgetKind {
    AlphaBeta {
        alpha: u64,
        m: u64,
        yes: bool,
    },
    Bo3dm {
        n: usize,
        m: usize,
        triples: Vec<(usize, usize, usize)>,
    },
}

#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub kind: GadgetKind,
    pub net: Network,
    /// Number of vertices inside the embedded two-paths core.
    pub p: u64,
    /// Horizon attached to the construction, if any.
    pub horizon: Option<u64>,
}

/// Two-sources gadget with a trivial two-disjoint-paths core. `beta = 2 alpha`; sources
/// carry `M alpha` and `M beta`. The YES core has two disjoint arcs, the NO core forces
/// both sources through one node.
pub fn gen_alphabeta(alpha: u64, m: u64, yes: bool) -> Result<GadgetInstance> {
    if alpha == 0 || m == 0 {
        return Err(Error::Precondition("alpha and M must be positive".into()));
    }
    let (a, b) = (rat(alpha as i64), rat(2 * alpha as i64));
    let mut g = Network::new(true);
    let id: BTreeMap<&str, usize> = ["s1", "s2", "x1", "x2", "y1", "y2", "t"]
        .into_iter()
        .map(|x| (x, g.add_node(x)))
        .collect();
    g.add_edge(id["s1"], id["x1"], a.clone(), 1);
    g.add_edge(id["s2"], id["x2"], b.clone(), 1);
    g.add_edge(id["y1"], id["t"], a.clone(), 1);
    g.add_edge(id["y2"], id["t"], b.clone(), 1);
    let p = if yes {
        g.add_edge(id["x1"], id["y1"], a.clone(), 1);
        g.add_edge(id["x2"], id["y2"], b.clone(), 1);
        4
    } else {
        let w = g.add_node("w");
        g.add_edge(id["x1"], w, b.clone(), 1);
        g.add_edge(id["x2"], w, b.clone(), 1);
        g.add_edge(w, id["y1"], a.clone(), 1);
        g.add_edge(w, id["y2"], b.clone(), 1);
        5
    };
    g.add_sink(id["t"]);
    g.supply[id["s1"]] = rat(m as i64) * &a;
    g.supply[id["s2"]] = rat(m as i64) * &b;
    Ok(GadgetInstance {
        kind: GadgetKind::AlphaBeta { alpha, m, yes },
        net: g,
        p,
        horizon: None,
    })
}

/// Bounded-occurrence 3-dimensional matching gadget. Triples are 1-based `(a, b, c)`
/// over `[n]`; every element must occur in the same number `M` of triples. All
/// capacities are 1, every source has supply 1 and the attached horizon is 14.
pub fn gen_bo3dm(triples: &[(usize, usize, usize)], directed: bool) -> Result<GadgetInstance> {
    let n = triples
        .iter()
        .map(|t| t.0.max(t.1).max(t.2))
        .max()
        .unwrap_or(0);
    if n == 0 || triples.iter().any(|t| t.0 == 0 || t.1 == 0 || t.2 == 0) {
        return Err(Error::Invalid("triples must use elements 1..=n".into()));
    }
    let mut occ = vec![[0usize; 3]; n + 1];
    for &(a, b, c) in triples {
        occ[a][0] += 1;
        occ[b][1] += 1;
        occ[c][2] += 1;
    }
    let m = occ[1][0];
    for (i, o) in occ.iter().enumerate().skip(1) {
        for (k, &x) in o.iter().enumerate() {
            if x != m {
                let set = ["A", "B", "C"][k];
                return Err(Error::Invalid(format!(
                    "element {set}{i} occurs {x} times, expected {m}"
                )));
            }
        }
    }
    let mut g = Network::new(directed);
    let s = g.add_node("s");
    let t = g.add_node("t");
    let one = rat(1);
    let mut a = vec![vec![]; n + 1];
    for (i, ai) in a.iter_mut().enumerate().skip(1) {
        for l in 1..m {
            let v = g.add_node(&format!("a{i}_{l}"));
            g.add_edge(v, t, one.clone(), 3);
            ai.push(v);
        }
    }
    let mut b = vec![0; n + 1];
    let mut c = vec![0; n + 1];
    for i in 1..=n {
        let si = g.add_node(&format!("s{i}"));
        b[i] = g.add_node(&format!("b{i}"));
        c[i] = g.add_node(&format!("c{i}"));
        g.add_edge(si, s, one.clone(), 2);
        g.add_edge(s, b[i], one.clone(), 2);
        g.add_edge(c[i], t, one.clone(), 2);
        g.supply[si] = one.clone();
    }
    for (mu, &(p, q, r)) in triples.iter().enumerate() {
        let mu = mu + 1;
        let sp = g.add_node(&format!("sp{mu}"));
        let x = g.add_node(&format!("x{mu}"));
        let y = g.add_node(&format!("y{mu}"));
        g.supply[sp] = one.clone();
        g.add_edge(sp, s, one.clone(), 2);
        g.add_edge(s, x, one.clone(), 5);
        g.add_edge(b[q], x, one.clone(), 2);
        g.add_edge(x, y, one.clone(), 2);
        g.add_edge(y, c[r], one.clone(), 4);
        for &v in &a[p] {
            g.add_edge(y, v, one.clone(), 2);
        }
    }
    g.add_sink(t);
    Ok(GadgetInstance {
        kind: GadgetKind::Bo3dm {
            n,
            m,
            triples: triples.to_vec(),
        },
        net: g,
        p: 0,
        horizon: Some(14),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabeta_shape() {
        let g = gen_alphabeta(1, 10, true).unwrap();
        assert_eq!(g.net.total_supply(), rat(30));
        assert_eq!(g.net.edges.len(), 6);
        let g = gen_alphabeta(2, 10, false).unwrap();
        assert_eq!(g.net.n(), 8);
        assert_eq!(g.net.supply[1], rat(40));
    }

    #[test]
    fn bo3dm_occurrences() {
        assert!(gen_bo3dm(&[(1, 1, 1), (2, 2, 2), (1, 2, 2)], true).is_err());
        let g = gen_bo3dm(&[(1, 1, 1), (2, 2, 2), (1, 2, 2), (2, 1, 1)], false).unwrap();
        assert_eq!(
            g.kind,
            GadgetKind::Bo3dm {
                n: 2,
                m: 2,
                triples: vec![(1, 1, 1), (2, 2, 2), (1, 2, 2), (2, 1, 1)]
            }
        );
        assert_eq!(g.net.n(), 2 + 2 + 3 * 2 + 3 * 4);
        assert!(g.net.edges.iter().all(|e| e.cap == rat(1)));
    }
}
