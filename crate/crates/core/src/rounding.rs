//! Randomised rounding of a splittable flow on a DAG into a confluent flow.
//!
//! Every non-sink node with outflow keeps exactly one out-arc, chosen with
//! probability equal to the share of its outflow on that arc.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::netcore::rat::log2f;
use crate::netcore::{Arc, ConfluentRouting, Error, Network, PathFlow, Rat, Result};

#[derive(Debug, Clone)]
pub struct DagArc {
    pub from: usize,
    pub to: usize,
    pub p: Rat,
    pub base: Option<Arc>,
}

#[derive(Debug, Clone)]
pub struct FlowDag {
    pub n: usize,
    pub arcs: Vec<DagArc>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
    pub source: Vec<bool>,
    pub sink: Vec<bool>,
    /// Supply per node; round_best requires all positive values to be equal.
    pub supply: Vec<Rat>,
    pub topo: Vec<usize>,
}

impl FlowDag {
    /// Builds a DAG from arcs `(from, to, p)`. Probabilities out of each node must sum to 1.
    pub fn new(n: usize, arcs: Vec<DagArc>, supply: Vec<Rat>, sink: Vec<bool>) -> Result<FlowDag> {
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, a) in arcs.iter().enumerate() {
            if a.from >= n || a.to >= n {
                return Err(Error::Invalid("arc endpoint out of range".into()));
            }
            if !a.p.is_positive() {
                return Err(Error::Invalid("arc probability must be positive".into()));
            }
            out[a.from].push(i);
            inc[a.to].push(i);
        }
        for v in 0..n {
            if !out[v].is_empty() {
                if sink[v] {
                    return Err(Error::Invalid("sink with out-arcs".into()));
                }
                let s = out[v].iter().fold(Rat::zero(), |acc, &i| acc + &arcs[i].p);
                if s != Rat::one() {
                    return Err(Error::Invalid(format!(
                        "probabilities out of node {v} sum to {s}"
                    )));
                }
            }
        }
        let mut indeg: Vec<usize> = inc.iter().map(|x| x.len()).collect();
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = stack.pop() {
            topo.push(v);
            for &i in out[v].iter().rev() {
                let w = arcs[i].to;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::Cycle("flow support is not acyclic".into()));
        }
        let source = supply.iter().map(|d| d.is_positive()).collect();
        Ok(FlowDag {
            n,
            arcs,
            out,
            inc,
            source,
            sink,
            supply,
            topo,
        })
    }

    pub fn kappa(&self) -> usize {
        self.source.iter().filter(|&&s| s).count()
    }

    /// Converts a choice into a routing on the base network.
    pub fn to_routing(&self, net: &Network, choice: &[Option<usize>]) -> ConfluentRouting {
        let mut r = ConfluentRouting::empty(net.n());
        for (v, c) in choice.iter().enumerate() {
            if let Some(i) = c {
                r.out[v] = self.arcs[*i].base;
            }
        }
        r
    }
}

/// DAG induced by a path flow on `net`: arc shares `f(a)/f_out(u)`, sources = positive supply.
pub fn induce_dag(net: &Network, f: &PathFlow) -> Result<FlowDag> {
    let loads = f.arc_loads(net);
    let mut fout = vec![Rat::zero(); net.n()];
    for (a, x) in &loads {
        fout[net.tail(*a)] += x;
    }
    let arcs = loads
        .iter()
        .filter(|(_, x)| x.is_positive())
        .map(|(a, x)| DagArc {
            from: net.tail(*a),
            to: net.head(*a),
            p: x / &fout[net.tail(*a)],
            base: Some(*a),
        })
        .collect();
    FlowDag::new(net.n(), arcs, net.supply.clone(), net.sink_mask())
}

/// Generator for trial `idx` under `master`: a ChaCha stream per trial.
pub fn trial_rng(master: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(idx);
    rng
}

/// Number of rounding trials, `ceil(c * log2 n)`, at least 1.
pub fn trials_for(n: usize, c: f64) -> usize {
    ((c * log2f(n as f64)).ceil() as usize).max(1)
}

/// One rounding: each node with out-arcs (in index order) keeps one, drawn with 64-bit resolution.
pub fn round_with(dag: &FlowDag, rng: &mut impl RngCore) -> Vec<Option<usize>> {
    let scale = BigInt::one() << 64;
    let mut choice = vec![None; dag.n];
    for v in 0..dag.n {
        let outs = &dag.out[v];
        if outs.is_empty() {
            continue;
        }
        let x = BigInt::from(rng.next_u64());
        let mut cum = Rat::zero();
        let mut pick = *outs.last().unwrap();
        for &i in outs {
            cum += &dag.arcs[i].p;
            if &x * cum.denom() < cum.numer() * &scale {
                pick = i;
                break;
            }
        }
        choice[v] = Some(pick);
    }
    choice
}

pub fn round_once(dag: &FlowDag, seed: u64) -> Vec<Option<usize>> {
    round_with(dag, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingDiagnostics {
    /// Number of sources whose path passes through each node (node included).
    pub node_congestion: Vec<u64>,
    pub max_congestion: u64,
    /// Root of every node's tree.
    pub root: Vec<usize>,
    /// Height in edges of each sink-rooted tree that contains a source.
    pub tree_heights: std::collections::BTreeMap<usize, u64>,
    /// Sources on the longest leaf-to-root path, start excluded, per sink-rooted tree.
    pub effective_heights: std::collections::BTreeMap<usize, u64>,
}

pub fn diagnostics(dag: &FlowDag, choice: &[Option<usize>]) -> RoundingDiagnostics {
    let n = dag.n;
    let mut cnt = vec![0u64; n];
    for &v in &dag.topo {
        if dag.source[v] {
            cnt[v] += 1;
        }
        if let Some(i) = choice[v] {
            let w = dag.arcs[i].to;
            cnt[w] += cnt[v];
        }
    }
    let mut depth = vec![0u64; n];
    let mut eff = vec![0u64; n];
    let mut root: Vec<usize> = (0..n).collect();
    for &v in dag.topo.iter().rev() {
        if let Some(i) = choice[v] {
            let w = dag.arcs[i].to;
            depth[v] = depth[w] + 1;
            eff[v] = eff[w] + dag.source[w] as u64;
            root[v] = root[w];
        }
    }
    let mut tree_heights = std::collections::BTreeMap::new();
    let mut effective_heights = std::collections::BTreeMap::new();
    for v in 0..n {
        let r = root[v];
        if !dag.sink[r] || cnt[r] == 0 {
            continue;
        }
        let h = tree_heights.entry(r).or_insert(0);
        *h = (*h).max(depth[v]);
        let e = effective_heights.entry(r).or_insert(0);
        *e = (*e).max(eff[v]);
    }
    let max_congestion = cnt.iter().copied().max().unwrap_or(0);
    RoundingDiagnostics {
        node_congestion: cnt,
        max_congestion,
        root,
        tree_heights,
        effective_heights,
    }
}

/// Expected number of sources routed through each node:
/// 0 for a non-source without in-arcs, 1 for a source without in-arcs,
/// `[source] + sum p(u,v) C(u)` otherwise.
pub fn expected_congestion(dag: &FlowDag) -> Vec<Rat> {
    let mut c = vec![Rat::zero(); dag.n];
    for &v in &dag.topo {
        let mut x = if dag.source[v] {
            Rat::one()
        } else {
            Rat::zero()
        };
        for &i in &dag.inc[v] {
            let a = &dag.arcs[i];
            x += &a.p * &c[a.from];
        }
        c[v] = x;
    }
    c
}

#[derive(Debug, Clone)]
pub struct RoundingResult {
    pub choice: Vec<Option<usize>>,
    pub diagnostics: RoundingDiagnostics,
    pub trial: usize,
}

/// Runs `trials` independent roundings and keeps the one with the smallest
/// (max congestion, trial index). Positive supplies must be uniform.
pub fn round_best(dag: &FlowDag, trials: usize, master: u64) -> Result<RoundingResult> {
    let pos: Vec<&Rat> = dag.supply.iter().filter(|d| d.is_positive()).collect();
    if pos.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Precondition(
            "rounding requires uniform supplies".into(),
        ));
    }
    let trials = trials.max(1);
    let best = (0..trials)
        .into_par_iter()
        .map(|i| {
            let choice = round_with(dag, &mut trial_rng(master, i as u64));
            let d = diagnostics(dag, &choice);
            (d.max_congestion, i, choice, d)
        })
        .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
        .unwrap();
    Ok(RoundingResult {
        choice: best.2,
        diagnostics: best.3,
        trial: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::rat::{frac, rat};

    fn arc(from: usize, to: usize, p: Rat) -> DagArc {
        DagArc {
            from,
            to,
            p,
            base: None,
        }
    }

    #[test]
    fn chain_heights() {
        // s1 -> s2 -> s3 -> t
        let dag = FlowDag::new(
            4,
            vec![arc(0, 1, rat(1)), arc(1, 2, rat(1)), arc(2, 3, rat(1))],
            vec![rat(1), rat(1), rat(1), rat(0)],
            vec![false, false, false, true],
        )
        .unwrap();
        let ch = round_once(&dag, 1);
        let d = diagnostics(&dag, &ch);
        assert_eq!(d.tree_heights[&3], 3);
        assert_eq!(d.effective_heights[&3], 2);
        assert_eq!(d.max_congestion, 3);
        assert_eq!(expected_congestion(&dag)[3], rat(3));
    }

    #[test]
    fn diamond_expectation() {
        // s -> a (1/3), s -> b (2/3), a -> t, b -> t
        let dag = FlowDag::new(
            4,
            vec![
                arc(0, 1, frac(1, 3)),
                arc(0, 2, frac(2, 3)),
                arc(1, 3, rat(1)),
                arc(2, 3, rat(1)),
            ],
            vec![rat(1), rat(0), rat(0), rat(0)],
            vec![false, false, false, true],
        )
        .unwrap();
        let c = expected_congestion(&dag);
        assert_eq!(c[1], frac(1, 3));
        assert_eq!(c[2], frac(2, 3));
        assert_eq!(c[3], rat(1));
    }

    #[test]
    fn non_uniform_rejected() {
        let dag = FlowDag::new(
            3,
            vec![arc(0, 2, rat(1)), arc(1, 2, rat(1))],
            vec![rat(1), rat(2), rat(0)],
            vec![false, false, true],
        )
        .unwrap();
        assert!(round_best(&dag, 3, 0).is_err());
    }

    #[test]
    fn best_is_deterministic() {
        let dag = FlowDag::new(
            4,
            vec![
                arc(0, 1, frac(1, 2)),
                arc(0, 2, frac(1, 2)),
                arc(1, 3, rat(1)),
                arc(2, 3, rat(1)),
            ],
            vec![rat(1), rat(0), rat(0), rat(0)],
            vec![false, false, false, true],
        )
        .unwrap();
        let a = round_best(&dag, 8, 42).unwrap();
        let b = round_best(&dag, 8, 42).unwrap();
        assert_eq!(a.choice, b.choice);
        assert_eq!(a.trial, b.trial);
    }
}
