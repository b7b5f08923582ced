use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::netcore::rat::{pow2, rat};
use crate::netcore::{check, Error, Network, Rat, Result};
use crate::rounding::trial_rng;

/// Bounds for random single-sink instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSpec {
    pub count: usize,
    /// Node count range, sink included.
    pub nodes: (usize, usize),
    pub max_sources: usize,
    /// Integer capacity range.
    pub cap: (u64, u64),
    /// Largest capacity denominator; 1 keeps capacities integral.
    pub cap_denominator: u64,
    pub len: (u64, u64),
    pub supply: (u64, u64),
    /// Same supply on every source.
    pub uniform_supply: bool,
    /// Extra edges per node beyond the spanning backbone.
    pub density: f64,
    pub directed: bool,
    pub dag: bool,
    /// Node capacities non-decreasing along every arc.
    pub monotone: bool,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 10,
            nodes: (3, 8),
            max_sources: 4,
            cap: (1, 4),
            cap_denominator: 1,
            len: (0, 3),
            supply: (1, 6),
            uniform_supply: false,
            density: 1.0,
            directed: true,
            dag: false,
            monotone: false,
        }
    }
}

impl CorpusSpec {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Precondition(format!("corpus spec: {m}")));
        if self.nodes.0 < 2 || self.nodes.0 > self.nodes.1 {
            return bad("node range must satisfy 2 <= min <= max");
        }
        if self.max_sources == 0 {
            return bad("at least one source is required");
        }
        if self.cap.0 == 0 || self.cap.0 > self.cap.1 || self.cap_denominator == 0 {
            return bad("capacities must be positive with min <= max");
        }
        if self.len.0 > self.len.1 || self.supply.0 == 0 || self.supply.0 > self.supply.1 {
            return bad("length and supply ranges must be ordered and supplies positive");
        }
        if self.monotone && !self.directed {
            return bad("monotone networks are directed");
        }
        Ok(())
    }
}

/// One instance per index; instance `i` depends only on `(seed, i)`.
pub fn gen_random_corpus(spec: &CorpusSpec, seed: u64) -> Result<Vec<Network>> {
    spec.check()?;
    (0..spec.count)
        .map(|i| gen_instance(spec, seed, i as u64))
        .collect()
}

pub fn gen_instance(spec: &CorpusSpec, seed: u64, idx: u64) -> Result<Network> {
    spec.check()?;
    let mut rng = trial_rng(seed, idx);
    let n = rng.gen_range(spec.nodes.0..=spec.nodes.1);
    let mut g = Network::new(spec.directed);
    for i in 0..n - 1 {
        g.add_node(&format!("v{i}"));
    }
    let t = g.add_node("t");
    g.add_sink(t);
    let acyclic = spec.dag || spec.monotone;
    let cap = |rng: &mut rand_chacha::ChaCha8Rng| {
        let num = rng.gen_range(spec.cap.0..=spec.cap.1) as i64;
        let den = rng.gen_range(1..=spec.cap_denominator) as i64;
        Rat::new(num.into(), den.into())
    };
    let mut pairs = std::collections::BTreeSet::new();
    for u in 0..n - 1 {
        let v = rng.gen_range(u + 1..n);
        pairs.insert((u, v));
        let c = cap(&mut rng);
        let l = rng.gen_range(spec.len.0..=spec.len.1);
        g.add_edge(u, v, c, l);
    }
    let extra = (spec.density * (n - 1) as f64).round() as usize;
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..n - 1), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let (mut u, mut v) = (a.min(b), a.max(b));
        if !acyclic && spec.directed && rng.gen_bool(0.5) && v != t {
            std::mem::swap(&mut u, &mut v);
        }
        if !pairs.insert((u, v)) {
            continue;
        }
        let c = cap(&mut rng);
        let l = rng.gen_range(spec.len.0..=spec.len.1);
        g.add_edge(u, v, c, l);
    }
    if spec.monotone {
        let mut level = 0i64;
        for v in 0..n - 1 {
            if rng.gen_bool(0.3) {
                level += 1;
            }
            g.set_node_cap(v, pow2(level));
        }
        g.monotone = true;
    }
    let k = rng.gen_range(1..=spec.max_sources.min(n - 1));
    let d = rat(rng.gen_range(spec.supply.0..=spec.supply.1) as i64);
    for v in sample(&mut rng, n - 1, k) {
        g.supply[v] = if spec.uniform_supply {
            d.clone()
        } else {
            rat(rng.gen_range(spec.supply.0..=spec.supply.1) as i64)
        };
    }
    check(&g)?;
    Ok(g)
}
