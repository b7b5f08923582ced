//! Dinic max flow on integer capacities.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub struct Dinic {
    n: usize,
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<BigInt>,
    next: Vec<usize>,
    level: Vec<i64>,
    it: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl Dinic {
    pub fn new(n: usize) -> Dinic {
        Dinic {
            n,
            head: vec![NONE; n],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            level: vec![0; n],
            it: vec![0; n],
        }
    }

    /// Adds `u -> v` and returns the index of the forward residual arc.
    pub fn add(&mut self, u: usize, v: usize, c: BigInt) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.next.push(self.head[u]);
        self.head[u] = id;
        self.to.push(u);
        self.cap.push(BigInt::zero());
        self.next.push(self.head[v]);
        self.head[v] = id + 1;
        id
    }

    /// Flow currently on forward arc `id`.
    pub fn flow(&self, id: usize) -> BigInt {
        self.cap[id ^ 1].clone()
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut q = std::collections::VecDeque::new();
        self.level[s] = 0;
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            let mut e = self.head[u];
            while e != NONE {
                let v = self.to[e];
                if self.level[v] < 0 && self.cap[e].is_positive() {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
                e = self.next[e];
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, f: BigInt) -> BigInt {
        if u == t {
            return f;
        }
        while self.it[u] != NONE {
            let e = self.it[u];
            let v = self.to[e];
            if self.cap[e].is_positive() && self.level[v] == self.level[u] + 1 {
                let push = if self.cap[e] < f {
                    self.cap[e].clone()
                } else {
                    f.clone()
                };
                let d = self.dfs(v, t, push);
                if d.is_positive() {
                    self.cap[e] -= &d;
                    self.cap[e ^ 1] += &d;
                    return d;
                }
            }
            self.it[u] = self.next[e];
        }
        BigInt::zero()
    }

    pub fn run(&mut self, s: usize, t: usize) -> BigInt {
        let mut total = BigInt::zero();
        let inf: BigInt = self.cap.iter().fold(BigInt::from(1), |a, c| a + c);
        while self.bfs(s, t) {
            self.it = self.head.clone();
            loop {
                let f = self.dfs(s, t, inf.clone());
                if f.is_zero() {
                    break;
                }
                total += f;
            }
        }
        let _ = self.n;
        total
    }
}
