use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::netcore::rat::frac;
use crate::netcore::{Arc, ConfluentRouting, Error, Network, Path, Rat, Result};
use crate::rounding::trial_rng;

/// Two-disjoint-paths instance embedded at every degree-4 grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gadget {
    None,
    Yes,
    No,
}

impl Gadget {
    /// Number of vertices inside the embedded instance.
    pub fn vertices(self) -> u64 {
        match self {
            Gadget::None => 1,
            Gadget::Yes => 4,
            Gadget::No => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridRole {
    Source(usize),
    Cell(usize, usize),
    Inner(usize, usize),
    Terminal(usize),
    Sink,
}

#[derive(Debug, Clone, Copy)]
struct Ports {
    in_h: usize,
    out_h: usize,
    in_v: usize,
    out_v: usize,
}

#[derive(Debug, Clone)]
pub struct HalfGrid {
    pub n: usize,
    pub m: u64,
    pub gadget: Gadget,
    pub net: Network,
    pub role: Vec<GridRole>,
    ports: HashMap<(usize, usize), Ports>,
    edge_of: HashMap<(usize, usize), usize>,
}

pub fn harmonic(n: usize) -> Rat {
    (1..=n as i64).map(|i| frac(1, i)).sum()
}

/// Half-grid with rows `1..=n` (bottom to top) and columns `1..=n` (right to left).
/// Cell `(r, c)` exists for `r <= c`. Source `s_r` feeds row `r` at column `n`; column
/// `c` drains through `t_c` into the sink `t`.
pub fn gen_half_grid(n: usize, m: u64, gadget: Gadget) -> Result<HalfGrid> {
    if n == 0 || m == 0 {
        return Err(Error::Precondition(
            "half-grid needs N >= 1 and M >= 1".into(),
        ));
    }
    let mut g = Network::new(true);
    let mut role = Vec::new();
    let mut add = |g: &mut Network, name: String, r: GridRole| {
        let v = g.add_node(&name);
        role.push(r);
        v
    };
    let mut edge_of = HashMap::new();
    let mut edge = |g: &mut Network, u: usize, v: usize, cap: Rat| {
        let e = g.add_edge(u, v, cap, 1);
        edge_of.insert((u, v), e);
    };
    let mut sources = Vec::new();
    for r in 1..=n {
        sources.push(add(&mut g, format!("s{r}"), GridRole::Source(r)));
    }
    let mut ports = HashMap::new();
    for r in 1..=n {
        for c in r..=n {
            let name = format!("v{r}_{c}");
            let p = if r < c && gadget != Gadget::None {
                let inner = GridRole::Inner(r, c);
                let x1 = add(&mut g, format!("{name}.x1"), inner);
                let y1 = add(&mut g, format!("{name}.y1"), inner);
                let x2 = add(&mut g, format!("{name}.x2"), inner);
                let y2 = add(&mut g, format!("{name}.y2"), inner);
                let cap = frac(1, r as i64);
                if gadget == Gadget::Yes {
                    edge(&mut g, x1, y1, cap.clone());
                    edge(&mut g, x2, y2, cap);
                } else {
                    let w = add(&mut g, format!("{name}.w"), inner);
                    for (u, v) in [(x1, w), (x2, w), (w, y1), (w, y2)] {
                        edge(&mut g, u, v, cap.clone());
                    }
                }
                Ports {
                    in_h: x2,
                    out_h: y2,
                    in_v: x1,
                    out_v: y1,
                }
            } else {
                let v = add(&mut g, name, GridRole::Cell(r, c));
                Ports {
                    in_h: v,
                    out_h: v,
                    in_v: v,
                    out_v: v,
                }
            };
            ports.insert((r, c), p);
        }
    }
    let mut terms = Vec::new();
    for c in 1..=n {
        terms.push(add(&mut g, format!("t{c}"), GridRole::Terminal(c)));
    }
    let t = add(&mut g, "t".into(), GridRole::Sink);
    g.add_sink(t);
    for r in 1..=n {
        let cap = frac(1, r as i64);
        edge(&mut g, sources[r - 1], ports[&(r, n)].in_h, cap.clone());
        g.supply[sources[r - 1]] = Rat::from_integer((m * m).into()) * &cap;
        for c in r..n {
            edge(
                &mut g,
                ports[&(r, c + 1)].out_h,
                ports[&(r, c)].in_h,
                cap.clone(),
            );
        }
    }
    for c in 1..=n {
        let cap = frac(1, c as i64);
        for r in 1..c {
            edge(
                &mut g,
                ports[&(r + 1, c)].out_v,
                ports[&(r, c)].in_v,
                cap.clone(),
            );
        }
        edge(&mut g, ports[&(1, c)].out_v, terms[c - 1], cap.clone());
        edge(&mut g, terms[c - 1], t, cap);
    }
    Ok(HalfGrid {
        n,
        m,
        gadget,
        net: g,
        role,
        ports,
        edge_of,
    })
}

impl HalfGrid {
    pub fn source(&self, r: usize) -> usize {
        r - 1
    }

    /// `M^2 + N p + N + 2`.
    pub fn yes_bound(&self) -> u64 {
        self.m * self.m + self.n as u64 * self.gadget.vertices() + self.n as u64 + 2
    }

    fn arc(&self, u: usize, v: usize) -> Result<Arc> {
        self.edge_of
            .get(&(u, v))
            .map(|&e| Arc::fwd(e))
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "no edge {} -> {}",
                    self.net.nodes[u], self.net.nodes[v]
                ))
            })
    }

    /// Network path realising a grid path; gadget cells are crossed along their
    /// horizontal or vertical inner edge.
    pub fn realize(&self, p: &GridPath) -> Result<Path> {
        if self.gadget == Gadget::No {
            return Err(Error::Precondition(
                "grid paths cannot be realised through NO gadgets".into(),
            ));
        }
        let k = p.cells.len();
        let mut nodes = vec![self.source(p.row)];
        for (i, &(r, c)) in p.cells.iter().enumerate() {
            let pt = self.ports[&(r, c)];
            let (din, dout) = p.dirs(i, k);
            if din != dout && r < c && self.gadget == Gadget::Yes {
                return Err(Error::Precondition(format!(
                    "path turns inside gadget ({r},{c})"
                )));
            }
            let a = if din == Dir::H { pt.in_h } else { pt.in_v };
            let b = if dout == Dir::H { pt.out_h } else { pt.out_v };
            nodes.push(a);
            if b != a {
                nodes.push(b);
            }
        }
        let root = p.root();
        nodes.push(self.net.id(&format!("t{root}")).unwrap());
        nodes.push(self.net.sinks[0]);
        let arcs = nodes
            .windows(2)
            .map(|w| self.arc(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Path { nodes, arcs })
    }

    /// Grid path of each routed source.
    pub fn family_from_routing(&self, r: &ConfluentRouting) -> Result<Vec<GridPath>> {
        let mut out = Vec::new();
        for row in 1..=self.n {
            let s = self.source(row);
            if r.out[s].is_none() {
                continue;
            }
            let p = r.path_from(&self.net, s);
            if !self.net.is_sink(p.end()) {
                return Err(Error::NotConfluent(format!(
                    "s{row} does not reach the sink"
                )));
            }
            let mut cells: Vec<(usize, usize)> = Vec::new();
            for &v in &p.nodes {
                if let GridRole::Cell(a, b) | GridRole::Inner(a, b) = self.role[v] {
                    if cells.last() != Some(&(a, b)) {
                        cells.push((a, b));
                    }
                }
            }
            out.push(GridPath { row, cells });
        }
        Ok(out)
    }
}

/// The `i`-th canonical path: along row `i` to column `i`, then down column `i`.
pub fn canonical_path(n: usize, i: usize) -> GridPath {
    let mut cells: Vec<(usize, usize)> = (i..=n).rev().map(|c| (i, c)).collect();
    cells.extend((1..i).rev().map(|r| (r, i)));
    GridPath { row: i, cells }
}

pub fn canonical_family(n: usize) -> Vec<GridPath> {
    (1..=n).map(|i| canonical_path(n, i)).collect()
}

pub fn canonical_routing(hg: &HalfGrid) -> Result<ConfluentRouting> {
    if hg.gadget == Gadget::No {
        return Err(Error::Precondition(
            "canonical paths are blocked by NO gadgets".into(),
        ));
    }
    let mut r = ConfluentRouting::empty(hg.net.n());
    for i in 1..=hg.n {
        let p = hg.realize(&canonical_path(hg.n, i))?;
        for (k, a) in p.arcs.iter().enumerate() {
            let v = p.nodes[k];
            if r.out[v].is_some_and(|b| b != *a) {
                return Err(Error::NotConfluent(format!(
                    "canonical paths split at {}",
                    hg.net.nodes[v]
                )));
            }
            r.out[v] = Some(*a);
        }
    }
    r.validate(&hg.net)?;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    H,
    V,
}

/// Edge of the logical grid `G_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GridEdge {
    /// `s_r -> (r, N)`.
    Src(usize),
    /// `(r, c+1) -> (r, c)`.
    Row(usize, usize),
    /// `(r+1, c) -> (r, c)`.
    Col(usize, usize),
    /// `(1, c) -> t_c`.
    Exit(usize),
    /// `t_c -> t`.
    Root(usize),
}

impl GridEdge {
    pub fn cap(self) -> Rat {
        let d = match self {
            GridEdge::Src(r) | GridEdge::Row(r, _) => r,
            GridEdge::Col(_, c) | GridEdge::Exit(c) | GridEdge::Root(c) => c,
        };
        frac(1, d as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum GridNode {
    Src(usize),
    Cell(usize, usize),
    Term(usize),
    Sink,
}

/// A source-to-sink path in `G_N`, as the sequence of grid cells it visits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPath {
    pub row: usize,
    pub cells: Vec<(usize, usize)>,
}

impl GridPath {
    pub fn root(&self) -> usize {
        self.cells.last().map_or(0, |c| c.1)
    }

    fn dirs(&self, i: usize, k: usize) -> (Dir, Dir) {
        let din = if i == 0 || self.cells[i - 1].0 == self.cells[i].0 {
            Dir::H
        } else {
            Dir::V
        };
        let dout = if i + 1 == k || self.cells[i + 1].0 != self.cells[i].0 {
            Dir::V
        } else {
            Dir::H
        };
        (din, dout)
    }

    pub fn check(&self, n: usize) -> Result<()> {
        let bad = |m: &str| {
            Err(Error::Invalid(format!(
                "grid path from row {}: {m}",
                self.row
            )))
        };
        if self.row == 0 || self.row > n || self.cells.first() != Some(&(self.row, n)) {
            return bad("must start at its source cell");
        }
        if self.cells.last().map(|c| c.0) != Some(1) {
            return bad("must end in row 1");
        }
        for w in self.cells.windows(2) {
            let ((r0, c0), (r1, c1)) = (w[0], w[1]);
            let ok = (r1 == r0 && c1 + 1 == c0 && c1 >= r1) || (c1 == c0 && r1 + 1 == r0);
            if !ok {
                return bad("steps must go left or down inside the grid");
            }
        }
        Ok(())
    }

    pub fn edges(&self) -> Vec<GridEdge> {
        let mut out = vec![GridEdge::Src(self.row)];
        for w in self.cells.windows(2) {
            let ((r0, _), (r1, c1)) = (w[0], w[1]);
            out.push(if r0 == r1 {
                GridEdge::Row(r1, c1)
            } else {
                GridEdge::Col(r1, c1)
            });
        }
        out.push(GridEdge::Exit(self.root()));
        out.push(GridEdge::Root(self.root()));
        out
    }

    fn steps(&self) -> Vec<(GridNode, GridEdge, GridNode)> {
        let mut nodes = vec![GridNode::Src(self.row)];
        nodes.extend(self.cells.iter().map(|&(r, c)| GridNode::Cell(r, c)));
        nodes.push(GridNode::Term(self.root()));
        nodes.push(GridNode::Sink);
        nodes
            .windows(2)
            .zip(self.edges())
            .map(|(w, e)| (w[0], e, w[1]))
            .collect()
    }

    fn passes(&self, lo: usize, hi: usize) -> bool {
        self.cells
            .iter()
            .any(|&(r, c)| lo <= r && r <= hi && lo <= c && c <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub rows: (usize, usize),
    pub cell: (usize, usize),
}

/// Two paths of different trees crossing at a degree-4 cell: one passes straight through
/// vertically, the other horizontally.
pub fn crossing_witness(family: &[GridPath]) -> Option<Crossing> {
    let mut at: HashMap<(usize, usize), Vec<(usize, Dir, Dir)>> = HashMap::new();
    for (j, p) in family.iter().enumerate() {
        let k = p.cells.len();
        for (i, &cell) in p.cells.iter().enumerate() {
            if cell.0 < cell.1 {
                let (a, b) = p.dirs(i, k);
                at.entry(cell).or_default().push((j, a, b));
            }
        }
    }
    let mut cells: Vec<_> = at.into_iter().collect();
    cells.sort_by_key(|x| x.0);
    for (cell, list) in cells {
        for x in &list {
            for y in &list {
                let (p, q) = (&family[x.0], &family[y.0]);
                if p.root() != q.root()
                    && x.1 == Dir::V
                    && x.2 == Dir::V
                    && y.1 == Dir::H
                    && y.2 == Dir::H
                {
                    let rows = (p.row.min(q.row), p.row.max(q.row));
                    return Some(Crossing { rows, cell });
                }
            }
        }
    }
    None
}

/// Checks that paths sharing an edge continue identically.
pub fn check_edge_confluent(family: &[GridPath]) -> Result<()> {
    let mut seen: HashMap<GridEdge, (usize, usize)> = HashMap::new();
    let edges: Vec<Vec<GridEdge>> = family.iter().map(|p| p.edges()).collect();
    for (j, es) in edges.iter().enumerate() {
        for (i, e) in es.iter().enumerate() {
            if let Some(&(j0, i0)) = seen.get(e) {
                if edges[j0][i0..] != es[i..] {
                    return Err(Error::NotConfluent(format!(
                        "paths from rows {} and {} share {:?} but then diverge",
                        family[j0].row, family[j].row, e
                    )));
                }
            } else {
                seen.insert(*e, (j, i));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Cut {
    pub edges: Vec<GridEdge>,
    #[serde(with = "crate::netcore::rat::serde_str")]
    pub weight: Rat,
}

/// Cut separating every source of a non-crossing, edge-confluent family from `t`, built by
/// the subgrid recursion: the leftmost tree meeting the current subgrid is cut at its
/// root edge, paths of the next trees that avoid the following subgrid are cut on one
/// vertical edge, and the recursion continues in that subgrid.
pub fn build_cut(n: usize, family: &[GridPath]) -> Result<Cut> {
    let mut rows = BTreeSet::new();
    for p in family {
        p.check(n)?;
        if !rows.insert(p.row) {
            return Err(Error::Invalid(format!("two paths from row {}", p.row)));
        }
    }
    check_edge_confluent(family)?;
    if let Some(x) = crossing_witness(family) {
        return Err(Error::Invalid(format!(
            "rows {} and {} cross at cell {:?}",
            x.rows.0, x.rows.1, x.cell
        )));
    }
    let mut cut: Vec<GridEdge> = Vec::new();
    let mut active: Vec<usize> = (0..family.len()).collect();
    let (mut lo, mut hi) = (1usize, n);
    loop {
        active.retain(|&j| family[j].passes(lo, hi));
        if active.is_empty() || lo > hi {
            break;
        }
        let top = active.iter().map(|&j| family[j].root()).max().unwrap();
        cut.push(GridEdge::Root(top));
        let r_top = family
            .iter()
            .filter(|p| p.root() == top)
            .flat_map(|p| p.cells.iter().filter(|c| c.1 == top).map(|c| c.0))
            .max()
            .unwrap();
        let (nlo, nhi) = (r_top + 1, top - 1);
        active.retain(|&j| family[j].root() != top);
        let side = GridEdge::Col(r_top, top);
        let mut used = false;
        for &j in &active {
            if !family[j].passes(nlo, nhi) {
                if !family[j].edges().contains(&side) {
                    return Err(Error::Invalid(format!(
                        "path from row {} avoids subgrid G({nlo},{nhi}) without using {:?}",
                        family[j].row, side
                    )));
                }
                used = true;
            }
        }
        if used {
            cut.push(side);
        }
        lo = nlo;
        hi = nhi;
    }
    cut.sort();
    cut.dedup();
    if !separates(family, &cut) {
        return Err(Error::Invalid(
            "constructed cut does not separate the sources".into(),
        ));
    }
    let weight = cut.iter().map(|e| e.cap()).sum();
    Ok(Cut { edges: cut, weight })
}

/// Whether every source-to-sink path of the family contains a cut edge, i.e. no source
/// still reaches `t` along its own path once the cut is removed.
pub fn separates(family: &[GridPath], cut: &[GridEdge]) -> bool {
    family
        .iter()
        .all(|p| p.edges().iter().any(|e| cut.contains(e)))
}

/// Minimum weight of a cut separating the family's sources from `t` within its support.
pub fn min_support_cut(family: &[GridPath]) -> Rat {
    let mut g = Network::new(true);
    let mut id: HashMap<GridNode, usize> = HashMap::new();
    let mut node = |g: &mut Network, v: GridNode| {
        *id.entry(v).or_insert_with(|| g.add_node(&format!("{v:?}")))
    };
    let sink = node(&mut g, GridNode::Sink);
    let mut seen = BTreeSet::new();
    let mut srcs = Vec::new();
    for p in family {
        srcs.push(node(&mut g, GridNode::Src(p.row)));
        for (u, e, v) in p.steps() {
            if seen.insert(e) {
                let (a, b) = (node(&mut g, u), node(&mut g, v));
                g.add_edge(a, b, e.cap(), 1);
            }
        }
    }
    g.add_sink(sink);
    let mut caps = vec![Rat::zero(); g.n()];
    let big: Rat = family
        .iter()
        .map(|p| GridEdge::Src(p.row).cap())
        .sum::<Rat>()
        + Rat::from_integer(1.into());
    for s in srcs {
        caps[s] = big.clone();
    }
    crate::staticflow::max_flow(&g, &caps)
        .map(|f| f.value())
        .unwrap_or_else(|_| Rat::zero())
}

/// Random non-crossing, edge-confluent family on `G_N`. Each source is kept with
/// probability `keep`; its path walks left or down at random, merges into the first path
/// whose edge it takes, and is redrawn when it would cross an earlier path.
pub fn gen_tree_family(n: usize, keep: f64, seed: u64) -> Vec<GridPath> {
    let mut rng = trial_rng(seed, 0);
    let mut family: Vec<GridPath> = Vec::new();
    let mut order: Vec<usize> = (1..=n).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for row in order {
        if !rng.gen_bool(keep) {
            continue;
        }
        for _ in 0..30 {
            let p = walk(n, row, &family, &mut rng);
            let mut trial = family.clone();
            trial.push(p.clone());
            if crossing_witness(&trial).is_none() && check_edge_confluent(&trial).is_ok() {
                family.push(p);
                break;
            }
        }
    }
    family.sort_by_key(|p| p.row);
    family
}

fn walk(n: usize, row: usize, family: &[GridPath], rng: &mut impl Rng) -> GridPath {
    let mut cells = vec![(row, n)];
    let owner = |e: GridEdge| -> Option<(usize, usize)> {
        family
            .iter()
            .find_map(|p| p.edges().iter().position(|&x| x == e).map(|i| (p.row, i)))
    };
    loop {
        let (r, c) = *cells.last().unwrap();
        let mut moves = Vec::new();
        if c > r {
            moves.push(GridEdge::Row(r, c - 1));
        }
        if r > 1 {
            moves.push(GridEdge::Col(r - 1, c));
        } else {
            moves.push(GridEdge::Exit(c));
        }
        let e = moves[rng.gen_range(0..moves.len())];
        if let Some((prow, _)) = owner(e) {
            let p = family.iter().find(|p| p.row == prow).unwrap();
            let k = p.cells.iter().position(|&x| x == (r, c)).unwrap();
            cells.extend_from_slice(&p.cells[k + 1..]);
            return GridPath { row, cells };
        }
        match e {
            GridEdge::Row(r, c) => cells.push((r, c)),
            GridEdge::Col(r, c) => cells.push((r, c)),
            _ => return GridPath { row, cells },
        }
    }
}
