//! Discrete fluid simulation of dynamic flows with FIFO queues at edge entrances.

use std::collections::{BTreeMap, VecDeque};
use std::io::Write;
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::netcore::rat::lcm_denoms;
use crate::netcore::{ConfluentRouting, Error, Network, Path, PathFlow, Rat, Result};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Release {
    pub start: u64,
    #[serde(with = "crate::netcore::rat::serde_str")]
    pub rate: Rat,
    pub duration: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Routing {
    Confluent(ConfluentRouting),
    Paths(PathFlow),
}

/// A routing plus a release schedule. For a confluent routing the schedule is keyed by
/// source node; for path routings it is keyed by path index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicRouting {
    pub routing: Routing,
    pub schedule: BTreeMap<usize, Vec<Release>>,
}

#[derive(Debug, Clone)]
pub struct Stream {
    pub source: usize,
    pub path: Path,
    pub releases: Vec<Release>,
}

impl DynamicRouting {
    /// Every positive-supply node releases its whole supply at step 0.
    pub fn greedy(net: &Network, r: ConfluentRouting, supply: &[Rat]) -> DynamicRouting {
        let schedule = (0..net.n())
            .filter(|&v| supply[v].is_positive())
            .map(|v| {
                (
                    v,
                    vec![Release {
                        start: 0,
                        rate: supply[v].clone(),
                        duration: 1,
                    }],
                )
            })
            .collect();
        DynamicRouting {
            routing: Routing::Confluent(r),
            schedule,
        }
    }

    pub fn streams(&self, net: &Network) -> Result<Vec<Stream>> {
        let mut out = Vec::new();
        match &self.routing {
            Routing::Confluent(r) => {
                r.validate(net)?;
                for (&v, rel) in &self.schedule {
                    let path = r.path_from(net, v);
                    if !net.is_sink(path.end()) {
                        return Err(Error::NotConfluent(format!(
                            "{} does not reach a sink",
                            net.nodes[v]
                        )));
                    }
                    out.push(Stream {
                        source: v,
                        path,
                        releases: rel.clone(),
                    });
                }
            }
            Routing::Paths(f) => {
                for (&j, rel) in &self.schedule {
                    let (p, _) = f
                        .entries
                        .get(j)
                        .ok_or_else(|| Error::Invalid(format!("no path {j}")))?;
                    if !net.is_sink(p.end()) {
                        return Err(Error::Invalid(format!("path {j} does not end at a sink")));
                    }
                    out.push(Stream {
                        source: p.source(),
                        path: p.clone(),
                        releases: rel.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn total_release(&self) -> Rat {
        self.schedule.values().flatten().fold(Rat::zero(), |a, r| {
            a + &r.rate * Rat::from_integer(r.duration.into())
        })
    }
}

#[derive(Debug, Clone)]
struct Parcel<T> {
    stream: usize,
    pos: usize,
    amount: T,
    arrived: u64,
    source: usize,
    seq: u64,
}

impl<T> Parcel<T> {
    fn key(&self) -> (u64, usize, u64) {
        (self.arrived, self.source, self.seq)
    }
}

/// Integer amounts in units of `1 / scale`; `i128` when every quantity stays below 2^62.
trait Amount:
    Clone + Ord + Zero + Signed + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self>
{
    fn from_big(x: BigInt) -> Self;
    fn to_big(&self) -> BigInt;
    fn times(&self, o: &Self) -> Self;
}

impl Amount for i128 {
    fn from_big(x: BigInt) -> Self {
        x.to_i128().expect("amount fits in i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

impl Amount for BigInt {
    fn from_big(x: BigInt) -> Self {
        x
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub t: u64,
    /// Amount entering each edge during the step (both directions).
    pub load: Vec<Rat>,
    /// Amount queued at each edge entrance after the step.
    pub queue: Vec<Rat>,
    pub delivered_cum: Rat,
}

#[derive(Debug, Clone)]
pub struct SimTrace {
    pub steps: Vec<StepRecord>,
    /// Step of the last arrival once everything released has arrived.
    pub makespan: Option<u64>,
    /// Cumulative delivered amount after each step that had deliveries.
    pub delivered: Vec<(u64, Rat)>,
    /// Delivered amount per stream.
    pub delivered_by_stream: Vec<Rat>,
    pub total_released: Rat,
    pub conservation_ok: bool,
    /// Largest ratio of per-step edge inflow to capacity.
    pub max_inflow_ratio: Rat,
    /// Largest amount waiting at a node that is not the stream's own source.
    pub max_transit_queue: Rat,
    pub last_entry_step: Option<u64>,
    pub last_step: u64,
}

impl SimTrace {
    pub fn delivered_by(&self, t: u64) -> Rat {
        let mut d = Rat::zero();
        for (s, x) in &self.delivered {
            if *s <= t {
                d = x.clone();
            }
        }
        d
    }

    pub fn write_csv<W: Write>(&self, net: &Network, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
        wr.write_record(["t", "edge", "load", "queue", "delivered_cum"])
            .map_err(err)?;
        use crate::netcore::rat::fmt_rat;
        for s in &self.steps {
            for e in 0..net.edges.len() {
                let name = format!(
                    "{}->{}",
                    net.nodes[net.edges[e].u], net.nodes[net.edges[e].v]
                );
                wr.write_record([
                    s.t.to_string(),
                    name,
                    fmt_rat(&s.load[e]),
                    fmt_rat(&s.queue[e]),
                    fmt_rat(&s.delivered_cum),
                ])
                .map_err(err)?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    pub record_steps: bool,
}

/// Simulates steps `0..=horizon` (or until everything has arrived).
pub fn simulate(
    net: &Network,
    dr: &DynamicRouting,
    horizon: u64,
    opts: SimOptions,
) -> Result<SimTrace> {
    let streams = dr.streams(net)?;
    if streams
        .iter()
        .flat_map(|s| &s.releases)
        .any(|r| r.rate.is_negative())
    {
        return Err(Error::Invalid("negative release rate".into()));
    }
    let rates = streams
        .iter()
        .flat_map(|s| s.releases.iter().map(|r| &r.rate));
    let scale = lcm_denoms(net.edges.iter().map(|e| &e.cap).chain(rates));
    let total = dr.total_release();
    let peak = net
        .edges
        .iter()
        .map(|e| &e.cap)
        .chain(std::iter::once(&total))
        .map(|x| (x * Rat::from_integer(scale.clone())).to_integer().bits())
        .max()
        .unwrap_or(0);
    Ok(if peak <= 62 {
        run::<i128>(net, &streams, total, &scale, horizon, opts)
    } else {
        run::<BigInt>(net, &streams, total, &scale, horizon, opts)
    })
}

fn run<T: Amount>(
    net: &Network,
    streams: &[Stream],
    total: Rat,
    scale: &BigInt,
    horizon: u64,
    opts: SimOptions,
) -> SimTrace {
    let to_t = |x: &Rat| T::from_big((x * Rat::from_integer(scale.clone())).to_integer());
    let to_rat = |x: &T| Rat::new(x.to_big(), scale.clone());
    let m = net.edges.len();
    let cap: Vec<T> = net.edges.iter().map(|e| to_t(&e.cap)).collect();
    let releases: Vec<Vec<(u64, u64, T)>> = streams
        .iter()
        .map(|s| {
            s.releases
                .iter()
                .filter(|r| r.rate.is_positive())
                .map(|r| (r.start, r.duration, to_t(&r.rate)))
                .collect()
        })
        .collect();
    let mut queues: Vec<VecDeque<Parcel<T>>> = vec![VecDeque::new(); 2 * m];
    let mut transit: BTreeMap<u64, Vec<Parcel<T>>> = BTreeMap::new();
    let last_release = streams
        .iter()
        .flat_map(|s| &s.releases)
        .filter(|r| r.duration > 0)
        .map(|r| r.start + r.duration - 1)
        .max();
    let mut seq = 0u64;
    let mut injected = T::zero();
    let mut delivered = T::zero();
    let mut delivered_by_stream = vec![T::zero(); streams.len()];
    let mut best_ratio = (T::zero(), T::one());
    let mut max_wait = T::zero();
    let mut trace = SimTrace {
        steps: Vec::new(),
        makespan: None,
        delivered: Vec::new(),
        delivered_by_stream: Vec::new(),
        total_released: total,
        conservation_ok: true,
        max_inflow_ratio: Rat::zero(),
        max_transit_queue: Rat::zero(),
        last_entry_step: None,
        last_step: 0,
    };
    let mut last_delivery: u64 = 0;
    let slot = |p: &Parcel<T>| {
        let a = streams[p.stream].path.arcs[p.pos];
        2 * a.edge + a.rev as usize
    };
    let place =
        |p: Parcel<T>, queues: &mut Vec<VecDeque<Parcel<T>>>, now: &mut T, dbs: &mut Vec<T>| {
            if p.pos == streams[p.stream].path.arcs.len() {
                *now += &p.amount;
                dbs[p.stream] += &p.amount;
            } else {
                let q = &mut queues[slot(&p)];
                let k = p.key();
                let at = q.partition_point(|x| x.key() <= k);
                q.insert(at, p);
            }
        };
    let mut t = 0u64;
    loop {
        let mut arriving: Vec<Parcel<T>> = transit.remove(&t).unwrap_or_default();
        for (i, rel) in releases.iter().enumerate() {
            for (start, duration, rate) in rel {
                if t >= *start && t < start + duration {
                    let source = streams[i].source;
                    arriving.push(Parcel {
                        stream: i,
                        pos: 0,
                        amount: rate.clone(),
                        arrived: t,
                        source,
                        seq,
                    });
                    seq += 1;
                    injected += rate;
                }
            }
        }
        let mut delivered_now = T::zero();
        for p in arriving {
            place(p, &mut queues, &mut delivered_now, &mut delivered_by_stream);
        }
        let mut remaining = cap.clone();
        let mut load = vec![T::zero(); m];
        loop {
            let mut zero_moves: Vec<Parcel<T>> = Vec::new();
            for sl in 0..2 * m {
                let e = sl / 2;
                while remaining[e].is_positive() {
                    let Some(mut p) = queues[sl].pop_front() else {
                        break;
                    };
                    if p.amount > remaining[e] {
                        let mut rest = p.clone();
                        rest.amount -= &remaining[e];
                        queues[sl].push_front(rest);
                        p.amount = remaining[e].clone();
                    }
                    remaining[e] -= &p.amount;
                    load[e] += &p.amount;
                    trace.last_entry_step = Some(t);
                    p.pos += 1;
                    p.arrived = t + net.edges[e].len;
                    if net.edges[e].len == 0 {
                        zero_moves.push(p);
                    } else {
                        transit.entry(p.arrived).or_default().push(p);
                    }
                }
            }
            if zero_moves.is_empty() {
                break;
            }
            for p in zero_moves {
                place(p, &mut queues, &mut delivered_now, &mut delivered_by_stream);
            }
        }
        for e in 0..m {
            if load[e].is_positive() && load[e].times(&best_ratio.1) > best_ratio.0.times(&cap[e]) {
                best_ratio = (load[e].clone(), cap[e].clone());
            }
        }
        let mut queue = vec![T::zero(); m];
        let mut queued_total = T::zero();
        let mut node_wait: BTreeMap<usize, T> = BTreeMap::new();
        for (sl, q) in queues.iter().enumerate() {
            for p in q {
                queue[sl / 2] += &p.amount;
                queued_total += &p.amount;
                if p.pos > 0 {
                    *node_wait
                        .entry(streams[p.stream].path.nodes[p.pos])
                        .or_insert_with(T::zero) += &p.amount;
                }
            }
        }
        for w in node_wait.into_values() {
            if w > max_wait {
                max_wait = w;
            }
        }
        if delivered_now.is_positive() {
            delivered += &delivered_now;
            last_delivery = t;
            trace.delivered.push((t, to_rat(&delivered)));
        }
        let mut accounted = delivered.clone();
        accounted += &queued_total;
        for p in transit.values().flatten() {
            accounted += &p.amount;
        }
        if injected != accounted {
            trace.conservation_ok = false;
        }
        if opts.record_steps {
            trace.steps.push(StepRecord {
                t,
                load: load.iter().map(to_rat).collect(),
                queue: queue.iter().map(to_rat).collect(),
                delivered_cum: to_rat(&delivered),
            });
        }
        trace.last_step = t;
        let releases_done = last_release.map_or(true, |l| t >= l);
        if releases_done && queued_total.is_zero() && transit.is_empty() {
            trace.makespan = Some(if delivered.is_zero() {
                0
            } else {
                last_delivery
            });
            break;
        }
        if t >= horizon {
            break;
        }
        t += 1;
    }
    trace.max_inflow_ratio = Rat::new(best_ratio.0.to_big(), best_ratio.1.to_big());
    trace.max_transit_queue = to_rat(&max_wait);
    trace.delivered_by_stream = delivered_by_stream.iter().map(to_rat).collect();
    trace
}

/// Makespan of a dynamic routing; exceeding `cap` steps is an error.
pub fn makespan(net: &Network, dr: &DynamicRouting, cap: u64) -> Result<u64> {
    let tr = simulate(net, dr, cap, SimOptions::default())?;
    tr.makespan
        .ok_or_else(|| Error::HorizonExceeded(format!("not all supply arrived within {cap} steps")))
}

/// Makespan of a single edge sending `d` at capacity `c` with length `l`: `ceil(d/c) - 1 + l`.
pub fn single_edge_time(d: &Rat, c: &Rat, l: u64) -> u64 {
    if d.is_zero() {
        return 0;
    }
    crate::netcore::rat::ceil_u64(&(d / c)) - 1 + l
}

/// Averages a dynamic flow over `horizon` steps: each path carries (amount sent on it) / horizon.
/// The flow must finish by `horizon` and never enter an edge at a step `>= horizon`.
pub fn trans1(net: &Network, dr: &DynamicRouting, horizon: u64) -> Result<PathFlow> {
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be positive".into()));
    }
    let tr = simulate(net, dr, horizon, SimOptions::default())?;
    if tr.makespan.map_or(true, |m| m > horizon) {
        return Err(Error::Infeasible(format!(
            "dynamic flow does not finish within {horizon}"
        )));
    }
    if tr.last_entry_step.map_or(false, |s| s >= horizon) {
        return Err(Error::Infeasible(format!(
            "dynamic flow enters an edge at step {horizon} or later"
        )));
    }
    let streams = dr.streams(net)?;
    let h = Rat::from_integer(horizon.into());
    let mut entries: Vec<(Path, Rat)> = Vec::new();
    for (s, d) in streams.iter().zip(&tr.delivered_by_stream) {
        if !d.is_positive() {
            continue;
        }
        let x = d / &h;
        if let Some(e) = entries.iter_mut().find(|(p, _)| *p == s.path) {
            e.1 += x;
        } else {
            entries.push((s.path.clone(), x));
        }
    }
    Ok(PathFlow { entries })
}

/// Sends `f_j` per step along every path `P_j` for `z` steps starting at step 0.
pub fn trans2(net: &Network, f: &PathFlow, z: u64) -> Result<DynamicRouting> {
    let st = crate::netcore::flow_stats(net, f);
    if st.edge_congestion > Rat::from_integer(1.into()) {
        return Err(Error::Precondition(
            "trans2 needs edge congestion at most 1".into(),
        ));
    }
    let schedule = f
        .entries
        .iter()
        .enumerate()
        .filter(|(_, (_, x))| x.is_positive())
        .map(|(j, (_, x))| {
            (
                j,
                vec![Release {
                    start: 0,
                    rate: x.clone(),
                    duration: z,
                }],
            )
        })
        .collect();
    Ok(DynamicRouting {
        routing: Routing::Paths(f.clone()),
        schedule,
    })
}
