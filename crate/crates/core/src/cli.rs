//! Command-line front end. `main_with_args` takes the full argument vector (program name
//! first) and returns the process exit code: 0 on success, 2 when the instance is
//! infeasible, 1 on any other error.

use std::collections::BTreeMap;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::Calibration;
use crate::dynamic::{
    maxflow_over_time_sweep, scan_horizon, simulate, solve_quickest, DynamicRouting,
    MaxFlowOverTime, Release, Routing, SimOptions, SimTrace, SolveParams,
};
use crate::instances::{
    build_cut, canonical_family, crossing_witness, gen_alphabeta, gen_bo3dm, gen_half_grid,
    gen_random_corpus, gen_tree_family, min_support_cut, separates, to_dimacs, CorpusSpec, Gadget,
    GridPath,
};
use crate::multilayer::{demand_max_static, MultilayerParams};
use crate::netcore::rat::fmt_rat;
use crate::netcore::{
    flow_stats, read_network, routing_to_pathflow, Arc, ConfluentRouting, Error, Network,
    NetworkDoc, Path, PathFlow, Rat, Result,
};
use crate::oracle::{
    oracle_demand_max, oracle_maxflow_over_time, oracle_quickest, oracle_quickest_time_expanded,
};
use crate::rounding::trials_for;

#[derive(Parser, Debug)]
#[command(
    name = "confluent",
    version,
    about = "Confluent static and dynamic flow solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed; drawn and printed to stderr when omitted by a seeded command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rounding trials per call (default: ceil(trials_c * log2 n)).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Capacity base for layered rounding.
    #[arg(long, global = true)]
    base: Option<u64>,
    /// Length budget multiplier of the dynamic drivers.
    #[arg(long, global = true)]
    budget_multiplier: Option<u64>,
    /// Calibration constants (JSON); overrides the CONFLUENT_CALIBRATION file.
    #[arg(long, global = true)]
    calibration: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
    /// Worker threads for parallel trials and enumeration.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Emit {
    Json,
    Csv,
    Dimacs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Problem {
    Quickest,
    Maxtime,
    Demandmax,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyKind {
    Canonical,
    Random,
    File,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a solver on a network file.
    Solve {
        #[arg(value_enum)]
        problem: Problem,
        input: PathBuf,
        /// Horizon T for maxtime.
        #[arg(long)]
        horizon: Option<u64>,
        /// Comma-separated horizons for a maxtime sweep.
        #[arg(long)]
        sweep: Option<String>,
        /// Path length budget for demandmax.
        #[arg(long)]
        budget: Option<u64>,
        /// Write the simulation trace of the result as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exhaustive solver for small networks.
    Oracle {
        #[arg(value_enum)]
        problem: Problem,
        input: PathBuf,
        #[arg(long)]
        horizon: Option<u64>,
        /// Use the time-expanded evaluation for quickest.
        #[arg(long)]
        time_expanded: bool,
    },
    /// Simulate a routing (or a solve result) on a network.
    Eval {
        network: PathBuf,
        routing: PathBuf,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Build the separating cut for a tree family on a half-grid.
    Cutcheck {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FamilyKind::Canonical)]
        family: FamilyKind,
        /// JSON list of grid paths when --family file.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Probability of keeping each source in a random family.
        #[arg(long, default_value_t = 0.8)]
        keep: f64,
    },
    /// Solve quickest flow on a random corpus and report a CSV row per instance.
    Bench {
        /// Corpus spec (JSON); defaults apply to missing keys.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Half-grid with optional embedded gadgets.
    HalfGrid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = GadgetArg::None)]
        gadget: GadgetArg,
    },
    /// Two-source gadget with beta = 2 alpha.
    Alphabeta {
        #[arg(long, default_value_t = 1)]
        alpha: u64,
        #[arg(long)]
        m: u64,
        /// Build the NO core instead of the YES core.
        #[arg(long)]
        no: bool,
    },
    /// 3-dimensional matching gadget, triples as "a,b,c;a,b,c;...".
    Bo3dm {
        #[arg(long)]
        triples: String,
        #[arg(long)]
        undirected: bool,
    },
    /// Random corpus.
    Corpus {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        /// Write one file per instance into this directory.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum GadgetArg {
    None,
    Yes,
    No,
}

impl From<GadgetArg> for Gadget {
    fn from(g: GadgetArg) -> Gadget {
        match g {
            GadgetArg::None => Gadget::None,
            GadgetArg::Yes => Gadget::Yes,
            GadgetArg::No => Gadget::No,
        }
    }
}

/// Resolved configuration, embedded in every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<String>,
    pub output: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub base: u64,
    pub budget_multiplier: u64,
    pub calibration: Calibration,
    pub emit: String,
    pub jobs: Option<usize>,
}

pub fn main_with_args(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let run = || run(&cli);
    let res = match cli.common.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Error::Invalid(format!("thread pool: {e}"))),
        },
        None => run(),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => 2,
                _ => 1,
            }
        }
    }
}

fn calibration(c: &Common) -> Result<Calibration> {
    let mut cal = match &c.calibration {
        Some(p) => Calibration::from_file(p)?,
        None => Calibration::from_env()?,
    };
    if let Some(b) = c.base {
        if b < 2 {
            return Err(Error::Precondition("--base must be at least 2".into()));
        }
        cal.layer_base = b;
    }
    if let Some(m) = c.budget_multiplier {
        if m == 0 {
            return Err(Error::Precondition(
                "--budget-multiplier must be positive".into(),
            ));
        }
        cal.budget_multiplier = m;
    }
    Ok(cal)
}

fn seed(c: &Common) -> u64 {
    c.seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn config(
    cli: &Cli,
    command: &str,
    input: Option<&FsPath>,
    seed: Option<u64>,
    cal: &Calibration,
) -> RunConfig {
    let c = &cli.common;
    RunConfig {
        command: command.into(),
        input: input.map(|p| p.display().to_string()),
        output: c.out.as_ref().map(|p| p.display().to_string()),
        seed,
        trials: c.trials,
        base: cal.layer_base,
        budget_multiplier: cal.budget_multiplier,
        calibration: cal.clone(),
        emit: format!("{:?}", c.emit).to_lowercase(),
        jobs: c.jobs,
    }
}

fn emit_text(c: &Common, text: &str) -> Result<()> {
    match &c.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(c: &Common, cfg: &RunConfig, result: Value) -> Result<()> {
    let doc = json!({ "config": cfg, "result": result });
    emit_text(c, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

fn load(p: &FsPath) -> Result<Network> {
    read_network(&std::fs::read_to_string(p)?)
}

fn run(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    let cal = calibration(c)?;
    match &cli.command {
        Command::Gen { kind } => cmd_gen(cli, kind, &cal),
        Command::Solve {
            problem,
            input,
            horizon,
            sweep,
            budget,
            trace,
        } => {
            let s = seed(c);
            let net = load(input)?;
            let cfg = config(
                cli,
                &format!("solve {}", name(*problem)),
                Some(input),
                Some(s),
                &cal,
            );
            let params = SolveParams {
                trials: c
                    .trials
                    .unwrap_or_else(|| trials_for(net.n(), cal.trials_c)),
                seed: s,
                calibration: cal.clone(),
            };
            let result = match problem {
                Problem::Quickest => cmd_quickest(&net, &params, trace.as_deref())?,
                Problem::Maxtime => {
                    let hs = horizons(*horizon, sweep.as_deref())?;
                    cmd_maxtime(&net, &hs, &params, trace.as_deref())?
                }
                Problem::Demandmax => cmd_demandmax(&net, *budget, &params)?,
            };
            emit_json(c, &cfg, result)
        }
        Command::Oracle {
            problem,
            input,
            horizon,
            time_expanded,
        } => {
            let net = load(input)?;
            let cfg = config(
                cli,
                &format!("oracle {}", name(*problem)),
                Some(input),
                None,
                &cal,
            );
            let o = match problem {
                Problem::Quickest if *time_expanded => oracle_quickest_time_expanded(&net)?,
                Problem::Quickest => oracle_quickest(&net)?,
                Problem::Maxtime => {
                    let t = horizon.ok_or_else(|| {
                        Error::Precondition("oracle maxtime needs --horizon".into())
                    })?;
                    oracle_maxflow_over_time(&net, t)?
                }
                Problem::Demandmax => oracle_demand_max(&net)?,
            };
            let result = json!({
                "best_time": o.best_time,
                "best_value": o.best_value.as_ref().map(fmt_rat),
                "instances_enumerated": o.instances_enumerated,
                "routing": confluent_doc(&net, &o.best_routing, &BTreeMap::new()),
            });
            emit_json(c, &cfg, result)
        }
        Command::Eval {
            network,
            routing,
            horizon,
            trace,
        } => {
            let net = load(network)?;
            let cfg = config(cli, "eval", Some(network), None, &cal);
            let text = std::fs::read_to_string(routing)?;
            let dr = routing_from_value(&net, serde_json::from_str(&text)?)?;
            let h = horizon.unwrap_or_else(|| scan_horizon(&net, &dr));
            let tr = run_sim(&net, &dr, h, trace.as_deref())?;
            let mut v = sim_summary(&tr, h);
            if let Routing::Confluent(r) = &dr.routing {
                let supply: Vec<Rat> = (0..net.n())
                    .map(|v| {
                        if dr.schedule.contains_key(&v) {
                            net.supply[v].clone()
                        } else {
                            Rat::from_integer(0.into())
                        }
                    })
                    .collect();
                let f = routing_to_pathflow(&net, r, &supply)?;
                v["static_edge_congestion"] = json!(fmt_rat(&flow_stats(&net, &f).edge_congestion));
            }
            emit_json(c, &cfg, v)
        }
        Command::Cutcheck {
            n,
            family,
            file,
            keep,
        } => {
            let s = if *family == FamilyKind::Random {
                Some(seed(c))
            } else {
                None
            };
            let fam: Vec<GridPath> = match family {
                FamilyKind::Canonical => canonical_family(*n),
                FamilyKind::Random => gen_tree_family(*n, *keep, s.unwrap()),
                FamilyKind::File => {
                    let p = file
                        .as_ref()
                        .ok_or_else(|| Error::Precondition("--family file needs --file".into()))?;
                    serde_json::from_str(&std::fs::read_to_string(p)?)?
                }
            };
            let cfg = config(cli, "cutcheck", file.as_deref(), s, &cal);
            let cut = build_cut(*n, &fam);
            let result = json!({
                "n": n,
                "family": fam,
                "crossing": crossing_witness(&fam),
                "cut": cut.as_ref().ok(),
                "cut_error": cut.as_ref().err().map(|e| e.to_string()),
                "separates": cut.as_ref().map(|x| separates(&fam, &x.edges)).unwrap_or(false),
                "weight_at_most_2": cut.as_ref().map(|x| x.weight <= Rat::from_integer(2.into())).unwrap_or(false),
                "min_support_cut": fmt_rat(&min_support_cut(&fam)),
            });
            emit_json(c, &cfg, result)
        }
        Command::Bench { spec, count } => {
            let s = seed(c);
            let mut sp = match spec {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
                None => CorpusSpec::default(),
            };
            if let Some(k) = count {
                sp.count = *k;
            }
            cmd_bench(c, &sp, s, &cal)
        }
    }
}

fn name(p: Problem) -> &'static str {
    match p {
        Problem::Quickest => "quickest",
        Problem::Maxtime => "maxtime",
        Problem::Demandmax => "demandmax",
    }
}

fn horizons(h: Option<u64>, sweep: Option<&str>) -> Result<Vec<u64>> {
    match (h, sweep) {
        (_, Some(s)) => s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("--sweep entry {x:?}: {e}")))
            })
            .collect(),
        (Some(t), None) => Ok(vec![t]),
        (None, None) => Err(Error::Precondition(
            "solve maxtime needs --horizon or --sweep".into(),
        )),
    }
}

fn cmd_gen(cli: &Cli, kind: &GenKind, cal: &Calibration) -> Result<()> {
    let c = &cli.common;
    let single = |label: &str, net: &Network| -> Result<()> {
        match c.emit {
            Emit::Dimacs => emit_text(c, &to_dimacs(net)),
            Emit::Csv => Err(Error::Precondition(format!(
                "gen {label} does not emit csv"
            ))),
            Emit::Json => emit_text(c, &(crate::netcore::write_network(net) + "\n")),
        }
    };
    match kind {
        GenKind::HalfGrid { n, m, gadget } => {
            single("half-grid", &gen_half_grid(*n, *m, (*gadget).into())?.net)
        }
        GenKind::Alphabeta { alpha, m, no } => {
            single("alphabeta", &gen_alphabeta(*alpha, *m, !*no)?.net)
        }
        GenKind::Bo3dm {
            triples,
            undirected,
        } => {
            let ts = parse_triples(triples)?;
            single("bo3dm", &gen_bo3dm(&ts, !*undirected)?.net)
        }
        GenKind::Corpus { spec, count, dir } => {
            let s = seed(c);
            let mut sp: CorpusSpec = match spec {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
                None => CorpusSpec::default(),
            };
            if let Some(k) = count {
                sp.count = *k;
            }
            let nets = gen_random_corpus(&sp, s)?;
            let cfg = config(cli, "gen corpus", spec.as_deref(), Some(s), cal);
            match dir {
                Some(d) => {
                    std::fs::create_dir_all(d)?;
                    let mut files = Vec::new();
                    for (i, g) in nets.iter().enumerate() {
                        let (ext, body) = match c.emit {
                            Emit::Dimacs => ("dimacs", to_dimacs(g)),
                            _ => ("json", crate::netcore::write_network(g) + "\n"),
                        };
                        let p = d.join(format!("instance_{i:04}.{ext}"));
                        std::fs::write(&p, body)?;
                        files.push(p.display().to_string());
                    }
                    emit_json(c, &cfg, json!({ "spec": sp, "files": files }))
                }
                None if c.emit == Emit::Dimacs => emit_text(
                    c,
                    &nets.iter().map(to_dimacs).collect::<Vec<_>>().join("\n"),
                ),
                None => {
                    let docs: Vec<NetworkDoc> = nets.iter().map(NetworkDoc::from_network).collect();
                    emit_json(c, &cfg, json!({ "spec": sp, "networks": docs }))
                }
            }
        }
    }
}

fn parse_triples(s: &str) -> Result<Vec<(usize, usize, usize)>> {
    s.split(';')
        .filter(|x| !x.trim().is_empty())
        .map(|t| {
            let v: Vec<usize> = t
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("triple {t:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            match v[..] {
                [a, b, c] => Ok((a, b, c)),
                _ => Err(Error::Parse(format!("triple {t:?} needs three elements"))),
            }
        })
        .collect()
}

fn run_sim(net: &Network, dr: &DynamicRouting, h: u64, trace: Option<&FsPath>) -> Result<SimTrace> {
    let tr = simulate(
        net,
        dr,
        h,
        SimOptions {
            record_steps: trace.is_some(),
        },
    )?;
    if let Some(p) = trace {
        tr.write_csv(net, std::fs::File::create(p)?)?;
    }
    Ok(tr)
}

fn sim_summary(tr: &SimTrace, h: u64) -> Value {
    json!({
        "horizon": h,
        "makespan": tr.makespan,
        "delivered": fmt_rat(&tr.delivered_by(h)),
        "total_released": fmt_rat(&tr.total_released),
        "conservation_ok": tr.conservation_ok,
        "max_inflow_ratio": fmt_rat(&tr.max_inflow_ratio),
        "capacity_ok": tr.max_inflow_ratio <= Rat::from_integer(1.into()),
    })
}

fn cmd_quickest(net: &Network, params: &SolveParams, trace: Option<&FsPath>) -> Result<Value> {
    let q = solve_quickest(net, params)?;
    let h = scan_horizon(net, &q.routing);
    let tr = run_sim(net, &q.routing, h, trace)?;
    if tr.makespan != Some(q.claimed_time) {
        return Err(Error::Invalid(
            "simulation does not reproduce the claimed time".into(),
        ));
    }
    Ok(json!({
        "claimed_time": q.claimed_time,
        "delivered_fraction": fmt_rat(&q.delivered_fraction),
        "certificates": q.certificates,
        "simulation": sim_summary(&tr, h),
        "routing": routing_doc(net, &q.routing),
    }))
}

fn mfot_value(net: &Network, r: &MaxFlowOverTime) -> Value {
    json!({
        "horizon": r.horizon,
        "realized_horizon": r.realized_horizon,
        "delivered": fmt_rat(&r.delivered),
        "static_bound": fmt_rat(&r.static_bound),
        "max_inflow_ratio": fmt_rat(&r.max_inflow_ratio),
        "routing": routing_doc(net, &r.routing),
    })
}

fn cmd_maxtime(
    net: &Network,
    hs: &[u64],
    params: &SolveParams,
    trace: Option<&FsPath>,
) -> Result<Value> {
    let res = maxflow_over_time_sweep(net, hs, params)?;
    if let (Some(p), Some(last)) = (trace, res.last()) {
        run_sim(net, &last.routing, last.realized_horizon, Some(p))?;
    }
    let points: Vec<Value> = res.iter().map(|r| mfot_value(net, r)).collect();
    Ok(json!({ "points": points }))
}

fn cmd_demandmax(net: &Network, budget: Option<u64>, params: &SolveParams) -> Result<Value> {
    let mp = MultilayerParams {
        trials: params.trials,
        seed: params.seed,
        layer_base: params.calibration.layer_base,
        calibration: params.calibration.clone(),
    };
    let r = demand_max_static(net, budget, &mp)?;
    let mut supply = vec![Rat::from_integer(0.into()); net.n()];
    for &v in &r.selected {
        supply[v] = net.supply[v].clone();
    }
    let st = flow_stats(net, &routing_to_pathflow(net, &r.routing, &supply)?);
    let names = |vs: &[usize]| vs.iter().map(|&v| net.nodes[v].clone()).collect::<Vec<_>>();
    Ok(json!({
        "value": fmt_rat(&r.value),
        "upper_bound": fmt_rat(&r.upper_bound),
        "selected": names(&r.selected),
        "dropped": names(&r.dropped),
        "best_group": r.best_group,
        "groups": r.groups,
        "edge_congestion": fmt_rat(&st.edge_congestion),
        "max_length": st.max_length,
        "routing": confluent_doc(net, &r.routing, &BTreeMap::new()),
    }))
}

fn cmd_bench(c: &Common, sp: &CorpusSpec, seed: u64, cal: &Calibration) -> Result<()> {
    let nets = gen_random_corpus(sp, seed)?;
    let mut wr = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
    wr.write_record([
        "instance",
        "nodes",
        "sources",
        "opt_lower_bound",
        "claimed_time",
        "congestion",
        "length_factor",
        "pipeline_fraction",
        "wall_ms",
    ])
    .map_err(err)?;
    for (i, net) in nets.iter().enumerate() {
        let params = SolveParams {
            trials: c
                .trials
                .unwrap_or_else(|| trials_for(net.n(), cal.trials_c)),
            seed: seed ^ i as u64,
            calibration: cal.clone(),
        };
        let t0 = Instant::now();
        let row = match solve_quickest(net, &params) {
            Ok(q) => vec![
                i.to_string(),
                net.n().to_string(),
                net.sources().len().to_string(),
                q.certificates.lower_bound.to_string(),
                q.claimed_time.to_string(),
                q.certificates.congestion.clone(),
                q.certificates.time_factor.clone(),
                q.certificates.pipeline_fraction.clone(),
                t0.elapsed().as_millis().to_string(),
            ],
            Err(e) => vec![
                i.to_string(),
                net.n().to_string(),
                net.sources().len().to_string(),
                "".into(),
                format!("error: {e}"),
                "".into(),
                "".into(),
                "".into(),
                t0.elapsed().as_millis().to_string(),
            ],
        };
        wr.write_record(&row).map_err(err)?;
    }
    let bytes = wr
        .into_inner()
        .map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    emit_text(c, &String::from_utf8_lossy(&bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ArcDoc {
    edge: usize,
    #[serde(default)]
    rev: bool,
    to: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PathDoc {
    nodes: Vec<String>,
    arcs: Vec<ArcDoc>,
    value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RoutingDoc {
    Confluent {
        arcs: BTreeMap<String, ArcDoc>,
        #[serde(default)]
        schedule: BTreeMap<String, Vec<Release>>,
    },
    Paths {
        paths: Vec<PathDoc>,
        #[serde(default)]
        schedule: BTreeMap<usize, Vec<Release>>,
    },
}

fn arc_doc(net: &Network, a: Arc) -> ArcDoc {
    ArcDoc {
        edge: a.edge,
        rev: a.rev,
        to: net.nodes[net.head(a)].clone(),
    }
}

fn confluent_doc(
    net: &Network,
    r: &ConfluentRouting,
    schedule: &BTreeMap<usize, Vec<Release>>,
) -> Value {
    let arcs = (0..net.n())
        .filter_map(|v| r.out[v].map(|a| (net.nodes[v].clone(), arc_doc(net, a))))
        .collect();
    let schedule = schedule
        .iter()
        .map(|(&v, rel)| (net.nodes[v].clone(), rel.clone()))
        .collect();
    serde_json::to_value(RoutingDoc::Confluent { arcs, schedule }).expect("routing serializes")
}

fn routing_doc(net: &Network, dr: &DynamicRouting) -> Value {
    match &dr.routing {
        Routing::Confluent(r) => confluent_doc(net, r, &dr.schedule),
        Routing::Paths(f) => {
            let paths = f
                .entries
                .iter()
                .map(|(p, x)| PathDoc {
                    nodes: p.nodes.iter().map(|&v| net.nodes[v].clone()).collect(),
                    arcs: p.arcs.iter().map(|&a| arc_doc(net, a)).collect(),
                    value: fmt_rat(x),
                })
                .collect();
            serde_json::to_value(RoutingDoc::Paths {
                paths,
                schedule: dr.schedule.clone(),
            })
            .expect("routing serializes")
        }
    }
}

fn arc_from_doc(net: &Network, d: &ArcDoc) -> Result<Arc> {
    if d.edge >= net.edges.len() {
        return Err(Error::Invalid(format!(
            "routing references missing edge {}",
            d.edge
        )));
    }
    let a = Arc {
        edge: d.edge,
        rev: d.rev,
    };
    if d.rev && net.directed {
        return Err(Error::Invalid(format!(
            "edge {} is directed and cannot be reversed",
            d.edge
        )));
    }
    if net.nodes[net.head(a)] != d.to {
        return Err(Error::Invalid(format!(
            "edge {} does not lead to {}",
            d.edge, d.to
        )));
    }
    Ok(a)
}

fn node_id(net: &Network, name: &str) -> Result<usize> {
    net.id(name)
        .ok_or_else(|| Error::Invalid(format!("unknown node {name}")))
}

/// Reads a routing document, or the routing inside a `solve` result.
fn routing_from_value(net: &Network, mut v: Value) -> Result<DynamicRouting> {
    if let Some(r) = v.get("result") {
        v = r.clone();
    }
    if let Some(r) = v.get("routing") {
        v = r.clone();
    }
    let doc: RoutingDoc = serde_json::from_value(v)?;
    match doc {
        RoutingDoc::Confluent { arcs, schedule } => {
            let mut r = ConfluentRouting::empty(net.n());
            for (name, a) in &arcs {
                let u = node_id(net, name)?;
                let arc = arc_from_doc(net, a)?;
                if net.tail(arc) != u {
                    return Err(Error::Invalid(format!(
                        "edge {} does not leave {name}",
                        a.edge
                    )));
                }
                r.out[u] = Some(arc);
            }
            let schedule = if schedule.is_empty() {
                DynamicRouting::greedy(net, r.clone(), &net.supply).schedule
            } else {
                schedule
                    .into_iter()
                    .map(|(n, rel)| Ok((node_id(net, &n)?, rel)))
                    .collect::<Result<_>>()?
            };
            Ok(DynamicRouting {
                routing: Routing::Confluent(r),
                schedule,
            })
        }
        RoutingDoc::Paths { paths, schedule } => {
            let mut entries = Vec::new();
            for p in &paths {
                let start = node_id(
                    net,
                    p.nodes
                        .first()
                        .ok_or_else(|| Error::Invalid("empty path".into()))?,
                )?;
                let arcs = p
                    .arcs
                    .iter()
                    .map(|a| arc_from_doc(net, a))
                    .collect::<Result<Vec<_>>>()?;
                let path = Path::from_arcs(net, start, arcs)?;
                entries.push((path, crate::netcore::rat::parse_rat(&p.value)?));
            }
            Ok(DynamicRouting {
                routing: Routing::Paths(PathFlow { entries }),
                schedule,
            })
        }
    }
}
