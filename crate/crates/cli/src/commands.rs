//! Subcommand implementations. Each one is a thin adapter over the library: it loads
//! inputs, calls the analysis, and prints the numbers unrounded.

use std::io::Write;
use std::ops::Range;
use std::path::Path;

use chainmeter::batch::{run_seeds, Execution};
use chainmeter::bounds::{throughput_sweep, ChainParams, NetworkParams, ThroughputReport};
use chainmeter::ingest::{
    self, default_degree, export_report, BandwidthUnit, BlockSizeUnit, ExportFormat, Report,
};
use chainmeter::metrics::{
    central_trust, centralization_level, cumulative_share_curve, CentralizationLevel, ConsensusKind,
};
use chainmeter::presets::Preset;
use chainmeter::scaling::{
    lightning_analysis, shard_analysis, BaselineChain, PaymentGraph, RelayPlan,
};
use chainmeter::simnet::{bound_violation_check, SimConfig, SimResult};
use chainmeter::Error;

use crate::args::{
    BoundArgs, ChainFlags, Command, LightningArgs, MetricsArgs, ShardArgs, SimulateArgs,
};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug)]
pub struct CommandError {
    pub code: u8,
    pub message: String,
}

impl CommandError {
    fn input(message: impl Into<String>) -> Self {
        CommandError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        CommandError {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::Topology(_) => CommandError::runtime(e.to_string()),
            other => CommandError::input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::runtime(format!("writing output: {e}"))
    }
}

type CmdResult = Result<(), CommandError>;

pub fn run(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Metrics(a) => cmd_metrics(a, out),
        Command::Bound(a) => cmd_bound(a, out),
        Command::Shard(a) => cmd_shard(a, out),
        Command::Lightning(a) => cmd_lightning(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
    }
}

fn export(report: Report<'_>, path: &Path) -> CmdResult {
    let format = ExportFormat::from_path(path)?;
    export_report(report, path, format)?;
    Ok(())
}

fn cmd_metrics(args: MetricsArgs, out: &mut dyn Write) -> CmdResult {
    let dist = ingest::load_distribution(&args.distribution)?;
    writeln!(out, "producers     {}", dist.len())?;
    writeln!(out, "total_weight  {}", dist.total())?;
    writeln!(out)?;
    writeln!(out, "{:<12} {:>8}  covered_share", "epsilon", "n")?;
    let levels = args
        .epsilon
        .iter()
        .map(|&e| centralization_level(&dist, e))
        .collect::<Result<Vec<CentralizationLevel>, _>>()?;
    for level in &levels {
        writeln!(
            out,
            "{:<12} {:>8}  {}",
            level.epsilon, level.n, level.covered_share
        )?;
    }
    if let Some(kind) = args.consensus {
        let kind: ConsensusKind = kind.into();
        let trust = central_trust(&dist, kind)?;
        writeln!(out)?;
        writeln!(
            out,
            "central_trust {kind}  n={} epsilon={} covered_share={}",
            trust.n, trust.epsilon, trust.covered_share
        )?;
    }
    if let Some(path) = &args.curve {
        let curve = cumulative_share_curve(&dist);
        export_report(Report::Curve(&curve), path, ExportFormat::Csv)?;
    }
    Ok(())
}

/// Chain parameters from a preset overlaid with explicit flags.
fn resolve_chain(flags: &ChainFlags) -> Result<ChainParams, CommandError> {
    let preset = flags.preset.map(Preset::from);
    let base = preset.map(Preset::chain);
    let block_size_bytes = match flags.block_size {
        Some(v) => BlockSizeUnit::from(flags.block_size_unit).to_bytes(v)?,
        None => base
            .map(|c| c.block_size_bytes)
            .ok_or_else(|| CommandError::input("--block-size is required without --preset"))?,
    };
    let pick = |flag: Option<f64>, from_base: Option<f64>, name: &str| {
        flag.or(from_base)
            .ok_or_else(|| CommandError::input(format!("--{name} is required without --preset")))
    };
    let chain = ChainParams {
        block_size_bytes,
        tx_size_bytes: pick(flags.tx_size, base.map(|c| c.tx_size_bytes), "tx-size")?,
        block_interval_s: pick(flags.interval, base.map(|c| c.block_interval_s), "interval")?,
        confirmations: flags
            .confirmations
            .or(base.map(|c| c.confirmations))
            .unwrap_or(ingest::DEFAULT_CONFIRMATIONS),
    };
    chain.validate()?;
    Ok(chain)
}

/// Network parameters, or `None` when neither a preset nor a bandwidth is given.
fn resolve_net(flags: &ChainFlags) -> Result<Option<NetworkParams>, CommandError> {
    let base = flags.preset.map(|p| Preset::from(p).net());
    let bandwidth = flags
        .bandwidth
        .map(|w| BandwidthUnit::from(flags.bandwidth_unit).to_bytes_per_s(w))
        .or(base.map(|n| n.bandwidth_bytes_per_s));
    let Some(bandwidth_bytes_per_s) = bandwidth else {
        if flags.latency.is_some() {
            return Err(CommandError::input(
                "--latency needs --bandwidth or --preset",
            ));
        }
        return Ok(None);
    };
    let latency_s = flags
        .latency
        .or(base.map(|n| n.latency_s))
        .ok_or_else(|| CommandError::input("--bandwidth needs --latency or --preset"))?;
    let net = NetworkParams {
        bandwidth_bytes_per_s,
        latency_s,
    };
    net.validate()?;
    Ok(Some(net))
}

fn cmd_bound(args: BoundArgs, out: &mut dyn Write) -> CmdResult {
    let chain = resolve_chain(&args.chain)?;
    let net = resolve_net(&args.chain)?;

    writeln!(out, "block_size_bytes  {}", chain.block_size_bytes)?;
    writeln!(out, "tx_size_bytes     {}", chain.tx_size_bytes)?;
    writeln!(out, "block_interval_s  {}", chain.block_interval_s)?;
    writeln!(out, "confirmations     {}", chain.confirmations)?;
    writeln!(
        out,
        "latency_s         {}",
        chainmeter::bounds::tx_latency(&chain)
    )?;
    writeln!(
        out,
        "ideal_tps         {}",
        chainmeter::bounds::max_throughput(&chain)
    )?;
    let report = net.map(|n| ThroughputReport::new(&chain, &n));
    if let (Some(n), Some(r)) = (net, &report) {
        writeln!(out, "bandwidth_Bps     {}", n.bandwidth_bytes_per_s)?;
        writeln!(out, "link_latency_s    {}", n.latency_s)?;
        writeln!(out, "propagation_tps   {}", r.propagation_tps)?;
        writeln!(out, "cap_tps           {}", r.cap_tps)?;
    }

    let sweep = match (&args.sweep, net) {
        (Some(sizes), Some(n)) => Some(throughput_sweep(&chain, &n, sizes)?),
        (Some(_), None) => {
            return Err(CommandError::input("--sweep needs --bandwidth or --preset"))
        }
        _ => None,
    };
    if let Some(rows) = &sweep {
        writeln!(out)?;
        write!(
            out,
            "{}",
            ingest::render_report(Report::Sweep(rows), ExportFormat::Csv)?
        )?;
    }

    if let Some(path) = &args.out {
        match (ExportFormat::from_path(path)?, &sweep, &report) {
            (ExportFormat::Csv, Some(rows), _) => export(Report::Sweep(rows), path)?,
            (ExportFormat::Json, _, Some(r)) => export(Report::Throughput(r), path)?,
            _ => {
                return Err(CommandError::input(
                    "--out takes .csv with --sweep, or .json with network parameters",
                ))
            }
        }
    }
    Ok(())
}

fn cmd_shard(args: ShardArgs, out: &mut dyn Write) -> CmdResult {
    let level = CentralizationLevel {
        n: args.n,
        epsilon: 0.0,
        covered_share: 1.0,
    };
    let base = BaselineChain::new(args.t, level, args.nodes.unwrap_or(args.n as u64))?;
    let s = shard_analysis(&base, args.k)?;
    writeln!(out, "{:<16} {:>24} {:>24}", "", "before", "after")?;
    writeln!(
        out,
        "{:<16} {:>24} {:>24}",
        "throughput_tps", args.t, s.sharded_tps
    )?;
    writeln!(
        out,
        "{:<16} {:>24} {:>24}",
        "centralization", args.n, s.sharded_centralization
    )?;
    writeln!(
        out,
        "{:<16} {:>24} {:>24}",
        "ctp", s.ctp_before, s.ctp_after
    )?;
    if let Some(path) = &args.out {
        export(Report::Sharding(&s), path)?;
    }
    Ok(())
}

fn cmd_lightning(args: LightningArgs, out: &mut dyn Write) -> CmdResult {
    let graph = match (&args.graph, args.complete) {
        (Some(path), _) => ingest::load_payment_graph(path)?,
        (None, Some(n)) if n >= 2 => PaymentGraph::complete(n),
        (None, Some(n)) => {
            return Err(CommandError::input(format!(
                "--complete needs at least 2 clients, got {n}"
            )))
        }
        (None, None) => return Err(CommandError::input("--graph or --complete is required")),
    };
    let plan = if let Some(relay) = &args.relay {
        RelayPlan::SingleRelay(relay.clone())
    } else if let Some(path) = &args.plan {
        RelayPlan::Custom(ingest::load_relay_plan(path)?)
    } else {
        RelayPlan::Direct
    };

    let clients = graph.clients().len() as u64;
    let level = CentralizationLevel {
        n: clients as usize,
        epsilon: 0.0,
        covered_share: 1.0,
    };
    let base = BaselineChain::new(args.t, level, clients)?;
    let direct = lightning_analysis(&base, &graph, &RelayPlan::Direct, args.alpha)?;
    let a = lightning_analysis(&base, &graph, &plan, args.alpha)?;

    writeln!(out, "clients           {clients}")?;
    writeln!(out, "plan              {}", a.plan)?;
    writeln!(out, "alpha             {}", args.alpha)?;
    writeln!(out, "{:<16} {:>24} {:>24}", "", "direct", "plan")?;
    writeln!(
        out,
        "{:<16} {:>24} {:>24}",
        "onchain_txs", a.direct_onchain, a.plan_onchain
    )?;
    writeln!(
        out,
        "{:<16} {:>24} {:>24}",
        "throughput_tps", direct.effective_tps, a.effective_tps
    )?;
    writeln!(
        out,
        "{:<16} {:>24} {:>24}",
        "relay_n0", direct.relay_centralization_n0, a.relay_centralization_n0
    )?;
    writeln!(out, "{:<16} {:>24} {:>24}", "ctp", direct.ctp, a.ctp)?;
    if let Some(path) = &args.out {
        export(Report::Lightning(&a), path)?;
    }
    Ok(())
}

fn parse_seeds(text: &str) -> Result<Range<u64>, CommandError> {
    let bad = || CommandError {
        code: EXIT_USAGE,
        message: format!("--seeds expects A..B or A..=B, got {text:?}"),
    };
    let (a, b, inclusive) = if let Some((a, b)) = text.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = text.split_once("..") {
        (a, b, false)
    } else {
        return Err(bad());
    };
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    let end = if inclusive {
        b.checked_add(1).ok_or_else(bad)?
    } else {
        b
    };
    if end <= a {
        return Err(bad());
    }
    Ok(a..end)
}

fn sim_config(args: &SimulateArgs) -> Result<SimConfig, CommandError> {
    let mut config = match &args.config {
        Some(path) => {
            let mut c = ingest::load_sim_config(path)?;
            let f = &args.chain;
            if f.preset.is_some() || f.block_size.is_some() || f.tx_size.is_some() {
                c.chain = resolve_chain(&ChainFlags {
                    block_size: f.block_size.or(Some(c.chain.block_size_bytes as f64)),
                    block_size_unit: if f.block_size.is_some() {
                        f.block_size_unit
                    } else {
                        crate::args::BlockUnitArg::Bytes
                    },
                    tx_size: f.tx_size.or(Some(c.chain.tx_size_bytes)),
                    interval: f.interval.or(Some(c.chain.block_interval_s)),
                    confirmations: f.confirmations.or(Some(c.chain.confirmations)),
                    preset: None,
                    latency: None,
                    bandwidth: None,
                    bandwidth_unit: f.bandwidth_unit,
                })?;
            } else {
                if let Some(p) = f.interval {
                    c.chain.block_interval_s = p;
                }
                if let Some(conf) = f.confirmations {
                    c.chain.confirmations = conf;
                }
            }
            if let Some(w) = f.bandwidth {
                c.net.bandwidth_bytes_per_s =
                    BandwidthUnit::from(f.bandwidth_unit).to_bytes_per_s(w);
            }
            if let Some(l) = f.latency {
                c.net.latency_s = l;
            }
            c
        }
        None => {
            let chain = resolve_chain(&args.chain)?;
            let net = resolve_net(&args.chain)?.ok_or_else(|| {
                CommandError::input(
                    "simulate needs network parameters: pass --preset or --bandwidth and --latency",
                )
            })?;
            SimConfig {
                miners: SimConfig::equal_miners(args.miners),
                chain,
                net,
                topology_degree: default_degree(args.miners),
                duration_blocks: 1_000,
                seed: 0,
            }
        }
    };
    if let Some(blocks) = args.blocks {
        config.duration_blocks = blocks;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(d) = args.degree {
        config.topology_degree = d;
    }
    config.validate()?;
    Ok(config)
}

fn print_run(out: &mut dyn Write, config: &SimConfig, r: &SimResult) -> CmdResult {
    let check = bound_violation_check(r, &config.net, &config.chain);
    writeln!(out, "seed                         {}", config.seed)?;
    writeln!(out, "miners                       {}", config.miners.len())?;
    writeln!(out, "blocks_mined                 {}", r.blocks.len() - 1)?;
    writeln!(out, "canonical_blocks             {}", r.canonical_len())?;
    writeln!(out, "duration_s                   {}", r.duration_s)?;
    writeln!(out, "stale_rate                   {}", r.stale_rate)?;
    writeln!(out, "observed_tps                 {}", r.observed_tps)?;
    writeln!(
        out,
        "ideal_tps                    {}",
        chainmeter::bounds::max_throughput(&config.chain)
    )?;
    writeln!(out, "cap_tps                      {}", check.cap_tps)?;
    writeln!(
        out,
        "mean_confirmation_latency_s  {}",
        r.mean_confirmation_latency_s
    )?;
    writeln!(out)?;
    writeln!(
        out,
        "{:<16} {:>12} {:>22} {:>22}",
        "miner", "canonical", "share", "hash_power"
    )?;
    let canonical = r.canonical_len().max(1) as f64;
    for (entry, miner) in r.per_miner_canonical.entries().iter().zip(&config.miners) {
        writeln!(
            out,
            "{:<16} {:>12} {:>22} {:>22}",
            entry.producer_id,
            entry.weight,
            entry.weight / canonical,
            miner.hash_power_share
        )?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let config = sim_config(&args)?;
    let seeds = match &args.seeds {
        Some(text) => parse_seeds(text)?,
        None => config.seed..config.seed + 1,
    };
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let multi = seeds.end - seeds.start > 1;
    let mut results = Vec::new();
    for (seed, r) in run_seeds(&config, seeds, execution) {
        results.push((seed, r?));
    }

    if multi {
        writeln!(
            out,
            "{:>8} {:>22} {:>22} {:>22} {:>8}",
            "seed", "observed_tps", "stale_rate", "cap_tps", "violated"
        )?;
        for (seed, r) in &results {
            let check = bound_violation_check(r, &config.net, &config.chain);
            writeln!(
                out,
                "{:>8} {:>22} {:>22} {:>22} {:>8}",
                seed, r.observed_tps, r.stale_rate, check.cap_tps, check.violated
            )?;
        }
    } else {
        let (seed, r) = &results[0];
        let run_config = SimConfig {
            seed: *seed,
            ..config.clone()
        };
        print_run(out, &run_config, r)?;
    }

    if let Some(path) = &args.out {
        if multi {
            export(Report::Simulations(&results), path)?;
        } else {
            export(Report::Simulation(&results[0].1), path)?;
        }
    }

    if args.check_bound {
        for (seed, r) in &results {
            let check = bound_violation_check(r, &config.net, &config.chain);
            if check.violated {
                return Err(CommandError::runtime(format!(
                    "seed {seed}: observed {} tps exceeds the cap of {} tps",
                    check.observed_tps, check.cap_tps
                )));
            }
        }
    }
    Ok(())
}
