use std::path::PathBuf;

use chainmeter::ingest::{BandwidthUnit, BlockSizeUnit};
use chainmeter::metrics::ConsensusKind;
use chainmeter::presets::Preset;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "chainmeter", version)]
#[command(about = "Blockchain decentralization and throughput analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Centralization levels N_ε of a producer distribution
    Metrics(MetricsArgs),
    /// Latency, throughput and the bandwidth cap of a chain
    Bound(BoundArgs),
    /// Throughput and centralization of an evenly sharded chain
    Shard(ShardArgs),
    /// Payment-channel batching and relaying
    Lightning(LightningArgs),
    /// Run the mining and propagation simulator
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// CSV file with header `producer_id,weight`
    pub distribution: PathBuf,

    /// Tolerated uncovered fraction; repeat or comma-separate for several
    #[arg(short, long, value_delimiter = ',', default_value = "0.1")]
    pub epsilon: Vec<f64>,

    /// Also report the central trust level for this consensus family
    #[arg(short, long, value_enum)]
    pub consensus: Option<ConsensusArg>,

    /// Write the cumulative share curve to this CSV file
    #[arg(long, value_name = "PATH")]
    pub curve: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ConsensusArg {
    Nakamoto,
    Pbft,
    Single,
}

impl From<ConsensusArg> for ConsensusKind {
    fn from(c: ConsensusArg) -> Self {
        match c {
            ConsensusArg::Nakamoto => ConsensusKind::Nakamoto,
            ConsensusArg::Pbft => ConsensusKind::Pbft,
            ConsensusArg::Single => ConsensusKind::Single,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum PresetArg {
    Bitcoin,
    Ethereum,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Bitcoin => Preset::Bitcoin,
            PresetArg::Ethereum => Preset::Ethereum,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum BlockUnitArg {
    Bytes,
    #[value(name = "MiB")]
    Mib,
    #[value(name = "MB")]
    Mb,
}

impl From<BlockUnitArg> for BlockSizeUnit {
    fn from(u: BlockUnitArg) -> Self {
        match u {
            BlockUnitArg::Bytes => BlockSizeUnit::Bytes,
            BlockUnitArg::Mib => BlockSizeUnit::MiB,
            BlockUnitArg::Mb => BlockSizeUnit::MB,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum BandwidthUnitArg {
    #[value(name = "bytes_per_s")]
    BytesPerS,
    #[value(name = "Mbps")]
    Mbps,
}

impl From<BandwidthUnitArg> for BandwidthUnit {
    fn from(u: BandwidthUnitArg) -> Self {
        match u {
            BandwidthUnitArg::BytesPerS => BandwidthUnit::BytesPerS,
            BandwidthUnitArg::Mbps => BandwidthUnit::MbpsDecimal,
        }
    }
}

/// Chain and network parameters shared by `bound` and `simulate`. Explicit flags override
/// the preset.
#[derive(Args, Debug)]
pub struct ChainFlags {
    /// Start from a named parameter set
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,

    /// Block size, in --block-size-unit
    #[arg(short = 'b', long)]
    pub block_size: Option<f64>,

    #[arg(long, value_enum, default_value = "bytes")]
    pub block_size_unit: BlockUnitArg,

    /// Average transaction size in bytes
    #[arg(short = 's', long)]
    pub tx_size: Option<f64>,

    /// Block interval in seconds
    #[arg(short = 'p', long)]
    pub interval: Option<f64>,

    /// Confirmations before a transaction counts as final
    #[arg(short = 'C', long)]
    pub confirmations: Option<u32>,

    /// One-way link latency in seconds
    #[arg(short = 'l', long)]
    pub latency: Option<f64>,

    /// Access bandwidth, in --bandwidth-unit
    #[arg(short = 'w', long)]
    pub bandwidth: Option<f64>,

    #[arg(long, value_enum, default_value = "bytes_per_s")]
    pub bandwidth_unit: BandwidthUnitArg,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub chain: ChainFlags,

    /// Evaluate the propagation-limited throughput at these block sizes (bytes) and print
    /// the result as CSV
    #[arg(long, value_delimiter = ',', value_name = "B1,B2,...")]
    pub sweep: Option<Vec<u64>>,

    /// Write the report (.json) or the sweep (.csv) to a file
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ShardArgs {
    /// Unsharded throughput, transactions per second
    #[arg(long)]
    pub t: f64,

    /// Centralization level N_ε of the unsharded chain
    #[arg(long)]
    pub n: usize,

    /// Number of shards
    #[arg(long)]
    pub k: u64,

    /// Total node count (defaults to N)
    #[arg(long)]
    pub nodes: Option<u64>,

    /// Write the analysis as JSON
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LightningArgs {
    /// Base on-chain throughput, transactions per second
    #[arg(long)]
    pub t: f64,

    /// Payment graph: CSV `from,to,count` or JSON
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "complete",
        required_unless_present = "complete"
    )]
    pub graph: Option<PathBuf>,

    /// Use a fully connected payment graph on this many clients
    #[arg(long, value_name = "N")]
    pub complete: Option<usize>,

    /// Every paying pair opens its own channel
    #[arg(long, group = "plan_mode")]
    pub direct: bool,

    /// Route every payment through this relay node
    #[arg(long, value_name = "ID", group = "plan_mode")]
    pub relay: Option<String>,

    /// Custom relay plan (JSON)
    #[arg(long, value_name = "PATH", group = "plan_mode")]
    pub plan: Option<PathBuf>,

    /// Batching factor: off-chain payments per on-chain transaction
    #[arg(long, default_value = "1")]
    pub alpha: f64,

    /// Write the analysis as JSON
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Simulation config (JSON). Without it, --preset and --miners describe the run.
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub chain: ChainFlags,

    /// Equal-power miners when no config file is given
    #[arg(long, default_value = "20")]
    pub miners: usize,

    /// Number of blocks to mine
    #[arg(long)]
    pub blocks: Option<u64>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Run every seed in a range such as `0..10` or `0..=9`
    #[arg(long, value_name = "A..B", conflicts_with = "seed")]
    pub seeds: Option<String>,

    /// Peer-graph degree
    #[arg(long)]
    pub degree: Option<usize>,

    /// Run seeds one after another instead of on the worker pool
    #[arg(long)]
    pub sequential: bool,

    /// Write the full result(s) as JSON
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Exit with status 3 if any run exceeds the bandwidth cap w/s
    #[arg(long)]
    pub check_bound: bool,
}
