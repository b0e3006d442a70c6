//! Input files and report export.
//!
//! * Producer distributions: CSV with header `producer_id,weight`.
//! * Payment graphs: CSV with header `from,to,count`, or JSON `{"clients": [...],
//!   "payments": [{"from", "to", "count"}]}`.
//! * Relay plans: JSON `{"relays": [...], "routes": [{"from", "to", "via": [...]}]}`.
//! * Simulation configs: JSON mirroring [`SimConfig`], with an optional `units` object.

mod export;
pub mod units;

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::bounds::{ChainParams, NetworkParams};
use crate::metrics::{ProducerDistribution, ProducerEntry};
use crate::scaling::{CustomPlan, Payment, PaymentGraph};
use crate::simnet::{MinerSpec, SimConfig, DEFAULT_TOPOLOGY_DEGREE};
use crate::{Error, Result};

pub use export::{export_report, render_report, ExportFormat, Report};
pub use units::{BandwidthUnit, BlockSizeUnit, UnitSpec};

/// Confirmation depth used when a config leaves it out.
pub const DEFAULT_CONFIRMATIONS: u32 = 6;

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(file))
}

fn check_header(path: &Path, reader: &mut csv::Reader<File>, expected: &[&str]) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(parse_error(
            path,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    Ok(())
}

fn csv_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Reads a `producer_id,weight` CSV file.
pub fn load_distribution(path: impl AsRef<Path>) -> Result<ProducerDistribution> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    check_header(path, &mut reader, &["producer_id", "weight"])?;

    let mut entries: Vec<ProducerEntry> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 1;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(last_line + 1, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = csv_line(&record);
        last_line = line;
        if record.len() != 2 {
            return Err(parse_error(path, line, "expected 2 fields"));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(parse_error(path, line, "empty producer_id"));
        }
        let weight: f64 = record[1].parse().map_err(|_| {
            parse_error(
                path,
                line,
                format!("weight {:?} is not a number", &record[1]),
            )
        })?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(parse_error(
                path,
                line,
                format!("weight {weight} must be finite and non-negative"),
            ));
        }
        if !seen.insert(id.clone()) {
            return Err(parse_error(
                path,
                line,
                format!("duplicate producer_id {id:?}"),
            ));
        }
        entries.push(ProducerEntry {
            producer_id: id,
            weight,
        });
    }
    if entries.is_empty() {
        return Err(parse_error(path, last_line, "no producers"));
    }
    ProducerDistribution::try_from(entries).map_err(|e| parse_error(path, last_line, e.to_string()))
}

/// Reads a payment graph from `.json`, or from CSV with header `from,to,count` otherwise.
pub fn load_payment_graph(path: impl AsRef<Path>) -> Result<PaymentGraph> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "json") {
        let text = read_to_string(path)?;
        return serde_json::from_str(&text)
            .map_err(|e| parse_error(path, e.line() as u64, e.to_string()));
    }
    let mut reader = csv_reader(path)?;
    check_header(path, &mut reader, &["from", "to", "count"])?;
    let mut payments = Vec::new();
    for record in reader.records() {
        let record = record
            .map_err(|e| parse_error(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = csv_line(&record);
        if record.len() != 3 {
            return Err(parse_error(path, line, "expected 3 fields"));
        }
        let count: u64 = record[2].parse().map_err(|_| {
            parse_error(
                path,
                line,
                format!("count {:?} is not an integer", &record[2]),
            )
        })?;
        let payment = Payment {
            from: record[0].to_string(),
            to: record[1].to_string(),
            count,
        };
        PaymentGraph::new(vec![payment.clone()])
            .map_err(|e| parse_error(path, line, e.to_string()))?;
        payments.push(payment);
    }
    PaymentGraph::new(payments)
}

pub fn load_relay_plan(path: impl AsRef<Path>) -> Result<CustomPlan> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e.line() as u64, e.to_string()))
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    Ok(text)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMiner {
    miner_id: String,
    hash_power_share: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    block_size_bytes: f64,
    tx_size_bytes: f64,
    block_interval_s: f64,
    confirmations: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNet {
    bandwidth_bytes_per_s: f64,
    latency_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimConfig {
    miners: Vec<RawMiner>,
    chain: RawChain,
    net: RawNet,
    topology_degree: Option<usize>,
    duration_blocks: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    units: UnitSpec,
}

/// Parses and validates a simulation config from JSON text.
///
/// `chain.block_size_bytes` and `net.bandwidth_bytes_per_s` are read in the units named by
/// `units` (bytes and bytes per second when absent). Hash power shares may be left out on
/// every miner for an equal split; otherwise they must sum to 1 and are renormalized.
pub fn parse_sim_config(text: &str) -> Result<SimConfig> {
    let raw: RawSimConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    let mut violations = Vec::new();

    let block_size_bytes = match raw
        .units
        .block_size_unit
        .to_bytes(raw.chain.block_size_bytes)
    {
        Ok(b) => b,
        Err(e) => {
            violations.push(format!("chain.block_size_bytes: {e}"));
            0
        }
    };
    let chain = ChainParams {
        block_size_bytes,
        tx_size_bytes: raw.chain.tx_size_bytes,
        block_interval_s: raw.chain.block_interval_s,
        confirmations: raw.chain.confirmations.unwrap_or(DEFAULT_CONFIRMATIONS),
    };
    let net = NetworkParams {
        bandwidth_bytes_per_s: raw
            .units
            .bandwidth_unit
            .to_bytes_per_s(raw.net.bandwidth_bytes_per_s),
        latency_s: raw.net.latency_s,
    };

    let n = raw.miners.len();
    let given = raw
        .miners
        .iter()
        .filter(|m| m.hash_power_share.is_some())
        .count();
    let shares: Vec<f64> = if given == 0 {
        vec![1.0 / n.max(1) as f64; n]
    } else {
        if given < n {
            violations.push("miners: hash_power_share must be given for all miners or none".into());
        }
        raw.miners
            .iter()
            .map(|m| m.hash_power_share.unwrap_or(0.0))
            .collect()
    };
    let sum: f64 = shares.iter().sum();
    let normalize = given > 0 && sum > 0.0 && (sum - 1.0).abs() <= 1e-9;
    let miners = raw
        .miners
        .into_iter()
        .zip(shares)
        .map(|(m, s)| MinerSpec {
            miner_id: m.miner_id,
            hash_power_share: if normalize { s / sum } else { s },
        })
        .collect();

    let config = SimConfig {
        miners,
        chain,
        net,
        topology_degree: raw.topology_degree.unwrap_or_else(|| default_degree(n)),
        duration_blocks: raw.duration_blocks,
        seed: raw.seed,
    };
    violations.extend(
        config
            .violations()
            .into_iter()
            .filter(|v| block_size_bytes != 0 || !v.starts_with("chain.block_size_bytes")),
    );
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(Error::Config(violations))
    }
}

/// Degree 8, reduced for networks too small to support it.
pub fn default_degree(miners: usize) -> usize {
    DEFAULT_TOPOLOGY_DEGREE.min(miners.saturating_sub(1)).max(1)
}

pub fn load_sim_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let path = path.as_ref();
    parse_sim_config(&read_to_string(path)?).map_err(|e| match e {
        Error::Config(mut v) => {
            v.insert(0, format!("in {}", path.display()));
            Error::Config(v)
        }
        other => other,
    })
}

/// Writes `config` in the JSON form read by [`load_sim_config`], in bytes and bytes per
/// second.
pub fn save_sim_config(config: &SimConfig, path: impl AsRef<Path>) -> Result<()> {
    export_report(Report::Config(config), path, ExportFormat::Json)
}
