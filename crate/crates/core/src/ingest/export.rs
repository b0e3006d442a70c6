use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::ThroughputReport;
use crate::metrics::{CentralizationLevel, ProducerDistribution};
use crate::scaling::{LightningAnalysis, ShardingAnalysis};
use crate::simnet::{BoundCheck, SimConfig, SimResult};
use crate::{Error, Result};

use super::units::UnitSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl ExportFormat {
    /// Picks the format from a `.json` or `.csv` extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(ExportFormat::Json),
            Some("csv") => Ok(ExportFormat::Csv),
            _ => Err(Error::Format(format!(
                "cannot infer format of {}; use a .json or .csv extension",
                path.display()
            ))),
        }
    }
}

/// Anything that can be written out. Flat tables export as CSV or JSON; nested reports as
/// JSON only.
#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Distribution(&'a ProducerDistribution),
    Curve(&'a [(usize, f64)]),
    Sweep(&'a [(u64, f64)]),
    Levels(&'a [CentralizationLevel]),
    Throughput(&'a ThroughputReport),
    Sharding(&'a ShardingAnalysis),
    Lightning(&'a LightningAnalysis),
    Simulation(&'a SimResult),
    /// Results keyed by seed, in seed order.
    Simulations(&'a [(u64, SimResult)]),
    BoundCheck(&'a BoundCheck),
    Config(&'a SimConfig),
}

impl Report<'_> {
    fn name(&self) -> &'static str {
        match self {
            Report::Distribution(_) => "distribution",
            Report::Curve(_) => "curve",
            Report::Sweep(_) => "sweep",
            Report::Levels(_) => "levels",
            Report::Throughput(_) => "throughput",
            Report::Sharding(_) => "sharding",
            Report::Lightning(_) => "lightning",
            Report::Simulation(_) => "simulation",
            Report::Simulations(_) => "simulations",
            Report::BoundCheck(_) => "bound check",
            Report::Config(_) => "config",
        }
    }

    fn to_json(self) -> Result<Value> {
        let value = match self {
            Report::Distribution(d) => to_value(d)?,
            Report::Curve(c) => c
                .iter()
                .map(|(rank, f)| json!({"rank": rank, "cumulative_fraction": f}))
                .collect(),
            Report::Sweep(s) => s
                .iter()
                .map(|(b, tps)| json!({"block_size_bytes": b, "tps": tps}))
                .collect(),
            Report::Levels(l) => to_value(l)?,
            Report::Throughput(t) => to_value(t)?,
            Report::Sharding(s) => to_value(s)?,
            Report::Lightning(l) => to_value(l)?,
            Report::Simulation(r) => to_value(r)?,
            Report::Simulations(rs) => rs
                .iter()
                .map(|(seed, r)| Ok(json!({"seed": seed, "result": to_value(r)?})))
                .collect::<Result<Vec<_>>>()?
                .into(),
            Report::BoundCheck(b) => to_value(b)?,
            Report::Config(c) => {
                let mut v = to_value(c)?;
                v["units"] = to_value(&UnitSpec::default())?;
                v
            }
        };
        Ok(value)
    }

    fn csv_rows(self) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        let rows = match self {
            Report::Distribution(d) => (
                vec!["producer_id", "weight"],
                d.entries()
                    .iter()
                    .map(|e| vec![e.producer_id.clone(), e.weight.to_string()])
                    .collect(),
            ),
            Report::Curve(c) => (
                vec!["rank", "cumulative_fraction"],
                c.iter()
                    .map(|(r, f)| vec![r.to_string(), f.to_string()])
                    .collect(),
            ),
            Report::Sweep(s) => (
                vec!["block_size_bytes", "tps"],
                s.iter()
                    .map(|(b, t)| vec![b.to_string(), t.to_string()])
                    .collect(),
            ),
            Report::Levels(l) => (
                vec!["epsilon", "n", "covered_share"],
                l.iter()
                    .map(|x| {
                        vec![
                            x.epsilon.to_string(),
                            x.n.to_string(),
                            x.covered_share.to_string(),
                        ]
                    })
                    .collect(),
            ),
            _ => return None,
        };
        Some(rows)
    }
}

fn to_value<T: Serialize + ?Sized>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Format(e.to_string()))
}

/// Renders a report as a JSON document or a CSV table (header row plus data rows).
pub fn render_report(report: Report<'_>, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&report.to_json()?)
                .map_err(|e| Error::Format(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        ExportFormat::Csv => {
            let name = report.name();
            let (header, rows) = report
                .csv_rows()
                .ok_or_else(|| Error::Format(format!("{name} reports have no CSV form")))?;
            let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
            let write = |w: &mut csv::Writer<Vec<u8>>, rec: &[String]| {
                w.write_record(rec)
                    .map_err(|e| Error::Format(e.to_string()))
            };
            let header: Vec<String> = header.into_iter().map(String::from).collect();
            write(&mut writer, &header)?;
            for row in &rows {
                write(&mut writer, row)?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| Error::Format(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
        }
    }
}

pub fn export_report(
    report: Report<'_>,
    path: impl AsRef<Path>,
    format: ExportFormat,
) -> Result<()> {
    let path = path.as_ref();
    let text = render_report(report, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
