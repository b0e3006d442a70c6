//! Unit conversions for block sizes and bandwidths.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIB: u64 = 1 << 20;
pub const MB: u64 = 1_000_000;
/// Bytes per second in one decimal megabit per second.
pub const MBPS_DECIMAL_BYTES: f64 = 125_000.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockSizeUnit {
    #[default]
    #[serde(rename = "bytes")]
    Bytes,
    MiB,
    MB,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandwidthUnit {
    #[default]
    #[serde(rename = "bytes_per_s")]
    BytesPerS,
    #[serde(rename = "Mbps_decimal")]
    MbpsDecimal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSpec {
    #[serde(default)]
    pub block_size_unit: BlockSizeUnit,
    #[serde(default)]
    pub bandwidth_unit: BandwidthUnit,
}

impl BlockSizeUnit {
    pub fn bytes_per_unit(self) -> u64 {
        match self {
            BlockSizeUnit::Bytes => 1,
            BlockSizeUnit::MiB => MIB,
            BlockSizeUnit::MB => MB,
        }
    }

    /// Converts to a whole number of bytes; fractional byte counts are rejected.
    pub fn to_bytes(self, value: f64) -> Result<u64> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidInput(format!(
                "block size must be positive, got {value}"
            )));
        }
        let bytes = value * self.bytes_per_unit() as f64;
        let rounded = bytes.round();
        // MB values like 0.3 pick up representation error when scaled by 10^6
        if (bytes - rounded).abs() > 1e-6 * rounded.max(1.0) || rounded > (1u64 << 53) as f64 {
            return Err(Error::InvalidInput(format!(
                "{value} {self:?} is not a whole number of bytes"
            )));
        }
        Ok(rounded as u64)
    }
}

impl BandwidthUnit {
    pub fn to_bytes_per_s(self, value: f64) -> f64 {
        match self {
            BandwidthUnit::BytesPerS => value,
            BandwidthUnit::MbpsDecimal => value * MBPS_DECIMAL_BYTES,
        }
    }
}

impl std::str::FromStr for BlockSizeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bytes" | "B" => Ok(BlockSizeUnit::Bytes),
            "MiB" => Ok(BlockSizeUnit::MiB),
            "MB" => Ok(BlockSizeUnit::MB),
            other => Err(Error::InvalidInput(format!(
                "unknown block size unit {other:?}"
            ))),
        }
    }
}

impl std::str::FromStr for BandwidthUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bytes_per_s" => Ok(BandwidthUnit::BytesPerS),
            "Mbps_decimal" | "Mbps" => Ok(BandwidthUnit::MbpsDecimal),
            other => Err(Error::InvalidInput(format!(
                "unknown bandwidth unit {other:?}"
            ))),
        }
    }
}
