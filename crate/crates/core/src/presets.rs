//! Named parameter sets for well-known chains.
//!
//! Bitcoin: 1 MiB blocks, 513.86-byte average transactions, 10-minute blocks, 6
//! confirmations, and 5.7 Mbps access bandwidth (the rate 90% of mining nodes exceed).
//!
//! Ethereum: 15-second blocks, 6 confirmations and 3.4 Mbps. Block and transaction sizes
//! are not fixed by the protocol (blocks are gas-limited); the preset uses 32 KiB blocks of
//! 150-byte transactions, close to early-2018 averages.
//!
//! Both use a one-way link latency of 100 ms.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{ChainParams, NetworkParams};
use crate::ingest::units::{MBPS_DECIMAL_BYTES, MIB};
use crate::Error;

pub const DEFAULT_LATENCY_S: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Bitcoin,
    Ethereum,
}

impl Preset {
    pub fn chain(self) -> ChainParams {
        match self {
            Preset::Bitcoin => ChainParams {
                block_size_bytes: MIB,
                tx_size_bytes: 513.86,
                block_interval_s: 600.0,
                confirmations: 6,
            },
            Preset::Ethereum => ChainParams {
                block_size_bytes: 32 * 1024,
                tx_size_bytes: 150.0,
                block_interval_s: 15.0,
                confirmations: 6,
            },
        }
    }

    pub fn net(self) -> NetworkParams {
        let mbps = match self {
            Preset::Bitcoin => 5.7,
            Preset::Ethereum => 3.4,
        };
        NetworkParams {
            bandwidth_bytes_per_s: mbps * MBPS_DECIMAL_BYTES,
            latency_s: DEFAULT_LATENCY_S,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "bitcoin" | "btc" => Ok(Preset::Bitcoin),
            "ethereum" | "eth" => Ok(Preset::Ethereum),
            other => Err(Error::InvalidInput(format!("unknown preset {other:?}"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Bitcoin => "bitcoin",
            Preset::Ethereum => "ethereum",
        })
    }
}
