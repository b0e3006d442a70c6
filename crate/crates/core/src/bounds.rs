//! Latency and throughput of a single chain.
//!
//! Units are raw: bytes, seconds, bytes per second. Conversions from "MiB" or "Mbps" live in
//! [`crate::ingest::units`].

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Block size `b`, transaction size `s`, block interval `p` and confirmation depth `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub block_size_bytes: u64,
    pub tx_size_bytes: f64,
    pub block_interval_s: f64,
    pub confirmations: u32,
}

impl ChainParams {
    pub fn new(
        block_size_bytes: u64,
        tx_size_bytes: f64,
        block_interval_s: f64,
        confirmations: u32,
    ) -> Result<Self> {
        let params = ChainParams {
            block_size_bytes,
            tx_size_bytes,
            block_interval_s,
            confirmations,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.block_size_bytes == 0 {
            out.push("chain.block_size_bytes must be positive".to_string());
        }
        if !(self.tx_size_bytes.is_finite() && self.tx_size_bytes > 0.0) {
            out.push(format!(
                "chain.tx_size_bytes must be positive, got {}",
                self.tx_size_bytes
            ));
        } else if (self.block_size_bytes as f64) < self.tx_size_bytes {
            out.push(format!(
                "chain.block_size_bytes ({}) must hold at least one transaction of {} bytes",
                self.block_size_bytes, self.tx_size_bytes
            ));
        }
        if !(self.block_interval_s.is_finite() && self.block_interval_s > 0.0) {
            out.push(format!(
                "chain.block_interval_s must be positive, got {}",
                self.block_interval_s
            ));
        }
        if self.confirmations == 0 {
            out.push("chain.confirmations must be positive".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn with_block_size(self, block_size_bytes: u64) -> Self {
        ChainParams {
            block_size_bytes,
            ..self
        }
    }

    pub fn with_interval(self, block_interval_s: f64) -> Self {
        ChainParams {
            block_interval_s,
            ..self
        }
    }
}

/// Access bandwidth `w` and one-way latency `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub bandwidth_bytes_per_s: f64,
    pub latency_s: f64,
}

impl NetworkParams {
    pub fn new(bandwidth_bytes_per_s: f64, latency_s: f64) -> Result<Self> {
        let params = NetworkParams {
            bandwidth_bytes_per_s,
            latency_s,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.bandwidth_bytes_per_s.is_finite() && self.bandwidth_bytes_per_s > 0.0) {
            out.push(format!(
                "net.bandwidth_bytes_per_s must be positive, got {}",
                self.bandwidth_bytes_per_s
            ));
        }
        if !(self.latency_s.is_finite() && self.latency_s >= 0.0) {
            out.push(format!(
                "net.latency_s must be non-negative, got {}",
                self.latency_s
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    /// Time to push one block of `block_size_bytes` across one link: `l + b/w`.
    pub fn hop_delay(&self, block_size_bytes: u64) -> f64 {
        self.latency_s + block_size_bytes as f64 / self.bandwidth_bytes_per_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub ideal_tps: f64,
    pub propagation_tps: f64,
    pub cap_tps: f64,
    pub latency_s: f64,
}

impl ThroughputReport {
    pub fn new(chain: &ChainParams, net: &NetworkParams) -> Self {
        ThroughputReport {
            ideal_tps: max_throughput(chain),
            propagation_tps: propagation_limited_throughput(chain, net),
            cap_tps: throughput_upper_bound(net, chain.tx_size_bytes),
            latency_s: tx_latency(chain),
        }
    }
}

/// `C × p`
pub fn tx_latency(chain: &ChainParams) -> f64 {
    chain.confirmations as f64 * chain.block_interval_s
}

/// Transactions per block, `b / s`. Not rounded.
pub fn block_capacity(chain: &ChainParams) -> f64 {
    chain.block_size_bytes as f64 / chain.tx_size_bytes
}

/// `b / (s × p)`
pub fn max_throughput(chain: &ChainParams) -> f64 {
    chain.block_size_bytes as f64 / (chain.tx_size_bytes * chain.block_interval_s)
}

/// Throughput with the block interval at its floor `l + b/w`, i.e. `b / (s (l + b/w))`.
/// Strictly increasing in `b` when `l > 0`, with supremum `w / s`.
pub fn propagation_limited_throughput(chain: &ChainParams, net: &NetworkParams) -> f64 {
    let b = chain.block_size_bytes as f64;
    b / (chain.tx_size_bytes * net.hop_delay(chain.block_size_bytes))
}

/// `w / s`
pub fn throughput_upper_bound(net: &NetworkParams, tx_size_bytes: f64) -> f64 {
    net.bandwidth_bytes_per_s / tx_size_bytes
}

/// Evaluates [`propagation_limited_throughput`] at each block size, in input order.
pub fn throughput_sweep(
    chain: &ChainParams,
    net: &NetworkParams,
    block_sizes: &[u64],
) -> Result<Vec<(u64, f64)>> {
    if block_sizes.is_empty() {
        return Err(Error::InvalidInput("empty block size list".into()));
    }
    block_sizes
        .iter()
        .map(|&b| {
            let c = chain.with_block_size(b);
            if (b as f64) < chain.tx_size_bytes {
                return Err(Error::InvalidInput(format!(
                    "block size {b} is smaller than one transaction ({} bytes)",
                    chain.tx_size_bytes
                )));
            }
            Ok((b, propagation_limited_throughput(&c, net)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIB: u64 = 1 << 20;

    fn bitcoin() -> ChainParams {
        ChainParams::new(MIB, 513.86, 600.0, 6).unwrap()
    }

    fn net() -> NetworkParams {
        NetworkParams::new(712_500.0, 0.1).unwrap()
    }

    #[test]
    fn latency() {
        assert_eq!(tx_latency(&bitcoin()), 3600.0);
        assert_eq!(tx_latency(&bitcoin().with_interval(15.0)), 90.0);
        let tiny = ChainParams::new(10, 1.0, 0.001, 1).unwrap();
        assert_eq!(tx_latency(&tiny), 0.001);
    }

    #[test]
    fn capacity() {
        // 1048576 / 513.86, evaluated independently
        assert!((block_capacity(&bitcoin()) - 2040.587).abs() < 0.001);
        let one = ChainParams::new(500, 500.0, 1.0, 1).unwrap();
        assert_eq!(block_capacity(&one), 1.0);
        let four = ChainParams::new(1000, 250.0, 1.0, 1).unwrap();
        assert_eq!(block_capacity(&four), 4.0);
    }

    #[test]
    fn ideal_throughput() {
        assert!((max_throughput(&bitcoin()) - 3.40).abs() < 0.02);
        let one = ChainParams::new(500, 500.0, 1.0, 1).unwrap();
        assert_eq!(max_throughput(&one), 1.0);
        let c = bitcoin();
        assert_eq!(
            max_throughput(&c.with_block_size(2 * MIB)),
            2.0 * max_throughput(&c)
        );
    }

    #[test]
    fn propagation_limited() {
        // independent evaluation: 1048576 / (513.86 * (0.1 + 1048576/712500))
        let v = propagation_limited_throughput(&bitcoin(), &net());
        assert!((v - 1298.343).abs() < 0.01, "{v}");

        let no_latency = NetworkParams::new(712_500.0, 0.0).unwrap();
        for b in [600, 4096, MIB, 64 * MIB] {
            let c = bitcoin().with_block_size(b);
            let v = propagation_limited_throughput(&c, &no_latency);
            assert!((v - 712_500.0 / 513.86).abs() < 1e-9 * v);
        }

        let one = propagation_limited_throughput(&bitcoin(), &net());
        let two = propagation_limited_throughput(&bitcoin().with_block_size(2 * MIB), &net());
        assert!(two > one);
    }

    #[test]
    fn cap() {
        let v = throughput_upper_bound(&net(), 513.86);
        assert!((v - 1386.5).abs() < 0.5, "{v}");
        assert_eq!(
            throughput_upper_bound(&NetworkParams::new(42.0, 0.0).unwrap(), 42.0),
            1.0
        );
        assert!(propagation_limited_throughput(&bitcoin(), &net()) < v);
    }

    #[test]
    fn report_invariants() {
        let r = ThroughputReport::new(&bitcoin(), &net());
        assert!(r.propagation_tps <= r.cap_tps);
        // p = 600 is far above l + b/w
        assert!(r.propagation_tps >= r.ideal_tps);
    }

    #[test]
    fn sweep() {
        let sizes = [1000, 10_000, 100_000, MIB, 8 * MIB];
        let out = throughput_sweep(&bitcoin(), &net(), &sizes).unwrap();
        assert_eq!(out.iter().map(|x| x.0).collect::<Vec<_>>(), sizes);
        assert!(out.windows(2).all(|w| w[1].1 > w[0].1));
        let cap = throughput_upper_bound(&net(), 513.86);
        assert!(out.iter().all(|&(_, t)| t < cap));

        let single = throughput_sweep(&bitcoin(), &net(), &[MIB]).unwrap();
        assert_eq!(
            single[0].1,
            propagation_limited_throughput(&bitcoin(), &net())
        );

        assert!(throughput_sweep(&bitcoin(), &net(), &[]).is_err());
        assert!(throughput_sweep(&bitcoin(), &net(), &[100]).is_err());
    }

    #[test]
    fn param_validation() {
        assert!(ChainParams::new(0, 1.0, 1.0, 1).is_err());
        assert!(ChainParams::new(100, 200.0, 1.0, 1).is_err());
        assert!(ChainParams::new(100, 1.0, 0.0, 1).is_err());
        assert!(ChainParams::new(100, 1.0, 1.0, 0).is_err());
        assert!(NetworkParams::new(0.0, 0.0).is_err());
        assert!(NetworkParams::new(1.0, -0.5).is_err());
        match ChainParams::new(0, -1.0, f64::NAN, 0) {
            Err(Error::Config(v)) => assert_eq!(v.len(), 4),
            other => panic!("{other:?}"),
        }
    }
}
