//! Discrete-event simulation of proof-of-work mining over a gossip network.
//!
//! Blocks are found by a single global Poisson clock with mean interval `p`; the finder is
//! drawn in proportion to hash power and extends the best block it has received so far
//! (greatest height, then earliest local arrival, then lowest id). A new block floods a
//! random regular peer graph, each hop costing `l + b/w`. Because every hop costs the same,
//! flooding with duplicate suppression delivers a block to each node after exactly
//! `hops × (l + b/w)`, so arrivals are scheduled straight from the all-pairs hop matrix.
//!
//! After the last block is found the network drains for `10 × (l + b/w)`. The canonical
//! chain is the tip held by the observer node (node 0) at the end of the drain.
//!
//! A run is a pure function of its [`SimConfig`]: the seed drives one RNG stream for the
//! topology and an independent one for mining.

mod sampling;
mod topology;

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::bounds::{block_capacity, throughput_upper_bound, ChainParams, NetworkParams};
use crate::metrics::ProducerDistribution;
use crate::{Error, Result};

pub use sampling::sample_miner;
pub use topology::Topology;

use sampling::{MinerSampler, SHARE_SUM_TOLERANCE};

/// Drain period after the last mining event, in hop delays.
pub const DRAIN_HOPS: f64 = 10.0;

pub const DEFAULT_TOPOLOGY_DEGREE: usize = 8;

const TOPOLOGY_STREAM: u64 = 1;
const MINING_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinerSpec {
    pub miner_id: String,
    pub hash_power_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub miners: Vec<MinerSpec>,
    pub chain: ChainParams,
    pub net: NetworkParams,
    pub topology_degree: usize,
    pub duration_blocks: u64,
    pub seed: u64,
}

impl SimConfig {
    /// `count` miners named `m00, m01, ...` with equal hash power.
    pub fn equal_miners(count: usize) -> Vec<MinerSpec> {
        let width = count.saturating_sub(1).to_string().len().max(2);
        (0..count)
            .map(|i| MinerSpec {
                miner_id: format!("m{i:0width$}"),
                hash_power_share: 1.0 / count as f64,
            })
            .collect()
    }

    pub fn shares(&self) -> Vec<f64> {
        self.miners.iter().map(|m| m.hash_power_share).collect()
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.chain.violations();
        out.extend(self.net.violations());

        let n = self.miners.len();
        if n == 0 {
            out.push("miners must not be empty".into());
        }
        let mut ids = HashSet::new();
        for m in &self.miners {
            if m.miner_id.is_empty() {
                out.push("miners: miner_id must not be empty".into());
            } else if !ids.insert(m.miner_id.as_str()) {
                out.push(format!("miners: duplicate miner_id {:?}", m.miner_id));
            }
            if !(m.hash_power_share.is_finite() && m.hash_power_share >= 0.0) {
                out.push(format!(
                    "miners: {:?} has invalid hash_power_share {}",
                    m.miner_id, m.hash_power_share
                ));
            }
        }
        let sum: f64 = self.miners.iter().map(|m| m.hash_power_share).sum();
        if n > 0 && (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
            out.push(format!(
                "miners: hash_power_share values sum to {sum}, expected 1"
            ));
        }
        if n > 1 {
            if self.topology_degree == 0 || self.topology_degree >= n {
                out.push(format!(
                    "topology_degree must be between 1 and {} for {n} miners, got {}",
                    n - 1,
                    self.topology_degree
                ));
            } else if !(n * self.topology_degree).is_multiple_of(2) {
                out.push(format!(
                    "topology_degree {} times {n} miners must be even",
                    self.topology_degree
                ));
            }
        }
        if self.duration_blocks == 0 {
            out.push("duration_blocks must be at least 1".into());
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
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub block_id: u64,
    /// `None` for genesis.
    pub miner_id: Option<String>,
    pub parent_id: Option<u64>,
    pub height: u64,
    pub mined_at_s: f64,
    pub size_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Indexed by `block_id`; entry 0 is genesis.
    pub blocks: Vec<BlockRecord>,
    pub canonical_chain: Vec<u64>,
    pub per_miner_canonical: ProducerDistribution,
    pub stale_rate: f64,
    pub observed_tps: f64,
    pub mean_confirmation_latency_s: f64,
    /// Time of the last mining event.
    pub duration_s: f64,
}

impl SimResult {
    pub fn block(&self, id: u64) -> Option<&BlockRecord> {
        self.blocks.get(id as usize)
    }

    /// Canonical blocks excluding genesis.
    pub fn canonical_len(&self) -> usize {
        self.canonical_chain.len().saturating_sub(1)
    }
}

/// `hops × (l + b/w)`
pub fn propagation_delay(hops: u32, chain: &ChainParams, net: &NetworkParams) -> f64 {
    hops as f64 * net.hop_delay(chain.block_size_bytes)
}

#[derive(Debug, Clone, Copy)]
struct Tip {
    block: u64,
    height: u64,
    arrival: f64,
}

impl Tip {
    fn prefers(&self, height: u64, arrival: f64, block: u64) -> bool {
        match height.cmp(&self.height) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match arrival.total_cmp(&self.arrival) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => block < self.block,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Arrival {
    time: f64,
    seq: u64,
    node: usize,
    block: u64,
}

impl Eq for Arrival {}

impl Ord for Arrival {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Arrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Network {
    tips: Vec<Tip>,
    queue: BinaryHeap<Reverse<Arrival>>,
    seq: u64,
    heights: Vec<u64>,
}

impl Network {
    fn deliver_until(&mut self, until: f64) {
        while let Some(Reverse(next)) = self.queue.peek() {
            if next.time > until {
                break;
            }
            let Reverse(a) = self.queue.pop().expect("peeked");
            self.receive(a.node, a.block, a.time);
        }
    }

    fn receive(&mut self, node: usize, block: u64, time: f64) {
        let height = self.heights[block as usize];
        let tip = &mut self.tips[node];
        if tip.prefers(height, time, block) {
            *tip = Tip {
                block,
                height,
                arrival: time,
            };
        }
    }

    fn schedule(&mut self, node: usize, block: u64, time: f64) {
        self.seq += 1;
        self.queue.push(Reverse(Arrival {
            time,
            seq: self.seq,
            node,
            block,
        }));
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let n = config.miners.len();
    let chain = &config.chain;
    let hop_delay = config.net.hop_delay(chain.block_size_bytes);

    let mut topo_rng = ChaCha8Rng::seed_from_u64(config.seed);
    topo_rng.set_stream(TOPOLOGY_STREAM);
    let topology = Topology::random_regular(n, config.topology_degree, &mut topo_rng)?;
    let hops = topology.hop_matrix();

    let mut mine_rng = ChaCha8Rng::seed_from_u64(config.seed);
    mine_rng.set_stream(MINING_STREAM);
    let sampler = MinerSampler::new(&config.shares());

    let mut blocks = vec![BlockRecord {
        block_id: 0,
        miner_id: None,
        parent_id: None,
        height: 0,
        mined_at_s: 0.0,
        size_bytes: 0,
    }];
    let mut net = Network {
        tips: vec![
            Tip {
                block: 0,
                height: 0,
                arrival: 0.0,
            };
            n
        ],
        queue: BinaryHeap::new(),
        seq: 0,
        heights: vec![0],
    };

    let mut now = 0.0;
    for _ in 0..config.duration_blocks {
        let gap: f64 = mine_rng.sample(Exp1);
        now += gap * chain.block_interval_s;
        let winner = sampler.pick(mine_rng.random::<f64>());

        net.deliver_until(now);
        let parent = net.tips[winner];
        let id = blocks.len() as u64;
        blocks.push(BlockRecord {
            block_id: id,
            miner_id: Some(config.miners[winner].miner_id.clone()),
            parent_id: Some(parent.block),
            height: parent.height + 1,
            mined_at_s: now,
            size_bytes: chain.block_size_bytes,
        });
        net.heights.push(parent.height + 1);

        net.receive(winner, id, now);
        for (node, &h) in hops[winner].iter().enumerate() {
            if node != winner && h != u32::MAX {
                net.schedule(node, id, now + h as f64 * hop_delay);
            }
        }
    }
    let duration_s = now;
    net.deliver_until(now + DRAIN_HOPS * hop_delay);

    let observer_tip = net.tips[0];
    let mut canonical_chain = Vec::with_capacity(observer_tip.height as usize + 1);
    let mut cursor = Some(observer_tip.block);
    while let Some(id) = cursor {
        canonical_chain.push(id);
        cursor = blocks[id as usize].parent_id;
    }
    canonical_chain.reverse();

    let mut counts = vec![0.0; n];
    let index: std::collections::HashMap<&str, usize> = config
        .miners
        .iter()
        .enumerate()
        .map(|(i, m)| (m.miner_id.as_str(), i))
        .collect();
    for id in &canonical_chain[1..] {
        if let Some(miner) = &blocks[*id as usize].miner_id {
            counts[index[miner.as_str()]] += 1.0;
        }
    }
    let per_miner_canonical = ProducerDistribution::new(
        config
            .miners
            .iter()
            .zip(counts)
            .map(|(m, c)| (m.miner_id.clone(), c)),
    )?;

    let mined = (blocks.len() - 1) as f64;
    let canonical = (canonical_chain.len() - 1) as f64;
    let tip_time = blocks[observer_tip.block as usize].mined_at_s;
    Ok(SimResult {
        stale_rate: 1.0 - canonical / mined,
        observed_tps: block_capacity(chain) * canonical / duration_s,
        mean_confirmation_latency_s: chain.confirmations as f64 * tip_time / canonical,
        per_miner_canonical,
        canonical_chain,
        blocks,
        duration_s,
    })
}

/// Blocks per miner, genesis excluded; every configured miner appears, possibly with zero.
pub fn produced_distribution(
    result: &SimResult,
    canonical_only: bool,
) -> Result<ProducerDistribution> {
    let ids: Vec<&str> = result
        .per_miner_canonical
        .entries()
        .iter()
        .map(|e| e.producer_id.as_str())
        .collect();
    let mut counts = vec![0.0; ids.len()];
    let mut tally = |block: &BlockRecord| {
        if let Some(miner) = &block.miner_id {
            if let Some(i) = ids.iter().position(|id| id == miner) {
                counts[i] += 1.0;
            }
        }
    };
    if canonical_only {
        for id in &result.canonical_chain {
            if let Some(b) = result.block(*id) {
                tally(b);
            }
        }
    } else {
        result.blocks.iter().for_each(&mut tally);
    }
    ProducerDistribution::new(ids.into_iter().zip(counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub observed_tps: f64,
    pub cap_tps: f64,
    pub violated: bool,
}

/// Checks a run against the bandwidth cap `w / s`.
pub fn bound_violation_check(
    result: &SimResult,
    net: &NetworkParams,
    chain: &ChainParams,
) -> BoundCheck {
    let cap_tps = throughput_upper_bound(net, chain.tx_size_bytes);
    BoundCheck {
        observed_tps: result.observed_tps,
        cap_tps,
        violated: result.observed_tps > cap_tps,
    }
}
