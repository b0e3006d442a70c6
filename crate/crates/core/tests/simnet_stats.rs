use chainmeter::batch::{run_batch, Execution};
use chainmeter::bounds::{max_throughput, NetworkParams};
use chainmeter::presets::Preset;
use chainmeter::simnet::{
    bound_violation_check, produced_distribution, run_simulation, sample_miner, MinerSpec,
    SimConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bitcoin(miners: usize, blocks: u64, seed: u64) -> SimConfig {
    SimConfig {
        miners: SimConfig::equal_miners(miners),
        chain: Preset::Bitcoin.chain(),
        net: Preset::Bitcoin.net(),
        topology_degree: 8.min(miners - 1).max(1),
        duration_blocks: blocks,
        seed,
    }
}

#[test]
fn sampler_frequencies() {
    let shares = [0.5, 0.25, 0.125, 0.0625, 0.0625];
    let samples = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = [0u64; 5];
    for _ in 0..samples {
        counts[sample_miner(&shares, rng.random::<f64>()).unwrap()] += 1;
    }
    for (c, p) in counts.iter().zip(shares) {
        let n = samples as f64;
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!((*c as f64 - n * p).abs() <= 3.0 * sigma, "{c} vs {}", n * p);
    }
}

#[test]
fn bitcoin_like_throughput() {
    let config = bitcoin(20, 10_000, 0);
    let r = run_simulation(&config).unwrap();
    let ideal = max_throughput(&config.chain);
    assert!(
        (r.observed_tps - ideal).abs() <= 0.05 * ideal,
        "{}",
        r.observed_tps
    );
    assert!(r.stale_rate < 0.01);
    assert!(!bound_violation_check(&r, &config.net, &config.chain).violated);
}

#[test]
fn canonical_chain_is_linked() {
    let mut config = bitcoin(12, 3_000, 5);
    // forks are common at this interval
    config.chain.block_interval_s = 30.0;
    let r = run_simulation(&config).unwrap();
    assert!(r.stale_rate > 0.0);
    for (h, pair) in r.canonical_chain.windows(2).enumerate() {
        let child = r.block(pair[1]).unwrap();
        assert_eq!(child.parent_id, Some(pair[0]));
        assert_eq!(child.height, h as u64 + 1);
    }
}

#[test]
fn interval_at_hop_delay_forks() {
    let net = NetworkParams::new(712_500.0, 0.1).unwrap();
    let mut config = bitcoin(20, 2_000, 1);
    config.net = net;
    let hop = net.hop_delay(config.chain.block_size_bytes);
    config.chain.block_interval_s = hop;
    let r = run_simulation(&config).unwrap();
    assert!(r.stale_rate > 0.1, "{}", r.stale_rate);
    assert!(!bound_violation_check(&r, &config.net, &config.chain).violated);
}

#[test]
fn stale_rate_falls_with_interval() {
    let hop = Preset::Bitcoin
        .net()
        .hop_delay(Preset::Bitcoin.chain().block_size_bytes);
    let multiples = [1.0, 2.0, 5.0, 20.0, 100.0];
    let mean_stale: Vec<f64> = multiples
        .iter()
        .map(|m| {
            let configs: Vec<SimConfig> = (0..10)
                .map(|seed| {
                    let mut c = bitcoin(20, 1_000, seed);
                    c.chain.block_interval_s = m * hop;
                    c
                })
                .collect();
            let runs = run_batch(&configs, Execution::Parallel);
            runs.iter()
                .map(|r| r.as_ref().unwrap().stale_rate)
                .sum::<f64>()
                / 10.0
        })
        .collect();
    assert!(
        mean_stale.windows(2).all(|w| w[0] >= w[1]),
        "{mean_stale:?}"
    );
}

#[test]
fn proportional_canonical_share() {
    let shares = [0.4, 0.3, 0.2, 0.1];
    let config = SimConfig {
        miners: shares
            .iter()
            .enumerate()
            .map(|(i, &s)| MinerSpec {
                miner_id: format!("m{i}"),
                hash_power_share: s,
            })
            .collect(),
        topology_degree: 3,
        ..bitcoin(4, 10_000, 3)
    };
    let r = run_simulation(&config).unwrap();
    let dist = produced_distribution(&r, true).unwrap();
    let n = r.canonical_len() as f64;
    for (e, p) in dist.entries().iter().zip(shares) {
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!(
            (e.weight - n * p).abs() <= 3.0 * sigma,
            "{} {}",
            e.producer_id,
            e.weight
        );
    }
    let all = produced_distribution(&r, false).unwrap();
    assert_eq!(all.total() as usize, r.blocks.len() - 1);
}

#[test]
fn batch_modes_agree() {
    let configs: Vec<SimConfig> = (0..6).map(|s| bitcoin(6, 300, s)).collect();
    let seq = run_batch(&configs, Execution::Sequential);
    let par = run_batch(&configs, Execution::Parallel);
    for (a, b) in seq.iter().zip(&par) {
        assert_eq!(a.as_ref().unwrap(), b.as_ref().unwrap());
    }
}
