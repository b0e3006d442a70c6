//! Many simulations at once.
//!
//! Runs are independent, so with the `parallel` feature they are spread over the rayon
//! pool. Results always come back in input order, identical to a sequential run.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::simnet::{run_simulation, SimConfig, SimResult};
use crate::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Parallel,
}

/// Maps `f` over `items` in order, in parallel when requested and available.
pub fn map_ordered<T, R, F>(items: &[T], execution: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn run_batch(configs: &[SimConfig], execution: Execution) -> Vec<Result<SimResult>> {
    map_ordered(configs, execution, run_simulation)
}

/// Runs `config` once per seed, results in seed order.
pub fn run_seeds(
    config: &SimConfig,
    seeds: impl IntoIterator<Item = u64>,
    execution: Execution,
) -> Vec<(u64, Result<SimResult>)> {
    let configs: Vec<SimConfig> = seeds
        .into_iter()
        .map(|seed| SimConfig {
            seed,
            ..config.clone()
        })
        .collect();
    configs
        .iter()
        .map(|c| c.seed)
        .zip(run_batch(&configs, execution))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    #[test]
    fn parallel_matches_sequential() {
        let base = SimConfig {
            miners: SimConfig::equal_miners(10),
            chain: Preset::Bitcoin.chain().with_interval(20.0),
            net: Preset::Bitcoin.net(),
            topology_degree: 4,
            duration_blocks: 200,
            seed: 0,
        };
        let seq = run_seeds(&base, 0..6, Execution::Sequential);
        let par = run_seeds(&base, 0..6, Execution::Parallel);
        assert_eq!(seq.len(), 6);
        for ((s1, r1), (s2, r2)) in seq.into_iter().zip(par) {
            assert_eq!(s1, s2);
            assert_eq!(r1.unwrap(), r2.unwrap());
        }
    }
}
