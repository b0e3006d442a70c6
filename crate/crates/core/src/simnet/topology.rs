//! Random regular peer graphs.

use std::collections::VecDeque;

use rand::Rng;

use crate::{Error, Result};

pub(crate) const MAX_ATTEMPTS: usize = 100;

/// Random picks tried before falling back to a full scan for a usable stub pair.
const RANDOM_PICKS: usize = 64;

/// Undirected simple graph as adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    adjacency: Vec<Vec<usize>>,
}

impl Topology {
    /// A connected random `degree`-regular graph on `nodes` vertices.
    ///
    /// Stubs are paired at random, rejecting self-loops and parallel edges; an attempt that
    /// gets stuck or produces a disconnected graph starts over, up to [`MAX_ATTEMPTS`] times.
    pub fn random_regular<R: Rng>(nodes: usize, degree: usize, rng: &mut R) -> Result<Self> {
        if nodes == 1 {
            return Ok(Topology {
                adjacency: vec![Vec::new()],
            });
        }
        if degree == 0 || degree >= nodes || !(nodes * degree).is_multiple_of(2) {
            return Err(Error::Topology(format!(
                "no {degree}-regular graph on {nodes} nodes"
            )));
        }
        for _ in 0..MAX_ATTEMPTS {
            if let Some(adjacency) = pair_stubs(nodes, degree, rng) {
                let topo = Topology { adjacency };
                if topo.is_connected() {
                    return Ok(topo);
                }
            }
        }
        Err(Error::Topology(format!(
            "{MAX_ATTEMPTS} attempts at a connected {degree}-regular graph on {nodes} nodes failed"
        )))
    }

    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        Topology { adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Hop counts from `source`; `u32::MAX` for unreachable nodes.
    pub fn hops_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.hops_from(0).iter().all(|d| *d != u32::MAX)
    }

    /// All-pairs hop counts.
    pub fn hop_matrix(&self) -> Vec<Vec<u32>> {
        (0..self.len()).map(|s| self.hops_from(s)).collect()
    }
}

fn pair_stubs<R: Rng>(nodes: usize, degree: usize, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    let mut adjacency = vec![Vec::with_capacity(degree); nodes];
    let mut linked = vec![false; nodes * nodes];
    let mut stubs: Vec<usize> = (0..nodes)
        .flat_map(|n| std::iter::repeat_n(n, degree))
        .collect();

    while !stubs.is_empty() {
        let usable = |i: usize, j: usize| {
            let (u, v) = (stubs[i], stubs[j]);
            u != v && !linked[u * nodes + v]
        };
        let mut pick = None;
        for _ in 0..RANDOM_PICKS {
            let i = rng.random_range(0..stubs.len());
            let j = rng.random_range(0..stubs.len());
            if i != j && usable(i, j) {
                pick = Some((i, j));
                break;
            }
        }
        if pick.is_none() {
            pick = (0..stubs.len())
                .flat_map(|i| (i + 1..stubs.len()).map(move |j| (i, j)))
                .find(|&(i, j)| usable(i, j));
        }
        let (i, j) = pick?;
        let (u, v) = (stubs[i], stubs[j]);
        linked[u * nodes + v] = true;
        linked[v * nodes + u] = true;
        adjacency[u].push(v);
        adjacency[v].push(u);
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Some(adjacency)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn regular_and_simple() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, d) in [(2, 1), (3, 2), (10, 8), (20, 8), (50, 3), (101, 4), (9, 8)] {
            let t = Topology::random_regular(n, d, &mut rng).unwrap();
            assert_eq!(t.len(), n);
            for u in 0..n {
                let nb = t.neighbors(u);
                assert_eq!(nb.len(), d, "n={n} d={d}");
                assert!(!nb.contains(&u));
                assert!(nb.windows(2).all(|w| w[0] < w[1]));
                assert!(nb.iter().all(|&v| t.neighbors(v).contains(&u)));
            }
            assert!(t.is_connected());
        }
    }

    #[test]
    fn impossible_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(Topology::random_regular(5, 3, &mut rng).is_err());
        assert!(Topology::random_regular(4, 4, &mut rng).is_err());
        assert!(Topology::random_regular(4, 0, &mut rng).is_err());
    }

    #[test]
    fn perfect_matching_never_connects() {
        // 4 nodes of degree 1 are always two disjoint edges
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            Topology::random_regular(4, 1, &mut rng),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let a = Topology::random_regular(30, 6, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = Topology::random_regular(30, 6, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hops_on_a_path() {
        let t = Topology::from_adjacency(vec![vec![1], vec![0, 2], vec![1]]);
        assert_eq!(t.hops_from(0), vec![0, 1, 2]);
        assert_eq!(t.hop_matrix()[2], vec![2, 1, 0]);
    }
}
