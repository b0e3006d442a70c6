//! Centralization level `N_ε` and central trust.
//!
//! A producer distribution is a multiset of `(producer, weight)` pairs where the weight is a
//! block count, a transaction count or a hash-power share. The centralization level at `ε` is
//! the smallest number of top producers whose combined weight reaches `1 - ε` of the total.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack on the coverage comparison; absorbs representation error in shares such as `0.9`.
pub const COVERAGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProducerEntry {
    pub producer_id: String,
    pub weight: f64,
}

/// Validated producer distribution.
///
/// Ids are unique, weights finite and non-negative, and the total is strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProducerEntry>", into = "Vec<ProducerEntry>")]
pub struct ProducerDistribution {
    entries: Vec<ProducerEntry>,
    total: f64,
}

impl ProducerDistribution {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let entries: Vec<ProducerEntry> = entries
            .into_iter()
            .map(|(id, weight)| ProducerEntry {
                producer_id: id.into(),
                weight,
            })
            .collect();
        Self::try_from(entries)
    }

    pub fn entries(&self) -> &[ProducerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn weight_of(&self, producer_id: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.producer_id == producer_id)
            .map(|e| e.weight)
    }

    /// Entries ordered by weight descending, ties by producer id ascending.
    pub fn ranked(&self) -> Vec<&ProducerEntry> {
        let mut ranked: Vec<&ProducerEntry> = self.entries.iter().collect();
        ranked.sort_by(|a, b| {
            b.weight
                .total_cmp(&a.weight)
                .then_with(|| a.producer_id.cmp(&b.producer_id))
        });
        ranked
    }
}

impl TryFrom<Vec<ProducerEntry>> for ProducerDistribution {
    type Error = Error;

    fn try_from(entries: Vec<ProducerEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty producer distribution".into()));
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            if !seen.insert(e.producer_id.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate producer id {:?}",
                    e.producer_id
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "producer {:?} has invalid weight {}",
                    e.producer_id, e.weight
                )));
            }
        }
        let total: f64 = entries.iter().map(|e| e.weight).sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidInput(
                "total producer weight must be positive and finite".into(),
            ));
        }
        Ok(ProducerDistribution { entries, total })
    }
}

impl From<ProducerDistribution> for Vec<ProducerEntry> {
    fn from(d: ProducerDistribution) -> Self {
        d.entries
    }
}

/// Result of a centralization query: the top `n` producers cover `covered_share` of the
/// total, which is at least `1 - epsilon`, and `n` is the smallest such count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralizationLevel {
    pub n: usize,
    pub epsilon: f64,
    pub covered_share: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsensusKind {
    /// Longest-chain proof-of-work; trusts the producers of a 51% majority.
    Nakamoto,
    /// Byzantine agreement; trusts the producers of a 2/3 quorum.
    Pbft,
    /// A single operator.
    Single,
}

impl ConsensusKind {
    /// The `ε` implied by the protocol's fault threshold, `None` for a single operator.
    pub fn fault_epsilon(self) -> Option<f64> {
        match self {
            ConsensusKind::Nakamoto => Some(0.49),
            ConsensusKind::Pbft => Some(0.33),
            ConsensusKind::Single => None,
        }
    }
}

impl fmt::Display for ConsensusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConsensusKind::Nakamoto => "nakamoto",
            ConsensusKind::Pbft => "pbft",
            ConsensusKind::Single => "single",
        })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Range {
            name: "epsilon",
            value: epsilon,
            expected: "0 <= epsilon < 1",
        });
    }
    Ok(())
}

/// Smallest `n` such that the `n` heaviest producers cover at least `1 - epsilon` of the
/// total weight.
pub fn centralization_level(
    dist: &ProducerDistribution,
    epsilon: f64,
) -> Result<CentralizationLevel> {
    check_epsilon(epsilon)?;
    let target = 1.0 - epsilon - COVERAGE_TOLERANCE;
    let total = dist.total();
    let mut covered = 0.0;
    for (i, entry) in dist.ranked().into_iter().enumerate() {
        covered += entry.weight;
        let share = covered / total;
        if share >= target {
            return Ok(CentralizationLevel {
                n: i + 1,
                epsilon,
                covered_share: share.min(1.0),
            });
        }
    }
    // Summation error only; the full set always covers the total.
    Ok(CentralizationLevel {
        n: dist.len(),
        epsilon,
        covered_share: 1.0,
    })
}

/// Central trust `T`: the centralization level at the protocol's fault threshold.
///
/// A single-operator chain trusts exactly one party whatever the distribution says, so it
/// reports `N_0 = 1` with full coverage.
pub fn central_trust(
    dist: &ProducerDistribution,
    kind: ConsensusKind,
) -> Result<CentralizationLevel> {
    match kind.fault_epsilon() {
        Some(epsilon) => centralization_level(dist, epsilon),
        None => Ok(CentralizationLevel {
            n: 1,
            epsilon: 0.0,
            covered_share: 1.0,
        }),
    }
}

/// `(rank, cumulative fraction)` for ranks `1..=len`, producers ranked as in
/// [`ProducerDistribution::ranked`].
pub fn cumulative_share_curve(dist: &ProducerDistribution) -> Vec<(usize, f64)> {
    let total = dist.total();
    let mut covered = 0.0;
    let mut curve: Vec<(usize, f64)> = dist
        .ranked()
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            covered += e.weight;
            (i + 1, (covered / total).min(1.0))
        })
        .collect();
    if let Some(last) = curve.last_mut() {
        last.1 = 1.0;
    }
    curve
}
