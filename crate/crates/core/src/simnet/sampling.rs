use crate::{Error, Result};

pub(crate) const SHARE_SUM_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_shares(shares: &[f64]) -> Result<()> {
    if shares.is_empty() {
        return Err(Error::InvalidInput("no hash power shares".into()));
    }
    if let Some(bad) = shares.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "invalid hash power share {bad}"
        )));
    }
    let sum: f64 = shares.iter().sum();
    if (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "hash power shares sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Picks the miner of the next block by inverting the cumulative share at `u`.
pub fn sample_miner(shares: &[f64], u: f64) -> Result<usize> {
    check_shares(shares)?;
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Range {
            name: "u",
            value: u,
            expected: "0 <= u < 1",
        });
    }
    Ok(MinerSampler::new(shares).pick(u))
}

/// Precomputed cumulative shares for repeated sampling.
#[derive(Debug, Clone)]
pub(crate) struct MinerSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl MinerSampler {
    /// `shares` must already be validated.
    pub(crate) fn new(shares: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = shares
            .iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect();
        let last_positive = shares.iter().rposition(|s| *s > 0.0).unwrap_or(0);
        MinerSampler {
            cumulative,
            last_positive,
        }
    }

    pub(crate) fn pick(&self, u: f64) -> usize {
        let idx = self.cumulative.partition_point(|c| *c <= u);
        // u can land past the final partial sum when the shares sum to slightly under 1
        idx.min(self.last_positive)
    }
}
