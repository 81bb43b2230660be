//! Direct stochastic simulation of protocol trees.
//!
//! This is the independent oracle used to cross-validate the exact engine
//! and the analytical bounds: nothing here shares code with the distribution
//! arithmetic. Sampling is embarrassingly parallel; every sample draws from
//! its own counter-derived stream, so results are byte-identical regardless
//! of how many workers run the job.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::ProtocolNode;

const CHUNK: u64 = 8192;

/// Aggregated simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub n_samples: u64,
    pub mean: f64,
    pub std_error: f64,
    /// Empirical survival values on the observed support, ascending in `t`.
    pub co_cdf: Vec<(u64, f64)>,
    pub seed: u64,
}

impl SimEstimate {
    /// Empirical `Pr(T > t)`.
    pub fn co_cdf_at(&self, t: u64) -> f64 {
        // entries are (t, Pr(T > t)) at observed support points; before the
        // first observation nothing has completed
        let idx = self.co_cdf.partition_point(|&(ts, _)| ts <= t);
        if idx == 0 {
            1.0
        } else {
            self.co_cdf[idx - 1].1
        }
    }
}

/// Draws one completion time. `bound_mode` nodes are simulated at their
/// floor probability, i.e. the sample comes from the upper-bound model.
pub fn sample_completion<R: Rng>(tree: &ProtocolNode<f64>, rng: &mut R) -> u64 {
    match tree {
        ProtocolNode::Generate { p, .. } => sample_geometric(*p, rng),
        ProtocolNode::RestartUntilSuccess { p, children, .. } => {
            let mut t = 0u64;
            loop {
                let round = children
                    .iter()
                    .map(|c| sample_completion(c, rng))
                    .max()
                    .unwrap_or(0);
                t += round;
                if *p >= 1.0 || rng.gen_bool(*p) {
                    return t;
                }
            }
        }
    }
}

/// Inverse-transform geometric draw: `ceil(ln u / ln(1-p))` with
/// `u` uniform on `(0, 1]`. O(1) regardless of `p`.
fn sample_geometric<R: Rng>(p: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let t = (u.ln() / (1.0 - p).ln()).ceil();
    (t as u64).max(1)
}

/// Runs `n_samples` independent simulations of `tree`, reproducibly.
///
/// Sample `i` uses the stream `i` of a ChaCha generator seeded with `seed`,
/// and all aggregation is integer-exact, so the estimate is a pure function
/// of `(tree, n_samples, seed)`.
pub fn estimate(tree: &ProtocolNode<f64>, n_samples: u64, seed: u64) -> Result<SimEstimate> {
    if n_samples < 1 {
        return Err(Error::invalid(
            "n_samples",
            n_samples as f64,
            "need at least one sample",
        ));
    }
    tree.validate()?;

    struct ChunkStats {
        sum: u128,
        sum_sq: u128,
        counts: BTreeMap<u64, u64>,
    }

    let chunk_starts: Vec<u64> = (0..n_samples).step_by(CHUNK as usize).collect();
    let master = ChaCha8Rng::seed_from_u64(seed);
    let stats: Vec<ChunkStats> = chunk_starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(n_samples);
            let mut sum = 0u128;
            let mut sum_sq = 0u128;
            let mut counts = BTreeMap::new();
            for i in start..end {
                let mut rng = master.clone();
                rng.set_stream(i);
                let t = sample_completion(tree, &mut rng);
                sum += t as u128;
                sum_sq += (t as u128) * (t as u128);
                *counts.entry(t).or_insert(0u64) += 1;
            }
            ChunkStats { sum, sum_sq, counts }
        })
        .collect();

    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for s in stats {
        sum += s.sum;
        sum_sq += s.sum_sq;
        for (t, c) in s.counts {
            *counts.entry(t).or_insert(0) += c;
        }
    }

    let n = n_samples;
    let mean = sum as f64 / n as f64;
    let std_error = if n > 1 {
        // n * sum_sq - sum^2 is exact in integers
        let var_num = (n as u128 * sum_sq - sum * sum) as f64;
        (var_num / (n as f64 * (n - 1) as f64) / n as f64).sqrt()
    } else {
        0.0
    };

    let mut co_cdf = Vec::with_capacity(counts.len());
    let mut seen = 0u64;
    for (&t, &c) in &counts {
        seen += c;
        co_cdf.push((t, (n - seen) as f64 / n as f64));
    }

    Ok(SimEstimate {
        n_samples: n,
        mean,
        std_error,
        co_cdf,
        seed,
    })
}
