//! Deterministic computation of completion-time distributions.
//!
//! The law of a protocol tree is computed by structural recursion: a
//! `Generate` leaf contributes a geometric Pmf, a `RestartUntilSuccess` node
//! compounds the maximum of its children's laws geometrically. Structurally
//! identical subtrees are evaluated once (the symmetric repeater shares all
//! subtrees at a level, so its cost is one compounding step per level rather
//! than one per leaf).

use std::collections::HashMap;

use crate::bounds::{tree_mean_upper, tree_tail_upper};
use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::protocol::ProtocolNode;
use crate::scalar::Real;

/// Largest truncation horizon the adaptive routines will attempt.
const HORIZON_CAP: u64 = 1 << 21;

/// Exact (within truncation) completion-time law of a protocol tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult<R: Real = f64> {
    pub pmf: Pmf<R>,
    /// Truncated mean with the tail placed at `t_max + 1`.
    pub mean_lower: R,
    pub tail_mass: R,
    /// True when some node has `bound_mode` set, in which case the computed
    /// law describes the upper-bound model rather than the exact protocol.
    pub is_upper_bound_model: bool,
}

/// Computes the completion-time Pmf of `tree`, truncated at `t_max`.
pub fn completion_pmf<R: Real>(tree: &ProtocolNode<R>, t_max: u64) -> Result<ExactResult<R>> {
    if t_max < 1 {
        return Err(Error::invalid("t_max", t_max as f64, "must be >= 1"));
    }
    tree.validate()?;
    let mut memo: HashMap<Vec<u8>, Pmf<R>> = HashMap::new();
    let pmf = eval(tree, t_max, &mut memo)?;
    Ok(ExactResult {
        mean_lower: pmf.mean().lower,
        tail_mass: pmf.tail_mass(),
        is_upper_bound_model: tree.has_bound_mode(),
        pmf,
    })
}

/// Computes the completion-time Pmf with the horizon doubled until the
/// truncation tail drops below `max_tail` (starting from the analytic mean
/// estimate, so the bulk is captured on the first attempt).
pub fn completion_pmf_to_tail<R: Real>(
    tree: &ProtocolNode<R>,
    max_tail: R,
) -> Result<ExactResult<R>> {
    if !(max_tail > R::zero() && max_tail < R::one()) {
        return Err(Error::invalid(
            "max_tail",
            max_tail.to_f64().unwrap_or(f64::NAN),
            "must be in (0, 1)",
        ));
    }
    tree.validate()?;
    // the envelope predicts where the tail drops below the target; starting
    // there usually makes the first attempt the only one
    let envelope = tree_tail_upper(tree)?;
    let predicted = ((envelope.prefactor_log - max_tail.ln() + R::of_f64(1.4)) / envelope.rate)
        .ceil()
        .to_f64()
        .unwrap_or(0.0)
        .max(0.0) as u64;
    let mut h = initial_horizon(tree)?.max(predicted).min(HORIZON_CAP);
    loop {
        let res = completion_pmf(tree, h)?;
        if res.tail_mass < max_tail {
            return Ok(res);
        }
        h = h.saturating_mul(2);
        if h > HORIZON_CAP {
            return Err(Error::ResourceLimit {
                partial: res.mean_lower.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
}

/// Mean completion time with guaranteed relative error at most `rel_tol`.
///
/// Runs `completion_pmf` with a doubling horizon until the analytic tail
/// envelope bounds the unseen part of the mean below `rel_tol` of the seen
/// part, then returns the midpoint of the resulting interval. Only exact
/// models are accepted; a bound-mode tree has no exact mean to report.
pub fn mean_of<R: Real>(tree: &ProtocolNode<R>, rel_tol: R) -> Result<R> {
    if !(rel_tol > R::zero() && rel_tol < R::one()) {
        return Err(Error::invalid(
            "rel_tol",
            rel_tol.to_f64().unwrap_or(f64::NAN),
            "must be in (0, 1)",
        ));
    }
    if tree.has_bound_mode() {
        return Err(Error::UnsupportedModel);
    }
    tree.validate()?;
    let envelope = tree_tail_upper(tree)?;
    let mut h = initial_horizon(tree)?;
    loop {
        let res = completion_pmf(tree, h)?;
        let lower = res.mean_lower;
        // everything the horizon missed, bounded by the dominating envelope
        let extra = envelope.sum_beyond(h);
        if extra <= rel_tol * lower {
            return Ok(lower + extra / R::two());
        }
        h = h.saturating_mul(2);
        if h > HORIZON_CAP {
            return Err(Error::ResourceLimit {
                partial: lower.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
}

fn initial_horizon<R: Real>(tree: &ProtocolNode<R>) -> Result<u64> {
    let estimate = tree_mean_upper(tree)?;
    let four_times = (estimate * R::of_f64(4.0))
        .ceil()
        .to_f64()
        .unwrap_or(f64::MAX);
    Ok((four_times as u64).clamp(16, HORIZON_CAP))
}

fn eval<R: Real>(
    node: &ProtocolNode<R>,
    t_max: u64,
    memo: &mut HashMap<Vec<u8>, Pmf<R>>,
) -> Result<Pmf<R>> {
    let mut key = Vec::new();
    node_key(node, &mut key);
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let pmf = match node {
        ProtocolNode::Generate { p, .. } => Pmf::geometric(*p, t_max)?,
        ProtocolNode::RestartUntilSuccess { p, children, .. } => {
            let kids = children
                .iter()
                .map(|c| eval(c, t_max, memo))
                .collect::<Result<Vec<_>>>()?;
            let vanguard = Pmf::max_of(&kids)?;
            vanguard.geometric_compound(*p, t_max)?
        }
    };
    memo.insert(key, pmf.clone());
    Ok(pmf)
}

/// Canonical structural encoding used as the memoization key. Labels are
/// ignored: they do not affect the law.
fn node_key<R: Real>(node: &ProtocolNode<R>, out: &mut Vec<u8>) {
    match node {
        ProtocolNode::Generate { p, .. } => {
            out.push(0);
            out.extend(p.to_f64().unwrap().to_bits().to_le_bytes());
        }
        ProtocolNode::RestartUntilSuccess {
            p,
            bound_mode,
            children,
            ..
        } => {
            out.push(1);
            out.extend(p.to_f64().unwrap().to_bits().to_le_bytes());
            out.push(*bound_mode as u8);
            out.extend((children.len() as u32).to_le_bytes());
            for child in children {
                node_key(child, out);
            }
        }
    }
}
