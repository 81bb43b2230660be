//! Closed-form bounds on protocol completion times.
//!
//! Everything here is analytical: envelope curves for elementary-link
//! generation, mean and tail bounds for restart-until-success composition,
//! the nested-repeater and star-switch formulas, the harmonic-number bracket
//! for deterministic swapping, and the polynomially-decaying baseline bounds
//! they improve upon. The exact engine and the test suites cross-validate
//! all of these against computed distributions.

use crate::error::{Error, Result};
use crate::pmf::ExpCurve;
use crate::protocol::{GenModel, ProtocolNode, RepeaterSpec};
use crate::scalar::Real;

/// Direction of a [`TailCurve`] bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveDirection {
    Upper,
    Lower,
}

/// Exponential-form co-CDF bound `exp(a - b t)` with a validity domain.
///
/// Upper curves are clipped at 1 when reported; the raw parameters stay
/// accessible so the unclipped line can be plotted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCurve<R: Real = f64> {
    pub prefactor_log: R,
    pub rate: R,
    pub valid_from: R,
    pub direction: CurveDirection,
}

impl<R: Real> TailCurve<R> {
    /// Bound value at timestep `t` (upper curves clipped at 1).
    pub fn value_at(&self, t: R) -> R {
        let raw = self.raw_value_at(t);
        match self.direction {
            CurveDirection::Upper => raw.min(R::one()),
            CurveDirection::Lower => raw,
        }
    }

    /// Unclipped `exp(a - b t)`.
    pub fn raw_value_at(&self, t: R) -> R {
        (self.prefactor_log - self.rate * t).exp()
    }

    /// Upper bound on `sum_{s >= h+1} min(1, exp(a - b s))`, the co-CDF
    /// series beyond a truncation horizon. Used to turn a truncated mean
    /// into a two-sided interval.
    pub fn sum_beyond(&self, h: u64) -> R {
        debug_assert!(self.direction == CurveDirection::Upper);
        let a = self.prefactor_log;
        let b = self.rate;
        let start = R::of_u64(h + 1);
        // first integer s with exp(a - b s) <= 1
        let t0 = (a / b).ceil().max(start);
        let ones = t0 - start;
        let series = (a - b * t0).exp() / (R::one() - (-b).exp());
        ones + series
    }
}

/// Analytical bound bundle for one protocol configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<R: Real = f64> {
    pub mean_lower: R,
    pub mean_upper: R,
    pub tail_upper: TailCurve<R>,
    pub tail_lower: Option<TailCurve<R>>,
    /// Which rule produced each quantity, e.g. `("mean_upper", "three-halves-recursion")`.
    pub provenance: Vec<(&'static str, &'static str)>,
    /// Echo of the input parameters.
    pub parameters: Vec<(&'static str, R)>,
    /// Set when the requested configuration falls outside the nested
    /// formulas (no swap level) and link-level quantities are reported.
    pub degenerate: bool,
}

fn check_probability<R: Real>(name: &'static str, p: R) -> Result<()> {
    if !(p > R::zero() && p <= R::one()) {
        return Err(Error::invalid(
            name,
            p.to_f64().unwrap_or(f64::NAN),
            "probability must be in (0, 1]",
        ));
    }
    Ok(())
}

/// Mean of the continuous envelope that dominates a geometric completion
/// time: `1 - 1/ln(1-p)`. At `p = 1` the limit value 1 is returned.
pub fn gen_upper_mean<R: Real>(p: R) -> Result<R> {
    check_probability("p_gen", p)?;
    if p == R::one() {
        return Ok(R::one());
    }
    Ok(R::one() - R::one() / (R::one() - p).ln())
}

/// Dominating survival curve for a geometric completion time: 1 up to one
/// timestep, `(1-p)^(t-1)` beyond.
pub fn gen_envelope<R: Real>(p: R) -> Result<ExpCurve<R>> {
    check_probability("p_gen", p)?;
    if p == R::one() {
        return Err(Error::invalid(
            "p_gen",
            1.0,
            "envelope degenerates at p = 1",
        ));
    }
    ExpCurve::new(-(R::one() - p).ln(), R::one())
}

/// Mean of a restart-until-success stage: `m / p` exactly, or an upper
/// bound `m / c` when `p` is only a floor (`bound_mode`).
pub fn rus_mean<R: Real>(m: R, p: R, bound_mode: bool) -> Result<(R, bool)> {
    if !(m > R::zero()) {
        return Err(Error::invalid(
            "m",
            m.to_f64().unwrap_or(f64::NAN),
            "input mean must be positive",
        ));
    }
    check_probability("p", p)?;
    Ok((m / p, bound_mode))
}

/// Two-sided exponential tail bounds for a restart-until-success stage with
/// input-maximum mean `m`: upper `exp(p - p t / m)`, lower
/// `exp(-p t / (m (1 - p)))`. The lower curve is absent in bound mode and
/// at `p = 1` (where its rate is singular); in bound mode the upper curve
/// is only valid from `t = m` on.
pub fn rus_tail<R: Real>(m: R, p: R, bound_mode: bool) -> Result<(TailCurve<R>, Option<TailCurve<R>>)> {
    if !(m > R::zero()) {
        return Err(Error::invalid(
            "m",
            m.to_f64().unwrap_or(f64::NAN),
            "input mean must be positive",
        ));
    }
    check_probability("p", p)?;
    let upper = TailCurve {
        prefactor_log: p,
        rate: p / m,
        valid_from: if bound_mode { m } else { R::zero() },
        direction: CurveDirection::Upper,
    };
    let lower = if bound_mode || p == R::one() {
        None
    } else {
        Some(TailCurve {
            prefactor_log: R::zero(),
            rate: p / (m * (R::one() - p)),
            valid_from: R::zero(),
            direction: CurveDirection::Lower,
        })
    };
    Ok((upper, lower))
}

/// Sandwich on `E[max(T_1, ..., T_n)]` from the individual means: for
/// independent inputs `(max, sum)`, sharpened to `(E, (n - 1 + 1/n) E)`
/// when the inputs are i.i.d. NBU.
pub fn max_mean_bounds<R: Real>(means: &[R], iid: bool) -> Result<(R, R)> {
    if means.is_empty() {
        return Err(Error::invalid("means", 0.0, "need at least one input mean"));
    }
    if iid {
        let e = means[0];
        if means.iter().any(|&m| m != e) {
            return Err(Error::PreconditionUnmet("iid inputs must share one mean"));
        }
        let n = R::of_u64(means.len() as u64);
        Ok((e, (n - R::one() + R::one() / n) * e))
    } else {
        let lo = means.iter().copied().fold(R::zero(), R::max);
        let hi = means.iter().copied().sum();
        Ok((lo, hi))
    }
}

/// Closed form for the mean of the maximum of two i.i.d. completion times
/// with success parameter `p`: `(3 - 2p) / (p (2 - p))` in the discrete
/// model, `3 / (2p)` in the exponential model.
pub fn max_mean_iid_closed<R: Real>(p: R, model: GenModel) -> Result<R> {
    check_probability("p", p)?;
    let two = R::two();
    let three = R::of_f64(3.0);
    Ok(match model {
        GenModel::Discrete => (three - two * p) / (p * (two - p)),
        GenModel::Exponential => three / (two * p),
    })
}

/// Mean of the dominated comparison sum after `n` composition levels:
/// `((3 - 2p) / (p (2 - p)))^n * nu0`.
pub fn r_n_mean<R: Real>(n: u32, p_swap: R, nu0: R) -> Result<R> {
    check_probability("p_swap", p_swap)?;
    if !(nu0 > R::zero()) {
        return Err(Error::invalid(
            "nu0",
            nu0.to_f64().unwrap_or(f64::NAN),
            "base mean must be positive",
        ));
    }
    let two = R::two();
    let three = R::of_f64(3.0);
    let factor = (three - two * p_swap) / (p_swap * (two - p_swap));
    Ok(factor.powi(n as i32) * nu0)
}

/// The classical mean estimate `(3 / (2 p_swap))^n / p_gen`, which the
/// nested bounds show to be essentially an upper bound.
pub fn three_over_two<R: Real>(spec: &RepeaterSpec<R>) -> R {
    let factor = R::of_f64(1.5) / spec.p_swap;
    factor.powi(spec.nesting_levels as i32) / spec.p_gen
}

/// Baseline mean range and polynomial tail bound:
/// `((1/p)^n / p_gen, (2/p)^n / p_gen)` and the tail
/// `min(1, mean_upper / (t + 1))`.
pub fn markov_baseline<R: Real>(spec: &RepeaterSpec<R>, t: u64) -> (R, R, R) {
    let n = spec.nesting_levels as i32;
    let lo = (R::one() / spec.p_swap).powi(n) / spec.p_gen;
    let hi = (R::two() / spec.p_swap).powi(n) / spec.p_gen;
    let tail = (hi / R::of_u64(t + 1)).min(R::one());
    (lo, hi, tail)
}

fn mu0<R: Real>(spec: &RepeaterSpec<R>) -> Result<R> {
    match spec.gen_model {
        GenModel::Discrete => gen_upper_mean(spec.p_gen),
        GenModel::Exponential => Ok(R::one() / spec.p_gen),
    }
}

/// Full bound bundle for the symmetric nested repeater.
///
/// For `n = 0` there is no swap level; the report falls back to
/// elementary-link quantities and is marked `degenerate`.
pub fn repeater_bounds<R: Real>(spec: &RepeaterSpec<R>) -> Result<BoundReport<R>> {
    let parameters = vec![
        ("n", R::of_u64(spec.nesting_levels as u64)),
        ("p_gen", spec.p_gen),
        ("p_swap", spec.p_swap),
    ];
    let mu0 = mu0(spec)?;
    if spec.nesting_levels == 0 {
        return degenerate_link_report(spec, mu0, parameters);
    }

    let n = spec.nesting_levels as i32;
    let nu0 = max_mean_iid_closed(spec.p_gen, spec.gen_model)?;
    let ps = spec.p_swap;
    let three_halves = R::of_f64(1.5) / ps;
    let lower_factor = (R::of_f64(3.0) - R::two() * ps) / (ps * (R::two() - ps));

    let mean_upper = three_halves.powi(n) * mu0;
    let mean_lower = (R::one() / ps) * lower_factor.powi(n - 1) * nu0;
    let m_upper = R::of_f64(1.5) * three_halves.powi(n - 1) * mu0;
    let m_lower = lower_factor.powi(n - 1) * nu0;
    let (tail_upper, _) = rus_tail(m_upper, ps, false)?;
    let tail_lower = if ps == R::one() {
        None
    } else {
        rus_tail(m_lower, ps, false)?.1
    };

    let mut provenance = vec![
        ("mean_upper", "three-halves-recursion"),
        ("mean_lower", "dominated-max-recursion"),
        ("tail_upper", "compound-tail-envelope"),
    ];
    if tail_lower.is_some() {
        provenance.push(("tail_lower", "compound-tail-envelope"));
    }
    provenance.push((
        "mu0",
        match spec.gen_model {
            GenModel::Discrete => "link-envelope-mean",
            GenModel::Exponential => "link-exponential-mean",
        },
    ));

    Ok(BoundReport {
        mean_lower,
        mean_upper,
        tail_upper,
        tail_lower,
        provenance,
        parameters,
        degenerate: false,
    })
}

fn degenerate_link_report<R: Real>(
    spec: &RepeaterSpec<R>,
    mu0: R,
    parameters: Vec<(&'static str, R)>,
) -> Result<BoundReport<R>> {
    let pg = spec.p_gen;
    let exact_mean = R::one() / pg;
    let (tail_upper, tail_lower) = if pg == R::one() {
        (
            TailCurve {
                prefactor_log: degenerate_rate::<R>(),
                rate: degenerate_rate::<R>(),
                valid_from: R::zero(),
                direction: CurveDirection::Upper,
            },
            None,
        )
    } else {
        let b = -(R::one() - pg).ln();
        let (up, lo) = match spec.gen_model {
            GenModel::Discrete => (
                // survival of the dominating shifted exponential: (1-p)^(t-1)
                TailCurve {
                    prefactor_log: b,
                    rate: b,
                    valid_from: R::zero(),
                    direction: CurveDirection::Upper,
                },
                // the discrete survival (1-p)^floor(t) never drops below (1-p)^t
                TailCurve {
                    prefactor_log: R::zero(),
                    rate: b,
                    valid_from: R::zero(),
                    direction: CurveDirection::Lower,
                },
            ),
            GenModel::Exponential => (
                TailCurve {
                    prefactor_log: R::zero(),
                    rate: pg,
                    valid_from: R::zero(),
                    direction: CurveDirection::Upper,
                },
                TailCurve {
                    prefactor_log: R::zero(),
                    rate: pg,
                    valid_from: R::zero(),
                    direction: CurveDirection::Lower,
                },
            ),
        };
        (up, Some(lo))
    };
    Ok(BoundReport {
        mean_lower: exact_mean,
        mean_upper: mu0,
        tail_upper,
        tail_lower,
        provenance: vec![
            ("mean_lower", "link-exact-mean"),
            ("mean_upper", "link-envelope-mean"),
            ("tail_upper", "link-envelope"),
            ("tail_lower", "link-survival"),
        ],
        parameters,
        degenerate: true,
    })
}

/// Harmonic number `H_n = sum_{k=1..n} 1/k`.
pub fn harmonic_number<R: Real>(n: u64) -> R {
    (1..=n).map(|k| R::one() / R::of_u64(k)).sum()
}

/// Mean bracket `[a H_N, 1 + a H_N]` with `a = -1/ln(1 - p_gen)` for a
/// chain of `n_segments` parallel links connected by deterministic swaps.
/// At `p_gen = 1` the bracket degenerates to `[0, 1]` (the exact mean is 1).
pub fn deterministic_swap_bounds<R: Real>(n_segments: u64, p_gen: R) -> Result<(R, R)> {
    if n_segments < 1 {
        return Err(Error::invalid(
            "n_segments",
            n_segments as f64,
            "need at least one segment",
        ));
    }
    check_probability("p_gen", p_gen)?;
    let a = if p_gen == R::one() {
        R::zero()
    } else {
        -R::one() / (R::one() - p_gen).ln()
    };
    let h = harmonic_number::<R>(n_segments);
    Ok((a * h, R::one() + a * h))
}

/// Bound bundle for a `k`-armed switch with fusion probability `p_fuse`
/// whose arms complete with mean `arm_mean`: the mean is at most
/// `(k - 1 + 1/k) arm_mean / p_fuse` and the tail decays exponentially.
/// No lower tail curve is produced.
pub fn switch_bounds<R: Real>(k: u32, p_fuse: R, arm_mean: R) -> Result<BoundReport<R>> {
    if k < 2 {
        return Err(Error::invalid("k", k as f64, "switch needs k >= 2 arms"));
    }
    check_probability("p_fuse", p_fuse)?;
    if !(arm_mean > R::zero()) {
        return Err(Error::invalid(
            "arm_mean",
            arm_mean.to_f64().unwrap_or(f64::NAN),
            "arm mean must be positive",
        ));
    }
    let kr = R::of_u64(k as u64);
    let factor = kr - R::one() + R::one() / kr;
    let m_upper = factor * arm_mean;
    let mean_upper = m_upper / p_fuse;
    // the maximum of the arms dominates each single arm
    let mean_lower = arm_mean / p_fuse;
    let (tail_upper, _) = rus_tail(m_upper, p_fuse, false)?;
    Ok(BoundReport {
        mean_lower,
        mean_upper,
        tail_upper,
        tail_lower: None,
        provenance: vec![
            ("mean_upper", "iid-max-factor"),
            ("mean_lower", "max-dominates-each"),
            ("tail_upper", "compound-tail-envelope"),
        ],
        parameters: vec![
            ("k", kr),
            ("p_fuse", p_fuse),
            ("arm_mean", arm_mean),
        ],
        degenerate: false,
    })
}

/// Fallback envelope rate for degenerate (deterministic) stages; any
/// positive rate dominates a point mass once the prefactor covers the
/// support, so this only needs to be large enough to be negligible.
fn degenerate_rate<R: Real>() -> R {
    -R::NORM_EPS.ln()
}

/// Upper bound on the mean completion time of an arbitrary protocol tree,
/// by recursive composition: links use the dominating-envelope mean, each
/// restart stage divides the max-mean bound of its children by its success
/// probability (or floor, in bound mode).
pub fn tree_mean_upper<R: Real>(node: &ProtocolNode<R>) -> Result<R> {
    match node {
        ProtocolNode::Generate { p, .. } => gen_upper_mean(*p),
        ProtocolNode::RestartUntilSuccess { p, children, .. } => {
            Ok(children_max_mean_upper(children)? / *p)
        }
    }
}

fn children_max_mean_upper<R: Real>(children: &[ProtocolNode<R>]) -> Result<R> {
    let uppers = children
        .iter()
        .map(tree_mean_upper)
        .collect::<Result<Vec<_>>>()?;
    let identical = children.windows(2).all(|w| w[0] == w[1]);
    if identical {
        let n = R::of_u64(children.len() as u64);
        Ok((n - R::one() + R::one() / n) * uppers[0])
    } else {
        Ok(uppers.iter().copied().sum())
    }
}

/// Dominating exponential tail envelope for an arbitrary protocol tree.
/// Valid for every `t >= valid_from`; `valid_from` is zero unless a
/// bound-mode stage restricts the domain.
pub fn tree_tail_upper<R: Real>(node: &ProtocolNode<R>) -> Result<TailCurve<R>> {
    match node {
        ProtocolNode::Generate { p, .. } => {
            let b = if *p == R::one() {
                degenerate_rate::<R>()
            } else {
                -(R::one() - *p).ln()
            };
            Ok(TailCurve {
                prefactor_log: b,
                rate: b,
                valid_from: R::zero(),
                direction: CurveDirection::Upper,
            })
        }
        ProtocolNode::RestartUntilSuccess {
            p,
            bound_mode,
            children,
            ..
        } => {
            let m_up = children_max_mean_upper(children)?;
            Ok(TailCurve {
                prefactor_log: *p,
                rate: *p / m_up,
                valid_from: if *bound_mode { m_up } else { R::zero() },
                direction: CurveDirection::Upper,
            })
        }
    }
}
