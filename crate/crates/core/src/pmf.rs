//! Truncated discrete-distribution arithmetic.
//!
//! [`Pmf`] is the universal currency of exact computation: a probability mass
//! function over integer timesteps, truncated at a horizon `t_max`, with all
//! mass beyond the horizon tracked in `tail_mass`. Every operation keeps the
//! normalization invariant `sum(masses) + tail_mass = 1` (within
//! [`Real::NORM_EPS`]) and never invents mass it cannot account for: anything
//! an operation pushes past the horizon is absorbed into the tail.
//!
//! Masses at timesteps `t <= t_max` are exact (up to float rounding), which is
//! what makes co-CDF values computed from a truncated Pmf trustworthy: for
//! `t <= t_max` the returned value is the true `Pr(T > t)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Truncated probability mass function over integer timesteps.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<R: Real = f64> {
    support_start: u64,
    masses: Vec<R>,
    tail_mass: R,
    t_max: u64,
}

/// Mean of a truncated Pmf, reported as an interval rather than a point.
///
/// `lower` places the entire tail mass at `t_max + 1`, the smallest timestep
/// it could occupy. When the tail is empty the mean is exact and `upper`
/// equals `lower`; otherwise `upper` is only available once a dominating tail
/// model supplies a bound on the mass beyond the horizon (see
/// [`MeanBound::with_tail_correction`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanBound<R: Real = f64> {
    pub lower: R,
    pub upper: Option<R>,
    pub truncated: bool,
}

impl<R: Real> MeanBound<R> {
    /// Completes the interval given `extra >= sum_{t > t_max} Pr(T > t)`,
    /// the co-CDF series of a dominating tail model beyond the horizon.
    pub fn with_tail_correction(self, extra: R) -> Self {
        if self.truncated {
            MeanBound {
                lower: self.lower,
                upper: Some(self.lower + extra),
                truncated: true,
            }
        } else {
            self
        }
    }
}

impl<R: Real> Pmf<R> {
    /// Builds a Pmf from raw parts; `tail_mass` is defined as the complement
    /// of the provided masses so normalization holds by construction.
    pub fn from_masses(support_start: u64, masses: Vec<R>, t_max: u64) -> Result<Self> {
        let total: R = masses.iter().copied().sum();
        let tail = (R::one() - total).max(R::zero());
        Self::from_parts(support_start, masses, tail, t_max)
    }

    /// Builds a Pmf from explicit parts, validating all invariants.
    pub fn from_parts(support_start: u64, masses: Vec<R>, tail_mass: R, t_max: u64) -> Result<Self> {
        if t_max < 1 {
            return Err(Error::invalid("t_max", t_max as f64, "must be >= 1"));
        }
        if !masses.is_empty() && support_start + (masses.len() as u64 - 1) > t_max {
            return Err(Error::invalid(
                "support",
                (support_start as usize + masses.len() - 1) as f64,
                "masses extend beyond t_max",
            ));
        }
        let pmf = Pmf {
            support_start,
            masses,
            tail_mass,
            t_max,
        };
        pmf.validate()?;
        Ok(pmf)
    }

    /// Point mass at timestep `t`.
    pub fn point(t: u64, t_max: u64) -> Result<Self> {
        if t > t_max {
            return Err(Error::invalid("t", t as f64, "point mass beyond t_max"));
        }
        Self::from_parts(t, vec![R::one()], R::zero(), t_max)
    }

    /// Geometric completion-time law: `Pr(T = t) = p (1-p)^(t-1)` for
    /// integer `t >= 1`, with `(1-p)^t_max` left in the tail.
    pub fn geometric(p: R, t_max: u64) -> Result<Self> {
        check_probability("p", p)?;
        if t_max < 1 {
            return Err(Error::invalid("t_max", t_max as f64, "must be >= 1"));
        }
        let q = R::one() - p;
        if q == R::zero() {
            return Self::point(1, t_max);
        }
        let n = t_max as usize;
        let mut masses = Vec::with_capacity(n);
        for t in 1..=n {
            masses.push(p * q.powi(t as i32 - 1));
        }
        // the tail is the normalization complement of the stored masses; an
        // independently computed q^t_max drifts from it at extreme (p, t_max)
        // because the representation error of 1 - p compounds over the power
        Self::from_masses(1, masses, t_max)
    }

    pub fn support_start(&self) -> u64 {
        self.support_start
    }

    pub fn t_max(&self) -> u64 {
        self.t_max
    }

    pub fn tail_mass(&self) -> R {
        self.tail_mass
    }

    pub fn masses(&self) -> &[R] {
        &self.masses
    }

    /// Mass at a single timestep; zero outside the stored support,
    /// unknown (and reported as zero) beyond `t_max`.
    pub fn mass_at(&self, t: u64) -> R {
        if t < self.support_start {
            return R::zero();
        }
        let idx = (t - self.support_start) as usize;
        self.masses.get(idx).copied().unwrap_or_else(R::zero)
    }

    /// Checks all invariants: masses in `[0, 1]`, nonnegative tail,
    /// normalization within `NORM_EPS`.
    pub fn validate(&self) -> Result<()> {
        for &m in &self.masses {
            if !(m >= R::zero() && m <= R::one() + R::NORM_EPS) || m.is_nan() {
                return Err(Error::invalid(
                    "mass",
                    m.to_f64().unwrap_or(f64::NAN),
                    "mass out of [0, 1]",
                ));
            }
        }
        if self.tail_mass < R::zero() || self.tail_mass.is_nan() {
            return Err(Error::invalid(
                "tail_mass",
                self.tail_mass.to_f64().unwrap_or(f64::NAN),
                "must be nonnegative",
            ));
        }
        let total: R = self.masses.iter().copied().sum::<R>() + self.tail_mass;
        if (total - R::one()).abs() > R::NORM_EPS {
            return Err(Error::invalid(
                "normalization",
                total.to_f64().unwrap_or(f64::NAN),
                "masses + tail_mass must sum to 1",
            ));
        }
        Ok(())
    }

    /// `Pr(T > t)`; exact for `t <= t_max`, `tail_mass` beyond.
    pub fn co_cdf(&self, t: u64) -> R {
        if t >= self.t_max {
            return self.tail_mass;
        }
        let mut acc = self.tail_mass;
        for (i, &m) in self.masses.iter().enumerate().rev() {
            let ts = self.support_start + i as u64;
            if ts <= t {
                break;
            }
            acc = acc + m;
        }
        acc
    }

    /// Survival table `S[t] = Pr(T > t)` for `t = 0..=t_max`.
    pub fn co_cdf_table(&self) -> Vec<R> {
        let n = self.t_max as usize + 1;
        let mut table = vec![self.tail_mass; n];
        // suffix sums from the horizon backwards
        for t in (0..self.t_max as usize).rev() {
            let next_mass = self.mass_at(t as u64 + 1);
            table[t] = table[t + 1] + next_mass;
        }
        table
    }

    /// CDF table `F[t] = Pr(T <= t)` for `t = 0..=upto`.
    fn cdf_table(&self, upto: u64) -> Vec<R> {
        let mut table = Vec::with_capacity(upto as usize + 1);
        let mut acc = R::zero();
        for t in 0..=upto {
            acc = acc + self.mass_at(t);
            table.push(acc);
        }
        table
    }

    /// Truncated mean interval. `lower` counts the tail at `t_max + 1`.
    pub fn mean(&self) -> MeanBound<R> {
        let mut acc = R::zero();
        for (i, &m) in self.masses.iter().enumerate() {
            acc = acc + R::of_u64(self.support_start + i as u64) * m;
        }
        let lower = acc + self.tail_mass * R::of_u64(self.t_max + 1);
        if self.tail_mass == R::zero() {
            MeanBound {
                lower,
                upper: Some(lower),
                truncated: false,
            }
        } else {
            MeanBound {
                lower,
                upper: None,
                truncated: true,
            }
        }
    }

    /// Sum of two independent variables, truncated at the smaller horizon.
    /// Cross terms landing past the horizon are absorbed into the tail.
    pub fn convolve(&self, other: &Pmf<R>) -> Pmf<R> {
        let h = self.t_max.min(other.t_max);
        let start = self.support_start + other.support_start;
        if start > h {
            // everything we can say lands beyond the horizon
            return Pmf {
                support_start: h,
                masses: Vec::new(),
                tail_mass: R::one(),
                t_max: h,
            };
        }
        let len = (h - start + 1) as usize;
        let mut out = vec![R::zero(); len];
        for (i, &a) in self.masses.iter().enumerate() {
            let ta = self.support_start + i as u64;
            if ta > h {
                break;
            }
            for (j, &b) in other.masses.iter().enumerate() {
                let t = ta + other.support_start + j as u64;
                if t > h {
                    break;
                }
                let idx = (t - start) as usize;
                out[idx] = out[idx] + a * b;
            }
        }
        from_dense_offset(start, out, h)
    }

    /// Distribution of the maximum of independent variables: the CDF of the
    /// result is the product of the input CDFs.
    pub fn max_of(ds: &[Pmf<R>]) -> Result<Pmf<R>> {
        if ds.is_empty() {
            return Err(Error::invalid("ds", 0.0, "max_of needs at least one input"));
        }
        if ds.len() == 1 {
            return Ok(ds[0].clone());
        }
        let h = ds.iter().map(|d| d.t_max).min().unwrap();
        let mut cdf = ds[0].cdf_table(h);
        for d in &ds[1..] {
            let other = d.cdf_table(h);
            for (f, g) in cdf.iter_mut().zip(other) {
                *f = *f * g;
            }
        }
        let mut masses = Vec::with_capacity(cdf.len());
        let mut prev = R::zero();
        for &f in &cdf {
            masses.push((f - prev).max(R::zero()));
            prev = f;
        }
        Ok(from_dense_offset(0, masses, h))
    }

    /// Law of `sum_{k=1..K} M_k` where `K` is geometric with parameter `p`
    /// and each `M_k` is an independent copy of `self`.
    ///
    /// Evaluated timestep-by-timestep via the renewal recursion
    /// `f_T = p f_M + (1-p) (f_M * f_T)`, which is exact within truncation.
    /// The inner convolutions are organized in blocks so the bulk of the
    /// work is plain dot products (parallelized when the horizon is large);
    /// the arithmetic is identical to the naive recursion, only reordered.
    pub fn geometric_compound(&self, p: R, t_max: u64) -> Result<Pmf<R>> {
        check_probability("p", p)?;
        let h = self.t_max.min(t_max);
        if p == R::one() {
            // K = 1 almost surely
            return Ok(self.truncated(h));
        }
        let hu = h as usize;
        let fm = self.dense(hu);
        let fmr: Vec<R> = fm.iter().rev().copied().collect();
        let q = R::one() - p;
        // a mass of self at 0 feeds back into the same timestep; solve for it
        let denom = R::one() - q * fm[0];
        let mut ft = vec![R::zero(); hu + 1];
        // terms with fm[t - j] = 0 beyond the stored support contribute nothing
        let support_end = if self.masses.is_empty() {
            0
        } else {
            hu.min((self.support_start + self.masses.len() as u64 - 1) as usize)
        };

        const BLOCK: usize = 1024;
        let mut bs = 0usize;
        while bs <= hu {
            let be = (bs + BLOCK - 1).min(hu);
            let row = |t: usize, ft: &[R]| {
                let jstart = t.saturating_sub(support_end).min(bs);
                let off = hu - t;
                dot(&ft[jstart..bs], &fmr[off + jstart..off + bs])
            };
            let partial: Vec<R> = if bs == 0 {
                vec![R::zero(); be - bs + 1]
            } else if bs >= 8192 {
                (bs..=be).into_par_iter().map(|t| row(t, &ft)).collect()
            } else {
                (bs..=be).map(|t| row(t, &ft)).collect()
            };
            for t in bs..=be {
                let mut s = partial[t - bs];
                for j in bs.max(t.saturating_sub(support_end))..t {
                    s = s + ft[j] * fm[t - j];
                }
                ft[t] = (p * fm[t] + q * s) / denom;
            }
            bs = be + 1;
        }
        Ok(from_dense_offset(0, ft, h))
    }

    /// Dense mass vector over `0..=h` (requires `h <= t_max`).
    fn dense(&self, h: usize) -> Vec<R> {
        let mut out = vec![R::zero(); h + 1];
        for (i, &m) in self.masses.iter().enumerate() {
            let t = self.support_start as usize + i;
            if t > h {
                break;
            }
            out[t] = m;
        }
        out
    }

    /// Re-truncates to a smaller horizon, folding dropped masses into the tail.
    fn truncated(&self, new_t_max: u64) -> Pmf<R> {
        if new_t_max >= self.t_max {
            return self.clone();
        }
        let keep: Vec<R> = self
            .masses
            .iter()
            .enumerate()
            .take_while(|(i, _)| self.support_start + *i as u64 <= new_t_max)
            .map(|(_, &m)| m)
            .collect();
        from_dense_offset(self.support_start.min(new_t_max), keep, new_t_max)
    }
}

/// Builds a Pmf from a dense vector starting at `offset`, trimming zero
/// padding and defining the tail as the normalization complement.
fn from_dense_offset<R: Real>(offset: u64, mut masses: Vec<R>, t_max: u64) -> Pmf<R> {
    let lead = masses.iter().take_while(|&&m| m == R::zero()).count();
    let lead = lead.min(masses.len());
    if lead > 0 {
        masses.drain(..lead);
    }
    while masses.last() == Some(&R::zero()) {
        masses.pop();
    }
    let total: R = masses.iter().copied().sum();
    let tail = (R::one() - total).max(R::zero());
    Pmf {
        support_start: offset + lead as u64,
        masses,
        tail_mass: tail,
        t_max,
    }
}

/// Unrolled dot product; the four accumulators let LLVM vectorize the
/// floating-point reduction.
#[inline]
fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [R::zero(); 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let k = i * 4;
        acc[0] = acc[0] + a[k] * b[k];
        acc[1] = acc[1] + a[k + 1] * b[k + 1];
        acc[2] = acc[2] + a[k + 2] * b[k + 2];
        acc[3] = acc[3] + a[k + 3] * b[k + 3];
    }
    let mut rest = R::zero();
    for k in chunks * 4..a.len() {
        rest = rest + a[k] * b[k];
    }
    acc[0] + acc[1] + acc[2] + acc[3] + rest
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

/// Exponential-form survival curve with a timestep offset: the co-CDF is 1
/// up to `shift` and `exp(-rate (t - shift))` beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpCurve<R: Real = f64> {
    rate: R,
    shift: R,
}

impl<R: Real> ExpCurve<R> {
    pub fn new(rate: R, shift: R) -> Result<Self> {
        if !(rate > R::zero()) {
            return Err(Error::invalid(
                "rate",
                rate.to_f64().unwrap_or(f64::NAN),
                "must be positive",
            ));
        }
        if shift < R::zero() {
            return Err(Error::invalid(
                "shift",
                shift.to_f64().unwrap_or(f64::NAN),
                "must be nonnegative",
            ));
        }
        Ok(ExpCurve { rate, shift })
    }

    pub fn rate(&self) -> R {
        self.rate
    }

    pub fn shift(&self) -> R {
        self.shift
    }

    /// `Pr(X > t)`: 1 for `t <= shift`, `exp(-rate (t - shift))` beyond.
    pub fn co_cdf(&self, t: R) -> R {
        if t <= self.shift {
            R::one()
        } else {
            (-self.rate * (t - self.shift)).exp()
        }
    }

    /// Mean of the curve: `shift + 1/rate`.
    pub fn mean(&self) -> R {
        self.shift + R::one() / self.rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn geometric_p_one_is_point_mass() {
        let d: Pmf = Pmf::geometric(1.0, 10).unwrap();
        assert_eq!(d.support_start(), 1);
        assert_eq!(d.masses(), &[1.0]);
        assert_eq!(d.tail_mass(), 0.0);
    }

    #[test]
    fn geometric_half_small_horizon() {
        let d: Pmf = Pmf::geometric(0.5, 4).unwrap();
        assert_eq!(d.masses(), &[0.5, 0.25, 0.125, 0.0625]);
        assert_close(d.tail_mass(), 0.0625, 1e-15);
    }

    #[test]
    fn geometric_tiny_horizon() {
        let d: Pmf = Pmf::geometric(0.1, 1).unwrap();
        assert_eq!(d.masses(), &[0.1]);
        assert_close(d.tail_mass(), 0.9, 1e-15);
    }

    #[test]
    fn geometric_rejects_bad_parameters() {
        assert!(Pmf::<f64>::geometric(0.0, 10).is_err());
        assert!(Pmf::<f64>::geometric(1.5, 10).is_err());
        assert!(Pmf::<f64>::geometric(0.5, 0).is_err());
    }

    #[test]
    fn mean_of_certain_success() {
        let m = Pmf::<f64>::geometric(1.0, 10).unwrap().mean();
        assert_eq!(m.lower, 1.0);
        assert_eq!(m.upper, Some(1.0));
        assert!(!m.truncated);
    }

    #[test]
    fn mean_of_truncated_geometric_is_close_to_closed_form() {
        let m = Pmf::<f64>::geometric(0.5, 60).unwrap().mean();
        assert_close(m.lower, 2.0, 1e-12);
        // a tail of 2^-40 is still representable and keeps the flag set
        let m = Pmf::<f64>::geometric(0.5, 40).unwrap().mean();
        assert_close(m.lower, 2.0, 1e-12);
        assert!(m.truncated);
        assert_eq!(m.upper, None);
    }

    #[test]
    fn mean_flags_heavy_truncation() {
        let d: Pmf = Pmf::from_parts(1, vec![0.5], 0.5, 4).unwrap();
        let m = d.mean();
        assert!(m.truncated);
        assert_eq!(m.upper, None);
        // tail correction completes the interval
        let c = m.with_tail_correction(3.0);
        assert_eq!(c.upper, Some(m.lower + 3.0));
    }

    #[test]
    fn co_cdf_matches_geometric_closed_form() {
        let d: Pmf = Pmf::geometric(0.5, 10).unwrap();
        assert_close(d.co_cdf(0), 1.0, 1e-15);
        assert_close(d.co_cdf(2), 0.25, 1e-15);
        let d: Pmf = Pmf::geometric(0.1, 5).unwrap();
        assert_close(d.co_cdf(5), 0.59049, 1e-15);
    }

    #[test]
    fn co_cdf_table_agrees_with_pointwise() {
        let d: Pmf = Pmf::geometric(0.3, 32).unwrap();
        let table = d.co_cdf_table();
        for t in 0..=32 {
            assert_close(table[t as usize], d.co_cdf(t), 1e-15);
        }
    }

    #[test]
    fn convolve_point_masses() {
        let a: Pmf = Pmf::point(1, 16).unwrap();
        let c = a.convolve(&a);
        assert_eq!(c.support_start(), 2);
        assert_eq!(c.masses(), &[1.0]);
        assert_eq!(c.tail_mass(), 0.0);
    }

    #[test]
    fn convolve_geometrics_mass_at_two() {
        let a: Pmf = Pmf::geometric(0.5, 64).unwrap();
        let c = a.convolve(&a);
        // two-attempt outcome: both succeed on the first try
        assert_close(c.mass_at(2), 0.25, 1e-15);
    }

    #[test]
    fn convolve_identity_element() {
        let a: Pmf = Pmf::geometric(0.4, 32).unwrap();
        let id: Pmf = Pmf::point(0, 32).unwrap();
        let c = a.convolve(&id);
        assert_eq!(c.support_start(), a.support_start());
        for (x, y) in c.masses().iter().zip(a.masses()) {
            assert_close(*x, *y, 1e-15);
        }
    }

    #[test]
    fn max_of_singleton_is_identity() {
        let a: Pmf = Pmf::geometric(0.5, 16).unwrap();
        let m = Pmf::max_of(std::slice::from_ref(&a)).unwrap();
        assert_eq!(m, a);
    }

    #[test]
    fn max_of_two_geometrics() {
        let a: Pmf = Pmf::geometric(0.5, 256).unwrap();
        let m = Pmf::max_of(&[a.clone(), a]).unwrap();
        // Pr(max <= 1) = (1 - (1-p))^2
        assert_close(m.mass_at(1), 0.25, 1e-15);
        assert_close(m.mean().lower, 8.0 / 3.0, 1e-9);
    }

    #[test]
    fn max_of_rejects_empty() {
        assert!(Pmf::<f64>::max_of(&[]).is_err());
    }

    #[test]
    fn compound_with_certain_success_is_identity() {
        let a: Pmf = Pmf::geometric(0.3, 64).unwrap();
        let c = a.geometric_compound(1.0, 64).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn compound_of_unit_steps_is_geometric() {
        let unit: Pmf = Pmf::point(1, 64).unwrap();
        let c = unit.geometric_compound(0.5, 64).unwrap();
        let g: Pmf = Pmf::geometric(0.5, 64).unwrap();
        for t in 1..=64 {
            assert_close(c.mass_at(t), g.mass_at(t), 1e-14);
        }
    }

    #[test]
    fn compound_mean_matches_wald_identity() {
        let g: Pmf = Pmf::geometric(0.5, 2048).unwrap();
        let m = Pmf::max_of(&[g.clone(), g]).unwrap();
        let c = m.geometric_compound(0.5, 2048).unwrap();
        assert_close(c.mean().lower, 16.0 / 3.0, 1e-9);
    }

    #[test]
    fn compound_rejects_bad_probability() {
        let g: Pmf = Pmf::geometric(0.5, 16).unwrap();
        assert!(g.geometric_compound(0.0, 16).is_err());
        assert!(g.geometric_compound(1.0001, 16).is_err());
    }

    #[test]
    fn compound_agrees_with_series_enumeration() {
        // brute force: f_T = sum_{k=1..40} p (1-p)^(k-1) f_M^(conv k)
        let h = 64usize;
        let mut fm = vec![0.0f64; h + 1];
        fm[1] = 0.3;
        fm[2] = 0.4;
        fm[3] = 0.3;
        for &p in &[0.5f64, 1.0] {
            let mut series = vec![0.0f64; h + 1];
            let mut cur = fm.clone();
            for k in 1..=40u32 {
                let w = p * (1.0 - p).powi(k as i32 - 1);
                for (s, c) in series.iter_mut().zip(&cur) {
                    *s += w * c;
                }
                // next convolution power
                let mut next = vec![0.0f64; h + 1];
                for i in 0..=h {
                    if cur[i] == 0.0 {
                        continue;
                    }
                    for j in 0..=h - i {
                        next[i + j] += cur[i] * fm[j];
                    }
                }
                cur = next;
            }
            let m: Pmf = Pmf::from_masses(1, fm[1..=3].to_vec(), h as u64).unwrap();
            let c = m.geometric_compound(p, h as u64).unwrap();
            let tv: f64 = (0..=h)
                .map(|t| (c.mass_at(t as u64) - series[t]).abs())
                .sum::<f64>()
                / 2.0;
            assert!(tv < 1e-9, "total variation {tv} at p={p}");
        }
    }

    #[test]
    fn blocked_compound_matches_naive_recursion() {
        // exceed the block size so the partial/fixup split is exercised
        let h = 3000u64;
        let g: Pmf = Pmf::geometric(0.01, h).unwrap();
        let m = Pmf::max_of(&[g.clone(), g]).unwrap();
        let fast = m.geometric_compound(0.2, h).unwrap();

        let hu = h as usize;
        let fm = m.dense(hu);
        let (p, q) = (0.2f64, 0.8f64);
        let mut ft = vec![0.0f64; hu + 1];
        for t in 0..=hu {
            let mut s = 0.0;
            for j in 1..=t {
                s += fm[j] * ft[t - j];
            }
            ft[t] = p * fm[t] + q * s;
        }
        for (t, &reference) in ft.iter().enumerate() {
            let d = (fast.mass_at(t as u64) - reference).abs();
            assert!(d < 1e-14, "mass mismatch {d} at t={t}");
        }
    }

    #[test]
    fn exp_curve_evaluates_shifted_form() {
        let c: ExpCurve = ExpCurve::new(1.0, 0.0).unwrap();
        assert_eq!(c.co_cdf(0.0), 1.0);
        let c: ExpCurve = ExpCurve::new(-(0.5f64.ln()), 1.0).unwrap();
        assert_close(c.co_cdf(3.0), 0.25, 1e-15);
        let c: ExpCurve = ExpCurve::new(2.0, 0.0).unwrap();
        assert_close(c.co_cdf(1.0), (-2.0f64).exp(), 1e-15);
    }

    #[test]
    fn exp_curve_rejects_bad_parameters() {
        assert!(ExpCurve::<f64>::new(0.0, 0.0).is_err());
        assert!(ExpCurve::<f64>::new(1.0, -1.0).is_err());
    }

    #[test]
    fn f32_geometric_keeps_invariants() {
        let d: Pmf<f32> = Pmf::geometric(0.5f32, 64).unwrap();
        d.validate().unwrap();
        assert!((d.mean().lower - 2.0).abs() < 1e-4);
    }
}
