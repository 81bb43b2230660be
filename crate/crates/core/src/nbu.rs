//! Empirical reliability-theory checks on computed distributions.
//!
//! The key notion is new-better-than-used (NBU): `Pr(X > x + y) <=
//! Pr(X > x) Pr(X > y)` for all nonnegative `x`, `y`. On an integer lattice
//! the step-function co-CDF attains its extreme margins at lattice points,
//! so the NBU check runs over all integer pairs plus the half-integer grid
//! mapped through the step function (which adds the `x + y + 1` comparison).
//! The reversed (NWU) check is evaluated on integer pairs only: for any
//! nondegenerate discrete law the real-valued reversal already fails
//! trivially at half-integers, so the lattice version is the meaningful one.
//!
//! All tolerances must cover the truncation tail; a check whose tolerance is
//! below the tail mass is refused as inconclusive rather than reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pmf::{ExpCurve, Pmf};
use crate::scalar::Real;

/// Which property a [`CheckReport`] verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckProperty {
    Nbu,
    Nwu,
    Dominance,
    MinBound,
    KsExponential,
}

/// Outcome of an empirical check: the worst signed margin (positive means
/// violation), where it occurred, and the tolerance that was applied.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport<R: Real = f64> {
    pub property: CheckProperty,
    pub passed: bool,
    pub worst_violation: R,
    pub witness: Vec<u64>,
    pub tolerance_used: R,
}

/// Default tolerance for checks on a truncated Pmf: float-rounding slack
/// plus twice the truncation tail.
pub fn check_tolerance<R: Real>(d: &Pmf<R>) -> R {
    R::CHECK_EPS + R::two() * d.tail_mass()
}

fn ensure_tolerance_covers_tail<R: Real>(d: &Pmf<R>, tolerance: R) -> Result<()> {
    if tolerance < d.tail_mass() {
        return Err(Error::InconclusiveTruncation {
            tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
            tail_mass: d.tail_mass().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Checks the NBU inequality `S(x+y) <= S(x) S(y)` over all integer pairs
/// with `x + y <= t_max`, plus the half-integer grid.
pub fn check_nbu<R: Real>(d: &Pmf<R>, tolerance: R) -> Result<CheckReport<R>> {
    ensure_tolerance_covers_tail(d, tolerance)?;
    let s = d.co_cdf_table();
    let h = s.len() - 1;
    let mut worst = R::neg_infinity();
    let mut witness = vec![0u64, 0u64];
    for x in 0..=h {
        if x + x > h {
            break;
        }
        for y in x..=h - x {
            let prod = s[x] * s[y];
            let margin = s[x + y] - prod;
            if margin > worst {
                worst = margin;
                witness = vec![x as u64, y as u64];
            }
            // half-integer pair (x + 1/2, y + 1/2)
            if x + y < h {
                let margin = s[x + y + 1] - prod;
                if margin > worst {
                    worst = margin;
                    witness = vec![x as u64, y as u64];
                }
            }
        }
    }
    Ok(CheckReport {
        property: CheckProperty::Nbu,
        passed: worst <= tolerance,
        worst_violation: worst,
        witness,
        tolerance_used: tolerance,
    })
}

/// Checks the reversed (NWU) inequality `S(x+y) >= S(x) S(y)` over integer
/// pairs with `x + y <= t_max`.
pub fn check_nwu<R: Real>(d: &Pmf<R>, tolerance: R) -> Result<CheckReport<R>> {
    ensure_tolerance_covers_tail(d, tolerance)?;
    let s = d.co_cdf_table();
    let h = s.len() - 1;
    let mut worst = R::neg_infinity();
    let mut witness = vec![0u64, 0u64];
    for x in 0..=h {
        if x + x > h {
            break;
        }
        for y in x..=h - x {
            let margin = s[x] * s[y] - s[x + y];
            if margin > worst {
                worst = margin;
                witness = vec![x as u64, y as u64];
            }
        }
    }
    Ok(CheckReport {
        property: CheckProperty::Nwu,
        passed: worst <= tolerance,
        worst_violation: worst,
        witness,
        tolerance_used: tolerance,
    })
}

/// The dominating side of a [`check_dominance`] comparison.
pub enum Survival<'a, R: Real> {
    Pmf(&'a Pmf<R>),
    Curve(&'a ExpCurve<R>),
}

impl<R: Real> Survival<'_, R> {
    fn co_cdf(&self, t: u64) -> R {
        match self {
            Survival::Pmf(d) => d.co_cdf(t),
            Survival::Curve(c) => c.co_cdf(R::of_u64(t)),
        }
    }
}

/// Checks that `a` stochastically dominates `b` on the grid: the co-CDF of
/// `a` must not fall below the co-CDF of `b` by more than `tolerance`.
pub fn check_dominance<R: Real>(
    a: &Survival<'_, R>,
    b: &Pmf<R>,
    t_grid: &[u64],
    tolerance: R,
) -> CheckReport<R> {
    let mut worst = R::neg_infinity();
    let mut witness = vec![0u64];
    for &t in t_grid {
        let margin = b.co_cdf(t) - a.co_cdf(t);
        if margin > worst {
            worst = margin;
            witness = vec![t];
        }
    }
    CheckReport {
        property: CheckProperty::Dominance,
        passed: worst <= tolerance,
        worst_violation: worst,
        witness,
        tolerance_used: tolerance,
    }
}

/// For an NBU distribution, the mean of the minimum of `n` i.i.d. copies is
/// at least `mean / n`. Verifies this numerically via the co-CDF power.
pub fn check_min_bound<R: Real>(d: &Pmf<R>, n: u32) -> Result<CheckReport<R>> {
    if n < 2 {
        return Err(Error::invalid("n", n as f64, "need at least two copies"));
    }
    let nbu = check_nbu(d, check_tolerance(d))?;
    if !nbu.passed {
        return Err(Error::PreconditionUnmet(
            "input distribution is not NBU; the minimum bound does not apply",
        ));
    }
    let s = d.co_cdf_table();
    let h = s.len() as u64 - 1;
    let min_mean: R = s.iter().map(|&v| v.powi(n as i32)).sum();
    let mean = d.mean().lower;
    let tolerance = R::CHECK_EPS + d.tail_mass() * R::of_u64(h + 1);
    let violation = mean / R::of_u64(n as u64) - min_mean;
    Ok(CheckReport {
        property: CheckProperty::MinBound,
        passed: violation <= tolerance,
        worst_violation: violation,
        witness: vec![],
        tolerance_used: tolerance,
    })
}

/// Sup-distance between the co-CDF of `d`, with time normalized by the
/// truncation-corrected mean, and the unit-mean exponential survival.
/// The supremum over real time is attained at step endpoints, so both
/// endpoints of every step are compared.
pub fn ks_to_exponential<R: Real>(d: &Pmf<R>) -> Result<R> {
    let mean = d.mean().lower;
    if !(mean > R::zero()) {
        return Err(Error::invalid(
            "mean",
            mean.to_f64().unwrap_or(f64::NAN),
            "distribution must have positive mean",
        ));
    }
    let s = d.co_cdf_table();
    let mut sup = R::zero();
    for (t, &v) in s.iter().enumerate() {
        let t = R::of_u64(t as u64);
        let left = (v - (-t / mean).exp()).abs();
        let right = (v - (-(t + R::one()) / mean).exp()).abs();
        sup = sup.max(left).max(right);
    }
    Ok(sup)
}

/// Generates `count` random NBU distributions (each individually verified),
/// combines them under maxima, and checks that every combination is still
/// NBU. Returns the aggregate report with the worst margin seen.
pub fn closure_under_max_test<R: Real>(count: usize, seed: u64) -> Result<CheckReport<R>> {
    if count < 1 {
        return Err(Error::invalid("count", count as f64, "need at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Pmf<R>> = (0..count).map(|_| random_nbu_pmf(&mut rng)).collect();

    let mut worst = R::neg_infinity();
    let mut witness = vec![0u64, 0u64];
    let mut tolerance = R::zero();
    let mut all_passed = true;
    for i in 0..count {
        let a = &pool[i];
        let b = &pool[(i + 1) % count.max(2) % count];
        let combined = if i % 5 == 4 && count >= 3 {
            let c = &pool[(i + 2) % count];
            Pmf::max_of(&[a.clone(), b.clone(), c.clone()])?
        } else {
            Pmf::max_of(&[a.clone(), b.clone()])?
        };
        let tol = check_tolerance(&combined);
        let report = check_nbu(&combined, tol)?;
        all_passed &= report.passed;
        if report.worst_violation > worst {
            worst = report.worst_violation;
            witness = report.witness;
            tolerance = report.tolerance_used;
        }
    }
    Ok(CheckReport {
        property: CheckProperty::Nbu,
        passed: all_passed,
        worst_violation: worst,
        witness,
        tolerance_used: tolerance,
    })
}

/// Draws one verified-NBU distribution: geometrics, point masses, shifted
/// geometrics, and maxima of geometrics. Candidates are re-drawn until the
/// NBU check confirms them, so mixtures that lose the property can never
/// leak into the pool.
fn random_nbu_pmf<R: Real>(rng: &mut ChaCha8Rng) -> Pmf<R> {
    const H: u64 = 192;
    loop {
        let candidate: Pmf<R> = match rng.gen_range(0..4u8) {
            0 => Pmf::geometric(R::of_f64(rng.gen_range(0.25..0.95)), H).unwrap(),
            1 => Pmf::point(rng.gen_range(0..10u64), H).unwrap(),
            2 => {
                let shift = Pmf::point(rng.gen_range(1..6u64), H).unwrap();
                let geo = Pmf::geometric(R::of_f64(rng.gen_range(0.3..0.9)), H).unwrap();
                shift.convolve(&geo)
            }
            _ => {
                let a = Pmf::geometric(R::of_f64(rng.gen_range(0.3..0.9)), H).unwrap();
                let b = Pmf::geometric(R::of_f64(rng.gen_range(0.3..0.9)), H).unwrap();
                Pmf::max_of(&[a, b]).unwrap()
            }
        };
        if let Ok(report) = check_nbu(&candidate, check_tolerance(&candidate)) {
            if report.passed {
                return candidate;
            }
        }
    }
}
