//! Inversion calculus for ratios of regularity and concavity ratios:
//! reconstruction, admissibility, `r ↔ c` conversion, recovery of a sequence
//! from its arithmetic mean, and the growth profiles built on them.

mod hat;
mod profiles;
pub mod trend;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Index, NumericMode, Scalar};
use crate::seq::{ConcavitySeq, RatioSeq, Seq, Tail};

pub use hat::{hat, nu, nu_from, HatSeq};
pub use profiles::{
    exp_delta2_profile, geometric_grid, regularity_profile, Delta2Profile, RegularityProfile, POTTER_GRID_STEP,
};
pub use trend::{classify_trend, trend_checkpoints, Trend};

/// A running sup of `r` at or above this value counts as divergence evidence.
pub const SUP_R_GATE: f64 = 1e3;
/// A partial sum of `Σ (1/j)(1 - 1/r_j)` at or above this value counts as divergence evidence.
pub const SERIES_GATE: f64 = 1e2;
/// Log-mode relative tolerance for the inequality tests of this module.
pub const TOL: f64 = 1e-12;

fn tol<T: Scalar>() -> f64 {
    match T::MODE {
        NumericMode::Rational => 0.0,
        NumericMode::Log => TOL,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceEvidence {
    SupRUnbounded,
    SeriesDivergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict {
    pub recurrence_ok: bool,
    pub starts_at_one: bool,
    /// First `n` with `(n+1) r_{n+1} < n r_n + 1`.
    pub first_violation: Option<u64>,
    pub divergence_evidence: DivergenceEvidence,
    pub horizon: Index,
    pub sup_r: f64,
    /// `Σ_{j=2}^{horizon} (1/j)(1 - 1/r_j)`.
    pub series: f64,
}

/// Test `r_1 = 1`, the recurrence inequality, and collect evidence for the
/// divergence condition that makes the reconstructed sequence null.
pub fn check_ratio_admissibility<T: Scalar>(r: &RatioSeq<T>, horizon: usize) -> AdmissibilityVerdict {
    let n = horizon.min(r.len());
    let prefix = RatioSeq::new(r.values()[..n].to_vec());
    let first_violation = prefix.recurrence_violation(TOL).map(|(k, _)| k as u64);
    let starts_at_one = n == 0 || T::rel_diff(r.get(1), &T::one()) <= tol::<T>();
    let rf = prefix.to_f64();

    let mut sup = f64::NEG_INFINITY;
    let mut series = 0.0;
    let mut running_sup = Vec::with_capacity(n);
    let mut running_series = Vec::with_capacity(n);
    for (i, &x) in rf.iter().enumerate() {
        sup = sup.max(x);
        if i > 0 {
            series += (1.0 - 1.0 / x) / (i + 1) as f64;
        }
        running_sup.push(sup);
        running_series.push(series);
    }
    let trend_of = |vals: &[f64]| {
        if n < 27 {
            return Trend::Inconclusive;
        }
        let pts: Vec<(Index, f64)> = trend_checkpoints(&Index::new(n as u64))
            .into_iter()
            .map(|c| {
                let k = c.to_usize().unwrap();
                (c, vals[k - 1])
            })
            .collect();
        classify_trend(&pts)
    };
    let divergence_evidence = if sup >= SUP_R_GATE || trend_of(&running_sup) == Trend::Unbounded {
        DivergenceEvidence::SupRUnbounded
    } else if series >= SERIES_GATE || trend_of(&running_series) == Trend::Unbounded {
        DivergenceEvidence::SeriesDivergent
    } else {
        DivergenceEvidence::Inconclusive
    };
    AdmissibilityVerdict {
        recurrence_ok: first_violation.is_none(),
        starts_at_one,
        first_violation,
        divergence_evidence,
        horizon: Index::new(n as u64),
        sup_r: if n == 0 { 0.0 } else { sup },
        series,
    }
}

/// The sequence with `ξ_1 = 1` whose ratio of regularity is `r`:
/// `ξ_n = (1/(n r_n)) ∏_{j=2}^n (1 + 1/(j r_j - 1))`.
pub fn seq_from_ratio<T: Scalar>(r: &RatioSeq<T>) -> Result<Seq> {
    let values = reconstruct_from_ratio(r)?;
    let verdict = check_ratio_admissibility(r, r.len());
    let mut warnings = Vec::new();
    if verdict.divergence_evidence == DivergenceEvidence::Inconclusive {
        warnings.push(format!(
            "no divergence evidence for the ratio sequence up to n = {}; the reconstruction may not be null",
            r.len()
        ));
    }
    Ok(Seq::scalar_table(&values, Tail::Undefined)?.with_warnings(warnings))
}

/// Backend values of the reconstruction from a ratio of regularity.
pub fn reconstruct_from_ratio<T: Scalar>(r: &RatioSeq<T>) -> Result<Vec<T>> {
    if r.is_empty() {
        return Ok(Vec::new());
    }
    if T::rel_diff(r.get(1), &T::one()) > tol::<T>() {
        return Err(Error::NotRatioSequence { n: 1, detail: format!("r_1 = {:?}, expected 1", r.get(1)) });
    }
    if let Some((n, slack)) = r.recurrence_violation(TOL) {
        return Err(Error::NotRatioSequence {
            n: n as u64,
            detail: format!("(n+1) r_(n+1) < n r_n + 1 with relative slack {slack:e}"),
        });
    }
    let mut out = Vec::with_capacity(r.len());
    out.push(T::one());
    let mut product = T::one();
    for (i, rj) in r.values().iter().enumerate().skip(1) {
        let j = T::from_u64(i as u64 + 1);
        let x = j.mul(rj);
        product = product.mul(&x.div(&x.sub(&T::one())?));
        out.push(product.div(&x));
    }
    Ok(out)
}

/// The sequence with `ξ_1 = 1` and concavity ratio `c`: `ξ_n = 1/(n ∏_{j<n} c_j)`.
pub fn seq_from_concavity<T: Scalar>(c: &ConcavitySeq<T>) -> Result<Seq> {
    let values = reconstruct_from_concavity(c)?;
    let mut warnings = Vec::new();
    let n = values.len();
    if n >= 27 {
        // ln(1/ξ_n) = Σ_{j<n} (1/j + ln c_j) up to the H_n - ln n correction
        let pts: Vec<(Index, f64)> = trend_checkpoints(&Index::new(n as u64))
            .into_iter()
            .map(|k| {
                let v = -values[k.to_usize().unwrap() - 1].ln();
                (k, v)
            })
            .collect();
        if classify_trend(&pts) != Trend::Unbounded {
            warnings.push(format!(
                "Σ (1/j + log c_j) shows no divergence up to n = {n}; the reconstruction may not be null"
            ));
        }
    }
    Ok(Seq::scalar_table(&values, Tail::Undefined)?.with_warnings(warnings))
}

/// Backend values of the reconstruction from a concavity ratio; one entry longer than `c`.
pub fn reconstruct_from_concavity<T: Scalar>(c: &ConcavitySeq<T>) -> Result<Vec<T>> {
    if let Some(n) = c.lower_bound_violation(TOL) {
        return Err(Error::NotConcavitySequence { n: n as u64 });
    }
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(T::one());
    let mut product = T::one();
    for (i, cj) in c.values().iter().enumerate() {
        product = product.mul(cj);
        out.push(T::one().div(&T::from_u64(i as u64 + 2).mul(&product)));
    }
    Ok(out)
}

/// `c_n = (r_{n+1} - 1/(n+1)) / r_n`; one entry shorter than `r`.
pub fn ratio_to_concavity<T: Scalar>(r: &RatioSeq<T>) -> Result<ConcavitySeq<T>> {
    let values = r
        .values()
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let n = i as u64 + 1;
            Ok(w[1].sub(&T::from_ratio(1, n + 1))?.div(&w[0]))
        })
        .collect::<Result<_>>()?;
    Ok(ConcavitySeq::new(values))
}

/// `r_1 = 1`, `r_n = 1/n + Σ_{k<n} (1/k) ∏_{j=k}^{n-1} c_j`; one entry longer than `c`.
pub fn concavity_to_ratio<T: Scalar>(c: &ConcavitySeq<T>) -> RatioSeq<T> {
    // with P_n the sum, P_{n+1} = c_n (P_n + 1/n) = c_n r_n
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(T::one());
    for (i, cn) in c.values().iter().enumerate() {
        let next = cn.mul(&out[i]).add(&T::from_ratio(1, i as u64 + 2));
        out.push(next);
    }
    RatioSeq::new(out)
}

/// First `n` where `x` fails to be an arithmetic mean: `n x_n` decreasing at
/// `n`, or `2n x_n < (n+1) x_{n+1} + (n-1) x_{n-1}`.
pub fn am_image_violation<T: Scalar>(x: &[T]) -> Option<u64> {
    let t = tol::<T>();
    let nx: Vec<T> = x.iter().enumerate().map(|(i, v)| T::from_u64(i as u64 + 1).mul(v)).collect();
    for i in 0..nx.len().saturating_sub(1) {
        if T::slack(&nx[i], &nx[i + 1]) < -t {
            return Some(i as u64 + 1);
        }
        if i > 0 {
            let lhs = nx[i + 1].add(&nx[i - 1]);
            let rhs = nx[i].add(&nx[i]);
            if T::slack(&lhs, &rhs) < -t {
                return Some(i as u64 + 1);
            }
        }
    }
    None
}

/// Normalized slacks of `(r_n - 1/n)/r_{n-1} + r_n/(r_{n+1} - 1/(n+1)) <= 2` for `1 < n < len`.
pub fn am_image_ratio_slacks<T: Scalar>(r: &RatioSeq<T>) -> Result<Vec<f64>> {
    let two = T::from_u64(2);
    r.values()
        .windows(3)
        .enumerate()
        .map(|(i, w)| {
            let n = i as u64 + 2;
            let a = w[1].sub(&T::from_ratio(1, n))?.div(&w[0]);
            let b = w[1].div(&w[2].sub(&T::from_ratio(1, n + 1))?);
            Ok(T::slack(&a.add(&b), &two))
        })
        .collect()
}

/// First `n > 1` at which the ratio form of the am-image test fails.
pub fn am_image_violation_by_ratio<T: Scalar>(r: &RatioSeq<T>) -> Result<Option<u64>> {
    let t = tol::<T>();
    Ok(am_image_ratio_slacks(r)?
        .iter()
        .position(|s| *s < -t)
        .map(|i| i as u64 + 2))
}

/// `η` with `η_a = x`, from `η_n = n x_n - (n-1) x_{n-1}`, over `x_1, ..., x_horizon`.
pub fn invert_am<T: Scalar>(x: &Seq, horizon: usize) -> Result<Seq> {
    let values = invert_am_values(&x.dense::<T>(horizon)?)?;
    Ok(Seq::scalar_table(&values, Tail::Undefined)?.with_warnings(x.warnings().iter().cloned()))
}

pub fn invert_am_values<T: Scalar>(x: &[T]) -> Result<Vec<T>> {
    if let Some(n) = am_image_violation(x) {
        return Err(Error::NotAmImage { n });
    }
    let mut out = Vec::with_capacity(x.len());
    let mut prev = T::zero();
    for (i, v) in x.iter().enumerate() {
        let cur = T::from_u64(i as u64 + 1).mul(v);
        out.push(cur.sub_or_zero(&prev, TOL)?);
        prev = cur;
    }
    Ok(out)
}

/// `η_1 = 1`, `η_n = (1 - c_{n-1}) / ∏_{j<n} c_j`: the preimage under the mean
/// of the normalized sequence with concavity ratio `c`.
pub fn am_preimage_from_concavity<T: Scalar>(c: &ConcavitySeq<T>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(T::one());
    let mut product = T::one();
    for cj in c.values() {
        product = product.mul(cj);
        out.push(T::one().sub_or_zero(cj, TOL)?.div(&product));
    }
    Ok(out)
}
