//! Cross-checks between the exponential Δ₂ profile, the growth of `r(s_a)`
//! against `log n`, and regularity of a sequence versus its mean.

use crate::error::Result;
use crate::numerics::{Index, LogReal, NumericMode};
use crate::regularity::{exp_delta2_profile, regularity_profile, RegularityProfile, Trend};
use crate::seq::{prefix_means, Seq};
use crate::verify::report::{CheckReport, Property, Status};

/// `max/min` of `r(s_a)_n / log n` over the band window must stay below this.
pub const LOG_BAND: f64 = 1.732_050_807_568_877_2;
/// Decade ratio `Δ₂(1000)/Δ₂(100)` at or above which the profile counts as growing.
pub const DELTA2_GROWTH: f64 = 1.5;
/// Decade ratio at or below which the profile counts as bounded.
pub const DELTA2_FLAT: f64 = 1.1;

const DELTA2_POINTS: [u64; 3] = [31, 100, 1000];
const BAND_START: u64 = 100;
const BAND_END: u64 = 1_000_000;

fn verdict(name: &str, status: Status, note: String) -> Property {
    Property { name: name.into(), status, worst_margin: None, witness: None, sample_count: 1, k0: None, note: Some(note) }
}

/// Bounded exponential Δ₂ profile must coincide with `r(s_a)_n / log n` staying
/// in the band `[c, √3·c]` for `10² <= n <= min(horizon, 10⁶)`, and a growing
/// profile with the band failing. For `trend_only` subjects a disagreement is
/// reported as inconclusive.
pub fn check_delta2_coherence(s: &Seq, subject: &str, horizon: u64, trend_only: bool) -> Result<CheckReport> {
    let end = horizon.clamp(BAND_START, BAND_END);
    let mut report = CheckReport::new("delta2-coherence", subject, Index::new(end), NumericMode::Log);
    let profile = exp_delta2_profile(s, DELTA2_POINTS[2])?;
    let v: Vec<f64> = DELTA2_POINTS.iter().map(|&m| profile.at(m)).collect();
    for (m, x) in DELTA2_POINTS.iter().zip(&v) {
        report.measure(&format!("delta2-{m}"), *x);
    }
    report.measure("delta2-sup", profile.sup);
    let decade = v[2] / v[1];
    report.measure("delta2-decade-ratio", decade);
    let grows = v[0] < v[1] && v[1] < v[2] && decade >= DELTA2_GROWTH;
    let flat = decade <= DELTA2_FLAT;

    let values: Vec<LogReal> = s.dense(end as usize)?;
    let a = prefix_means(&values);
    let a2 = prefix_means(&a);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in BAND_START..=end {
        let i = n as usize - 1;
        let q = a2[i].div(a[i]).value() / (n as f64).ln();
        lo = lo.min(q);
        hi = hi.max(q);
    }
    let spread = hi / lo;
    report.measure("band-lo", lo);
    report.measure("band-hi", hi);
    report.measure("band-spread", spread);
    let in_band = spread <= LOG_BAND;

    let (status, note) = match (flat, grows, in_band) {
        (true, _, true) => (Status::Pass, "bounded profile, log band holds"),
        (_, true, false) => (Status::Pass, "growing profile, log band fails"),
        (false, false, _) => (Status::Inconclusive, "profile neither flat nor clearly growing"),
        (true, _, false) => (Status::Fail, "bounded profile but log band fails"),
        (_, true, true) => (Status::Fail, "growing profile but log band holds"),
    };
    let status = if trend_only && status == Status::Fail { Status::Inconclusive } else { status };
    report.properties.push(verdict("agreement", status, note.into()));
    if trend_only {
        report.notes.push("trend-only subject: disagreement is not conclusive at this horizon".into());
    }
    Ok(report.finish())
}

/// Regularity of `s` must agree with regularity of `s_a` at the same horizon.
/// A sequence counts as regular when a Potter exponent below one fits, and as
/// irregular when the running sup of its ratio of regularity is unbounded.
pub fn check_regular_iff_am_regular(s: &Seq, subject: &str, horizon: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("regular-iff-am-regular", subject, Index::new(horizon), NumericMode::Log);
    let base = regularity_profile(s, horizon)?;
    let mean = regularity_profile(&s.am(), horizon)?;
    report.measure("sup-r", base.sup_r);
    report.measure("sup-r-am", mean.sup_r);
    if let Some(p) = base.potter_p {
        report.measure("potter-p", p);
    }
    if let Some(p) = mean.potter_p {
        report.measure("potter-p-am", p);
    }
    let class = |p: &RegularityProfile| match (p.potter_p, p.trend) {
        (_, Trend::Unbounded) => Some(false),
        (Some(_), _) => Some(true),
        _ => None,
    };
    let (status, note) = match (class(&base), class(&mean)) {
        (Some(a), Some(b)) if a == b => (Status::Pass, format!("both {}", if a { "regular" } else { "irregular" })),
        (Some(a), Some(_)) => (Status::Fail, format!("sequence regular: {a}, mean regular: {}", !a)),
        _ => (Status::Inconclusive, format!("trends {:?} / {:?}", base.trend, mean.trend)),
    };
    report.properties.push(verdict("agreement", status, note));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_coherent() {
        let r = check_delta2_coherence(&Seq::omega(), "omega", 100_000, false).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(r.measurements["delta2-sup"] < 2.0);
        let r = check_regular_iff_am_regular(&Seq::omega(), "omega", 100_000).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }

    #[test]
    fn root_is_coherent() {
        let s = Seq::power(0.5).unwrap();
        let r = check_delta2_coherence(&s, "omega-1/2", 100_000, false).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(r.measurements["band-spread"] > LOG_BAND);
        let r = check_regular_iff_am_regular(&s, "omega-1/2", 100_000).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }
}
