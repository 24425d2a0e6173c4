use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::Index;
use crate::regularity::trend::{classify_trend, trend_checkpoints, Trend};
use crate::seq::Seq;

/// Grid spacing for the Potter exponent.
pub const POTTER_GRID_STEP: f64 = 0.01;
const POTTER_M_RATIO: f64 = 1.25;
const POTTER_N_RATIO: f64 = 1.01;

/// The exponential Δ₂ quotients `S_{m²}/S_m = m²(s_a)_{m²} / (m (s_a)_m)` for `m = 1..=M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta2Profile {
    pub values: Vec<f64>,
    pub sup: f64,
    pub argmax: u64,
    /// Values at the trend checkpoints `M^{1/3}, M^{2/3}, M`.
    pub samples: Vec<(Index, f64)>,
    pub trend: Trend,
}

impl Delta2Profile {
    /// The quotient at `m`, 1-based.
    pub fn at(&self, m: u64) -> f64 {
        self.values[m as usize - 1]
    }
}

pub fn exp_delta2_profile(s: &Seq, max_m: u64) -> Result<Delta2Profile> {
    let mut values = Vec::with_capacity(max_m as usize);
    let (mut sup, mut argmax) = (f64::NEG_INFINITY, 1);
    for m in 1..=max_m {
        let small = s.prefix_sum(&Index::new(m))?;
        let big = s.prefix_sum(&Index::new(m).mul(&Index::new(m)))?;
        let q = big.div(small).value();
        if q > sup {
            sup = q;
            argmax = m;
        }
        values.push(q);
    }
    let samples: Vec<(Index, f64)> = if max_m >= 8 {
        trend_checkpoints(&Index::new(max_m))
            .into_iter()
            .map(|c| {
                let v = values[c.to_usize().unwrap() - 1];
                (c, v)
            })
            .collect()
    } else {
        Vec::new()
    };
    let trend = classify_trend(&samples);
    Ok(Delta2Profile { values, sup, argmax, samples, trend })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityProfile {
    pub horizon: Index,
    pub sup_r: f64,
    pub argmax: Index,
    /// Trend of the running sup of `r` across the checkpoints.
    pub trend: Trend,
    /// Largest sampled `ln(s_m/s_n)/ln(n/m)`.
    pub potter_needed: f64,
    /// Smallest grid exponent `p < 1` with `s_n >= (m/n)^p s_m` at every sampled
    /// pair; `None` when no such `p` exists or the running sup of `r` is
    /// classified as unbounded.
    pub potter_p: Option<f64>,
}

/// Sup of the ratio of regularity up to `horizon` and the Potter exponent on
/// sampled pairs (`m` on a `1.25`-geometric grid, `n` on a `1.01`-geometric grid).
pub fn regularity_profile(s: &Seq, horizon: u64) -> Result<RegularityProfile> {
    let n = horizon as usize;
    let r = s.ratio_of_regularity::<crate::numerics::LogReal>(n)?.to_f64();
    let values = s.dense_log(n)?;
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = 1;
    let mut running = Vec::with_capacity(n);
    for (i, &x) in r.iter().enumerate() {
        if x > sup {
            sup = x;
            argmax = i + 1;
        }
        running.push(sup);
    }
    let trend = if horizon >= 27 {
        let pts: Vec<(Index, f64)> = trend_checkpoints(&Index::new(horizon))
            .into_iter()
            .map(|c| {
                let v = running[c.to_usize().unwrap() - 1];
                (c, v)
            })
            .collect();
        classify_trend(&pts)
    } else {
        Trend::Inconclusive
    };

    let mut needed = 0.0f64;
    for m in geometric_grid(1, horizon, POTTER_M_RATIO) {
        let sm = values[m as usize - 1];
        for k in geometric_grid(m + 1, horizon, POTTER_N_RATIO) {
            let sn = values[k as usize - 1];
            let p = sm.div(sn).ln() / (k as f64 / m as f64).ln();
            needed = needed.max(p);
        }
    }
    let steps = ((needed - 1e-9) / POTTER_GRID_STEP).ceil().max(1.0);
    let p = steps * POTTER_GRID_STEP;
    let potter_p = (p < 1.0 - 1e-12 && trend != Trend::Unbounded)
        .then(|| (steps.round() * POTTER_GRID_STEP * 100.0).round() / 100.0);
    Ok(RegularityProfile {
        horizon: Index::new(horizon),
        sup_r: sup,
        argmax: Index::new(argmax as u64),
        trend,
        potter_needed: needed,
        potter_p,
    })
}

/// `start, ⌈start·ratio⌉, ...` up to and including `end`.
pub fn geometric_grid(start: u64, end: u64, ratio: f64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = start;
    while x <= end {
        out.push(x);
        x = ((x as f64 * ratio).ceil() as u64).max(x + 1);
    }
    if out.last() != Some(&end) && start <= end {
        out.push(end);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta2_of_omega_tends_to_two_from_below() {
        let p = exp_delta2_profile(&Seq::omega(), 1000).unwrap();
        assert!(p.sup < 2.0);
        assert!((p.at(1000) - 2.0).abs() < 0.1);
        let h = crate::numerics::harmonic;
        let want = h(&Index::new(100)).unwrap() / h(&Index::new(10)).unwrap();
        assert!((p.at(10) - want).abs() < 1e-13);
    }

    #[test]
    fn delta2_of_root_grows() {
        let p = exp_delta2_profile(&Seq::power(0.5).unwrap(), 1000).unwrap();
        assert_eq!(p.argmax, 1000);
        assert_eq!(p.trend, Trend::Unbounded);
        assert!((p.at(1000) / 1000f64.sqrt() - 1.0).abs() < 0.05);
    }

    #[test]
    fn delta2_of_summable_tends_to_one() {
        let p = exp_delta2_profile(&Seq::power(2.0).unwrap(), 1000).unwrap();
        assert!(p.sup < 1.7);
        assert!((p.at(1000) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn regularity_of_root() {
        let p = regularity_profile(&Seq::power(0.5).unwrap(), 1_000_000).unwrap();
        assert!(p.sup_r <= 2.01);
        assert_eq!(p.potter_p, Some(0.5));
        assert_eq!(p.trend, Trend::Bounded);
    }

    #[test]
    fn irregular_sequences() {
        let p = regularity_profile(&Seq::omega(), 100_000).unwrap();
        assert_eq!(p.potter_p, None);
        assert_eq!(p.trend, Trend::Unbounded);
        let h = crate::numerics::harmonic(&Index::new(100_000)).unwrap();
        assert!((p.sup_r - h).abs() < 1e-9);
        let p = regularity_profile(&Seq::log_power(1.0, 0.0).unwrap(), 100_000).unwrap();
        assert_eq!(p.potter_p, None);
        assert_eq!(p.trend, Trend::Unbounded);
    }

    #[test]
    fn grid() {
        assert_eq!(geometric_grid(1, 5, 1.25), vec![1, 2, 3, 4, 5]);
        assert_eq!(*geometric_grid(1, 1000, 1.25).last().unwrap(), 1000);
    }
}
