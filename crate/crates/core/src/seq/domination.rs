use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Index, LogReal};
use crate::seq::Seq;

/// Which domination statement a profile is evidence for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominationKind {
    /// `x_n <= y_n` for every tested `n`: the profile's sup must stay `<= 1`.
    Pointwise,
    /// `x = O(y)`: the running sup of `x_n / y_n` is reported for the caller to judge.
    Profile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationProfile {
    pub kind: DominationKind,
    /// True when indices were sampled rather than enumerated densely.
    pub sampled: bool,
    /// `(checkpoint, sup_{n ≤ checkpoint} x_n / y_n)`.
    pub points: Vec<(Index, f64)>,
    /// Index where the overall sup was attained.
    pub argmax: Index,
}

impl DominationProfile {
    pub fn sup(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }
}

fn ratio(x: LogReal, y: LogReal, n: &Index) -> Result<f64> {
    if y.is_zero() {
        if x.is_zero() {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!("dominating sequence vanishes at {n}")));
    }
    Ok(x.div(y).value())
}

/// Indices `1..=limit` when dense enumeration is possible, otherwise all of
/// `1..=1000` followed by a geometric grid of ratio `1.01` plus the checkpoints.
fn sample_indices(limit: &Index, checkpoints: &[Index], dense: bool) -> Vec<Index> {
    if dense {
        return (1..=limit.to_u64().unwrap()).map(Index::new).collect();
    }
    let mut out: Vec<Index> = (1..=1000u64.min(limit.to_u64().unwrap_or(u64::MAX))).map(Index::new).collect();
    let mut ln = 1000f64.ln();
    let top = limit.ln();
    while ln < top {
        ln += 0.01f64.ln_1p();
        let j = Index::floor_exp(ln);
        if j <= *limit {
            out.push(j);
        }
    }
    out.extend(checkpoints.iter().cloned());
    out.sort();
    out.dedup();
    out
}

fn running_sup(x: &Seq, y: &Seq, checkpoints: &[Index], kind: DominationKind) -> Result<DominationProfile> {
    let mut cps = checkpoints.to_vec();
    cps.sort();
    let Some(limit) = cps.last().cloned() else {
        return Ok(DominationProfile { kind, sampled: false, points: Vec::new(), argmax: Index::one() });
    };
    let dense_ok = limit
        .to_u64()
        .is_some_and(|l| l <= x.dense_limit().min(y.dense_limit()));
    let mut sampled = !dense_ok;
    let (xs, ys) = if dense_ok {
        let k = limit.to_usize().unwrap();
        match (x.dense_log(k), y.dense_log(k)) {
            (Ok(a), Ok(b)) => (Some(a), Some(b)),
            _ => {
                sampled = true;
                (None, None)
            }
        }
    } else {
        (None, None)
    };
    let indices = sample_indices(&limit, &cps, !sampled);
    let mut points = Vec::with_capacity(cps.len());
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = Index::one();
    let mut next = 0;
    for (i, n) in indices.iter().enumerate() {
        let (xv, yv) = match (&xs, &ys) {
            (Some(a), Some(b)) => (a[i], b[i]),
            _ => (x.eval(n)?, y.eval(n)?),
        };
        let r = ratio(xv, yv, n)?;
        if r > sup {
            sup = r;
            argmax = n.clone();
        }
        while next < cps.len() && cps[next] == *n {
            points.push((n.clone(), sup));
            next += 1;
        }
    }
    Ok(DominationProfile { kind, sampled, points, argmax })
}

/// `sup_{n ≤ c} x_n / y_n` at each checkpoint `c`. Dense when both sequences
/// can be enumerated to the last checkpoint, sampled otherwise.
pub fn domination_profile(x: &Seq, y: &Seq, checkpoints: &[Index]) -> Result<DominationProfile> {
    running_sup(x, y, checkpoints, DominationKind::Profile)
}

/// Evidence for `x_n <= y_n` for `n <= horizon`: a profile whose final sup is at most 1 when it holds.
pub fn pointwise_domination(x: &Seq, y: &Seq, horizon: &Index) -> Result<DominationProfile> {
    running_sup(x, y, std::slice::from_ref(horizon), DominationKind::Pointwise)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(n: u64) -> Index {
        Index::new(n)
    }

    #[test]
    fn self_domination_is_flat() {
        let s = Seq::power(0.5).unwrap();
        let p = domination_profile(&s, &s, &[ix(10), ix(100)]).unwrap();
        assert!(p.points.iter().all(|(_, v)| *v == 1.0));
        assert!(!p.sampled);
    }

    #[test]
    fn power_profiles() {
        let w = Seq::omega();
        let h = Seq::power(0.5).unwrap();
        let p = domination_profile(&w, &h, &[ix(10), ix(100), ix(10_000)]).unwrap();
        assert!(p.points.iter().all(|(_, v)| (*v - 1.0).abs() < 1e-15));
        assert_eq!(p.argmax, ix(1));
        let p = domination_profile(&h, &w, &[ix(100), ix(10_000), ix(1_000_000)]).unwrap();
        let want = [10.0, 100.0, 1000.0];
        for ((_, got), want) in p.points.iter().zip(want) {
            assert!((got / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_profile_beyond_dense_horizon() {
        let w = Seq::omega();
        let h = Seq::power(0.5).unwrap();
        let big: Index = "1e20".parse().unwrap();
        let p = domination_profile(&h, &w, std::slice::from_ref(&big)).unwrap();
        assert!(p.sampled);
        assert!((p.sup() / 1e10 - 1.0).abs() < 1e-9);
        assert_eq!(p.argmax, big);
    }

    #[test]
    fn pointwise_labels() {
        let w = Seq::omega();
        let p = pointwise_domination(&w.am(), &w.am_pow(2), &ix(1000)).unwrap();
        assert_eq!(p.kind, DominationKind::Pointwise);
        assert!(p.sup() <= 1.0);
    }
}
