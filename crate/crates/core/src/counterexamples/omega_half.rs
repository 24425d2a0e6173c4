use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Index, LogReal};
use crate::seq::Seq;
use crate::step::{stage_condition_search, StepSeq, MAX_INDEX_DIGITS};

/// Beyond this many stages the lower bound `e^{2 m_k}` passes the index guard.
pub const OMEGA_HALF_MAX_STAGES: usize = 4;

/// `ξ = 1` on `(0, m_2]` and `ξ = 1/m_k` on `(m_k, m_{k+1}]` for `k >= 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaHalfParams {
    /// `m_1 = 0, m_2, ..., m_K`.
    pub m: Vec<Index>,
    pub xi: StepSeq<LogReal>,
}

impl OmegaHalfParams {
    pub fn stage_count(&self) -> usize {
        self.m.len()
    }

    /// `m_k`, 1-based.
    pub fn m(&self, k: usize) -> &Index {
        &self.m[k - 1]
    }

    pub fn xi_seq(&self) -> Seq {
        Seq::step(self.xi.clone())
    }

    /// `j_k = ⌊m_k² / m_{k-1}⌋`, for `k >= 3`.
    pub fn witness_index(&self, k: usize) -> Option<Index> {
        if k < 3 || k > self.m.len() {
            return None;
        }
        Some(self.m(k).mul(self.m(k)).div_floor(self.m(k - 1)))
    }

    /// `(m_k/4 · (1 + √(1 - 4/m_{k-1})))²`, where `ω^{1/2}` comes closest to
    /// `ξ_{a²}` on stage `k`; needs `m_{k-1} >= 4`.
    pub fn analytic_minimizer(&self, k: usize) -> Option<Index> {
        if k < 2 || k > self.m.len() {
            return None;
        }
        let prev = self.m(k - 1).to_f64();
        if prev < 4.0 {
            return None;
        }
        let ln = 2.0 * (self.m(k).ln() - 4f64.ln() + (1.0 + (1.0 - 4.0 / prev).sqrt()).ln());
        Some(Index::floor_exp(ln))
    }

    /// Right end of the sampled region of stage `k`: `m_{k+1}`, or `4 j_K` (`m_K²` if undefined) for the last.
    pub fn stage_end(&self, k: usize) -> Index {
        match self.m.get(k) {
            Some(next) => next.clone(),
            None => self
                .witness_index(k)
                .map(|j| j.mul_u64(4))
                .unwrap_or_else(|| self.m(k).mul(self.m(k)).max(self.m(k).add_u64(16))),
        }
    }

    /// Samples in `(m_k, stage_end(k)]`: ends, a 16-point geometric grid, the
    /// analytic minimizer with its neighbours, and `j_k`.
    pub fn critical_samples(&self, k: usize) -> Vec<Index> {
        let start = self.m(k).add_u64(1);
        let end = self.stage_end(k);
        let mut out = super::geometric_samples(&start, &end, 16);
        if let Some(x) = self.analytic_minimizer(k) {
            out.extend([x.sub_u64(1).unwrap_or_default(), x.clone(), x.add_u64(1)]);
        }
        out.extend(self.witness_index(k));
        out.retain(|j| *j >= start && *j <= end);
        out.sort();
        out.dedup();
        out
    }
}

/// Build `m_1 = 0`, and `m_{k+1}` the least index above `e^{2 m_k}` with
/// `(ξ_{a²})_{m_{k+1}} <= (1 + 1/k)/m_k`.
pub fn build_omega_half(stages: usize) -> Result<OmegaHalfParams> {
    if stages < 2 {
        return Err(Error::Domain(format!("at least 2 stages are needed, got {stages}")));
    }
    let mut m = vec![Index::zero()];
    let mut xi = StepSeq::constant(LogReal::ONE)?;
    for k in 1..stages {
        let mk = &m[k - 1];
        let digits = 2.0 * mk.to_f64() / std::f64::consts::LN_10;
        if digits > MAX_INDEX_DIGITS {
            return Err(Error::Construction(format!(
                "stage {}: e^(2 m_{k}) has about {digits:.3e} digits, beyond the index guard",
                k + 1
            )));
        }
        let lower = Index::above_exp(2.0 * mk.to_f64()).max(mk.add_u64(1));
        let next = if k == 1 {
            // the bound (1 + 1/k)/m_1 is infinite
            lower
        } else {
            let bound = LogReal::from_ln((1.0 + 1.0 / k as f64).ln() - mk.ln());
            stage_condition_search(&xi, &lower.sub_u64(1).unwrap(), &bound)?
        };
        xi.push(next.clone(), LogReal::from_ln(-next.ln()))?;
        m.push(next);
    }
    Ok(OmegaHalfParams { m, xi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_stages() {
        let p = build_omega_half(4).unwrap();
        assert_eq!(p.m(1), &Index::zero());
        assert_eq!(p.m(2), &Index::new(2));
        assert_eq!(p.m(3), &Index::new(55));
        assert!(p.m(4) > &Index::floor_exp(110.0) && p.m(4).ln() < 111.0);
        assert_eq!(p.witness_index(3), Some(Index::new(1512)));
        assert!(p.analytic_minimizer(3).is_none());
        assert!(p.analytic_minimizer(4).is_some());
    }

    #[test]
    fn stage_sandwich() {
        let p = build_omega_half(4).unwrap();
        for k in 2..4 {
            let next = p.m(k + 1);
            let level = LogReal::from_ln(-p.m(k).ln());
            let a = p.xi.am_at(next).unwrap();
            let b = p.xi.am2_at(next).unwrap();
            assert!(level <= a && a <= b);
            assert!(b.ln() <= level.ln() + (1.0 + 1.0 / k as f64).ln() + 1e-12);
        }
    }

    #[test]
    fn guard_stops_fifth_stage() {
        assert!(matches!(build_omega_half(5), Err(Error::Construction(_))));
        assert!(build_omega_half(1).is_err());
    }

    #[test]
    fn witness_mean_is_about_two_over_m() {
        let p = build_omega_half(4).unwrap();
        for k in 3..=4 {
            let j = p.witness_index(k).unwrap();
            let scaled = p.xi.am_at(&j).unwrap().ln() + p.m(k).ln();
            assert!((1.5f64.ln()..=2.5f64.ln()).contains(&scaled), "k = {k}");
        }
    }

    #[test]
    fn roundtrip() {
        let p = build_omega_half(4).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: OmegaHalfParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
