use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Index, LogReal};
use crate::seq::Seq;
use crate::step::{stage_condition_search, StepSeq};

/// One stage of the construction: `ξ` and `η` both equal `δ_k` at `m_k`,
/// `η = k δ_{k+1}` on `(m_k, n_k]`, and both equal `δ_{k+1}` past `n_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example6Stage {
    pub k: u64,
    pub m: Index,
    pub n: Index,
    /// `n_k = ⌊e^{k²} m_k⌋` had a fractional part within `1e-9` of an integer.
    pub n_ambiguous: bool,
    pub ln_delta: f64,
}

impl Example6Stage {
    pub fn delta(&self) -> LogReal {
        LogReal::from_ln(self.ln_delta)
    }

    /// `δ_{k+1} = e^{-k²} δ_k`.
    pub fn next_delta(&self) -> LogReal {
        LogReal::from_ln(self.ln_delta - (self.k * self.k) as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example6Params {
    pub stages: Vec<Example6Stage>,
    pub xi: StepSeq<LogReal>,
    pub eta: StepSeq<LogReal>,
}

impl Example6Params {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Stage `k`, 1-based.
    pub fn stage(&self, k: usize) -> &Example6Stage {
        &self.stages[k - 1]
    }

    pub fn xi_seq(&self) -> Seq {
        Seq::step(self.xi.clone())
    }

    pub fn eta_seq(&self) -> Seq {
        Seq::step(self.eta.clone())
    }

    /// Right end of the sampled region after `n_k`: `m_{k+1}`, or `48 k n_k` for the last stage.
    pub fn stage_end(&self, k: usize) -> Index {
        match self.stages.get(k) {
            Some(next) => next.m.clone(),
            None => self.stage(k).n.mul_u64(48 * k as u64),
        }
    }

    /// Samples in `(m_k, stage_end(k)]`: both interval ends, 16-point
    /// geometric grids on `(m_k, n_k]` and `(n_k, m_{k+1}]`, the index after
    /// `m_k`, and the indices around `3k n_k`.
    pub fn critical_samples(&self, k: usize) -> Vec<Index> {
        let st = self.stage(k);
        let start = st.m.add_u64(1);
        let end = self.stage_end(k);
        let mut out = Vec::new();
        if start <= st.n {
            out.extend(super::geometric_samples(&start, &st.n, 16));
        }
        let after = st.n.add_u64(1);
        if after <= end {
            out.extend(super::geometric_samples(&after, &end, 16));
        }
        let pivot = st.n.mul_u64(3 * k as u64);
        for j in [pivot.sub_u64(1).unwrap(), pivot.clone(), pivot.add_u64(1)] {
            if j > st.m && j <= end {
                out.push(j);
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Build `K >= 2` stages with `m_1 = 1`, `δ_1 = 1`, `ln δ_{k+1} = ln δ_k - k²`,
/// `n_k = ⌊e^{k²} m_k⌋`, and `m_{k+1}` the least index past `n_k` with
/// `(η_{a²})_{m_{k+1}} <= (1 + 1/(k+1)) δ_{k+1}`.
pub fn build_example6(stages: usize) -> Result<Example6Params> {
    if stages < 2 {
        return Err(Error::Domain(format!("at least 2 stages are needed, got {stages}")));
    }
    let m1 = Index::one();
    let (n1, amb1) = m1.floor_mul_exp(1.0);
    let first = Example6Stage { k: 1, m: m1.clone(), n: n1, n_ambiguous: amb1, ln_delta: 0.0 };
    let d2 = first.next_delta();
    let mut xi = StepSeq::constant(LogReal::ONE)?;
    xi.push(m1.clone(), d2)?;
    // at k = 1 the two levels of η on (m_1, m_2] coincide
    let mut eta = xi.clone();
    let mut out = vec![first];

    for k in 2..=stages as u64 {
        let prev = out.last().unwrap();
        let delta = prev.next_delta();
        let bound = delta.mul(LogReal::new(1.0 + 1.0 / k as f64));
        let m = stage_condition_search(&eta, &prev.n, &bound)?;
        let (n, n_ambiguous) = m.floor_mul_exp((k * k) as f64);
        let stage = Example6Stage { k, m: m.clone(), n: n.clone(), n_ambiguous, ln_delta: delta.ln() };
        let next = stage.next_delta();
        xi.push(m.clone(), next)?;
        eta.push(m, next.mul(LogReal::from_u64(k)))?;
        eta.push(n, next)?;
        out.push(stage);
    }
    Ok(Example6Params { stages: out, xi, eta })
}
