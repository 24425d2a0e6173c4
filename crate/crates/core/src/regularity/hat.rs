use crate::error::{Error, Result};
use crate::numerics::{Index, LogReal};
use crate::seq::Seq;

/// Relative slack allowed when comparing a prefix sum with its target, so
/// exact ties survive log-domain rounding.
const TIE_SLACK: f64 = 1e-13;

/// Searches give up beyond indices of this many bits.
const MAX_SEARCH_BITS: usize = 4096;

fn reaches(s: &Seq, k: &Index, target: LogReal) -> Result<bool> {
    Ok(s.prefix_sum(k)?.ln() >= target.ln() - TIE_SLACK)
}

/// `ν(s)_n = min{k : Σ_{i≤k} s_i >= n s_1}`.
pub fn nu(s: &Seq, n: &Index) -> Result<Index> {
    nu_from(s, n, &Index::one())
}

/// Like [`nu`], starting the search at `start`, which must not exceed the answer
/// (for instance `ν_m` for some `m <= n`).
pub fn nu_from(s: &Seq, n: &Index, start: &Index) -> Result<Index> {
    if n.is_zero() {
        return Err(Error::Domain("ν is defined for n >= 1".into()));
    }
    let target = s.eval_u64(1)?.mul(LogReal::from_ln(n.ln()));
    let start = start.clone().max(Index::one());
    if reaches(s, &start, target)? {
        return Ok(start);
    }
    let mut lo = start.clone();
    let mut step = Index::one();
    let mut hi = start.add(&step);
    while !reaches(s, &hi, target)? {
        if hi.bits() > MAX_SEARCH_BITS {
            return Err(Error::Summable(format!(
                "partial sums of {} stay below {n}·s_1 up to 2^{MAX_SEARCH_BITS}",
                s.label()
            )));
        }
        lo = hi;
        step = step.mul_u64(2);
        hi = start.add(&step);
    }
    while hi.checked_sub(&lo).unwrap() > Index::one() {
        let mid = Index::midpoint(&lo, &hi);
        if reaches(s, &mid, target)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `ŝ_n = (s_a)_{ν(s)_n}`, defined for non-summable `s`.
#[derive(Clone, Debug)]
pub struct HatSeq {
    base: Seq,
}

pub fn hat(s: &Seq) -> Result<HatSeq> {
    if s.is_summable() == Some(true) {
        return Err(Error::Summable(format!(
            "{} is summable; its hat sequence is undefined",
            s.label()
        )));
    }
    Ok(HatSeq { base: s.clone() })
}

impl HatSeq {
    pub fn base(&self) -> &Seq {
        &self.base
    }

    pub fn nu(&self, n: &Index) -> Result<Index> {
        nu(&self.base, n)
    }

    pub fn eval(&self, n: &Index) -> Result<LogReal> {
        self.base.mean_at(&self.nu(n)?)
    }

    /// `(n, ν_n, ŝ_n)` for `n = 1..=horizon`, reusing each `ν_n` as the start of the next search.
    pub fn dense(&self, horizon: u64) -> Result<Vec<(u64, Index, LogReal)>> {
        let mut out = Vec::with_capacity(horizon as usize);
        let mut start = Index::one();
        for n in 1..=horizon {
            let k = nu_from(&self.base, &Index::new(n), &start)?;
            out.push((n, k.clone(), self.base.mean_at(&k)?));
            start = k;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_examples() {
        let w = Seq::omega();
        assert_eq!(nu(&w, &Index::new(1)).unwrap(), Index::new(1));
        assert_eq!(nu(&w, &Index::new(2)).unwrap(), Index::new(4));
        let half = Seq::power(0.5).unwrap();
        for n in [100u64, 1000] {
            let k = nu(&half, &Index::new(n)).unwrap().to_f64();
            let approx = (n * n) as f64 / 4.0;
            assert!((k / approx - 1.0).abs() < 0.05, "n = {n}: {k}");
        }
        let ones = Seq::table(vec![LogReal::ONE; 100], crate::seq::Tail::Undefined).unwrap();
        assert_eq!(nu(&ones, &Index::new(37)).unwrap(), Index::new(37));
    }

    #[test]
    fn nu_is_minimal() {
        let s = Seq::log_power(1.0, 0.0).unwrap();
        let mut start = Index::one();
        for n in 1..150u64 {
            let k = nu_from(&s, &Index::new(n), &start).unwrap();
            let target = s.eval_u64(1).unwrap().mul(LogReal::from_u64(n));
            assert!(s.prefix_sum(&k).unwrap() >= target);
            if k > Index::one() {
                assert!(s.prefix_sum(&k.sub_u64(1).unwrap()).unwrap() < target);
            }
            start = k;
        }
    }

    #[test]
    fn hat_examples() {
        let half = hat(&Seq::power(0.5).unwrap()).unwrap();
        assert_eq!(half.eval(&Index::one()).unwrap(), LogReal::ONE);
        for (n, _, v) in half.dense(1000).unwrap().into_iter().skip(9) {
            let scaled = v.value() * n as f64;
            assert!((1.0..=8.0).contains(&scaled), "n = {n}: {scaled}");
        }
        assert!(matches!(hat(&Seq::power(2.0).unwrap()), Err(Error::Summable(_))));
        assert!(matches!(hat(&Seq::unit()), Err(Error::Summable(_))));
        assert!(matches!(nu(&Seq::power(2.0).unwrap(), &Index::new(2)), Err(Error::Summable(_))));
    }
}
