use crate::error::{Error, Result};
use crate::numerics::{Index, NumericMode, Scalar};
use crate::seq::{prefix_means, Seq};

/// `s`, `s_a` and `s_{a²}` for one subject: a dense prefix in the chosen
/// backend, closed forms beyond it where the log backend has them.
pub struct Means<T> {
    seq: Seq,
    am: Seq,
    am2: Seq,
    values: Vec<T>,
    a: Vec<T>,
    a2: Vec<T>,
    /// Correctly rounded doubles of `values`, `a`, `a2` in rational mode, for
    /// comparisons whose outcome is clear without exact arithmetic.
    approx: [Vec<f64>; 3],
}

impl<T: Scalar> Means<T> {
    pub fn dense(seq: &Seq, n: usize) -> Result<Self> {
        let values: Vec<T> = seq.dense(n)?;
        let a = prefix_means(&values);
        let a2 = prefix_means(&a);
        let approx = if T::MODE == NumericMode::Rational {
            let f = |v: &[T]| v.iter().map(T::to_f64).collect();
            [f(&values), f(&a), f(&a2)]
        } else {
            Default::default()
        };
        Ok(Means { seq: seq.clone(), am: seq.am(), am2: seq.am_pow(2), values, a, a2, approx })
    }

    /// No dense prefix; every value comes from closed forms.
    pub fn pointwise(seq: &Seq) -> Self {
        Means { seq: seq.clone(), am: seq.am(), am2: seq.am_pow(2), values: Vec::new(), a: Vec::new(), a2: Vec::new(), approx: Default::default() }
    }

    pub fn seq(&self) -> &Seq {
        &self.seq
    }

    pub fn dense_len(&self) -> usize {
        self.values.len()
    }

    fn slot(&self, n: &Index) -> Result<Option<usize>> {
        if n.is_zero() {
            return Err(Error::Domain("sequence index 0".into()));
        }
        Ok(n.to_usize().filter(|&k| k <= self.values.len()).map(|k| k - 1))
    }

    fn closed(&self, s: &Seq, n: &Index) -> Result<T> {
        if T::MODE == NumericMode::Rational {
            return Err(Error::Inexact(format!("index {n} is past the exact prefix of {}", self.seq.label())));
        }
        T::from_log(s.eval(n)?)
    }

    pub fn value(&self, n: &Index) -> Result<T> {
        match self.slot(n)? {
            Some(k) => Ok(self.values[k].clone()),
            None => self.closed(&self.seq, n),
        }
    }

    /// `(s_a)_n`.
    pub fn a(&self, n: &Index) -> Result<T> {
        match self.slot(n)? {
            Some(k) => Ok(self.a[k].clone()),
            None => self.closed(&self.am, n),
        }
    }

    /// `(s_{a²})_n`.
    pub fn a2(&self, n: &Index) -> Result<T> {
        match self.slot(n)? {
            Some(k) => Ok(self.a2[k].clone()),
            None => self.closed(&self.am2, n),
        }
    }

    /// `r(s)_n = (s_a)_n / s_n`.
    pub fn r(&self, n: &Index) -> Result<T> {
        let v = self.value(n)?;
        if v.is_zero() {
            return Err(Error::FiniteRank { n: n.to_u64().unwrap_or(u64::MAX) });
        }
        Ok(self.a(n)?.div(&v))
    }

    /// `r(s_a)_n = (s_{a²})_n / (s_a)_n`.
    pub fn r_am(&self, n: &Index) -> Result<T> {
        Ok(self.a2(n)?.div(&self.a(n)?))
    }

    /// `r(s)_n` as a double, from the approximations when present.
    pub fn r_f64(&self, n: &Index) -> Result<f64> {
        match self.approx_r(n) {
            Some(r) => Ok(r),
            None => self.r(n).map(|r| r.to_f64()),
        }
    }

    /// `r(s_a)_n` as a double, from the approximations when present.
    pub fn r_am_f64(&self, n: &Index) -> Result<f64> {
        match self.approx_r_am(n) {
            Some(r) => Ok(r),
            None => self.r_am(n).map(|r| r.to_f64()),
        }
    }

    fn approx_at(&self, which: usize, n: &Index) -> Option<f64> {
        let k = n.to_usize()?.checked_sub(1)?;
        self.approx[which].get(k).copied().filter(|x| x.is_normal())
    }

    /// `r(s)_n` as a double, available in rational mode on the dense prefix.
    pub fn approx_r(&self, n: &Index) -> Option<f64> {
        Some(self.approx_at(1, n)? / self.approx_at(0, n)?)
    }

    /// `r(s_a)_n` as a double (relative error a few ulps), available in rational
    /// mode on the dense prefix.
    pub fn approx_r_am(&self, n: &Index) -> Option<f64> {
        Some(self.approx_at(2, n)? / self.approx_at(1, n)?)
    }
}
