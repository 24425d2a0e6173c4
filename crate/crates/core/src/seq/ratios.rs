use crate::error::{Error, Result};
use crate::numerics::{Accumulator, Index, LogReal, NumericMode, Scalar};

/// Log-mode tolerance for the `c_n + 1/c_{n+1} <= 2` test.
pub const AM_IMAGE_TOL: f64 = 1e-12;

fn effective_tol<T: Scalar>(tol: f64) -> f64 {
    match T::MODE {
        NumericMode::Rational => 0.0,
        NumericMode::Log => tol,
    }
}

/// `(1/n) Σ_{j≤n} v_j` for every prefix.
pub fn prefix_means<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut acc = T::Acc::default();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            acc.push(v);
            acc.total().div(&T::from_u64(i as u64 + 1))
        })
        .collect()
}

/// A ratio of regularity `r_1, r_2, ...`, stored in the backend scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioSeq<T> {
    values: Vec<T>,
}

impl<T: Scalar> RatioSeq<T> {
    pub fn new(values: Vec<T>) -> Self {
        RatioSeq { values }
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&x| T::from_log(LogReal::new(x)))
            .collect::<Result<_>>()
            .map(RatioSeq::new)
    }

    /// `r_n = H_n`, the ratio of regularity of `ω`.
    pub fn harmonic(n: usize) -> Result<Self> {
        (1..=n as u64)
            .map(|k| T::harmonic(&Index::new(k)))
            .collect::<Result<_>>()
            .map(RatioSeq::new)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `r_n`, 1-based.
    pub fn get(&self, n: usize) -> &T {
        &self.values[n - 1]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }

    /// Normalized slack of `(n+1) r_{n+1} >= n r_n + 1` for each `n < len`.
    pub fn recurrence_slacks(&self) -> Vec<f64> {
        self.values
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let n = i as u64 + 1;
                let lhs = T::from_u64(n).mul(&w[0]).add(&T::one());
                let rhs = T::from_u64(n + 1).mul(&w[1]);
                T::slack(&lhs, &rhs)
            })
            .collect()
    }

    /// First `n` at which the recurrence inequality fails beyond `tol`
    /// (exactly, in rational mode), with its slack.
    pub fn recurrence_violation(&self, tol: f64) -> Option<(usize, f64)> {
        let tol = effective_tol::<T>(tol);
        self.recurrence_slacks()
            .into_iter()
            .enumerate()
            .find(|(_, s)| *s < -tol)
            .map(|(i, s)| (i + 1, s))
    }
}

/// `r(s)_n = (s_a)_n / s_n` for a dense prefix of values.
pub fn ratio_from_values<T: Scalar>(values: &[T]) -> Result<RatioSeq<T>> {
    if let Some(i) = values.iter().position(Scalar::is_zero) {
        return Err(Error::FiniteRank { n: i as u64 + 1 });
    }
    let means = prefix_means(values);
    Ok(RatioSeq::new(
        means.iter().zip(values).map(|(a, v)| a.div(v)).collect(),
    ))
}

/// A concavity ratio `c_1, c_2, ...` with the result of the am-image test.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcavitySeq<T> {
    values: Vec<T>,
    am_image: bool,
}

impl<T: Scalar> ConcavitySeq<T> {
    pub fn new(values: Vec<T>) -> Self {
        let am_image = am_image_slacks(&values).iter().all(|s| *s >= -effective_tol::<T>(AM_IMAGE_TOL));
        ConcavitySeq { values, am_image }
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&x| T::from_log(LogReal::new(x)))
            .collect::<Result<_>>()
            .map(ConcavitySeq::new)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `c_n`, 1-based.
    pub fn get(&self, n: usize) -> &T {
        &self.values[n - 1]
    }

    /// Whether `c_n + 1/c_{n+1} <= 2` held at every tested `n`.
    pub fn am_image(&self) -> bool {
        self.am_image
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }

    /// First `n` with `c_n < n/(n+1)`.
    pub fn lower_bound_violation(&self, tol: f64) -> Option<usize> {
        let tol = effective_tol::<T>(tol);
        self.values.iter().enumerate().find_map(|(i, c)| {
            let n = i as u64 + 1;
            let floor = T::from_ratio(n, n + 1);
            (T::slack(&floor, c) < -tol).then_some(i + 1)
        })
    }
}

/// Normalized slacks of `c_n + 1/c_{n+1} <= 2`.
pub fn am_image_slacks<T: Scalar>(values: &[T]) -> Vec<f64> {
    let two = T::from_u64(2);
    values
        .windows(2)
        .map(|w| {
            if w[1].is_zero() {
                return -1.0;
            }
            let lhs = w[0].add(&T::one().div(&w[1]));
            T::slack(&lhs, &two)
        })
        .collect()
}

/// `c_n = n s_n / ((n+1) s_{n+1})` for `n < values.len()`.
pub fn concavity_from_values<T: Scalar>(values: &[T]) -> Result<ConcavitySeq<T>> {
    if let Some(i) = values.iter().position(Scalar::is_zero) {
        return Err(Error::FiniteRank { n: i as u64 + 1 });
    }
    Ok(ConcavitySeq::new(
        values
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let n = i as u64 + 1;
                T::from_u64(n).mul(&w[0]).div(&T::from_u64(n + 1).mul(&w[1]))
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Exact;

    #[test]
    fn prefix_means_exact() {
        let v = vec![Exact::one(), Exact::ratio(1, 2), Exact::ratio(1, 3)];
        let m = prefix_means(&v);
        assert_eq!(m[2], Exact::ratio(11, 18));
    }

    #[test]
    fn recurrence_detection() {
        let r = RatioSeq::<Exact>::new(vec![Exact::one(), Exact::ratio(9, 10)]);
        assert_eq!(r.recurrence_violation(0.0).map(|x| x.0), Some(1));
        let r = RatioSeq::<Exact>::new(vec![Exact::one(), Exact::one()]);
        assert_eq!(r.recurrence_violation(0.0), None);
        let h = RatioSeq::<Exact>::harmonic(50).unwrap();
        assert_eq!(h.recurrence_violation(0.0), None);
        assert!(h.recurrence_slacks().iter().all(|s| *s > 0.0));
        let ones = RatioSeq::<Exact>::new(vec![Exact::one(); 5]);
        assert!(ones.recurrence_slacks().iter().all(|s| *s == 0.0));
    }

    #[test]
    fn am_image_flag() {
        let c = ConcavitySeq::<Exact>::new(vec![Exact::ratio(1, 2), Exact::ratio(2, 3), Exact::ratio(3, 4)]);
        assert!(c.am_image());
        let c = ConcavitySeq::<Exact>::new(vec![Exact::ratio(3, 4), Exact::ratio(1, 2)]);
        assert!(!c.am_image());
        assert_eq!(c.lower_bound_violation(0.0), Some(2));
    }
}
