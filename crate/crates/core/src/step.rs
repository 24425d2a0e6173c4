//! Piecewise-constant sequences with O(log K) first- and second-order means
//! at arbitrary indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Index, LogReal, Scalar};

/// Largest admissible index magnitude, in decimal digits.
pub const MAX_INDEX_DIGITS: f64 = 1e6;

/// A nonincreasing step sequence: `levels[k]` on `(m_k, m_{k+1}]` with
/// `m_0 = 0`, the last level continuing forever.
///
/// The mean and the mean of the mean at every breakpoint are cached, so the
/// closed forms evaluate in time independent of the index magnitude.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSeq<T> {
    breakpoints: Vec<Index>,
    levels: Vec<T>,
    means: Vec<T>,
    second_means: Vec<T>,
}

impl<T: Scalar> StepSeq<T> {
    pub fn constant(level: T) -> Result<Self> {
        if level.is_zero() {
            return Err(Error::Construction("step levels must be positive".into()));
        }
        Ok(StepSeq {
            breakpoints: Vec::new(),
            levels: vec![level],
            means: Vec::new(),
            second_means: Vec::new(),
        })
    }

    /// `levels[0]` on `(0, breakpoints[0]]`, `levels[k]` on `(breakpoints[k-1], breakpoints[k]]`,
    /// and the last level beyond the last breakpoint.
    pub fn from_steps(levels: Vec<T>, breakpoints: Vec<Index>) -> Result<Self> {
        if levels.len() != breakpoints.len() + 1 {
            return Err(Error::Construction(format!(
                "{} levels need {} breakpoints, got {}",
                levels.len(),
                levels.len().saturating_sub(1),
                breakpoints.len()
            )));
        }
        let mut levels = levels.into_iter();
        let mut z = StepSeq::constant(levels.next().unwrap())?;
        for (m, level) in breakpoints.into_iter().zip(levels) {
            z.push(m, level)?;
        }
        Ok(z)
    }

    pub fn breakpoints(&self) -> &[Index] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// `(ζ_a)_{m_k}` for each breakpoint.
    pub fn means_at_breakpoints(&self) -> &[T] {
        &self.means
    }

    /// `(ζ_{a²})_{m_k}` for each breakpoint.
    pub fn second_means_at_breakpoints(&self) -> &[T] {
        &self.second_means
    }

    pub fn last_level(&self) -> &T {
        self.levels.last().unwrap()
    }

    pub fn last_breakpoint(&self) -> Index {
        self.breakpoints.last().cloned().unwrap_or_default()
    }

    /// Number of breakpoints strictly below `j`, which is also the index of the level at `j`.
    pub fn segment(&self, j: &Index) -> usize {
        self.breakpoints.partition_point(|m| m < j)
    }

    pub fn eval(&self, j: &Index) -> Result<T> {
        check_positive(j)?;
        Ok(self.levels[self.segment(j)].clone())
    }

    /// `(ζ_a)_j = (m_k/j)((ζ_a)_{m_k} - ε_k) + ε_k` on `(m_k, m_{k+1}]`.
    pub fn am_at(&self, j: &Index) -> Result<T> {
        check_positive(j)?;
        let k = self.segment(j);
        if k == 0 {
            return Ok(self.levels[0].clone());
        }
        let level = &self.levels[k];
        let m = &self.breakpoints[k - 1];
        let excess = self.means[k - 1].sub(level)?;
        let w = T::from_index(m).div(&T::from_index(j));
        Ok(w.mul(&excess).add(level))
    }

    /// `(ζ_{a²})_j = (m_k/j)((ζ_{a²})_{m_k} - ε_k + ((ζ_a)_{m_k} - ε_k)(H_j - H_{m_k})) + ε_k`.
    pub fn am2_at(&self, j: &Index) -> Result<T> {
        check_positive(j)?;
        let k = self.segment(j);
        if k == 0 {
            return Ok(self.levels[0].clone());
        }
        let level = &self.levels[k];
        let m = &self.breakpoints[k - 1];
        let first = self.means[k - 1].sub(level)?;
        let second = self.second_means[k - 1].sub(level)?;
        let h = T::harmonic_diff(j, m)?;
        let w = T::from_index(m).div(&T::from_index(j));
        Ok(w.mul(&second.add(&first.mul(&h))).add(level))
    }

    /// Prefix sum `Σ_{i≤j} ζ_i = j (ζ_a)_j`.
    pub fn prefix_sum(&self, j: &Index) -> Result<T> {
        if j.is_zero() {
            return Ok(T::zero());
        }
        Ok(self.am_at(j)?.mul(&T::from_index(j)))
    }

    /// A copy with the current last level ending at `new_m` and `new_level` beyond it.
    pub fn extend(&self, new_m: Index, new_level: T) -> Result<Self> {
        let mut z = self.clone();
        z.push(new_m, new_level)?;
        Ok(z)
    }

    pub fn push(&mut self, new_m: Index, new_level: T) -> Result<()> {
        if new_m <= self.last_breakpoint() {
            return Err(Error::Construction(format!(
                "breakpoint {new_m} does not exceed {}",
                self.last_breakpoint()
            )));
        }
        if new_level >= *self.last_level() || new_level.is_zero() {
            return Err(Error::Construction(format!(
                "level {new_level:?} must be positive and below the current last level"
            )));
        }
        if new_m.log10() > MAX_INDEX_DIGITS {
            return Err(Error::Construction(format!(
                "breakpoint with {:.0} digits exceeds the index guard",
                new_m.log10()
            )));
        }
        let a = self.am_at(&new_m)?;
        let b = self.am2_at(&new_m)?;
        self.breakpoints.push(new_m);
        self.levels.push(new_level);
        self.means.push(a);
        self.second_means.push(b);
        Ok(())
    }

    /// Convert level and aggregate storage to another backend.
    pub fn to_log(&self) -> StepSeq<LogReal> {
        StepSeq {
            breakpoints: self.breakpoints.clone(),
            levels: self.levels.iter().map(Scalar::to_log).collect(),
            means: self.means.iter().map(Scalar::to_log).collect(),
            second_means: self.second_means.iter().map(Scalar::to_log).collect(),
        }
    }
}

fn check_positive(j: &Index) -> Result<()> {
    if j.is_zero() {
        Err(Error::Domain("sequence index 0".into()))
    } else {
        Ok(())
    }
}

/// Minimal `j > lower` with `(ζ_{a²})_j <= bound`, where `ζ` continues its last
/// level past its last breakpoint. Relies on `ζ_{a²}` being nonincreasing.
pub fn stage_condition_search<T: Scalar>(z: &StepSeq<T>, lower: &Index, bound: &T) -> Result<Index> {
    if bound <= z.last_level() {
        return Err(Error::UnreachableBound(format!(
            "bound {bound:?} does not exceed the limiting level {:?}",
            z.last_level()
        )));
    }
    let holds = |j: &Index| -> Result<bool> { Ok(z.am2_at(j)? <= *bound) };
    let mut lo = lower.clone();
    let mut step = Index::one();
    let mut hi = lower.add(&step);
    while !holds(&hi)? {
        lo = hi;
        step = step.mul_u64(2);
        hi = lower.add(&step);
        if hi.log10() > MAX_INDEX_DIGITS {
            return Err(Error::Construction(format!(
                "stage search passed the {MAX_INDEX_DIGITS:e}-digit index guard"
            )));
        }
    }
    // invariant: the condition fails at lo (or lo = lower) and holds at hi
    while hi.checked_sub(&lo).unwrap() > Index::one() {
        let mid = Index::midpoint(&lo, &hi);
        if holds(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// JSON form: breakpoints as decimal strings, levels and aggregates as natural logs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSeqRecord {
    pub breakpoints: Vec<Index>,
    pub levels: Vec<LogReal>,
    pub means: Vec<LogReal>,
    pub second_means: Vec<LogReal>,
}

impl From<&StepSeq<LogReal>> for StepSeqRecord {
    fn from(z: &StepSeq<LogReal>) -> Self {
        StepSeqRecord {
            breakpoints: z.breakpoints.clone(),
            levels: z.levels.clone(),
            means: z.means.clone(),
            second_means: z.second_means.clone(),
        }
    }
}

impl StepSeqRecord {
    /// Rebuild from breakpoints and levels; the aggregates are recomputed.
    pub fn rebuild(&self) -> Result<StepSeq<LogReal>> {
        StepSeq::from_steps(self.levels.clone(), self.breakpoints.clone())
    }
}

impl Serialize for StepSeq<LogReal> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StepSeqRecord::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StepSeq<LogReal> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        StepSeqRecord::deserialize(deserializer)?
            .rebuild()
            .map_err(serde::de::Error::custom)
    }
}
