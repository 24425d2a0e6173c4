//! The sequence model: nonincreasing nonnegative sequences evaluable at any
//! index, closed under the arithmetic mean and ampliation.
//!
//! Values live in the log domain ([`LogReal`]). Every sequence can also be
//! enumerated densely in either backend through [`Seq::dense`], which is
//! how the exact-rational checks see it.

mod domination;
mod family;
mod ratios;

use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Exact, Index, LogReal, LogSum, NumericMode, Scalar};
use crate::step::{StepSeq, StepSeqRecord};

pub use domination::{domination_profile, pointwise_domination, DominationKind, DominationProfile};
pub use family::{Family, PowerSums};
pub use ratios::{
    concavity_from_values, prefix_means, ratio_from_values, ConcavitySeq, RatioSeq, AM_IMAGE_TOL,
};

pub const DEFAULT_DENSE_LIMIT: u64 = 1_000_000;

/// A sequence whose value at its horizon is not below this fraction of its
/// first value is flagged as possibly not null.
pub const NULLITY_FACTOR: f64 = 1e-2;

/// What a table sequence does past its last stored entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    Zero,
    Undefined,
}

#[derive(Debug)]
pub enum SeqKind {
    Formula { family: Family, sums: Option<PowerSums> },
    Step(Arc<StepSeq<LogReal>>),
    Table { values: Vec<LogReal>, exact: Option<Vec<Exact>>, tail: Tail },
    Mean(Seq),
    Ampliation { operand: Seq, factor: u64 },
}

#[derive(Default)]
struct Memo {
    values: Vec<LogReal>,
    prefix: Vec<LogReal>,
    acc: LogSum,
}

#[derive(Default)]
struct ExactMemo {
    values: Vec<Exact>,
    prefix: Vec<Exact>,
}

struct Node {
    kind: SeqKind,
    dense_limit: u64,
    warnings: Vec<String>,
    memo: RwLock<Memo>,
    exact_memo: Mutex<ExactMemo>,
}

/// A shared, immutable sequence handle. Cloning is cheap; memo caches are shared.
#[derive(Clone)]
pub struct Seq(Arc<Node>);

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seq({})", self.label())
    }
}

impl Seq {
    fn from_kind(kind: SeqKind, dense_limit: u64, warnings: Vec<String>) -> Seq {
        Seq(Arc::new(Node {
            kind,
            dense_limit,
            warnings,
            memo: RwLock::new(Memo::default()),
            exact_memo: Mutex::new(ExactMemo::default()),
        }))
    }

    pub fn family(family: Family) -> Result<Seq> {
        family.validate()?;
        let sums = match family {
            Family::Power { p } => Some(PowerSums::new(p)),
            _ => None,
        };
        let mut warnings = Vec::new();
        if !family.is_null() {
            warnings.push(format!("{family} is not a null sequence"));
        }
        Ok(Seq::from_kind(SeqKind::Formula { family, sums }, DEFAULT_DENSE_LIMIT, warnings))
    }

    /// `ω = <1/n>`.
    pub fn omega() -> Seq {
        Seq::family(Family::Power { p: 1.0 }).unwrap()
    }

    /// `ω^p = <n^{-p}>`.
    pub fn power(p: f64) -> Result<Seq> {
        Seq::family(Family::Power { p })
    }

    pub fn log_power(p: f64, q: f64) -> Result<Seq> {
        Seq::family(Family::LogPower { p, q })
    }

    pub fn iterated_log() -> Seq {
        Seq::family(Family::IteratedLog).unwrap()
    }

    pub fn constant(value: LogReal) -> Result<Seq> {
        Seq::family(Family::Constant { ln_value: value.ln() })
    }

    pub fn step(z: StepSeq<LogReal>) -> Seq {
        let first = z.levels()[0];
        let last = *z.last_level();
        let mut warnings = Vec::new();
        if last.div(first).value() >= NULLITY_FACTOR {
            warnings.push(format!(
                "step sequence ends at level {last}, not below {NULLITY_FACTOR} of its first level"
            ));
        }
        Seq::from_kind(SeqKind::Step(Arc::new(z)), DEFAULT_DENSE_LIMIT, warnings)
    }

    /// A finite table of log-domain values continued by `tail`. Values must be
    /// nonincreasing up to a relative rounding slack of `1e-12`.
    pub fn table(values: Vec<LogReal>, tail: Tail) -> Result<Seq> {
        check_table_order(&values, |a, b| b.ln() <= a.ln() + 1e-12)?;
        Ok(Seq::table_unchecked(values, None, tail))
    }

    /// A table of exact rationals; the log-domain view is derived from it.
    pub fn exact_table(values: Vec<Exact>, tail: Tail) -> Result<Seq> {
        check_table_order(&values, |a, b| b <= a)?;
        let logs = values.iter().map(Scalar::to_log).collect();
        Ok(Seq::table_unchecked(logs, Some(values), tail))
    }

    /// A table from backend values: exact for the rational backend, log-domain otherwise.
    pub fn scalar_table<T: Scalar>(values: &[T], tail: Tail) -> Result<Seq> {
        match T::MODE {
            NumericMode::Rational => {
                Seq::exact_table(values.iter().map(Scalar::to_exact).collect::<Result<_>>()?, tail)
            }
            NumericMode::Log => Seq::table(values.iter().map(Scalar::to_log).collect(), tail),
        }
    }

    /// The same sequence with extra construction caveats attached.
    pub fn with_warnings(&self, extra: impl IntoIterator<Item = String>) -> Seq {
        let mut warnings = self.0.warnings.clone();
        warnings.extend(extra);
        Seq::from_kind(self.clone_kind(self.0.dense_limit), self.0.dense_limit, warnings)
    }

    fn table_unchecked(values: Vec<LogReal>, exact: Option<Vec<Exact>>, tail: Tail) -> Seq {
        let mut warnings = Vec::new();
        if tail == Tail::Undefined {
            if let (Some(first), Some(last)) = (values.first(), values.last()) {
                if !first.is_zero() && (*last).div(*first).value() >= NULLITY_FACTOR {
                    warnings.push(format!(
                        "table ends at {last} after {} entries, not below {NULLITY_FACTOR} of its first value; \
                         the sequence may not be null",
                        values.len()
                    ));
                }
            }
        }
        Seq::from_kind(SeqKind::Table { values, exact, tail }, DEFAULT_DENSE_LIMIT, warnings)
    }

    /// `<1, 0, 0, ...>`.
    pub fn unit() -> Seq {
        Seq::exact_table(vec![Exact::one()], Tail::Zero).unwrap()
    }

    /// The same sequence with a different dense-enumeration horizon.
    pub fn with_dense_limit(&self, limit: u64) -> Seq {
        Seq::from_kind(self.clone_kind(limit), limit, self.0.warnings.clone())
    }

    fn relimited(&self, limit: u64) -> Seq {
        if self.0.dense_limit == limit {
            self.clone()
        } else {
            self.with_dense_limit(limit)
        }
    }

    fn clone_kind(&self, limit: u64) -> SeqKind {
        match &self.0.kind {
            SeqKind::Formula { family, sums } => SeqKind::Formula { family: *family, sums: *sums },
            SeqKind::Step(z) => SeqKind::Step(z.clone()),
            SeqKind::Table { values, exact, tail } => SeqKind::Table {
                values: values.clone(),
                exact: exact.clone(),
                tail: *tail,
            },
            SeqKind::Mean(op) => SeqKind::Mean(op.relimited(limit)),
            SeqKind::Ampliation { operand, factor } => SeqKind::Ampliation {
                operand: operand.relimited(limit),
                factor: *factor,
            },
        }
    }

    pub fn kind(&self) -> &SeqKind {
        &self.0.kind
    }

    pub fn dense_limit(&self) -> u64 {
        self.0.dense_limit
    }

    /// Construction-time caveats, such as possible failure of nullity.
    pub fn warnings(&self) -> &[String] {
        &self.0.warnings
    }

    pub fn flagged_non_null(&self) -> bool {
        !self.0.warnings.is_empty()
    }

    pub fn as_step(&self) -> Option<&StepSeq<LogReal>> {
        match &self.0.kind {
            SeqKind::Step(z) => Some(z),
            _ => None,
        }
    }

    pub fn as_family(&self) -> Option<Family> {
        match &self.0.kind {
            SeqKind::Formula { family, .. } => Some(*family),
            _ => None,
        }
    }

    /// Known analytically for formula families; `None` otherwise.
    pub fn is_summable(&self) -> Option<bool> {
        match &self.0.kind {
            SeqKind::Formula { family, .. } => Some(family.is_summable()),
            SeqKind::Step(_) => Some(false),
            SeqKind::Table { tail: Tail::Zero, .. } => Some(true),
            SeqKind::Mean(_) => Some(false),
            SeqKind::Ampliation { operand, .. } => operand.is_summable(),
            SeqKind::Table { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.0.kind {
            SeqKind::Formula { family, .. } => family.label(),
            SeqKind::Step(z) => format!("step[{} breakpoints]", z.breakpoints().len()),
            SeqKind::Table { values, tail, .. } => match tail {
                Tail::Zero => format!("table[{}]+0", values.len()),
                Tail::Undefined => format!("table[{}]", values.len()),
            },
            SeqKind::Mean(op) => format!("am({})", op.label()),
            SeqKind::Ampliation { operand, factor } => format!("D{factor}({})", operand.label()),
        }
    }

    /// The arithmetic mean sequence `n ↦ (1/n) Σ_{j≤n} s_j`.
    pub fn am(&self) -> Seq {
        Seq::from_kind(SeqKind::Mean(self.clone()), self.0.dense_limit, self.0.warnings.clone())
    }

    /// `p`-fold arithmetic mean; `p = 0` is the sequence itself.
    pub fn am_pow(&self, p: u32) -> Seq {
        (0..p).fold(self.clone(), |s, _| s.am())
    }

    /// `(D_m s)_n = s_{⌈n/m⌉}`.
    pub fn ampliation(&self, m: u64) -> Result<Seq> {
        match m {
            0 => Err(Error::Domain("ampliation factor 0".into())),
            1 => Ok(self.clone()),
            _ => Ok(Seq::from_kind(
                SeqKind::Ampliation { operand: self.clone(), factor: m },
                self.0.dense_limit,
                self.0.warnings.clone(),
            )),
        }
    }

    pub fn eval(&self, n: &Index) -> Result<LogReal> {
        if n.is_zero() {
            return Err(Error::Domain("sequence index 0".into()));
        }
        match &self.0.kind {
            SeqKind::Formula { family, .. } => Ok(family.eval(n)),
            SeqKind::Step(z) => z.eval(n),
            SeqKind::Table { values, tail, .. } => match n.to_usize() {
                Some(k) if k <= values.len() => Ok(values[k - 1]),
                _ if *tail == Tail::Zero => Ok(LogReal::ZERO),
                _ => Err(Error::horizon(n, values.len())),
            },
            SeqKind::Ampliation { operand, factor } => operand.eval(&n.div_ceil_u64(*factor)),
            SeqKind::Mean(op) => op.mean_at(n),
        }
    }

    pub fn eval_u64(&self, n: u64) -> Result<LogReal> {
        self.eval(&Index::new(n))
    }

    /// `(1/n) Σ_{j≤n} s_j`, by closed form where one exists and by dense
    /// summation up to the dense horizon otherwise.
    pub fn mean_at(&self, n: &Index) -> Result<LogReal> {
        if n.is_zero() {
            return Err(Error::Domain("sequence index 0".into()));
        }
        if let Some(v) = self.closed_mean(n) {
            return v;
        }
        if let Some(k) = self.dense_index(n) {
            return Ok(self.prefix_dense(k)?.div(LogReal::from_u64(k as u64)));
        }
        match &self.0.kind {
            SeqKind::Formula { sums: Some(sums), .. } => Ok(sums.mean(n)),
            SeqKind::Mean(op) => match &op.0.kind {
                SeqKind::Formula { sums: Some(sums), .. } => Ok(sums.second_mean(n)),
                _ => Err(Error::horizon(n, self.0.dense_limit)),
            },
            SeqKind::Table { values, tail: Tail::Zero, .. } => {
                let total = self.prefix_dense(values.len())?;
                Ok(total.div(LogReal::from_ln(n.ln())))
            }
            SeqKind::Ampliation { operand, factor } => {
                // the last block of m copies is cut after n entries
                let q = n.div_ceil_u64(*factor);
                let m = LogReal::from_u64(*factor);
                let full = operand.mean_at(&q)?.mul(LogReal::from_ln(q.ln())).mul(m);
                let surplus = q.mul_u64(*factor).checked_sub(n).unwrap();
                let cut = operand.eval(&q)?.mul(LogReal::from_ln(surplus.ln()));
                Ok(full.checked_sub(cut)?.div(LogReal::from_ln(n.ln())))
            }
            _ => Err(Error::horizon(n, self.0.dense_limit)),
        }
    }

    /// Means that are exact at every index regardless of the dense horizon.
    fn closed_mean(&self, n: &Index) -> Option<Result<LogReal>> {
        match &self.0.kind {
            SeqKind::Step(z) => Some(z.am_at(n)),
            SeqKind::Mean(op) => op.as_step().map(|z| z.am2_at(n)),
            SeqKind::Formula { family: Family::Constant { ln_value }, .. } => {
                Some(Ok(LogReal::from_ln(*ln_value)))
            }
            _ => None,
        }
    }

    fn has_closed_mean(&self) -> bool {
        self.closed_mean(&Index::one()).is_some()
    }

    /// `Σ_{j≤n} s_j`.
    pub fn prefix_sum(&self, n: &Index) -> Result<LogReal> {
        if n.is_zero() {
            return Ok(LogReal::ZERO);
        }
        if let Some(k) = self.dense_index(n) {
            if !self.has_closed_mean() {
                return self.prefix_dense(k);
            }
        }
        Ok(self.mean_at(n)?.mul(LogReal::from_ln(n.ln())))
    }

    fn dense_index(&self, n: &Index) -> Option<usize> {
        n.to_u64().filter(|&k| k <= self.0.dense_limit).map(|k| k as usize)
    }

    fn prefix_dense(&self, k: usize) -> Result<LogReal> {
        if k == 0 {
            return Ok(LogReal::ZERO);
        }
        self.ensure(k)?;
        Ok(self.0.memo.read().unwrap().prefix[k - 1])
    }

    fn ensure(&self, n: usize) -> Result<()> {
        if n as u64 > self.0.dense_limit {
            return Err(Error::horizon(n, self.0.dense_limit));
        }
        let have = self.0.memo.read().unwrap().values.len();
        if have >= n {
            return Ok(());
        }
        let fresh = self.compute_values(have + 1, n)?;
        let mut memo = self.0.memo.write().unwrap();
        // another thread may have filled part of the range with identical values
        let start = memo.values.len();
        for v in fresh.into_iter().skip(start - have) {
            memo.acc.push(v);
            let total = memo.acc.total();
            memo.values.push(v);
            memo.prefix.push(total);
        }
        Ok(())
    }

    /// Values at `from..=to` (1-based).
    fn compute_values(&self, from: usize, to: usize) -> Result<Vec<LogReal>> {
        match &self.0.kind {
            SeqKind::Mean(op) if !op.has_closed_mean() => {
                op.ensure(to)?;
                let memo = op.0.memo.read().unwrap();
                Ok((from..=to)
                    .map(|j| memo.prefix[j - 1].div(LogReal::from_u64(j as u64)))
                    .collect())
            }
            _ => (from..=to).map(|j| self.eval_u64(j as u64)).collect(),
        }
    }

    /// `s_1, ..., s_n` in the log domain.
    pub fn dense_log(&self, n: usize) -> Result<Vec<LogReal>> {
        self.ensure(n)?;
        Ok(self.0.memo.read().unwrap().values[..n].to_vec())
    }

    /// `S_1, ..., S_n` with `S_k = Σ_{j≤k} s_j`, in the log domain.
    pub fn prefix_sums_log(&self, n: usize) -> Result<Vec<LogReal>> {
        self.ensure(n)?;
        Ok(self.0.memo.read().unwrap().prefix[..n].to_vec())
    }

    /// `s_1, ..., s_n` in the backend `T`. The rational backend computes
    /// means by exact summation; irrational family values enter as the exact
    /// value of their nearest double.
    pub fn dense<T: Scalar>(&self, n: usize) -> Result<Vec<T>> {
        match T::MODE {
            NumericMode::Log => self.dense_log(n)?.into_iter().map(T::from_log).collect(),
            NumericMode::Rational => {
                self.ensure_exact(n)?;
                let memo = self.0.exact_memo.lock().unwrap();
                Ok(memo.values[..n].iter().map(T::from_exact).collect())
            }
        }
    }

    /// Exact prefix sums `S_1, ..., S_n`.
    pub fn prefix_sums_exact(&self, n: usize) -> Result<Vec<Exact>> {
        self.ensure_exact(n)?;
        Ok(self.0.exact_memo.lock().unwrap().prefix[..n].to_vec())
    }

    fn ensure_exact(&self, n: usize) -> Result<()> {
        if n as u64 > self.0.dense_limit {
            return Err(Error::horizon(n, self.0.dense_limit));
        }
        let have = self.0.exact_memo.lock().unwrap().values.len();
        if have >= n {
            return Ok(());
        }
        let fresh = self.compute_exact(have + 1, n)?;
        let mut memo = self.0.exact_memo.lock().unwrap();
        let start = memo.values.len();
        for v in fresh.into_iter().skip(start - have) {
            let total = match memo.prefix.last() {
                Some(s) => s.add(&v),
                None => v.clone(),
            };
            memo.values.push(v);
            memo.prefix.push(total);
        }
        Ok(())
    }

    fn compute_exact(&self, from: usize, to: usize) -> Result<Vec<Exact>> {
        match &self.0.kind {
            SeqKind::Formula { family, .. } => (from..=to)
                .map(|j| match family.exact_ratio(j as u64) {
                    Some((num, den)) => Ok(Exact::ratio(num, den)),
                    None => Exact::from_log(family.eval(&Index::new(j as u64))),
                })
                .collect(),
            SeqKind::Step(z) => (from..=to)
                .map(|j| Exact::from_log(z.eval(&Index::new(j as u64))?))
                .collect(),
            SeqKind::Table { values, exact, tail } => (from..=to)
                .map(|j| match (exact, values.get(j - 1)) {
                    (Some(ex), Some(_)) => Ok(ex[j - 1].clone()),
                    (None, Some(v)) => Exact::from_log(*v),
                    (_, None) if *tail == Tail::Zero => Ok(Exact::zero()),
                    _ => Err(Error::horizon(j, values.len())),
                })
                .collect(),
            SeqKind::Mean(op) => {
                let sums = op.prefix_sums_exact(to)?;
                Ok((from..=to).map(|j| sums[j - 1].div(&Exact::from_u64(j as u64))).collect())
            }
            SeqKind::Ampliation { operand, factor } => {
                let q = (to as u64).div_ceil(*factor) as usize;
                let base = operand.dense::<Exact>(q)?;
                Ok((from..=to)
                    .map(|j| base[(j as u64).div_ceil(*factor) as usize - 1].clone())
                    .collect())
            }
        }
    }

    /// `r(s)_n = (s_a)_n / s_n` at one index, in the log domain.
    pub fn ratio_at(&self, n: &Index) -> Result<f64> {
        let v = self.eval(n)?;
        if v.is_zero() {
            return Err(Error::FiniteRank { n: n.to_u64().unwrap_or(u64::MAX) });
        }
        Ok(self.mean_at(n)?.div(v).value())
    }

    /// `r(s)_1, ..., r(s)_n` in backend `T`.
    pub fn ratio_of_regularity<T: Scalar>(&self, n: usize) -> Result<RatioSeq<T>> {
        ratio_from_values(&self.dense::<T>(n)?)
    }

    /// `c(s)_1, ..., c(s)_n`; needs `s` up to `n + 1`.
    pub fn concavity_ratio<T: Scalar>(&self, n: usize) -> Result<ConcavitySeq<T>> {
        concavity_from_values(&self.dense::<T>(n + 1)?)
    }

    /// A serializable description of this sequence.
    pub fn spec(&self) -> SeqSpec {
        match &self.0.kind {
            SeqKind::Formula { family, .. } => SeqSpec::Formula(*family),
            SeqKind::Step(z) => SeqSpec::Step(StepSeqRecord::from(z.as_ref())),
            SeqKind::Table { values, tail, .. } => SeqSpec::Table { values: values.clone(), tail: *tail },
            SeqKind::Mean(op) => SeqSpec::Mean { operand: Box::new(op.spec()) },
            SeqKind::Ampliation { operand, factor } => SeqSpec::Ampliation {
                operand: Box::new(operand.spec()),
                factor: *factor,
            },
        }
    }

    pub fn from_spec(spec: &SeqSpec) -> Result<Seq> {
        match spec {
            SeqSpec::Formula(f) => Seq::family(*f),
            SeqSpec::Step(rec) => Ok(Seq::step(rec.rebuild()?)),
            SeqSpec::Table { values, tail } => Seq::table(values.clone(), *tail),
            SeqSpec::Mean { operand } => Ok(Seq::from_spec(operand)?.am()),
            SeqSpec::Ampliation { operand, factor } => Seq::from_spec(operand)?.ampliation(*factor),
        }
    }
}

fn check_table_order<T>(values: &[T], ok: impl Fn(&T, &T) -> bool) -> Result<()> {
    for (i, w) in values.windows(2).enumerate() {
        if !ok(&w[0], &w[1]) {
            return Err(Error::Construction(format!(
                "table values must be nonincreasing; entry {} exceeds entry {}",
                i + 2,
                i + 1
            )));
        }
    }
    Ok(())
}

/// JSON description of a sequence: `{"kind": ..., "params": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum SeqSpec {
    Formula(Family),
    Step(StepSeqRecord),
    Table { values: Vec<LogReal>, tail: Tail },
    Mean { operand: Box<SeqSpec> },
    Ampliation { operand: Box<SeqSpec>, factor: u64 },
}

/// A [`SeqSpec`] with the horizon it is meant to be evaluated to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqDocument {
    #[serde(flatten)]
    pub spec: SeqSpec,
    pub horizon: Index,
}
