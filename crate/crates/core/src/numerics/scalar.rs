use std::fmt;
use std::sync::{Mutex, OnceLock};

use dashu_base::UnsignedAbs;
use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{harmonic, Index, LogReal, LogSum};

/// Which arithmetic backs sequence values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Rational,
    #[default]
    Log,
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NumericMode::Rational => "rational",
            NumericMode::Log => "log",
        })
    }
}

impl std::str::FromStr for NumericMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(NumericMode::Rational),
            "log" => Ok(NumericMode::Log),
            other => Err(Error::Parse(format!("unknown numeric mode '{other}'"))),
        }
    }
}

/// Running sum in a scalar backend.
pub trait Accumulator<T>: Default + Clone {
    fn push(&mut self, x: &T);
    fn total(&self) -> T;
}

impl Accumulator<LogReal> for LogSum {
    fn push(&mut self, x: &LogReal) {
        LogSum::push(self, *x)
    }

    fn total(&self) -> LogReal {
        LogSum::total(self)
    }
}

/// Nonnegative scalar arithmetic shared by the log-domain and exact-rational backends.
///
/// Every algorithm that should be checkable exactly is written once against this trait.
pub trait Scalar: Clone + fmt::Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    const MODE: NumericMode;
    type Acc: Accumulator<Self>;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(n: u64) -> Self;
    fn from_index(n: &Index) -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    /// Import a log-domain value. The rational backend takes the exact value of
    /// the nearest double, so irrational inputs are represented by a fixed
    /// rational stand-in.
    fn from_log(x: LogReal) -> Result<Self>;
    fn from_exact(x: &Exact) -> Self;
    fn to_exact(&self) -> Result<Exact>;
    fn to_log(&self) -> LogReal;
    fn to_f64(&self) -> f64;

    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    /// `self - other`; fails on a negative result or, in log mode, on catastrophic cancellation.
    fn sub(&self, other: &Self) -> Result<Self>;
    /// `self - other` where a log-mode result within `tol` (relative) of zero becomes exactly zero.
    fn sub_or_zero(&self, other: &Self, tol: f64) -> Result<Self>;
    fn is_zero(&self) -> bool;

    fn harmonic(n: &Index) -> Result<Self>;
    fn harmonic_diff(n: &Index, m: &Index) -> Result<Self>;

    /// Normalized slack `(rhs - lhs) / max(lhs, rhs)` of the claim `lhs <= rhs`.
    /// The sign is exact in the rational backend.
    fn slack(lhs: &Self, rhs: &Self) -> f64;

    /// `|a - b| / max(a, b)`; zero exactly when equal in the rational backend.
    fn rel_diff(a: &Self, b: &Self) -> f64;

    fn ln(&self) -> f64 {
        self.to_log().ln()
    }

    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        let mut acc = Self::Acc::default();
        for x in items {
            acc.push(x);
        }
        acc.total()
    }
}

impl Scalar for LogReal {
    const MODE: NumericMode = NumericMode::Log;
    type Acc = LogSum;

    fn zero() -> Self {
        LogReal::ZERO
    }

    fn one() -> Self {
        LogReal::ONE
    }

    fn from_u64(n: u64) -> Self {
        LogReal::from_u64(n)
    }

    fn from_index(n: &Index) -> Self {
        LogReal::from_ln(n.ln())
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        LogReal::from_ln((num as f64).ln() - (den as f64).ln())
    }

    fn from_log(x: LogReal) -> Result<Self> {
        Ok(x)
    }

    fn from_exact(x: &Exact) -> Self {
        x.to_log()
    }

    fn to_exact(&self) -> Result<Exact> {
        Exact::from_log(*self)
    }

    fn to_log(&self) -> LogReal {
        *self
    }

    fn to_f64(&self) -> f64 {
        self.value()
    }

    fn add(&self, other: &Self) -> Self {
        LogReal::add(*self, *other)
    }

    fn mul(&self, other: &Self) -> Self {
        LogReal::mul(*self, *other)
    }

    fn div(&self, other: &Self) -> Self {
        LogReal::div(*self, *other)
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.checked_sub(*other)
    }

    fn sub_or_zero(&self, other: &Self, tol: f64) -> Result<Self> {
        LogReal::sub_or_zero(*self, *other, tol)
    }

    fn is_zero(&self) -> bool {
        LogReal::is_zero(*self)
    }

    fn harmonic(n: &Index) -> Result<Self> {
        harmonic::harmonic(n).map(LogReal::new)
    }

    fn harmonic_diff(n: &Index, m: &Index) -> Result<Self> {
        harmonic::harmonic_diff(n, m).map(LogReal::new)
    }

    fn slack(lhs: &Self, rhs: &Self) -> f64 {
        let (l, r) = (lhs.ln(), rhs.ln());
        if l == r {
            0.0
        } else if r > l {
            -(l - r).exp_m1()
        } else {
            (r - l).exp_m1()
        }
    }

    fn rel_diff(a: &Self, b: &Self) -> f64 {
        a.rel_gap(*b)
    }
}

/// Exact nonnegative rational, the oracle backend.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub RBig);

pub const EXACT_HARMONIC_LIMIT: u64 = 20_000;
const EXACT_DIRECT_SPAN: u64 = 20_000;

fn exact_harmonic_table() -> &'static Mutex<Vec<RBig>> {
    static TABLE: OnceLock<Mutex<Vec<RBig>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![RBig::ZERO]))
}

fn exact_h(n: u64) -> RBig {
    let mut table = exact_harmonic_table().lock().unwrap();
    while (table.len() as u64) <= n {
        let k = table.len() as u64;
        let next = table.last().unwrap() + RBig::from_parts(IBig::ONE, UBig::from(k));
        table.push(next);
    }
    table[n as usize].clone()
}

fn ubig_ln(x: &UBig) -> f64 {
    Index::from_ubig(x.clone()).ln()
}

fn rbig_ln(x: &RBig) -> f64 {
    let num = x.numerator().clone().unsigned_abs();
    ubig_ln(&num) - ubig_ln(x.denominator())
}

impl Exact {
    pub fn new(x: RBig) -> Self {
        Exact(x)
    }

    pub fn ratio(num: u64, den: u64) -> Self {
        Exact(RBig::from_parts(IBig::from(num), UBig::from(den)))
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        RBig::try_from(x)
            .map(Exact)
            .map_err(|_| Error::Inexact(format!("{x} has no exact rational value")))
    }
}

impl Scalar for Exact {
    const MODE: NumericMode = NumericMode::Rational;
    type Acc = ExactSum;

    fn zero() -> Self {
        Exact(RBig::ZERO)
    }

    fn one() -> Self {
        Exact(RBig::ONE)
    }

    fn from_u64(n: u64) -> Self {
        Exact(RBig::from(n))
    }

    fn from_index(n: &Index) -> Self {
        Exact(RBig::from(n.as_ubig().clone()))
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Exact::ratio(num, den)
    }

    fn from_log(x: LogReal) -> Result<Self> {
        if x.is_zero() {
            return Ok(Exact::zero());
        }
        let v = x.value();
        if v == 0.0 || !v.is_finite() || v < f64::MIN_POSITIVE {
            return Err(Error::Inexact(format!(
                "e^{} is outside the double range used for rational values",
                x.ln()
            )));
        }
        Exact::from_f64(v)
    }

    fn from_exact(x: &Exact) -> Self {
        x.clone()
    }

    fn to_exact(&self) -> Result<Exact> {
        Ok(self.clone())
    }

    fn to_log(&self) -> LogReal {
        if self.0 == RBig::ZERO {
            return LogReal::ZERO;
        }
        let v = self.0.to_f64().value();
        if v.is_normal() {
            LogReal::new(v)
        } else {
            LogReal::from_ln(rbig_ln(&self.0))
        }
    }

    fn to_f64(&self) -> f64 {
        let v = self.0.to_f64().value();
        if v == 0.0 && self.0 != RBig::ZERO || !v.is_finite() {
            return rbig_ln(&self.0).exp();
        }
        v
    }

    fn add(&self, other: &Self) -> Self {
        Exact(&self.0 + &other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        Exact(&self.0 * &other.0)
    }

    fn div(&self, other: &Self) -> Self {
        Exact(&self.0 / &other.0)
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        if self.0 < other.0 {
            return Err(Error::Domain("negative difference in rational mode".into()));
        }
        Ok(Exact(&self.0 - &other.0))
    }

    fn sub_or_zero(&self, other: &Self, _tol: f64) -> Result<Self> {
        self.sub(other)
    }

    fn is_zero(&self) -> bool {
        self.0 == RBig::ZERO
    }

    fn harmonic(n: &Index) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Domain("harmonic number of 0".into()));
        }
        match n.to_u64() {
            Some(k) if k <= EXACT_HARMONIC_LIMIT => Ok(Exact(exact_h(k))),
            _ => Err(Error::Inexact(format!(
                "exact harmonic numbers are limited to n <= {EXACT_HARMONIC_LIMIT}, got {n}"
            ))),
        }
    }

    fn harmonic_diff(n: &Index, m: &Index) -> Result<Self> {
        let span = n
            .checked_sub(m)
            .ok_or_else(|| Error::Domain(format!("harmonic_diff with n = {n} < m = {m}")))?;
        if let Some(k) = n.to_u64() {
            if k <= EXACT_HARMONIC_LIMIT {
                let m = m.to_u64().unwrap();
                return Ok(Exact(exact_h(k) - exact_h(m)));
            }
        }
        match span.to_u64() {
            Some(s) if s <= EXACT_DIRECT_SPAN => {
                let mut sum = RBig::ZERO;
                for i in 1..=s {
                    let d = m.add_u64(i).as_ubig().clone();
                    sum += RBig::from_parts(IBig::ONE, d);
                }
                Ok(Exact(sum))
            }
            _ => Err(Error::Inexact(format!(
                "exact H_n - H_m needs n <= {EXACT_HARMONIC_LIMIT} or n - m <= {EXACT_DIRECT_SPAN}"
            ))),
        }
    }

    fn slack(lhs: &Self, rhs: &Self) -> f64 {
        if lhs == rhs {
            return 0.0;
        }
        let (l, r) = (lhs.0.to_f64().value(), rhs.0.to_f64().value());
        if l.is_normal() && r.is_normal() {
            let v = (r - l) / l.max(r);
            if v.abs() > 1e-12 && (v > 0.0) == (lhs.0 < rhs.0) {
                return v;
            }
        }
        let scale = if lhs.0 > rhs.0 { &lhs.0 } else { &rhs.0 };
        let d = &rhs.0 - &lhs.0;
        let v = (&d / scale).to_f64().value();
        if v == 0.0 {
            if d > RBig::ZERO {
                f64::MIN_POSITIVE
            } else {
                -f64::MIN_POSITIVE
            }
        } else {
            v
        }
    }

    fn rel_diff(a: &Self, b: &Self) -> f64 {
        Exact::slack(a, b).abs()
    }
}

#[derive(Clone, Debug)]
pub struct ExactSum(RBig);

impl Default for ExactSum {
    fn default() -> Self {
        ExactSum(RBig::ZERO)
    }
}

impl Accumulator<Exact> for ExactSum {
    fn push(&mut self, x: &Exact) {
        self.0 += &x.0;
    }

    fn total(&self) -> Exact {
        Exact(self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_harmonic_values() {
        assert_eq!(Exact::harmonic(&Index::new(4)).unwrap(), Exact::ratio(25, 12));
        assert_eq!(
            Exact::harmonic_diff(&Index::new(4), &Index::new(2)).unwrap(),
            Exact::ratio(7, 12)
        );
        assert!(Exact::harmonic(&Index::new(EXACT_HARMONIC_LIMIT + 1)).is_err());
    }

    #[test]
    fn exact_harmonic_diff_at_large_offsets_sums_directly() {
        let m = Index::new(1_000_000_000);
        let d = Exact::harmonic_diff(&m.add_u64(2), &m).unwrap();
        let want = Exact::ratio(1, 1_000_000_001).add(&Exact::ratio(1, 1_000_000_002));
        assert_eq!(d, want);
    }

    #[test]
    fn lifted_logs_are_exact_doubles() {
        let ln = LogReal::new(0.1);
        let x = Exact::from_log(ln).unwrap();
        assert_eq!(x.0, RBig::try_from(ln.value()).unwrap());
        assert!(Exact::from_log(LogReal::from_ln(-800.0)).is_err());
        assert_eq!(Exact::from_log(LogReal::ZERO).unwrap(), Exact::zero());
    }

    #[test]
    fn slack_sign_is_exact() {
        let a = Exact::ratio(1, 3);
        let b = a.add(&Exact(RBig::from_parts(IBig::ONE, UBig::from(10u8).pow(400))));
        assert!(Exact::slack(&a, &b) > 0.0);
        assert!(Exact::slack(&b, &a) < 0.0);
        assert_eq!(Exact::slack(&a, &a), 0.0);
    }

    #[test]
    fn log_slack_matches_linear() {
        let l = LogReal::new(2.0);
        let r = LogReal::new(3.0);
        assert!((LogReal::slack(&l, &r) - 1.0 / 3.0).abs() < 1e-15);
        assert!((LogReal::slack(&r, &l) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exact_ln_of_tiny_values() {
        let tiny = Exact(RBig::from_parts(IBig::ONE, UBig::from(10u8).pow(500)));
        assert!((tiny.ln() + 500.0 * std::f64::consts::LN_10).abs() < 1e-10);
        assert!(tiny.to_f64() == 0.0);
    }

    #[test]
    fn backends_agree_on_sums() {
        let xs: Vec<u64> = (1..=50).collect();
        let l = LogReal::sum(xs.iter().map(|&n| LogReal::from_ratio(1, n)).collect::<Vec<_>>().iter());
        let e = Exact::sum(xs.iter().map(|&n| Exact::ratio(1, n)).collect::<Vec<_>>().iter());
        assert!((l.value() - e.to_f64()).abs() < 1e-14);
    }
}
