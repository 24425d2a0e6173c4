use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative gap below which a difference of two nearly equal values is treated as lost to rounding.
pub const DEGENERATE_GAP: f64 = 1e-14;

/// A nonnegative extended real stored as its natural logarithm.
///
/// `-inf` encodes zero, so products and quotients never overflow or underflow
/// for operands whose logarithms are finite doubles.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LogReal(f64);

/// `ln(e^a + e^b)` without overflow, absorbing `-inf`.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a - e^b)` for `a >= b`; `-inf` when they are equal.
pub fn log_sub(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == b {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp_m1()).ln()
}

#[allow(clippy::should_implement_trait)]
impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "log value is NaN");
        LogReal(ln)
    }

    /// From a nonnegative linear value.
    pub fn new(x: f64) -> Self {
        debug_assert!(x >= 0.0, "negative value {x}");
        LogReal(x.ln())
    }

    pub fn from_u64(n: u64) -> Self {
        LogReal((n as f64).ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// Linear value; underflows to 0 and overflows to `inf` outside the double range.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn add(self, other: LogReal) -> LogReal {
        LogReal(log_add(self.0, other.0))
    }

    pub fn mul(self, other: LogReal) -> LogReal {
        if self.is_zero() || other.is_zero() {
            return LogReal::ZERO;
        }
        LogReal(self.0 + other.0)
    }

    pub fn div(self, other: LogReal) -> LogReal {
        if self.is_zero() {
            return LogReal::ZERO;
        }
        LogReal(self.0 - other.0)
    }

    pub fn powf(self, p: f64) -> LogReal {
        if self.is_zero() {
            return if p == 0.0 { LogReal::ONE } else { LogReal::ZERO };
        }
        LogReal(self.0 * p)
    }

    pub fn recip(self) -> LogReal {
        LogReal(-self.0)
    }

    /// `|a - b| / max(a, b)`, computed without cancellation.
    pub fn rel_gap(self, other: LogReal) -> f64 {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if hi == f64::NEG_INFINITY {
            return 0.0;
        }
        -(lo - hi).exp_m1()
    }

    /// `self - other`, refusing a negative result and flagging differences that
    /// drown in rounding (operands within [`DEGENERATE_GAP`] of each other).
    pub fn checked_sub(self, other: LogReal) -> Result<LogReal> {
        if other.is_zero() {
            return Ok(self);
        }
        if self.0 == other.0 {
            return Ok(LogReal::ZERO);
        }
        if self.0 < other.0 {
            return Err(Error::Domain(format!(
                "negative difference: e^{} - e^{}",
                self.0, other.0
            )));
        }
        if self.rel_gap(other) < DEGENERATE_GAP {
            return Err(Error::Degenerate(format!(
                "e^{} - e^{} cancels to below {DEGENERATE_GAP:e} relative",
                self.0, other.0
            )));
        }
        Ok(LogReal(log_sub(self.0, other.0)))
    }

    /// `max(self - other, 0)` where a relative gap below `tol` (either sign) counts as zero.
    pub fn sub_or_zero(self, other: LogReal, tol: f64) -> Result<LogReal> {
        if self.rel_gap(other) <= tol {
            return Ok(LogReal::ZERO);
        }
        if self.0 < other.0 {
            return Err(Error::Domain(format!(
                "negative difference: e^{} - e^{}",
                self.0, other.0
            )));
        }
        Ok(LogReal(log_sub(self.0, other.0)))
    }
}

impl Eq for LogReal {}

impl Ord for LogReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).unwrap_or_else(|| self.0.total_cmp(&other.0))
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.abs() < 700.0 || self.is_zero() {
            write!(f, "{}", self.value())
        } else {
            write!(f, "e^{}", self.0)
        }
    }
}

impl Serialize for LogReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else {
            serializer.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for LogReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(x) => Ok(LogReal(x)),
            Repr::Str(s) if s == "-inf" => Ok(LogReal::ZERO),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad log value '{s}'"))),
        }
    }
}

/// Compensated running sum of log-domain terms.
///
/// Terms are added in linear scale relative to the largest term seen so far
/// (Neumaier summation), so a sum of a million terms keeps near full precision.
#[derive(Clone, Debug)]
pub struct LogSum {
    scale: f64,
    sum: f64,
    comp: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum {
            scale: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
        }
    }
}

impl LogSum {
    pub fn push(&mut self, x: LogReal) {
        if x.is_zero() {
            return;
        }
        if self.scale == f64::NEG_INFINITY {
            self.scale = x.0;
            self.sum = 1.0;
            return;
        }
        if x.0 > self.scale {
            let f = (self.scale - x.0).exp();
            self.sum *= f;
            self.comp *= f;
            self.scale = x.0;
        }
        let t = (x.0 - self.scale).exp();
        let s = self.sum + t;
        if self.sum.abs() >= t.abs() {
            self.comp += (self.sum - s) + t;
        } else {
            self.comp += (t - s) + self.sum;
        }
        self.sum = s;
    }

    pub fn total(&self) -> LogReal {
        if self.scale == f64::NEG_INFINITY {
            return LogReal::ZERO;
        }
        LogReal(self.scale + (self.sum + self.comp).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn additive_identity_and_doubling() {
        assert_eq!(LogReal::ONE.add(LogReal::ZERO), LogReal::ONE);
        let two = LogReal::new(2.0);
        assert!((two.add(two).ln() - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn tiny_addend_survives() {
        let got = LogReal::ONE.add(LogReal::new(1e-300));
        assert!(got.ln() > 0.0);
        assert!((got.ln() / 1e-300 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn add_matches_linear_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = rng.gen_range(-300.0..300.0) * std::f64::consts::LN_10;
            let b = rng.gen_range(-300.0..300.0) * std::f64::consts::LN_10;
            let got = LogReal::from_ln(a).add(LogReal::from_ln(b)).value();
            let want = a.exp() + b.exp();
            assert!(((got - want) / want).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn ordering_matches_linear_values() {
        let xs = [0.0, 1e-300, 0.5, 1.0, 3.0];
        for &x in &xs {
            for &y in &xs {
                assert_eq!(LogReal::new(x) < LogReal::new(y), x < y);
            }
        }
    }

    #[test]
    fn subtraction_guards() {
        let a = LogReal::new(3.0);
        let b = LogReal::new(1.0);
        assert!((a.checked_sub(b).unwrap().value() - 2.0).abs() < 1e-15);
        assert!(b.checked_sub(a).is_err());
        assert_eq!(a.checked_sub(a).unwrap(), LogReal::ZERO);
        let c = LogReal::from_ln(1.0 + 1e-16);
        assert!(matches!(
            c.checked_sub(LogReal::from_ln(1.0)),
            Ok(_) | Err(Error::Degenerate(_))
        ));
        let d = LogReal::from_ln(4e-15);
        assert!(matches!(d.checked_sub(LogReal::ONE), Err(Error::Degenerate(_))));
        assert_eq!(d.sub_or_zero(LogReal::ONE, 1e-12).unwrap(), LogReal::ZERO);
    }

    #[test]
    fn log_sum_is_accurate_over_many_terms() {
        let mut acc = LogSum::default();
        for n in 1..=1_000_000u64 {
            acc.push(LogReal::from_u64(n).recip());
        }
        let h = 14.392_726_722_865_724;
        assert!((acc.total().value() - h).abs() / h < 1e-15);
    }

    #[test]
    fn log_sum_rescales_on_larger_terms() {
        let mut acc = LogSum::default();
        acc.push(LogReal::from_ln(-1000.0));
        acc.push(LogReal::from_ln(5.0));
        acc.push(LogReal::from_ln(5.0));
        assert!((acc.total().ln() - (5.0 + 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn serde_roundtrip_including_zero() {
        let s = serde_json::to_string(&vec![LogReal::ZERO, LogReal::from_ln(-3.5)]).unwrap();
        assert_eq!(s, "[\"-inf\",-3.5]");
        let back: Vec<LogReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![LogReal::ZERO, LogReal::from_ln(-3.5)]);
    }
}
