use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use dashu_base::BitTest;
use dashu_int::UBig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

// Cody-Waite split of ln 2: the high part has enough trailing zero bits that
// q * LN2_HI is exact for |q| < 2^11.
const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// Unbounded nonnegative integer used for sequence positions and breakpoints.
///
/// Serializes as a decimal string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Index(UBig);

impl Index {
    pub fn new(n: u64) -> Self {
        Index(UBig::from(n))
    }

    pub fn zero() -> Self {
        Index(UBig::ZERO)
    }

    pub fn one() -> Self {
        Index(UBig::ONE)
    }

    pub fn from_ubig(n: UBig) -> Self {
        Index(n)
    }

    pub fn as_ubig(&self) -> &UBig {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == UBig::ZERO
    }

    pub fn bits(&self) -> usize {
        self.0.bit_len()
    }

    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }

    pub fn to_usize(&self) -> Option<usize> {
        usize::try_from(&self.0).ok()
    }

    /// Nearest double; `+inf` past `f64::MAX`.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    /// Natural logarithm, `-inf` for zero. Accurate to a few ulps at any magnitude.
    pub fn ln(&self) -> f64 {
        let bits = self.bits();
        if bits == 0 {
            return f64::NEG_INFINITY;
        }
        if bits <= 64 {
            return (self.to_u64().unwrap() as f64).ln();
        }
        let shift = bits - 64;
        let top = u64::try_from(&(&self.0 >> shift)).unwrap();
        (top as f64).ln() + shift as f64 * LN_2
    }

    pub fn log10(&self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }

    /// `self / other` as a double, exact to rounding when both are of similar size.
    pub fn ratio_f64(&self, other: &Index) -> f64 {
        let top = self.bits().max(other.bits());
        if top <= 1000 {
            return self.to_f64() / other.to_f64();
        }
        let shift = top - 1000;
        let a = (&self.0 >> shift).to_f64().value();
        let b = (&other.0 >> shift).to_f64().value();
        if b == 0.0 {
            return (self.ln() - other.ln()).exp();
        }
        a / b
    }

    /// `ln(self / other)` without cancellation when the two are close.
    pub fn ln_ratio(&self, other: &Index) -> f64 {
        match self.cmp(other) {
            Ordering::Equal => 0.0,
            Ordering::Greater => {
                let d = Index(&self.0 - &other.0);
                let rel = d.ratio_f64(other);
                if rel < 0.5 {
                    rel.ln_1p()
                } else {
                    self.ln() - other.ln()
                }
            }
            Ordering::Less => -other.ln_ratio(self),
        }
    }

    pub fn add_u64(&self, k: u64) -> Index {
        Index(&self.0 + UBig::from(k))
    }

    pub fn sub_u64(&self, k: u64) -> Option<Index> {
        let k = UBig::from(k);
        if self.0 < k {
            None
        } else {
            Some(Index(&self.0 - k))
        }
    }

    pub fn checked_sub(&self, other: &Index) -> Option<Index> {
        if self.0 < other.0 {
            None
        } else {
            Some(Index(&self.0 - &other.0))
        }
    }

    pub fn add(&self, other: &Index) -> Index {
        Index(&self.0 + &other.0)
    }

    pub fn mul_u64(&self, k: u64) -> Index {
        Index(&self.0 * UBig::from(k))
    }

    pub fn mul(&self, other: &Index) -> Index {
        Index(&self.0 * &other.0)
    }

    /// Floor of `self / 2`.
    pub fn half(&self) -> Index {
        Index(&self.0 >> 1)
    }

    pub fn div_floor(&self, other: &Index) -> Index {
        Index(&self.0 / &other.0)
    }

    /// `ceil(self / m)`.
    pub fn div_ceil_u64(&self, m: u64) -> Index {
        let m = UBig::from(m);
        let q = &self.0 / &m;
        if &q * &m == self.0 {
            Index(q)
        } else {
            Index(q + UBig::ONE)
        }
    }

    /// Midpoint of `[lo, hi]`, rounded down.
    pub fn midpoint(lo: &Index, hi: &Index) -> Index {
        Index((&lo.0 + &hi.0) >> 1)
    }

    /// `floor(fl(e^x))` where `fl(e^x)` is the double-precision value of `e^x`.
    pub fn floor_exp(x: f64) -> Index {
        Index::one().floor_mul_exp(x).0
    }

    /// `floor(self * fl(e^x))`, computed exactly from the dyadic value of the
    /// rounded exponential. The flag reports a fractional part within `1e-9`
    /// of an integer, in which case the floor is resolved downward.
    pub fn floor_mul_exp(&self, x: f64) -> (Index, bool) {
        let (mantissa, exp2) = exp_as_dyadic(x);
        let product = &self.0 * UBig::from(mantissa);
        if exp2 >= 0 {
            return (Index(product << exp2 as usize), true);
        }
        let shift = (-exp2) as usize;
        let floor = &product >> shift;
        let rem = &product - (&floor << shift);
        // fractional part = rem / 2^shift
        let frac = if shift > 1000 {
            let s = shift - 1000;
            (&rem >> s).to_f64().value() / 2f64.powi(1000)
        } else {
            rem.to_f64().value() / 2f64.powi(shift as i32)
        };
        let ambiguous = !(1e-9..=1.0 - 1e-9).contains(&frac);
        (Index(floor), ambiguous)
    }

    /// Smallest index strictly greater than `e^x`, computed from an upward-rounded
    /// double so the bound holds despite rounding.
    pub fn above_exp(x: f64) -> Index {
        let (mantissa, exp2) = exp_as_dyadic(x);
        // inflate by a few ulps to dominate the rounding error of the dyadic value
        let inflated = UBig::from(mantissa) + UBig::from(8u8);
        let v = if exp2 >= 0 {
            inflated << exp2 as usize
        } else {
            inflated >> (-exp2) as usize
        };
        Index(v + UBig::ONE)
    }

    /// Largest index `<= e^x` with `e^x` taken at double precision.
    pub fn from_ln_floor(x: f64) -> Index {
        if x < 0.0 {
            return Index::zero();
        }
        Index::floor_exp(x)
    }
}

/// Decompose `e^x` (as a rounded double) into `mantissa * 2^exp2` with a 53-bit mantissa.
/// Valid for any finite `x`; beyond the double range the result is still the exact
/// dyadic value of `exp(r) * 2^q` with `x = q ln 2 + r`.
pub fn exp_as_dyadic(x: f64) -> (u64, i64) {
    let q = (x / LN_2).floor();
    let r = (x - q * LN2_HI) - q * LN2_LO;
    let mut m = r.exp();
    let mut q = q as i64;
    // guard the reduction landing just outside [0, ln 2)
    while m >= 2.0 {
        m /= 2.0;
        q += 1;
    }
    while m < 1.0 {
        m *= 2.0;
        q -= 1;
    }
    let mantissa = (m * (1u64 << 52) as f64) as u64;
    (mantissa, q - 52)
}

impl From<u64> for Index {
    fn from(n: u64) -> Self {
        Index::new(n)
    }
}

impl From<usize> for Index {
    fn from(n: usize) -> Self {
        Index::new(n as u64)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Index {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((mant, exp)) = s.split_once(['e', 'E']) {
            let mant: u64 = mant.parse().map_err(|_| Error::Parse(format!("bad index '{s}'")))?;
            let exp: usize = exp.parse().map_err(|_| Error::Parse(format!("bad index '{s}'")))?;
            return Ok(Index(UBig::from(mant) * UBig::from(10u8).pow(exp)));
        }
        UBig::from_str_radix(s, 10)
            .map(Index)
            .map_err(|_| Error::Parse(format!("bad index '{s}'")))
    }
}

impl Serialize for Index {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Index {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Num(u64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Num(n) => Ok(Index::new(n)),
        }
    }
}
