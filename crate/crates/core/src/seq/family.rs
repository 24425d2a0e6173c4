//! Named closed-form sequence families.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{harmonic, Index, LogReal, EULER_GAMMA};

/// Index at which power sums switch from the explicit sum to the Euler-Maclaurin tail.
const POWER_SUM_ANCHOR: u64 = 1000;

/// A nonincreasing closed-form family evaluable at any index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `n^{-p}`.
    Power { p: f64 },
    /// `(ln n)^p (ln ln n)^q / n`, held constant before it starts decreasing.
    LogPower { p: f64, q: f64 },
    /// `exp(∫_{e^e}^n dt/(t ln ln t)) / (n (ln ln n)^2)`, constant before `n = 3`.
    IteratedLog,
    /// The constant `e^{ln_value}`; not a null sequence.
    Constant { ln_value: f64 },
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Power { p } if !(p > 0.0 && p.is_finite()) => {
                Err(Error::Domain(format!("power family needs p > 0, got {p}")))
            }
            Family::LogPower { p, q } if !(p >= 0.0 && q >= 0.0 && p.is_finite() && q.is_finite()) => Err(
                Error::Domain(format!("log-power family needs p, q >= 0, got p = {p}, q = {q}")),
            ),
            Family::Constant { ln_value } if !ln_value.is_finite() => {
                Err(Error::Domain("constant family needs a positive finite value".into()))
            }
            _ => Ok(()),
        }
    }

    /// First index from which the defining formula is used; earlier entries repeat its value.
    pub fn monotone_start(&self) -> u64 {
        match *self {
            Family::Power { .. } | Family::Constant { .. } => 1,
            Family::IteratedLog => 3,
            Family::LogPower { p, q } => log_power_start(p, q),
        }
    }

    pub fn is_null(&self) -> bool {
        !matches!(self, Family::Constant { .. })
    }

    /// Whether `Σ s_n < ∞`; known analytically for every family.
    pub fn is_summable(&self) -> bool {
        matches!(*self, Family::Power { p } if p > 1.0)
    }

    pub fn eval(&self, n: &Index) -> LogReal {
        let start = self.monotone_start();
        let ln_n = if *n < Index::new(start) {
            (start as f64).ln()
        } else {
            n.ln()
        };
        LogReal::from_ln(self.ln_value_at(ln_n))
    }

    fn ln_value_at(&self, ln_n: f64) -> f64 {
        match *self {
            Family::Power { p } => -p * ln_n,
            Family::LogPower { p, q } => {
                let mut v = -ln_n;
                if p != 0.0 {
                    v += p * ln_n.ln();
                }
                if q != 0.0 {
                    v += q * ln_n.ln().ln();
                }
                v
            }
            Family::IteratedLog => {
                let lnln = ln_n.ln();
                li_of_exp(lnln) - li_of_exp(1.0) - ln_n - 2.0 * lnln.ln()
            }
            Family::Constant { ln_value } => ln_value,
        }
    }

    /// Exact rational value `num/den` when the entry is rational and fits in `u64`.
    pub fn exact_ratio(&self, n: u64) -> Option<(u64, u64)> {
        match *self {
            Family::Power { p: 1.0 } => Some((1, n)),
            Family::Power { p: 2.0 } => n.checked_mul(n).map(|d| (1, d)),
            Family::Power { p: 3.0 } => n.checked_mul(n)?.checked_mul(n).map(|d| (1, d)),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Family::Power { p: 1.0 } => "omega".into(),
            Family::Power { p } => format!("omega^{p}"),
            Family::LogPower { p, q: 0.0 } => format!("log^{p}(n)/n"),
            Family::LogPower { p, q } => format!("log^{p}(n)*loglog^{q}(n)/n"),
            Family::IteratedLog => "iterated-log".into(),
            Family::Constant { ln_value } => format!("constant(e^{ln_value})"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Smallest integer `n >= 3` from which `(ln x)^p (ln ln x)^q / x` is decreasing.
fn log_power_start(p: f64, q: f64) -> u64 {
    // decreasing where g(t) = p/t + q/(t ln t) <= 1, t = ln x; g decreases on t > 1
    let g = |t: f64| p / t + if q == 0.0 { 0.0 } else { q / (t * t.ln()) };
    let t_star = if q == 0.0 {
        p
    } else {
        let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
        while g(hi) > 1.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    (t_star.exp().ceil() as u64).max(3)
}

/// `li(e^u)` for `u > 0`, from the series `γ + ln u + Σ u^k/(k·k!)`.
fn li_of_exp(u: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..1000 {
        term *= u / k as f64;
        let add = term / k as f64;
        sum += add;
        if add < 1e-17 * sum {
            break;
        }
    }
    EULER_GAMMA + u.ln() + sum
}

/// Partial sums of `n^{-p}` at any index.
///
/// Exact summation up to a fixed anchor, then the Euler-Maclaurin expansion
/// with the anchor fixing the constant. The same scheme gives the sums
/// `Σ_{k≤n} P(k)/k` of the running means, which drive the second mean.
#[derive(Clone, Copy, Debug)]
pub struct PowerSums {
    p: f64,
    constant: f64,
    /// Constants of the convergent sums of `k^{-p-1}`, `k^{-p-2}`, `k^{-p-4}`.
    shifted: [f64; 3],
    /// Offset of the closed form for `Σ_{k≤n} P(k)/k`.
    second: f64,
}

/// `Σ_{i ≤ anchor} i^{-p}`, compensated.
fn anchor_sum(p: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in (1..=POWER_SUM_ANCHOR).rev() {
        let t = (i as f64).powf(-p);
        let s = sum + t;
        comp += if sum >= t { (sum - s) + t } else { (t - s) + sum };
        sum = s;
    }
    sum + comp
}

fn anchor_constant(p: f64) -> f64 {
    if p == 1.0 {
        return 0.0;
    }
    let n0 = POWER_SUM_ANCHOR as f64;
    anchor_sum(p) - n0.powf(1.0 - p) * tail_bracket(p, n0.ln())
}

/// `Σ_{i≤n} i^{-q}` for `q > 1` from its constant.
fn convergent_sum(q: f64, constant: f64, ln_n: f64) -> f64 {
    constant + ((1.0 - q) * ln_n).exp() * tail_bracket(q, ln_n)
}

const C4_SHIFT: f64 = 4.0;

impl PowerSums {
    pub fn new(p: f64) -> Self {
        let constant = anchor_constant(p);
        let shifted = [anchor_constant(p + 1.0), anchor_constant(p + 2.0), anchor_constant(p + C4_SHIFT)];
        let mut sums = PowerSums { p, constant, shifted, second: 0.0 };
        if p != 1.0 {
            let mut running = 0.0f64;
            let mut total = 0.0f64;
            for k in 1..=POWER_SUM_ANCHOR {
                running += (k as f64).powf(-p);
                total += running / k as f64;
            }
            let a = Index::new(POWER_SUM_ANCHOR);
            sums.second = total - sums.second_rest(&a);
        }
        sums
    }

    /// The non-constant part of the closed form for `Σ_{k≤n} P(k)/k`, valid past the anchor.
    fn second_rest(&self, n: &Index) -> f64 {
        self.second_minor(n) + self.sum(n).value() / (1.0 - self.p)
    }

    /// [`Self::second_rest`] without its `P(n)/(1-p)` term.
    fn second_minor(&self, n: &Index) -> f64 {
        let p = self.p;
        let ln_n = n.ln();
        let h = harmonic(n).expect("n >= 1");
        let c4 = p * (p + 1.0) * (p + 2.0) / 720.0;
        self.constant * h
            + 0.5 * convergent_sum(p + 1.0, self.shifted[0], ln_n)
            - p / 12.0 * convergent_sum(p + 2.0, self.shifted[1], ln_n)
            + c4 * convergent_sum(p + C4_SHIFT, self.shifted[2], ln_n)
    }

    /// `Σ_{i≤n} i^{-p}`; accurate for `n` past the anchor, usable everywhere.
    pub fn sum(&self, n: &Index) -> LogReal {
        let p = self.p;
        if p == 1.0 {
            return LogReal::new(harmonic(n).expect("n >= 1"));
        }
        let ln_n = n.ln();
        if p < 1.0 {
            // S_n = n^{1-p} (bracket + C n^{p-1})
            let scaled = tail_bracket(p, ln_n) + self.constant * ((p - 1.0) * ln_n).exp();
            LogReal::from_ln((1.0 - p) * ln_n + scaled.ln())
        } else {
            let tail = ((1.0 - p) * ln_n).exp() * tail_bracket(p, ln_n);
            LogReal::new(self.constant + tail)
        }
    }

    /// `(1/n) Σ_{i≤n} i^{-p}`.
    pub fn mean(&self, n: &Index) -> LogReal {
        self.sum(n).div(LogReal::from_ln(n.ln()))
    }

    /// The second mean `(1/n) Σ_{k≤n} P(k)/k`, for `n` past the anchor.
    pub fn second_mean(&self, n: &Index) -> LogReal {
        let p = self.p;
        let ln_n = n.ln();
        let total = if p == 1.0 {
            let h = harmonic(n).expect("n >= 1");
            LogReal::new(0.5 * (h * h + convergent_sum(2.0, self.shifted[0], ln_n)))
        } else if p < 1.0 {
            // every term except the P(n) one is o(n^{1-p}); scale before adding
            let scale = ((p - 1.0) * ln_n).exp();
            let rest = self.second_minor(n);
            let lead = (tail_bracket(p, ln_n) + self.constant * scale) / (1.0 - p);
            let scaled = lead + (self.second + rest) * scale;
            LogReal::from_ln((1.0 - p) * ln_n + scaled.ln())
        } else {
            LogReal::new(self.second + self.second_rest(n))
        };
        total.div(LogReal::from_ln(ln_n))
    }
}

/// `F_p(x) / x^{1-p}` for the Euler-Maclaurin antiderivative `F_p`.
fn tail_bracket(p: f64, ln_x: f64) -> f64 {
    let inv = (-ln_x).exp();
    let inv2 = inv * inv;
    let c4 = p * (p + 1.0) * (p + 2.0) / 720.0;
    let c6 = p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) / 30240.0;
    1.0 / (1.0 - p) + 0.5 * inv - p / 12.0 * inv2 + c4 * inv2 * inv2 - c6 * inv2 * inv2 * inv2
}
