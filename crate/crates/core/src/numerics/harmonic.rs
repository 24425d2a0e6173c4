use std::fs;
use std::path::PathBuf;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::Index;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const DEFAULT_EXACT_LIMIT: u64 = 1_000_000;

// Below this index, differences go through the table; above it the
// ln-ratio anchored expansion is more accurate than subtracting two sums.
const TABLE_DIFF_BELOW: u64 = 1000;
const DIRECT_SPAN: u64 = 32;

/// Harmonic numbers at arbitrary indices: a compensated prefix table up to
/// `exact_limit` and the Euler-Maclaurin expansion beyond it.
#[derive(Debug, Clone)]
pub struct HarmonicEngine {
    limit: u64,
    table: Vec<f64>,
}

impl HarmonicEngine {
    pub fn new(limit: u64) -> Self {
        HarmonicEngine {
            limit,
            table: build_table(limit),
        }
    }

    /// Like [`HarmonicEngine::new`], but reads the table from `dir` when a
    /// matching file exists and writes it there otherwise.
    pub fn with_cache_dir(limit: u64, dir: Option<PathBuf>) -> Self {
        let Some(dir) = dir else {
            return Self::new(limit);
        };
        let path = dir.join(format!("harmonic-{limit}.bin"));
        if let Ok(bytes) = fs::read(&path) {
            if bytes.len() == 8 * (limit as usize + 1) {
                let table = bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                return HarmonicEngine { limit, table };
            }
        }
        let engine = Self::new(limit);
        let bytes: Vec<u8> = engine.table.iter().flat_map(|x| x.to_le_bytes()).collect();
        // a cache that cannot be written is just a cache miss next time
        let _ = fs::create_dir_all(&dir).and_then(|_| fs::write(&path, bytes));
        engine
    }

    pub fn exact_limit(&self) -> u64 {
        self.limit
    }

    pub fn harmonic(&self, n: &Index) -> Result<f64> {
        if n.is_zero() {
            return Err(Error::Domain("harmonic number of 0".into()));
        }
        match n.to_u64() {
            Some(k) if k <= self.limit => Ok(self.table[k as usize]),
            _ => Ok(asymptotic(n)),
        }
    }

    pub fn harmonic_u64(&self, n: u64) -> f64 {
        self.harmonic(&Index::new(n)).expect("harmonic of 0")
    }

    /// `H_n - H_m` without cancellation.
    pub fn harmonic_diff(&self, n: &Index, m: &Index) -> Result<f64> {
        if m.is_zero() {
            return self.harmonic(n);
        }
        let span = n
            .checked_sub(m)
            .ok_or_else(|| Error::Domain(format!("harmonic_diff with n = {n} < m = {m}")))?;
        if span.is_zero() {
            return Ok(0.0);
        }
        if span <= Index::new(DIRECT_SPAN) {
            let span = span.to_u64().unwrap();
            let mut sum = 0.0;
            for i in (1..=span).rev() {
                sum += 1.0 / m.add_u64(i).to_f64();
            }
            return Ok(sum);
        }
        if *m < Index::new(TABLE_DIFF_BELOW) {
            let hm = self.table.get(m.to_usize().unwrap()).copied().unwrap_or_else(|| asymptotic(m));
            return Ok(self.harmonic(n)? - hm);
        }
        Ok(asymptotic_diff(n, m, &span))
    }
}

fn build_table(limit: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(limit as usize + 1);
    table.push(0.0);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 1..=limit {
        let t = 1.0 / k as f64;
        let s = sum + t;
        if sum.abs() >= t {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
        table.push(sum + comp);
    }
    table
}

fn asymptotic(n: &Index) -> f64 {
    let x = n.to_f64();
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    n.ln() + EULER_GAMMA + 0.5 * inv - inv2 / 12.0 + inv2 * inv2 / 120.0 - inv2 * inv2 * inv2 / 252.0
}

// Every term is proportional to u = (n - m)/n, so relative precision survives
// even when n and m agree to many digits.
fn asymptotic_diff(n: &Index, m: &Index, span: &Index) -> f64 {
    let u = span.ratio_f64(n);
    let mf = m.to_f64();
    let mf2 = mf * mf;
    let q = 1.0 - u;
    let t1 = -u / (2.0 * mf);
    let t2 = u * (2.0 - u) / (12.0 * mf2);
    let t3 = -(1.0 - q.powi(4)) / (120.0 * mf2 * mf2);
    let t4 = (1.0 - q.powi(6)) / (252.0 * mf2 * mf2 * mf2);
    n.ln_ratio(m) + t1 + t2 + t3 + t4
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("AMSEQ_CACHE_DIR").map(PathBuf::from)
}

/// The process-wide engine with the default table size, built on first use.
pub fn harmonic_engine() -> &'static HarmonicEngine {
    static ENGINE: OnceLock<HarmonicEngine> = OnceLock::new();
    ENGINE.get_or_init(|| HarmonicEngine::with_cache_dir(DEFAULT_EXACT_LIMIT, cache_dir()))
}

pub fn harmonic(n: &Index) -> Result<f64> {
    harmonic_engine().harmonic(n)
}

pub fn harmonic_diff(n: &Index, m: &Index) -> Result<f64> {
    harmonic_engine().harmonic_diff(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: u64) -> f64 {
        harmonic(&Index::new(n)).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(h(1), 1.0);
        assert!((h(4) - 25.0 / 12.0).abs() < 1e-15);
        assert!(harmonic(&Index::zero()).is_err());
    }

    #[test]
    fn differences() {
        let d = harmonic_diff(&Index::new(5), &Index::new(5)).unwrap();
        assert_eq!(d, 0.0);
        let d = harmonic_diff(&Index::new(4), &Index::new(2)).unwrap();
        assert!((d - 7.0 / 12.0).abs() < 1e-15);
        assert!(harmonic_diff(&Index::new(2), &Index::new(4)).is_err());
    }

    #[test]
    fn asymptotic_agrees_with_table_at_crossover() {
        let engine = harmonic_engine();
        for n in [1_000u64, 10_000, 999_999, 1_000_000] {
            let exact = engine.harmonic_u64(n);
            let asym = asymptotic(&Index::new(n));
            assert!(((exact - asym) / exact).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn huge_index_matches_leading_terms() {
        let n = Index::new(1_000_000_000_000);
        let want = (1e12f64).ln() + EULER_GAMMA + 0.5e-12;
        assert!((h_idx(&n) - want).abs() / want < 1e-15);
    }

    fn h_idx(n: &Index) -> f64 {
        harmonic(n).unwrap()
    }

    #[test]
    fn diff_of_close_big_indices_keeps_relative_precision() {
        let m: Index = "1e30".parse().unwrap();
        let n = m.add_u64(1000);
        let d = harmonic_diff(&n, &m).unwrap();
        // sum of 1000 terms each ~1e-30
        assert!((d / 1e-27 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diff_paths_agree_near_their_boundaries() {
        let engine = harmonic_engine();
        for (n, m) in [(1100u64, 1000u64), (5000, 1033), (40, 7), (2000, 1967), (2000, 1968)] {
            let via_table = engine.harmonic_u64(n) - engine.harmonic_u64(m);
            let got = engine.harmonic_diff(&Index::new(n), &Index::new(m)).unwrap();
            assert!(((got - via_table) / got).abs() < 1e-11, "({n}, {m})");
        }
    }

    #[test]
    fn cache_file_roundtrip() {
        let dir = std::env::temp_dir().join(format!("amseq-harmonic-{}", std::process::id()));
        let a = HarmonicEngine::with_cache_dir(5000, Some(dir.clone()));
        let b = HarmonicEngine::with_cache_dir(5000, Some(dir.clone()));
        assert_eq!(a.table, b.table);
        let _ = fs::remove_dir_all(dir);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn harmonic_bounds(n in 2u64..u64::MAX / 2) {
                let hn = h(n);
                let ln = (n as f64).ln();
                prop_assert!(1.0 / n as f64 + ln < hn && hn < 1.0 + ln);
            }

            #[test]
            fn difference_bounds(m in 1u64..10_000_000_000, span in 1u64..1_000_000_000_000) {
                let n = m + span;
                let d = harmonic_diff(&Index::new(n), &Index::new(m)).unwrap();
                let lower = (span as f64 / (m + 1) as f64).ln_1p();
                let upper = (span as f64 / m as f64).ln_1p();
                prop_assert!(lower < d && d < upper, "n = {}, m = {}", n, m);
            }
        }
    }
}
