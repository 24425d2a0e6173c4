use serde::{Deserialize, Serialize};

use crate::numerics::Index;

/// Finite-horizon evidence about whether a quantity stays bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Bounded,
    Unbounded,
    Inconclusive,
}

/// Growth per unit of `ln n` must keep at least this fraction of its earlier
/// rate for a trend to count as unbounded.
pub const KEEP_FRACTION: f64 = 0.5;

/// Growth per unit of `ln n` that falls below this fraction of its earlier
/// rate counts as levelling off.
pub const DECAY_FRACTION: f64 = 0.2;

/// Three geometric checkpoints `h^{1/3}, h^{2/3}, h`.
pub fn trend_checkpoints(horizon: &Index) -> [Index; 3] {
    let ln = horizon.ln();
    let a = Index::floor_exp(ln / 3.0 + 1e-12).max(Index::one());
    let b = Index::floor_exp(2.0 * ln / 3.0 + 1e-12).max(a.add_u64(1));
    [a, b, horizon.clone()]
}

/// Classify a quantity from its values at three increasing checkpoints.
///
/// The slopes against `ln n` on the two gaps decide: both positive with the
/// later one keeping pace means unbounded; a nonincreasing run, or growth that
/// has nearly stopped, means bounded; anything else is inconclusive.
pub fn classify_trend(points: &[(Index, f64)]) -> Trend {
    let [(n1, v1), (n2, v2), (n3, v3)] = points else {
        return Trend::Inconclusive;
    };
    if !(n1 < n2 && n2 < n3) || [v1, v2, v3].iter().any(|v| !v.is_finite()) {
        return Trend::Inconclusive;
    }
    let s1 = (v2 - v1) / n2.ln_ratio(n1);
    let s2 = (v3 - v2) / n3.ln_ratio(n2);
    if s1 > 0.0 && s2 > 0.0 && s2 >= KEEP_FRACTION * s1 {
        Trend::Unbounded
    } else if (s1 <= 0.0 && s2 <= 0.0) || (s1 > 0.0 && s2 < DECAY_FRACTION * s1) {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    }
}
