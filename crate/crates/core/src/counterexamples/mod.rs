//! Deterministic inductive constructions of the two counterexamples: a pair of
//! step sequences whose second means are comparable while the first means are
//! not, and a step sequence whose second mean dominates `ω^{1/2}` although its
//! first mean does not.

mod example6;
mod omega_half;

pub use example6::{build_example6, Example6Params, Example6Stage};
pub use omega_half::{build_omega_half, OmegaHalfParams, OMEGA_HALF_MAX_STAGES};

use crate::numerics::Index;

/// `count` points spread geometrically over `[lo, hi]`, including both ends,
/// sorted and without repeats.
pub fn geometric_samples(lo: &Index, hi: &Index, count: usize) -> Vec<Index> {
    let mut out = vec![lo.clone()];
    if hi > lo && count > 1 {
        let (a, b) = (lo.ln(), hi.ln());
        for i in 1..count - 1 {
            let t = i as f64 / (count - 1) as f64;
            let j = Index::floor_exp(a + t * (b - a) + 1e-12).clamp(lo.clone(), hi.clone());
            out.push(j);
        }
        out.push(hi.clone());
    }
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_cover_the_range() {
        let s = geometric_samples(&Index::new(10), &Index::new(10_000), 4);
        assert_eq!(s, vec![Index::new(10), Index::new(100), Index::new(1000), Index::new(10_000)]);
        assert_eq!(geometric_samples(&Index::new(5), &Index::new(5), 16), vec![Index::new(5)]);
        let s = geometric_samples(&Index::new(1), &Index::new(3), 16);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
}
