//! Witness batteries for the two constructions, the cancellation signature,
//! and the hat identity for powers.

use crate::counterexamples::{Example6Params, OmegaHalfParams};
use crate::error::Result;
use crate::numerics::{Index, LogReal, NumericMode, Scalar};
use crate::regularity::hat;
use crate::seq::{domination_profile, Seq};
use crate::verify::report::{CheckReport, Property, Status, Tally, Witness};

/// Largest acceptable stage from which a "for k sufficiently large" property must hold.
pub const MAX_K0: u64 = 10;

/// Relative errors below this count as rounding noise in the within-step asymptotic.
const ASYMPTOTIC_FLOOR: f64 = 1e-12;

fn ln_slack(lhs: f64, rhs: f64) -> f64 {
    LogReal::slack(&LogReal::from_ln(lhs), &LogReal::from_ln(rhs))
}

/// Margin of `lo <= x <= hi`, all given by natural logs.
fn ln_band(x: f64, lo: f64, hi: f64) -> f64 {
    ln_slack(lo, x).min(ln_slack(x, hi))
}

/// Per-stage tallies of one property, reduced to the empirical threshold `k₀`.
struct Staged {
    name: &'static str,
    stages: Vec<(u64, Tally)>,
    /// Must hold at every stage (no threshold).
    every_stage: bool,
}

impl Staged {
    fn new(name: &'static str, every_stage: bool) -> Self {
        Staged { name, stages: Vec::new(), every_stage }
    }

    fn stage(&mut self, k: u64) -> &mut Tally {
        if self.stages.last().is_none_or(|(j, _)| *j != k) {
            self.stages.push((k, Tally::default()));
        }
        &mut self.stages.last_mut().unwrap().1
    }

    fn observe(&mut self, k: u64, margin: f64, witness: Witness) {
        self.stage(k).observe(margin, witness);
    }

    fn into_property(self, tol: f64) -> Property {
        if self.stages.is_empty() {
            return Property::from_tally(self.name, &Tally::default(), tol);
        }
        let holds = |t: &Tally| t.status(tol) != Status::Fail;
        let k0 = self
            .stages
            .iter()
            .rposition(|(_, t)| !holds(t))
            .map_or(Some(0), |i| (i + 1 < self.stages.len()).then_some(i + 1))
            .map(|i| self.stages[i].0);
        let mut tally = Tally::default();
        for (k, t) in &self.stages {
            if k0.is_none_or(|k0| *k >= k0) {
                tally.merge(t);
            }
        }
        let mut p = Property::from_tally(self.name, &tally, tol);
        p.sample_count = self.stages.iter().map(|(_, t)| t.count()).sum();
        p.k0 = k0;
        let first = self.stages.first().map(|s| s.0);
        match k0 {
            None if !self.stages.is_empty() => {
                p.status = Status::Fail;
                p.note = Some("fails at the last built stage".into());
            }
            Some(k0) if self.every_stage && Some(k0) != first => {
                p.status = Status::Fail;
                p.note = Some(format!("must hold at every stage; holds only from k = {k0}"));
            }
            Some(k0) if k0 > MAX_K0 => {
                p.status = Status::Fail;
                p.note = Some(format!("k0 = {k0} exceeds {MAX_K0}"));
            }
            _ => {}
        }
        p
    }
}

fn at(n: &Index) -> Witness {
    Witness::At(n.clone())
}

/// The Example 6 battery: the breakpoint sandwich, the asymptotics at `n_k`,
/// the crux `2 ξ_{a²} >= η_{a²}` at critical samples, divergence of
/// `η_a/ξ_a`, and the liminf/limsup signature of `ξ_{a²}/ξ_a`.
pub fn check_example6(params: &Example6Params, tol: f64) -> Result<CheckReport> {
    let k_max = params.stage_count();
    let horizon = params.stage_end(k_max);
    let mut report = CheckReport::new("example6", "example6", horizon, NumericMode::Log);
    let (xi, eta) = (&params.xi, &params.eta);
    let mut clock = Staged::new("clock", true);
    let mut xi_n = Staged::new("xi-mean-at-n", false);
    let mut eta_n = Staged::new("eta-mean-at-n", false);
    let mut xi2_n = Staged::new("xi-second-mean-at-n", false);
    let mut eta2_n = Staged::new("eta-second-mean-at-n", false);
    let mut crux = Staged::new("crux", false);
    let mut diverge = Staged::new("first-order-divergence", false);
    let mut liminf = Staged::new("liminf", false);
    let mut limsup = Staged::new("limsup", false);

    for st in &params.stages {
        let k = st.k;
        let kf = k as f64;
        let (m, n) = (&st.m, &st.n);
        let d = st.delta().ln();
        let top = d + (1.0 + 1.0 / kf).ln();
        let (xa, ea, x2, e2) = (xi.am_at(m)?.ln(), eta.am_at(m)?.ln(), xi.am2_at(m)?.ln(), eta.am2_at(m)?.ln());
        for margin in [
            -LogReal::rel_diff(&xi.eval(m)?, &st.delta()),
            -LogReal::rel_diff(&eta.eval(m)?, &st.delta()),
            ln_slack(d, xa),
            ln_slack(xa, ea),
            ln_slack(ea, e2),
            ln_slack(e2, top),
            ln_slack(xa, x2),
            ln_slack(x2, top),
        ] {
            clock.observe(k, margin, at(m));
        }
        liminf.observe(k, ln_slack(x2 - xa, (1.0 + 2.0 / kf).ln()), at(m));

        let scale = d - kf * kf;
        let (xa, ea, x2, e2) = (xi.am_at(n)?.ln(), eta.am_at(n)?.ln(), xi.am2_at(n)?.ln(), eta.am2_at(n)?.ln());
        xi_n.observe(k, ln_band(xa - scale, 1.5f64.ln(), 2.5f64.ln()), at(n));
        eta_n.observe(k, ln_band(ea - scale, (kf - 1.0).max(1e-300).ln(), (kf + 2.0).ln()), at(n));
        let sq = (kf * kf).ln();
        xi2_n.observe(k, ln_band(x2 - scale - sq, 0.5f64.ln(), 2f64.ln()), at(n));
        eta2_n.observe(k, ln_band(e2 - scale - sq, 0.5f64.ln(), 2f64.ln()), at(n));
        diverge.observe(k, ln_slack((kf / 4.0).ln(), ea - xa), at(n));
        limsup.observe(k, ln_slack((kf * kf / 8.0).ln(), x2 - xa), at(n));

        for j in params.critical_samples(k as usize) {
            let lhs = eta.am2_at(&j)?.ln();
            let rhs = xi.am2_at(&j)?.ln() + 2f64.ln();
            crux.observe(k, ln_slack(lhs, rhs), at(&j));
        }
    }
    for s in [clock, xi_n, eta_n, xi2_n, eta2_n, crux, diverge, liminf, limsup] {
        report.properties.push(s.into_property(tol));
    }
    report.notes.push("eta-mean-at-n uses the band [k-1, k+2]·e^(-k²)".into());
    let ambiguous: Vec<String> =
        params.stages.iter().filter(|s| s.n_ambiguous).map(|s| s.k.to_string()).collect();
    if !ambiguous.is_empty() {
        report.notes.push(format!("n_k floor flagged ambiguous at k = {}", ambiguous.join(", ")));
    }
    Ok(report.finish())
}

/// The `ω^{1/2}` battery: stage sandwich, `ω^{1/2} <= ξ_{a²}` at critical
/// samples, and divergence of `ω^{1/2}/ξ_a` along `j_k = ⌊m_k²/m_{k-1}⌋`.
pub fn check_omega_half(params: &OmegaHalfParams, tol: f64) -> Result<CheckReport> {
    let k_max = params.stage_count();
    let horizon = params.stage_end(k_max);
    let mut report = CheckReport::new("omega-half", "omega-half", horizon, NumericMode::Log);
    let xi = &params.xi;
    let root = |j: &Index| -0.5 * j.ln();
    let mut sandwich = Staged::new("stage-sandwich", true);
    let mut dominated = Staged::new("second-mean-dominates", false);
    let mut mean_at = Staged::new("mean-at-witness", false);
    let mut lower = Staged::new("witness-lower-bound", false);
    let mut growth = Staged::new("witness-growth", false);
    let mut asymptotic = Staged::new("within-step-asymptotic", false);
    let mut prev_ratio: Option<f64> = None;
    let mut prev_err: Option<f64> = None;

    for k in 1..=k_max {
        let ku = k as u64;
        let mk = params.m(k);
        if k >= 2 && k < k_max {
            let next = params.m(k + 1);
            let level = -mk.ln();
            let (a, b) = (xi.am_at(next)?.ln(), xi.am2_at(next)?.ln());
            for margin in [ln_slack(level, a), ln_slack(a, b), ln_slack(b, level + (1.0 + 1.0 / k as f64).ln())] {
                sandwich.observe(ku, margin, at(next));
            }
        }
        let samples = params.critical_samples(k);
        for j in &samples {
            dominated.observe(ku, ln_slack(root(j), xi.am2_at(j)?.ln()), at(j));
        }
        if k >= 3 {
            let prev = params.m(k - 1);
            let mut err = 0.0f64;
            for j in &samples {
                let approx = (mk.ln() - j.ln() - prev.ln()).exp() + (-mk.ln()).exp();
                let got = xi.am_at(j)?.value();
                err = err.max((got / approx - 1.0).abs());
            }
            report.measure(&format!("asymptotic-error-k{k}"), err);
            if let Some(pe) = prev_err {
                let (pe, e) = (pe.max(ASYMPTOTIC_FLOOR), err.max(ASYMPTOTIC_FLOOR));
                asymptotic.observe(ku, (pe - e) / pe.max(e), at(mk));
            }
            prev_err = Some(err);
        }
        if let Some(j) = params.witness_index(k) {
            let a = xi.am_at(&j)?.ln();
            mean_at.observe(ku, ln_band(a + mk.ln(), 1.5f64.ln(), 2.5f64.ln()), at(&j));
            let ratio = root(&j) - a;
            let prev = params.m(k - 1);
            lower.observe(ku, ln_slack(0.5 * prev.ln() - 4f64.ln(), ratio), at(&j));
            report.measure(&format!("witness-ratio-k{k}"), ratio.exp());
            if let Some(pr) = prev_ratio {
                growth.observe(ku, ln_slack(pr + 3f64.ln(), ratio), at(&j));
            }
            prev_ratio = Some(ratio);
        }
    }
    for s in [sandwich, dominated, mean_at, lower, growth, asymptotic] {
        report.properties.push(s.into_property(tol));
    }
    Ok(report.finish())
}

/// Whether the mean-of-order-`order` profile of `num` against `den` stays below
/// `flat_bound` while the order `order - 1` profile grows at least twofold
/// between the first and last checkpoint. With `expect`, the report fails when
/// the observed signature differs.
pub fn check_cancellation_witness(
    den: &Seq,
    num: &Seq,
    order: u32,
    checkpoints: &[Index],
    flat_bound: f64,
    expect: Option<bool>,
    subject: &str,
) -> Result<CheckReport> {
    let horizon = checkpoints.iter().max().cloned().unwrap_or_default();
    let mut report = CheckReport::new("cancellation-witness", subject, horizon, NumericMode::Log);
    let order = order.max(1);
    let hi = domination_profile(&num.am_pow(order), &den.am_pow(order), checkpoints)?;
    let lo = domination_profile(&num.am_pow(order - 1), &den.am_pow(order - 1), checkpoints)?;
    let (first, last) = match (lo.points.first(), lo.points.last()) {
        (Some(a), Some(b)) => (a.1, b.1),
        _ => (f64::NAN, f64::NAN),
    };
    let growth = last / first;
    let signature = hi.sup() <= flat_bound && growth >= 2.0;
    report.measure("order-sup", hi.sup());
    report.measure("lower-order-first", first);
    report.measure("lower-order-last", last);
    report.measure("lower-order-growth", growth);
    report.measure("order", order as f64);
    let mut tally = Tally::default();
    tally.observe(ln_slack(hi.sup().ln(), flat_bound.ln()), at(&hi.argmax));
    let mut p = Property::from_tally("signature", &tally, 0.0);
    p.status = match expect {
        Some(e) if e != signature => Status::Fail,
        _ => Status::Pass,
    };
    p.note = Some(if signature { "signature detected".into() } else { "no signature".into() });
    report.properties.push(p);
    Ok(report.finish())
}

/// `hat(ω^p)` against `ω^{p'}` with `1/p - 1/p' = 1`, over `10 <= n <= horizon`.
/// The ratio tends to `c = (1-p)^{-1/(1-p)}`; the check passes when it stays
/// within `[c/8, 8c]`.
pub fn check_hat_power(p: f64, horizon: u64, tol: f64) -> Result<CheckReport> {
    let subject = format!("omega^{p}");
    let mut report = CheckReport::new("hat-power", &subject, Index::new(horizon), NumericMode::Log);
    let base = Seq::power(p)?;
    let p_prime = p / (1.0 - p);
    let ln_c = -(1.0 - p).ln() / (1.0 - p);
    report.measure("p-prime", p_prime);
    report.measure("limit-constant", ln_c.exp());
    let h = hat(&base)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut tally = Tally::default();
    for (n, _, v) in h.dense(horizon)? {
        if n < 10 {
            continue;
        }
        let ratio = v.ln() + p_prime * (n as f64).ln();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        tally.observe(ln_band(ratio, ln_c - 8f64.ln(), ln_c + 8f64.ln()), Witness::At(Index::new(n)));
    }
    report.measure("band-lo", lo.exp());
    report.measure("band-hi", hi.exp());
    report.properties.push(Property::from_tally("band", &tally, tol));
    Ok(report.finish())
}
