//! Identities and inequalities for the first and second means of a single sequence.

use dashu_int::UBig;

use crate::error::{Error, Result};
use crate::numerics::{Index, LogReal, NumericMode, Scalar};
use crate::regularity::geometric_grid;
use crate::verify::means::Means;
use crate::verify::report::{CheckReport, Property, Tally, Witness};
use crate::verify::Phi;

/// Labels and tolerance shared by the checks on one subject.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub subject: String,
    pub horizon: Index,
    pub tol: f64,
}

impl Ctx {
    fn report<T: Scalar>(&self, check_id: &str) -> CheckReport {
        CheckReport::new(check_id, &self.subject, self.horizon.clone(), T::MODE)
    }

    fn tol<T: Scalar>(&self) -> f64 {
        if T::MODE == NumericMode::Rational {
            0.0
        } else {
            self.tol
        }
    }
}

/// Samples that could not be evaluated, with the first reason.
#[derive(Default)]
struct Skips {
    count: u64,
    first: Option<String>,
}

impl Skips {
    fn take<R>(&mut self, r: Result<R>) -> Option<R> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.count += 1;
                self.first.get_or_insert_with(|| e.to_string());
                None
            }
        }
    }

    fn annotate(&self, report: &mut CheckReport) {
        if let Some(reason) = &self.first {
            report.notes.push(format!("{} samples skipped; first: {reason}", self.count));
        }
    }
}

/// `⌊x⌋` as an index.
pub fn floor_index<T: Scalar>(x: &T) -> Result<Index> {
    match T::MODE {
        NumericMode::Log => Ok(Index::from_ln_floor(x.ln())),
        NumericMode::Rational => {
            let e = x.to_exact()?;
            let floor = e.0.floor();
            UBig::try_from(floor)
                .map(Index::from_ubig)
                .map_err(|_| Error::Domain("negative floor".into()))
        }
    }
}

/// Gaps between double approximations larger than this (relative) decide a
/// rational comparison without exact arithmetic.
const APPROX_GUARD: f64 = 1e-12;

/// Indices up to which the rational gap identity is evaluated exactly at every `n`.
pub const EXACT_IDENTITY_LIMIT: u64 = 2500;

/// Slack of `lhs <= rhs`. In rational mode a clear gap between the double
/// approximations decides it; otherwise, and always in log mode, `exact` does.
fn decided_slack<T: Scalar>(approx: Option<(f64, f64)>, exact: impl FnOnce() -> Result<(T, T)>) -> Result<f64> {
    if T::MODE == NumericMode::Rational {
        if let Some((l, r)) = approx {
            let scale = l.abs().max(r.abs());
            if scale.is_normal() && (r - l).abs() > APPROX_GUARD * scale {
                return Ok((r - l) / scale);
            }
        }
    }
    let (l, r) = exact()?;
    Ok(T::slack(&l, &r))
}

fn ratio<T: Scalar>(m: &Index, n: &Index) -> T {
    T::from_index(m).div(&T::from_index(n))
}

fn pair(m: &Index, n: &Index) -> Witness {
    Witness::Pair(m.clone(), n.clone())
}

fn ordered(pairs: &[(Index, Index)]) -> impl Iterator<Item = (Index, Index)> + '_ {
    pairs.iter().map(|(a, b)| if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) })
}

/// `(s_a)_n = (m/n) ∏_{j=m+1}^n (1 + 1/(j r_j - 1)) (s_a)_m`.
pub fn ratio_identity<T: Scalar>(s: &Means<T>, pairs: &[(Index, Index)], ctx: &Ctx) -> CheckReport {
    let mut report = ctx.report::<T>("ratio-identity");
    let mut tally = Tally::default();
    let mut skips = Skips::default();
    for (m, n) in ordered(pairs) {
        let eval = || -> Result<(T, T)> {
            let mut product = T::one();
            let mut j = m.add_u64(1);
            while j <= n {
                let x = T::from_index(&j).mul(&s.r(&j)?);
                product = product.mul(&x.div(&x.sub(&T::one())?));
                j = j.add_u64(1);
            }
            Ok((s.a(&n)?, ratio::<T>(&m, &n).mul(&product).mul(&s.a(&m)?)))
        };
        if let Some((lhs, rhs)) = skips.take(eval()) {
            tally.observe(-T::rel_diff(&lhs, &rhs), pair(&m, &n));
        }
    }
    report.properties.push(Property::from_tally("identity", &tally, ctx.tol::<T>()));
    skips.annotate(&mut report);
    report.finish()
}

/// First `m` with `m φ_m > 2`.
fn phi_start(phi: &Phi, horizon: u64) -> Option<u64> {
    (1..=horizon).find(|&m| m as f64 * phi.at(&Index::new(m)) > 2.0)
}

fn precondition_samples<T: Scalar>(s: &Means<T>, from: u64, horizon: u64) -> Vec<u64> {
    if s.dense_len() as u64 >= horizon {
        (from..=horizon).collect()
    } else {
        geometric_grid(from, horizon, 1.01)
    }
}

/// `(s_a)_n <= (m/n)^{1 - 2/φ_m} (s_a)_m` for sampled `n >= m >= M`, under `φ <= r(s)`.
/// The power is irrational, so both sides are compared in log arithmetic.
pub fn ratio_bound<T: Scalar>(s: &Means<T>, phi: &Phi, horizon: u64, ctx: &Ctx) -> CheckReport {
    let mut report = ctx.report::<T>("ratio-bound");
    report.notes.push(format!("phi = {}", phi.label()));
    let Some(start) = phi_start(phi, horizon) else {
        report.notes.push("no m with m·phi_m > 2 below the horizon".into());
        return report.finish();
    };
    report.measure("M", start as f64);
    let mut skips = Skips::default();
    for n in precondition_samples(s, start, horizon) {
        let idx = Index::new(n);
        if let Some(r) = skips.take(s.r_f64(&idx)) {
            if phi.at(&idx) > r * (1.0 + 1e-12) {
                report.notes.push(format!("inapplicable: phi exceeds r(s) at n = {n}"));
                return report.finish();
            }
        }
    }
    let mut tally = Tally::default();
    for m in geometric_grid(start, horizon, 1.25) {
        let mi = Index::new(m);
        let p = phi.at(&mi);
        let Some(am) = skips.take(s.a(&mi)) else { continue };
        for n in geometric_grid(m, horizon, 1.1) {
            let ni = Index::new(n);
            let Some(an) = skips.take(s.a(&ni)) else { continue };
            let bound = (1.0 - 2.0 / p) * (m as f64 / n as f64).ln() + am.ln();
            let margin = LogReal::slack(&an.to_log(), &LogReal::from_ln(bound));
            tally.observe(margin, pair(&mi, &ni));
        }
    }
    report.properties.push(Property::from_tally("bound", &tally, ctx.tol));
    skips.annotate(&mut report);
    report.finish()
}

/// For `1 < n <= horizon`: (a) `r(s_a)_n < H_n`; (b) `H_n - r(s_a)_n` strictly
/// increasing; (c) `H_n - r(s_a)_n = Σ_{i=2}^n s_i H_{i-1} / Σ_{i≤n} s_i`.
/// In rational mode (c) is evaluated for `n <= EXACT_IDENTITY_LIMIT`.
pub fn h_bound<T: Scalar>(s: &Means<T>, horizon: u64, ctx: &Ctx) -> CheckReport {
    let mut report = ctx.report::<T>("h-bound");
    let n_max = horizon.min(s.dense_len() as u64);
    if n_max < 2 {
        report.notes.push(format!("dense prefix of length {n_max} is too short"));
        return report.finish();
    }
    let (e1, e2) = match (s.value(&Index::new(1)), s.value(&Index::new(2))) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            report.notes.push(e.to_string());
            return report.finish();
        }
    };
    if e1.is_zero() || e2.is_zero() {
        report.notes.push("precondition s_2 > 0 fails; skipped".into());
        return report.finish();
    }
    let identity_max = match T::MODE {
        NumericMode::Rational if n_max > EXACT_IDENTITY_LIMIT => {
            report.notes.push(format!("gap identity evaluated for n <= {EXACT_IDENTITY_LIMIT}"));
            EXACT_IDENTITY_LIMIT
        }
        _ => n_max,
    };
    let tol = ctx.tol::<T>();
    let exact_gap = |k: &Index| -> Result<T> { T::harmonic(k)?.sub_or_zero(&s.r_am(k)?, 1e-13) };
    let approx_gap = |k: &Index| -> Option<f64> { Some(crate::numerics::harmonic(k).ok()? - s.approx_r_am(k)?) };
    let (mut below, mut increasing, mut identity) = (Tally::default(), Tally::default(), Tally::default());
    let mut skips = Skips::default();
    let mut numer = T::zero();
    let mut prev_h = T::zero();
    for n in 1..=n_max {
        let idx = Index::new(n);
        let w = Witness::At(idx.clone());
        if n >= 2 {
            let approx = s.approx_r_am(&idx).zip(crate::numerics::harmonic(&idx).ok());
            if let Some(m) = skips.take(decided_slack(approx, || Ok((s.r_am(&idx)?, T::harmonic(&idx)?)))) {
                below.observe_strict(m, w.clone(), T::MODE);
            }
            let prev = Index::new(n - 1);
            let approx = approx_gap(&prev).zip(approx_gap(&idx));
            if let Some(m) = skips.take(decided_slack(approx, || Ok((exact_gap(&prev)?, exact_gap(&idx)?)))) {
                increasing.observe_strict(m, w.clone(), T::MODE);
            }
        }
        if n > identity_max {
            continue;
        }
        let eval = || -> Result<(T, T, T)> { Ok((T::harmonic(&idx)?, s.value(&idx)?, s.a(&idx)?)) };
        let Some((h, v, a)) = skips.take(eval()) else { continue };
        if n >= 2 {
            numer = numer.add(&v.mul(&prev_h));
        }
        prev_h = h;
        if let Some(gap) = skips.take(exact_gap(&idx)) {
            let total = a.mul(&T::from_u64(n));
            identity.observe(-T::rel_diff(&gap, &numer.div(&total)), w);
        }
    }
    report.properties.push(Property::from_tally("below-harmonic", &below, tol));
    report.properties.push(Property::from_tally("gap-increasing", &increasing, tol));
    report.properties.push(Property::from_tally("gap-identity", &identity, tol));
    skips.annotate(&mut report);
    report.finish()
}

/// Both sandwich chains for the first and second means at each pair `m <= n`.
pub fn sandwich<T: Scalar>(s: &Means<T>, pairs: &[(Index, Index)], ctx: &Ctx) -> CheckReport {
    let mut report = ctx.report::<T>("sandwich");
    let tol = ctx.tol::<T>();
    let mut t = [Tally::default(), Tally::default(), Tally::default(), Tally::default()];
    let mut skips = Skips::default();
    for (m, n) in ordered(pairs) {
        let eval = || -> Result<[(T, T); 4]> {
            let (vm, vn) = (s.value(&m)?, s.value(&n)?);
            let (am, an) = (s.a(&m)?, s.a(&n)?);
            let (bm, bn) = (s.a2(&m)?, s.a2(&n)?);
            let w = ratio::<T>(&m, &n);
            let hd = T::harmonic_diff(&n, &m)?;
            let first_lower = w.mul(&am.sub_or_zero(&vn, 1e-13)?).add(&vn);
            let first_upper = w.mul(&am.sub_or_zero(&vm, 1e-13)?).add(&vm);
            let second_lower = w.mul(&bm.add(&hd.mul(&am)));
            let second_upper = w.mul(&bm).add(&hd.mul(&an));
            Ok([(first_lower, an.clone()), (an, first_upper), (second_lower, bn.clone()), (bn, second_upper)])
        };
        if let Some(sides) = skips.take(eval()) {
            for (tally, (lhs, rhs)) in t.iter_mut().zip(sides) {
                tally.observe(T::slack(&lhs, &rhs), pair(&m, &n));
            }
        }
    }
    for (name, tally) in ["first-lower", "first-upper", "second-lower", "second-upper"].into_iter().zip(&t) {
        report.properties.push(Property::from_tally(name, tally, tol));
    }
    skips.annotate(&mut report);
    report.finish()
}

/// With `n = ⌊m r(s)_m⌋`: `r(s_a)_n > ½ log r(s)_m`, compared in double precision.
pub fn log_jump<T: Scalar>(s: &Means<T>, ms: &[Index], ctx: &Ctx) -> CheckReport {
    let mut report = ctx.report::<T>("log-jump");
    let mut tally = Tally::default();
    let mut skips = Skips::default();
    for m in ms {
        let eval = || -> Result<(Index, f64, f64)> {
            let r = s.r(m)?;
            let n = floor_index(&T::from_index(m).mul(&r))?.max(Index::one());
            let lhs = 0.5 * r.ln();
            let rhs = s.r_am(&n)?.to_f64();
            Ok((n, lhs, rhs))
        };
        if let Some((n, lhs, rhs)) = skips.take(eval()) {
            tally.observe_strict((rhs - lhs) / rhs.abs().max(lhs.abs()), pair(m, &n), T::MODE);
        }
    }
    report.properties.push(Property::from_tally("jump", &tally, ctx.tol::<T>()));
    skips.annotate(&mut report);
    report.finish()
}

/// `r(s_a)_{n+1} <= r(s_a)_n + 1/(n+1)` and `r(s_a)_{n+1} <= (1 + 1/n) r(s_a)_n` at each `n`.
pub fn upward_variation<T: Scalar>(s: &Means<T>, ns: &[Index], ctx: &Ctx) -> CheckReport {
    let mut report = ctx.report::<T>("upward-variation");
    let tol = ctx.tol::<T>();
    let (mut additive, mut factor) = (Tally::default(), Tally::default());
    let mut skips = Skips::default();
    for n in ns {
        let next = n.add_u64(1);
        let approx = s.approx_r_am(n).zip(s.approx_r_am(&next));
        let (nf, next_f) = (n.to_f64(), next.to_f64());
        let w = Witness::At(n.clone());
        let exact = |scale: bool| {
            let next = &next;
            move || -> Result<(T, T)> {
                let (r0, r1) = (s.r_am(n)?, s.r_am(next)?);
                let bound = if scale {
                    r0.mul(&T::one().add(&T::one().div(&T::from_index(n))))
                } else {
                    r0.add(&T::one().div(&T::from_index(next)))
                };
                Ok((r1, bound))
            }
        };
        let add_approx = approx.map(|(r0, r1)| (r1, r0 + 1.0 / next_f));
        if let Some(m) = skips.take(decided_slack(add_approx, exact(false))) {
            additive.observe(m, w.clone());
        }
        let mul_approx = approx.map(|(r0, r1)| (r1, r0 * (1.0 + 1.0 / nf)));
        if let Some(m) = skips.take(decided_slack(mul_approx, exact(true))) {
            factor.observe(m, w);
        }
    }
    report.properties.push(Property::from_tally("additive", &additive, tol));
    report.properties.push(Property::from_tally("factor", &factor, tol));
    skips.annotate(&mut report);
    report.finish()
}

/// Under `φ <= r(s_a) <= β φ` (β measured): for sampled `m >= M` with
/// `n = ⌊m e^{φ_m}⌋`, `(s_{a²})_n <= 2βe² (m/n) log(n/m) (s_a)_m`.
pub fn monotone_lemma<T: Scalar>(s: &Means<T>, phi: &Phi, horizon: u64, ctx: &Ctx) -> CheckReport {
    let mut report = ctx.report::<T>("monotone-lemma");
    report.notes.push(format!("phi = {}", phi.label()));
    let Some(start) = phi_start(phi, horizon) else {
        report.notes.push("no m with m·phi_m > 2 below the horizon".into());
        return report.finish();
    };
    let mut skips = Skips::default();
    let mut beta = 0.0f64;
    for n in precondition_samples(s, 1, horizon) {
        let idx = Index::new(n);
        let Some(r) = skips.take(s.r_am_f64(&idx)) else { continue };
        let p = phi.at(&idx);
        if p > r * (1.0 + 1e-12) {
            report.notes.push(format!("inapplicable: phi exceeds r(s_a) at n = {n}"));
            return report.finish();
        }
        if n >= start && p > 0.0 {
            beta = beta.max(r / p);
        }
    }
    let k = 2.0 * beta * std::f64::consts::E.powi(2);
    report.measure("M", start as f64);
    report.measure("beta", beta);
    report.measure("K", k);
    let mut tally = Tally::default();
    for m in geometric_grid(start, horizon, 1.25) {
        let mi = Index::new(m);
        let p = phi.at(&mi);
        let (n, _) = mi.floor_mul_exp(p);
        if n <= mi {
            continue;
        }
        let Some((bn, am)) = skips.take((|| Ok((s.a2(&n)?, s.a(&mi)?)))()) else { continue };
        let ln_ratio = n.ln_ratio(&mi);
        let bound = k.ln() - ln_ratio + ln_ratio.ln() + am.ln();
        tally.observe(LogReal::slack(&bn.to_log(), &LogReal::from_ln(bound)), pair(&mi, &n));
    }
    report.properties.push(Property::from_tally("bound", &tally, ctx.tol));
    skips.annotate(&mut report);
    report.finish()
}
