//! Verification harness: every identity and inequality of the mean calculus as
//! a named check over a named subject, producing [`CheckReport`]s.

mod coherence;
mod examples;
mod lemmas;
mod means;
mod report;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counterexamples::{build_example6, build_omega_half, Example6Params, OmegaHalfParams, OMEGA_HALF_MAX_STAGES};
use crate::error::{Error, Result};
use crate::numerics::{harmonic, Exact, Index, LogReal, NumericMode};
use crate::seq::{Seq, Tail};

pub use coherence::{check_delta2_coherence, check_regular_iff_am_regular, DELTA2_FLAT, DELTA2_GROWTH, LOG_BAND};
pub use examples::{check_cancellation_witness, check_example6, check_hat_power, check_omega_half, MAX_K0};
pub use lemmas::{floor_index, Ctx};
pub use means::Means;
pub use report::{reports_to_csv, reports_to_json, CheckReport, Property, Status, Tally, Witness};

/// Relative one-sided tolerance used in log mode.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Stages built for Example 6 unless configured otherwise.
pub const DEFAULT_EXAMPLE6_STAGES: usize = 8;
/// Longest span `n - m` of a random pair in rational mode, where the
/// ratio-identity product is evaluated exactly term by term.
pub const RATIONAL_PAIR_SPAN: u64 = 16;
/// Horizon cap for the hat battery; `ν` grows polynomially in `n`.
pub const HAT_HORIZON_CAP: u64 = 10_000;
/// Coherence checks run to at least this horizon; shorter windows cannot separate the trends.
pub const COHERENCE_MIN_HORIZON: u64 = 1_000_000;

const PAIR_COUNT: usize = 50;
const SANDWICH_PAIR_COUNT: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub mode: NumericMode,
    pub horizon: u64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { mode: NumericMode::Log, horizon: 10_000, tol: DEFAULT_TOL, seed: 0 }
    }
}

impl CheckConfig {
    /// Zero in rational mode: exact comparisons get no slack.
    pub fn effective_tol(&self) -> f64 {
        match self.mode {
            NumericMode::Rational => 0.0,
            NumericMode::Log => self.tol,
        }
    }

    fn ctx(&self, subject: &str) -> Ctx {
        Ctx { subject: subject.into(), horizon: Index::new(self.horizon), tol: self.tol }
    }
}

/// A nondecreasing positive comparison sequence used as a lower bound on a ratio of regularity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Phi {
    Constant { value: f64 },
    Harmonic { scale: f64 },
    Log { scale: f64 },
}

impl Phi {
    pub fn at(&self, n: &Index) -> f64 {
        match *self {
            Phi::Constant { value } => value,
            Phi::Harmonic { scale } => scale * harmonic(n).unwrap_or(f64::INFINITY),
            Phi::Log { scale } => scale * n.ln(),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Phi::Constant { value } => format!("{value}"),
            Phi::Harmonic { scale } => format!("{scale}·H"),
            Phi::Log { scale } => format!("{scale}·log"),
        }
    }
}

/// A named built-in sequence with the comparison sequences its lemma checks use.
#[derive(Clone)]
pub struct Subject {
    pub id: String,
    pub seq: Seq,
    /// Lower bound for `r(s)` in the ratio bound.
    pub ratio_phi: Phi,
    /// Lower bound for `r(s_a)` in the monotone lemma; `None` skips it.
    pub monotone_phi: Option<Phi>,
    /// Limits are only visible as trends at reachable horizons.
    pub trend_only: bool,
}

/// Subjects of the lemma suite when none are named.
pub const LEMMA_SUBJECTS: [&str; 6] = ["omega-1/3", "omega-1/2", "omega-2/3", "omega", "log-n-over-n", "log2-n-over-n"];
/// Subjects of the coherence suite when none are named.
pub const COHERENCE_SUBJECTS: [&str; 6] = ["omega", "log-n-over-n", "omega-2", "omega-1/2", "omega-2/3", "iterated-log"];
pub const LEMMA_CHECKS: [&str; 7] =
    ["ratio-identity", "sandwich", "h-bound", "upward-variation", "log-jump", "ratio-bound", "monotone-lemma"];
pub const SUITES: [&str; 7] = ["lemmas", "example6", "omega-half", "hat", "coherence", "all", "empty"];

fn parse_exponent(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?),
        None => s.parse().ok(),
    }
}

/// Looks up a built-in subject. `stages` sizes the constructions.
pub fn builtin_subject(id: &str, stages: Option<usize>) -> Result<Subject> {
    let unit = Phi::Constant { value: 1.0 };
    let subject = |seq: Seq, monotone: Option<Phi>| Subject {
        id: id.into(),
        seq,
        ratio_phi: unit.clone(),
        monotone_phi: monotone,
        trend_only: false,
    };
    let s = match id {
        "omega" => Subject {
            ratio_phi: Phi::Harmonic { scale: 0.9 },
            ..subject(Seq::omega(), Some(Phi::Log { scale: 0.5 }))
        },
        "log-n-over-n" => subject(Seq::log_power(1.0, 0.0)?, Some(Phi::Log { scale: 0.25 })),
        "log2-n-over-n" => subject(Seq::log_power(2.0, 0.0)?, Some(Phi::Log { scale: 0.2 })),
        "iterated-log" => Subject { trend_only: true, ..subject(Seq::iterated_log(), Some(unit.clone())) },
        "finite-rank" => subject(Seq::table(vec![LogReal::ONE], Tail::Zero)?, None),
        "example6-xi" => subject(build_example6(stages.unwrap_or(DEFAULT_EXAMPLE6_STAGES))?.xi_seq(), None),
        "example6-eta" => subject(build_example6(stages.unwrap_or(DEFAULT_EXAMPLE6_STAGES))?.eta_seq(), None),
        "omega-half-xi" => subject(build_omega_half(stages.unwrap_or(OMEGA_HALF_MAX_STAGES))?.xi_seq(), None),
        _ => {
            let p = id
                .strip_prefix("omega-")
                .and_then(parse_exponent)
                .filter(|p| *p > 0.0)
                .ok_or_else(|| Error::Config(format!("unknown subject `{id}`")))?;
            let monotone = (p >= 1.0).then_some(Phi::Log { scale: 0.5 }).or(Some(unit.clone()));
            subject(Seq::power(p)?, monotone)
        }
    };
    Ok(s)
}

fn fnv(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in p.bytes().chain([0xff]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// `count` pairs `m <= n <= horizon` with `n - m <= max_span`, from a stream
/// seeded by `seed` and the labels.
pub fn random_pairs(seed: u64, labels: &[&str], horizon: u64, count: usize, max_span: u64) -> Vec<(Index, Index)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(labels));
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=horizon);
            let n = m + rng.gen_range(0..=max_span.min(horizon - m));
            (Index::new(m), Index::new(n))
        })
        .collect()
}

fn capability_report(check_id: &str, subject: &str, cfg: &CheckConfig, err: Error) -> CheckReport {
    let mut r = CheckReport::new(check_id, subject, Index::new(cfg.horizon), cfg.mode);
    r.notes.push(err.to_string());
    if !err.is_capability() {
        r.status = Status::Fail;
    }
    r
}

macro_rules! with_means {
    ($mode:expr, $seq:expr, $len:expr, |$m:ident| $body:expr) => {
        match $mode {
            NumericMode::Log => {
                let $m = Means::<LogReal>::dense($seq, $len)?;
                $body
            }
            NumericMode::Rational => {
                let $m = Means::<Exact>::dense($seq, $len)?;
                $body
            }
        }
    };
}

fn dense_len(cfg: &CheckConfig, s: &Seq) -> usize {
    let limit = s.dense_limit().min(cfg.horizon);
    if s.as_step().is_some() { 0 } else { limit as usize }
}

pub fn check_ratio_identity(s: &Seq, subject: &str, pairs: &[(Index, Index)], cfg: &CheckConfig) -> Result<CheckReport> {
    let len = dense_len(cfg, s);
    Ok(with_means!(cfg.mode, s, len, |m| lemmas::ratio_identity(&m, pairs, &cfg.ctx(subject))))
}

pub fn check_ratio_bound(s: &Seq, subject: &str, phi: &Phi, cfg: &CheckConfig) -> Result<CheckReport> {
    let len = dense_len(cfg, s);
    Ok(with_means!(cfg.mode, s, len, |m| lemmas::ratio_bound(&m, phi, cfg.horizon, &cfg.ctx(subject))))
}

pub fn check_h_bound(s: &Seq, subject: &str, cfg: &CheckConfig) -> Result<CheckReport> {
    let len = dense_len(cfg, s);
    Ok(with_means!(cfg.mode, s, len, |m| lemmas::h_bound(&m, cfg.horizon, &cfg.ctx(subject))))
}

pub fn check_sandwich(s: &Seq, subject: &str, pairs: &[(Index, Index)], cfg: &CheckConfig) -> Result<CheckReport> {
    let len = dense_len(cfg, s);
    Ok(with_means!(cfg.mode, s, len, |m| lemmas::sandwich(&m, pairs, &cfg.ctx(subject))))
}

pub fn check_log_jump(s: &Seq, subject: &str, ms: &[Index], cfg: &CheckConfig) -> Result<CheckReport> {
    let len = dense_len(cfg, s);
    Ok(with_means!(cfg.mode, s, len, |m| lemmas::log_jump(&m, ms, &cfg.ctx(subject))))
}

pub fn check_upward_variation(s: &Seq, subject: &str, ns: &[Index], cfg: &CheckConfig) -> Result<CheckReport> {
    let len = dense_len(cfg, s);
    Ok(with_means!(cfg.mode, s, len, |m| lemmas::upward_variation(&m, ns, &cfg.ctx(subject))))
}

pub fn check_monotone_lemma(s: &Seq, subject: &str, phi: &Phi, cfg: &CheckConfig) -> Result<CheckReport> {
    let len = dense_len(cfg, s);
    Ok(with_means!(cfg.mode, s, len, |m| lemmas::monotone_lemma(&m, phi, cfg.horizon, &cfg.ctx(subject))))
}

fn lemma_check<T: crate::numerics::Scalar>(m: &Means<T>, subject: &Subject, check: &str, cfg: &CheckConfig) -> Result<CheckReport> {
    let id = subject.id.as_str();
    let ctx = cfg.ctx(id);
    let h = cfg.horizon;
    let span = match cfg.mode {
        NumericMode::Rational => RATIONAL_PAIR_SPAN,
        NumericMode::Log => h,
    };
    Ok(match check {
        "ratio-identity" => {
            let pairs = random_pairs(cfg.seed, &[id, check], h, PAIR_COUNT, span);
            lemmas::ratio_identity(m, &pairs, &ctx)
        }
        "sandwich" => {
            let pairs = random_pairs(cfg.seed, &[id, check], h, SANDWICH_PAIR_COUNT, h);
            lemmas::sandwich(m, &pairs, &ctx)
        }
        "h-bound" => lemmas::h_bound(m, h, &ctx),
        "upward-variation" => {
            let ns: Vec<Index> = (1..h).map(Index::new).collect();
            lemmas::upward_variation(m, &ns, &ctx)
        }
        "log-jump" => {
            let ms: Vec<Index> = crate::regularity::geometric_grid(1, h, 1.1).into_iter().map(Index::new).collect();
            lemmas::log_jump(m, &ms, &ctx)
        }
        "ratio-bound" => lemmas::ratio_bound(m, &subject.ratio_phi, h, &ctx),
        "monotone-lemma" => match &subject.monotone_phi {
            Some(phi) => lemmas::monotone_lemma(m, phi, h, &ctx),
            None => CheckReport::skipped(check, id, Index::new(h), cfg.mode, "no comparison sequence for this subject".into()),
        },
        other => return Err(Error::Config(format!("unknown check `{other}`"))),
    })
}

/// The lemma battery on one subject, sharing one dense prefix across checks.
pub fn lemma_battery(subject: &Subject, checks: &[String], cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let len = dense_len(cfg, &subject.seq);
    let results: Vec<Result<CheckReport>> = match with_means!(cfg.mode, &subject.seq, len, |m| Ok::<_, Error>(
        checks.iter().map(|c| lemma_check(&m, subject, c, cfg)).collect()
    )) {
        Ok(v) => v,
        Err(e) => checks.iter().map(|_| Err(e.clone())).collect(),
    };
    checks
        .iter()
        .zip(results)
        .map(|(c, r)| match r {
            Err(e @ Error::Config(_)) => Err(e),
            Err(e) => Ok(capability_report(c, &subject.id, cfg, e)),
            ok => ok,
        })
        .collect()
}

/// Example 6 battery plus the single-sequence lemmas on `η` at breakpoints and
/// the cancellation signature of `(ξ, η)`.
pub fn example6_battery(params: &Example6Params, cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let ctx = Ctx { subject: "example6-eta".into(), horizon: params.stage_end(params.stage_count()), tol: cfg.tol };
    let eta = Means::<LogReal>::pointwise(&params.eta_seq());
    let mut breakpoints = Vec::new();
    let mut pairs = Vec::new();
    for k in 1..=params.stage_count() {
        let st = params.stage(k);
        let end = params.stage_end(k);
        breakpoints.extend([st.m.clone(), st.n.clone()]);
        pairs.extend([(st.m.clone(), st.n.clone()), (st.n.clone(), end.clone()), (st.m.clone(), end)]);
    }
    let mut around = Vec::new();
    for b in &breakpoints {
        around.extend(b.sub_u64(1).filter(|i| !i.is_zero()));
        around.push(b.clone());
    }
    let ms: Vec<Index> = params.stages.iter().map(|st| st.m.clone()).filter(|m| !m.is_zero()).collect();
    let checkpoints: Vec<Index> = params.stages.iter().skip(1).map(|st| st.n.clone()).collect();
    Ok(vec![
        check_example6(params, cfg.tol)?,
        lemmas::sandwich(&eta, &pairs, &ctx),
        lemmas::log_jump(&eta, &ms, &ctx),
        lemmas::upward_variation(&eta, &around, &ctx),
        check_cancellation_witness(&params.xi_seq(), &params.eta_seq(), 2, &checkpoints, 2.0 + cfg.tol, Some(true), "example6")?,
    ])
}

/// The `ω^{1/2}` battery plus its reverse-inclusion cancellation signature.
pub fn omega_half_battery(params: &OmegaHalfParams, cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let checkpoints: Vec<Index> = (3..=params.stage_count()).filter_map(|k| params.witness_index(k)).collect();
    Ok(vec![
        check_omega_half(params, cfg.tol)?,
        check_cancellation_witness(&params.xi_seq(), &Seq::power(0.5)?, 2, &checkpoints, 8.0, Some(true), "omega-half")?,
    ])
}

/// Which checks to run over which subjects.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    /// Subject ids; empty means the suite's defaults.
    pub subjects: Vec<String>,
    /// Check ids for the lemma suite; empty means all of them.
    pub checks: Vec<String>,
    pub config: CheckConfig,
    /// Stages for the constructions.
    pub stages: Option<usize>,
}

type Job<'a> = Box<dyn Fn() -> Result<Vec<CheckReport>> + Send + Sync + 'a>;

fn subjects_or(ids: &[String], defaults: &[&str]) -> Vec<String> {
    if ids.is_empty() {
        defaults.iter().map(|s| s.to_string()).collect()
    } else {
        ids.to_vec()
    }
}

/// Runs a named suite. Jobs run in parallel; reports come back sorted by
/// check id, and within a check id in subject order.
pub fn run_suite(sc: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let cfg = &sc.config;
    if cfg.horizon < 1 {
        return Err(Error::Config("horizon must be positive".into()));
    }
    let parts: Vec<&str> = match sc.suite.as_str() {
        "all" => vec!["lemmas", "example6", "omega-half", "hat", "coherence"],
        "empty" | "" => vec![],
        s if SUITES.contains(&s) => vec![s],
        other => return Err(Error::Config(format!("unknown suite `{other}`"))),
    };
    let checks = if sc.checks.is_empty() { LEMMA_CHECKS.iter().map(|s| s.to_string()).collect() } else { sc.checks.clone() };
    if let Some(c) = checks.iter().find(|c| !LEMMA_CHECKS.contains(&c.as_str())) {
        return Err(Error::Config(format!("unknown check `{c}`")));
    }
    let mut jobs: Vec<Job> = Vec::new();
    for part in parts {
        match part {
            "lemmas" => {
                for id in subjects_or(&sc.subjects, &LEMMA_SUBJECTS) {
                    let subject = builtin_subject(&id, sc.stages)?;
                    let checks = checks.clone();
                    jobs.push(Box::new(move || lemma_battery(&subject, &checks, cfg)));
                }
            }
            "example6" => jobs.push(Box::new(move || {
                let params = build_example6(sc.stages.unwrap_or(DEFAULT_EXAMPLE6_STAGES))?;
                example6_battery(&params, cfg)
            })),
            "omega-half" => jobs.push(Box::new(move || {
                let params = build_omega_half(sc.stages.unwrap_or(OMEGA_HALF_MAX_STAGES).min(OMEGA_HALF_MAX_STAGES))?;
                omega_half_battery(&params, cfg)
            })),
            "hat" => {
                for p in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
                    jobs.push(Box::new(move || Ok(vec![check_hat_power(p, cfg.horizon.min(HAT_HORIZON_CAP), cfg.tol)?])));
                }
            }
            "coherence" => {
                for id in subjects_or(&sc.subjects, &COHERENCE_SUBJECTS) {
                    let subject = builtin_subject(&id, sc.stages)?;
                    jobs.push(Box::new(move || {
                        let mut out = Vec::new();
                        let horizon = cfg.horizon.max(COHERENCE_MIN_HORIZON);
                        for (check, r) in [
                            ("delta2-coherence", check_delta2_coherence(&subject.seq, &subject.id, horizon, subject.trend_only)),
                            ("regular-iff-am-regular", check_regular_iff_am_regular(&subject.seq, &subject.id, horizon)),
                        ] {
                            out.push(r.unwrap_or_else(|e| capability_report(check, &subject.id, cfg, e)));
                        }
                        Ok(out)
                    }));
                }
            }
            _ => unreachable!(),
        }
    }
    let results: Vec<Result<Vec<CheckReport>>> = jobs.par_iter().map(|job| job()).collect();
    let mut reports = Vec::new();
    for r in results {
        match r {
            Ok(v) => reports.extend(v),
            Err(e @ Error::Config(_)) => return Err(e),
            Err(e) => reports.push(capability_report("suite", &sc.suite, cfg, e)),
        }
    }
    reports.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(reports)
}

/// True when no report failed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.status != Status::Fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: NumericMode, horizon: u64) -> CheckConfig {
        CheckConfig { mode, horizon, ..CheckConfig::default() }
    }

    #[test]
    fn ratio_identity_is_exact_on_omega() {
        let pairs = [(Index::new(2), Index::new(4)), (Index::new(7), Index::new(7))];
        let r = check_ratio_identity(&Seq::omega(), "omega", &pairs, &cfg(NumericMode::Rational, 100)).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.worst_margin, Some(0.0));
    }

    #[test]
    fn ratio_identity_on_root_in_log_mode() {
        let c = cfg(NumericMode::Log, 10_000);
        let pairs = random_pairs(7, &["root"], 10_000, 50, 10_000);
        let r = check_ratio_identity(&Seq::power(0.5).unwrap(), "omega-1/2", &pairs, &c).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(r.worst_margin.unwrap() > -1e-10);
    }

    #[test]
    fn h_bound_on_omega_and_finite_rank() {
        let r = check_h_bound(&Seq::omega(), "omega", &cfg(NumericMode::Rational, 2000)).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let fr = builtin_subject("finite-rank", None).unwrap();
        let r = check_h_bound(&fr.seq, "finite-rank", &cfg(NumericMode::Rational, 100)).unwrap();
        assert_eq!(r.status, Status::Skipped);
        assert!(r.notes.iter().any(|n| n.contains("precondition")));
    }

    #[test]
    fn log_jump_at_four() {
        let r = check_log_jump(&Seq::omega(), "omega", &[Index::new(1), Index::new(4)], &cfg(NumericMode::Rational, 100)).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.sample_count, 2);
    }

    #[test]
    fn ratio_bound_rejects_large_phi() {
        let phi = Phi::Harmonic { scale: 2.0 };
        let r = check_ratio_bound(&Seq::omega(), "omega", &phi, &cfg(NumericMode::Log, 1000)).unwrap();
        assert_eq!(r.status, Status::Skipped);
        assert!(r.notes.iter().any(|n| n.starts_with("inapplicable")));
    }

    #[test]
    fn subjects_resolve() {
        for id in LEMMA_SUBJECTS.iter().chain(&COHERENCE_SUBJECTS) {
            builtin_subject(id, None).unwrap();
        }
        assert!(matches!(builtin_subject("omega-x", None), Err(Error::Config(_))));
        assert_eq!(parse_exponent("2/3"), Some(2.0 / 3.0));
    }

    #[test]
    fn pairs_are_deterministic_and_ordered() {
        let a = random_pairs(1, &["x"], 1000, 20, 10);
        assert_eq!(a, random_pairs(1, &["x"], 1000, 20, 10));
        assert_ne!(a, random_pairs(2, &["x"], 1000, 20, 10));
        for (m, n) in &a {
            assert!(m <= n && n.to_u64().unwrap() - m.to_u64().unwrap() <= 10);
        }
    }

    #[test]
    fn empty_and_unknown_suites() {
        let sc = SuiteConfig { suite: "empty".into(), ..SuiteConfig::default() };
        assert!(run_suite(&sc).unwrap().is_empty());
        let sc = SuiteConfig { suite: "nope".into(), ..SuiteConfig::default() };
        assert!(matches!(run_suite(&sc), Err(Error::Config(_))));
        let sc = SuiteConfig { suite: "lemmas".into(), subjects: vec!["nope".into()], ..SuiteConfig::default() };
        assert!(matches!(run_suite(&sc), Err(Error::Config(_))));
    }

    #[test]
    fn lemma_suite_on_omega() {
        let sc = SuiteConfig {
            suite: "lemmas".into(),
            subjects: vec!["omega".into()],
            config: cfg(NumericMode::Log, 10_000),
            ..SuiteConfig::default()
        };
        let reports = run_suite(&sc).unwrap();
        assert_eq!(reports.len(), LEMMA_CHECKS.len());
        for r in &reports {
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
        let ids: Vec<&str> = reports.iter().map(|r| r.check_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn phi_serde() {
        let p = Phi::Log { scale: 0.5 };
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"kind":"log","scale":0.5}"#);
        assert_eq!(serde_json::from_str::<Phi>(&j).unwrap(), p);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(8))]

            #[test]
            fn checks_are_deterministic(seed in any::<u64>(), horizon in 100u64..3000) {
                let subject = builtin_subject("omega-1/2", None).unwrap();
                let checks: Vec<String> = LEMMA_CHECKS.iter().map(|c| c.to_string()).collect();
                let config = CheckConfig { seed, horizon, ..cfg(NumericMode::Log, horizon) };
                let a = reports_to_json(&lemma_battery(&subject, &checks, &config).unwrap());
                let b = reports_to_json(&lemma_battery(&subject, &checks, &config).unwrap());
                prop_assert_eq!(a, b);
            }

            #[test]
            fn pairs_are_ordered_and_in_range(seed in any::<u64>(), horizon in 2u64..100_000, span in 1u64..64) {
                let pairs = random_pairs(seed, &["x"], horizon, 40, span);
                prop_assert_eq!(&pairs, &random_pairs(seed, &["x"], horizon, 40, span));
                for (m, n) in pairs {
                    prop_assert!(Index::one() <= m && m <= n && n <= Index::new(horizon));
                }
            }
        }
    }
}
