//! End-to-end acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p amseq --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use amseq::counterexamples::{build_example6, build_omega_half};
use amseq::numerics::{harmonic, harmonic_diff, harmonic_engine, HarmonicEngine};
use amseq::regularity::{exp_delta2_profile, geometric_grid, hat, seq_from_concavity, seq_from_ratio, Trend};
use amseq::seq::Tail;
use amseq::verify::{
    all_passed, check_delta2_coherence, check_example6, check_hat_power, check_omega_half, reports_to_json,
    run_suite, CheckConfig, CheckReport, Status, SuiteConfig,
};
use amseq::{Error, Exact, Index, NumericMode, Seq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    run: fn() -> Outcome,
    budget_secs: u64,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn failing(reports: &[CheckReport]) -> String {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.status != Status::Pass && r.status != Status::Skipped)
        .map(|r| format!("{}/{}: {:?}", r.check_id, r.subject, r.status))
        .collect();
    bad.join("; ")
}

fn property<'a>(r: &'a CheckReport, name: &str) -> Result<&'a amseq::verify::Property, String> {
    r.properties.iter().find(|p| p.name == name).ok_or_else(|| format!("no property {name}"))
}

fn random_table(rng: &mut ChaCha8Rng, len: usize) -> Vec<Exact> {
    let den = rng.gen_range(1_000u64..1_000_000);
    let mut num = den;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(Exact::ratio(num, den));
        if rng.gen_bool(0.8) {
            let cut = rng.gen_range(0..=num / 64 + 1).min(num - 1);
            num -= cut;
        }
    }
    out
}

fn inversion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..100 {
        let len = rng.gen_range(2..=1000);
        let x = random_table(&mut rng, len);
        let s = Seq::exact_table(x.clone(), Tail::Undefined).map_err(err)?;
        let r = s.ratio_of_regularity::<Exact>(len).map_err(err)?;
        let back: Vec<Exact> = seq_from_ratio(&r).map_err(err)?.dense(len).map_err(err)?;
        ensure(back == x, || format!("ratio inversion differs on case {case} (n = {len})"))?;
        let c = s.concavity_ratio::<Exact>(len - 1).map_err(err)?;
        let back: Vec<Exact> = seq_from_concavity(&c).map_err(err)?.dense(len).map_err(err)?;
        ensure(back == x, || format!("concavity inversion differs on case {case} (n = {len})"))?;
    }
    Ok("100 random rational inputs, both inversions exact".into())
}

const LEMMA_CHECKS: [&str; 5] = ["ratio-identity", "sandwich", "h-bound", "upward-variation", "log-jump"];
const LEMMA_SUBJECTS: [&str; 6] = ["omega-1/3", "omega-1/2", "omega-2/3", "omega", "log-n-over-n", "log2-n-over-n"];

fn lemma_suite(mode: NumericMode, horizon: u64) -> Result<Vec<CheckReport>, String> {
    run_suite(&SuiteConfig {
        suite: "lemmas".into(),
        subjects: LEMMA_SUBJECTS.iter().map(|s| s.to_string()).collect(),
        checks: LEMMA_CHECKS.iter().map(|s| s.to_string()).collect(),
        config: CheckConfig { mode, horizon, tol: 1e-9, seed: 0 },
        stages: None,
    })
    .map_err(err)
}

fn lemmas() -> Outcome {
    let mut count = 0;
    for (mode, horizon) in [(NumericMode::Rational, 10_000), (NumericMode::Log, 1_000_000)] {
        let reports = lemma_suite(mode, horizon)?;
        ensure(reports.len() == 30, || format!("{} reports in {mode:?} mode", reports.len()))?;
        ensure(reports.iter().all(|r| r.status == Status::Pass), || failing(&reports))?;
        count += reports.len();
    }
    Ok(format!("{count} reports pass (rational 1e4, log 1e6)"))
}

fn harmonic_bounds() -> Outcome {
    let limit = 1_000_000u64;
    let engine = harmonic_engine();
    let h: Vec<f64> = (0..=limit).map(|n| if n == 0 { 0.0 } else { engine.harmonic_u64(n) }).collect();
    for n in 2..=limit {
        let ln = (n as f64).ln();
        let hn = h[n as usize];
        ensure(1.0 / (n as f64) + ln < hn && hn < 1.0 + ln, || format!("H bound fails at n = {n}"))?;
    }
    let pair = |n: u64, m: u64, d: f64| -> Result<(), String> {
        let span = (n - m) as f64;
        let upper = (span / (m as f64)).ln_1p();
        let lower = (span / ((m + 1) as f64)).ln_1p();
        ensure(lower < d && d < upper, || {
            format!("H difference bound fails at (n, m) = ({n}, {m})")
        })
    };
    let mut pairs = 0u64;
    for m in 1..limit {
        pair(m + 1, m, h[m as usize + 1] - h[m as usize])?;
        pairs += 1;
    }
    for m in geometric_grid(1, limit - 1, 1.25) {
        for n in m + 1..=limit {
            pair(n, m, harmonic_diff(&Index::new(n), &Index::new(m)).map_err(err)?)?;
            pairs += 1;
        }
    }
    for n in geometric_grid(2, limit, 1.25) {
        for m in 1..n {
            pair(n, m, harmonic_diff(&Index::new(n), &Index::new(m)).map_err(err)?)?;
            pairs += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let m = 10f64.powf(rng.gen_range(6.0..12.0)) as u64;
        let span = (10f64.powf(rng.gen_range(0.0..(m as f64).log10() + 3.0)) as u64).max(1);
        let n = m + span;
        pair(n, m, harmonic_diff(&Index::new(n), &Index::new(m)).map_err(err)?)?;
        let ln = (n as f64).ln();
        let hn = harmonic(&Index::new(n)).map_err(err)?;
        ensure(1.0 / (n as f64) + ln < hn && hn < 1.0 + ln, || format!("H bound fails at n = {n}"))?;
    }

    let table = engine.harmonic_u64(limit);
    let asymptotic = HarmonicEngine::new(1000).harmonic(&Index::new(limit)).map_err(err)?;
    let crossover = (asymptotic - table).abs() / table;
    let next = harmonic(&Index::new(limit + 1)).map_err(err)? - 1.0 / (limit + 1) as f64;
    let step = (next - table).abs() / table;
    ensure(crossover < 1e-12 && step < 1e-12, || format!("crossover disagreement {crossover:e} / {step:e}"))?;
    Ok(format!("{pairs} dense pairs, 1000 big pairs; crossover error {crossover:.1e}"))
}

fn coherence() -> Outcome {
    let horizon = 1_000_000;
    let mut notes = Vec::new();
    for (id, s, sup_bound) in [
        ("omega", Seq::omega(), 2.0),
        ("log-n-over-n", Seq::log_power(1.0, 0.0).map_err(err)?, 4.0),
        ("omega-2", Seq::power(2.0).map_err(err)?, 2.0),
    ] {
        let r = check_delta2_coherence(&s, id, horizon, false).map_err(err)?;
        let m = &r.measurements;
        ensure(r.status == Status::Pass, || format!("{id}: {:?} {:?}", r.status, r.properties))?;
        ensure(m["delta2-sup"] < sup_bound, || format!("{id}: Δ₂ sup {} not below {sup_bound}", m["delta2-sup"]))?;
        ensure(m["band-spread"] <= amseq::verify::LOG_BAND, || format!("{id}: band spread {}", m["band-spread"]))?;
        notes.push(format!("{id} sup {:.3} spread {:.3}", m["delta2-sup"], m["band-spread"]));
    }
    for (id, p) in [("omega-1/2", 0.5), ("omega-2/3", 2.0 / 3.0)] {
        let s = Seq::power(p).map_err(err)?;
        let r = check_delta2_coherence(&s, id, horizon, false).map_err(err)?;
        let m = &r.measurements;
        ensure(r.status == Status::Pass, || format!("{id}: {:?} {:?}", r.status, r.properties))?;
        let (a, b, c) = (m["delta2-31"], m["delta2-100"], m["delta2-1000"]);
        ensure(a < b && b < c, || format!("{id}: profile not increasing ({a}, {b}, {c})"))?;
        ensure(m["band-spread"] > amseq::verify::LOG_BAND, || format!("{id}: band holds"))?;
        notes.push(format!("{id} Δ₂(1000) {c:.1}"));
    }
    Ok(notes.join(", "))
}

/// Extremes of `r(x_a)_n / log n = (x_{a²}/x_a)_n / log n` over `2 <= n <= len`.
fn log_band(a: &[amseq::LogReal], a2: &[amseq::LogReal]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for n in 2..=a.len() {
        let q = a2[n - 1].div(a[n - 1]).value() / (n as f64).ln();
        lo = lo.min(q);
        hi = hi.max(q);
    }
    (lo, hi)
}

fn higher_order() -> Outcome {
    let horizon = 100_000usize;
    let max_m = (horizon as f64).sqrt() as u64;
    let mut notes = Vec::new();
    for (id, s) in [("omega", Seq::omega()), ("log-n-over-n", Seq::log_power(1.0, 0.0).map_err(err)?)] {
        let values = s.dense_log(horizon).map_err(err)?;
        let mut means = vec![amseq::seq::prefix_means(&values)];
        for _ in 0..2 {
            let next = amseq::seq::prefix_means(means.last().unwrap());
            means.push(next);
        }
        let levels = [s.clone(), s.am(), s.am_pow(2)];
        let profiles = levels
            .iter()
            .map(|x| exp_delta2_profile(x, max_m))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        ensure(profiles[0].trend != Trend::Unbounded, || format!("{id}: base Δ₂ profile unbounded"))?;
        let mut detail = vec![format!("{id} Δ₂ sup {:.3}", profiles[0].sup)];
        for p in 0..2 {
            let (alpha, beta) = log_band(&means[p], &means[p + 1]);
            let (lo, hi) = (alpha / (2.0 * beta), beta / (2.0 * alpha));
            let (base, upper) = (&profiles[p], &profiles[p + 1]);
            let (mut qlo, mut qhi) = (f64::INFINITY, 0.0f64);
            for m in 2..=max_m {
                let q = base.at(m) / upper.at(m);
                qlo = qlo.min(q);
                qhi = qhi.max(q);
            }
            let label = if p == 0 { "am" } else { "am²" };
            ensure(lo <= qlo && qhi <= hi, || {
                format!("{id}/{label}: consistency ratio [{qlo:.3}, {qhi:.3}] outside [{lo:.3}, {hi:.3}]")
            })?;
            let bound = base.sup / lo;
            ensure(upper.trend != Trend::Unbounded && upper.sup <= bound, || {
                format!("{id}/{label}: Δ₂ profile sup {:.3} above {bound:.3} (trend {:?})", upper.sup, upper.trend)
            })?;
            detail.push(format!(
                "{label}: α {alpha:.3} β {beta:.3} ratio [{qlo:.3}, {qhi:.3}] ⊂ [{lo:.3}, {hi:.3}] sup {:.3}",
                upper.sup
            ));
        }
        notes.push(detail.join(", "));
    }
    Ok(notes.join("; "))
}

fn example6() -> Outcome {
    let params = build_example6(8).map_err(err)?;
    let r = check_example6(&params, 1e-9).map_err(err)?;
    let clock = property(&r, "clock")?;
    ensure(clock.status == Status::Pass && clock.k0 == Some(1), || format!("clock: {clock:?}"))?;
    let diverge = property(&r, "first-order-divergence")?;
    ensure(diverge.status == Status::Pass && diverge.k0.is_some_and(|k| k <= 10), || format!("divergence: {diverge:?}"))?;
    for name in ["crux", "liminf", "limsup"] {
        let p = property(&r, name)?;
        ensure(p.status == Status::Pass, || format!("{name}: {p:?}"))?;
    }
    ensure(r.status == Status::Pass, || format!("report status {:?}", r.status))?;
    let k0 = |n: &str| property(&r, n).map(|p| p.k0.unwrap_or(0)).unwrap_or(0);
    Ok(format!(
        "k0: divergence {}, crux {}, liminf {}, limsup {}",
        k0("first-order-divergence"),
        k0("crux"),
        k0("liminf"),
        k0("limsup")
    ))
}

fn omega_half() -> Outcome {
    let params = build_omega_half(4).map_err(err)?;
    let r = check_omega_half(&params, 1e-9).map_err(err)?;
    for name in ["second-mean-dominates", "witness-growth"] {
        let p = property(&r, name)?;
        ensure(p.status == Status::Pass, || format!("{name}: {p:?}"))?;
    }
    ensure(r.status == Status::Pass, || format!("report status {:?}", r.status))?;
    let ratios: Vec<String> = r
        .measurements
        .iter()
        .filter(|(k, _)| k.starts_with("witness-ratio"))
        .map(|(k, v)| format!("{k} {v:.3}"))
        .collect();
    Ok(ratios.join(", "))
}

fn hat_identity() -> Outcome {
    let mut notes = Vec::new();
    for p in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
        let r = check_hat_power(p, 1000, 1e-9).map_err(err)?;
        ensure(r.status == Status::Pass, || format!("p = {p}: {:?}", r.properties))?;
        let (lo, hi) = (r.measurements["band-lo"], r.measurements["band-hi"]);
        if p == 0.5 {
            ensure(lo >= 1.0 / 8.0 && hi <= 8.0, || format!("p = 1/2 band [{lo}, {hi}] outside [1/8, 8]"))?;
        }
        notes.push(format!("p {p:.3} band [{lo:.3}, {hi:.3}]"));
    }
    match hat(&Seq::power(2.0).map_err(err)?) {
        Err(Error::Summable(_)) => {}
        other => return Err(format!("hat of a summable sequence gave {:?}", other.map(|_| ()))),
    }
    Ok(notes.join(", "))
}

fn half_condition() -> Outcome {
    let horizon = 100_000usize;
    let xi = build_example6(8).map_err(err)?.xi_seq();
    let mut worst = f64::INFINITY;
    for (id, s) in [("omega", Seq::omega()), ("omega-1/2", Seq::power(0.5).map_err(err)?), ("example6-xi", xi)] {
        let mean = s.am();
        let x = mean.dense_log(horizon).map_err(err)?;
        let d = mean.ampliation(2).map_err(err)?.dense_log(horizon).map_err(err)?;
        for n in 0..horizon {
            let (lx, ld) = (x[n].ln(), d[n].ln());
            let slack = (ld - lx).min(lx + 2f64.ln() - ld);
            worst = worst.min(slack);
            ensure(slack >= -1e-12, || format!("{id}: fails at n = {}", n + 1))?;
        }
    }
    Ok(format!("worst log slack {worst:.2e}"))
}

fn determinism() -> Outcome {
    let run = || -> Result<String, String> {
        let reports = run_suite(&SuiteConfig {
            suite: "all".into(),
            subjects: Vec::new(),
            checks: Vec::new(),
            config: CheckConfig::default(),
            stages: None,
        })
        .map_err(err)?;
        ensure(all_passed(&reports), || failing(&reports))?;
        Ok(reports_to_json(&reports))
    };
    let (a, b) = (run()?, run()?);
    ensure(a == b, || "reports differ between runs".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "inversion exactness", run: inversion, budget_secs: 5 },
        Criterion { id: 2, name: "lemma suite", run: lemmas, budget_secs: 60 },
        Criterion { id: 3, name: "harmonic bounds", run: harmonic_bounds, budget_secs: 30 },
        Criterion { id: 4, name: "exp-Δ₂ / log coherence", run: coherence, budget_secs: 60 },
        Criterion { id: 5, name: "higher-order Δ₂", run: higher_order, budget_secs: 60 },
        Criterion { id: 6, name: "example 6", run: example6, budget_secs: 120 },
        Criterion { id: 7, name: "ω^1/2 example", run: omega_half, budget_secs: 60 },
        Criterion { id: 8, name: "hat identity", run: hat_identity, budget_secs: 30 },
        Criterion { id: 9, name: "Δ_1/2 condition", run: half_condition, budget_secs: 10 },
        Criterion { id: 10, name: "determinism", run: determinism, budget_secs: u64::MAX },
    ];
    let mut failed = Vec::new();
    for Criterion { id, name, run, budget_secs: budget } in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => {
                Err(format!("{detail}; took {:.1}s, budget {budget}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} ({:.1}s): {detail}", elapsed.as_secs_f64()),
            Err(reason) => {
                println!("criterion {id:>2} FAIL  {name} ({:.1}s): {reason}", elapsed.as_secs_f64());
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
