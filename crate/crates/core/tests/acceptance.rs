//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bell_monogamy::bounds::{local_bound, ns_bound, ns_maximize, random_objective, sample_ns_behavior, NsOptimum};
use bell_monogamy::cloning::{mean_shrink_bound, shrinking_factors, ValueSource};
use bell_monogamy::fixtures;
use bell_monogamy::monogamy::extend_scenario;
use bell_monogamy::multipartite::{flatten_bipartition, Bipartition};
use bell_monogamy::rational::{format_rational, int, inv_sqrt2, ratio, sqrt2, to_f64, Rational};
use bell_monogamy::{Behavior, BellFunctional, PartySpec, Scenario};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn q(r: &Rational) -> String {
    format_rational(r)
}

/// Every LP run by the gate, kept for the certificate criterion.
#[derive(Default)]
struct Ledger {
    lps: Vec<(String, NsOptimum)>,
}

impl Ledger {
    fn record(&mut self, label: &str, opt: &NsOptimum) {
        self.lps.push((label.to_string(), opt.clone()));
    }
}

fn criterion_1(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (name, f, local, ns) in [
        ("CHSH-prob", fixtures::chsh_prob(), 3, 4),
        ("CHSH-corr", fixtures::chsh_corr(), 2, 4),
    ] {
        let lb = local_bound(&f).map_err(|e| e.to_string())?;
        let nb = ns_bound(&f).map_err(|e| e.to_string())?;
        ledger.record(&format!("ns_bound {name}"), &nb);
        ensure(lb.value == int(local), || format!("{name} local bound {}", q(&lb.value)))?;
        ensure(nb.value == int(ns), || format!("{name} ns bound {}", q(&nb.value)))?;
        parts.push(format!("{name} local {} ns {}", q(&lb.value), q(&nb.value)));
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} ({:.2?})", parts.join(", "), start.elapsed()))
}

fn monogamy_lp(f: &BellFunctional, ledger: &mut Ledger, label: &str) -> Result<Rational, String> {
    let setup = extend_scenario(f).map_err(|e| e.to_string())?;
    let lp = setup.monogamy_lp_max().map_err(|e| e.to_string())?;
    ledger.record(label, &lp.optimum);
    Ok(lp.value)
}

fn criterion_2(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let chsh = monogamy_lp(&fixtures::chsh_prob(), ledger, "monogamy CHSH-prob")?;
    let t_chsh = start.elapsed();
    ensure(chsh == int(6), || format!("CHSH-prob gives {}", q(&chsh)))?;
    within(t_chsh, Duration::from_secs(5))?;

    let (normalized, offset) = fixtures::chsh_corr()
        .to_probability_form()
        .and_then(|f| f.normalize_nonneg())
        .map_err(|e| e.to_string())?;
    ensure(normalized.bound() == &int(10) && offset == int(8), || "normalized CHSH-corr is not (10, 8)".into())?;
    let corr = monogamy_lp(&normalized, ledger, "monogamy normalized CHSH-corr")?;
    ensure(corr == int(20), || format!("normalized CHSH-corr gives {}", q(&corr)))?;

    let start3 = Instant::now();
    let chained = monogamy_lp(&fixtures::chained3_prob(), ledger, "monogamy chained-3")?;
    let t_chained = start3.elapsed();
    ensure(chained == int(15), || format!("chained-3 gives {}", q(&chained)))?;
    within(t_chained, Duration::from_secs(300))?;
    Ok(format!(
        "CHSH-prob {} ({t_chsh:.2?}), normalized CHSH-corr {}, chained-3 {} ({t_chained:.2?})",
        q(&chsh),
        q(&corr),
        q(&chained)
    ))
}

fn criterion_3(ledger: &Ledger) -> Outcome {
    let value = |label: &str| {
        ledger
            .lps
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, o)| o.value.clone())
            .ok_or_else(|| format!("{label} did not run"))
    };
    let prob_sum = value("monogamy CHSH-prob")?;
    let corr_sum = value("monogamy normalized CHSH-corr")?;
    // Normalized CHSH-corr is CHSH-corr + 8 on every pair.
    let via_corr = &corr_sum - int(2 * 8);
    // CHSH-prob = (CHSH-corr + 4) / 2, so CHSH-corr = 2 CHSH-prob - 4 per pair.
    let via_prob = int(2) * &prob_sum - int(2 * 4);
    ensure(via_corr == int(4), || format!("via normalized form: {}", q(&via_corr)))?;
    ensure(via_prob == int(4), || format!("via CHSH-prob: {}", q(&via_prob)))?;

    // The affine relation itself, on deterministic, PR and sampled behaviors.
    let (prob, corr) = (fixtures::chsh_prob(), fixtures::chsh_corr());
    let mut behaviors = vec![fixtures::pr_box(), fixtures::uniform_chsh(), fixtures::deterministic_zero()];
    for seed in 0..20 {
        behaviors.push(sample_ns_behavior(&fixtures::chsh_scenario(), seed, 2).map_err(|e| e.to_string())?);
    }
    for p in &behaviors {
        let (vp, vc) = (prob.evaluate(p).unwrap(), corr.evaluate(p).unwrap());
        ensure(vp == (&vc + int(4)) / int(2), || "CHSH-prob != (CHSH-corr + 4)/2".into())?;
    }
    Ok(format!(
        "CHSH(A,B1)+CHSH(A,B2) <= {} (normalized) = {} (prob form)",
        q(&via_corr),
        q(&via_prob)
    ))
}

fn double_pr() -> Result<Behavior, String> {
    let setup = extend_scenario(&fixtures::chsh_prob()).map_err(|e| e.to_string())?;
    Ok(Behavior::from_fn(setup.extended().clone(), |s, o| {
        if (1..3).all(|j| o[j] == o[0] ^ (s[0] & s[j])) {
            ratio(1, 2)
        } else {
            Rational::zero()
        }
    }))
}

fn criterion_4() -> Outcome {
    let setup = extend_scenario(&fixtures::chsh_prob()).map_err(|e| e.to_string())?;
    let p = double_pr()?;
    p.validate().map_err(|e| e.to_string())?;
    let report = setup.monogamy_check(&p).map_err(|e| e.to_string())?;
    ensure(report.sum == int(8), || format!("sum {}", q(&report.sum)))?;
    ensure(report.sum > int(6) && !report.holds, || "monogamy not violated".into())?;
    ensure(!p.is_nonsignaling(), || "is_nonsignaling is true".into())?;
    let w = report.signaling.ok_or("no signaling witness")?;
    ensure(!w.difference.is_zero(), || "witness has zero difference".into())?;
    Ok(format!("sum 8/1 > 6/1, witness: {w}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let setup = extend_scenario(&fixtures::chsh_prob()).map_err(|e| e.to_string())?;
    let r = setup.base().bound().clone();
    let bound = setup.bound();
    for seed in 0..1000u64 {
        let fail = |what: &str| format!("seed {seed}: {what}");
        let p = sample_ns_behavior(setup.extended(), seed, 1 + (seed % 4) as usize).map_err(|e| e.to_string())?;
        ensure(p.is_nonsignaling(), || fail("sample signals"))?;
        let report = setup.monogamy_check(&p).map_err(|e| e.to_string())?;
        ensure(report.holds && report.sum <= bound, || fail("monogamy fails"))?;
        let pairs: Rational = (1..=2).map(|m| setup.pair_value(&p, m).unwrap()).sum();
        let mut chains = Rational::zero();
        for m in 1..=2 {
            let c = setup.chain_functional(m).unwrap().evaluate(&p).unwrap();
            ensure(c <= r, || fail("chain value above R"))?;
            chains += c;
            let model = setup.fixed_setting_lhv(&p, m).map_err(|e| e.to_string())?;
            model.validate().map_err(|e| fail(&e.to_string()))?;
            let slice = setup.fixed_setting_slice(&p, m).unwrap();
            let residual: Rational = model
                .to_behavior()
                .table()
                .iter()
                .zip(slice.table())
                .map(|(a, b)| (a - b).abs())
                .sum();
            ensure(residual.is_zero(), || fail("local model residual"))?;
        }
        ensure(pairs == chains, || fail("pair sum != chain sum"))?;
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("1000 samples ({:.2?})", start.elapsed()))
}

fn criterion_6(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let cut = Bipartition::from_group(3, vec![0, 1]).map_err(|e| e.to_string())?;
    let (flat, _) = flatten_bipartition(&fixtures::mermin(), &cut).map_err(|e| e.to_string())?;
    let flat_corr_local = local_bound(&flat).map_err(|e| e.to_string())?.value;
    let (g, offset) = flat.normalize_nonneg().map_err(|e| e.to_string())?;
    let r_flat = local_bound(&g).map_err(|e| e.to_string())?.value;
    ensure(r_flat == &flat_corr_local + &offset, || "local bound not shifted by offset".into())?;
    let g = g.with_bound(r_flat.clone());
    let value = monogamy_lp(&g, ledger, "monogamy Mermin {A,B}|{C}")?;
    ensure(value == int(2) * &r_flat, || format!("{} != 2 * {}", q(&value), q(&r_flat)))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "R_flat {} (flattened local {} + offset {}), LP {} ({:.2?})",
        q(&r_flat),
        q(&flat_corr_local),
        q(&offset),
        q(&value),
        start.elapsed()
    ))
}

fn criterion_7() -> Outcome {
    let corr = fixtures::chsh_corr();
    let base = int(2) * sqrt2();
    let b = mean_shrink_bound(&corr, &base).map_err(|e| e.to_string())?;
    let err = (to_f64(&b.bound) - std::f64::consts::FRAC_1_SQRT_2).abs();
    ensure(err < 1e-9 && (&b.bound - inv_sqrt2()).abs() < ratio(1, 1_000_000_000), || {
        format!("bound {} off by {err:e}", to_f64(&b.bound))
    })?;
    ensure(!b.trivial, || "1/sqrt2 reported trivial".into())?;
    let clones = vec![ValueSource::Value(int(2)); 2];
    let report = shrinking_factors(&corr, &ValueSource::Value(base), &clones).map_err(|e| e.to_string())?;
    ensure(report.saturated, || "not reported saturated".into())?;

    for base in [int(2), int(1), ratio(1, 2)] {
        let t = mean_shrink_bound(&corr, &base).map_err(|e| e.to_string())?;
        ensure(t.trivial && t.bound >= int(1), || format!("base {} not trivial", q(&base)))?;
    }

    let prob = mean_shrink_bound(&fixtures::chsh_prob(), &(int(2) + sqrt2())).map_err(|e| e.to_string())?;
    let want = 3.0 / (2.0 + std::f64::consts::SQRT_2);
    ensure((to_f64(&prob.bound) - want).abs() < 1e-9, || format!("prob form gives {}", to_f64(&prob.bound)))?;
    Ok(format!(
        "correlator {:.12} saturated, prob form {:.12}",
        to_f64(&b.bound),
        to_f64(&prob.bound)
    ))
}

fn criterion_8() -> Outcome {
    let f = fixtures::chsh_corr();
    let (g, offset) = f.to_probability_form().and_then(|f| f.normalize_nonneg()).map_err(|e| e.to_string())?;
    ensure(offset == int(8), || format!("offset {}", q(&offset)))?;
    for seed in 0..100 {
        let p = sample_ns_behavior(&fixtures::chsh_scenario(), 5000 + seed, 1 + (seed % 3) as usize)
            .map_err(|e| e.to_string())?;
        let d = g.evaluate(&p).unwrap() - f.evaluate(&p).unwrap();
        ensure(d == int(8), || format!("seed {seed}: difference {}", q(&d)))?;
    }
    Ok("100 samples, difference 8/1 each".into())
}

fn criterion_9(ledger: &mut Ledger) -> Outcome {
    // Extra LPs over random objectives, alongside the ones the gate ran.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let extended = Scenario::new(vec![PartySpec::new(2, 2); 3]).map_err(|e| e.to_string())?;
    for i in 0..20 {
        let scenario = if i % 2 == 0 { fixtures::chsh_scenario() } else { extended.clone() };
        let opt = ns_maximize(&scenario, random_objective(&scenario, &mut rng)).map_err(|e| e.to_string())?;
        ledger.record(&format!("random objective {i}"), &opt);
    }
    for (label, opt) in &ledger.lps {
        opt.check_certificate().map_err(|e| format!("{label}: {e}"))?;
        let x = &opt.solution.primal;
        ensure(x.iter().all(|v| !v.is_negative()), || format!("{label}: negative primal"))?;
        for (k, c) in opt.problem.constraints.iter().enumerate() {
            let lhs: Rational = c.row.iter().zip(x).filter(|(a, _)| !a.is_zero()).map(|(a, v)| a * v).sum();
            ensure(lhs == c.rhs, || format!("{label}: row {k} residual {}", q(&(lhs - &c.rhs))))?;
        }
        ensure(opt.solution.reduced_costs.iter().all(|r| !r.is_positive()), || {
            format!("{label}: positive reduced cost")
        })?;
    }
    Ok(format!("{} LPs certified, residuals zero", ledger.lps.len()))
}

fn main() -> ExitCode {
    let mut ledger = Ledger::default();
    let mut failures = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| {
        match outcome {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {n}: {name}: {why}");
            }
        }
    };
    report(1, "CHSH local and no-signaling bounds", criterion_1(&mut ledger));
    report(2, "monogamy LP tightness", criterion_2(&mut ledger));
    report(3, "correlator-form CHSH trade-off", criterion_3(&ledger));
    report(4, "violation implies signaling", criterion_4());
    report(5, "seeded no-signaling property suite", criterion_5());
    report(6, "multipartite Mermin cut", criterion_6(&mut ledger));
    report(7, "cloning shrinking-factor bound", criterion_7());
    report(8, "normalization affinity", criterion_8());
    report(9, "LP optimality certificates", criterion_9(&mut ledger));
    if failures == 0 {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 9 criteria fail");
        ExitCode::FAILURE
    }
}
