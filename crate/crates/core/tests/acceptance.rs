//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use pattern_waits::analysis::{evaluate_gf, penney_search, scan_patterns, scan_probability, ScanSpec};
use pattern_waits::correlation::{iid_correlation, iid_correlation_sum, CorrelationTable};
use pattern_waits::linalg::{solve_exact, Matrix};
use pattern_waits::linear_system::{
    check_stationary_restart, determinant_polynomial, expected_leading_term, solve_at, solve_common_head,
};
use pattern_waits::model::{Pattern, PatternCollection};
use pattern_waits::oracle::{exact_summary, simulate, SimulationConfig};
use pattern_waits::rational::{int, ratio};
use rand::Rng;

use common::{example_one, example_two, fair_coin, heads_tails, valid_instances, Shape, SMALL};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expect_eq<T: PartialEq + std::fmt::Display>(what: &str, got: &T, want: &T) -> Result<(), String> {
    ensure(got == want, || format!("{what}: got {got}, expected {want}"))
}

const RANDOM_SEED: u64 = 0x5eed_0005;

fn example_one_golden() -> Outcome {
    let (chain, coll) = example_one();
    let started = Instant::now();
    let s = solve_at::<BigRational>(&chain, &coll, &int(1)).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    for (name, want) in [("A", ratio(1, 10)), ("B", ratio(1, 10)), ("C", ratio(8, 10))] {
        expect_eq(&format!("f_{name}"), &s.f[name], &want)?;
    }
    for (label, want) in [("1", ratio(44, 15)), ("2", ratio(44, 15)), ("3", ratio(24, 15))] {
        expect_eq(&format!("F_{label}"), &s.big_f[label], &want)?;
    }
    expect_eq("E(tau)", s.mean_tau.as_ref().unwrap(), &ratio(127, 15))?;
    ensure(elapsed < Duration::from_millis(10), || format!("took {elapsed:?}"))?;
    Ok(format!("solved in {elapsed:?}"))
}

fn example_one_generating_function() -> Outcome {
    let (chain, coll) = example_one();
    for z in [int(1), ratio(3, 2), int(2), int(5)] {
        let closed = (int(16) * &z * &z - int(1)) / (int(3) * &z * (int(32) * &z * &z * &z - int(24) * &z * &z - int(3)));
        let point = evaluate_gf::<BigRational>(&chain, &coll, &z).map_err(|e| e.to_string())?;
        expect_eq(&format!("f({z})"), &point.f_total, &closed)?;
    }
    Ok("z in {1, 3/2, 2, 5}".into())
}

fn example_one_common_head() -> Outcome {
    let (chain, coll) = example_one();
    let reduced = solve_common_head::<BigRational>(&chain, &coll).map_err(|e| e.to_string())?;

    // the displayed system: the coefficients are g̃_KT(1) − g̃_KA(1)
    let table = CorrelationTable::build(&chain, &coll).map_err(|e| e.to_string())?;
    let g = |k: usize, t: usize| table.gtilde(k, t).eval(&int(1));
    let displayed = [
        [int(1), int(1), int(1)],
        [int(-16), int(16), int(0)],
        [int(-16), int(0), int(2)],
    ];
    for (row, t) in displayed[1..].iter().zip([1, 2]) {
        for (k, want) in row.iter().enumerate() {
            expect_eq(&format!("coefficient ({k}, {t})"), &(g(k, t) - g(k, 0)), want)?;
        }
    }
    let a = Matrix::from_rows(displayed.iter().map(|r| r.to_vec()).collect());
    let b = Matrix::column(vec![int(1), int(0), int(0)]);
    let by_hand = solve_exact(&a, &b).ok_or("displayed system is singular")?.into_column();

    for ((name, want), hand) in [("A", ratio(1, 10)), ("B", ratio(1, 10)), ("C", ratio(8, 10))].iter().zip(&by_hand) {
        expect_eq(&format!("f_{name}"), &reduced[*name], want)?;
        expect_eq(&format!("hand-solved f_{name}"), hand, want)?;
    }
    Ok("f = (1/10, 1/10, 4/5)".into())
}

fn example_two_golden() -> Outcome {
    let (chain, coll) = example_two();
    let s = solve_at::<BigRational>(&chain, &coll, &int(1)).map_err(|e| e.to_string())?;
    expect_eq("f_A", &s.f["A"], &ratio(4, 13))?;
    expect_eq("f_B", &s.f["B"], &ratio(9, 13))?;
    expect_eq("F_1", &s.big_f["1"], &ratio(16, 13))?;
    expect_eq("F_2", &s.big_f["2"], &ratio(16, 13))?;
    expect_eq("E(tau)", s.mean_tau.as_ref().unwrap(), &ratio(45, 13))?;
    let r = check_stationary_restart(&chain, &coll, &s).map_err(|e| e.to_string())?;
    ensure(r.holds && r.consistent, || "restart property not reported".into())?;
    expect_eq("c", r.c.as_ref().unwrap(), &ratio(32, 13))?;
    expect_eq("1 + c", r.mean_tau.as_ref().unwrap(), &ratio(45, 13))?;
    Ok("restart holds with c = 32/13".into())
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let instances = valid_instances(RANDOM_SEED, 200, SMALL);
    for (i, (chain, coll)) in instances.iter().enumerate() {
        let s = solve_at::<BigRational>(chain, coll, &int(1)).map_err(|e| format!("instance {i}: {e}"))?;
        let o = exact_summary::<BigRational>(chain, coll).map_err(|e| format!("instance {i}: {e}"))?;
        expect_eq(&format!("instance {i} E(tau)"), s.mean_tau.as_ref().unwrap(), &o.mean)?;
        for name in coll.names() {
            expect_eq(&format!("instance {i} f_{name}"), &s.f[&name], &o.stop_probs[&name])?;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("200 instances in {elapsed:.2?}"))
}

fn identity_suite() -> Outcome {
    let instances = valid_instances(RANDOM_SEED, 200, SMALL);
    for (i, (chain, coll)) in instances.iter().enumerate() {
        for z in [int(1), int(2)] {
            let s = solve_at::<BigRational>(chain, coll, &z).map_err(|e| format!("instance {i}: {e}"))?;
            let lhs = (&z - int(1)) * s.big_f_total() + &z * s.f_total();
            expect_eq(&format!("instance {i} identity at z = {z}"), &lhs, &z)?;
            if z.is_one() {
                expect_eq(&format!("instance {i} sum f_K"), &s.f_total(), &int(1))?;
                let sojourn: BigRational = s.big_f.values().sum();
                expect_eq(&format!("instance {i} E(tau)"), s.mean_tau.as_ref().unwrap(), &(int(1) + sojourn))?;
            }
        }
    }
    Ok("200 instances, z in {1, 2}".into())
}

fn iid_reduction() -> Outcome {
    let mut rng = common::rng(RANDOM_SEED ^ 7);
    let mut done = 0;
    let mut pairs = 0;
    while done < 50 {
        let m = rng.random_range(2..=4);
        let chain = common::random_iid_chain(&mut rng, m, 8);
        let coll = common::random_collection(&mut rng, m, 3, 4);
        if pattern_waits::model::validate(&chain, &coll).is_err() {
            continue;
        }
        for k in coll.patterns() {
            for t in coll.patterns() {
                for z in [int(1), ratio(3, 2), int(2)] {
                    iid_correlation(&chain, k, t, &z).map_err(|e| format!("instance {done}: {e}"))?;
                    pairs += 1;
                }
            }
        }
        done += 1;
    }

    for (text, want, chain) in [("11", 6, fair_coin()), ("HTH", 10, heads_tails())] {
        let p = Pattern::from_labels(chain.alphabet(), text).map_err(|e| e.to_string())?;
        let coll = PatternCollection::new(vec![p.clone()]).unwrap();
        let s = solve_at::<BigRational>(&chain, &coll, &int(1)).map_err(|e| e.to_string())?;
        expect_eq(&format!("E(tau_{text})"), s.mean_tau.as_ref().unwrap(), &int(want))?;
        let o = exact_summary::<BigRational>(&chain, &coll).map_err(|e| e.to_string())?;
        expect_eq(&format!("oracle E(tau_{text})"), &o.mean, &int(want))?;
        let conway = iid_correlation_sum(&chain, &p, &p, &int(1));
        expect_eq(&format!("leading-number sum for {text}"), &conway, &int(want))?;
    }
    Ok(format!("50 instances, {pairs} correlation evaluations; E(11) = 6, E(HTH) = 10"))
}

fn penney() -> Outcome {
    let coin = fair_coin();
    let opponent = Pattern::from_labels(coin.alphabet(), "111").unwrap();
    let report = penney_search::<BigRational>(&coin, &opponent, 3).map_err(|e| e.to_string())?;
    expect_eq("best", &report.best.name().to_string(), &"011".to_string())?;
    expect_eq("best probability", &report.best_prob, &ratio(7, 8))?;
    ensure(report.candidates.len() == 7, || format!("{} candidates", report.candidates.len()))?;
    for c in &report.candidates {
        let pair = PatternCollection::new(vec![opponent.clone(), c.pattern.clone()]).unwrap();
        let o = exact_summary::<BigRational>(&coin, &pair).map_err(|e| e.to_string())?;
        expect_eq(&format!("oracle for {}", c.pattern.name()), &c.win_probability, &o.stop_probs[c.pattern.name()])?;
    }
    Ok("best 011 at 7/8, 7 candidates confirmed".into())
}

fn scan() -> Outcome {
    let coin = fair_coin();
    let spec = ScanSpec {
        window: 4,
        threshold: 2,
        horizon: 3,
    };
    let coll = scan_patterns(coin.alphabet(), &spec).map_err(|e| e.to_string())?;
    ensure(coll.names() == ["11", "101", "1001"], || format!("collection {:?}", coll.names()))?;
    let p = scan_probability::<BigRational>(&coin, &spec).map_err(|e| e.to_string())?;

    let mut hits = 0;
    for path in 0u32..8 {
        let bits: Vec<u32> = (0..3).map(|i| path >> i & 1).collect();
        let best = (0..3)
            .map(|s| bits[s..(s + spec.window).min(3)].iter().sum::<u32>())
            .max()
            .unwrap();
        if best as usize >= spec.threshold {
            hits += 1;
        }
    }
    let brute = ratio(hits, 8);
    expect_eq("brute force", &brute, &ratio(1, 2))?;
    expect_eq("P(tau_C <= 3)", &p, &brute)?;
    Ok("C = {11, 101, 1001}, P = 1/2".into())
}

fn simulation() -> Outcome {
    let (chain, coll) = example_one();
    let mut config = SimulationConfig::new(1_000_000, 20_240_601);
    let started = Instant::now();
    let first = simulate(&chain, &coll, config).map_err(|e| e.to_string())?;
    config.workers = Some(3);
    let second = simulate(&chain, &coll, config).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(format!("{first:?}") == format!("{second:?}"), || "rerun differs".into())?;

    let mean_z = (first.mean - 127.0 / 15.0) / first.mean_se;
    ensure(mean_z.abs() < 4.0, || format!("mean {} is {mean_z:.2} standard errors off", first.mean))?;
    let mut worst = mean_z.abs();
    for (name, p) in [("A", 0.1), ("B", 0.1), ("C", 0.8)] {
        let z = (first.stop_freq[name] - p) / first.stop_se[name];
        ensure(z.abs() < 4.0, || format!("f_{name} is {z:.2} standard errors off"))?;
        worst = worst.max(z.abs());
    }
    Ok(format!("mean {:.5}, largest |z| {worst:.2}, two runs in {elapsed:.2?}", first.mean))
}

fn determinant() -> Outcome {
    let tiny = Shape {
        max_states: 3,
        max_patterns: 2,
        max_len: 3,
        max_denom: 8,
    };
    let mut instances = valid_instances(RANDOM_SEED ^ 11, 18, tiny);
    instances.push(example_one());
    instances.push(example_two());
    for (i, (chain, coll)) in instances.iter().enumerate() {
        let phi = determinant_polynomial(chain, coll).map_err(|e| format!("instance {i}: {e}"))?;
        let (degree, lead) = expected_leading_term(chain, coll);
        ensure(phi.degree() == Some(degree), || format!("instance {i}: degree {:?}, expected {degree}", phi.degree()))?;
        expect_eq(&format!("instance {i} leading coefficient"), phi.leading().unwrap(), &lead)?;
        ensure(!lead.is_zero(), || format!("instance {i}: zero leading term"))?;
    }
    Ok("20 instances".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("example 1 golden values", example_one_golden),
        ("example 1 generating function", example_one_generating_function),
        ("example 1 common-head system", example_one_common_head),
        ("example 2 golden values and restart", example_two_golden),
        ("oracle equivalence on random instances", oracle_equivalence),
        ("generating-function identities", identity_suite),
        ("i.i.d. reduction", iid_reduction),
        ("Penney response search", penney),
        ("scan statistic", scan),
        ("simulation statistics and determinism", simulation),
        ("determinant leading term", determinant),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
