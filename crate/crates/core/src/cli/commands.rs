use std::fmt::Write as _;

use indexmap::IndexMap;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Map, Value};

use super::instance::Instance;
use super::report::{cell, mode_name, number, show, table, Report};
use crate::analysis::{evaluate_gf, penney_search, scan_patterns, scan_probability, ScanSpec};
use crate::error::{Error, Result};
use crate::linear_system::{check_stationary_restart, solve_at, RestartReport};
use crate::model::{Pattern, PatternCollection};
use crate::oracle::{exact_distribution, exact_summary, simulate, SimulationConfig};
use crate::rational::format_decimal;
use crate::scalar::Scalar;

fn describe(inst: &Instance, collection: &PatternCollection) -> String {
    let alphabet = inst.chain.alphabet();
    let patterns: Vec<String> = collection
        .patterns()
        .iter()
        .map(|p| format!("{} = {}", p.name(), alphabet.render(p.symbols())))
        .collect();
    format!(
        "{} states, {} patterns ({})",
        alphabet.len(),
        collection.len(),
        patterns.join(", ")
    )
}

fn numbers<S: Scalar>(values: &IndexMap<String, S>) -> Value {
    Value::Object(values.iter().map(|(k, v)| (k.clone(), number(v))).collect())
}

pub fn analyze<S: Scalar>(inst: &Instance, zs: &[BigRational]) -> Result<Report> {
    let chain = &inst.chain;
    let collection = inst.collection()?;
    let solution = solve_at::<S>(chain, collection, &BigRational::one())?;
    let mean = solution.mean_tau.clone().expect("E(tau) is defined at z = 1");

    let oracle = exact_summary::<S>(chain, collection)?;
    let names = collection.names();
    if !oracle.mean.approx_eq(&mean) || !names.iter().all(|n| oracle.stop_probs[n].approx_eq(&solution.f[n])) {
        return Err(Error::OracleDisagreement(format!(
            "linear system and automaton oracle disagree: E(tau) {} vs {}",
            show(&mean),
            show(&oracle.mean)
        )));
    }
    let restart: Option<RestartReport<S>> = match check_stationary_restart(chain, collection, &solution) {
        Ok(r) => Some(r),
        Err(Error::NotIrreducible) => None,
        Err(e) => return Err(e),
    };
    let points = zs
        .iter()
        .map(|z| evaluate_gf::<S>(chain, collection, z))
        .collect::<Result<Vec<_>>>()?;

    let mut text = String::new();
    writeln!(text, "instance: {}", describe(inst, collection)).unwrap();
    writeln!(text, "\nat z = 1").unwrap();
    for (name, v) in &solution.f {
        writeln!(text, "  f_{name} = {}", show(v)).unwrap();
    }
    for (label, v) in &solution.big_f {
        writeln!(text, "  F_{label} = {}", show(v)).unwrap();
    }
    writeln!(text, "  E(tau) = {}", show(&mean)).unwrap();
    writeln!(text, "  Var(tau) = {}", show(&oracle.variance())).unwrap();
    writeln!(text, "  oracle: E(tau) and every f_K agree").unwrap();
    match &restart {
        Some(r) if r.holds => writeln!(
            text,
            "  stationary restart: holds, c = {}",
            show(r.c.as_ref().expect("c is set when the property holds"))
        )
        .unwrap(),
        Some(_) => writeln!(text, "  stationary restart: does not hold").unwrap(),
        None => writeln!(text, "  stationary restart: chain is not irreducible").unwrap(),
    }
    for p in &points {
        writeln!(text, "\nat z = {}", p.z).unwrap();
        for (name, v) in &p.per_pattern {
            writeln!(text, "  f_{name}(z) = {}", show(v)).unwrap();
        }
        writeln!(text, "  f(z) = {}", show(&p.f_total)).unwrap();
        writeln!(text, "  F(z) = {}", show(&p.big_f_total)).unwrap();
    }

    let json = json!({
        "mode": mode_name::<S>(),
        "patterns": names,
        "z1": {
            "f": numbers(&solution.f),
            "F": numbers(&solution.big_f),
            "mean_tau": number(&mean),
            "variance_tau": number(&oracle.variance()),
            "oracle_agrees": true,
        },
        "restart": restart.as_ref().map(|r| json!({
            "holds": r.holds,
            "c": r.c.as_ref().map(number),
            "stationary": numbers(&r.stationary),
        })),
        "gf": points.iter().map(|p| json!({
            "z": p.z.to_string(),
            "f": number(&p.f_total),
            "F": number(&p.big_f_total),
            "per_pattern": numbers(&p.per_pattern),
        })).collect::<Vec<_>>(),
    });
    Ok(Report { text, json })
}

pub fn distribution<S: Scalar>(inst: &Instance, horizon: usize) -> Result<Report> {
    let collection = inst.collection()?;
    let dist = exact_distribution::<S>(&inst.chain, collection, horizon)?;
    let names = collection.names();

    let mut header = vec!["n".to_string()];
    header.extend(names.iter().map(|n| format!("S_{n}(n)")));
    header.push("P(tau <= n)".into());
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for row in &dist.rows {
        let cumulative = dist.cumulative(row.n);
        let mut cells = vec![row.n.to_string()];
        cells.extend(row.stop.iter().map(cell));
        cells.push(cell(&cumulative));
        rows.push(cells);
        let stop: Map<String, Value> = names.iter().cloned().zip(row.stop.iter().map(number)).collect();
        json_rows.push(json!({"n": row.n, "stop": stop, "cumulative": number(&cumulative)}));
    }
    let total = dist.cumulative(horizon);

    let mut text = format!("instance: {}\n\n", describe(inst, collection));
    text.push_str(&table(&header, &rows));
    writeln!(text, "\nP(tau <= {horizon}) = {}", show(&total)).unwrap();
    let json = json!({
        "mode": mode_name::<S>(),
        "horizon": horizon,
        "patterns": names,
        "rows": json_rows,
        "cumulative": number(&total),
    });
    Ok(Report { text, json })
}

pub fn simulation<S: Scalar>(inst: &Instance, config: SimulationConfig) -> Result<Report> {
    let collection = inst.collection()?;
    let exact = exact_summary::<S>(&inst.chain, collection)?;
    let sim = simulate(&inst.chain, collection, config)?;
    let z_score = |empirical: f64, se: f64, target: f64| {
        if se > 0.0 {
            (empirical - target) / se
        } else if empirical == target {
            0.0
        } else {
            f64::INFINITY
        }
    };

    let header: Vec<String> = ["quantity", "empirical", "std error", "exact", "z-score"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mean_z = z_score(sim.mean, sim.mean_se, exact.mean.to_f64());
    let mut rows = vec![vec![
        "E(tau)".to_string(),
        format_decimal(sim.mean),
        format_decimal(sim.mean_se),
        show(&exact.mean),
        format!("{mean_z:.3}"),
    ]];
    let mut per_pattern = Map::new();
    for name in collection.names() {
        let (freq, se) = (sim.stop_freq[&name], sim.stop_se[&name]);
        let target = &exact.stop_probs[&name];
        let z = z_score(freq, se, target.to_f64());
        rows.push(vec![
            format!("f_{name}"),
            format_decimal(freq),
            format_decimal(se),
            show(target),
            format!("{z:.3}"),
        ]);
        per_pattern.insert(
            name.clone(),
            json!({
                "count": sim.stop_counts[&name],
                "frequency": freq,
                "std_error": se,
                "exact": number(target),
                "z_score": z,
            }),
        );
    }

    let mut text = format!("instance: {}\n", describe(inst, collection));
    writeln!(text, "trials: {}, seed: {}\n", sim.trials, sim.seed).unwrap();
    text.push_str(&table(&header, &rows));
    let json = json!({
        "mode": mode_name::<S>(),
        "trials": sim.trials,
        "seed": sim.seed,
        "mean": {
            "empirical": sim.mean,
            "std_error": sim.mean_se,
            "exact": number(&exact.mean),
            "z_score": mean_z,
        },
        "patterns": per_pattern,
    });
    Ok(Report { text, json })
}

pub fn penney<S: Scalar>(inst: &Instance, opponent: &Pattern, length: usize) -> Result<Report> {
    let alphabet = inst.chain.alphabet();
    let report = penney_search::<S>(&inst.chain, opponent, length)?;
    let header: Vec<String> = ["rank", "response", "win probability"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = report
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| vec![(i + 1).to_string(), c.pattern.name().to_string(), show(&c.win_probability)])
        .collect();

    let opp = alphabet.render(opponent.symbols());
    let mut text = format!("opponent: {opp}, responses of length {length}\n\n");
    text.push_str(&table(&header, &rows));
    writeln!(text, "\nbest response: {} wins with probability {}", report.best.name(), show(&report.best_prob)).unwrap();
    for (p, reason) in &report.excluded {
        writeln!(text, "excluded {}: {reason}", p.name()).unwrap();
    }
    let json = json!({
        "mode": mode_name::<S>(),
        "opponent": opp,
        "length": length,
        "candidates": report.candidates.iter().map(|c| json!({
            "response": c.pattern.name(),
            "win_probability": number(&c.win_probability),
        })).collect::<Vec<_>>(),
        "best": report.best.name(),
        "best_probability": number(&report.best_prob),
        "excluded": report.excluded.iter().map(|(p, reason)| json!({
            "response": p.name(),
            "reason": reason,
        })).collect::<Vec<_>>(),
    });
    Ok(Report { text, json })
}

pub fn scan<S: Scalar>(inst: &Instance, spec: ScanSpec) -> Result<Report> {
    let collection = scan_patterns(inst.chain.alphabet(), &spec)?;
    let p = scan_probability::<S>(&inst.chain, &spec)?;
    let names = collection.names();
    let text = format!(
        "window {}, threshold {}, horizon {}\nC = {{{}}}\nP(tau_C <= {}) = {}\n",
        spec.window,
        spec.threshold,
        spec.horizon,
        names.join(", "),
        spec.horizon,
        show(&p)
    );
    let json = json!({
        "mode": mode_name::<S>(),
        "window": spec.window,
        "threshold": spec.threshold,
        "horizon": spec.horizon,
        "collection": names,
        "probability": number(&p),
    });
    Ok(Report { text, json })
}
