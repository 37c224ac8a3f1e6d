//! Monte Carlo estimate of `E(τ)` and the stopping probabilities.
//!
//! Trial `t` draws from a ChaCha8 stream selected by `(seed, t)`, and all
//! accumulators are integers, so the report does not depend on how trials
//! are scheduled across workers.

use indexmap::IndexMap;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::automaton::build_automaton;
use crate::error::{Error, Result};
use crate::model::{ChainSpec, PatternCollection};
use crate::rational::to_f64;

pub const DEFAULT_STEP_CAP: u64 = 10_000_000;
const BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub step_cap: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimulationConfig {
            trials,
            seed,
            step_cap: DEFAULT_STEP_CAP,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub mean_se: f64,
    pub stop_counts: IndexMap<String, u64>,
    pub stop_freq: IndexMap<String, f64>,
    pub stop_se: IndexMap<String, f64>,
}

/// Inverse-CDF sampler over one probability row.
#[derive(Debug, Clone)]
struct Sampler {
    cumulative: Vec<f64>,
    fallback: usize,
}

impl Sampler {
    fn new(row: &[num_rational::BigRational]) -> Self {
        let mut acc = 0.0;
        let cumulative = row
            .iter()
            .map(|p| {
                acc += to_f64(p);
                acc
            })
            .collect();
        let fallback = row.iter().rposition(|p| *p > num_rational::BigRational::default()).unwrap_or(0);
        Sampler { cumulative, fallback }
    }

    fn draw(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.cumulative.len() {
            i
        } else {
            self.fallback
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    sum: u128,
    sum_sq: u128,
    counts: Vec<u64>,
}

pub fn simulate(chain: &ChainSpec, collection: &PatternCollection, config: SimulationConfig) -> Result<SimulationReport> {
    if config.trials == 0 {
        return Err(Error::BadSpec("trials must be at least 1".into()));
    }
    let automaton = build_automaton(collection, chain.alphabet());
    let first = Sampler::new(chain.initial());
    let rows: Vec<Sampler> = chain.transition().iter().map(|r| Sampler::new(r)).collect();
    let c = collection.len();

    let run_trial = |trial: u64| -> Result<(u64, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial);
        let mut state = first.draw(rng.random::<f64>());
        let mut node = automaton.next(automaton.root(), state);
        let mut t = 1u64;
        loop {
            if let Some(k) = automaton.output(node) {
                return Ok((t, k));
            }
            if t >= config.step_cap {
                return Err(Error::StepCapExceeded {
                    trial,
                    cap: config.step_cap,
                });
            }
            state = rows[state].draw(rng.random::<f64>());
            node = automaton.next(node, state);
            t += 1;
        }
    };

    let batches = config.trials.div_ceil(BATCH);
    let run_batch = |b: u64| -> Result<Tally> {
        let mut tally = Tally {
            counts: vec![0; c],
            ..Tally::default()
        };
        for trial in b * BATCH..((b + 1) * BATCH).min(config.trials) {
            let (tau, k) = run_trial(trial)?;
            tally.sum += u128::from(tau);
            tally.sum_sq += u128::from(tau) * u128::from(tau);
            tally.counts[k] += 1;
        }
        Ok(tally)
    };
    let collect = || (0..batches).into_par_iter().map(run_batch).collect::<Vec<_>>();
    let results = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::BadSpec(format!("cannot start {w} workers: {e}")))?
            .install(collect),
        None => collect(),
    };

    let mut total = Tally {
        counts: vec![0; c],
        ..Tally::default()
    };
    // batches are in index order, so the first error is the lowest failing trial
    for r in results {
        let t = r?;
        total.sum += t.sum;
        total.sum_sq += t.sum_sq;
        for (acc, v) in total.counts.iter_mut().zip(t.counts) {
            *acc += v;
        }
    }

    let n = config.trials as f64;
    let mean = total.sum as f64 / n;
    let var = if config.trials > 1 {
        ((total.sum_sq as f64) - n * mean * mean).max(0.0) / (n - 1.0)
    } else {
        0.0
    };
    let names = collection.names();
    let stop_counts: IndexMap<String, u64> = names.iter().cloned().zip(total.counts.iter().copied()).collect();
    let stop_freq: IndexMap<String, f64> = stop_counts.iter().map(|(k, &v)| (k.clone(), v as f64 / n)).collect();
    let stop_se = stop_freq
        .iter()
        .map(|(k, &p)| (k.clone(), (p * (1.0 - p) / n).sqrt()))
        .collect();
    Ok(SimulationReport {
        trials: config.trials,
        seed: config.seed,
        mean,
        mean_se: (var / n).sqrt(),
        stop_counts,
        stop_freq,
        stop_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alphabet, Pattern};
    use crate::rational::{int, ratio};

    fn coll(a: &Alphabet, pats: &[&str]) -> PatternCollection {
        PatternCollection::new(pats.iter().map(|p| Pattern::from_labels(a, p).unwrap()).collect()).unwrap()
    }

    #[test]
    fn certain_first_symbol() {
        let a = Alphabet::new(["0", "1"]).unwrap();
        let chain = ChainSpec::iid(a.clone(), vec![int(0), int(1)]).unwrap();
        let r = simulate(&chain, &coll(&a, &["1"]), SimulationConfig::new(1, 7)).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.stop_counts["1"], 1);
    }

    #[test]
    fn cycle_never_matching_hits_the_cap() {
        let a = Alphabet::new(["0", "1", "2"]).unwrap();
        let cycle = vec![
            vec![int(0), int(1), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(0), int(1)],
        ];
        let chain = ChainSpec::new(a.clone(), vec![int(1), int(0), int(0)], cycle).unwrap();
        let mut config = SimulationConfig::new(3, 1);
        config.step_cap = 1000;
        let err = simulate(&chain, &coll(&a, &["2"]), config).unwrap_err();
        assert_eq!(err, Error::StepCapExceeded { trial: 0, cap: 1000 });
    }

    #[test]
    fn worker_count_does_not_change_the_report() {
        let a = Alphabet::new(["0", "1"]).unwrap();
        let chain = ChainSpec::iid(a.clone(), vec![ratio(1, 2); 2]).unwrap();
        let c = coll(&a, &["110", "011"]);
        let mut config = SimulationConfig::new(20_000, 99);
        config.workers = Some(1);
        let one = simulate(&chain, &c, config).unwrap();
        config.workers = Some(4);
        let four = simulate(&chain, &c, config).unwrap();
        assert_eq!(one, four);
        // 011 beats 110 with probability 3/4
        assert!((four.stop_freq["011"] - 0.75).abs() < 4.0 * four.stop_se["011"]);
    }

    #[test]
    fn sampler_skips_zero_mass() {
        let s = Sampler::new(&[int(0), ratio(1, 2), int(0), ratio(1, 2)]);
        assert_eq!(s.draw(0.0), 1);
        assert_eq!(s.draw(0.49), 1);
        assert_eq!(s.draw(0.5), 3);
        assert_eq!(s.draw(0.9999999), 3);
    }
}
