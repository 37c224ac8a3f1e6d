//! Random instances for the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use pattern_waits::model::{validate, Alphabet, ChainSpec, Pattern, PatternCollection};
use pattern_waits::rational::{int, ratio};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_states: usize,
    pub max_patterns: usize,
    pub max_len: usize,
    pub max_denom: i64,
}

pub const SMALL: Shape = Shape {
    max_states: 4,
    max_patterns: 3,
    max_len: 4,
    max_denom: 8,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(m: usize) -> Alphabet {
    Alphabet::new((1..=m).map(|i| i.to_string())).unwrap()
}

/// A probability vector `(n_1/d, ..., n_m/d)` with `d ≤ max_denom`, each of
/// the `d` units dropped into a uniformly chosen slot. With `positive`, every
/// slot gets at least one unit.
pub fn random_distribution(rng: &mut impl Rng, m: usize, max_denom: i64, positive: bool) -> Vec<BigRational> {
    let lo = if positive { m as i64 } else { 1 };
    let d = rng.random_range(lo..=max_denom.max(lo));
    let mut counts = vec![if positive { 1 } else { 0 }; m];
    let free = d - counts.iter().sum::<i64>();
    for _ in 0..free {
        counts[rng.random_range(0..m)] += 1;
    }
    counts.into_iter().map(|c| ratio(c, d)).collect()
}

pub fn random_chain(rng: &mut impl Rng, m: usize, max_denom: i64) -> ChainSpec {
    let initial = random_distribution(rng, m, max_denom, false);
    let transition = (0..m).map(|_| random_distribution(rng, m, max_denom, false)).collect();
    ChainSpec::new(alphabet(m), initial, transition).unwrap()
}

pub fn random_iid_chain(rng: &mut impl Rng, m: usize, max_denom: i64) -> ChainSpec {
    ChainSpec::iid(alphabet(m), random_distribution(rng, m, max_denom, true)).unwrap()
}

pub fn random_collection(rng: &mut impl Rng, m: usize, max_patterns: usize, max_len: usize) -> PatternCollection {
    let count = rng.random_range(1..=max_patterns);
    let patterns = (0..count)
        .map(|i| {
            let len = rng.random_range(1..=max_len);
            let symbols = (0..len).map(|_| rng.random_range(0..m)).collect();
            Pattern::new(format!("P{i}"), symbols).unwrap()
        })
        .collect();
    PatternCollection::new(patterns).unwrap()
}

/// The first `count` instances from `seed` that pass A.1 to A.3.
pub fn valid_instances(seed: u64, count: usize, shape: Shape) -> Vec<(ChainSpec, PatternCollection)> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = rng.random_range(1..=shape.max_states);
        let chain = random_chain(&mut rng, m, shape.max_denom);
        let collection = random_collection(&mut rng, m, shape.max_patterns, shape.max_len);
        if validate(&chain, &collection).is_ok() {
            out.push((chain, collection));
        }
    }
    out
}

pub fn fair_coin() -> ChainSpec {
    ChainSpec::iid(Alphabet::new(["0", "1"]).unwrap(), vec![ratio(1, 2), ratio(1, 2)]).unwrap()
}

pub fn heads_tails() -> ChainSpec {
    ChainSpec::iid(Alphabet::new(["H", "T"]).unwrap(), vec![ratio(1, 2), ratio(1, 2)]).unwrap()
}

pub fn example_one() -> (ChainSpec, PatternCollection) {
    let a = alphabet(3);
    let transition = vec![
        vec![ratio(3, 4), int(0), ratio(1, 4)],
        vec![int(0), ratio(3, 4), ratio(1, 4)],
        vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)],
    ];
    let chain = ChainSpec::new(a.clone(), vec![ratio(1, 3); 3], transition).unwrap();
    (chain, named(&a, &[("A", "323"), ("B", "313"), ("C", "33")]))
}

pub fn example_two() -> (ChainSpec, PatternCollection) {
    let a = alphabet(2);
    let transition = vec![vec![ratio(1, 4), ratio(3, 4)], vec![ratio(3, 4), ratio(1, 4)]];
    let chain = ChainSpec::new(a.clone(), vec![ratio(9, 13), ratio(4, 13)], transition).unwrap();
    (chain, named(&a, &[("A", "22"), ("B", "121")]))
}

pub fn named(alphabet: &Alphabet, patterns: &[(&str, &str)]) -> PatternCollection {
    PatternCollection::new(
        patterns
            .iter()
            .map(|(n, s)| Pattern::new(*n, alphabet.parse_sequence(s).unwrap()).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Pattern collection named after the rendered symbols.
pub fn labelled(alphabet: &Alphabet, patterns: &[&str]) -> PatternCollection {
    PatternCollection::new(patterns.iter().map(|p| Pattern::from_labels(alphabet, p).unwrap()).collect()).unwrap()
}
