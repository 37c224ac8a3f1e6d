//! Applications on top of the solver and the oracle: generating-function
//! points, scan statistics and the Penney-ante response search.

use std::cmp::Ordering;

use indexmap::IndexMap;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::correlation::internal_probability;
use crate::error::{Error, Result};
use crate::linear_system::solve_at;
use crate::model::{validate_a3, Alphabet, ChainSpec, Pattern, PatternCollection};
use crate::oracle::exact_distribution;
use crate::scalar::Scalar;

/// `f(z)`, `F(z)` and the per-pattern `f_K(z)` at one point `z ≥ 1`.
///
/// With `α = 1/z`, `f(z) = E(α^τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GfPoint<S> {
    pub z: BigRational,
    pub f_total: S,
    pub big_f_total: S,
    pub per_pattern: IndexMap<String, S>,
}

/// Solves at `z` and checks `(z − 1) F(z) + z f(z) = z`.
pub fn evaluate_gf<S: Scalar>(chain: &ChainSpec, collection: &PatternCollection, z: &BigRational) -> Result<GfPoint<S>> {
    let solution = solve_at::<S>(chain, collection, z)?;
    let f_total = solution.f_total();
    let big_f_total = solution.big_f_total();
    let zs = S::from_rational(z);
    let lhs = (zs.clone() - S::one()) * big_f_total.clone() + zs.clone() * f_total.clone();
    if !lhs.approx_eq(&zs) {
        return Err(Error::IdentityViolated(z.to_string()));
    }
    Ok(GfPoint {
        z: z.clone(),
        f_total,
        big_f_total,
        per_pattern: solution.f,
    })
}

/// `E(α^τ)` for `0 < α ≤ 1`, through `z = 1/α`.
pub fn evaluate_gf_alpha<S: Scalar>(
    chain: &ChainSpec,
    collection: &PatternCollection,
    alpha: &BigRational,
) -> Result<GfPoint<S>> {
    if *alpha <= BigRational::zero() || *alpha > BigRational::one() {
        return Err(Error::InvalidZ(format!("1/({alpha})")));
    }
    evaluate_gf(chain, collection, &alpha.recip())
}

/// Scan-statistic event: at least `threshold` successes inside some window of
/// `window` consecutive trials, observed up to time `horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanSpec {
    pub window: usize,
    pub threshold: usize,
    pub horizon: usize,
}

fn check_scan(spec: &ScanSpec) -> Result<()> {
    if spec.window == 0 {
        return Err(Error::BadSpec("window must be at least 1".into()));
    }
    if spec.threshold == 0 || spec.threshold > spec.window {
        return Err(Error::BadSpec(format!(
            "threshold {} must lie between 1 and the window {}",
            spec.threshold, spec.window
        )));
    }
    Ok(())
}

/// The success symbol of a binary alphabet: the one labelled `1` if present,
/// otherwise the second symbol.
pub fn success_symbol(alphabet: &Alphabet) -> Result<usize> {
    if alphabet.len() != 2 {
        return Err(Error::BadSpec(format!(
            "scan statistics need a binary alphabet, found {} symbols",
            alphabet.len()
        )));
    }
    Ok(alphabet.index_of("1").unwrap_or(1))
}

/// All binary words that start and end with a success, contain exactly
/// `threshold` successes and have length at most `window`. Ordered by length,
/// then lexicographically by symbol index.
pub fn scan_patterns(alphabet: &Alphabet, spec: &ScanSpec) -> Result<PatternCollection> {
    check_scan(spec)?;
    let one = success_symbol(alphabet)?;
    let zero = 1 - one;
    let k = spec.threshold;
    let mut patterns = Vec::new();
    if k == 1 {
        patterns.push(vec![one]);
    } else {
        for len in k..=spec.window {
            // choose positions of the k − 2 inner successes among len − 2 slots
            let inner = len - 2;
            let mut words = Vec::new();
            for mask in 0u64..(1u64 << inner) {
                if mask.count_ones() as usize != k - 2 {
                    continue;
                }
                let mut word = vec![one];
                word.extend((0..inner).map(|b| if mask >> (inner - 1 - b) & 1 == 1 { one } else { zero }));
                word.push(one);
                words.push(word);
            }
            words.sort();
            patterns.extend(words);
        }
    }
    PatternCollection::new(
        patterns
            .into_iter()
            .map(|w| Pattern::new(alphabet.render(&w), w))
            .collect::<Result<_>>()?,
    )
}

/// `P(τ_C ≤ T)` for the scan collection `C`.
pub fn scan_probability<S: Scalar>(chain: &ChainSpec, spec: &ScanSpec) -> Result<S> {
    if spec.horizon == 0 {
        return Err(Error::BadSpec("horizon must be at least 1".into()));
    }
    let collection = scan_patterns(chain.alphabet(), spec)?;
    let table = exact_distribution::<S>(chain, &collection, spec.horizon)?;
    Ok(table.cumulative(spec.horizon))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenneyCandidate<S> {
    pub pattern: Pattern,
    pub win_probability: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenneyReport<S> {
    pub opponent: Pattern,
    /// Sorted by win probability, best first; ties in symbol order.
    pub candidates: Vec<PenneyCandidate<S>>,
    /// Responses left out, with the reason.
    pub excluded: Vec<(Pattern, String)>,
    pub best: Pattern,
    pub best_prob: S,
}

/// Every same-length response `B` to `opponent`, scored by `P(τ = τ_B)` for
/// the collection `{opponent, B}`.
pub fn penney_search<S: Scalar>(chain: &ChainSpec, opponent: &Pattern, length: usize) -> Result<PenneyReport<S>> {
    if opponent.len() != length {
        return Err(Error::BadSpec(format!(
            "opponent {} has length {}, not {length}",
            opponent.name(),
            opponent.len()
        )));
    }
    let alphabet = chain.alphabet();
    let m = alphabet.len();
    let total = m
        .checked_pow(length as u32)
        .ok_or_else(|| Error::BadSpec("candidate space too large".into()))?;
    let opp_name = alphabet.render(opponent.symbols());
    let opponent_entry = Pattern::new(format!("{opp_name} (opponent)"), opponent.symbols().to_vec())?;

    let mut candidates = Vec::new();
    let mut excluded = Vec::new();
    for code in 0..total {
        let symbols: Vec<usize> = (0..length).rev().map(|i| code / m.pow(i as u32) % m).collect();
        let candidate = Pattern::new(alphabet.render(&symbols), symbols)?;
        if candidate.symbols() == opponent.symbols() {
            continue;
        }
        if internal_probability(chain, &candidate).is_zero() {
            excluded.push((candidate, "zero internal path probability".into()));
            continue;
        }
        let pair = PatternCollection::new(vec![opponent_entry.clone(), candidate.clone()])?;
        if let Err(e) = validate_a3(chain, &pair) {
            excluded.push((candidate, e.to_string()));
            continue;
        }
        let solution = solve_at::<S>(chain, &pair, &BigRational::one())?;
        candidates.push(PenneyCandidate {
            win_probability: solution.f[candidate.name()].clone(),
            pattern: candidate,
        });
    }
    candidates.sort_by(|a, b| {
        b.win_probability
            .partial_cmp(&a.win_probability)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.pattern.symbols().cmp(b.pattern.symbols()))
    });
    let first = candidates.first().ok_or(Error::NoCandidates)?;
    Ok(PenneyReport {
        opponent: opponent.clone(),
        best: first.pattern.clone(),
        best_prob: first.win_probability.clone(),
        candidates,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn coin() -> ChainSpec {
        ChainSpec::iid(Alphabet::new(["0", "1"]).unwrap(), vec![ratio(1, 2); 2]).unwrap()
    }

    fn example_one() -> (ChainSpec, PatternCollection) {
        let a = Alphabet::new(["1", "2", "3"]).unwrap();
        let t = vec![
            vec![ratio(3, 4), int(0), ratio(1, 4)],
            vec![int(0), ratio(3, 4), ratio(1, 4)],
            vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)],
        ];
        let chain = ChainSpec::new(a.clone(), vec![ratio(1, 3); 3], t).unwrap();
        let c = PatternCollection::new(
            [("A", "323"), ("B", "313"), ("C", "33")]
                .iter()
                .map(|(n, s)| Pattern::new(*n, a.parse_sequence(s).unwrap()).unwrap())
                .collect(),
        )
        .unwrap();
        (chain, c)
    }

    fn closed_form(z: &BigRational) -> BigRational {
        (int(16) * z * z - int(1)) / (int(3) * z * (int(32) * z * z * z - int(24) * z * z - int(3)))
    }

    #[test]
    fn example_one_generating_function() {
        let (chain, c) = example_one();
        let p = evaluate_gf::<BigRational>(&chain, &c, &int(1)).unwrap();
        assert_eq!(p.f_total, int(1));
        assert_eq!(p.big_f_total, ratio(127, 15));
        let p = evaluate_gf::<BigRational>(&chain, &c, &int(2)).unwrap();
        assert_eq!(p.f_total, ratio(21, 314));
        assert_eq!(p.f_total, closed_form(&int(2)));
    }

    #[test]
    fn alpha_form() {
        let (chain, c) = example_one();
        let alpha = ratio(2, 3);
        let p = evaluate_gf_alpha::<BigRational>(&chain, &c, &alpha).unwrap();
        let a = &alpha;
        let expected = a * a * (a * a - int(16)) / (int(3) * (int(3) * a * a * a + int(24) * a - int(32)));
        assert_eq!(p.f_total, expected);
        assert!(evaluate_gf_alpha::<BigRational>(&chain, &c, &int(0)).is_err());
    }

    #[test]
    fn scan_collections() {
        let a = Alphabet::new(["0", "1"]).unwrap();
        let names = |w, k| {
            scan_patterns(&a, &ScanSpec { window: w, threshold: k, horizon: 1 })
                .unwrap()
                .names()
        };
        assert_eq!(names(4, 2), vec!["11", "101", "1001"]);
        assert_eq!(names(1, 1), vec!["1"]);
        assert_eq!(names(3, 3), vec!["111"]);
        assert_eq!(names(5, 3), vec!["111", "1011", "1101", "10011", "10101", "11001"]);
        assert!(matches!(
            scan_patterns(&a, &ScanSpec { window: 2, threshold: 3, horizon: 1 }),
            Err(Error::BadSpec(_))
        ));
    }

    #[test]
    fn scan_probabilities() {
        let spec = |t| ScanSpec { window: 4, threshold: 2, horizon: t };
        assert_eq!(scan_probability::<BigRational>(&coin(), &spec(2)).unwrap(), ratio(1, 4));
        assert_eq!(scan_probability::<BigRational>(&coin(), &spec(3)).unwrap(), ratio(1, 2));
        assert!(matches!(scan_probability::<BigRational>(&coin(), &spec(0)), Err(Error::BadSpec(_))));
    }

    #[test]
    fn penney_triplets() {
        let chain = coin();
        let opp = Pattern::from_labels(chain.alphabet(), "111").unwrap();
        let r = penney_search::<BigRational>(&chain, &opp, 3).unwrap();
        assert_eq!(r.candidates.len(), 7);
        assert_eq!(r.best.name(), "011");
        assert_eq!(r.best_prob, ratio(7, 8));
    }

    #[test]
    fn penney_pairs_and_singletons() {
        let chain = coin();
        let opp = Pattern::from_labels(chain.alphabet(), "10").unwrap();
        let r = penney_search::<BigRational>(&chain, &opp, 2).unwrap();
        let table: Vec<(String, BigRational)> = r
            .candidates
            .iter()
            .map(|c| (c.pattern.name().to_string(), c.win_probability.clone()))
            .collect();
        // 01 wins iff the first flip is 0; 11 and 10 split on the flip after the first 1;
        // 00 needs two leading zeros
        let expected = vec![
            ("01".to_string(), ratio(1, 2)),
            ("11".to_string(), ratio(1, 2)),
            ("00".to_string(), ratio(1, 4)),
        ];
        assert_eq!(table, expected);

        let one = Pattern::from_labels(chain.alphabet(), "1").unwrap();
        let r = penney_search::<BigRational>(&chain, &one, 1).unwrap();
        assert_eq!(r.candidates.len(), 1);
        assert_eq!(r.best_prob, ratio(1, 2));

        let mono = ChainSpec::new(Alphabet::new(["x"]).unwrap(), vec![int(1)], vec![vec![int(1)]]).unwrap();
        let x = Pattern::from_labels(mono.alphabet(), "xx").unwrap();
        assert_eq!(penney_search::<BigRational>(&mono, &x, 2), Err(Error::NoCandidates));
    }
}
