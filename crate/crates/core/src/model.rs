//! Alphabets, patterns and chains, plus the three standing assumptions every
//! solver relies on:
//!
//! * A.1: no pattern occurs as a contiguous block inside another pattern;
//! * A.2: every pattern's internal transitions have positive probability;
//! * A.3: the first occurrence time is almost surely finite (hence has finite
//!   mean, since the embedded chain is finite).

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::oracle;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = HashSet::new();
        for s in &symbols {
            if s.is_empty() || !seen.insert(s.as_str()) {
                return Err(Error::BadSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.symbols
    }

    pub fn label(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == label)
    }

    /// Whether every label is a single character, so sequences can be written
    /// without separators.
    pub fn is_compact(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Renders a symbol sequence, e.g. `323`, or `a,bb,a` for multi-character labels.
    pub fn render(&self, symbols: &[usize]) -> String {
        let sep = if self.is_compact() { "" } else { "," };
        symbols
            .iter()
            .map(|&s| self.symbols[s].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`Alphabet::render`]; comma separators are always accepted.
    pub fn parse_sequence(&self, text: &str) -> Result<Vec<usize>> {
        let parts: Vec<String> = if text.contains(',') || !self.is_compact() {
            text.split(',').map(|p| p.trim().to_string()).collect()
        } else {
            text.chars().map(String::from).collect()
        };
        parts
            .iter()
            .map(|p| {
                self.index_of(p).ok_or_else(|| Error::UnknownSymbol {
                    symbol: p.clone(),
                    context: format!("sequence {text:?}"),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    name: String,
    symbols: Vec<usize>,
}

impl Pattern {
    pub fn new(name: impl Into<String>, symbols: Vec<usize>) -> Result<Self> {
        let name = name.into();
        if symbols.is_empty() {
            return Err(Error::EmptyPattern(name));
        }
        Ok(Pattern { name, symbols })
    }

    /// Builds a pattern from labels, naming it after its rendered form.
    pub fn from_labels(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let symbols = alphabet.parse_sequence(text)?;
        Pattern::new(alphabet.render(&symbols), symbols)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn first(&self) -> usize {
        self.symbols[0]
    }

    pub fn last(&self) -> usize {
        self.symbols[self.symbols.len() - 1]
    }

    /// Whether `self` occurs as a contiguous block of `other`.
    pub fn occurs_in(&self, other: &Pattern) -> bool {
        other.symbols.windows(self.len()).any(|w| w == self.symbols.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternCollection {
    patterns: Vec<Pattern>,
}

impl PatternCollection {
    pub fn new(patterns: Vec<Pattern>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::EmptyCollection);
        }
        let mut names = HashSet::new();
        for p in &patterns {
            if !names.insert(p.name.as_str()) {
                return Err(Error::DuplicatePatternName(p.name.clone()));
            }
        }
        Ok(PatternCollection { patterns })
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.patterns.iter().map(|p| p.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.name == name)
    }

    pub fn total_length(&self) -> usize {
        self.patterns.iter().map(Pattern::len).sum()
    }

    fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        for p in &self.patterns {
            if let Some(&bad) = p.symbols.iter().find(|&&s| s >= alphabet.len()) {
                return Err(Error::UnknownSymbol {
                    symbol: format!("#{bad}"),
                    context: format!("pattern {:?}", p.name),
                });
            }
        }
        Ok(())
    }
}

/// A time-homogeneous finite Markov chain with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    alphabet: Alphabet,
    initial: Vec<BigRational>,
    transition: Vec<Vec<BigRational>>,
}

impl ChainSpec {
    /// Builds a chain whose initial vector and transition rows sum to one exactly.
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<BigRational>,
        transition: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        Self::build(alphabet, initial, transition, None)
    }

    /// Like [`ChainSpec::new`], but sums only need to be within `1e-12` of one.
    /// Used when the computation will run in float mode.
    pub fn new_approx(
        alphabet: Alphabet,
        initial: Vec<BigRational>,
        transition: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        Self::build(alphabet, initial, transition, Some(1e-12))
    }

    fn build(
        alphabet: Alphabet,
        initial: Vec<BigRational>,
        transition: Vec<Vec<BigRational>>,
        tolerance: Option<f64>,
    ) -> Result<Self> {
        let m = alphabet.len();
        let check = |what: String, values: &[BigRational]| -> Result<()> {
            if values.len() != m {
                return Err(Error::BadDistribution {
                    what,
                    detail: format!("expected {m} entries, found {}", values.len()),
                });
            }
            if let Some(v) = values.iter().find(|v| v.is_negative() || **v > BigRational::one()) {
                return Err(Error::BadDistribution {
                    what,
                    detail: format!("entry {v} outside [0, 1]"),
                });
            }
            let total: BigRational = values.iter().sum();
            let ok = match tolerance {
                None => total.is_one(),
                Some(tol) => (crate::rational::to_f64(&total) - 1.0).abs() <= tol,
            };
            if !ok {
                return Err(Error::BadDistribution {
                    what,
                    detail: format!("entries sum to {total}, not 1"),
                });
            }
            Ok(())
        };
        check("initial distribution".into(), &initial)?;
        if transition.len() != m {
            return Err(Error::BadDistribution {
                what: "transition matrix".into(),
                detail: format!("expected {m} rows, found {}", transition.len()),
            });
        }
        for (i, row) in transition.iter().enumerate() {
            check(format!("transition row {}", alphabet.label(i)), row)?;
        }
        Ok(ChainSpec {
            alphabet,
            initial,
            transition,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn initial(&self) -> &[BigRational] {
        &self.initial
    }

    pub fn transition(&self) -> &[Vec<BigRational>] {
        &self.transition
    }

    /// `P_ij`
    pub fn p(&self, i: usize, j: usize) -> &BigRational {
        &self.transition[i][j]
    }

    /// `μ_i`
    pub fn mu(&self, i: usize) -> &BigRational {
        &self.initial[i]
    }

    pub fn initial_as<S: Scalar>(&self) -> Vec<S> {
        self.initial.iter().map(S::from_rational).collect()
    }

    pub fn transition_as<S: Scalar>(&self) -> Vec<Vec<S>> {
        self.transition
            .iter()
            .map(|row| row.iter().map(S::from_rational).collect())
            .collect()
    }

    /// True when every transition row equals the initial distribution.
    pub fn is_iid(&self) -> bool {
        self.transition.iter().all(|row| *row == self.initial)
    }

    /// An i.i.d. chain drawing each symbol from `weights`.
    pub fn iid(alphabet: Alphabet, weights: Vec<BigRational>) -> Result<Self> {
        let rows = vec![weights.clone(); alphabet.len()];
        ChainSpec::new(alphabet, weights, rows)
    }

    pub fn with_initial(&self, initial: Vec<BigRational>) -> Result<Self> {
        ChainSpec::new(self.alphabet.clone(), initial, self.transition.clone())
    }
}

/// A.1: no pattern is a contiguous block of another pattern in the collection.
pub fn validate_a1(collection: &PatternCollection) -> Result<()> {
    let patterns = collection.patterns();
    for (i, inner) in patterns.iter().enumerate() {
        for (j, outer) in patterns.iter().enumerate() {
            if i != j && inner.len() <= outer.len() && inner.occurs_in(outer) {
                return Err(Error::SubpatternViolation {
                    inner: inner.name.clone(),
                    outer: outer.name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// A.2: `P_{K1 K2} ··· P_{K_{n-1} K_n} > 0` for every pattern.
///
/// The reported position is the 1-based index of the symbol entered by the
/// first zero transition.
pub fn validate_a2(chain: &ChainSpec, collection: &PatternCollection) -> Result<()> {
    collection.check_alphabet(chain.alphabet())?;
    for p in collection.patterns() {
        if let Some(k) = p.symbols.windows(2).position(|w| chain.p(w[0], w[1]).is_zero()) {
            return Err(Error::ZeroPathViolation {
                pattern: p.name.clone(),
                position: k + 2,
            });
        }
    }
    Ok(())
}

/// A.3, checked by reachability on the pattern automaton embedded in the
/// chain: every reachable non-absorbed state must be able to reach a match.
pub fn validate_a3(chain: &ChainSpec, collection: &PatternCollection) -> Result<()> {
    collection.check_alphabet(chain.alphabet())?;
    match oracle::trapped_state(chain, collection) {
        Some(witness) => Err(Error::TauMayBeInfinite { witness }),
        None => Ok(()),
    }
}

/// Runs A.1, A.2 and A.3 in order.
pub fn validate(chain: &ChainSpec, collection: &PatternCollection) -> Result<()> {
    validate_a1(collection)?;
    validate_a2(chain, collection)?;
    validate_a3(chain, collection)
}
