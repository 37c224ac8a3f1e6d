//! Suffix-prefix overlaps between patterns and the chain-weighted correlation
//! polynomials built from them.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{ChainSpec, Pattern, PatternCollection};
use crate::poly::Poly;

/// Overlap lengths `r` such that the last `r` symbols of `K` equal the first
/// `r` symbols of `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationSet {
    pub k_pattern: String,
    pub t_pattern: String,
    pub members: BTreeSet<usize>,
}

impl CorrelationSet {
    pub fn contains(&self, r: usize) -> bool {
        self.members.contains(&r)
    }
}

pub fn correlation_set(k: &Pattern, t: &Pattern) -> CorrelationSet {
    let (ks, ts) = (k.symbols(), t.symbols());
    let members = (1..=ks.len().min(ts.len()))
        .filter(|&r| ks[ks.len() - r..] == ts[..r])
        .collect();
    CorrelationSet {
        k_pattern: k.name().to_string(),
        t_pattern: t.name().to_string(),
        members,
    }
}

/// Probability of emitting `symbols` next, starting from state `from`:
/// `P_{from s1} P_{s1 s2} ···`. The empty sequence has probability one.
pub fn path_probability(chain: &ChainSpec, from: usize, symbols: &[usize]) -> BigRational {
    let mut prev = from;
    let mut acc = BigRational::one();
    for &s in symbols {
        if acc.is_zero() {
            break;
        }
        acc *= chain.p(prev, s);
        prev = s;
    }
    acc
}

/// Internal path probability `P_{K1 → K2 ··· K_n}` of a pattern.
pub fn internal_probability(chain: &ChainSpec, pattern: &Pattern) -> BigRational {
    path_probability(chain, pattern.first(), &pattern.symbols()[1..])
}

/// 1 when the last symbol of `k` is `j`, else 0.
pub fn last_symbol_indicator(k: &Pattern, j: usize) -> u8 {
    u8::from(k.last() == j)
}

/// `g̃_KT(z) = Σ c_r z^r` kept as sparse exact coefficients so one build serves
/// every evaluation point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationPolynomial {
    pub k_pattern: String,
    pub t_pattern: String,
    pub coefficients: BTreeMap<usize, BigRational>,
}

impl CorrelationPolynomial {
    pub fn eval(&self, z: &BigRational) -> BigRational {
        self.to_poly().eval(z)
    }

    pub fn to_poly(&self) -> Poly {
        let degree = self.coefficients.keys().next_back().copied().unwrap_or(0);
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        for (&r, c) in &self.coefficients {
            coeffs[r] = c.clone();
        }
        Poly::new(coeffs)
    }
}

/// The correlation polynomial of `K` against `T`:
///
/// ```text
/// g̃_KT(z) = ( Σ_{r ∈ {KT}, 1 ≤ r < |T|} z^r P_{T_r → T_{r+1} ··· T_|T|}  [+ z^|T| if K = T] )
///            / P_{T_1 → T_2 ··· T_|T|}
/// ```
pub fn gtilde(chain: &ChainSpec, k: &Pattern, t: &Pattern) -> Result<CorrelationPolynomial> {
    let divisor = internal_probability(chain, t);
    if divisor.is_zero() {
        return Err(Error::DivisorZero(t.name().to_string()));
    }
    let ts = t.symbols();
    let overlaps = correlation_set(k, t);
    let mut coefficients = BTreeMap::new();
    for &r in overlaps.members.iter().filter(|&&r| r < ts.len()) {
        let weight = path_probability(chain, ts[r - 1], &ts[r..]);
        if !weight.is_zero() {
            coefficients.insert(r, weight / &divisor);
        }
    }
    if k == t {
        coefficients.insert(ts.len(), BigRational::one() / &divisor);
    }
    Ok(CorrelationPolynomial {
        k_pattern: k.name().to_string(),
        t_pattern: t.name().to_string(),
        coefficients,
    })
}

/// i.i.d. correlation `c_KT(z) = Σ_{r ∈ {KT}} z^{r-1} / (μ_{T1} ··· μ_{Tr})`.
pub fn iid_correlation_sum(chain: &ChainSpec, k: &Pattern, t: &Pattern, z: &BigRational) -> BigRational {
    let ts = t.symbols();
    correlation_set(k, t)
        .members
        .iter()
        .map(|&r| {
            let mass: BigRational = ts[..r].iter().map(|&s| chain.mu(s).clone()).product();
            num_traits::pow(z.clone(), r - 1) / mass
        })
        .sum()
}

/// `c_KT(z)` for an i.i.d. chain, computed as `g̃_KT(z) / (z μ_{T1})` and
/// checked against the direct overlap sum.
pub fn iid_correlation(chain: &ChainSpec, k: &Pattern, t: &Pattern, z: &BigRational) -> Result<BigRational> {
    if !chain.is_iid() {
        return Err(Error::NotIid);
    }
    if let Some(j) = (0..chain.size()).find(|&j| chain.mu(j).is_zero()) {
        return Err(Error::ZeroMass(chain.alphabet().label(j).to_string()));
    }
    if k != t && correlation_set(k, t).contains(t.len()) {
        return Err(Error::SubpatternViolation {
            inner: t.name().to_string(),
            outer: k.name().to_string(),
        });
    }
    let via_gtilde = gtilde(chain, k, t)?.eval(z) / (z * chain.mu(t.first()));
    let via_sum = iid_correlation_sum(chain, k, t, z);
    if via_gtilde != via_sum {
        return Err(Error::FormulaMismatch {
            k: k.name().to_string(),
            t: t.name().to_string(),
        });
    }
    Ok(via_gtilde)
}

/// Every overlap set and correlation polynomial for a collection, indexed
/// `[k][t]` in collection order.
#[derive(Debug, Clone)]
pub struct CorrelationTable {
    names: Vec<String>,
    sets: Vec<Vec<CorrelationSet>>,
    polys: Vec<Vec<CorrelationPolynomial>>,
}

impl CorrelationTable {
    pub fn build(chain: &ChainSpec, collection: &PatternCollection) -> Result<Self> {
        let patterns = collection.patterns();
        let mut sets = Vec::with_capacity(patterns.len());
        let mut polys = Vec::with_capacity(patterns.len());
        for k in patterns {
            sets.push(patterns.iter().map(|t| correlation_set(k, t)).collect());
            polys.push(
                patterns
                    .iter()
                    .map(|t| gtilde(chain, k, t))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(CorrelationTable {
            names: collection.names(),
            sets,
            polys,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set(&self, k: usize, t: usize) -> &CorrelationSet {
        &self.sets[k][t]
    }

    pub fn gtilde(&self, k: usize, t: usize) -> &CorrelationPolynomial {
        &self.polys[k][t]
    }
}
