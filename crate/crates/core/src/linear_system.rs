//! The generating-function system for `F_i(z)` and `f_K(z)`.
//!
//! Unknowns are ordered `(F_1, …, F_m, f_A, …, f_T)`. For each state `j`
//!
//! ```text
//! Σ_i F_i(z) P_ij − z F_j(z) − z Σ_K f_K(z) X_K^(j) = −μ_j
//! ```
//!
//! and for each pattern `T`
//!
//! ```text
//! Σ_i F_i(z) P_{i T_1} − Σ_K f_K(z) g̃_KT(z) = −μ_{T_1}.
//! ```
//!
//! At `z = 1`, `F_i` is the expected time spent in `i` before `τ`, `f_K` is
//! the probability that `K` is the first pattern seen, and
//! `E(τ) = 1 + Σ_i F_i`.

use indexmap::IndexMap;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::correlation::{internal_probability, last_symbol_indicator, CorrelationTable};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{self, ChainSpec, PatternCollection};
use crate::poly::Poly;
use crate::rational::int;
use crate::scalar::{Mode, Scalar};

/// Largest `m + Σ|T|` for which the symbolic determinant is expanded.
pub const SYMBOLIC_LIMIT: usize = 12;

/// `Q(z)` evaluated at a rational point, with its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrix<S> {
    pub z: BigRational,
    pub entries: Matrix<S>,
    pub rhs: Vec<S>,
    pub state_labels: Vec<String>,
    pub pattern_names: Vec<String>,
}

impl<S> SystemMatrix<S> {
    pub fn dimension(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution<S> {
    pub z: BigRational,
    /// `F_i(z)` by state label.
    pub big_f: IndexMap<String, S>,
    /// `f_K(z)` by pattern name.
    pub f: IndexMap<String, S>,
    /// `1 + Σ_i F_i`, only at `z = 1`.
    pub mean_tau: Option<S>,
    pub mode: Mode,
}

impl<S: Scalar> SystemSolution<S> {
    /// `f(z) = Σ_K f_K(z)`
    pub fn f_total(&self) -> S {
        S::sum(self.f.values())
    }

    /// `F(z) = 1 + Σ_i F_i(z)`
    pub fn big_f_total(&self) -> S {
        S::one() + S::sum(self.big_f.values())
    }
}

/// `Q(z)` with polynomial entries, plus the right-hand side.
pub fn assemble_symbolic(
    chain: &ChainSpec,
    collection: &PatternCollection,
    table: &CorrelationTable,
) -> (Matrix<Poly>, Vec<BigRational>) {
    let m = chain.size();
    let patterns = collection.patterns();
    let n = m + patterns.len();
    let z = Poly::z();
    let neg_z = Poly::monomial(-BigRational::one(), 1);

    let entries = Matrix::from_fn(n, n, |row, col| match (row < m, col < m) {
        (true, true) => {
            let p = Poly::constant(chain.p(col, row).clone());
            if row == col {
                linalg::IntegralDomain::sub(&p, &z)
            } else {
                p
            }
        }
        (true, false) => {
            if last_symbol_indicator(&patterns[col - m], row) == 1 {
                neg_z.clone()
            } else {
                Poly::default()
            }
        }
        (false, true) => Poly::constant(chain.p(col, patterns[row - m].first()).clone()),
        (false, false) => {
            let g = table.gtilde(col - m, row - m).to_poly();
            linalg::IntegralDomain::neg(&g)
        }
    });
    let rhs = (0..m)
        .map(|j| -chain.mu(j).clone())
        .chain(patterns.iter().map(|t| -chain.mu(t.first()).clone()))
        .collect();
    (entries, rhs)
}

fn check_z(z: &BigRational) -> Result<()> {
    if *z < BigRational::one() {
        return Err(Error::InvalidZ(z.to_string()));
    }
    Ok(())
}

/// `Q(z)` and its right-hand side at the point `z ≥ 1`.
pub fn assemble<S: Scalar>(
    chain: &ChainSpec,
    collection: &PatternCollection,
    table: &CorrelationTable,
    z: &BigRational,
) -> Result<SystemMatrix<S>> {
    check_z(z)?;
    let (symbolic, rhs) = assemble_symbolic(chain, collection, table);
    Ok(SystemMatrix {
        z: z.clone(),
        entries: symbolic.map(|p| S::from_rational(&p.eval(z))),
        rhs: rhs.iter().map(S::from_rational).collect(),
        state_labels: chain.alphabet().labels().to_vec(),
        pattern_names: collection.names(),
    })
}

pub fn solve<S: Scalar>(matrix: &SystemMatrix<S>) -> Result<SystemSolution<S>> {
    let x = S::solve(&matrix.entries, &Matrix::column(matrix.rhs.clone()))
        .ok_or_else(|| Error::SingularAtZ(matrix.z.to_string()))?
        .into_column();
    Ok(solution_from(matrix, x))
}

fn solution_from<S: Scalar>(matrix: &SystemMatrix<S>, x: Vec<S>) -> SystemSolution<S> {
    let m = matrix.state_labels.len();
    let big_f: IndexMap<String, S> = matrix.state_labels.iter().cloned().zip(x[..m].iter().cloned()).collect();
    let f = matrix.pattern_names.iter().cloned().zip(x[m..].iter().cloned()).collect();
    let mean_tau = matrix.z.is_one().then(|| S::one() + S::sum(big_f.values()));
    SystemSolution {
        z: matrix.z.clone(),
        big_f,
        f,
        mean_tau,
        mode: S::MODE,
    }
}

/// The solution at `z` as the limit `w → 0` of the solution at `z + w`.
///
/// `Q(z)` can be singular where the generating functions are still finite.
/// At `z = 1` this happens whenever a closed class of the chain holds no
/// pattern's first symbol: the class's stationary vector is then in the
/// kernel. Solved over polynomials in `w`, each unknown is a ratio with the
/// common denominator `±φ(z + w)`, and the lowest power of `w` cancels.
fn solve_by_limit(
    chain: &ChainSpec,
    collection: &PatternCollection,
    table: &CorrelationTable,
    z: &BigRational,
) -> Option<Vec<BigRational>> {
    let (symbolic, rhs) = assemble_symbolic(chain, collection, table);
    let shifted = symbolic.map(|p| p.shift(z));
    let rhs: Vec<Poly> = rhs.into_iter().map(Poly::constant).collect();
    let (numerators, d) = linalg::solve_fraction_free(&shifted, &rhs)?;
    let k = d.order()?;
    let lead = d.coeff(k);
    numerators
        .iter()
        .map(|y| match y.order() {
            Some(o) if o < k => None,
            _ => Some(y.coeff(k) / &lead),
        })
        .collect()
}

/// Validates A.1–A.3, then assembles and solves at `z`. Where `Q(z)` is
/// singular the value is taken as the limit from above; `SingularAtZ` is
/// returned only if that limit does not exist.
pub fn solve_at<S: Scalar>(chain: &ChainSpec, collection: &PatternCollection, z: &BigRational) -> Result<SystemSolution<S>> {
    check_z(z)?;
    model::validate(chain, collection)?;
    let table = CorrelationTable::build(chain, collection)?;
    let matrix = assemble::<S>(chain, collection, &table, z)?;
    match solve(&matrix) {
        Err(Error::SingularAtZ(_)) => {
            let x = solve_by_limit(chain, collection, &table, z).ok_or_else(|| Error::SingularAtZ(z.to_string()))?;
            Ok(solution_from(&matrix, x.iter().map(S::from_rational).collect()))
        }
        other => other,
    }
}

/// Reduced `|Δ|`-dimensional system when every pattern is a single symbol.
///
/// Unknown `j` is `f_j(z)` if `j` is a pattern and `F_j(z)` otherwise:
/// `Σ_{i ∉ C} F_i(z) P_ij − z · unknown_j = −μ_j`.
pub fn solve_length_one<S: Scalar>(
    chain: &ChainSpec,
    collection: &PatternCollection,
    z: &BigRational,
) -> Result<SystemSolution<S>> {
    if let Some(p) = collection.patterns().iter().find(|p| p.len() != 1) {
        return Err(Error::WrongShape(p.name().to_string()));
    }
    check_z(z)?;
    model::validate(chain, collection)?;
    let m = chain.size();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for (k, p) in collection.patterns().iter().enumerate() {
        owner[p.first()] = Some(k);
    }
    let zs = S::from_rational(z);
    let a = Matrix::from_fn(m, m, |j, i| {
        let p = if owner[i].is_none() {
            S::from_rational(chain.p(i, j))
        } else {
            S::zero()
        };
        if i == j {
            p - zs.clone()
        } else {
            p
        }
    });
    let b = Matrix::column((0..m).map(|j| -S::from_rational(chain.mu(j))).collect());
    let u = S::solve(&a, &b)
        .ok_or_else(|| Error::SingularAtZ(z.to_string()))?
        .into_column();

    let labels = chain.alphabet().labels();
    let big_f: IndexMap<String, S> = (0..m)
        .map(|j| {
            let v = if owner[j].is_some() { S::zero() } else { u[j].clone() };
            (labels[j].clone(), v)
        })
        .collect();
    let f = collection
        .patterns()
        .iter()
        .map(|p| (p.name().to_string(), u[p.first()].clone()))
        .collect();
    let mean_tau = z.is_one().then(|| S::one() + S::sum(big_f.values()));
    Ok(SystemSolution {
        z: z.clone(),
        big_f,
        f,
        mean_tau,
        mode: S::MODE,
    })
}

/// Stopping probabilities when every pattern starts with the same symbol:
/// `Σ_K f_K = 1` and `Σ_K f_K (g̃_KT − g̃_KA) = 0` for `T ≠ A`, with `A` the
/// first pattern of the collection.
pub fn solve_common_head<S: Scalar>(chain: &ChainSpec, collection: &PatternCollection) -> Result<IndexMap<String, S>> {
    let patterns = collection.patterns();
    let head = patterns[0].first();
    if let Some(p) = patterns.iter().find(|p| p.first() != head) {
        return Err(Error::HeadsDiffer(patterns[0].name().to_string(), p.name().to_string()));
    }
    model::validate(chain, collection)?;
    let table = CorrelationTable::build(chain, collection)?;
    let one = BigRational::one();
    let c = patterns.len();
    let a = Matrix::from_fn(c, c, |row, k| {
        if row == 0 {
            S::one()
        } else {
            S::from_rational(&(table.gtilde(k, row).eval(&one) - table.gtilde(k, 0).eval(&one)))
        }
    });
    let b = Matrix::column((0..c).map(|row| if row == 0 { S::one() } else { S::zero() }).collect());
    let x = S::solve(&a, &b)
        .ok_or_else(|| Error::SingularAtZ(one.to_string()))?
        .into_column();
    Ok(collection.names().into_iter().zip(x).collect())
}

/// Outcome of testing whether `Z_τ` has the same law as `Z_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartReport<S> {
    pub stationary: IndexMap<String, S>,
    /// `F_i = c · π_i` for a single constant `c`.
    pub holds: bool,
    pub c: Option<S>,
    /// `1 + c` when the property holds.
    pub mean_tau: Option<S>,
    /// `(Σ_K f_K g̃_KT − μ_{T1}) / π_{T1}` per pattern `T`.
    pub c_by_pattern: IndexMap<String, S>,
    /// Every per-pattern constant equals `c`, and
    /// `Σ_K f_K (g̃_KT − X_K^(T1)) = c π_{T1}` holds for every `T`.
    pub consistent: bool,
}

/// Stationary law of an irreducible chain.
pub fn stationary_distribution<S: Scalar>(chain: &ChainSpec) -> Result<Vec<S>> {
    let m = chain.size();
    if !linalg::strongly_connected(m, |i, j| !chain.p(i, j).is_zero()) {
        return Err(Error::NotIrreducible);
    }
    // π (P − I) = 0 with the last balance equation replaced by Σ π = 1
    let a = Matrix::from_fn(m, m, |j, i| {
        if j == m - 1 {
            S::one()
        } else if i == j {
            S::from_rational(chain.p(i, j)) - S::one()
        } else {
            S::from_rational(chain.p(i, j))
        }
    });
    let b = Matrix::column((0..m).map(|j| if j == m - 1 { S::one() } else { S::zero() }).collect());
    Ok(S::solve(&a, &b).ok_or(Error::NotIrreducible)?.into_column())
}

pub fn check_stationary_restart<S: Scalar>(
    chain: &ChainSpec,
    collection: &PatternCollection,
    solution: &SystemSolution<S>,
) -> Result<RestartReport<S>> {
    if !solution.z.is_one() {
        return Err(Error::NeedsUnitZ);
    }
    let pi = stationary_distribution::<S>(chain)?;
    let big_f: Vec<S> = solution.big_f.values().cloned().collect();
    let c = S::sum(&big_f);
    let holds = big_f
        .iter()
        .zip(&pi)
        .all(|(fi, p)| fi.approx_eq(&(c.clone() * p.clone())));

    let table = CorrelationTable::build(chain, collection)?;
    let one = BigRational::one();
    let f: Vec<S> = solution.f.values().cloned().collect();
    let patterns = collection.patterns();
    let mut c_by_pattern = IndexMap::new();
    let mut consistent = holds;
    for (t, pattern) in patterns.iter().enumerate() {
        let head = pattern.first();
        let weighted = (0..patterns.len()).fold(S::zero(), |acc, k| {
            acc + f[k].clone() * S::from_rational(&table.gtilde(k, t).eval(&one))
        });
        let ct = (weighted.clone() - S::from_rational(chain.mu(head))) / pi[head].clone();
        let restart_lhs = (0..patterns.len()).fold(weighted, |acc, k| {
            acc - f[k].clone() * S::from_rational(&int(i64::from(last_symbol_indicator(&patterns[k], head))))
        });
        if holds {
            consistent &= ct.approx_eq(&c) && restart_lhs.approx_eq(&(c.clone() * pi[head].clone()));
        }
        c_by_pattern.insert(pattern.name().to_string(), ct);
    }
    Ok(RestartReport {
        stationary: chain.alphabet().labels().iter().cloned().zip(pi).collect(),
        holds,
        c: holds.then(|| c.clone()),
        mean_tau: holds.then(|| S::one() + c),
        c_by_pattern,
        consistent,
    })
}

/// `φ(z) = det Q(z)` expanded exactly over polynomial entries. Limited to
/// instances with `m + Σ|T| ≤ SYMBOLIC_LIMIT`.
pub fn determinant_polynomial(chain: &ChainSpec, collection: &PatternCollection) -> Result<Poly> {
    let size = chain.size() + collection.total_length();
    if size > SYMBOLIC_LIMIT {
        return Err(Error::TooLargeForSymbolic {
            size,
            limit: SYMBOLIC_LIMIT,
        });
    }
    model::validate_a1(collection)?;
    model::validate_a2(chain, collection)?;
    let table = CorrelationTable::build(chain, collection)?;
    let (symbolic, _) = assemble_symbolic(chain, collection, &table);
    Ok(linalg::determinant(&symbolic))
}

/// The predicted top monomial of `φ(z)`: degree `m + Σ|T|` with coefficient
/// `(−1)^{m+|C|} / Π_T P_{T1 → T2 ··· T|T|}`.
pub fn expected_leading_term(chain: &ChainSpec, collection: &PatternCollection) -> (usize, BigRational) {
    let degree = chain.size() + collection.total_length();
    let product: BigRational = collection
        .patterns()
        .iter()
        .map(|p| internal_probability(chain, p))
        .product();
    let sign = if (chain.size() + collection.len()).is_multiple_of(2) { int(1) } else { int(-1) };
    (degree, sign / product)
}
