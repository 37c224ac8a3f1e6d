//! The pattern automaton run in lockstep with the chain. Product states are
//! `(automaton node, current chain state)`; entering an accepting node is
//! absorption into that node's pattern.

use std::collections::{HashMap, VecDeque};

use indexmap::IndexMap;
use num_traits::Zero;

use super::automaton::{build_automaton, Automaton};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{validate_a1, validate_a2, ChainSpec, PatternCollection};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub node: usize,
    pub last: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Transient(usize),
    Absorb(usize),
}

/// One positive-probability move out of a transient state.
#[derive(Debug, Clone, Copy)]
struct Edge {
    symbol: usize,
    target: Target,
}

/// Transient states reachable from the start distribution, with their edges.
#[derive(Debug, Clone)]
struct Structure {
    automaton: Automaton,
    states: Vec<ProductState>,
    start: Vec<(usize, Target)>,
    edges: Vec<Vec<Edge>>,
}

impl Structure {
    fn build(chain: &ChainSpec, collection: &PatternCollection) -> Self {
        let automaton = build_automaton(collection, chain.alphabet());
        let m = chain.size();
        let mut states = Vec::new();
        let mut index: HashMap<ProductState, usize> = HashMap::new();
        let mut queue = VecDeque::new();

        let mut locate = |node: usize, symbol: usize, states: &mut Vec<ProductState>, queue: &mut VecDeque<usize>| {
            match automaton.output(node) {
                Some(k) => Target::Absorb(k),
                None => {
                    let ps = ProductState { node, last: symbol };
                    let id = *index.entry(ps).or_insert_with(|| {
                        states.push(ps);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    });
                    Target::Transient(id)
                }
            }
        };

        let mut start = Vec::new();
        for s in (0..m).filter(|&s| !chain.mu(s).is_zero()) {
            let node = automaton.next(automaton.root(), s);
            start.push((s, locate(node, s, &mut states, &mut queue)));
        }
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        while let Some(id) = queue.pop_front() {
            let ProductState { node, last } = states[id];
            let mut out = Vec::new();
            for s in (0..m).filter(|&s| !chain.p(last, s).is_zero()) {
                let next = automaton.next(node, s);
                out.push(Edge {
                    symbol: s,
                    target: locate(next, s, &mut states, &mut queue),
                });
            }
            if edges.len() <= id {
                edges.resize_with(id + 1, Vec::new);
            }
            edges[id] = out;
        }
        edges.resize_with(states.len(), Vec::new);
        Structure {
            automaton,
            states,
            start,
            edges,
        }
    }

    /// A reachable transient state from which no absorbing state is reachable.
    fn trapped(&self) -> Option<usize> {
        let n = self.states.len();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut escapes = vec![false; n];
        let mut queue = VecDeque::new();
        for (u, out) in self.edges.iter().enumerate() {
            for e in out {
                match e.target {
                    Target::Transient(v) => reverse[v].push(u),
                    Target::Absorb(_) => {
                        if !escapes[u] {
                            escapes[u] = true;
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &reverse[v] {
                if !escapes[u] {
                    escapes[u] = true;
                    queue.push_back(u);
                }
            }
        }
        escapes.iter().position(|e| !e)
    }
}

/// The chain with pattern tracking folded in, as an absorbing Markov chain
/// restricted to states reachable from the start distribution.
#[derive(Debug, Clone)]
pub struct EmbeddedAutomaton<S> {
    automaton: Automaton,
    states: Vec<ProductState>,
    pattern_names: Vec<String>,
    /// Distribution after the first symbol, over transient states.
    pub start: Vec<S>,
    /// Probability of matching a pattern with the very first symbol.
    pub start_absorb: Vec<S>,
    /// Transient-to-transient kernel `Q`.
    pub step: Matrix<S>,
    /// Transient-to-absorbing kernel `R`, one column per pattern.
    pub absorb: Matrix<S>,
}

impl<S: Scalar> EmbeddedAutomaton<S> {
    pub fn build(chain: &ChainSpec, collection: &PatternCollection) -> Self {
        let structure = Structure::build(chain, collection);
        let n = structure.states.len();
        let c = collection.len();
        let mut start = vec![S::zero(); n];
        let mut start_absorb = vec![S::zero(); c];
        for &(s, target) in &structure.start {
            let mass = S::from_rational(chain.mu(s));
            match target {
                Target::Transient(i) => start[i] = start[i].clone() + mass,
                Target::Absorb(k) => start_absorb[k] = start_absorb[k].clone() + mass,
            }
        }
        let mut step = Matrix::filled(n, n, S::zero());
        let mut absorb = Matrix::filled(n, c, S::zero());
        for (u, out) in structure.edges.iter().enumerate() {
            let last = structure.states[u].last;
            for e in out {
                let p = S::from_rational(chain.p(last, e.symbol));
                match e.target {
                    Target::Transient(v) => step[(u, v)] = step[(u, v)].clone() + p,
                    Target::Absorb(k) => absorb[(u, k)] = absorb[(u, k)].clone() + p,
                }
            }
        }
        EmbeddedAutomaton {
            automaton: structure.automaton,
            states: structure.states,
            pattern_names: collection.names(),
            start,
            start_absorb,
            step,
            absorb,
        }
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn transient_count(&self) -> usize {
        self.states.len()
    }

    /// Pattern name to absorbing-state index.
    pub fn absorbing(&self) -> IndexMap<String, usize> {
        self.pattern_names
            .iter()
            .enumerate()
            .map(|(k, name)| (name.clone(), k))
            .collect()
    }
}

pub(crate) fn describe(chain: &ChainSpec, automaton: &Automaton, state: ProductState) -> String {
    let alphabet = chain.alphabet();
    format!(
        "state {} with partial match {:?}",
        alphabet.label(state.last),
        alphabet.render(automaton.prefix(state.node))
    )
}

/// Witness for an A.3 failure: a reachable state that can never complete a pattern.
pub fn trapped_state(chain: &ChainSpec, collection: &PatternCollection) -> Option<String> {
    let structure = Structure::build(chain, collection);
    structure
        .trapped()
        .map(|id| describe(chain, &structure.automaton, structure.states[id]))
}

/// One row of the first-passage table.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow<S> {
    pub n: usize,
    /// `S_K(n) = P(τ = τ_K = n)` per pattern.
    pub stop: Vec<S>,
    /// `S_i(n) = P(Z_n = i, τ > n)` per chain state.
    pub survive: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable<S> {
    pub horizon: usize,
    pub pattern_names: Vec<String>,
    pub state_labels: Vec<String>,
    pub rows: Vec<DistributionRow<S>>,
}

impl<S: Scalar> DistributionTable<S> {
    /// `P(τ ≤ n)`.
    pub fn cumulative(&self, n: usize) -> S {
        self.rows[..n.min(self.rows.len())]
            .iter()
            .flat_map(|r| r.stop.iter())
            .fold(S::zero(), |acc, v| acc + v.clone())
    }

    /// `P(τ > n) = Σ_i S_i(n)`.
    pub fn survival(&self, n: usize) -> S {
        S::sum(&self.rows[n - 1].survive)
    }

    /// `Σ_{n ≤ N} n · P(τ = n)`.
    pub fn partial_mean(&self) -> S {
        self.rows.iter().fold(S::zero(), |acc, r| {
            acc + S::from_rational(&crate::rational::int(r.n as i64)) * S::sum(&r.stop)
        })
    }
}

/// Forward propagation of the product-state distribution for `horizon` steps.
pub fn exact_distribution<S: Scalar>(
    chain: &ChainSpec,
    collection: &PatternCollection,
    horizon: usize,
) -> Result<DistributionTable<S>> {
    if horizon == 0 {
        return Err(Error::BadSpec("horizon must be at least 1".into()));
    }
    validate_a1(collection)?;
    validate_a2(chain, collection)?;
    let emb = EmbeddedAutomaton::<S>::build(chain, collection);
    let n = emb.transient_count();
    let c = collection.len();
    let m = chain.size();

    let survive_of = |dist: &[S]| {
        let mut out = vec![S::zero(); m];
        for (i, p) in dist.iter().enumerate() {
            let last = emb.states[i].last;
            out[last] = out[last].clone() + p.clone();
        }
        out
    };

    let mut rows = Vec::with_capacity(horizon);
    let mut dist = emb.start.clone();
    rows.push(DistributionRow {
        n: 1,
        stop: emb.start_absorb.clone(),
        survive: survive_of(&dist),
    });
    for step in 2..=horizon {
        let mut next = vec![S::zero(); n];
        let mut stop = vec![S::zero(); c];
        for (u, mass) in dist.iter().enumerate() {
            if scalar_is_zero(mass) {
                continue;
            }
            for v in 0..n {
                let p = &emb.step[(u, v)];
                if !scalar_is_zero(p) {
                    next[v] = next[v].clone() + mass.clone() * p.clone();
                }
            }
            for k in 0..c {
                let p = &emb.absorb[(u, k)];
                if !scalar_is_zero(p) {
                    stop[k] = stop[k].clone() + mass.clone() * p.clone();
                }
            }
        }
        dist = next;
        rows.push(DistributionRow {
            n: step,
            stop,
            survive: survive_of(&dist),
        });
    }
    Ok(DistributionTable {
        horizon,
        pattern_names: collection.names(),
        state_labels: chain.alphabet().labels().to_vec(),
        rows,
    })
}

fn scalar_is_zero<S: Scalar>(v: &S) -> bool {
    crate::scalar::is_zero(v)
}

/// Mean, stopping probabilities and second moment of `τ` from the
/// fundamental matrix of the embedded chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSummary<S> {
    pub mean: S,
    pub stop_probs: IndexMap<String, S>,
    pub second_moment: S,
}

impl<S: Scalar> ExactSummary<S> {
    pub fn variance(&self) -> S {
        self.second_moment.clone() - self.mean.clone() * self.mean.clone()
    }
}

pub fn exact_summary<S: Scalar>(chain: &ChainSpec, collection: &PatternCollection) -> Result<ExactSummary<S>> {
    validate_a1(collection)?;
    validate_a2(chain, collection)?;
    let emb = EmbeddedAutomaton::<S>::build(chain, collection);
    let n = emb.transient_count();
    let c = collection.len();
    let one = S::one();
    let two = one.clone() + one.clone();

    let dot = |a: &[S], b: &[S]| {
        a.iter()
            .zip(b)
            .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    };

    let (mean_steps, second_steps, absorbed) = if n == 0 {
        (S::zero(), S::zero(), vec![S::zero(); c])
    } else {
        // (I - Q) X = [1 | R]
        let lhs = Matrix::from_fn(n, n, |i, j| {
            let q = emb.step[(i, j)].clone();
            if i == j {
                one.clone() - q
            } else {
                -q
            }
        });
        let rhs = Matrix::from_fn(n, c + 1, |i, j| if j == 0 { one.clone() } else { emb.absorb[(i, j - 1)].clone() });
        let x = S::solve(&lhs, &rhs).ok_or(Error::SingularFundamental)?;
        let steps = x.column_values(0);
        let y = S::solve(&lhs, &Matrix::column(steps.clone()))
            .ok_or(Error::SingularFundamental)?
            .into_column();
        let squares: Vec<S> = y
            .iter()
            .zip(&steps)
            .map(|(yi, ti)| two.clone() * yi.clone() - ti.clone())
            .collect();
        let absorbed = (0..c).map(|k| dot(&emb.start, &x.column_values(k + 1))).collect();
        (dot(&emb.start, &steps), dot(&emb.start, &squares), absorbed)
    };

    let stop_probs = collection
        .names()
        .into_iter()
        .zip(emb.start_absorb.iter().zip(absorbed))
        .map(|(name, (first, later))| (name, first.clone() + later))
        .collect();
    Ok(ExactSummary {
        mean: one.clone() + mean_steps.clone(),
        stop_probs,
        second_moment: one + two * mean_steps + second_steps,
    })
}
