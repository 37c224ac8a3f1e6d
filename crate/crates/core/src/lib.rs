//! Waiting times and stopping probabilities for the first occurrence of any
//! pattern from a finite collection in a finite-state Markov chain.
//!
//! The main route solves one linear system in the generating functions
//! `F_i(z)` (time spent in each state before the stopping time) and `f_K(z)`
//! (probability that pattern `K` is seen first, discounted by `z^{-τ}`).
//! At `z = 1` this gives `E(τ)` and `P(τ = τ_K)` directly, exactly, in
//! rational arithmetic.
//!
//! Every answer can be checked against the [`oracle`]: the patterns compiled
//! into a matching automaton, run in lockstep with the chain as an absorbing
//! Markov chain, plus a seeded Monte Carlo simulator.
//!
//! ```
//! use pattern_waits::model::{Alphabet, ChainSpec, Pattern, PatternCollection};
//! use pattern_waits::linear_system::solve_at;
//! use pattern_waits::rational::{int, ratio};
//! use num_rational::BigRational;
//!
//! let coin = ChainSpec::iid(Alphabet::new(["H", "T"])?, vec![ratio(1, 2), ratio(1, 2)])?;
//! let hth = Pattern::from_labels(coin.alphabet(), "HTH")?;
//! let solution = solve_at::<BigRational>(&coin, &PatternCollection::new(vec![hth])?, &int(1))?;
//! assert_eq!(solution.mean_tau, Some(int(10)));
//! # Ok::<(), pattern_waits::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod correlation;
mod error;
pub mod linalg;
pub mod linear_system;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod rational;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Mode, Scalar};
