//! Independent verification path: the patterns compiled into a matching
//! automaton, the automaton run alongside the chain as an absorbing Markov
//! chain, and a seeded Monte Carlo simulator.

mod automaton;
mod embedding;
mod simulate;

pub use automaton::{build_automaton, Automaton};
pub use embedding::{
    exact_distribution, exact_summary, trapped_state, DistributionRow, DistributionTable, EmbeddedAutomaton,
    ExactSummary, ProductState,
};
pub use simulate::{simulate, SimulationConfig, SimulationReport, DEFAULT_STEP_CAP};
