//! The JSON instance format:
//!
//! ```json
//! {
//!   "states": ["1", "2", "3"],
//!   "initial": ["1/3", "1/3", "1/3"],
//!   "transition": [["3/4", "0", "1/4"], ["0", "3/4", "1/4"], ["1/4", "1/4", "1/2"]],
//!   "patterns": {"A": ["3", "2", "3"], "B": "313", "C": ["3", "3"]}
//! }
//! ```
//!
//! Probabilities are `"p/q"` or decimal literals and are read exactly. A
//! pattern is a list of state labels, or a string of single-character labels.

use std::path::Path;

use indexmap::IndexMap;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alphabet, ChainSpec, Pattern, PatternCollection};
use crate::rational::parse_rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Text(String),
    Literal(serde_json::Number),
}

impl Number {
    fn as_text(&self) -> String {
        match self {
            Number::Text(s) => s.clone(),
            Number::Literal(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternSpec {
    Labels(Vec<String>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub states: Vec<String>,
    pub initial: Vec<Number>,
    pub transition: Vec<Vec<Number>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub patterns: IndexMap<String, PatternSpec>,
}

/// A parsed instance. `patterns` is `None` when the file lists none, which
/// is fine for commands that generate their own collection.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub chain: ChainSpec,
    pub patterns: Option<PatternCollection>,
}

impl Instance {
    pub fn collection(&self) -> Result<&PatternCollection> {
        self.patterns.as_ref().ok_or(Error::EmptyCollection)
    }
}

fn parse_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            parse_error(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialises")
    }

    /// The file form of a model, with every probability written as `p/q`.
    pub fn from_model(chain: &ChainSpec, collection: Option<&PatternCollection>) -> Self {
        let alphabet = chain.alphabet();
        let num = |v: &BigRational| Number::Text(v.to_string());
        InstanceFile {
            states: alphabet.labels().to_vec(),
            initial: chain.initial().iter().map(num).collect(),
            transition: chain
                .transition()
                .iter()
                .map(|row| row.iter().map(num).collect())
                .collect(),
            patterns: collection
                .map(|c| {
                    c.patterns()
                        .iter()
                        .map(|p| {
                            let labels = p.symbols().iter().map(|&s| alphabet.label(s).to_string()).collect();
                            (p.name().to_string(), PatternSpec::Labels(labels))
                        })
                        .collect()
                })
                .unwrap_or_default(),
        }
    }

    /// Builds the model. With `approx` the probability sums are checked to
    /// `1e-12` instead of exactly.
    pub fn to_instance(&self, approx: bool) -> Result<Instance> {
        let alphabet = Alphabet::new(self.states.iter().cloned()).map_err(|e| parse_error("states", e.to_string()))?;
        let parse_row = |values: &[Number], field: &dyn Fn(usize) -> String| -> Result<Vec<BigRational>> {
            values
                .iter()
                .enumerate()
                .map(|(i, v)| parse_rational(&v.as_text()).map_err(|msg| parse_error(field(i), msg)))
                .collect()
        };
        let initial = parse_row(&self.initial, &|i| format!("initial[{i}]"))?;
        let transition = self
            .transition
            .iter()
            .enumerate()
            .map(|(r, row)| parse_row(row, &|c| format!("transition[{r}][{c}]")))
            .collect::<Result<Vec<_>>>()?;
        let chain = if approx {
            ChainSpec::new_approx(alphabet.clone(), initial, transition)
        } else {
            ChainSpec::new(alphabet.clone(), initial, transition)
        }
        .map_err(|e| {
            let field = match &e {
                Error::BadDistribution { what, .. } if what.starts_with("initial") => "initial",
                _ => "transition",
            };
            parse_error(field, e.to_string())
        })?;

        let patterns = if self.patterns.is_empty() {
            None
        } else {
            let list = self
                .patterns
                .iter()
                .map(|(name, spec)| {
                    let field = format!("patterns.{name}");
                    let symbols = match spec {
                        PatternSpec::Labels(labels) => labels
                            .iter()
                            .map(|l| {
                                alphabet
                                    .index_of(l)
                                    .ok_or_else(|| parse_error(&field, format!("unknown state {l:?}")))
                            })
                            .collect::<Result<Vec<_>>>()?,
                        PatternSpec::Text(text) => alphabet
                            .parse_sequence(text)
                            .map_err(|e| parse_error(&field, e.to_string()))?,
                    };
                    Pattern::new(name.clone(), symbols).map_err(|e| parse_error(&field, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(PatternCollection::new(list).map_err(|e| parse_error("patterns", e.to_string()))?)
        };
        Ok(Instance { chain, patterns })
    }
}

pub fn load(path: &Path, approx: bool) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_error(path.display().to_string(), e.to_string()))?;
    InstanceFile::from_json(&text)?.to_instance(approx)
}
