use std::collections::VecDeque;

use crate::model::{Alphabet, PatternCollection};

const ROOT: usize = 0;

/// Deterministic multi-pattern matcher: a trie over the patterns with failure
/// links folded into a complete transition table.
#[derive(Debug, Clone)]
pub struct Automaton {
    goto: Vec<Vec<usize>>,
    output: Vec<Option<usize>>,
    prefix: Vec<Vec<usize>>,
}

impl Automaton {
    pub fn root(&self) -> usize {
        ROOT
    }

    pub fn node_count(&self) -> usize {
        self.goto.len()
    }

    pub fn accepting_count(&self) -> usize {
        self.output.iter().filter(|o| o.is_some()).count()
    }

    pub fn next(&self, node: usize, symbol: usize) -> usize {
        self.goto[node][symbol]
    }

    /// Index of the pattern completed on entering `node`, if any.
    pub fn output(&self, node: usize) -> Option<usize> {
        self.output[node]
    }

    /// The symbols spelled from the root to `node`.
    pub fn prefix(&self, node: usize) -> &[usize] {
        &self.prefix[node]
    }

    /// Feeds `stream` and reports the first completed pattern with its
    /// 1-based completion time.
    pub fn first_match(&self, stream: impl IntoIterator<Item = usize>) -> Option<(usize, usize)> {
        let mut node = ROOT;
        for (t, s) in stream.into_iter().enumerate() {
            node = self.next(node, s);
            if let Some(k) = self.output[node] {
                return Some((k, t + 1));
            }
        }
        None
    }
}

/// Builds the matcher for `collection`. Under A.1 every accepting node is the
/// end of exactly one pattern; otherwise the longest pattern ending at a node
/// is reported for it.
pub fn build_automaton(collection: &PatternCollection, alphabet: &Alphabet) -> Automaton {
    let m = alphabet.len();
    let mut children: Vec<Vec<Option<usize>>> = vec![vec![None; m]];
    let mut terminal: Vec<Option<usize>> = vec![None];
    let mut prefix: Vec<Vec<usize>> = vec![Vec::new()];

    for (idx, pattern) in collection.patterns().iter().enumerate() {
        let mut node = ROOT;
        for &s in pattern.symbols() {
            node = match children[node][s] {
                Some(child) => child,
                None => {
                    let child = children.len();
                    children.push(vec![None; m]);
                    terminal.push(None);
                    let mut p = prefix[node].clone();
                    p.push(s);
                    prefix.push(p);
                    children[node][s] = Some(child);
                    child
                }
            };
        }
        terminal[node].get_or_insert(idx);
    }

    let n = children.len();
    let mut goto = vec![vec![ROOT; m]; n];
    let mut fail = vec![ROOT; n];
    let mut output = terminal.clone();
    let mut queue = VecDeque::new();
    for s in 0..m {
        if let Some(child) = children[ROOT][s] {
            goto[ROOT][s] = child;
            queue.push_back(child);
        }
    }
    while let Some(u) = queue.pop_front() {
        if output[u].is_none() {
            output[u] = output[fail[u]];
        }
        for s in 0..m {
            match children[u][s] {
                Some(v) => {
                    fail[v] = goto[fail[u]][s];
                    goto[u][s] = v;
                    queue.push_back(v);
                }
                None => goto[u][s] = goto[fail[u]][s],
            }
        }
    }
    Automaton { goto, output, prefix }
}
