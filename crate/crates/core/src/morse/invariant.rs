use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::graph::{MultiflowGraph, StateSet};
use crate::{Error, Result};

/// Largest `M ⊆ U` through each point of which passes a bi-infinite walk
/// inside `M`: prune states without a predecessor or successor in the set
/// until nothing changes.
pub fn maximal_weakly_invariant(graph: &MultiflowGraph, set: &StateSet) -> StateSet {
    let mut m: StateSet = set.iter().copied().filter(|&x| graph.is_active(x)).collect();
    loop {
        let keep: StateSet = m
            .iter()
            .copied()
            .filter(|&x| {
                graph.successors(x).iter().any(|y| m.contains(y))
                    && graph.predecessors(x).iter().any(|y| m.contains(y))
            })
            .collect();
        if keep.len() == m.len() {
            return m;
        }
        m = keep;
    }
}

pub fn is_weakly_invariant(graph: &MultiflowGraph, set: &StateSet) -> bool {
    maximal_weakly_invariant(graph, set) == *set
}

/// Disjoint, nonempty, weakly invariant state sets with labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFamily {
    sets: Vec<StateSet>,
    labels: Vec<String>,
}

impl InvariantFamily {
    pub fn new(graph: &MultiflowGraph, labels: Vec<String>, sets: Vec<StateSet>) -> Result<Self> {
        let family = Self::unchecked(labels, sets)?;
        family.validate(graph)?;
        Ok(family)
    }

    /// Checks only label count and disjointness.
    pub fn unchecked(labels: Vec<String>, sets: Vec<StateSet>) -> Result<Self> {
        if labels.len() != sets.len() {
            return Err(Error::Input("family labels and sets differ in number".into()));
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if let Some(x) = sets[i].intersection(&sets[j]).next() {
                    return Err(Error::Input(format!(
                        "family sets `{}` and `{}` share state #{x}",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(InvariantFamily { sets, labels })
    }

    /// Sets labelled `Xi1, Xi2, ...`.
    pub fn from_sets(graph: &MultiflowGraph, sets: Vec<StateSet>) -> Result<Self> {
        let labels = (1..=sets.len()).map(|i| format!("Xi{i}")).collect();
        Self::new(graph, labels, sets)
    }

    pub fn validate(&self, graph: &MultiflowGraph) -> Result<()> {
        for (label, set) in self.labels.iter().zip(&self.sets) {
            graph.check_set(set)?;
            if set.is_empty() {
                return Err(Error::Input(format!("family set `{label}` is empty")));
            }
            if !is_weakly_invariant(graph, set) {
                return Err(Error::Structural(format!(
                    "family set `{label}` is not weakly invariant"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[StateSet] {
        &self.sets
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set(&self, i: usize) -> &StateSet {
        &self.sets[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn union(&self) -> StateSet {
        self.sets.iter().flatten().copied().collect()
    }

    pub fn set_of(&self, x: usize) -> Option<usize> {
        self.sets.iter().position(|s| s.contains(&x))
    }

    /// The family with its sets permuted by `order`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        InvariantFamily {
            sets: order.iter().map(|&i| self.sets[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}
