//! Graph JSON: finite multivalued maps with a family of sets, an optional
//! neighbour relation and optional perturbed step relations.
//!
//! ```json
//! {
//!   "states": ["a", "b"],
//!   "step": {"a": ["a"], "b": ["a", "b"]},
//!   "neighbors": {"a": ["b"]},
//!   "family": {"Xi1": ["a"], "Xi2": ["b"]},
//!   "eta_family": [{"eta": 0.1, "step": {"b": ["b"]}}]
//! }
//! ```
//!
//! Each `eta_family` entry overrides the successors of the states it lists
//! and keeps the base successors of the others.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use morseflow_core::morse::{InvariantFamily, MultiflowGraph, StateSet};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub states: Vec<String>,
    pub step: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub neighbors: BTreeMap<String, Vec<String>>,
    /// Kept as a JSON object so that set order follows the file.
    #[serde(default)]
    pub family: Map<String, Value>,
    #[serde(default)]
    pub eta_family: Vec<EtaEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaEntry {
    pub eta: f64,
    pub step: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: MultiflowGraph,
    pub family: InvariantFamily,
    /// Undirected neighbour sets by state index.
    pub neighbors: Vec<BTreeSet<usize>>,
    pub perturbed: Vec<(f64, MultiflowGraph)>,
}

fn index(labels: &[String], name: &str, context: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == name)
        .ok_or_else(|| CliError::Input(format!("{context}: unknown state `{name}`")))
}

fn successors(
    labels: &[String],
    step: &BTreeMap<String, Vec<String>>,
    base: Option<&[Vec<usize>]>,
    context: &str,
) -> Result<Vec<Vec<usize>>> {
    for key in step.keys() {
        index(labels, key, context)?;
    }
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| match (step.get(l), base) {
            (Some(to), _) => to.iter().map(|t| index(labels, t, context)).collect(),
            (None, Some(b)) => Ok(b[i].clone()),
            (None, None) => Err(CliError::Input(format!("{context}: state `{l}` has no successors listed"))),
        })
        .collect()
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("graph JSON: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn load(&self) -> Result<LoadedGraph> {
        let labels = self.states.clone();
        let succ = successors(&labels, &self.step, None, "step")?;
        let graph = MultiflowGraph::new(labels.clone(), succ.clone())?;

        let mut neighbors = vec![BTreeSet::new(); labels.len()];
        for (a, list) in &self.neighbors {
            let i = index(&labels, a, "neighbors")?;
            for b in list {
                let j = index(&labels, b, "neighbors")?;
                if i != j {
                    neighbors[i].insert(j);
                    neighbors[j].insert(i);
                }
            }
        }

        let mut names = Vec::new();
        let mut sets = Vec::new();
        for (name, members) in &self.family {
            let members: Vec<String> = serde_json::from_value(members.clone())
                .map_err(|_| CliError::Input(format!("family set `{name}` must be a list of states")))?;
            let set: StateSet = members
                .iter()
                .map(|m| index(&labels, m, "family"))
                .collect::<Result<_>>()?;
            names.push(name.clone());
            sets.push(set);
        }
        let family = InvariantFamily::new(&graph, names, sets).map_err(|e| CliError::Input(e.to_string()))?;

        let perturbed = self
            .eta_family
            .iter()
            .map(|entry| {
                let context = format!("eta_family at eta = {}", entry.eta);
                let s = successors(&labels, &entry.step, Some(&succ), &context)?;
                Ok((entry.eta, MultiflowGraph::new(labels.clone(), s)?))
            })
            .collect::<Result<_>>()?;

        Ok(LoadedGraph {
            graph,
            family,
            neighbors,
            perturbed,
        })
    }
}
