use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

pub type StateSet = BTreeSet<usize>;

/// Finite state set with a multivalued one-step relation.
///
/// States keep their indices under [`MultiflowGraph::restrict`]; removed
/// states become inactive and drop out of every relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiflowGraph {
    labels: Vec<String>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    active: Vec<bool>,
}

impl MultiflowGraph {
    /// Builds a graph from labelled states and successor lists. Every state
    /// needs at least one successor.
    pub fn new(labels: Vec<String>, succ: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if succ.len() != n {
            return Err(Error::Input(format!(
                "{} successor lists for {n} states",
                succ.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Input(format!("duplicate state `{l}`")));
            }
        }
        let mut clean = Vec::with_capacity(n);
        for (x, list) in succ.into_iter().enumerate() {
            let set: BTreeSet<usize> = list.into_iter().collect();
            if let Some(&bad) = set.iter().find(|&&y| y >= n) {
                return Err(Error::UnknownState(format!("#{bad}")));
            }
            if set.is_empty() {
                return Err(Error::Input(format!(
                    "state `{}` has no successor",
                    labels[x]
                )));
            }
            clean.push(set.into_iter().collect());
        }
        Ok(Self::from_parts(labels, clean, alloc::vec![true; n]))
    }

    /// Builds a graph with states labelled `0..n`.
    pub fn from_successors(succ: Vec<Vec<usize>>) -> Result<Self> {
        let labels = (0..succ.len()).map(|i| format!("{i}")).collect();
        Self::new(labels, succ)
    }

    fn from_parts(labels: Vec<String>, succ: Vec<Vec<usize>>, active: Vec<bool>) -> Self {
        let mut pred = alloc::vec![Vec::new(); labels.len()];
        for (x, list) in succ.iter().enumerate() {
            for &y in list {
                pred[y].push(x);
            }
        }
        MultiflowGraph {
            labels,
            succ,
            pred,
            active,
        }
    }

    /// Number of state indices, active or not.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_active(&self, x: usize) -> bool {
        self.active.get(x).copied().unwrap_or(false)
    }

    pub fn states(&self) -> StateSet {
        (0..self.len()).filter(|&x| self.active[x]).collect()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownState(String::from(label)))
    }

    pub fn successors(&self, x: usize) -> &[usize] {
        &self.succ[x]
    }

    pub fn predecessors(&self, x: usize) -> &[usize] {
        &self.pred[x]
    }

    pub fn check_state(&self, x: usize) -> Result<()> {
        if self.is_active(x) {
            Ok(())
        } else {
            Err(Error::UnknownState(format!("#{x}")))
        }
    }

    pub fn check_set(&self, set: &StateSet) -> Result<()> {
        set.iter().try_for_each(|&x| self.check_state(x))
    }

    pub fn labels_of(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|&x| self.labels[x].clone()).collect()
    }

    /// `G(1, S)`.
    pub fn image(&self, set: &StateSet) -> StateSet {
        set.iter()
            .flat_map(|&x| self.succ[x].iter().copied())
            .collect()
    }

    /// `G(t, x)`: endpoints of walks of length exactly `t`.
    pub fn reach_exact(&self, t: u64, x: usize) -> Result<StateSet> {
        self.check_state(x)?;
        Ok(self.reach_exact_set(t, &StateSet::from([x])))
    }

    /// `G(t, S)`, using the eventual periodicity of the image sequence.
    pub fn reach_exact_set(&self, t: u64, set: &StateSet) -> StateSet {
        let mut seen: BTreeMap<StateSet, u64> = BTreeMap::new();
        let mut history: Vec<StateSet> = Vec::new();
        let mut current = set.clone();
        let mut k = 0u64;
        while k < t {
            if let Some(&first) = seen.get(&current) {
                let period = k - first;
                let idx = first + (t - first) % period;
                return history[idx as usize].clone();
            }
            seen.insert(current.clone(), k);
            history.push(current.clone());
            current = self.image(&current);
            k += 1;
        }
        current
    }

    /// States reachable by walks of any length, including `S` itself.
    pub fn reach_star(&self, set: &StateSet) -> StateSet {
        self.closure(set, |x| &self.succ[x])
    }

    /// States that reach `S` by walks of any length, including `S` itself.
    pub fn coreach_star(&self, set: &StateSet) -> StateSet {
        self.closure(set, |x| &self.pred[x])
    }

    fn closure<'a>(&'a self, set: &StateSet, next: impl Fn(usize) -> &'a [usize]) -> StateSet {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for &y in next(x) {
                if out.insert(y) {
                    stack.push(y);
                }
            }
        }
        out
    }

    /// Keeps only the states in `keep`; the step relation becomes
    /// `G(1, x) ∩ keep`. Fails if a kept state loses every successor.
    pub fn restrict(&self, keep: &StateSet) -> Result<Self> {
        let n = self.len();
        let active: Vec<bool> = (0..n).map(|x| self.active[x] && keep.contains(&x)).collect();
        let mut succ = Vec::with_capacity(n);
        for x in 0..n {
            if !active[x] {
                succ.push(Vec::new());
                continue;
            }
            let list: Vec<usize> = self.succ[x].iter().copied().filter(|&y| active[y]).collect();
            if list.is_empty() {
                return Err(Error::Structural(format!(
                    "state `{}` has no successor inside the restriction",
                    self.labels[x]
                )));
            }
            succ.push(list);
        }
        Ok(Self::from_parts(self.labels.clone(), succ, active))
    }

    /// Strongly connected components of the active states, in reverse
    /// topological order of the condensation (sinks first).
    pub fn strongly_connected_components(&self) -> Vec<StateSet> {
        // iterative Tarjan
        let n = self.len();
        let mut index = alloc::vec![usize::MAX; n];
        let mut low = alloc::vec![0usize; n];
        let mut on_stack = alloc::vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if !self.active[root] || index[root] != usize::MAX {
                continue;
            }
            let mut work: Vec<(usize, usize)> = alloc::vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut next)) = work.last_mut() {
                if let Some(&w) = self.succ[v].get(*next) {
                    *next += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    work.pop();
                    if let Some(&(parent, _)) = work.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = StateSet::new();
                        loop {
                            let w = stack.pop().expect("Tarjan stack underflow");
                            on_stack[w] = false;
                            comp.insert(w);
                            if w == v {
                                break;
                            }
                        }
                        out.push(comp);
                    }
                }
            }
        }
        out
    }

    /// A shortest walk from some state of `from` to `to`, staying inside
    /// `within` when given.
    pub fn shortest_walk(
        &self,
        from: &StateSet,
        to: usize,
        within: Option<&StateSet>,
    ) -> Option<Vec<usize>> {
        let allowed = |x: usize| within.is_none_or(|w| w.contains(&x));
        let mut parent: BTreeMap<usize, Option<usize>> = BTreeMap::new();
        let mut queue = alloc::collections::VecDeque::new();
        for &s in from {
            if allowed(s) {
                parent.insert(s, None);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            if x == to {
                let mut walk = alloc::vec![x];
                let mut cur = x;
                while let Some(Some(p)) = parent.get(&cur) {
                    walk.push(*p);
                    cur = *p;
                }
                walk.reverse();
                return Some(walk);
            }
            for &y in &self.succ[x] {
                if allowed(y) && !parent.contains_key(&y) {
                    parent.insert(y, Some(x));
                    queue.push_back(y);
                }
            }
        }
        None
    }
}
