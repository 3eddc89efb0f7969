use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::graph::{MultiflowGraph, StateSet};
use super::invariant::InvariantFamily;
use super::limits::{cyclic_states, recurrent_classes};

/// A cyclic chain of connections `sets[0] -> sets[1] -> ... -> sets[0]`,
/// with one walk per link. Each walk starts on a cycle in its source set,
/// passes a state outside both sets, and ends on a cycle in its target set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomoclinicWitness {
    pub sets: Vec<usize>,
    pub walks: Vec<Vec<usize>>,
}

struct Flows {
    cyc_in: Vec<StateSet>,
    forward: Vec<StateSet>,
    backward: Vec<StateSet>,
}

fn flows(graph: &MultiflowGraph, family: &InvariantFamily) -> Flows {
    let cyclic = cyclic_states(graph);
    let cyc_in: Vec<StateSet> = family
        .sets()
        .iter()
        .map(|s| s.intersection(&cyclic).copied().collect())
        .collect();
    Flows {
        forward: cyc_in.iter().map(|c| graph.reach_star(c)).collect(),
        backward: cyc_in.iter().map(|c| graph.coreach_star(c)).collect(),
        cyc_in,
    }
}

/// Pairs `(i, j)` joined by a bi-infinite walk whose past cycles through
/// `family[i]`, whose future cycles through `family[j]`, and which visits a
/// state outside both. With `require_exit == false` the outside visit is
/// not required and only `i != j` pairs are reported.
pub fn connection_edges(
    graph: &MultiflowGraph,
    family: &InvariantFamily,
    require_exit: bool,
) -> BTreeSet<(usize, usize)> {
    let f = flows(graph, family);
    let mut edges = BTreeSet::new();
    for i in 0..family.len() {
        for j in 0..family.len() {
            if require_exit {
                if exit_state(&f, family, i, j).is_some() {
                    edges.insert((i, j));
                }
            } else if i != j && f.forward[i].intersection(&f.cyc_in[j]).next().is_some() {
                edges.insert((i, j));
            }
        }
    }
    edges
}

fn exit_state(f: &Flows, family: &InvariantFamily, i: usize, j: usize) -> Option<usize> {
    f.forward[i]
        .intersection(&f.backward[j])
        .find(|z| !family.set(i).contains(z) && !family.set(j).contains(z))
        .copied()
}

/// A homoclinic chain of connections (self-loops included), if any.
pub fn detect_homoclinic(
    graph: &MultiflowGraph,
    family: &InvariantFamily,
) -> Option<HomoclinicWitness> {
    let f = flows(graph, family);
    let k = family.len();
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); k];
    for (i, row) in adj.iter_mut().enumerate() {
        for j in 0..k {
            if exit_state(&f, family, i, j).is_some() {
                row.push(j);
            }
        }
    }
    let cycle = find_cycle(&adj)?;
    let walks = cycle
        .windows(2)
        .map(|w| link_walk(graph, family, &f, w[0], w[1]))
        .collect();
    Some(HomoclinicWitness { sets: cycle, walks })
}

fn link_walk(
    graph: &MultiflowGraph,
    family: &InvariantFamily,
    f: &Flows,
    i: usize,
    j: usize,
) -> Vec<usize> {
    let z = exit_state(f, family, i, j).expect("link exists");
    let mut walk = graph
        .shortest_walk(&f.cyc_in[i], z, None)
        .expect("exit state reachable from source cycles");
    let tail = f.cyc_in[j]
        .iter()
        .filter_map(|&c| graph.shortest_walk(&StateSet::from([z]), c, None))
        .min_by_key(|w| w.len())
        .expect("target cycles reachable from exit state");
    walk.extend_from_slice(&tail[1..]);
    walk
}

/// Closed walk `[a, ..., a]` in a small digraph, preferring self-loops.
fn find_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    if let Some(i) = (0..adj.len()).find(|&i| adj[i].contains(&i)) {
        return Some(alloc::vec![i, i]);
    }
    // 0 unvisited, 1 on the current path, 2 done
    let mut color = alloc::vec![0u8; adj.len()];
    for root in 0..adj.len() {
        if color[root] != 0 {
            continue;
        }
        let mut path = alloc::vec![root];
        let mut next = alloc::vec![0usize];
        color[root] = 1;
        while let Some(&v) = path.last() {
            let idx = next.last_mut().expect("parallel stacks");
            if let Some(&w) = adj[v].get(*idx) {
                *idx += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        path.push(w);
                        next.push(0);
                    }
                    1 => {
                        let start = path.iter().position(|&p| p == w).expect("on path");
                        let mut cycle = path[start..].to_vec();
                        cycle.push(w);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                path.pop();
                next.pop();
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientReport {
    /// Every recurrent class lies inside a single family set.
    pub recurrence_covered: bool,
    /// Recurrent classes not contained in one family set.
    pub uncovered: Vec<StateSet>,
    pub homoclinic: Option<HomoclinicWitness>,
}

impl GradientReport {
    pub fn holds(&self) -> bool {
        self.recurrence_covered && self.homoclinic.is_none()
    }
}

pub fn is_dynamically_gradient(graph: &MultiflowGraph, family: &InvariantFamily) -> GradientReport {
    let uncovered: Vec<StateSet> = recurrent_classes(graph)
        .into_iter()
        .filter(|c| !family.sets().iter().any(|s| c.is_subset(s)))
        .collect();
    GradientReport {
        recurrence_covered: uncovered.is_empty(),
        uncovered,
        homoclinic: detect_homoclinic(graph, family),
    }
}
