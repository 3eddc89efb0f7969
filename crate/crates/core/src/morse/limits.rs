use alloc::vec::Vec;

use super::graph::{MultiflowGraph, StateSet};
use crate::Result;

/// Nontrivial strongly connected components: those carrying a cycle.
pub fn recurrent_classes(graph: &MultiflowGraph) -> Vec<StateSet> {
    graph
        .strongly_connected_components()
        .into_iter()
        .filter(|c| {
            c.len() > 1 || {
                let x = *c.iter().next().expect("nonempty component");
                graph.successors(x).contains(&x)
            }
        })
        .collect()
}

/// States lying on some cycle.
pub fn cyclic_states(graph: &MultiflowGraph) -> StateSet {
    recurrent_classes(graph).into_iter().flatten().collect()
}

/// `omega(x) = { y : y in G(t, x) for infinitely many t }`.
///
/// A walk longer than the state count repeats a state, so these are exactly
/// the states reachable through some cycle.
pub fn omega_limit(graph: &MultiflowGraph, x: usize) -> Result<StateSet> {
    graph.check_state(x)?;
    Ok(omega_limit_of_set(graph, &StateSet::from([x])))
}

pub fn omega_limit_of_set(graph: &MultiflowGraph, set: &StateSet) -> StateSet {
    let cyclic = cyclic_states(graph);
    let through: StateSet = graph.reach_star(set).intersection(&cyclic).copied().collect();
    graph.reach_star(&through)
}

/// `alpha(x) = { y : x in G(t, y) for infinitely many t }`.
pub fn alpha_limit(graph: &MultiflowGraph, x: usize) -> Result<StateSet> {
    graph.check_state(x)?;
    let cyclic = cyclic_states(graph);
    let through: StateSet = graph
        .coreach_star(&StateSet::from([x]))
        .intersection(&cyclic)
        .copied()
        .collect();
    Ok(graph.coreach_star(&through))
}
