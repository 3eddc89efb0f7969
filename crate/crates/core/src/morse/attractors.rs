use alloc::format;
use alloc::vec::Vec;

use super::graph::{MultiflowGraph, StateSet};
use super::invariant::maximal_weakly_invariant;
use super::limits::{cyclic_states, omega_limit_of_set, recurrent_classes};
use crate::{Error, Result};

/// States lying on bi-infinite walks: the maximal weakly invariant subset of
/// the whole space.
pub fn global_attractor(graph: &MultiflowGraph) -> StateSet {
    maximal_weakly_invariant(graph, &graph.states())
}

/// Forward-closed `A` with `omega(A) = A`. With the discrete metric these
/// are exactly the forward closures `Reach*(C)` of nonempty sets `C` of
/// recurrent classes closed under reachability.
pub fn local_attractors(graph: &MultiflowGraph) -> Vec<StateSet> {
    let classes = recurrent_classes(graph);
    let k = classes.len();
    let reach: Vec<StateSet> = classes.iter().map(|c| graph.reach_star(c)).collect();
    // below[i]: classes reachable from class i
    let below: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| j != i && classes[j].iter().any(|x| reach[i].contains(x)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen = alloc::vec![false; k];
    enumerate_down_sets(0, &below, &mut chosen, &mut |sel: &[bool]| {
        if sel.iter().any(|&b| b) {
            let mut a = StateSet::new();
            for (i, _) in sel.iter().enumerate().filter(|(_, &b)| b) {
                a.extend(reach[i].iter().copied());
            }
            out.push(a);
        }
    });
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn enumerate_down_sets(
    i: usize,
    below: &[Vec<usize>],
    chosen: &mut [bool],
    emit: &mut impl FnMut(&[bool]),
) {
    if i == chosen.len() {
        // closed when every chosen class has its lower classes chosen
        let closed = (0..chosen.len())
            .filter(|&j| chosen[j])
            .all(|j| below[j].iter().all(|&l| chosen[l]));
        if closed {
            emit(chosen);
        }
        return;
    }
    chosen[i] = false;
    enumerate_down_sets(i + 1, below, chosen, emit);
    chosen[i] = true;
    enumerate_down_sets(i + 1, below, chosen, emit);
    chosen[i] = false;
}

pub fn is_local_attractor(graph: &MultiflowGraph, set: &StateSet) -> bool {
    !set.is_empty()
        && set.iter().all(|&x| graph.is_active(x))
        && graph.image(set).is_subset(set)
        && omega_limit_of_set(graph, set) == *set
}

/// `A* = { x in global attractor : omega(x) \ A != ∅ }`.
pub fn repeller(graph: &MultiflowGraph, attractor: &StateSet) -> Result<StateSet> {
    if !is_local_attractor(graph, attractor) {
        return Err(Error::domain(format!(
            "{:?} is not a local attractor",
            graph.labels_of(attractor)
        )));
    }
    Ok(repeller_unchecked(graph, attractor))
}

pub(crate) fn repeller_unchecked(graph: &MultiflowGraph, attractor: &StateSet) -> StateSet {
    // A is forward-closed, so omega(x) escapes A iff x reaches a cyclic
    // state outside A
    let cyclic = cyclic_states(graph);
    let outside: StateSet = cyclic.difference(attractor).copied().collect();
    global_attractor(graph)
        .intersection(&graph.coreach_star(&outside))
        .copied()
        .collect()
}
