use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::attractors::{global_attractor, is_local_attractor, repeller_unchecked};
use super::graph::{MultiflowGraph, StateSet};
use super::homoclinic::{connection_edges, is_dynamically_gradient};
use super::invariant::InvariantFamily;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReorderOutcome {
    /// `order[k]` is the input index of the set placed at position `k`.
    Ordered { order: Vec<usize>, family: InvariantFamily },
    Failed(ReorderFailure),
}

/// No remaining family set was a local attractor of the restricted dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorderFailure {
    pub emitted: Vec<usize>,
    pub remaining: Vec<usize>,
    /// Active states of the restricted dynamics at the point of failure.
    pub active: StateSet,
    pub reason: String,
}

/// Orders a dynamically gradient family so that connections only run from
/// higher to lower positions.
///
/// Repeatedly picks a remaining set that is a local attractor of the current
/// dynamics, then restricts the dynamics to its repeller.
pub fn reorder_morse(graph: &MultiflowGraph, family: &InvariantFamily) -> Result<ReorderOutcome> {
    family.validate(graph)?;
    if !is_dynamically_gradient(graph, family).holds() {
        return Err(Error::Precondition(
            "family is not dynamically gradient for this graph".into(),
        ));
    }
    let mut current = graph.restrict(&global_attractor(graph))?;
    let mut remaining: Vec<usize> = (0..family.len()).collect();
    let mut emitted = Vec::new();
    while !remaining.is_empty() {
        let active = current.states();
        let pick = remaining.iter().position(|&i| {
            family.set(i).is_subset(&active) && is_local_attractor(&current, family.set(i))
        });
        let Some(pos) = pick else {
            return Ok(ReorderOutcome::Failed(ReorderFailure {
                reason: format!(
                    "none of {:?} is a local attractor of the restricted dynamics",
                    remaining.iter().map(|&i| family.label(i)).collect::<Vec<_>>()
                ),
                emitted,
                remaining,
                active,
            }));
        };
        let i = remaining.remove(pos);
        emitted.push(i);
        let star = repeller_unchecked(&current, family.set(i));
        current = match current.restrict(&star) {
            Ok(g) => g,
            Err(e) => {
                return Ok(ReorderOutcome::Failed(ReorderFailure {
                    reason: format!("restriction to the repeller of `{}` failed: {e}", family.label(i)),
                    emitted,
                    remaining,
                    active: star,
                }))
            }
        };
    }
    Ok(ReorderOutcome::Ordered {
        family: family.reordered(&emitted),
        order: emitted,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseOrderCheck {
    /// Connections `(i, j)` between positions with `j > i`.
    pub connection_violations: Vec<(usize, usize)>,
    /// `A_k = Reach*(Xi_1 ∪ ... ∪ Xi_k)`.
    pub attractors: Vec<StateSet>,
    /// Positions `k` where `A_k` is not a local attractor or
    /// `A_k ∩ A*_{k-1} != Xi_k`.
    pub identity_failures: Vec<usize>,
}

impl MorseOrderCheck {
    pub fn holds(&self) -> bool {
        self.connection_violations.is_empty() && self.identity_failures.is_empty()
    }
}

/// Checks an ordered family: every connection between distinct sets goes
/// down, and the nested attractors recover each set as `A_k ∩ A*_{k-1}`.
pub fn check_morse_order(graph: &MultiflowGraph, ordered: &InvariantFamily) -> MorseOrderCheck {
    let connection_violations = connection_edges(graph, ordered, false)
        .into_iter()
        .filter(|&(i, j)| j > i)
        .collect();
    let mut attractors = Vec::new();
    let mut identity_failures = Vec::new();
    let mut union = StateSet::new();
    let mut prev_star = global_attractor(graph);
    for k in 0..ordered.len() {
        union.extend(ordered.set(k).iter().copied());
        let a = graph.reach_star(&union);
        if !is_local_attractor(graph, &a) {
            identity_failures.push(k);
        } else {
            let m: StateSet = a.intersection(&prev_star).copied().collect();
            if m != *ordered.set(k) {
                identity_failures.push(k);
            }
        }
        prev_star = repeller_unchecked(graph, &a);
        attractors.push(a);
    }
    MorseOrderCheck {
        connection_violations,
        attractors,
        identity_failures,
    }
}
