//! Exact finite-state multivalued semiflows.
//!
//! A [`MultiflowGraph`] is a finite state set with a one-step relation in
//! which every state has at least one successor. `G(t, x)` is the set of
//! endpoints of walks of length exactly `t` from `x`. Distances are discrete,
//! so neighbourhoods of radius below one are the sets themselves.

mod attractors;
mod graph;
mod homoclinic;
mod invariant;
mod limits;
mod reorder;
mod robustness;

pub use attractors::{global_attractor, is_local_attractor, local_attractors, repeller};
pub use graph::{MultiflowGraph, StateSet};
pub use homoclinic::{
    connection_edges, detect_homoclinic, is_dynamically_gradient, GradientReport,
    HomoclinicWitness,
};
pub use invariant::{is_weakly_invariant, maximal_weakly_invariant, InvariantFamily};
pub use limits::{alpha_limit, cyclic_states, omega_limit, omega_limit_of_set, recurrent_classes};
pub use reorder::{check_morse_order, reorder_morse, MorseOrderCheck, ReorderFailure, ReorderOutcome};
pub use robustness::{robustness_sweep, EtaVerdict, FamilyDiagnostics, RobustnessReport};
