use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::graph::{MultiflowGraph, StateSet};
use super::homoclinic::{connection_edges, is_dynamically_gradient, GradientReport};
use super::invariant::{maximal_weakly_invariant, InvariantFamily};
use crate::{Error, Result};

/// Problems with a derived family.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamilyDiagnostics {
    /// Derived sets that came out empty.
    pub empty: Vec<usize>,
    /// Derived sets that no longer meet their base set.
    pub jumped: Vec<usize>,
    /// Pairs of derived sets that intersect.
    pub overlapping: Vec<(usize, usize)>,
}

impl FamilyDiagnostics {
    /// The derived family fails to stay close to the base family.
    pub fn has_issues(&self) -> bool {
        !(self.empty.is_empty() && self.jumped.is_empty() && self.overlapping.is_empty())
    }

    fn family_usable(&self) -> bool {
        self.empty.is_empty() && self.overlapping.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaVerdict {
    pub eta: f64,
    pub derived: Vec<StateSet>,
    pub diagnostics: FamilyDiagnostics,
    /// Absent when the derived sets do not form a family.
    pub gradient: Option<GradientReport>,
    /// Connection pairs between distinct sets equal those at the base.
    /// Stands in for uniform convergence of trajectories.
    pub edges_match_base: bool,
}

impl EtaVerdict {
    pub fn passed(&self) -> bool {
        self.gradient.as_ref().is_some_and(|g| g.holds())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub base_edges: BTreeSet<(usize, usize)>,
    /// One verdict per graph, by increasing `eta`, the base first.
    pub verdicts: Vec<EtaVerdict>,
    /// Largest `eta` such that every graph at or below it passes.
    pub eta0: f64,
    /// First `eta` that failed.
    pub first_failure: Option<f64>,
}

impl RobustnessReport {
    pub fn first_failing_verdict(&self) -> Option<&EtaVerdict> {
        self.verdicts.iter().find(|v| !v.passed())
    }
}

/// Derives `Xi_i^eta = mwi_eta(V_i)` with `V_i` the neighbour ball of the
/// base set `Xi_i^0`, and checks each perturbed graph against its derived
/// family.
pub fn robustness_sweep(
    base: &MultiflowGraph,
    family: &InvariantFamily,
    neighbors: &[BTreeSet<usize>],
    perturbed: &[(f64, MultiflowGraph)],
) -> Result<RobustnessReport> {
    family.validate(base)?;
    if neighbors.len() != base.len() {
        return Err(Error::Input("neighbour relation must cover every state".into()));
    }
    for (eta, g) in perturbed {
        if !(*eta > 0.0) || !eta.is_finite() {
            return Err(Error::Input(alloc::format!("perturbation level {eta} must be positive")));
        }
        if g.labels() != base.labels() {
            return Err(Error::Input(alloc::format!(
                "graph at eta = {eta} has a different state set"
            )));
        }
    }
    let base_report = is_dynamically_gradient(base, family);
    if !base_report.holds() {
        return Err(Error::Precondition(
            "base family is not dynamically gradient for the base graph".into(),
        ));
    }
    let base_edges = connection_edges(base, family, false);
    let balls: Vec<StateSet> = family
        .sets()
        .iter()
        .map(|s| {
            let mut ball = s.clone();
            for &x in s {
                ball.extend(neighbors[x].iter().copied());
            }
            ball
        })
        .collect();

    let mut runs: Vec<(f64, &MultiflowGraph)> = perturbed.iter().map(|(e, g)| (*e, g)).collect();
    runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut verdicts = alloc::vec![EtaVerdict {
        eta: 0.0,
        derived: family.sets().to_vec(),
        diagnostics: FamilyDiagnostics::default(),
        gradient: Some(base_report),
        edges_match_base: true,
    }];
    for (eta, g) in runs {
        let derived: Vec<StateSet> = balls.iter().map(|b| maximal_weakly_invariant(g, b)).collect();
        let mut diagnostics = FamilyDiagnostics::default();
        for (i, d) in derived.iter().enumerate() {
            if d.is_empty() {
                diagnostics.empty.push(i);
            } else if d.is_disjoint(family.set(i)) {
                diagnostics.jumped.push(i);
            }
            for (j, e) in derived.iter().enumerate().skip(i + 1) {
                if !d.is_disjoint(e) {
                    diagnostics.overlapping.push((i, j));
                }
            }
        }
        let (gradient, edges_match_base) = if diagnostics.family_usable() {
            let fam = InvariantFamily::unchecked(family.labels().to_vec(), derived.clone())?;
            (
                Some(is_dynamically_gradient(g, &fam)),
                connection_edges(g, &fam, false) == base_edges,
            )
        } else {
            (None, false)
        };
        verdicts.push(EtaVerdict {
            eta,
            derived,
            diagnostics,
            gradient,
            edges_match_base,
        });
    }
    let first_bad = verdicts.iter().position(|v| !v.passed());
    let eta0 = match first_bad {
        Some(k) => verdicts[k - 1].eta,
        None => verdicts.last().map_or(0.0, |v| v.eta),
    };
    Ok(RobustnessReport {
        base_edges,
        first_failure: first_bad.map(|k| verdicts[k].eta),
        verdicts,
        eta0,
    })
}
