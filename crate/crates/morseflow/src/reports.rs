//! Serializable views of analysis results.

use std::collections::BTreeMap;

use morseflow_core::connections::{
    ConnectionDigraph, Edge, GradientVerdict, MorseSetFamily, ProbeTask,
};
use morseflow_core::equilibria::EquilibriumProfile;
use morseflow_core::morse::{
    GradientReport, HomoclinicWitness, InvariantFamily, MorseOrderCheck, MultiflowGraph,
    ReorderFailure, RobustnessReport, StateSet,
};
use morseflow_core::pde::{EstimateCheck, TrajectoryRecord};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ProfileEntry {
    pub branch: String,
    pub file: String,
    pub energy: f64,
    /// `null` for the zero profile.
    pub zeros: Option<usize>,
    pub l2: f64,
    pub h10: f64,
    pub boundary_residual: f64,
    pub hamiltonian_drift: f64,
}

impl ProfileEntry {
    pub fn new(p: &EquilibriumProfile, file: String) -> Self {
        ProfileEntry {
            branch: p.id.to_string(),
            file,
            energy: p.energy,
            zeros: p.id.zero_count().map(|_| p.zeros),
            l2: p.l2,
            h10: p.h10,
            boundary_residual: p.boundary_residual,
            hamiltonian_drift: p.hamiltonian_drift,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EdgeJson {
    pub src: String,
    pub dst: String,
    pub mode: u32,
    pub amp: f64,
    /// `null` for edges added without a witness run.
    pub capture_time: Option<f64>,
}

impl From<&Edge> for EdgeJson {
    fn from(e: &Edge) -> Self {
        EdgeJson {
            src: e.src.to_string(),
            dst: e.dst.to_string(),
            mode: e.mode,
            amp: e.amp,
            capture_time: e.capture_time.is_finite().then_some(e.capture_time),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct NodeJson {
    pub id: String,
    pub zeros: Option<usize>,
    pub lyapunov: f64,
}

#[derive(Debug, Serialize)]
pub struct ProbeJson {
    pub source: String,
    pub mode: u32,
    pub amp: f64,
}

#[derive(Debug, Serialize)]
pub struct MorseSetJson {
    pub label: String,
    pub members: Vec<String>,
    pub aggregate: bool,
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub label: &'static str,
    pub passed: bool,
    pub uncovered: Vec<String>,
    pub self_loops: Vec<EdgeJson>,
    pub quotient_edges: Vec<(String, String)>,
    pub topological_order: Option<Vec<String>>,
    pub cycle: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct DigraphJson {
    pub model: String,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
    pub probes: usize,
    pub uncaptured: Vec<ProbeJson>,
    pub lyapunov_violations: usize,
    pub cut: u32,
    pub delta: f64,
    pub family: Vec<MorseSetJson>,
    pub verdict: VerdictJson,
    pub zero_count_violations: Vec<EdgeJson>,
    pub energy_order_violations: Vec<EdgeJson>,
}

fn set_labels(family: &MorseSetFamily, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| family.sets[i].label.clone()).collect()
}

impl DigraphJson {
    pub fn new(
        model: String,
        g: &ConnectionDigraph,
        family: &MorseSetFamily,
        verdict: &GradientVerdict,
        zero_count_violations: &[Edge],
        energy_order_violations: &[Edge],
    ) -> Self {
        let probe = |t: &ProbeTask| ProbeJson {
            source: g.nodes[t.source].to_string(),
            mode: t.mode,
            amp: t.amp,
        };
        DigraphJson {
            model,
            nodes: g
                .nodes
                .iter()
                .zip(&g.node_lyapunov)
                .map(|(id, &v)| NodeJson {
                    id: id.to_string(),
                    zeros: id.zero_count(),
                    lyapunov: v,
                })
                .collect(),
            edges: g.edges.iter().map(EdgeJson::from).collect(),
            probes: g.probes,
            uncaptured: g.uncaptured.iter().map(probe).collect(),
            lyapunov_violations: g.lyapunov_violations,
            cut: family.cut,
            delta: family.delta,
            family: family
                .sets
                .iter()
                .map(|s| MorseSetJson {
                    label: s.label.clone(),
                    members: s.members.iter().map(|m| m.to_string()).collect(),
                    aggregate: s.aggregate,
                })
                .collect(),
            verdict: VerdictJson {
                label: verdict.label,
                passed: verdict.passed,
                uncovered: verdict.uncovered.iter().map(|u| u.to_string()).collect(),
                self_loops: verdict.self_loops.iter().map(EdgeJson::from).collect(),
                quotient_edges: verdict
                    .quotient_edges
                    .iter()
                    .map(|&(a, b)| (family.sets[a].label.clone(), family.sets[b].label.clone()))
                    .collect(),
                topological_order: verdict.topological_order.as_ref().map(|o| set_labels(family, o)),
                cycle: verdict.cycle.as_ref().map(|c| set_labels(family, c)),
            },
            zero_count_violations: zero_count_violations.iter().map(EdgeJson::from).collect(),
            energy_order_violations: energy_order_violations.iter().map(EdgeJson::from).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateJson {
    pub holds: bool,
    pub constant: f64,
    pub checked: usize,
    pub min_margin: Option<f64>,
    pub first_failure: Option<f64>,
}

impl From<&EstimateCheck> for EstimateJson {
    fn from(c: &EstimateCheck) -> Self {
        EstimateJson {
            holds: c.holds(),
            constant: c.constant,
            checked: c.checked,
            min_margin: c.min_margin.is_finite().then_some(c.min_margin),
            first_failure: c.first_failure,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CaptureJson {
    pub id: String,
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub model: String,
    pub init: String,
    pub seed: Option<u64>,
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub lyapunov_monotone: bool,
    pub max_lyapunov_increase: Option<f64>,
    pub first_lyapunov_violation: Option<f64>,
    pub l2_bound: EstimateJson,
    pub h10_mean: EstimateJson,
    pub h10_pointwise: EstimateJson,
    pub captured: Option<CaptureJson>,
}

impl SimulationSummary {
    pub fn new(model: String, init: String, seed: Option<u64>, rec: &TrajectoryRecord, window: f64) -> Self {
        SimulationSummary {
            model,
            init,
            seed,
            dt: rec.dt,
            steps: rec.steps,
            final_time: rec.final_state.time,
            lyapunov_monotone: rec.lyapunov_monotone(),
            max_lyapunov_increase: rec
                .max_lyapunov_increase
                .is_finite()
                .then_some(rec.max_lyapunov_increase),
            first_lyapunov_violation: rec.first_lyapunov_violation.map(|v| v.time),
            l2_bound: (&rec.check_l2_bound()).into(),
            h10_mean: (&rec.check_h10_mean(window)).into(),
            h10_pointwise: (&rec.check_h10_pointwise(window)).into(),
            captured: rec.captured.map(|c| CaptureJson {
                id: c.id.to_string(),
                time: c.time,
                distance: c.distance,
            }),
        }
    }
}

fn labels(g: &MultiflowGraph, s: &StateSet) -> Vec<String> {
    g.labels_of(s)
}

fn family_map(g: &MultiflowGraph, names: &[String], sets: &[StateSet]) -> serde_json::Map<String, serde_json::Value> {
    names
        .iter()
        .zip(sets)
        .map(|(n, s)| (n.clone(), serde_json::json!(labels(g, s))))
        .collect()
}

#[derive(Debug, Serialize)]
pub struct WitnessJson {
    pub sets: Vec<String>,
    pub walks: Vec<Vec<String>>,
}

impl WitnessJson {
    pub fn new(g: &MultiflowGraph, family: &InvariantFamily, w: &HomoclinicWitness) -> Self {
        WitnessJson {
            sets: w.sets.iter().map(|&i| family.label(i).to_string()).collect(),
            walks: w
                .walks
                .iter()
                .map(|walk| walk.iter().map(|&x| g.label(x).to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckJson {
    pub dynamically_gradient: bool,
    pub recurrence_covered: bool,
    pub uncovered: Vec<Vec<String>>,
    pub homoclinic: Option<WitnessJson>,
}

impl CheckJson {
    pub fn new(g: &MultiflowGraph, family: &InvariantFamily, r: &GradientReport) -> Self {
        CheckJson {
            dynamically_gradient: r.holds(),
            recurrence_covered: r.recurrence_covered,
            uncovered: r.uncovered.iter().map(|s| labels(g, s)).collect(),
            homoclinic: r.homoclinic.as_ref().map(|w| WitnessJson::new(g, family, w)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReorderJson {
    pub ordered: bool,
    /// Set labels, attractor first.
    pub order: Vec<String>,
    pub family: serde_json::Map<String, serde_json::Value>,
    pub attractors: Vec<Vec<String>>,
    pub connection_violations: Vec<(String, String)>,
    pub identity_failures: Vec<String>,
    pub remaining: Vec<String>,
    pub reason: Option<String>,
}

impl ReorderJson {
    pub fn ordered(g: &MultiflowGraph, ordered: &InvariantFamily, check: &MorseOrderCheck) -> Self {
        let l = |i: usize| ordered.label(i).to_string();
        ReorderJson {
            ordered: check.holds(),
            order: ordered.labels().to_vec(),
            family: family_map(g, ordered.labels(), ordered.sets()),
            attractors: check.attractors.iter().map(|a| labels(g, a)).collect(),
            connection_violations: check.connection_violations.iter().map(|&(i, j)| (l(i), l(j))).collect(),
            identity_failures: check.identity_failures.iter().map(|&k| l(k)).collect(),
            remaining: Vec::new(),
            reason: None,
        }
    }

    pub fn failed(family: &InvariantFamily, f: &ReorderFailure) -> Self {
        ReorderJson {
            ordered: false,
            order: f.emitted.iter().map(|&i| family.label(i).to_string()).collect(),
            family: serde_json::Map::new(),
            attractors: Vec::new(),
            connection_violations: Vec::new(),
            identity_failures: Vec::new(),
            remaining: f.remaining.iter().map(|&i| family.label(i).to_string()).collect(),
            reason: Some(f.reason.clone()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsJson {
    pub empty: Vec<String>,
    pub jumped: Vec<String>,
    pub overlapping: Vec<(String, String)>,
}

#[derive(Debug, Serialize)]
pub struct EtaJson {
    pub eta: f64,
    pub passed: bool,
    pub derived: serde_json::Map<String, serde_json::Value>,
    pub diagnostics: DiagnosticsJson,
    pub dynamically_gradient: Option<bool>,
    pub uncovered: Vec<Vec<String>>,
    pub homoclinic: Option<WitnessJson>,
    pub edges_match_base: bool,
}

#[derive(Debug, Serialize)]
pub struct SweepJson {
    pub eta0: f64,
    pub first_failure: Option<f64>,
    pub base_edges: Vec<(String, String)>,
    /// How convergence of trajectories is judged on a finite graph.
    pub convergence_note: &'static str,
    pub verdicts: Vec<EtaJson>,
}

pub const EDGE_SET_NOTE: &str = "edge-set stabilization stands in for uniform convergence of trajectories";

impl SweepJson {
    pub fn new(g: &MultiflowGraph, family: &InvariantFamily, r: &RobustnessReport) -> Self {
        let l = |i: usize| family.label(i).to_string();
        SweepJson {
            eta0: r.eta0,
            first_failure: r.first_failure,
            base_edges: r.base_edges.iter().map(|&(i, j)| (l(i), l(j))).collect(),
            convergence_note: EDGE_SET_NOTE,
            verdicts: r
                .verdicts
                .iter()
                .map(|v| {
                    EtaJson {
                        eta: v.eta,
                        passed: v.passed(),
                        derived: family_map(g, family.labels(), &v.derived),
                        diagnostics: DiagnosticsJson {
                            empty: v.diagnostics.empty.iter().map(|&i| l(i)).collect(),
                            jumped: v.diagnostics.jumped.iter().map(|&i| l(i)).collect(),
                            overlapping: v.diagnostics.overlapping.iter().map(|&(i, j)| (l(i), l(j))).collect(),
                        },
                        dynamically_gradient: v.gradient.as_ref().map(|r| r.holds()),
                        uncovered: v
                            .gradient
                            .as_ref()
                            .map(|r| r.uncovered.iter().map(|s| labels(g, s)).collect())
                            .unwrap_or_default(),
                        homoclinic: v
                            .gradient
                            .as_ref()
                            .and_then(|r| r.homoclinic.as_ref())
                            .map(|w| WitnessJson::new(g, family, w)),
                        edges_match_base: v.edges_match_base,
                    }
                })
                .collect(),
        }
    }
}

/// Per-set distances keyed by label, for the `morse-sweep` CSV header.
pub fn distance_header(labels: &[String]) -> Vec<String> {
    std::iter::once("eps".to_string()).chain(labels.iter().cloned()).collect()
}

pub type Tolerances = BTreeMap<String, f64>;
