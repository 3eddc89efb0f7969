//! Empirical connection digraphs between equilibria, the Morse families
//! built from them, and the checks run on both.
//!
//! Every verdict here covers only the trajectories that were actually
//! integrated.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::equilibria::{
    enumerate_equilibria, limit_profile, EquilibriumId, EquilibriumProfile, ShootSettings,
};
use crate::grid::Grid;
use crate::nonlinearity::{NonlinearityModel, Sign};
use crate::pde::{
    integrate_until_capture, lyapunov, lyapunov_tolerance, CaptureSettings, FieldState,
};
use crate::timemap::{eigenvalue, max_branch_index, TimeMap};
use crate::{Error, Result};

/// Label attached to every verdict derived from sampled trajectories.
pub const EMPIRICAL: &str = "empirical";

pub const DEFAULT_AMPS: [f64; 2] = [0.01, 0.03];

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSettings {
    /// Unsigned amplitudes; each is used with both signs.
    pub amps: Vec<f64>,
    /// Sine modes; `None` uses `1..=2 * max branch index`.
    pub modes: Option<Vec<u32>>,
    pub capture: CaptureSettings,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            amps: DEFAULT_AMPS.to_vec(),
            modes: None,
            capture: CaptureSettings::default(),
        }
    }
}

/// One perturbed start: `equilibria[source] + amp * sin(mode pi x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeTask {
    pub source: usize,
    pub mode: u32,
    pub amp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOutcome {
    pub task: ProbeTask,
    /// Index of the capturing equilibrium and capture time.
    pub captured: Option<(usize, f64)>,
    pub lyapunov_monotone: bool,
}

/// Probe list in a fixed order: source, then mode, then amplitude, then sign.
pub fn probe_tasks(equilibria: &[EquilibriumProfile], settings: &ProbeSettings) -> Vec<ProbeTask> {
    let max_n = equilibria.iter().map(|e| e.id.index()).max().unwrap_or(0);
    let modes = settings
        .modes
        .clone()
        .unwrap_or_else(|| (1..=2 * max_n.max(1)).collect());
    let mut tasks = Vec::new();
    for source in 0..equilibria.len() {
        for &mode in &modes {
            for &amp in &settings.amps {
                for s in [1.0, -1.0] {
                    tasks.push(ProbeTask {
                        source,
                        mode,
                        amp: s * amp,
                    });
                }
            }
        }
    }
    tasks
}

pub fn run_probe(
    model: &NonlinearityModel,
    equilibria: &[EquilibriumProfile],
    task: &ProbeTask,
    capture: &CaptureSettings,
) -> Result<ProbeOutcome> {
    let src = equilibria
        .get(task.source)
        .ok_or_else(|| Error::domain("probe source out of range"))?;
    let u0 = FieldState::from_profile(src).perturbed(task.mode, task.amp);
    let rec = integrate_until_capture(model, &u0, equilibria, capture)?;
    Ok(ProbeOutcome {
        task: *task,
        captured: rec.captured.map(|c| (c.index, c.time)),
        lyapunov_monotone: rec.lyapunov_monotone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: EquilibriumId,
    pub dst: EquilibriumId,
    pub mode: u32,
    pub amp: f64,
    pub capture_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionDigraph {
    pub nodes: Vec<EquilibriumId>,
    /// Lyapunov value of each node under the model potential.
    pub node_lyapunov: Vec<f64>,
    /// First witness per `(src, dst)` pair, in probe order.
    pub edges: Vec<Edge>,
    pub probes: usize,
    pub uncaptured: Vec<ProbeTask>,
    pub lyapunov_violations: usize,
    /// `f'(0)` of the model the probes ran under.
    pub slope_at_zero: f64,
}

impl ConnectionDigraph {
    pub fn position(&self, id: EquilibriumId) -> Option<usize> {
        self.nodes.iter().position(|&n| n == id)
    }

    /// Adds an edge without a witness run.
    pub fn with_edge(mut self, src: EquilibriumId, dst: EquilibriumId) -> Self {
        self.edges.push(Edge {
            src,
            dst,
            mode: 0,
            amp: 0.0,
            capture_time: f64::NAN,
        });
        self
    }
}

/// Reduces probe outcomes to a digraph.
pub fn assemble_digraph(
    model: &NonlinearityModel,
    equilibria: &[EquilibriumProfile],
    outcomes: &[ProbeOutcome],
) -> ConnectionDigraph {
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let mut uncaptured = Vec::new();
    for o in outcomes {
        match o.captured {
            Some((dst, time)) if dst != o.task.source => {
                if seen.insert((o.task.source, dst)) {
                    edges.push(Edge {
                        src: equilibria[o.task.source].id,
                        dst: equilibria[dst].id,
                        mode: o.task.mode,
                        amp: o.task.amp,
                        capture_time: time,
                    });
                }
            }
            Some(_) => {}
            None => uncaptured.push(o.task),
        }
    }
    ConnectionDigraph {
        nodes: equilibria.iter().map(|e| e.id).collect(),
        node_lyapunov: equilibria
            .iter()
            .map(|e| lyapunov(model, &FieldState::from_profile(e)))
            .collect(),
        edges,
        probes: outcomes.len(),
        uncaptured,
        lyapunov_violations: outcomes.iter().filter(|o| !o.lyapunov_monotone).count(),
        slope_at_zero: model.slope_at_zero(),
    }
}

/// Runs every probe sequentially and assembles the digraph.
pub fn probe_connections(
    model: &NonlinearityModel,
    equilibria: &[EquilibriumProfile],
    settings: &ProbeSettings,
) -> Result<ConnectionDigraph> {
    let outcomes = probe_tasks(equilibria, settings)
        .iter()
        .map(|t| run_probe(model, equilibria, t, &settings.capture))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_digraph(model, equilibria, &outcomes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseSet {
    pub label: String,
    pub members: Vec<EquilibriumId>,
    /// Holds the zero equilibrium and every branch at or above the cut.
    pub aggregate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseSetFamily {
    pub cut: u32,
    pub sets: Vec<MorseSet>,
    /// Half the smallest L2 distance between members of different sets;
    /// infinite for a single set.
    pub delta: f64,
}

impl MorseSetFamily {
    pub fn set_of(&self, id: EquilibriumId) -> Option<usize> {
        self.sets.iter().position(|s| s.members.contains(&id))
    }
}

/// `[{v1+, v1-}, ..., {v(cut-1)+, v(cut-1)-}, {0} + {vk+-: k >= cut}]`.
pub fn build_morse_family(
    equilibria: &[EquilibriumProfile],
    cut: u32,
) -> Result<MorseSetFamily> {
    let max_n = equilibria.iter().map(|e| e.id.index()).max().unwrap_or(0);
    if cut == 0 || cut > max_n.max(1) {
        return Err(Error::domain(format!(
            "cut {cut} outside 1..={} for the available branches",
            max_n.max(1)
        )));
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); cut as usize];
    for (i, e) in equilibria.iter().enumerate() {
        let n = e.id.index();
        let slot = if n == 0 || n >= cut { cut - 1 } else { n - 1 };
        groups[slot as usize].push(i);
    }
    let mut delta = f64::INFINITY;
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            for &i in &groups[a] {
                for &j in &groups[b] {
                    let d = equilibria[i]
                        .grid
                        .l2_distance(&equilibria[i].values, &equilibria[j].values);
                    delta = delta.min(0.5 * d);
                }
            }
        }
    }
    let sets = groups
        .into_iter()
        .enumerate()
        .map(|(k, idx)| {
            let aggregate = k as u32 == cut - 1;
            MorseSet {
                label: if aggregate {
                    format!("Xi{cut}")
                } else {
                    format!("Xi{}", k + 1)
                },
                members: idx.iter().map(|&i| equilibria[i].id).collect(),
                aggregate,
            }
        })
        .collect();
    Ok(MorseSetFamily { cut, sets, delta })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientVerdict {
    pub label: &'static str,
    pub passed: bool,
    /// Edge endpoints that belong to no family set.
    pub uncovered: Vec<EquilibriumId>,
    /// Edges inside a non-aggregate set.
    pub self_loops: Vec<Edge>,
    /// Quotient edges `(from, to)` between distinct sets.
    pub quotient_edges: Vec<(usize, usize)>,
    /// Topological order of set indices when the quotient is acyclic.
    pub topological_order: Option<Vec<usize>>,
    /// A closed walk of set indices when it is not.
    pub cycle: Option<Vec<usize>>,
}

pub fn check_dynamically_gradient(
    digraph: &ConnectionDigraph,
    family: &MorseSetFamily,
) -> GradientVerdict {
    let mut uncovered = BTreeSet::new();
    let mut self_loops = Vec::new();
    let mut quotient = BTreeSet::new();
    for e in &digraph.edges {
        match (family.set_of(e.src), family.set_of(e.dst)) {
            (Some(a), Some(b)) if a == b => {
                if !family.sets[a].aggregate {
                    self_loops.push(*e);
                }
            }
            (Some(a), Some(b)) => {
                quotient.insert((a, b));
            }
            (a, b) => {
                if a.is_none() {
                    uncovered.insert(e.src);
                }
                if b.is_none() {
                    uncovered.insert(e.dst);
                }
            }
        }
    }
    let quotient_edges: Vec<(usize, usize)> = quotient.into_iter().collect();
    let (topological_order, cycle) = match topological_sort(family.sets.len(), &quotient_edges) {
        Ok(order) => (Some(order), None),
        Err(cycle) => (None, Some(cycle)),
    };
    GradientVerdict {
        label: EMPIRICAL,
        passed: uncovered.is_empty() && self_loops.is_empty() && cycle.is_none(),
        uncovered: uncovered.into_iter().collect(),
        self_loops,
        quotient_edges,
        topological_order,
        cycle,
    }
}

/// Kahn's algorithm; on failure returns a cycle `[a, b, ..., a]`.
fn topological_sort(n: usize, edges: &[(usize, usize)]) -> core::result::Result<Vec<usize>, Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // every remaining node keeps a remaining predecessor; walk backwards
    let remaining: BTreeSet<usize> = (0..n).filter(|v| !order.contains(v)).collect();
    let pred = |v: usize| {
        edges
            .iter()
            .find(|&&(a, b)| b == v && remaining.contains(&a))
            .map(|&(a, _)| a)
            .expect("remaining node without remaining predecessor")
    };
    let start = *remaining.iter().next().expect("nonempty remainder");
    let mut walk = vec![start];
    let mut pos = BTreeMap::from([(start, 0usize)]);
    loop {
        let p = pred(*walk.last().expect("nonempty walk"));
        if let Some(&i) = pos.get(&p) {
            let mut cycle: Vec<usize> = walk[i..].to_vec();
            cycle.push(p);
            cycle.reverse();
            return Err(cycle);
        }
        pos.insert(p, walk.len());
        walk.push(p);
    }
}

/// Edges whose source does not exceed the target's Lyapunov value by more
/// than the per-step tolerance.
pub fn energy_order_violations(digraph: &ConnectionDigraph) -> Vec<Edge> {
    digraph
        .edges
        .iter()
        .filter(|e| {
            let (Some(a), Some(b)) = (digraph.position(e.src), digraph.position(e.dst)) else {
                return true;
            };
            let (va, vb) = (digraph.node_lyapunov[a], digraph.node_lyapunov[b]);
            !(va - vb > lyapunov_tolerance(va))
        })
        .copied()
        .collect()
}

/// Edges that neither leave the zero equilibrium nor strictly lower the
/// zero count.
pub fn zero_count_violations(digraph: &ConnectionDigraph) -> Vec<Edge> {
    digraph
        .edges
        .iter()
        .filter(|e| match (e.src.zero_count(), e.dst.zero_count()) {
            (None, Some(_)) => false,
            (Some(a), Some(b)) => b >= a,
            _ => true,
        })
        .copied()
        .collect()
}

/// Edges into the zero equilibrium, which is unstable once `f'(0) > pi^2`.
pub fn edges_into_zero(digraph: &ConnectionDigraph) -> Vec<Edge> {
    if digraph.slope_at_zero <= eigenvalue(1) {
        return Vec::new();
    }
    digraph
        .edges
        .iter()
        .filter(|e| e.dst == EquilibriumId::Zero)
        .copied()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseDistanceRow {
    pub eps: f64,
    /// H1_0 semidistance from each family set to its limit representatives.
    pub set_distances: Vec<f64>,
    pub member_distances: Vec<(EquilibriumId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseDistanceTable {
    pub cut: u32,
    pub labels: Vec<String>,
    pub rows: Vec<MorseDistanceRow>,
    /// Sets whose distance failed to decrease from one row to the next.
    pub trend_breaks: Vec<(usize, usize)>,
    pub final_ok: bool,
}

impl MorseDistanceTable {
    pub const NOTE: &'static str = "aggregate distances use fixed-point representatives only \
         (a lower bound on the semidistance of the full set)";

    pub fn passed(&self) -> bool {
        self.trend_breaks.is_empty() && self.final_ok
    }
}

/// Distances for one `eps`: each family set against the zero profile and
/// the limit profiles of its branch indices.
pub fn morse_distance_row(
    eps: f64,
    cut: u32,
    max_limit_index: u32,
    interior: usize,
    shoot: &ShootSettings,
) -> Result<MorseDistanceRow> {
    let model = NonlinearityModel::heaviside(eps)?;
    let equilibria = enumerate_equilibria(&TimeMap::new(model), interior, shoot)?;
    let family = build_morse_family(&equilibria, cut)?;
    let grid = Grid::new(interior)?;
    let mut limits: Vec<(u32, Vec<f64>)> = vec![(0, vec![0.0; grid.len()])];
    for n in 1..=max_limit_index.max(cut) {
        for sign in [Sign::Plus, Sign::Minus] {
            limits.push((n, limit_profile(n, sign, interior)?.values));
        }
    }
    let mut member_distances = Vec::new();
    let mut set_distances = Vec::new();
    for set in &family.sets {
        let mut worst: f64 = 0.0;
        for id in &set.members {
            let profile = equilibria
                .iter()
                .find(|e| e.id == *id)
                .expect("family member comes from the enumeration");
            let d = limits
                .iter()
                .filter(|(n, _)| {
                    if set.aggregate {
                        *n == 0 || *n >= cut
                    } else {
                        *n == id.index()
                    }
                })
                .map(|(_, v)| grid.h10_distance(&profile.values, v))
                .fold(f64::INFINITY, f64::min);
            member_distances.push((*id, d));
            worst = worst.max(d);
        }
        set_distances.push(worst);
    }
    Ok(MorseDistanceRow {
        eps,
        set_distances,
        member_distances,
    })
}

pub fn assemble_distance_table(cut: u32, rows: Vec<MorseDistanceRow>, sweep_tol: f64) -> MorseDistanceTable {
    let labels = (1..=cut).map(|k| format!("Xi{k}")).collect();
    let mut trend_breaks = Vec::new();
    for (i, w) in rows.windows(2).enumerate() {
        for (s, (a, b)) in w[0].set_distances.iter().zip(&w[1].set_distances).enumerate() {
            if b >= a && *a > 0.0 {
                trend_breaks.push((i + 1, s));
            }
        }
    }
    let final_ok = rows
        .last()
        .is_some_and(|r| r.set_distances.iter().all(|&d| d < sweep_tol));
    MorseDistanceTable {
        cut,
        labels,
        rows,
        trend_breaks,
        final_ok,
    }
}

/// Checks that every `eps` admits the cut, then returns the largest branch
/// index over the list.
pub fn check_distance_sweep_domain(eps_list: &[f64], cut: u32) -> Result<u32> {
    let mut max_index = 0;
    for &eps in eps_list {
        let n = max_branch_index(&NonlinearityModel::heaviside(eps)?);
        if cut == 0 || cut > n.max(1) {
            return Err(Error::domain(format!("eps = {eps} does not admit cut {cut}")));
        }
        max_index = max_index.max(n);
    }
    Ok(max_index)
}

pub fn morse_distance_sweep(
    eps_list: &[f64],
    cut: u32,
    interior: usize,
    shoot: &ShootSettings,
    sweep_tol: f64,
) -> Result<MorseDistanceTable> {
    let max_index = check_distance_sweep_domain(eps_list, cut)?;
    let rows = eps_list
        .iter()
        .map(|&eps| morse_distance_row(eps, cut, max_index, interior, shoot))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_distance_table(cut, rows, sweep_tol))
}
