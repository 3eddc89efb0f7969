use std::collections::BTreeSet;

use morseflow_core::morse::{
    alpha_limit, check_morse_order, detect_homoclinic, global_attractor, is_dynamically_gradient,
    local_attractors, maximal_weakly_invariant, omega_limit, repeller, reorder_morse,
    robustness_sweep, InvariantFamily, MultiflowGraph, ReorderOutcome, StateSet,
};
use morseflow_core::Error;

fn graph(spec: &[(&str, &[&str])]) -> MultiflowGraph {
    let labels: Vec<String> = spec.iter().map(|(l, _)| l.to_string()).collect();
    let succ = spec
        .iter()
        .map(|(_, to)| {
            to.iter()
                .map(|t| labels.iter().position(|l| l == t).unwrap())
                .collect()
        })
        .collect();
    MultiflowGraph::new(labels, succ).unwrap()
}

fn set(g: &MultiflowGraph, labels: &[&str]) -> StateSet {
    labels.iter().map(|l| g.index_of(l).unwrap()).collect()
}

fn family(g: &MultiflowGraph, sets: &[&[&str]]) -> InvariantFamily {
    InvariantFamily::new(
        g,
        sets.iter().map(|s| s.join("")).collect(),
        sets.iter().map(|s| set(g, s)).collect(),
    )
    .unwrap()
}

fn chain() -> MultiflowGraph {
    graph(&[("1", &["1"]), ("2", &["1"]), ("3", &["3", "2"])])
}

fn homoclinic_pair() -> MultiflowGraph {
    graph(&[("1", &["1", "2"]), ("2", &["1"])])
}

#[test]
fn chain_exact_reachability() {
    let g = chain();
    let x3 = g.index_of("3").unwrap();
    assert_eq!(g.reach_exact(0, x3).unwrap(), set(&g, &["3"]));
    assert_eq!(g.reach_exact(2, x3).unwrap(), set(&g, &["1", "2", "3"]));
    assert!(matches!(g.index_of("9"), Err(Error::UnknownState(_))));
}

#[test]
fn chain_limits() {
    let g = chain();
    let idx = |l| g.index_of(l).unwrap();
    assert_eq!(omega_limit(&g, idx("3")).unwrap(), set(&g, &["1", "2", "3"]));
    assert_eq!(omega_limit(&g, idx("2")).unwrap(), set(&g, &["1"]));
    assert_eq!(omega_limit(&g, idx("1")).unwrap(), set(&g, &["1"]));
    assert_eq!(alpha_limit(&g, idx("1")).unwrap(), set(&g, &["1", "2", "3"]));
    assert_eq!(alpha_limit(&g, idx("3")).unwrap(), set(&g, &["3"]));
}

#[test]
fn chain_weak_invariance() {
    let g = chain();
    assert_eq!(maximal_weakly_invariant(&g, &g.states()), g.states());
    assert!(maximal_weakly_invariant(&g, &set(&g, &["2"])).is_empty());
    assert_eq!(maximal_weakly_invariant(&g, &set(&g, &["1"])), set(&g, &["1"]));
    assert_eq!(global_attractor(&g), g.states());
}

#[test]
fn chain_attractors_and_repellers() {
    let g = chain();
    let attractors = local_attractors(&g);
    assert_eq!(attractors, vec![set(&g, &["1"]), set(&g, &["1", "2", "3"])]);
    assert_eq!(repeller(&g, &set(&g, &["1"])).unwrap(), set(&g, &["3"]));
    assert!(repeller(&g, &g.states()).unwrap().is_empty());
    assert!(matches!(repeller(&g, &set(&g, &["3"])), Err(Error::Domain(_))));
}

#[test]
fn disjoint_fixed_points() {
    let g = graph(&[("a", &["a"]), ("b", &["b"])]);
    assert_eq!(
        local_attractors(&g),
        vec![set(&g, &["a"]), set(&g, &["b"]), set(&g, &["a", "b"])]
    );
    assert_eq!(repeller(&g, &set(&g, &["a"])).unwrap(), set(&g, &["b"]));
}

#[test]
fn homoclinic_self_loop() {
    let g = homoclinic_pair();
    let fam = family(&g, &[&["1"]]);
    let w = detect_homoclinic(&g, &fam).expect("self-loop through 2");
    assert_eq!(w.sets, vec![0, 0]);
    let labels: Vec<&str> = w.walks[0].iter().map(|&x| g.label(x)).collect();
    assert_eq!(labels, ["1", "2", "1"]);
    let report = is_dynamically_gradient(&g, &fam);
    assert!(report.homoclinic.is_some());
    assert!(!report.holds());
}

#[test]
fn chain_gradient_verdicts() {
    let g = chain();
    let both = family(&g, &[&["1"], &["3"]]);
    assert!(detect_homoclinic(&g, &both).is_none());
    assert!(is_dynamically_gradient(&g, &both).holds());
    let report = is_dynamically_gradient(&g, &family(&g, &[&["1"]]));
    assert!(!report.holds());
    assert_eq!(report.uncovered, vec![set(&g, &["3"])]);
}

#[test]
fn self_loops_only_has_no_homoclinic() {
    let g = graph(&[("a", &["a"]), ("b", &["b"]), ("c", &["c"])]);
    let fam = family(&g, &[&["a"], &["b"], &["c"]]);
    assert!(is_dynamically_gradient(&g, &fam).holds());
}

fn ordered_labels(outcome: &ReorderOutcome) -> Vec<String> {
    match outcome {
        ReorderOutcome::Ordered { family, .. } => family.labels().to_vec(),
        ReorderOutcome::Failed(f) => panic!("reorder failed: {}", f.reason),
    }
}

#[test]
fn chain_reorders_attractor_first() {
    let g = chain();
    let fam = family(&g, &[&["3"], &["1"]]);
    let out = reorder_morse(&g, &fam).unwrap();
    assert_eq!(ordered_labels(&out), ["1", "3"]);
    let ReorderOutcome::Ordered { family: ordered, order } = out else { unreachable!() };
    assert_eq!(order, [1, 0]);
    let check = check_morse_order(&g, &ordered);
    assert!(check.holds(), "{check:?}");
    assert_eq!(check.attractors, vec![set(&g, &["1"]), g.states()]);
}

#[test]
fn three_fixed_points_reorder() {
    let g = graph(&[("a", &["a"]), ("b", &["a", "b"]), ("c", &["b", "c"])]);
    let fam = family(&g, &[&["c"], &["a"], &["b"]]);
    let out = reorder_morse(&g, &fam).unwrap();
    assert_eq!(ordered_labels(&out), ["a", "b", "c"]);
    let wrong = fam.clone();
    let check = check_morse_order(&g, &wrong);
    assert!(!check.holds());
    assert!(!check.connection_violations.is_empty());
}

#[test]
fn single_set_reorders_to_itself() {
    let g = chain();
    let fam = family(&g, &[&["1", "2", "3"]]);
    assert_eq!(ordered_labels(&reorder_morse(&g, &fam).unwrap()), ["123"]);
}

#[test]
fn reorder_requires_gradient_family() {
    let g = homoclinic_pair();
    let fam = family(&g, &[&["1"]]);
    assert!(matches!(reorder_morse(&g, &fam), Err(Error::Precondition(_))));
}

fn four_state_base() -> MultiflowGraph {
    graph(&[("a", &["a"]), ("b", &["b", "a"]), ("c", &["a"]), ("d", &["a"])])
}

fn ad_neighbors(g: &MultiflowGraph) -> Vec<BTreeSet<usize>> {
    let (a, d) = (g.index_of("a").unwrap(), g.index_of("d").unwrap());
    let mut n = vec![BTreeSet::new(); g.len()];
    n[a].insert(d);
    n[d].insert(a);
    n
}

#[test]
fn constant_family_is_stable() {
    let g = four_state_base();
    let fam = family(&g, &[&["a"], &["b"]]);
    let etas = vec![(0.1, g.clone()), (0.5, g.clone())];
    let report = robustness_sweep(&g, &fam, &ad_neighbors(&g), &etas).unwrap();
    assert_eq!(report.eta0, 0.5);
    assert!(report.first_failure.is_none());
    assert!(report.verdicts.iter().all(|v| v.edges_match_base));
}

#[test]
fn back_edge_breaks_large_eta() {
    let g = four_state_base();
    let fam = family(&g, &[&["a"], &["b"]]);
    let small = graph(&[("a", &["a"]), ("b", &["b", "a"]), ("c", &["a"]), ("d", &["d", "a"])]);
    let large = graph(&[("a", &["a", "c"]), ("b", &["b", "a"]), ("c", &["d"]), ("d", &["d"])]);
    let etas = vec![(0.5, large), (0.2, small.clone()), (0.1, small)];
    let report = robustness_sweep(&g, &fam, &ad_neighbors(&g), &etas).unwrap();
    let etas: Vec<f64> = report.verdicts.iter().map(|v| v.eta).collect();
    assert_eq!(etas, [0.0, 0.1, 0.2, 0.5]);
    assert_eq!(report.eta0, 0.2);
    assert_eq!(report.first_failure, Some(0.5));
    let bad = report.first_failing_verdict().unwrap();
    assert_eq!(bad.derived[0], set(&g, &["a", "d"]));
    let witness = bad.gradient.as_ref().unwrap().homoclinic.as_ref().unwrap();
    assert_eq!(witness.sets, [0, 0]);
    assert!(witness.walks[0].contains(&g.index_of("c").unwrap()));
    assert!(!bad.diagnostics.has_issues());
}

#[test]
fn jumping_set_is_flagged() {
    let g = four_state_base();
    let fam = family(&g, &[&["a"], &["b"]]);
    let jumped = graph(&[("a", &["d"]), ("b", &["b", "a"]), ("c", &["a"]), ("d", &["d"])]);
    let report = robustness_sweep(&g, &fam, &ad_neighbors(&g), &[(0.3, jumped)]).unwrap();
    let v = &report.verdicts[1];
    assert_eq!(v.derived[0], set(&g, &["d"]));
    assert_eq!(v.diagnostics.jumped, [0]);
    assert!(v.diagnostics.has_issues());
}

#[test]
fn sweep_rejects_non_gradient_base() {
    let g = homoclinic_pair();
    let fam = family(&g, &[&["1"]]);
    let n = vec![BTreeSet::new(); 2];
    assert!(matches!(
        robustness_sweep(&g, &fam, &n, &[]),
        Err(Error::Precondition(_))
    ));
}
