use std::time::Instant;

use morseflow_core::connections::{
    build_morse_family, check_dynamically_gradient, edges_into_zero, energy_order_violations,
    morse_distance_sweep, probe_connections, zero_count_violations, ProbeSettings, EMPIRICAL,
};
use morseflow_core::equilibria::{enumerate_equilibria, EquilibriumId, ShootSettings};
use morseflow_core::nonlinearity::NonlinearityModel;
use morseflow_core::timemap::TimeMap;
use morseflow_core::Sign;

fn v(n: u32, sign: Sign) -> EquilibriumId {
    EquilibriumId::branch(n, sign)
}

#[test]
fn three_equilibria_connect_outward_from_zero() {
    let model = NonlinearityModel::heaviside(0.2).unwrap();
    let eqs = enumerate_equilibria(&TimeMap::new(model), 255, &ShootSettings::default()).unwrap();
    let start = Instant::now();
    let g = probe_connections(&model, &eqs, &ProbeSettings::default()).unwrap();
    eprintln!("{} probes in {:?}", g.probes, start.elapsed());
    let mut pairs: Vec<_> = g.edges.iter().map(|e| (e.src, e.dst)).collect();
    pairs.sort();
    assert_eq!(
        pairs,
        [
            (EquilibriumId::Zero, v(1, Sign::Plus)),
            (EquilibriumId::Zero, v(1, Sign::Minus))
        ]
    );
    assert!(g.uncaptured.is_empty());
    assert!(energy_order_violations(&g).is_empty());
    let fam = build_morse_family(&eqs, 1).unwrap();
    assert_eq!(fam.sets.len(), 1);
    let verdict = check_dynamically_gradient(&g, &fam);
    assert!(verdict.passed);
    assert_eq!(verdict.label, EMPIRICAL);
    assert!(build_morse_family(&eqs, 2).is_err());
}

#[test]
fn empty_amplitudes_give_no_edges() {
    let model = NonlinearityModel::heaviside(0.2).unwrap();
    let eqs = enumerate_equilibria(&TimeMap::new(model), 255, &ShootSettings::default()).unwrap();
    let settings = ProbeSettings {
        amps: vec![],
        ..ProbeSettings::default()
    };
    let g = probe_connections(&model, &eqs, &settings).unwrap();
    assert!(g.edges.is_empty());
    assert!(check_dynamically_gradient(&g, &build_morse_family(&eqs, 1).unwrap()).passed);
}

#[test]
fn seven_equilibria_follow_zero_count_order() {
    let model = NonlinearityModel::heaviside(0.1).unwrap();
    let eqs = enumerate_equilibria(&TimeMap::new(model), 511, &ShootSettings::default()).unwrap();
    assert_eq!(eqs.len(), 7);
    let start = Instant::now();
    let g = probe_connections(&model, &eqs, &ProbeSettings::default()).unwrap();
    eprintln!("{} probes in {:?}", g.probes, start.elapsed());
    for e in &g.edges {
        eprintln!("{} -> {} (mode {}, amp {}, t {})", e.src, e.dst, e.mode, e.amp, e.capture_time);
    }
    eprintln!("uncaptured {:?}", g.uncaptured);
    assert!(zero_count_violations(&g).is_empty());
    assert!(energy_order_violations(&g).is_empty());
    assert!(edges_into_zero(&g).is_empty());
    for cut in 1..=3 {
        let fam = build_morse_family(&eqs, cut).unwrap();
        let verdict = check_dynamically_gradient(&g, &fam);
        assert!(verdict.passed, "cut {cut}: {verdict:?}");
    }
    let fam = build_morse_family(&eqs, 2).unwrap();
    assert_eq!(fam.sets[0].members, [v(1, Sign::Plus), v(1, Sign::Minus)]);
    assert_eq!(fam.sets[1].members.len(), 5);
    assert!(fam.delta > 0.0 && fam.delta.is_finite());
    let bad = g.clone().with_edge(v(1, Sign::Plus), EquilibriumId::Zero);
    let verdict = check_dynamically_gradient(&bad, &fam);
    assert!(!verdict.passed);
    let cycle = verdict.cycle.unwrap();
    assert_eq!(cycle.first(), cycle.last());
    assert!(cycle.contains(&0) && cycle.contains(&1));
}

#[test]
fn morse_distances_shrink() {
    let shoot = ShootSettings::default();
    let t = morse_distance_sweep(&[0.15, 0.1, 0.05], 2, 1023, &shoot, 0.05).unwrap();
    assert!(t.passed(), "{t:?}");

    // with a single aggregate set, new branches appear at small eps and
    // start far from their limit profiles
    let t = morse_distance_sweep(&[0.3, 0.2, 0.1], 1, 1023, &shoot, 0.05).unwrap();
    assert_eq!(t.trend_breaks, [(2, 0)]);
    assert!(t.final_ok);
    let first: Vec<f64> = t
        .rows
        .iter()
        .map(|r| r.member_distances.iter().find(|(id, _)| *id == v(1, Sign::Plus)).unwrap().1)
        .collect();
    assert!(first.windows(2).all(|w| w[1] < w[0]), "{first:?}");
    for r in &t.rows {
        assert_eq!(r.member_distances[0], (EquilibriumId::Zero, 0.0));
    }
    assert!(morse_distance_sweep(&[0.3, 0.1], 2, 1023, &shoot, 0.05).is_err());
}
