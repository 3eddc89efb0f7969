use std::fs;

use morseflow::formats::{dot, read_xy_csv, real, write_csv};
use morseflow::graph_file::GraphFile;
use morseflow::init::{random_coefficients, InitSpec, RANDOM_MODES};
use morseflow::CliError;
use morseflow_core::grid::Grid;
use proptest::prelude::*;

#[test]
fn real_uses_seventeen_significant_digits() {
    assert_eq!(real(0.1), "1.0000000000000001e-1");
    assert_eq!(real(-2.0), "-2.0000000000000000e0");
}

#[test]
fn csv_round_trip_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let xs = [0.0, 0.25, 0.5, 1.0];
    let us = [0.0, 1.0 / 3.0, -0.7, 0.0];
    write_csv(&path, &["x", "u"], xs.iter().zip(&us).map(|(&x, &u)| vec![x, u])).unwrap();
    let (rx, ru) = read_xy_csv(&path).unwrap();
    assert_eq!(rx, xs);
    assert_eq!(ru, us);
}

#[test]
fn csv_rejects_ragged_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "x,u\n0,0\n1\n").unwrap();
    assert!(read_xy_csv(&path).is_err());
}

#[test]
fn init_specs_parse() {
    assert_eq!(
        "sin:k=2,amp=0.5".parse::<InitSpec>().unwrap(),
        InitSpec::Sine { k: 2, amp: 0.5 }
    );
    assert_eq!(
        "random:seed=7,amp=2".parse::<InitSpec>().unwrap(),
        InitSpec::Random { seed: Some(7), amp: 2.0 }
    );
    assert_eq!(
        "random:amp=1".parse::<InitSpec>().unwrap().seed(11),
        Some(11)
    );
    assert!("sin:k=0,amp=1".parse::<InitSpec>().is_err());
    assert!("sin:amp=1".parse::<InitSpec>().is_err());
    assert!("random:seed=x,amp=1".parse::<InitSpec>().is_err());
    assert!(matches!(
        "random:amp=1,colour=red".parse::<InitSpec>(),
        Err(CliError::Input(_))
    ));
    for s in ["sin:k=3,amp=0.25", "random:seed=4,amp=2"] {
        assert_eq!(s.parse::<InitSpec>().unwrap().to_string(), s);
    }
}

#[test]
fn file_init_interpolates_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tent.csv");
    fs::write(&path, "x,u\n0,0\n0.5,1\n1,0\n").unwrap();
    let grid = Grid::new(3).unwrap();
    let u = InitSpec::File(path).build(grid, 0).unwrap();
    assert_eq!(u.values, [0.0, 0.5, 1.0, 0.5, 0.0]);
}

#[test]
fn file_init_requires_dirichlet_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lifted.csv");
    fs::write(&path, "0,0.1\n1,0\n").unwrap();
    assert!(InitSpec::File(path).build(Grid::new(7).unwrap(), 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn random_coefficients_are_seeded_and_bounded(seed in any::<u64>(), amp in 0.0f64..10.0) {
        let c = random_coefficients(seed, amp);
        prop_assert_eq!(c.len(), RANDOM_MODES);
        prop_assert_eq!(&c, &random_coefficients(seed, amp));
        for (k, v) in c.iter().enumerate() {
            prop_assert!(v.abs() <= amp / (k + 1) as f64);
        }
    }

    #[test]
    fn real_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(real(x).parse::<f64>().unwrap(), x);
    }
}

const CHAIN: &str = r#"{
  "states": ["1", "2", "3"],
  "step": {"1": ["1"], "2": ["1"], "3": ["3", "2"]},
  "family": {"Xi3": ["3"], "Xi1": ["1"]}
}"#;

#[test]
fn graph_json_keeps_family_order() {
    let loaded = GraphFile::parse(CHAIN).unwrap().load().unwrap();
    assert_eq!(loaded.family.labels(), ["Xi3", "Xi1"]);
    assert_eq!(loaded.graph.len(), 3);
    assert!(loaded.perturbed.is_empty());
}

#[test]
fn graph_json_overrides_and_neighbors() {
    let text = r#"{
      "states": ["a", "b"],
      "step": {"a": ["a"], "b": ["b"]},
      "neighbors": {"a": ["b"]},
      "family": {"A": ["a"]},
      "eta_family": [{"eta": 0.3, "step": {"b": ["a"]}}]
    }"#;
    let loaded = GraphFile::parse(text).unwrap().load().unwrap();
    assert!(loaded.neighbors[1].contains(&0));
    let (eta, g) = &loaded.perturbed[0];
    assert_eq!(*eta, 0.3);
    assert_eq!(g.successors(0), [0]);
    assert_eq!(g.successors(1), [0]);
}

#[test]
fn graph_json_errors_are_input_errors() {
    let bad = [
        r#"{"states": ["a"], "step": {}}"#,
        r#"{"states": ["a"], "step": {"a": ["z"]}}"#,
        r#"{"states": ["a"], "step": {"a": ["a"]}, "family": {"X": ["q"]}}"#,
        r#"{"states": ["a", "b"], "step": {"a": ["a"], "b": ["a"]}, "family": {"X": ["b"]}}"#,
        r#"{"states": ["a"], "step": {"a": ["a"]}, "extra": 1}"#,
        r#"not json"#,
    ];
    for text in bad {
        let r = GraphFile::parse(text).and_then(|f| f.load());
        assert!(matches!(r, Err(CliError::Input(_))), "{text}");
    }
}

#[test]
fn dot_lists_nodes_and_edges() {
    let s = dot(
        "g",
        &["a".into(), "b".into()],
        &[("a".into(), "b".into(), Some("k=1".into()))],
    );
    assert!(s.starts_with("digraph \"g\" {"));
    assert!(s.contains("\"a\" -> \"b\" [label=\"k=1\"];"));
}
