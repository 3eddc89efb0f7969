mod support;

use proptest::prelude::*;
use support::oracle::{check_graph, exhaustive_three, family_from_colours, succ_from_masks};

#[test]
fn all_three_state_maps_match_brute_force() {
    let (cases, gradient) = exhaustive_three().unwrap();
    eprintln!("{cases} cases, {gradient} gradient");
    assert!(cases >= 343);
    assert!(gradient > 0);
}

fn graph_and_colours() -> impl Strategy<Value = (Vec<u32>, Vec<usize>)> {
    (4usize..=5).prop_flat_map(|n| {
        (
            prop::collection::vec(1u32..(1 << n), n),
            prop::collection::vec(0usize..=3, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 600,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn random_graphs_match_brute_force((masks, colours) in graph_and_colours()) {
        let succ = succ_from_masks(&masks);
        let family = family_from_colours(&succ, &colours);
        if let Err(msg) = check_graph(&succ, &family) {
            prop_assert!(false, "{}", msg);
        }
    }
}
