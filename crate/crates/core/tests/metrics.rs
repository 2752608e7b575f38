//! Metric hand values and partition bookkeeping.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sllresyn::blif::{parse_blif, ParseOptions};
use sllresyn::metrics::{
    bbox_cost_md, bbox_cost_sd, count_sll, count_sll_fo, count_sll_with, load_placement,
    wire_delays, DieGeometry, MetricsError, MetricsReport, SllCountMode,
};
use sllresyn::partition::{
    imbalance_ratio, load_assignment, load_assignment_subset, partition_hash, save_assignment,
    DieAssignment,
};
use sllresyn::truth_table::TruthTable;

const BLIF: &str = include_str!("../data/two_die_xor.blif");
const PART: &str = include_str!("../data/two_die_xor.part");

fn buffer() -> sllresyn::netlist::Netlist {
    parse_blif(
        ".model t\n.inputs a\n.outputs b\n.names a b\n1 1\n.end\n",
        &ParseOptions::default(),
    )
    .unwrap()
}

#[test]
fn spanning_net_gets_virtual_terminals() {
    let n = buffer();
    let g = DieGeometry {
        width: 10,
        height: 10,
    };
    let p = load_placement("a 2 3 0\nb 6 8 1\n", g, 5.0).unwrap();
    let a = load_assignment(&n, "a 0\nb 1\n", Some(2)).unwrap();
    // Crossing column is the lower median x = 2. Die 0 box: (2,3)-(2,9) = 6.
    // Die 1 box: (6,8)-(2,0) = 12. One SLL at 5.
    assert_eq!(bbox_cost_md(&n, &p, &a).unwrap(), 23.0);
    assert_eq!(bbox_cost_sd(&n, &p, 0).unwrap(), 0.0);

    let same = load_placement("a 2 3 0\nb 6 8 0\n", g, 5.0).unwrap();
    let one = DieAssignment::uniform(&n, 1, 0);
    assert_eq!(bbox_cost_md(&n, &same, &one).unwrap(), 9.0);
    assert_eq!(bbox_cost_sd(&n, &same, 0).unwrap(), 9.0);
}

#[test]
fn placement_must_match_assignment() {
    let n = buffer();
    let g = DieGeometry {
        width: 10,
        height: 10,
    };
    let p = load_placement("a 2 3 0\nb 6 8 0\n", g, 5.0).unwrap();
    let a = load_assignment(&n, "a 0\nb 1\n", Some(2)).unwrap();
    assert!(matches!(
        bbox_cost_md(&n, &p, &a),
        Err(MetricsError::DieMismatch { .. })
    ));
    let missing = load_placement("a 2 3 0\n", g, 5.0).unwrap();
    assert!(matches!(
        bbox_cost_sd(&n, &missing, 0),
        Err(MetricsError::Unplaced(_))
    ));
    assert!(matches!(
        load_placement("a 20 3 0\n", g, 5.0),
        Err(MetricsError::OutOfBounds { .. })
    ));
}

#[test]
fn example_counts() {
    let n = parse_blif(BLIF, &ParseOptions::default()).unwrap();
    let a = load_assignment(&n, PART, None).unwrap();
    assert_eq!(count_sll(&n, &a).unwrap(), 2);
    assert_eq!(count_sll_fo(&n, &a).unwrap(), 2);
    assert_eq!(count_sll_with(&n, &a, SllCountMode::RawNet).unwrap(), 2);
    // Die 0 holds X, die 1 holds Y and F.
    assert_eq!(a.die_weights(&n), [1, 2]);
    assert!((a.imbalance(&n).unwrap() - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn per_die_and_raw_net_modes_differ_on_multi_die_nets() {
    let text = ".model m\n.inputs a\n.outputs x y\n.names a x\n1 1\n.names a y\n0 1\n.end\n";
    let n = parse_blif(text, &ParseOptions::default()).unwrap();
    let a = load_assignment(&n, "a 0\nx 1\ny 2\n", Some(3)).unwrap();
    assert_eq!(count_sll(&n, &a).unwrap(), 2);
    assert_eq!(count_sll_with(&n, &a, SllCountMode::RawNet).unwrap(), 1);
    assert_eq!(count_sll_fo(&n, &a).unwrap(), 2);
}

#[test]
fn imbalance_hand_values() {
    assert_eq!(imbalance_ratio(&[6, 4]).unwrap(), 1.2);
    assert_eq!(imbalance_ratio(&[5, 5]).unwrap(), 1.0);
    assert_eq!(imbalance_ratio(&[3, 3, 6]).unwrap(), 1.5);
    assert!(imbalance_ratio(&[0, 0]).is_err());
}

#[test]
fn report_deltas_and_delays() {
    let n = parse_blif(BLIF, &ParseOptions::default()).unwrap();
    let a = load_assignment(&n, PART, None).unwrap();
    let r =
        MetricsReport::compare((&n, &a), (&n, &a), None, SllCountMode::PerDestinationDie).unwrap();
    let text = r.to_text();
    assert!(text.contains("n_sll"));
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["before"]["n_sll"], 2);
    let names: Vec<String> = wire_delays().into_iter().map(|w| w.wire).collect();
    assert!(names.iter().any(|n| n.contains("36")), "{names:?}");
}

#[test]
fn assignments_round_trip_and_transfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = common::random_sized(&mut rng, 3..8, 10..30, 4, 0..2);
    // `big` has one extra LUT that the derived netlist no longer contains.
    let mut big = n.clone();
    let first = big.inputs()[0];
    big.add_lut("ghost", vec![first], TruthTable::var(1, 0))
        .unwrap();
    let a = partition_hash(&big, 3);
    let text = save_assignment(&big, &a);
    assert_eq!(load_assignment(&big, &text, None).unwrap(), a);

    let (derived, _) = n.compact();
    assert!(load_assignment(&derived, &text, None).is_err());
    let sub = load_assignment_subset(&derived, &text, None).unwrap();
    let moved = a.transfer(&big, &derived).unwrap();
    for id in derived.node_ids() {
        assert_eq!(sub.get(id), moved.get(id));
        assert_eq!(moved.get(id), a.get(big.lookup(derived.name(id)).unwrap()));
    }
    assert!(DieAssignment::uniform(&derived, 2, 1)
        .transfer(&derived, &big)
        .is_err());
}
