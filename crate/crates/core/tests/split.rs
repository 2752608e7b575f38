//! Per-die split and reassembly.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sllresyn::blif::{parse_blif, write_blif, ParseOptions, WriteOptions};
use sllresyn::equiv::{check_equivalence, EquivOptions};
use sllresyn::flow::{export_name, import_name, split_per_die, stitch};
use sllresyn::metrics::count_sll;
use sllresyn::partition::{load_assignment, DieAssignment};

const BLIF: &str = include_str!("../data/two_die_xor.blif");
const PART: &str = include_str!("../data/two_die_xor.part");

#[test]
fn boundary_pins_follow_naming() {
    let n = parse_blif(BLIF, &ParseOptions::default()).unwrap();
    let a = load_assignment(&n, PART, None).unwrap();
    let parts = split_per_die(&n, &a).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[0].model_name(), "two_die_xor_die0");
    let names = |i: usize, ids: &[sllresyn::netlist::NodeId]| -> Vec<String> {
        ids.iter().map(|&x| parts[i].name(x).to_string()).collect()
    };
    assert_eq!(export_name("X"), "__sll_X_out");
    assert_eq!(import_name("X"), "__sll_X_in");
    assert_eq!(names(0, parts[0].outputs()), ["__sll_a_out", "__sll_X_out"]);
    // `a` is read on both dies; it enters die 1 through a pin as well.
    assert!(names(1, parts[1].inputs()).contains(&"__sll_X_in".to_string()));
    assert!(names(1, parts[1].inputs()).contains(&"__sll_a_in".to_string()));
    assert_eq!(names(1, parts[1].outputs()), ["Y", "F"]);

    // Boundary inputs equal the per-destination SLL count.
    let pins: usize = parts
        .iter()
        .map(|p| {
            p.inputs()
                .iter()
                .filter(|&&i| p.name(i).starts_with("__sll_"))
                .count()
        })
        .sum();
    assert_eq!(pins, count_sll(&n, &a).unwrap());

    // Parts re-parse with the reserved prefix allowed.
    let opts = ParseOptions {
        allow_reserved: true,
        ..Default::default()
    };
    for p in &parts {
        parse_blif(&write_blif(p, &WriteOptions::default()), &opts).unwrap();
    }
    assert!(parse_blif(
        &write_blif(&parts[1], &WriteOptions::default()),
        &ParseOptions::default()
    )
    .is_err());
}

#[test]
fn single_die_split_is_identity() {
    let n = parse_blif(BLIF, &ParseOptions::default()).unwrap();
    let a = DieAssignment::uniform(&n, 1, 0);
    let parts = split_per_die(&n, &a).unwrap();
    assert_eq!(parts.len(), 1);
    let w = WriteOptions::default();
    assert_eq!(write_blif(&parts[0], &w), write_blif(&n, &w));
}

#[test]
fn sequential_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for name in ["lfsr", "seqctl"] {
        let n = parse_blif(
            &sllresyn_benchgen::generate(name, 4).unwrap(),
            &ParseOptions::default(),
        )
        .unwrap();
        for dies in 2..=4 {
            let a = common::random_assignment(&mut rng, &n, dies);
            let parts = split_per_die(&n, &a).unwrap();
            // Each latch lives on exactly one die.
            let latches: usize = parts.iter().map(|p| p.latch_count()).sum();
            assert_eq!(latches, n.latch_count());
            let back = stitch(&parts, n.model_name()).unwrap();
            let opts = EquivOptions {
                random_vectors: 4096,
                seed: rng.gen(),
                ..Default::default()
            };
            assert!(
                check_equivalence(&n, &back, &opts).unwrap().is_equivalent(),
                "{name} K={dies}"
            );
            assert_eq!(back.lut_count(), n.lut_count());
        }
    }
}

#[test]
fn stitch_rejects_dangling_import() {
    let n = parse_blif(BLIF, &ParseOptions::default()).unwrap();
    let a = load_assignment(&n, PART, None).unwrap();
    let parts = split_per_die(&n, &a).unwrap();
    // Without die 0 nothing drives X.
    assert!(stitch(&parts[1..], "broken").is_err());
}

#[test]
fn reserved_names_are_rejected() {
    let text = ".model r\n.inputs __sll_q_in\n.outputs f\n.names __sll_q_in f\n1 1\n.end\n";
    let n = parse_blif(
        text,
        &ParseOptions {
            allow_reserved: true,
            ..Default::default()
        },
    )
    .unwrap();
    let a = DieAssignment::uniform(&n, 2, 0);
    assert!(split_per_die(&n, &a).is_err());
}
