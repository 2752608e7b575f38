//! Equivalence checking against an exhaustive cube-evaluation oracle.

mod common;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sllresyn::blif::{parse_blif, write_blif, ParseOptions, WriteOptions};
use sllresyn::equiv::{check_equivalence, Counterexample, EquivError, EquivMode, EquivOptions};
use sllresyn::netlist::{Netlist, NodeId};
use sllresyn::sim::simulate;

/// Copy of `n` with one truth-table bit of one LUT flipped.
fn mutate(n: &Netlist, rng: &mut impl Rng) -> Netlist {
    let luts: Vec<NodeId> = n.luts().collect();
    let target = luts[rng.gen_range(0..luts.len())];
    let mut m = n.clone();
    let mut tt = n.node(target).function().unwrap().clone();
    let bit = rng.gen_range(0..tt.num_bits());
    tt.set(bit, !tt.get(bit));
    m.replace_lut(target, n.fanins(target).to_vec(), tt)
        .unwrap();
    m
}

fn differs_somewhere(a: &Netlist, b: &Netlist) -> bool {
    let (ta, tb) = (
        write_blif(a, &WriteOptions::default()),
        write_blif(b, &WriteOptions::default()),
    );
    let sources: Vec<String> = a
        .comb_inputs()
        .iter()
        .map(|&s| a.name(s).to_string())
        .collect();
    let outs: Vec<String> = a.outputs().iter().map(|&o| a.name(o).to_string()).collect();
    let latch_d: Vec<(String, String)> = a
        .latches()
        .map(|l| (a.name(l).to_string(), a.name(a.fanins(l)[0]).to_string()))
        .collect();
    let latch_d_b: HashMap<String, String> = b
        .latches()
        .map(|l| (b.name(l).to_string(), b.name(b.fanins(l)[0]).to_string()))
        .collect();
    (0..1usize << sources.len()).any(|m| {
        let ins: HashMap<String, bool> = sources
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), (m >> i) & 1 == 1))
            .collect();
        let (va, vb) = (common::eval_blif(&ta, &ins), common::eval_blif(&tb, &ins));
        outs.iter().any(|o| va[o] != vb[o])
            || latch_d.iter().any(|(l, d)| va[d] != vb[&latch_d_b[l]])
    })
}

fn exhaustive() -> EquivOptions<'static> {
    EquivOptions {
        mode: EquivMode::Exhaustive,
        ..Default::default()
    }
}

fn check_cex(a: &Netlist, b: &Netlist, cex: &Counterexample) {
    let value: HashMap<&str, bool> = cex.inputs.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let eval = |n: &Netlist| {
        let v: Vec<bool> = n.comb_inputs().iter().map(|&s| value[n.name(s)]).collect();
        let out = simulate(n, &v).unwrap();
        n.comb_outputs()
            .into_iter()
            .map(|(name, _)| name)
            .zip(out)
            .collect::<HashMap<_, _>>()
    };
    let (va, vb) = (eval(a), eval(b));
    assert!(!cex.outputs.is_empty());
    for (name, x, y) in &cex.outputs {
        assert_eq!((va[name], vb[name]), (*x, *y), "{name}");
    }
}

#[test]
fn mutations_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut caught = 0;
    for _ in 0..60 {
        let n = common::random_sized(&mut rng, 2..9, 3..30, 4, 0..2);
        let m = mutate(&n, &mut rng);
        let v = check_equivalence(&n, &m, &exhaustive()).unwrap();
        assert_eq!(!v.is_equivalent(), differs_somewhere(&n, &m));
        let w = check_equivalence(&m, &n, &exhaustive()).unwrap();
        assert_eq!(
            v.is_equivalent(),
            w.is_equivalent(),
            "verdict not symmetric"
        );
        if let Some(cex) = &v.counterexample {
            caught += 1;
            check_cex(&n, &m, cex);
        }
    }
    assert!(caught > 20, "only {caught} observable mutations");
}

#[test]
fn counterexample_is_greedily_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let n = common::random_sized(&mut rng, 3..10, 5..30, 4, 0..1);
        let m = mutate(&n, &mut rng);
        let Some(cex) = check_equivalence(&n, &m, &exhaustive())
            .unwrap()
            .counterexample
        else {
            continue;
        };
        for (i, (_, v)) in cex.inputs.iter().enumerate() {
            if !*v {
                continue;
            }
            let mut cleared = cex.inputs.clone();
            cleared[i].1 = false;
            let vec: Vec<bool> = cleared.iter().map(|(_, v)| *v).collect();
            let same = simulate(&n, &vec).unwrap() == simulate(&m, &vec).unwrap();
            assert!(
                same,
                "clearing {} still fails; not minimal",
                cex.inputs[i].0
            );
        }
    }
}

#[test]
fn random_mode_is_seeded() {
    let text = sllresyn_benchgen::generate("multiplier", 6).unwrap();
    let n = parse_blif(&text, &ParseOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = mutate(&n, &mut rng);
    let opts = |seed| EquivOptions {
        mode: EquivMode::Random,
        seed,
        random_vectors: 20_000,
        ..Default::default()
    };
    let a = check_equivalence(&n, &m, &opts(5)).unwrap();
    let b = check_equivalence(&n, &m, &opts(5)).unwrap();
    assert_eq!(a, b);
    let same = check_equivalence(&n, &n.clone(), &opts(5)).unwrap();
    assert!(same.is_equivalent());
    assert_eq!(same.vectors_checked, 20_000);
    // 24 inputs exceed the exhaustive limit, so auto picks random.
    let auto = check_equivalence(
        &n,
        &n.clone(),
        &EquivOptions {
            random_vectors: 1000,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(auto.mode, EquivMode::Random);
}

#[test]
fn interface_mismatch_is_an_error() {
    let a = parse_blif(
        ".model a\n.inputs x y\n.outputs f\n.names x y f\n11 1\n.end\n",
        &ParseOptions::default(),
    )
    .unwrap();
    let b = parse_blif(
        ".model b\n.inputs x z\n.outputs f\n.names x z f\n11 1\n.end\n",
        &ParseOptions::default(),
    )
    .unwrap();
    let c = parse_blif(
        ".model c\n.inputs x y\n.outputs g\n.names x y g\n11 1\n.end\n",
        &ParseOptions::default(),
    )
    .unwrap();
    assert!(matches!(
        check_equivalence(&a, &b, &exhaustive()),
        Err(EquivError::InterfaceMismatch(_))
    ));
    assert!(matches!(
        check_equivalence(&a, &c, &exhaustive()),
        Err(EquivError::InterfaceMismatch(_))
    ));
    // Declaration order does not matter.
    let d = parse_blif(
        ".model d\n.inputs y x\n.outputs f\n.names y x f\n11 1\n.end\n",
        &ParseOptions::default(),
    )
    .unwrap();
    assert!(check_equivalence(&a, &d, &exhaustive())
        .unwrap()
        .is_equivalent());
}
