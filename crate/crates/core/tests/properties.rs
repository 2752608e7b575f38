//! Randomized invariants checked against brute-force oracles.

mod common;

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sllresyn::blif::{parse_blif, write_blif, ParseOptions, WriteOptions};
use sllresyn::equiv::{check_equivalence, EquivMode, EquivOptions};
use sllresyn::metrics::{count_sll, count_sll_fo, hpwl};
use sllresyn::netlist::{mffc, Netlist, NodeId};
use sllresyn::partition::{partition, PartitionConfig, PartitionMode};
use sllresyn::resynth::{
    build_window, exist_check, extract_care_set, interpolate, resynthesize, Outcome, Passes,
    ResynConfig, ResynthError, WindowSim,
};
use sllresyn::sim::Simulator;

fn instance(
    seed: u64,
    pis: std::ops::Range<usize>,
    luts: std::ops::Range<usize>,
    latches: std::ops::Range<usize>,
) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_sized(&mut rng, pis, luts, 4, latches)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn exhaustive() -> EquivOptions<'static> {
    EquivOptions {
        mode: EquivMode::Exhaustive,
        exhaustive_limit: 24,
        ..Default::default()
    }
}

/// LUTs every one of whose paths to an output or latch passes through `root`.
fn mffc_oracle(n: &Netlist, root: NodeId) -> BTreeSet<NodeId> {
    let escapes = |v: NodeId| -> bool {
        let mut stack = vec![v];
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if x == root || !seen.insert(x) {
                continue;
            }
            if n.is_output(x) || !n.node(x).is_lut() {
                return true;
            }
            stack.extend(n.fanouts(x).iter().copied());
        }
        false
    };
    let tfi = sllresyn::netlist::tfi(n, root, None).unwrap();
    let mut cone: BTreeSet<NodeId> = tfi
        .into_iter()
        .filter(|&v| n.node(v).is_lut() && !escapes(v))
        .collect();
    cone.insert(root);
    cone
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn blif_round_trip(seed in any::<u64>(), merge in any::<bool>()) {
        let n = instance(seed, 1..10, 1..50, 0..3);
        let opts = WriteOptions { merge_cubes: merge };
        let text = write_blif(&n, &opts);
        let back = parse_blif(&text, &ParseOptions { k_max: 4, ..Default::default() }).unwrap();
        prop_assert_eq!(write_blif(&back, &opts), text);
        prop_assert!(check_equivalence(&n, &back, &exhaustive()).unwrap().is_equivalent());
    }

    #[test]
    fn simulator_matches_cube_evaluation(seed in any::<u64>(), vector in any::<u64>()) {
        let n = instance(seed, 1..12, 1..40, 0..1);
        let text = write_blif(&n, &WriteOptions { merge_cubes: true });
        let sim = Simulator::new(&n).unwrap();
        let inputs: HashMap<String, bool> = sim
            .sources()
            .iter()
            .enumerate()
            .map(|(i, &s)| (n.name(s).to_string(), (vector >> i) & 1 == 1))
            .collect();
        let words: Vec<Vec<u64>> = sim.sources().iter().map(|&s| vec![inputs[n.name(s)] as u64]).collect();
        let got = sim.run_sinks(&words, 1).unwrap();
        let want = common::eval_blif(&text, &inputs);
        for ((name, _), v) in sim.sinks().iter().zip(&got) {
            prop_assert_eq!(v[0] & 1 == 1, want[name.as_str()], "{}", name);
        }
    }

    #[test]
    fn mffc_matches_path_oracle(seed in any::<u64>()) {
        let n = instance(seed, 2..8, 1..40, 0..2);
        for root in n.luts().collect::<Vec<_>>() {
            prop_assert_eq!(mffc(&n, root).unwrap(), mffc_oracle(&n, root));
        }
    }

    #[test]
    fn sll_counts_match_scan(seed in any::<u64>(), dies in 1usize..5) {
        let n = instance(seed, 1..10, 1..60, 0..3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let a = common::random_assignment(&mut rng, &n, dies);
        let text = write_blif(&n, &WriteOptions::default());
        let die = common::die_map(&n, &a);
        let sll = count_sll(&n, &a).unwrap();
        let fo = count_sll_fo(&n, &a).unwrap();
        prop_assert_eq!(sll, common::brute_sll(&text, &die));
        prop_assert_eq!(fo, common::brute_sll_fo(&text, &die));
        prop_assert!(sll <= fo);
    }

    #[test]
    fn partition_respects_bound(seed in any::<u64>(), dies in 2usize..5, fm in any::<bool>()) {
        let n = instance(seed, 2..10, 40..120, 0..4);
        let cfg = PartitionConfig {
            num_dies: dies,
            seed,
            mode: if fm { PartitionMode::FmMincut } else { PartitionMode::HashLabel },
            ..Default::default()
        };
        let a = partition(&n, &cfg).unwrap();
        a.check_total(&n).unwrap();
        if fm {
            let rho = a.imbalance(&n).unwrap();
            prop_assert!(rho <= cfg.imbalance_upper_bound + 1e-12, "rho {}", rho);
        }
        prop_assert_eq!(&partition(&n, &cfg).unwrap(), &a);
    }

    #[test]
    fn hpwl_invariants(pts in prop::collection::vec((-50i64..50, -50i64..50), 1..12), dx in -20i64..20, dy in -20i64..20) {
        let h = hpwl(&pts);
        let moved: Vec<_> = pts.iter().map(|&(x, y)| (x + dx, y + dy)).collect();
        prop_assert_eq!(hpwl(&moved), h);
        let (xs, ys): (Vec<i64>, Vec<i64>) = pts.iter().copied().unzip();
        let span = |v: &[i64]| v.iter().max().unwrap() - v.iter().min().unwrap();
        prop_assert_eq!(h, span(&xs) + span(&ys));
        let mut with_inner = pts.clone();
        with_inner.push(pts[0]);
        prop_assert_eq!(hpwl(&with_inner), h);
        prop_assert_eq!(hpwl(&pts[..1]), 0);
    }

    #[test]
    fn exist_check_and_interpolant_match_brute_force(seed in any::<u64>(), pick in any::<u64>()) {
        let n = instance(seed, 2..10, 2..25, 0..1);
        let levels = n.levels().unwrap();
        let luts: Vec<NodeId> = n.luts().collect();
        let pivot = luts[(pick as usize) % luts.len()];
        let cfg = ResynConfig { window_pi_cap: 10, ..Default::default() };
        let Some(w) = build_window(&n, &levels, pivot, &cfg).unwrap() else { return Ok(()) };
        let sim = WindowSim::new(&n, &w);
        let care = extract_care_set(&n, &w, &sim, None).unwrap();
        let rows = 1usize << w.pis.len();
        let bit = |id: NodeId, m: usize| (sim.value(id).unwrap()[m / 64] >> (m % 64)) & 1 == 1;
        let mut pool: Vec<NodeId> = w.pis.iter().chain(&w.nodes).copied().filter(|&x| x != pivot).collect();
        pool.truncate(6);
        for mask in 0u32..(1 << pool.len()) {
            let support: Vec<NodeId> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
            let key = |m: usize| support.iter().enumerate().fold(0usize, |k, (i, &s)| k | (bit(s, m) as usize) << i);
            let mut seen: HashMap<usize, bool> = HashMap::new();
            let mut feasible = true;
            for m in (0..rows).filter(|&m| care.get(m)) {
                let v = bit(pivot, m);
                if *seen.entry(key(m)).or_insert(v) != v {
                    feasible = false;
                }
            }
            prop_assert_eq!(exist_check(&n, &sim, pivot, &care, &support).unwrap(), feasible);
            match interpolate(&n, &sim, pivot, &care, &support) {
                Ok(tt) => {
                    prop_assert!(feasible);
                    for m in (0..rows).filter(|&m| care.get(m)) {
                        prop_assert_eq!(tt.get(key(m)), bit(pivot, m));
                    }
                    // Unconstrained patterns are filled with 0.
                    for p in 0..(1usize << support.len()) {
                        if !seen.contains_key(&p) {
                            prop_assert!(!tt.get(p));
                        }
                    }
                }
                Err(ResynthError::NoInterpolant) => prop_assert!(!feasible),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn resynthesis_preserves_function(seed in any::<u64>(), dies in 2usize..4, augment in 1usize..3) {
        let original = instance(seed, 2..12, 10..80, 0..3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let a = common::random_assignment(&mut rng, &original, dies);
        let mut post = original.clone();
        let cfg = ResynConfig { max_augment: augment, passes: Passes::UntilConverged, ..Default::default() };
        let r = resynthesize(&mut post, &a, &cfg, None).unwrap();
        prop_assert!(check_equivalence(&original, &post, &exhaustive()).unwrap().is_equivalent());
        for rec in r.commits() {
            let Outcome::Committed { delta_sll_fo, delta_luts, .. } = &rec.outcome else { unreachable!() };
            prop_assert!(*delta_sll_fo < 0);
            prop_assert!(*delta_luts <= 0);
        }
        prop_assert_eq!(r.after.n_sll_fo as i64 - r.before.n_sll_fo as i64, r.delta_sll_fo);
        prop_assert_eq!(r.after.n_sll_fo, count_sll_fo(&post, &a).unwrap());

        // A converged netlist has nothing left to commit.
        let mut again = post.clone();
        let second = resynthesize(&mut again, &a, &cfg, None).unwrap();
        prop_assert_eq!(second.commits, 0);
        prop_assert_eq!(write_blif(&again, &WriteOptions::default()), write_blif(&post, &WriteOptions::default()));
    }
}
