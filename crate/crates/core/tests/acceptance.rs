//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sllresyn::blif::{parse_blif, write_blif, ParseOptions, WriteOptions};
use sllresyn::equiv::{check_equivalence, EquivMode, EquivOptions};
use sllresyn::flow::{run_flow, split_per_die, stitch, FlowConfig};
use sllresyn::metrics::{bbox_cost_md, bbox_cost_sd, count_sll_fo, DieGeometry, PlacementData};
use sllresyn::partition::{
    imbalance_ratio, partition, partition_hash, PartitionConfig, PartitionMode,
};
use sllresyn::resynth::{resynthesize, Outcome, ResynConfig};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

/// Tolerances pinned by the criteria.
const GOLDEN_MAX_RUNTIME: Duration = Duration::from_secs(1);
const MIN_SAFETY_BENCHMARKS: usize = 20;
const MIN_IMPROVED_CIRCUITS: usize = 8;
const STUDY_MAX_RUNTIME: Duration = Duration::from_secs(600);
const RANDOM_METRIC_INSTANCES: usize = 100;
const BBOX_REL_TOL: f64 = 1e-9;
const SPLIT_PAIRS: usize = 50;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_example() -> Check {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = FlowConfig::new(Path::new(DATA).join("two_die_xor.blif"), out.path());
    cfg.partition.mode = PartitionMode::ExternalFile;
    cfg.partition_file = Some(Path::new(DATA).join("two_die_xor.part"));
    cfg.care = Some(Path::new(DATA).join("two_die_xor.care.blif"));
    let t = Instant::now();
    let report = run_flow(&cfg).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();

    let commits: Vec<_> = report.resynth.commits().collect();
    ensure(commits.len() == 1, || {
        format!("{} commits, expected 1", commits.len())
    })?;
    let Outcome::Committed { new_fanins, .. } = &commits[0].outcome else {
        unreachable!()
    };
    ensure(commits[0].pivot == "F", || {
        format!("pivot {}", commits[0].pivot)
    })?;
    let mut fanins = new_fanins.clone();
    fanins.sort();
    ensure(fanins == ["Y", "d"], || format!("F' fanins {new_fanins:?}"))?;

    // Care rows are b == c; on those rows F' must equal the original F = a ^ d.
    let post = fs::read_to_string(out.path().join("post.blif")).map_err(|e| e.to_string())?;
    let mut matched = 0;
    for row in 0..16u32 {
        let bit = |i: u32| (row >> (3 - i)) & 1 == 1;
        let (a, b, c, d) = (bit(0), bit(1), bit(2), bit(3));
        if b != c {
            continue;
        }
        let ins: HashMap<String, bool> = [("a", a), ("b", b), ("c", c), ("d", d)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let v = common::eval_blif(&post, &ins);
        ensure(v["F"] == (a ^ d), || format!("F' wrong on row {row:04b}"))?;
        ensure(v["F"] == (v["Y"] ^ d), || {
            format!("F' is not Y^d on row {row:04b}")
        })?;
        matched += 1;
    }
    let m = &report.metrics;
    ensure(matched == 8, || format!("{matched} care rows"))?;
    ensure(m.before.n_sll == 2 && m.after.n_sll == 1, || {
        format!("N_sll {}->{}", m.before.n_sll, m.after.n_sll)
    })?;
    ensure(m.before.n_sll_fo == 2 && m.after.n_sll_fo == 1, || {
        format!("N_sll_fo {}->{}", m.before.n_sll_fo, m.after.n_sll_fo)
    })?;
    ensure(report.passed(), || "verification failed".into())?;
    ensure(elapsed < GOLDEN_MAX_RUNTIME, || {
        format!("runtime {elapsed:?}")
    })?;
    Ok(format!(
        "1 commit F'=Y^d, 8/8 care rows, N_sll 2->1, N_sll_fo 2->1, {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

struct SafetyStats {
    runs: usize,
    benchmarks: usize,
    commits: usize,
    failures: Vec<String>,
    monotone_failures: Vec<String>,
}

fn safety_suite() -> SafetyStats {
    let mut st = SafetyStats {
        runs: 0,
        benchmarks: 0,
        commits: 0,
        failures: Vec::new(),
        monotone_failures: Vec::new(),
    };
    for bench in sllresyn_benchgen::catalog() {
        let circuit = bench.circuit();
        for k in [4usize, 6] {
            st.benchmarks += 1;
            let text = sllresyn_benchgen::to_blif(&circuit, k);
            let original = match parse_blif(
                &text,
                &ParseOptions {
                    k_max: k,
                    ..Default::default()
                },
            ) {
                Ok(n) => n,
                Err(e) => {
                    st.failures.push(format!("{} k={k}: parse {e}", bench.name));
                    continue;
                }
            };
            for mode in [PartitionMode::FmMincut, PartitionMode::HashLabel] {
                for dies in [2usize, 3] {
                    st.runs += 1;
                    let tag = format!("{} k={k} {mode:?} K={dies}", bench.name);
                    if let Err(e) = safety_run(&original, mode, dies, &tag, &mut st) {
                        st.failures.push(format!("{tag}: {e}"));
                    }
                }
            }
        }
    }
    st
}

fn safety_run(
    original: &sllresyn::netlist::Netlist,
    mode: PartitionMode,
    dies: usize,
    tag: &str,
    st: &mut SafetyStats,
) -> Result<(), String> {
    let pcfg = PartitionConfig {
        num_dies: dies,
        seed: 1,
        mode,
        ..Default::default()
    };
    let assignment = partition(original, &pcfg).map_err(|e| e.to_string())?;
    let mut post = original.clone();
    let report = resynthesize(&mut post, &assignment, &ResynConfig::default(), None)
        .map_err(|e| e.to_string())?;
    let verdict =
        check_equivalence(original, &post, &EquivOptions::default()).map_err(|e| e.to_string())?;
    if let Some(cex) = verdict.counterexample {
        return Err(format!("counterexample on {:?}", cex.outputs));
    }

    // Audit trail: each commit strictly lowers N_sll_fo and never adds LUTs.
    let mut sum_fo = 0i64;
    let mut sum_luts = 0i64;
    for r in report.commits() {
        let Outcome::Committed {
            delta_sll_fo,
            delta_luts,
            ..
        } = &r.outcome
        else {
            unreachable!()
        };
        st.commits += 1;
        sum_fo += delta_sll_fo;
        sum_luts += delta_luts;
        if *delta_sll_fo >= 0 || *delta_luts > 0 {
            st.monotone_failures.push(format!(
                "{tag}: pivot {} delta_sll_fo {delta_sll_fo} delta_luts {delta_luts}",
                r.pivot
            ));
        }
    }
    // The trail must add up to an independent recount of the final netlist.
    let die = common::die_map(original, &assignment);
    let before = common::brute_sll_fo(&write_blif(original, &WriteOptions::default()), &die);
    let after = common::brute_sll_fo(&write_blif(&post, &WriteOptions::default()), &die);
    if after as i64 - before as i64 != sum_fo {
        st.monotone_failures.push(format!(
            "{tag}: trail sums {sum_fo} but recount gives {before}->{after}"
        ));
    }
    if post.lut_count() as i64 - original.lut_count() as i64 != sum_luts {
        st.monotone_failures.push(format!(
            "{tag}: trail LUT delta {sum_luts} disagrees with netlist"
        ));
    }
    Ok(())
}

fn directional() -> Check {
    let t = Instant::now();
    let mut improved = 0;
    let mut totals = [0i64; 2];
    let mut flat = Vec::new();
    for name in sllresyn_benchgen::LUT_STUDY {
        let mut both = true;
        for (slot, k) in [4usize, 6].into_iter().enumerate() {
            let text = sllresyn_benchgen::generate(name, k).ok_or("unknown benchmark")?;
            let mut n = parse_blif(
                &text,
                &ParseOptions {
                    k_max: k,
                    ..Default::default()
                },
            )
            .map_err(|e| e.to_string())?;
            let a = partition_hash(&n, 2);
            let r = resynthesize(&mut n, &a, &ResynConfig::default(), None)
                .map_err(|e| e.to_string())?;
            totals[slot] += -r.delta_sll_fo;
            both &= r.delta_sll_fo < 0;
        }
        if both {
            improved += 1;
        } else {
            flat.push(*name);
        }
    }
    let elapsed = t.elapsed();
    let detail = format!(
        "{improved}/{} circuits reduced under LUT4 and LUT6, aggregate LUT4 {} vs LUT6 {}, {:.1} s",
        sllresyn_benchgen::LUT_STUDY.len(),
        totals[0],
        totals[1],
        elapsed.as_secs_f64()
    );
    ensure(improved >= MIN_IMPROVED_CIRCUITS, || {
        format!("{detail}; no reduction on {flat:?}")
    })?;
    ensure(totals[0] >= totals[1], || detail.clone())?;
    ensure(elapsed <= STUDY_MAX_RUNTIME, || detail.clone())?;
    Ok(detail)
}

fn metrics_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..RANDOM_METRIC_INSTANCES {
        let n = common::random_sized(&mut rng, 2..12, 1..60, 6, 0..3);
        let a = {
            let dies = rng.gen_range(2..5);
            common::random_assignment(&mut rng, &n, dies)
        };
        let got = count_sll_fo(&n, &a).map_err(|e| e.to_string())?;
        let want = common::brute_sll_fo(
            &write_blif(&n, &WriteOptions::default()),
            &common::die_map(&n, &a),
        );
        ensure(got == want, || {
            format!("instance {i}: count_sll_fo {got} vs brute {want}")
        })?;
    }

    let mut worst = 0.0f64;
    for _ in 0..RANDOM_METRIC_INSTANCES {
        let n = common::random_sized(&mut rng, 2..10, 1..40, 4, 0..1);
        let g = DieGeometry {
            width: 40,
            height: 30,
        };
        let mut p = PlacementData::new(g, 12.0).map_err(|e| e.to_string())?;
        for id in n.node_ids() {
            p.place(
                n.name(id),
                rng.gen_range(0..g.width),
                rng.gen_range(0..g.height),
                0,
            )
            .map_err(|e| e.to_string())?;
        }
        p.q_table = [(3, 1.0), (4, 1.0828), (10, 1.3)].into_iter().collect();
        let a = sllresyn::partition::DieAssignment::uniform(&n, 1, 0);
        let sd = bbox_cost_sd(&n, &p, 0).map_err(|e| e.to_string())?;
        let md = bbox_cost_md(&n, &p, &a).map_err(|e| e.to_string())?;
        let rel = (md - sd).abs() / sd.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(if sd == md { 0.0 } else { rel });
    }
    ensure(worst <= BBOX_REL_TOL, || {
        format!("bbox md/sd relative gap {worst:e}")
    })?;

    let rho = imbalance_ratio(&[6, 4]).map_err(|e| e.to_string())?;
    ensure(rho == 1.2, || format!("rho(6,4) = {rho}"))?;
    Ok(format!(
        "{RANDOM_METRIC_INSTANCES} count_sll_fo instances match, bbox K=1 gap {worst:e}, rho(6,4) = {rho}"
    ))
}

fn split_roundtrip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exhaustive = 0;
    for i in 0..SPLIT_PAIRS {
        let n = common::random_sized(&mut rng, 1..14, 1..80, 6, 0..4);
        let a = {
            let dies = rng.gen_range(1..5);
            common::random_assignment(&mut rng, &n, dies)
        };
        let parts = split_per_die(&n, &a).map_err(|e| format!("pair {i}: {e}"))?;
        let back = stitch(&parts, n.model_name()).map_err(|e| format!("pair {i}: {e}"))?;
        let v = check_equivalence(&n, &back, &EquivOptions::default())
            .map_err(|e| format!("pair {i}: {e}"))?;
        ensure(v.is_equivalent(), || {
            format!("pair {i}: {:?}", v.counterexample)
        })?;
        exhaustive += usize::from(v.mode == EquivMode::Exhaustive);
    }
    Ok(format!(
        "{SPLIT_PAIRS} pairs equivalent ({exhaustive} exhaustive)"
    ))
}

fn determinism() -> Check {
    let input = tempfile::tempdir().map_err(|e| e.to_string())?;
    let blif = input.path().join("cavlc.blif");
    fs::write(&blif, sllresyn_benchgen::generate("cavlc", 4).unwrap())
        .map_err(|e| e.to_string())?;
    let mut compared = 0;
    for mode in [PartitionMode::FmMincut, PartitionMode::HashLabel] {
        let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
        for out in &runs {
            let mut cfg = FlowConfig::new(&blif, out.path());
            cfg.partition.mode = mode;
            cfg.partition.num_dies = 3;
            cfg.partition.seed = 42;
            run_flow(&cfg).map_err(|e| e.to_string())?;
        }
        let mut names: Vec<_> = fs::read_dir(runs[0].path())
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for name in names {
            let a = fs::read(runs[0].path().join(&name)).map_err(|e| e.to_string())?;
            let b = fs::read(runs[1].path().join(&name)).map_err(|e| e.to_string())?;
            ensure(a == b, || {
                format!("{mode:?}: {} differs", name.to_string_lossy())
            })?;
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} artifacts byte-identical across repeated runs"
    ))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, result: Check| match result {
        Ok(detail) => println!("criterion {id} {name}: PASS ({detail})"),
        Err(detail) => {
            failed += 1;
            println!("criterion {id} {name}: FAIL ({detail})");
        }
    };

    report(1, "golden example", golden_example());

    let st = safety_suite();
    let c2 = if st.benchmarks < MIN_SAFETY_BENCHMARKS {
        Err(format!("only {} benchmarks", st.benchmarks))
    } else if st.failures.is_empty() {
        Ok(format!(
            "{} runs over {} generated mapped benchmarks, 0 counterexamples",
            st.runs, st.benchmarks
        ))
    } else {
        Err(format!(
            "{} failing runs, first: {}",
            st.failures.len(),
            st.failures[0]
        ))
    };
    report(2, "functional safety", c2);
    let c3 = if st.monotone_failures.is_empty() {
        Ok(format!(
            "{} commits audited, each lowers N_sll_fo and adds no LUT",
            st.commits
        ))
    } else {
        Err(format!(
            "{} violations, first: {}",
            st.monotone_failures.len(),
            st.monotone_failures[0]
        ))
    };
    report(3, "monotonicity and area", c3);

    report(4, "directional effectiveness", directional());
    report(5, "metrics oracles", metrics_oracles());
    report(6, "split/stitch round trip", split_roundtrip());
    report(7, "determinism", determinism());

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
