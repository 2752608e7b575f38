//! Compares SLL reduction under LUT4 and LUT6 mappings of the generated
//! benchmarks with hash-label partitioning into two dies.
//!
//! ```text
//! cargo run --release --example lut_study [names...]
//! ```

use std::time::Instant;

use sllresyn::blif::{parse_blif, ParseOptions};
use sllresyn::partition::partition_hash;
use sllresyn::resynth::{resynthesize, ResynConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if args.is_empty() {
        sllresyn_benchgen::LUT_STUDY.to_vec()
    } else {
        args.iter().map(String::as_str).collect()
    };
    println!(
        "{:<12} {:>4} {:>6} {:>8} {:>8} {:>8} {:>8}",
        "circuit", "k", "luts", "sll_fo", "after", "delta", "secs"
    );
    let mut totals = [0i64; 2];
    for name in names {
        for (slot, k) in [4usize, 6].into_iter().enumerate() {
            let text = sllresyn_benchgen::generate(name, k)
                .ok_or_else(|| format!("unknown benchmark {name}"))?;
            let mut n = parse_blif(
                &text,
                &ParseOptions {
                    k_max: k,
                    ..Default::default()
                },
            )?;
            let assignment = partition_hash(&n, 2);
            let luts = n.lut_count();
            let t = Instant::now();
            let report = resynthesize(&mut n, &assignment, &ResynConfig::default(), None)?;
            let reduction = -report.delta_sll_fo;
            totals[slot] += reduction;
            println!(
                "{:<12} {:>4} {:>6} {:>8} {:>8} {:>8} {:>8.2}",
                name,
                k,
                luts,
                report.before.n_sll_fo,
                report.after.n_sll_fo,
                reduction,
                t.elapsed().as_secs_f64()
            );
        }
    }
    println!("total reduction: LUT4 {} LUT6 {}", totals[0], totals[1]);
    Ok(())
}
