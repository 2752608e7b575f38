//! Partitions a generated benchmark with min-cut and hash labeling and
//! compares cut size, inter-die connections and balance.
//!
//! ```text
//! cargo run --example partition [benchmark] [dies]
//! ```

use sllresyn::blif::{parse_blif, ParseOptions};
use sllresyn::metrics::{count_sll, count_sll_fo};
use sllresyn::partition::{cut_size, partition, PartitionConfig, PartitionMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "sqrt".into());
    let dies: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let text = sllresyn_benchgen::generate(&name, 6).ok_or("unknown benchmark")?;
    let n = parse_blif(&text, &ParseOptions::default())?;
    println!("{name}: {} LUTs on {dies} dies", n.lut_count());
    for mode in [PartitionMode::FmMincut, PartitionMode::HashLabel] {
        let cfg = PartitionConfig {
            num_dies: dies,
            mode,
            seed: 1,
            ..Default::default()
        };
        let a = partition(&n, &cfg)?;
        println!(
            "{mode:?}: cut {} n_sll {} n_sll_fo {} rho {:.3} weights {:?}",
            cut_size(&n, &a),
            count_sll(&n, &a)?,
            count_sll_fo(&n, &a)?,
            a.imbalance(&n)?,
            a.die_weights(&n)
        );
    }
    Ok(())
}
