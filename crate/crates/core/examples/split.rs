//! Splits a partitioned netlist into one BLIF per die and stitches the
//! parts back together.
//!
//! ```text
//! cargo run --example split [benchmark] [dies]
//! ```

use sllresyn::blif::{parse_blif, write_blif, ParseOptions, WriteOptions};
use sllresyn::equiv::{check_equivalence, EquivOptions};
use sllresyn::flow::{split_per_die, stitch};
use sllresyn::partition::{partition, PartitionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "lfsr".into());
    let dies: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let text = sllresyn_benchgen::generate(&name, 6).ok_or("unknown benchmark")?;
    let n = parse_blif(&text, &ParseOptions::default())?;
    let a = partition(
        &n,
        &PartitionConfig {
            num_dies: dies,
            ..Default::default()
        },
    )?;
    let parts = split_per_die(&n, &a)?;
    for p in &parts {
        let pins = p
            .inputs()
            .iter()
            .filter(|&&i| p.name(i).starts_with("__sll_"))
            .count();
        println!(
            "{}: {} LUTs, {} latches, {} boundary inputs, {} lines of BLIF",
            p.model_name(),
            p.lut_count(),
            p.latch_count(),
            pins,
            write_blif(p, &WriteOptions::default()).lines().count()
        );
    }
    let back = stitch(&parts, n.model_name())?;
    let v = check_equivalence(&n, &back, &EquivOptions::default())?;
    println!("stitched netlist equivalent: {}", v.is_equivalent());
    Ok(())
}
