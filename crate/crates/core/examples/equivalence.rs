//! Checks a netlist against a copy with one flipped truth-table bit and
//! prints the minimized counterexample.
//!
//! ```text
//! cargo run --example equivalence [benchmark]
//! ```

use sllresyn::blif::{parse_blif, ParseOptions};
use sllresyn::equiv::{check_equivalence, EquivOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "alu4".into());
    let text = sllresyn_benchgen::generate(&name, 4).ok_or("unknown benchmark")?;
    let n = parse_blif(
        &text,
        &ParseOptions {
            k_max: 4,
            ..Default::default()
        },
    )?;

    let same = check_equivalence(&n, &n.clone(), &EquivOptions::default())?;
    println!(
        "self check: {:?}, {} vectors, equivalent {}",
        same.mode,
        same.vectors_checked,
        same.is_equivalent()
    );

    let mut mutant = n.clone();
    // Flip the last on-set bit of the LUT driving the first output.
    let target = n.outputs()[0];
    let mut tt = n
        .node(target)
        .function()
        .ok_or("output is not a LUT")?
        .clone();
    let bit = tt.on_set().last().unwrap_or(0);
    tt.set(bit, !tt.get(bit));
    mutant.replace_lut(target, n.fanins(target).to_vec(), tt)?;
    let v = check_equivalence(&n, &mutant, &EquivOptions::default())?;
    match v.counterexample {
        Some(cex) => {
            let ones: Vec<&str> = cex
                .inputs
                .iter()
                .filter(|(_, b)| *b)
                .map(|(s, _)| s.as_str())
                .collect();
            println!("mutant differs when only {ones:?} are 1");
            for (out, a, b) in cex.outputs {
                println!("  {out}: {a} vs {b}");
            }
        }
        None => println!("mutation is not observable"),
    }
    Ok(())
}
