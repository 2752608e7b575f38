//! Parses a BLIF netlist and prints its truth table over all inputs.
//!
//! ```text
//! cargo run --example simulate [file.blif]
//! ```

use sllresyn::blif::{parse_blif, ParseOptions};
use sllresyn::sim::simulate;

const DEFAULT: &str = include_str!("../data/two_die_xor.blif");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let n = parse_blif(&text, &ParseOptions::default())?;
    let levels = n.levels()?;
    println!(
        "{}: {} inputs, {} outputs, {} LUTs, {} latches, depth {}",
        n.model_name(),
        n.inputs().len(),
        n.outputs().len(),
        n.lut_count(),
        n.latch_count(),
        levels.max_level()
    );
    let sources = n.comb_inputs();
    if sources.len() > 8 {
        println!("too many inputs to tabulate");
        return Ok(());
    }
    let sinks = n.comb_outputs();
    let header: Vec<&str> = sources
        .iter()
        .map(|&s| n.name(s))
        .chain(sinks.iter().map(|s| s.0.as_str()))
        .collect();
    println!("{}", header.join(" "));
    for m in 0..1usize << sources.len() {
        // First input is the most significant column.
        let v: Vec<bool> = (0..sources.len())
            .map(|i| (m >> (sources.len() - 1 - i)) & 1 == 1)
            .collect();
        let out = simulate(&n, &v)?;
        let row: Vec<&str> = v
            .iter()
            .chain(&out)
            .map(|&b| if b { "1" } else { "0" })
            .collect();
        println!("{}", row.join(" "));
    }
    Ok(())
}
