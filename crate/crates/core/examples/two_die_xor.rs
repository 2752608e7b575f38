//! The three-LUT two-die example: with the care predicate `b == c`, the
//! cross-die input of `F` is replaced by the local signal `Y`.
//!
//! ```text
//! cargo run --example two_die_xor
//! ```

use sllresyn::blif::{parse_blif, write_blif, ParseOptions, WriteOptions};
use sllresyn::partition::load_assignment;
use sllresyn::resynth::{resynthesize, CarePredicate, Outcome, ResynConfig};

const BLIF: &str = include_str!("../data/two_die_xor.blif");
const PART: &str = include_str!("../data/two_die_xor.part");
const CARE: &str = include_str!("../data/two_die_xor.care.blif");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut n = parse_blif(BLIF, &ParseOptions::default())?;
    let a = load_assignment(&n, PART, None)?;
    let care = CarePredicate::new(parse_blif(CARE, &ParseOptions::default())?)?;

    let report = resynthesize(&mut n, &a, &ResynConfig::default(), Some(&care))?;
    for r in &report.records {
        match &r.outcome {
            Outcome::Committed {
                removed_fanin,
                new_fanins,
                function,
                ..
            } => {
                println!(
                    "{}: drop {removed_fanin}, new fanins {new_fanins:?}, function {function}",
                    r.pivot
                )
            }
            other => println!("{}: {other:?}", r.pivot),
        }
    }
    println!(
        "n_sll {} -> {}, n_sll_fo {} -> {}",
        report.before.n_sll, report.after.n_sll, report.before.n_sll_fo, report.after.n_sll_fo
    );
    print!("{}", write_blif(&n, &WriteOptions { merge_cubes: true }));
    Ok(())
}
