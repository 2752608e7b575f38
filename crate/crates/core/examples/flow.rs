//! Runs the whole flow on a generated benchmark and lists the artifacts.
//!
//! ```text
//! cargo run --example flow [benchmark] [out-dir]
//! ```

use sllresyn::flow::{run_flow, FlowConfig};
use sllresyn::partition::PartitionMode;
use sllresyn::resynth::Passes;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "i2c".into());
    let out = args
        .next()
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("sllresyn-{name}")));
    std::fs::create_dir_all(&out)?;
    let input = out.join(format!("{name}.blif"));
    std::fs::write(
        &input,
        sllresyn_benchgen::generate(&name, 4).ok_or("unknown benchmark")?,
    )?;

    let mut cfg = FlowConfig::new(&input, &out);
    cfg.partition.mode = PartitionMode::HashLabel;
    cfg.resynth.passes = Passes::UntilConverged;
    let report = run_flow(&cfg)?;
    print!("{}", report.metrics.to_text());
    println!(
        "{} commits in {} passes, verification {}",
        report.resynth.commits,
        report.resynth.passes_run,
        if report.passed() { "passed" } else { "FAILED" }
    );
    for a in &report.artifacts {
        println!("  {}", out.join(a).display());
    }
    Ok(())
}
