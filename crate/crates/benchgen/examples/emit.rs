//! Writes one generated benchmark as BLIF to stdout.
//!
//! ```text
//! cargo run -p sllresyn-benchgen --example emit -- multiplier 6 > multiplier.blif
//! ```

use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("adder");
    let k: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    if !(2..=6).contains(&k) {
        eprintln!("LUT size must be between 2 and 6");
        return ExitCode::from(2);
    }
    match sllresyn_benchgen::generate(name, k) {
        Some(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        None => {
            let names: Vec<&str> = sllresyn_benchgen::catalog()
                .iter()
                .map(|b| b.name)
                .collect();
            eprintln!("unknown benchmark {name}; available: {}", names.join(" "));
            ExitCode::from(2)
        }
    }
}
