//! Generated benchmark circuits mapped to `k`-input LUTs and written as BLIF.
//!
//! ```
//! let blif = sllresyn_benchgen::generate("adder", 4).unwrap();
//! assert!(blif.starts_with(".model adder"));
//! ```

pub mod catalog;
pub mod circuit;
pub mod map;

pub use catalog::{catalog, find, Bench, Family};
pub use circuit::{Circuit, Gate, Sig};
pub use map::{map_luts, to_blif};

/// Names of the generated designs that follow the LUT-size study benchmarks.
pub const LUT_STUDY: &[&str] = &[
    "int2float",
    "ctrl",
    "router",
    "cavlc",
    "priority",
    "dec",
    "i2c",
    "arbiter",
    "mem_ctrl",
    "sin",
    "max",
    "square",
    "sqrt",
    "multiplier",
    "log2",
    "div",
    "voter",
];

/// BLIF text of benchmark `name` mapped to `k`-LUTs.
pub fn generate(name: &str, k: usize) -> Option<String> {
    find(name).map(|b| to_blif(&b.circuit(), k))
}
