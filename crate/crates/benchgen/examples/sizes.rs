//! Prints LUT counts of every generated benchmark.

fn main() {
    for b in sllresyn_benchgen::catalog() {
        let c = b.circuit();
        let n4 = sllresyn_benchgen::map_luts(&c, 4).luts.len();
        let n6 = sllresyn_benchgen::map_luts(&c, 6).luts.len();
        println!("{:<12} {:>6} {:>6}", b.name, n4, n6);
    }
}
