//! Bounding-box wirelength of a random placement before and after
//! resynthesis, with the interposer link delays used for reporting.
//!
//! ```text
//! cargo run --example wirelength
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sllresyn::blif::{parse_blif, ParseOptions};
use sllresyn::metrics::{bbox_cost_md, count_sll, wire_delays, DieGeometry, PlacementData};
use sllresyn::partition::{partition, PartitionConfig};
use sllresyn::resynth::{resynthesize, ResynConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = sllresyn_benchgen::generate("cavlc", 4).unwrap();
    let mut n = parse_blif(
        &text,
        &ParseOptions {
            k_max: 4,
            ..Default::default()
        },
    )?;
    let a = partition(
        &n,
        &PartitionConfig {
            num_dies: 2,
            ..Default::default()
        },
    )?;

    let geometry = DieGeometry {
        width: 40,
        height: 40,
    };
    let mut placement = PlacementData::new(geometry, 20.0)?;
    placement.q_table = [(3, 1.0), (4, 1.0828), (5, 1.1536), (10, 1.4493)]
        .into_iter()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for id in n.node_ids() {
        placement.place(
            n.name(id),
            rng.gen_range(0..40),
            rng.gen_range(0..40),
            a.die(id),
        )?;
    }

    let before = bbox_cost_md(&n, &placement, &a)?;
    let sll_before = count_sll(&n, &a)?;
    resynthesize(&mut n, &a, &ResynConfig::default(), None)?;
    let after = bbox_cost_md(&n, &placement, &a)?;
    let sll_after = count_sll(&n, &a)?;
    println!("bbox cost {before:.1} -> {after:.1}, n_sll {sll_before} -> {sll_after}");
    for w in wire_delays() {
        println!("{:>4} {:>8.1} ps  {}", w.wire, w.delay_ps, w.scope);
    }
    Ok(())
}
