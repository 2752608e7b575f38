//! Inter-die connection counts, imbalance and wirelength cost.

mod bbox;
mod report;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::Netlist;
use crate::partition::{DieAssignment, PartitionError};

pub use bbox::{
    bbox_cost_md, bbox_cost_sd, hpwl, load_placement, load_q_table, DieGeometry, PlacementData,
};
pub use report::{measure, wire_delays, Metrics, MetricsReport, WireDelay};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("block `{0}` has no placement")]
    Unplaced(String),
    #[error("block `{block}` is placed on die {placed} but assigned to die {assigned}")]
    DieMismatch {
        block: String,
        placed: u32,
        assigned: u32,
    },
    #[error("block `{block}` at ({x}, {y}) lies outside the {width}x{height} die")]
    OutOfBounds {
        block: String,
        x: i64,
        y: i64,
        width: i64,
        height: i64,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("interposer link length must be positive, got {0}")]
    InvalidLinkLength(f64),
}

/// How net-level SLL usage is counted.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SllCountMode {
    /// One SLL per distinct foreign sink die of each net.
    #[default]
    PerDestinationDie,
    /// One SLL per net with any foreign sink.
    RawNet,
}

/// Net-level SLL count: for each driver, the number of distinct sink dies
/// other than the driver's own die.
pub fn count_sll(netlist: &Netlist, assignment: &DieAssignment) -> Result<usize, MetricsError> {
    count_sll_with(netlist, assignment, SllCountMode::PerDestinationDie)
}

pub fn count_sll_with(
    netlist: &Netlist,
    assignment: &DieAssignment,
    mode: SllCountMode,
) -> Result<usize, MetricsError> {
    assignment.check_total(netlist)?;
    let mut total = 0;
    for id in netlist.node_ids() {
        let d = assignment.die(id);
        let foreign: BTreeSet<u32> = netlist
            .fanouts(id)
            .iter()
            .map(|&s| assignment.die(s))
            .filter(|&s| s != d)
            .collect();
        total += match mode {
            SllCountMode::PerDestinationDie => foreign.len(),
            SllCountMode::RawNet => usize::from(!foreign.is_empty()),
        };
    }
    Ok(total)
}

/// Edge-level SLL count: fanin edges whose endpoints sit on different dies.
pub fn count_sll_fo(netlist: &Netlist, assignment: &DieAssignment) -> Result<usize, MetricsError> {
    assignment.check_total(netlist)?;
    Ok(netlist
        .node_ids()
        .map(|id| {
            let d = assignment.die(id);
            netlist
                .fanins(id)
                .iter()
                .filter(|&&f| assignment.die(f) != d)
                .count()
        })
        .sum())
}
