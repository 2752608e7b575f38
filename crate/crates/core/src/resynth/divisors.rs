use std::collections::HashSet;

use serde::Serialize;

use super::window::{window_levels, TfoOracle, Window};
use super::ResynConfig;
use crate::netlist::{mffc, Levels, Netlist, NodeId};
use crate::partition::DieAssignment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Divisor {
    pub node: NodeId,
    pub die: u32,
    /// Level inside the window (window PIs are level 0).
    pub level: usize,
}

#[derive(Clone, Debug, Default)]
pub struct DivisorSet {
    pub candidates: Vec<Divisor>,
    /// Candidates on the pivot's die, in candidate order.
    pub in_die: Vec<NodeId>,
}

/// Collects divisor candidates for the window's pivot.
///
/// Candidates come in two groups: the pivot's fanin-side window PIs and
/// fanin-cone nodes first, then the remaining window PIs and side nodes.
/// The pivot, its MFFC and anything in its transitive fanout are excluded.
pub fn collect_divisors(
    netlist: &Netlist,
    levels: &Levels,
    window: &Window,
    assignment: &DieAssignment,
    config: &ResynConfig,
) -> DivisorSet {
    let pivot = window.pivot;
    let excluded: HashSet<NodeId> = mffc(netlist, pivot)
        .map(|m| m.into_iter().collect())
        .unwrap_or_default();
    let mut oracle = TfoOracle::new(netlist, levels, pivot);
    let local = window_levels(netlist, window);
    let bound = config.divisor_level_bound();

    let first = window
        .pis
        .iter()
        .filter(|p| window.tfi_pis.contains(p))
        .chain(window.nodes.iter().filter(|n| window.tfi_nodes.contains(n)));
    let second = window
        .pis
        .iter()
        .filter(|p| !window.tfi_pis.contains(p))
        .chain(
            window
                .nodes
                .iter()
                .filter(|n| window.side_nodes.contains(n)),
        );

    let mut candidates = Vec::new();
    for &id in first.chain(second) {
        if candidates.len() >= config.divisor_cap {
            break;
        }
        if id == pivot || excluded.contains(&id) || window.tfo_nodes.contains(&id) {
            continue;
        }
        if local[&id] > bound || oracle.contains(id) {
            continue;
        }
        candidates.push(Divisor {
            node: id,
            die: assignment.die(id),
            level: local[&id],
        });
    }
    let pivot_die = assignment.die(pivot);
    let in_die = candidates
        .iter()
        .filter(|d| d.die == pivot_die)
        .map(|d| d.node)
        .collect();
    DivisorSet { candidates, in_die }
}
