//! Existence check, interpolation and the per-pivot search.

use serde::Serialize;

use super::care::CareSet;
use super::divisors::DivisorSet;
use super::window::{Window, WindowSim};
use super::{ResynConfig, ResynthError};
use crate::netlist::{Levels, Netlist, NodeId};
use crate::partition::DieAssignment;
use crate::truth_table::{TruthTable, MAX_TT_INPUTS};

/// A certified replacement for a pivot's function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResubCandidate {
    pub pivot: NodeId,
    pub removed_fanin: NodeId,
    pub support: Vec<NodeId>,
    pub function: TruthTable,
}

/// What a committed resubstitution changed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationReport {
    pub pivot: String,
    pub old_fanins: Vec<String>,
    pub new_fanins: Vec<String>,
    pub removed_nodes: Vec<String>,
    pub delta_luts: i64,
}

fn support_values<'s>(
    netlist: &Netlist,
    sim: &'s WindowSim,
    support: &[NodeId],
) -> Result<Vec<&'s [u64]>, ResynthError> {
    support
        .iter()
        .map(|&s| {
            sim.value(s).ok_or_else(|| {
                ResynthError::SupportNotInWindow(
                    netlist
                        .try_node(s)
                        .map_or_else(|| s.to_string(), |n| n.name.clone()),
                )
            })
        })
        .collect()
}

/// Splits care minterms by support pattern and keeps only classes holding
/// both an on-set and an off-set minterm.
struct Conflicts {
    classes: Vec<(Vec<u64>, Vec<u64>)>,
}

impl Conflicts {
    fn new(on: Vec<u64>, off: Vec<u64>) -> Self {
        let mut c = Conflicts {
            classes: Vec::new(),
        };
        c.push(on, off);
        c
    }

    fn push(&mut self, on: Vec<u64>, off: Vec<u64>) {
        if on.iter().any(|&w| w != 0) && off.iter().any(|&w| w != 0) {
            self.classes.push((on, off));
        }
    }

    fn split(&self, var: &[u64]) -> Conflicts {
        let mut next = Conflicts {
            classes: Vec::new(),
        };
        for (on, off) in &self.classes {
            let and = |a: &[u64], pos: bool| -> Vec<u64> {
                a.iter()
                    .zip(var)
                    .map(|(x, v)| if pos { x & v } else { x & !v })
                    .collect()
            };
            next.push(and(on, true), and(off, true));
            next.push(and(on, false), and(off, false));
        }
        next
    }

    fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

fn on_off(
    netlist: &Netlist,
    sim: &WindowSim,
    pivot: NodeId,
    care: &CareSet,
) -> Result<(Vec<u64>, Vec<u64>), ResynthError> {
    let f = support_values(netlist, sim, &[pivot])?[0];
    let on = care.bits.iter().zip(f).map(|(c, v)| c & v).collect();
    let off = care.bits.iter().zip(f).map(|(c, v)| c & !v).collect();
    Ok((on, off))
}

/// True iff no two care minterms agree on every support signal while
/// disagreeing on the pivot, i.e. the pivot is a function of `support` on
/// the care set.
pub fn exist_check(
    netlist: &Netlist,
    sim: &WindowSim,
    pivot: NodeId,
    care: &CareSet,
    support: &[NodeId],
) -> Result<bool, ResynthError> {
    let vals = support_values(netlist, sim, support)?;
    let (on, off) = on_off(netlist, sim, pivot, care)?;
    let mut c = Conflicts::new(on, off);
    for v in vals {
        if c.is_empty() {
            break;
        }
        c = c.split(v);
    }
    Ok(c.is_empty())
}

/// Table over `support` (support[0] is the least significant input) that
/// matches the pivot on every care minterm; unreached patterns are 0.
pub fn interpolate(
    netlist: &Netlist,
    sim: &WindowSim,
    pivot: NodeId,
    care: &CareSet,
    support: &[NodeId],
) -> Result<TruthTable, ResynthError> {
    if support.len() > MAX_TT_INPUTS {
        return Err(ResynthError::NoInterpolant);
    }
    let vals = support_values(netlist, sim, support)?;
    let (on, off) = on_off(netlist, sim, pivot, care)?;
    let mut tt = TruthTable::zero(support.len());
    let mut conflict = false;
    // Walk the pattern tree depth first, pruning patterns with no care minterm.
    let mut stack = vec![(0usize, 0usize, on, off)];
    while let Some((depth, pattern, on, off)) = stack.pop() {
        let has_on = on.iter().any(|&w| w != 0);
        let has_off = off.iter().any(|&w| w != 0);
        if !has_on && !has_off {
            continue;
        }
        if depth == vals.len() {
            if has_on && has_off {
                conflict = true;
            }
            tt.set(pattern, has_on);
            continue;
        }
        let v = vals[depth];
        let pos = |a: &[u64]| a.iter().zip(v).map(|(x, y)| x & y).collect::<Vec<_>>();
        let neg = |a: &[u64]| a.iter().zip(v).map(|(x, y)| x & !y).collect::<Vec<_>>();
        stack.push((depth + 1, pattern | (1 << depth), pos(&on), pos(&off)));
        stack.push((depth + 1, pattern, neg(&on), neg(&off)));
    }
    if conflict {
        return Err(ResynthError::NoInterpolant);
    }
    Ok(tt)
}

/// The cross-die fanin chosen for removal: deepest driver, earliest fanin
/// position on ties.
pub fn select_cross_die_fanin(
    netlist: &Netlist,
    levels: &Levels,
    assignment: &DieAssignment,
    pivot: NodeId,
) -> Option<NodeId> {
    let die = assignment.die(pivot);
    netlist
        .fanins(pivot)
        .iter()
        .enumerate()
        .filter(|(_, &f)| assignment.die(f) != die)
        .max_by_key(|(i, &f)| (levels.level(f), std::cmp::Reverse(*i)))
        .map(|(_, &f)| f)
}

/// Searches for a same-die replacement of the pivot that drops one cross-die
/// fanin: first the remaining fanins alone, then the remaining fanins plus
/// up to `config.max_augment` in-die divisors.
#[allow(clippy::too_many_arguments)]
pub fn find_equiv_func(
    netlist: &Netlist,
    levels: &Levels,
    sim: &WindowSim,
    window: &Window,
    assignment: &DieAssignment,
    divisors: &DivisorSet,
    care: &CareSet,
    config: &ResynConfig,
) -> Result<Option<ResubCandidate>, ResynthError> {
    let pivot = window.pivot;
    let Some(u) = select_cross_die_fanin(netlist, levels, assignment, pivot) else {
        return Ok(None);
    };
    let base: Vec<NodeId> = netlist
        .fanins(pivot)
        .iter()
        .copied()
        .filter(|&f| f != u)
        .collect();
    let candidate = |support: Vec<NodeId>| -> Result<ResubCandidate, ResynthError> {
        let function = interpolate(netlist, sim, pivot, care, &support)?;
        Ok(ResubCandidate {
            pivot,
            removed_fanin: u,
            support,
            function,
        })
    };

    let base_vals = support_values(netlist, sim, &base)?;
    let (on, off) = on_off(netlist, sim, pivot, care)?;
    let mut conflicts = Conflicts::new(on, off);
    for v in base_vals {
        conflicts = conflicts.split(v);
    }
    if conflicts.is_empty() {
        return Ok(Some(candidate(base)?));
    }

    let pool: Vec<NodeId> = divisors
        .in_die
        .iter()
        .copied()
        .filter(|d| *d != u && !base.contains(d))
        .collect();
    let room = netlist.k_max().saturating_sub(base.len());
    let max_k = config.max_augment.min(room).min(pool.len());
    for k in 1..=max_k {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mut c = conflicts.split(sim.value(pool[idx[0]]).unwrap());
            for &i in &idx[1..] {
                if c.is_empty() {
                    break;
                }
                c = c.split(sim.value(pool[i]).unwrap());
            }
            if c.is_empty() {
                let mut support = base.clone();
                support.extend(idx.iter().map(|&i| pool[i]));
                return Ok(Some(candidate(support)?));
            }
            if !next_combination(&mut idx, pool.len()) {
                break;
            }
        }
    }
    Ok(None)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// True when some support node is reachable from the pivot, which would
/// close a combinational loop.
fn creates_cycle(
    netlist: &Netlist,
    levels: &Levels,
    pivot: NodeId,
    support: &[NodeId],
) -> Option<NodeId> {
    let limit = support.iter().map(|&s| levels.level(s)).max()?;
    let targets: std::collections::HashSet<NodeId> = support.iter().copied().collect();
    if targets.contains(&pivot) {
        return Some(pivot);
    }
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![pivot];
    while let Some(id) = stack.pop() {
        for &o in netlist.fanouts(id) {
            if !netlist.node(o).is_lut() || levels.level(o) > limit || !seen.insert(o) {
                continue;
            }
            if targets.contains(&o) {
                return Some(o);
            }
            stack.push(o);
        }
    }
    None
}

/// Rewrites the pivot in place with the candidate's support and function and
/// removes logic left without fanouts. The pivot keeps its name, so every
/// consumer is redirected implicitly.
pub fn apply_resubstitution(
    netlist: &mut Netlist,
    candidate: &ResubCandidate,
) -> Result<MutationReport, ResynthError> {
    let levels = netlist.levels()?;
    apply_with_levels(netlist, &levels, candidate)
}

pub(crate) fn apply_with_levels(
    netlist: &mut Netlist,
    levels: &Levels,
    candidate: &ResubCandidate,
) -> Result<MutationReport, ResynthError> {
    let pivot = candidate.pivot;
    if candidate.support.len() > netlist.k_max() {
        return Err(ResynthError::SupportTooLarge {
            size: candidate.support.len(),
            k_max: netlist.k_max(),
        });
    }
    if let Some(via) = creates_cycle(netlist, levels, pivot, &candidate.support) {
        return Err(ResynthError::Cycle {
            pivot: netlist.name(pivot).to_string(),
            via: netlist.name(via).to_string(),
        });
    }
    let old = netlist.fanins(pivot).to_vec();
    let names = |n: &Netlist, ids: &[NodeId]| {
        ids.iter()
            .map(|&i| n.name(i).to_string())
            .collect::<Vec<_>>()
    };
    let old_fanins = names(netlist, &old);
    let new_fanins = names(netlist, &candidate.support);
    netlist.replace_lut(pivot, candidate.support.clone(), candidate.function.clone())?;
    let seeds: Vec<NodeId> = old
        .into_iter()
        .filter(|f| !candidate.support.contains(f))
        .collect();
    let removed = netlist.sweep_dangling(&seeds);
    Ok(MutationReport {
        pivot: netlist.name(pivot).to_string(),
        old_fanins,
        new_fanins,
        removed_nodes: removed.iter().map(|(_, n)| n.name.clone()).collect(),
        delta_luts: -(removed.len() as i64),
    })
}
