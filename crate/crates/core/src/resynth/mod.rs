//! SLL-aware resubstitution.
//!
//! The sweep visits LUTs in topological order. For a LUT with at least one
//! fanin on another die it builds a window, computes the observability care
//! set by exhaustive window simulation, and looks for a function of the
//! remaining fanins (plus same-die divisors) that matches the LUT on every
//! care minterm. Accepted candidates rewrite the LUT in place, so its name,
//! id and die are preserved and the assignment stays valid.

mod care;
mod divisors;
mod resub;
mod window;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{count_sll, count_sll_fo, MetricsError};
use crate::netlist::{Levels, Netlist, NetlistError, NodeId};
use crate::partition::{DieAssignment, PartitionError};

pub use care::{extract_care_set, CarePredicate, CareSet};
pub use divisors::{collect_divisors, Divisor, DivisorSet};
pub use resub::{
    apply_resubstitution, exist_check, find_equiv_func, interpolate, select_cross_die_fanin,
    MutationReport, ResubCandidate,
};
pub use window::{build_window, Window, WindowSim};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResynthError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("node `{0}` is not a LUT")]
    NotALut(String),
    #[error("support signal `{0}` is not part of the window")]
    SupportNotInWindow(String),
    #[error("support does not determine the pivot on its care set")]
    NoInterpolant,
    #[error("support of {size} exceeds the LUT size {k_max}")]
    SupportTooLarge { size: usize, k_max: usize },
    #[error("rewriting `{pivot}` would close a loop through `{via}`")]
    Cycle { pivot: String, via: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid care predicate: {0}")]
    InvalidPredicate(String),
}

/// Number of sweeps over the netlist.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Passes {
    Fixed(usize),
    /// Repeat until a sweep commits nothing.
    UntilConverged,
}

impl fmt::Display for Passes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Passes::Fixed(n) => write!(f, "{n}"),
            Passes::UntilConverged => f.write_str("inf"),
        }
    }
}

impl FromStr for Passes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "converge" => Ok(Passes::UntilConverged),
            _ => s
                .parse::<usize>()
                .map(Passes::Fixed)
                .map_err(|_| format!("expected a pass count or `inf`, got `{s}`")),
        }
    }
}

/// Safety stop for `Passes::UntilConverged`; every pass that commits
/// removes at least one cross-die edge, so this is never reached on
/// netlists with fewer edges.
const MAX_CONVERGE_PASSES: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResynConfig {
    /// Fanout depth of the window.
    pub d1: usize,
    /// Fanin depth of the window.
    pub d2: usize,
    pub window_pi_cap: usize,
    pub divisor_cap: usize,
    /// Deepest window-local divisor level; defaults to `d2`.
    pub divisor_level_bound: Option<usize>,
    pub passes: Passes,
    /// Re-simulate the window with the candidate before each commit.
    pub verify_each_commit: bool,
    /// Largest number of divisors added to the remaining fanins.
    pub max_augment: usize,
    /// Only rewrite LUTs on this die.
    pub freeze_die: Option<u32>,
}

impl Default for ResynConfig {
    fn default() -> Self {
        ResynConfig {
            d1: 2,
            d2: 8,
            window_pi_cap: 14,
            divisor_cap: 150,
            divisor_level_bound: None,
            passes: Passes::Fixed(1),
            verify_each_commit: true,
            max_augment: 1,
            freeze_die: None,
        }
    }
}

impl ResynConfig {
    pub fn divisor_level_bound(&self) -> usize {
        self.divisor_level_bound.unwrap_or(self.d2)
    }

    pub fn validate(&self) -> Result<(), ResynthError> {
        let bad = |what: &str| {
            Err(ResynthError::InvalidConfig(format!(
                "{what} must be at least 1"
            )))
        };
        if self.window_pi_cap == 0 {
            return bad("window PI cap");
        }
        if self.window_pi_cap > 20 {
            return Err(ResynthError::InvalidConfig(format!(
                "window PI cap {} is above the supported 20",
                self.window_pi_cap
            )));
        }
        if self.divisor_cap == 0 {
            return bad("divisor cap");
        }
        if self.divisor_level_bound == Some(0) {
            return bad("divisor level bound");
        }
        if self.passes == Passes::Fixed(0) {
            return bad("pass count");
        }
        if self.max_augment == 0 {
            return bad("augmentation size");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    /// No fanin on another die.
    Skipped,
    /// Outside the die selected by `freeze_die`.
    Frozen,
    /// No window fits under the PI cap.
    NoWindow,
    NoCandidate {
        window_pis: usize,
        divisors: usize,
        in_die: usize,
        care_minterms: usize,
    },
    Rejected {
        reason: String,
    },
    Committed {
        removed_fanin: String,
        old_fanins: Vec<String>,
        new_fanins: Vec<String>,
        function: String,
        removed_nodes: Vec<String>,
        delta_sll_fo: i64,
        delta_luts: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PivotRecord {
    pub pass: usize,
    pub pivot: String,
    pub die: u32,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub n_sll: usize,
    pub n_sll_fo: usize,
    pub lut_count: usize,
    pub rho: f64,
}

impl Snapshot {
    pub fn take(netlist: &Netlist, assignment: &DieAssignment) -> Result<Self, ResynthError> {
        Ok(Snapshot {
            n_sll: count_sll(netlist, assignment)?,
            n_sll_fo: count_sll_fo(netlist, assignment)?,
            lut_count: netlist.lut_count(),
            rho: assignment.imbalance(netlist).unwrap_or(0.0),
        })
    }
}

/// Divisor policy note carried in every report.
pub const DIVISOR_POLICY: &str = "divisors: fanin-side window PIs and fanin-cone nodes first, then other \
window PIs and side nodes whose support lies in the window; pivot, MFFC and transitive fanout excluded";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResynReport {
    pub config: ResynConfig,
    pub divisor_policy: String,
    pub passes_run: usize,
    pub attempts: usize,
    pub commits: usize,
    pub before: Snapshot,
    pub after: Snapshot,
    pub delta_sll: i64,
    pub delta_sll_fo: i64,
    pub delta_luts: i64,
    pub delta_rho: f64,
    pub records: Vec<PivotRecord>,
}

impl ResynReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Committed records in commit order.
    pub fn commits(&self) -> impl Iterator<Item = &PivotRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r.outcome, Outcome::Committed { .. }))
    }
}

/// Checks the candidate against the window: every window output must keep
/// its value on every minterm allowed by the injected predicate.
fn verify_candidate(
    netlist: &Netlist,
    window: &Window,
    sim: &WindowSim,
    candidate: &ResubCandidate,
    injected: Option<&CarePredicate>,
) -> bool {
    let ins: Vec<&[u64]> = candidate
        .support
        .iter()
        .map(|&s| sim.value(s).expect("support lies in the window"))
        .collect();
    let mut new_value = vec![0u64; sim.words];
    candidate.function.eval_words(&ins, &mut new_value);
    sim.mask_tail(&mut new_value);
    let mask = injected
        .and_then(|p| p.on_window(netlist, window, sim))
        .unwrap_or_else(|| sim.all_ones());
    let old_value = sim.value(window.pivot).unwrap().to_vec();
    let before = sim.outputs_with_pivot(netlist, window, old_value);
    let after = sim.outputs_with_pivot(netlist, window, new_value);
    before.iter().zip(&after).all(|(b, a)| {
        b.iter()
            .zip(a)
            .zip(&mask)
            .all(|((x, y), m)| (x ^ y) & m == 0)
    })
}

fn cross_die_fanins(assignment: &DieAssignment, id: NodeId, fanins: &[NodeId]) -> usize {
    let d = assignment.die(id);
    fanins.iter().filter(|&&f| assignment.die(f) != d).count()
}

/// Runs the greedy sweep, mutating `netlist` in place.
///
/// `injected` further restricts the care set of windows whose PIs cover the
/// predicate's inputs; it is meant for tests that supply external
/// don't-cares, and global equivalence then only holds on the predicate.
pub fn resynthesize(
    netlist: &mut Netlist,
    assignment: &DieAssignment,
    config: &ResynConfig,
    injected: Option<&CarePredicate>,
) -> Result<ResynReport, ResynthError> {
    config.validate()?;
    assignment.check_total(netlist)?;
    let before = Snapshot::take(netlist, assignment)?;
    let mut records = Vec::new();
    let mut attempts = 0;
    let mut commits = 0;
    let mut passes_run = 0;
    let max_passes = match config.passes {
        Passes::Fixed(n) => n,
        Passes::UntilConverged => MAX_CONVERGE_PASSES,
    };
    let mut edges = before.n_sll_fo as i64;

    while passes_run < max_passes {
        let pass = passes_run;
        passes_run += 1;
        let mut pass_commits = 0;
        let mut levels = netlist.levels()?;
        let order: Vec<NodeId> = levels.order().to_vec();
        for pivot in order {
            if !netlist.contains(pivot) || !netlist.node(pivot).is_lut() {
                continue;
            }
            let die = assignment.die(pivot);
            let record = |outcome| PivotRecord {
                pass,
                pivot: netlist.name(pivot).to_string(),
                die,
                outcome,
            };
            let fanins = netlist.fanins(pivot).to_vec();
            let cross_before = cross_die_fanins(assignment, pivot, &fanins);
            if cross_before == 0 {
                records.push(record(Outcome::Skipped));
                continue;
            }
            if config.freeze_die.is_some_and(|d| d != die) {
                records.push(record(Outcome::Frozen));
                continue;
            }
            attempts += 1;
            let outcome = attempt(
                netlist,
                &levels,
                assignment,
                config,
                injected,
                pivot,
                cross_before,
            )?;
            let Some((candidate, sim_ok)) = outcome.candidate else {
                records.push(record(outcome.empty));
                continue;
            };
            if !sim_ok {
                records.push(record(Outcome::Rejected {
                    reason: "window re-simulation mismatch".into(),
                }));
                continue;
            }
            let name = netlist.name(pivot).to_string();
            let removed_fanin = netlist.name(candidate.removed_fanin).to_string();
            let function = candidate.function.to_string();
            let luts_before = netlist.lut_count() as i64;
            match resub::apply_with_levels(netlist, &levels, &candidate) {
                Ok(m) => {
                    let now = count_sll_fo(netlist, assignment)? as i64;
                    records.push(PivotRecord {
                        pass,
                        pivot: name,
                        die,
                        outcome: Outcome::Committed {
                            removed_fanin,
                            old_fanins: m.old_fanins,
                            new_fanins: m.new_fanins,
                            function,
                            removed_nodes: m.removed_nodes,
                            delta_sll_fo: now - edges,
                            delta_luts: netlist.lut_count() as i64 - luts_before,
                        },
                    });
                    edges = now;
                    commits += 1;
                    pass_commits += 1;
                    levels = netlist.levels()?;
                }
                Err(ResynthError::Cycle { via, .. }) => {
                    records.push(PivotRecord {
                        pass,
                        pivot: name,
                        die,
                        outcome: Outcome::Rejected {
                            reason: format!("would close a loop through `{via}`"),
                        },
                    });
                }
                Err(e) => return Err(e),
            }
        }
        if pass_commits == 0 {
            break;
        }
    }

    let after = Snapshot::take(netlist, assignment)?;
    Ok(ResynReport {
        config: config.clone(),
        divisor_policy: DIVISOR_POLICY.to_string(),
        passes_run,
        attempts,
        commits,
        delta_sll: after.n_sll as i64 - before.n_sll as i64,
        delta_sll_fo: after.n_sll_fo as i64 - before.n_sll_fo as i64,
        delta_luts: after.lut_count as i64 - before.lut_count as i64,
        delta_rho: after.rho - before.rho,
        before,
        after,
        records,
    })
}

struct Attempt {
    candidate: Option<(ResubCandidate, bool)>,
    empty: Outcome,
}

fn attempt(
    netlist: &Netlist,
    levels: &Levels,
    assignment: &DieAssignment,
    config: &ResynConfig,
    injected: Option<&CarePredicate>,
    pivot: NodeId,
    cross_before: usize,
) -> Result<Attempt, ResynthError> {
    let none = |empty| {
        Ok(Attempt {
            candidate: None,
            empty,
        })
    };
    let Some(window) = build_window(netlist, levels, pivot, config)? else {
        return none(Outcome::NoWindow);
    };
    let sim = WindowSim::new(netlist, &window);
    let divisors = collect_divisors(netlist, levels, &window, assignment, config);
    let care = extract_care_set(netlist, &window, &sim, injected)?;
    let found = find_equiv_func(
        netlist, levels, &sim, &window, assignment, &divisors, &care, config,
    )?;
    let Some(candidate) = found else {
        return none(Outcome::NoCandidate {
            window_pis: window.pis.len(),
            divisors: divisors.candidates.len(),
            in_die: divisors.in_die.len(),
            care_minterms: care.count(),
        });
    };
    let cross_after = cross_die_fanins(assignment, pivot, &candidate.support);
    if cross_after >= cross_before {
        return none(Outcome::Rejected {
            reason: format!("cross-die fanins {cross_before} -> {cross_after}"),
        });
    }
    let ok = !config.verify_each_commit
        || verify_candidate(netlist, &window, &sim, &candidate, injected);
    Ok(Attempt {
        candidate: Some((candidate, ok)),
        empty: Outcome::Skipped,
    })
}
