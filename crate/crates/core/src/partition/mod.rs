//! Die assignment of netlist nodes.
//!
//! Every LUT and latch weighs 1; primary inputs weigh 0 but still carry a
//! die label so that input-driven connections can be classified as intra- or
//! inter-die.

mod fm;
mod hash;
mod io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{Netlist, NodeId, NodeKind};

pub use fm::partition_fm;
pub use hash::{fnv1a64, partition_hash};
pub use io::{load_assignment, load_assignment_subset, save_assignment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("number of dies must be at least 2, got {0}")]
    TooFewDies(usize),
    #[error("imbalance upper bound must be >= 1.0, got {0}")]
    InvalidBound(f64),
    #[error("netlist has no logic nodes to partition")]
    Empty,
    #[error("imbalance bound {ub} is infeasible: per-die capacity {capacity:.3} is below the largest node weight {max_weight}")]
    Infeasible {
        ub: f64,
        capacity: f64,
        max_weight: u64,
    },
    #[error("node `{0}` has no die assignment")]
    Unassigned(String),
    #[error("line {line}: unknown node `{name}`")]
    UnknownName { line: usize, name: String },
    #[error("line {line}: node `{name}` assigned more than once")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: die {die} out of range for {num_dies} dies")]
    DieOutOfRange {
        line: usize,
        die: u64,
        num_dies: usize,
    },
    #[error("line {line}: expected `<name> <die>`")]
    Syntax { line: usize },
    #[error("external-file partition mode needs an assignment file")]
    MissingFile,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionMode {
    FmMincut,
    HashLabel,
    ExternalFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub num_dies: usize,
    pub imbalance_upper_bound: f64,
    pub seed: u64,
    pub mode: PartitionMode,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            num_dies: 2,
            imbalance_upper_bound: 1.25,
            seed: 0,
            mode: PartitionMode::FmMincut,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<(), PartitionError> {
        if self.num_dies < 2 {
            return Err(PartitionError::TooFewDies(self.num_dies));
        }
        if self.imbalance_upper_bound.is_nan() || self.imbalance_upper_bound < 1.0 {
            return Err(PartitionError::InvalidBound(self.imbalance_upper_bound));
        }
        Ok(())
    }
}

/// Logic weight of a node: 1 for LUTs and latches, 0 for primary inputs.
pub fn node_weight(netlist: &Netlist, id: NodeId) -> u64 {
    match netlist.node(id).kind {
        NodeKind::Input => 0,
        NodeKind::Lut(_) | NodeKind::Latch(_) => 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DieAssignment {
    num_dies: usize,
    die_of: Vec<Option<u32>>,
}

impl DieAssignment {
    pub fn new(num_dies: usize, id_bound: usize) -> Self {
        DieAssignment {
            num_dies,
            die_of: vec![None; id_bound],
        }
    }

    /// Assigns every live node of `netlist` to `die`.
    pub fn uniform(netlist: &Netlist, num_dies: usize, die: u32) -> Self {
        let mut a = Self::new(num_dies, netlist.id_bound());
        for id in netlist.node_ids() {
            a.set(id, die);
        }
        a
    }

    /// Builds an assignment from `(node name, die)` pairs.
    pub fn from_names<'a>(
        netlist: &Netlist,
        num_dies: usize,
        pairs: impl IntoIterator<Item = (&'a str, u32)>,
    ) -> Result<Self, PartitionError> {
        let mut a = Self::new(num_dies, netlist.id_bound());
        for (name, die) in pairs {
            let id = netlist
                .find(name)
                .ok_or_else(|| PartitionError::UnknownName {
                    line: 0,
                    name: name.to_string(),
                })?;
            if die as usize >= num_dies {
                return Err(PartitionError::DieOutOfRange {
                    line: 0,
                    die: die as u64,
                    num_dies,
                });
            }
            a.set(id, die);
        }
        a.check_total(netlist)?;
        Ok(a)
    }

    pub fn num_dies(&self) -> usize {
        self.num_dies
    }

    pub fn set(&mut self, id: NodeId, die: u32) {
        assert!((die as usize) < self.num_dies, "die {die} out of range");
        if id.index() >= self.die_of.len() {
            self.die_of.resize(id.index() + 1, None);
        }
        self.die_of[id.index()] = Some(die);
    }

    pub fn get(&self, id: NodeId) -> Option<u32> {
        self.die_of.get(id.index()).copied().flatten()
    }

    /// Die of an assigned node. Panics when the node is unassigned; call
    /// [`DieAssignment::check_total`] first.
    pub fn die(&self, id: NodeId) -> u32 {
        self.get(id)
            .unwrap_or_else(|| panic!("node {id} has no die assignment"))
    }

    pub fn check_total(&self, netlist: &Netlist) -> Result<(), PartitionError> {
        for id in netlist.node_ids() {
            if self.get(id).is_none() {
                return Err(PartitionError::Unassigned(netlist.name(id).to_string()));
            }
        }
        Ok(())
    }

    /// Total node weight per die.
    pub fn die_weights(&self, netlist: &Netlist) -> Vec<u64> {
        let mut w = vec![0u64; self.num_dies];
        for id in netlist.node_ids() {
            if let Some(d) = self.get(id) {
                w[d as usize] += node_weight(netlist, id);
            }
        }
        w
    }

    /// Re-keys this assignment from `from` onto `to` by node name. Every node
    /// of `to` must exist in `from`; names only in `from` are dropped.
    pub fn transfer(&self, from: &Netlist, to: &Netlist) -> Result<DieAssignment, PartitionError> {
        let mut a = DieAssignment::new(self.num_dies, to.id_bound());
        for id in to.node_ids() {
            let die = from
                .find(to.name(id))
                .and_then(|src| self.get(src))
                .ok_or_else(|| PartitionError::Unassigned(to.name(id).to_string()))?;
            a.set(id, die);
        }
        Ok(a)
    }

    /// Imbalance ratio of this assignment over the live nodes of `netlist`.
    pub fn imbalance(&self, netlist: &Netlist) -> Result<f64, PartitionError> {
        imbalance_ratio(&self.die_weights(netlist))
    }
}

/// `max_k |V_k| / (|V| / K)` for per-die weights `|V_k|`, in double precision.
pub fn imbalance_ratio(die_weights: &[u64]) -> Result<f64, PartitionError> {
    let total: u64 = die_weights.iter().sum();
    if total == 0 {
        return Err(PartitionError::Empty);
    }
    let k = die_weights.len() as f64;
    let max = *die_weights.iter().max().unwrap() as f64;
    Ok(max / (total as f64 / k))
}

/// Number of nets (a driver plus its sinks) that touch two or more dies.
pub fn cut_size(netlist: &Netlist, assignment: &DieAssignment) -> usize {
    netlist
        .node_ids()
        .filter(|&id| {
            let d = assignment.die(id);
            netlist.fanouts(id).iter().any(|&s| assignment.die(s) != d)
        })
        .count()
}

pub fn partition(
    netlist: &Netlist,
    config: &PartitionConfig,
) -> Result<DieAssignment, PartitionError> {
    match config.mode {
        PartitionMode::FmMincut => partition_fm(netlist, config),
        PartitionMode::HashLabel => {
            config.validate()?;
            Ok(partition_hash(netlist, config.num_dies))
        }
        PartitionMode::ExternalFile => Err(PartitionError::MissingFile),
    }
}
