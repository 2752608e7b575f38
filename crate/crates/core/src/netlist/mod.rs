//! LUT-level netlists.
//!
//! A [`Netlist`] is a DAG of LUT nodes driven by primary inputs and latch
//! outputs. Every net has exactly one driver and is named after it, so a node
//! and the net it drives are the same thing here. Latches are sequential
//! boundaries: their outputs behave like extra primary inputs and their inputs
//! like extra primary outputs for every combinational analysis.
//!
//! Node ids are dense indices assigned in creation order and never reused.
//! Removed nodes leave a tombstone so that ids held elsewhere (die
//! assignments, reports) stay meaningful.

mod traverse;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::truth_table::TruthTable;

pub use traverse::{mffc, tfi, tfo, Levels};

/// Default LUT size limit enforced when building or parsing netlists.
pub const DEFAULT_K_MAX: usize = 6;

/// Prefix reserved for inter-die boundary pins created when splitting a netlist.
pub const RESERVED_PREFIX: &str = "__sll_";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatchInit {
    Zero,
    One,
    DontCare,
    Unknown,
}

impl LatchInit {
    pub fn blif_code(self) -> u8 {
        match self {
            LatchInit::Zero => 0,
            LatchInit::One => 1,
            LatchInit::DontCare => 2,
            LatchInit::Unknown => 3,
        }
    }

    pub fn from_blif_code(code: &str) -> Option<Self> {
        match code {
            "0" => Some(LatchInit::Zero),
            "1" => Some(LatchInit::One),
            "2" => Some(LatchInit::DontCare),
            "3" => Some(LatchInit::Unknown),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatchElement {
    pub init: LatchInit,
    /// Optional `<type> <control>` pair from the `.latch` line.
    pub control: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Input,
    Lut(TruthTable),
    Latch(LatchElement),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    /// LUT inputs in truth-table order; a latch has exactly one entry (its data input).
    pub fanins: Vec<NodeId>,
}

impl Node {
    pub fn is_lut(&self) -> bool {
        matches!(self.kind, NodeKind::Lut(_))
    }

    pub fn is_input(&self) -> bool {
        matches!(self.kind, NodeKind::Input)
    }

    pub fn is_latch(&self) -> bool {
        matches!(self.kind, NodeKind::Latch(_))
    }

    /// True for nodes whose value is a free variable in combinational analysis.
    pub fn is_comb_source(&self) -> bool {
        !self.is_lut()
    }

    pub fn function(&self) -> Option<&TruthTable> {
        match &self.kind {
            NodeKind::Lut(tt) => Some(tt),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("net `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("net `{0}` is used but never driven")]
    UndeclaredNet(String),
    #[error("combinational cycle through `{0}`")]
    Cycle(String),
    #[error("node `{node}` has {count} fanins, exceeding k_max = {k_max}")]
    FaninLimit {
        node: String,
        count: usize,
        k_max: usize,
    },
    #[error("node `{node}` lists fanin `{fanin}` more than once")]
    DuplicateFanin { node: String, fanin: String },
    #[error("node `{node}` has {fanins} fanins but a {inputs}-input function")]
    ArityMismatch {
        node: String,
        fanins: usize,
        inputs: usize,
    },
    #[error("name `{0}` uses the reserved prefix `{RESERVED_PREFIX}`")]
    ReservedName(String),
    #[error("output `{0}` listed more than once")]
    DuplicateOutput(String),
    #[error("node `{0}` is not a LUT")]
    NotALut(String),
    #[error("node `{0}` still has fanouts")]
    HasFanouts(String),
}

#[derive(Clone, Debug)]
pub struct Netlist {
    model_name: String,
    nodes: Vec<Option<Node>>,
    fanouts: Vec<Vec<NodeId>>,
    po_refs: Vec<u32>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    names: HashMap<String, NodeId>,
    k_max: usize,
}

impl Netlist {
    pub fn new(model_name: impl Into<String>) -> Self {
        Netlist {
            model_name: model_name.into(),
            nodes: Vec::new(),
            fanouts: Vec::new(),
            po_refs: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            names: HashMap::new(),
            k_max: DEFAULT_K_MAX,
        }
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn set_model_name(&mut self, name: impl Into<String>) {
        self.model_name = name.into();
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Upper bound (exclusive) on node ids, including removed ones.
    pub fn id_bound(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        self.nodes[id.index()]
            .as_ref()
            .unwrap_or_else(|| panic!("node {id} was removed"))
    }

    pub fn try_node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index()).and_then(|n| n.as_ref())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.try_node(id).is_some()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.node(id).name
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.names.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<NodeId, NetlistError> {
        self.find(name)
            .ok_or_else(|| NetlistError::UnknownNode(name.to_string()))
    }

    pub fn fanins(&self, id: NodeId) -> &[NodeId] {
        &self.node(id).fanins
    }

    pub fn fanouts(&self, id: NodeId) -> &[NodeId] {
        &self.fanouts[id.index()]
    }

    /// Number of primary-output entries driven by `id`.
    pub fn po_refs(&self, id: NodeId) -> u32 {
        self.po_refs[id.index()]
    }

    pub fn is_output(&self, id: NodeId) -> bool {
        self.po_refs[id.index()] > 0
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    /// Live node ids in increasing order.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_some())
            .map(|(i, _)| NodeId(i as u32))
    }

    pub fn luts(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&id| self.node(id).is_lut())
    }

    pub fn latches(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&id| self.node(id).is_latch())
    }

    pub fn lut_count(&self) -> usize {
        self.luts().count()
    }

    pub fn latch_count(&self) -> usize {
        self.latches().count()
    }

    /// Combinational sources: primary inputs followed by latch outputs.
    pub fn comb_inputs(&self) -> Vec<NodeId> {
        let mut v = self.inputs.clone();
        v.extend(self.latches());
        v
    }

    /// Combinational sinks: primary-output drivers followed by latch-input drivers.
    /// Each entry pairs a name with its driver: the PO name, or the latch name
    /// followed by `$next` for latch inputs.
    pub fn comb_outputs(&self) -> Vec<(String, NodeId)> {
        let mut v: Vec<(String, NodeId)> = self
            .outputs
            .iter()
            .map(|&o| (self.name(o).to_string(), o))
            .collect();
        for l in self.latches() {
            v.push((format!("{}$next", self.name(l)), self.node(l).fanins[0]));
        }
        v
    }

    fn check_new_name(&self, name: &str) -> Result<(), NetlistError> {
        if self.names.contains_key(name) {
            return Err(NetlistError::MultipleDrivers(name.to_string()));
        }
        Ok(())
    }

    fn push_node(&mut self, node: Node) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.names.insert(node.name.clone(), id);
        self.nodes.push(Some(node));
        self.fanouts.push(Vec::new());
        self.po_refs.push(0);
        id
    }

    pub fn add_input(&mut self, name: impl Into<String>) -> Result<NodeId, NetlistError> {
        let name = name.into();
        self.check_new_name(&name)?;
        let id = self.push_node(Node {
            name,
            kind: NodeKind::Input,
            fanins: Vec::new(),
        });
        self.inputs.push(id);
        Ok(id)
    }

    fn check_lut(
        &self,
        name: &str,
        fanins: &[NodeId],
        function: &TruthTable,
    ) -> Result<(), NetlistError> {
        if fanins.len() > self.k_max {
            return Err(NetlistError::FaninLimit {
                node: name.to_string(),
                count: fanins.len(),
                k_max: self.k_max,
            });
        }
        if fanins.len() != function.num_inputs() {
            return Err(NetlistError::ArityMismatch {
                node: name.to_string(),
                fanins: fanins.len(),
                inputs: function.num_inputs(),
            });
        }
        for (i, f) in fanins.iter().enumerate() {
            if !self.contains(*f) {
                return Err(NetlistError::UnknownNode(f.to_string()));
            }
            if fanins[..i].contains(f) {
                return Err(NetlistError::DuplicateFanin {
                    node: name.to_string(),
                    fanin: self.name(*f).to_string(),
                });
            }
        }
        Ok(())
    }

    /// Adds a LUT whose fanins already exist. Acyclicity holds by construction.
    pub fn add_lut(
        &mut self,
        name: impl Into<String>,
        fanins: Vec<NodeId>,
        function: TruthTable,
    ) -> Result<NodeId, NetlistError> {
        let name = name.into();
        self.check_new_name(&name)?;
        self.check_lut(&name, &fanins, &function)?;
        let id = self.push_node(Node {
            name,
            kind: NodeKind::Lut(function),
            fanins: Vec::new(),
        });
        self.connect(id, fanins);
        Ok(id)
    }

    /// Adds a latch. Its data input may be connected later with [`Netlist::set_latch_input`].
    pub fn add_latch(
        &mut self,
        name: impl Into<String>,
        latch: LatchElement,
        input: Option<NodeId>,
    ) -> Result<NodeId, NetlistError> {
        let name = name.into();
        self.check_new_name(&name)?;
        let id = self.push_node(Node {
            name,
            kind: NodeKind::Latch(latch),
            fanins: Vec::new(),
        });
        if let Some(d) = input {
            self.set_latch_input(id, d)?;
        }
        Ok(id)
    }

    pub fn set_latch_input(&mut self, latch: NodeId, driver: NodeId) -> Result<(), NetlistError> {
        if !self.contains(driver) {
            return Err(NetlistError::UnknownNode(driver.to_string()));
        }
        let old = std::mem::take(&mut self.nodes[latch.index()].as_mut().unwrap().fanins);
        for f in old {
            self.fanouts[f.index()].retain(|&x| x != latch);
        }
        self.connect(latch, vec![driver]);
        Ok(())
    }

    pub fn add_output(&mut self, driver: NodeId) -> Result<(), NetlistError> {
        if !self.contains(driver) {
            return Err(NetlistError::UnknownNode(driver.to_string()));
        }
        if self.outputs.contains(&driver) {
            return Err(NetlistError::DuplicateOutput(self.name(driver).to_string()));
        }
        self.outputs.push(driver);
        self.po_refs[driver.index()] += 1;
        Ok(())
    }

    /// Creates a LUT placeholder with no fanins; used by the parser for forward references.
    pub(crate) fn add_lut_placeholder(
        &mut self,
        name: String,
        function: TruthTable,
    ) -> Result<NodeId, NetlistError> {
        self.check_new_name(&name)?;
        Ok(self.push_node(Node {
            name,
            kind: NodeKind::Lut(function),
            fanins: Vec::new(),
        }))
    }

    pub(crate) fn connect_checked(
        &mut self,
        id: NodeId,
        fanins: Vec<NodeId>,
    ) -> Result<(), NetlistError> {
        let node = self.node(id);
        if let NodeKind::Lut(tt) = &node.kind {
            self.check_lut(&node.name, &fanins, tt)?;
        }
        self.connect(id, fanins);
        Ok(())
    }

    fn connect(&mut self, id: NodeId, fanins: Vec<NodeId>) {
        for f in &fanins {
            self.fanouts[f.index()].push(id);
        }
        self.nodes[id.index()].as_mut().unwrap().fanins = fanins;
    }

    /// Replaces the fanins and function of a LUT in place. The caller is
    /// responsible for not introducing a combinational cycle.
    pub fn replace_lut(
        &mut self,
        id: NodeId,
        fanins: Vec<NodeId>,
        function: TruthTable,
    ) -> Result<(), NetlistError> {
        let node = self.node(id);
        if !node.is_lut() {
            return Err(NetlistError::NotALut(node.name.clone()));
        }
        let name = node.name.clone();
        self.check_lut(&name, &fanins, &function)?;
        let old = std::mem::take(&mut self.nodes[id.index()].as_mut().unwrap().fanins);
        for f in old {
            self.fanouts[f.index()].retain(|&x| x != id);
        }
        self.nodes[id.index()].as_mut().unwrap().kind = NodeKind::Lut(function);
        self.connect(id, fanins);
        Ok(())
    }

    /// Removes a LUT that drives nothing.
    pub fn remove_lut(&mut self, id: NodeId) -> Result<(), NetlistError> {
        let node = self.node(id);
        if !node.is_lut() {
            return Err(NetlistError::NotALut(node.name.clone()));
        }
        if !self.fanouts[id.index()].is_empty() || self.is_output(id) {
            return Err(NetlistError::HasFanouts(node.name.clone()));
        }
        let node = self.nodes[id.index()].take().unwrap();
        for f in &node.fanins {
            self.fanouts[f.index()].retain(|&x| x != id);
        }
        self.names.remove(&node.name);
        Ok(())
    }

    /// Removes every LUT among `seeds` (and, transitively, their fanins) that
    /// no longer drives anything. Returns the removed nodes in removal order.
    pub fn sweep_dangling(&mut self, seeds: &[NodeId]) -> Vec<(NodeId, Node)> {
        let mut removed = Vec::new();
        let mut stack: Vec<NodeId> = seeds.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let Some(node) = self.try_node(id) else {
                continue;
            };
            if !node.is_lut() || !self.fanouts[id.index()].is_empty() || self.is_output(id) {
                continue;
            }
            let node = node.clone();
            self.remove_lut(id).expect("dangling LUT is removable");
            stack.extend(node.fanins.iter().rev().copied());
            removed.push((id, node));
        }
        removed
    }

    /// Checks the structural invariants: fanin limits, no duplicate fanins,
    /// connected latches, and an acyclic combinational graph.
    pub fn validate(&self) -> Result<(), NetlistError> {
        for id in self.node_ids() {
            let node = self.node(id);
            match &node.kind {
                NodeKind::Lut(tt) => self.check_lut(&node.name, &node.fanins, tt)?,
                NodeKind::Latch(_) => {
                    if node.fanins.len() != 1 {
                        return Err(NetlistError::UndeclaredNet(format!(
                            "{} (latch input)",
                            node.name
                        )));
                    }
                }
                NodeKind::Input => {}
            }
        }
        Levels::compute(self)?;
        Ok(())
    }

    /// Rejects names that start with [`RESERVED_PREFIX`].
    pub fn check_reserved_names(&self) -> Result<(), NetlistError> {
        for id in self.node_ids() {
            let name = self.name(id);
            if name.starts_with(RESERVED_PREFIX) {
                return Err(NetlistError::ReservedName(name.to_string()));
            }
        }
        Ok(())
    }

    /// Re-enumerates live nodes so ids are dense again, preserving relative order.
    /// Returns the old→new mapping (indexed by old id).
    pub fn compact(&self) -> (Netlist, Vec<Option<NodeId>>) {
        let mut map = vec![None; self.nodes.len()];
        let mut out = Netlist::new(self.model_name.clone()).with_k_max(self.k_max);
        for id in self.node_ids() {
            let n = self.node(id);
            let new = out.push_node(Node {
                name: n.name.clone(),
                kind: n.kind.clone(),
                fanins: Vec::new(),
            });
            map[id.index()] = Some(new);
        }
        for id in self.node_ids() {
            let fanins = self
                .fanins(id)
                .iter()
                .map(|f| map[f.index()].unwrap())
                .collect();
            out.connect(map[id.index()].unwrap(), fanins);
        }
        out.inputs = self
            .inputs
            .iter()
            .map(|i| map[i.index()].unwrap())
            .collect();
        for &o in &self.outputs {
            let o = map[o.index()].unwrap();
            out.outputs.push(o);
            out.po_refs[o.index()] += 1;
        }
        (out, map)
    }
}
