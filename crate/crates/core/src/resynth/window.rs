//! Window construction around a pivot node.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use super::{ResynConfig, ResynthError};
use crate::netlist::{Levels, Netlist, NodeId};
use crate::sim::{exhaustive_num_words, exhaustive_tail_mask, exhaustive_word};

/// Lazily explored transitive fanout of a pivot, visited in level order.
///
/// `contains(z)` only explores nodes with level below `level(z)`, which is
/// enough because levels strictly increase along combinational edges.
pub(crate) struct TfoOracle<'a> {
    netlist: &'a Netlist,
    levels: &'a Levels,
    reached: HashSet<NodeId>,
    heap: BinaryHeap<Reverse<(u32, NodeId)>>,
}

impl<'a> TfoOracle<'a> {
    pub(crate) fn new(netlist: &'a Netlist, levels: &'a Levels, pivot: NodeId) -> Self {
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((levels.level(pivot), pivot)));
        TfoOracle {
            netlist,
            levels,
            reached: HashSet::new(),
            heap,
        }
    }

    pub(crate) fn contains(&mut self, z: NodeId) -> bool {
        let target = self.levels.level(z);
        while let Some(&Reverse((l, n))) = self.heap.peek() {
            if l >= target {
                break;
            }
            self.heap.pop();
            for &o in self.netlist.fanouts(n) {
                if self.netlist.node(o).is_lut() && self.reached.insert(o) {
                    self.heap.push(Reverse((self.levels.level(o), o)));
                }
            }
        }
        self.reached.contains(&z)
    }
}

/// A bounded sub-circuit around a pivot.
#[derive(Clone, Debug)]
pub struct Window {
    pub pivot: NodeId,
    /// Free variables of the window; minterm bit `i` is the value of `pis[i]`.
    pub pis: Vec<NodeId>,
    /// Internal LUT nodes in topological order, pivot included.
    pub nodes: Vec<NodeId>,
    /// Internal nodes observable outside the window (fanout leaving it, or a primary output).
    pub outputs: Vec<NodeId>,
    /// Fanout depth actually used.
    pub d1: usize,
    /// Fanin depth actually used.
    pub d2: usize,
    /// Window PIs in the pivot's transitive fanin.
    pub tfi_pis: BTreeSet<NodeId>,
    /// Internal nodes in the pivot's transitive fanin.
    pub tfi_nodes: BTreeSet<NodeId>,
    /// Internal nodes in the pivot's transitive fanout.
    pub tfo_nodes: BTreeSet<NodeId>,
    /// Nodes added because they reconverge with the pivot's fanin cone.
    pub side_nodes: BTreeSet<NodeId>,
    /// Set when a window PI depends on the pivot through logic outside the
    /// window; observability don't-cares are then unusable.
    pub pi_depends_on_pivot: bool,
}

impl Window {
    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains(&id) || self.pis.contains(&id)
    }
}

struct Core {
    internal: BTreeSet<NodeId>,
    tfi_nodes: BTreeSet<NodeId>,
    tfo_nodes: BTreeSet<NodeId>,
    pis: BTreeSet<NodeId>,
}

fn collect_core(netlist: &Netlist, pivot: NodeId, d1: usize, d2: usize) -> Core {
    let mut tfi_nodes = BTreeSet::new();
    let mut frontier = vec![pivot];
    for _ in 0..d2 {
        let mut next = Vec::new();
        for id in frontier {
            for &f in netlist.fanins(id) {
                if netlist.node(f).is_lut() && tfi_nodes.insert(f) {
                    next.push(f);
                }
            }
        }
        frontier = next;
    }
    let mut tfo_nodes = BTreeSet::new();
    let mut frontier = vec![pivot];
    for _ in 0..d1 {
        let mut next = Vec::new();
        for id in frontier {
            for &o in netlist.fanouts(id) {
                if netlist.node(o).is_lut() && tfo_nodes.insert(o) {
                    next.push(o);
                }
            }
        }
        frontier = next;
    }
    let mut internal: BTreeSet<NodeId> = tfi_nodes.union(&tfo_nodes).copied().collect();
    internal.insert(pivot);
    let pis = internal
        .iter()
        .flat_map(|&id| netlist.fanins(id).iter().copied())
        .filter(|f| !internal.contains(f))
        .collect();
    Core {
        internal,
        tfi_nodes,
        tfo_nodes,
        pis,
    }
}

/// Builds the window of `pivot`: `d1` levels of fanout, `d2` levels of
/// fanin, plus side nodes reachable within `d1` fanout steps from the fanin
/// cone whose extra inputs fit under the PI cap.
///
/// Returns `Ok(None)` when even the smallest window exceeds the PI cap.
pub fn build_window(
    netlist: &Netlist,
    levels: &Levels,
    pivot: NodeId,
    config: &ResynConfig,
) -> Result<Option<Window>, ResynthError> {
    if !netlist.contains(pivot) || !netlist.node(pivot).is_lut() {
        return Err(ResynthError::NotALut(
            netlist
                .try_node(pivot)
                .map_or_else(|| pivot.to_string(), |n| n.name.clone()),
        ));
    }
    let cap = config.window_pi_cap;
    let (mut d1, mut d2) = (config.d1, config.d2);
    let core = loop {
        let core = collect_core(netlist, pivot, d1, d2);
        if core.pis.len() <= cap {
            break core;
        }
        if d2 > 0 {
            d2 -= 1;
        } else if d1 > 0 {
            d1 -= 1;
        } else {
            return Ok(None);
        }
    };
    let Core {
        mut internal,
        tfi_nodes,
        tfo_nodes,
        mut pis,
    } = core;

    let mut oracle = TfoOracle::new(netlist, levels, pivot);
    let mut tfi_pis: BTreeSet<NodeId> = BTreeSet::new();
    for &id in tfi_nodes.iter().chain(std::iter::once(&pivot)) {
        for &f in netlist.fanins(id) {
            if pis.contains(&f) {
                tfi_pis.insert(f);
            }
        }
    }
    let pi_depends_on_pivot = pis.iter().any(|&p| oracle.contains(p));

    // Side expansion from the fanin cone, breadth first, bounded by d1 steps
    // and by the divisor cap.
    let mut side_nodes = BTreeSet::new();
    let mut frontier: Vec<NodeId> = tfi_pis.iter().chain(tfi_nodes.iter()).copied().collect();
    for _ in 0..d1 {
        let mut candidates: BTreeSet<NodeId> = BTreeSet::new();
        for &id in &frontier {
            for &o in netlist.fanouts(id) {
                if netlist.node(o).is_lut() && !internal.contains(&o) {
                    candidates.insert(o);
                }
            }
        }
        let mut next = Vec::new();
        for z in candidates {
            if side_nodes.len() >= config.divisor_cap {
                break;
            }
            if oracle.contains(z) {
                continue;
            }
            let extra: Vec<NodeId> = netlist
                .fanins(z)
                .iter()
                .copied()
                .filter(|f| !internal.contains(f) && !pis.contains(f))
                .collect();
            if pis.len() + extra.len() > cap {
                continue;
            }
            if extra.iter().any(|&f| oracle.contains(f)) {
                continue;
            }
            pis.extend(extra);
            internal.insert(z);
            side_nodes.insert(z);
            next.push(z);
        }
        frontier = next;
    }
    // A side node may consume a former window PI; such PIs become internal.
    pis.retain(|p| !internal.contains(p));

    let mut nodes: Vec<NodeId> = internal.iter().copied().collect();
    nodes.sort_by_key(|&id| (levels.level(id), id));
    let pis: Vec<NodeId> = pis.into_iter().collect();
    let outputs = nodes
        .iter()
        .copied()
        .filter(|&id| {
            netlist.is_output(id) || netlist.fanouts(id).iter().any(|o| !internal.contains(o))
        })
        .collect();
    Ok(Some(Window {
        pivot,
        pis,
        nodes,
        outputs,
        d1,
        d2,
        tfi_pis,
        tfi_nodes,
        tfo_nodes,
        side_nodes,
        pi_depends_on_pivot,
    }))
}

/// Exhaustive simulation of a window over all `2^|pis|` minterms.
#[derive(Clone, Debug)]
pub struct WindowSim {
    pub num_vars: usize,
    pub words: usize,
    index: HashMap<NodeId, usize>,
    values: Vec<Vec<u64>>,
}

impl WindowSim {
    pub fn new(netlist: &Netlist, window: &Window) -> Self {
        let num_vars = window.pis.len();
        let words = exhaustive_num_words(num_vars);
        let tail = exhaustive_tail_mask(num_vars);
        let mut index = HashMap::new();
        let mut values = Vec::with_capacity(window.pis.len() + window.nodes.len());
        for (i, &p) in window.pis.iter().enumerate() {
            index.insert(p, values.len());
            let mut w: Vec<u64> = (0..words).map(|k| exhaustive_word(i, k)).collect();
            *w.last_mut().unwrap() &= tail;
            values.push(w);
        }
        let mut sim = WindowSim {
            num_vars,
            words,
            index,
            values,
        };
        for &id in &window.nodes {
            let out = sim.eval_node(netlist, id);
            sim.index.insert(id, sim.values.len());
            sim.values.push(out);
        }
        sim
    }

    fn eval_node(&self, netlist: &Netlist, id: NodeId) -> Vec<u64> {
        let node = netlist.node(id);
        let tt = node.function().expect("window nodes are LUTs");
        let ins: Vec<&[u64]> = node
            .fanins
            .iter()
            .map(|f| self.values[self.index[f]].as_slice())
            .collect();
        let mut out = vec![0u64; self.words];
        tt.eval_words(&ins, &mut out);
        self.mask_tail(&mut out);
        out
    }

    pub fn mask_tail(&self, v: &mut [u64]) {
        if let Some(w) = v.last_mut() {
            *w &= exhaustive_tail_mask(self.num_vars);
        }
    }

    pub fn all_ones(&self) -> Vec<u64> {
        let mut v = vec![u64::MAX; self.words];
        self.mask_tail(&mut v);
        v
    }

    pub fn value(&self, id: NodeId) -> Option<&[u64]> {
        self.index.get(&id).map(|&i| self.values[i].as_slice())
    }

    /// Re-simulates the pivot's fanout region with the pivot replaced by
    /// `pivot_value`, returning the values of `window.outputs`.
    pub(crate) fn outputs_with_pivot(
        &self,
        netlist: &Netlist,
        window: &Window,
        pivot_value: Vec<u64>,
    ) -> Vec<Vec<u64>> {
        let mut overlay: HashMap<NodeId, Vec<u64>> = HashMap::new();
        overlay.insert(window.pivot, pivot_value);
        for &id in &window.nodes {
            if !window.tfo_nodes.contains(&id) {
                continue;
            }
            let node = netlist.node(id);
            let tt = node.function().unwrap();
            let ins: Vec<&[u64]> = node
                .fanins
                .iter()
                .map(|f| {
                    overlay
                        .get(f)
                        .map_or_else(|| self.values[self.index[f]].as_slice(), |v| v.as_slice())
                })
                .collect();
            let mut out = vec![0u64; self.words];
            tt.eval_words(&ins, &mut out);
            self.mask_tail(&mut out);
            overlay.insert(id, out);
        }
        window
            .outputs
            .iter()
            .map(|o| {
                overlay
                    .get(o)
                    .cloned()
                    .unwrap_or_else(|| self.values[self.index[o]].clone())
            })
            .collect()
    }
}

/// Logic level of every window signal measured from the window PIs.
pub(crate) fn window_levels(netlist: &Netlist, window: &Window) -> HashMap<NodeId, usize> {
    let mut lv: HashMap<NodeId, usize> = window.pis.iter().map(|&p| (p, 0)).collect();
    for &id in &window.nodes {
        let l = netlist
            .fanins(id)
            .iter()
            .map(|f| lv[f])
            .max()
            .map_or(1, |m| m + 1);
        lv.insert(id, l);
    }
    lv
}
