use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Netlist, NetlistError, NodeId};

/// Logic levels and a deterministic topological order of the LUT nodes.
///
/// Primary inputs and latches sit at level 0. The order sorts LUTs by
/// `(level, id)`.
#[derive(Clone, Debug)]
pub struct Levels {
    level: Vec<u32>,
    order: Vec<NodeId>,
}

impl Levels {
    pub fn compute(netlist: &Netlist) -> Result<Levels, NetlistError> {
        let bound = netlist.id_bound();
        let mut level = vec![0u32; bound];
        let mut pending = vec![0usize; bound];
        let mut queue = VecDeque::new();
        let mut lut_total = 0usize;
        for id in netlist.node_ids() {
            let node = netlist.node(id);
            if node.is_lut() {
                lut_total += 1;
                pending[id.index()] = node
                    .fanins
                    .iter()
                    .filter(|&&f| netlist.node(f).is_lut())
                    .count();
                if pending[id.index()] == 0 {
                    queue.push_back(id);
                }
            }
        }
        let mut seen = 0usize;
        while let Some(id) = queue.pop_front() {
            seen += 1;
            let l = netlist
                .fanins(id)
                .iter()
                .map(|f| level[f.index()])
                .max()
                .map_or(1, |m| m + 1);
            level[id.index()] = l;
            for &o in netlist.fanouts(id) {
                if netlist.node(o).is_lut() {
                    pending[o.index()] -= 1;
                    if pending[o.index()] == 0 {
                        queue.push_back(o);
                    }
                }
            }
        }
        if seen != lut_total {
            let stuck = netlist
                .luts()
                .find(|id| pending[id.index()] > 0)
                .expect("some LUT is left on a cycle");
            return Err(NetlistError::Cycle(netlist.name(stuck).to_string()));
        }
        let mut order: Vec<NodeId> = netlist.luts().collect();
        order.sort_by_key(|id| (level[id.index()], *id));
        Ok(Levels { level, order })
    }

    pub fn level(&self, id: NodeId) -> u32 {
        self.level[id.index()]
    }

    /// LUT nodes in topological order.
    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn max_level(&self) -> u32 {
        self.order.last().map_or(0, |&id| self.level(id))
    }
}

impl Netlist {
    pub fn levels(&self) -> Result<Levels, NetlistError> {
        Levels::compute(self)
    }

    /// LUT nodes ordered so that each appears after all of its LUT fanins.
    pub fn topological_order(&self) -> Result<Vec<NodeId>, NetlistError> {
        Ok(Levels::compute(self)?.order)
    }
}

fn check(netlist: &Netlist, node: NodeId) -> Result<(), NetlistError> {
    if netlist.contains(node) {
        Ok(())
    } else {
        Err(NetlistError::UnknownNode(node.to_string()))
    }
}

/// Transitive fanin of `node` up to `depth` levels (`None` = unbounded).
///
/// The node itself is excluded. Primary inputs and latch outputs reached are
/// included but not expanded.
pub fn tfi(
    netlist: &Netlist,
    node: NodeId,
    depth: Option<usize>,
) -> Result<BTreeSet<NodeId>, NetlistError> {
    check(netlist, node)?;
    let mut out = BTreeSet::new();
    if netlist.node(node).is_comb_source() {
        return Ok(out);
    }
    let mut frontier = vec![node];
    let mut d = 0;
    while !frontier.is_empty() && depth.is_none_or(|lim| d < lim) {
        let mut next = Vec::new();
        for id in frontier {
            for &f in netlist.fanins(id) {
                if out.insert(f) && netlist.node(f).is_lut() {
                    next.push(f);
                }
            }
        }
        frontier = next;
        d += 1;
    }
    Ok(out)
}

/// Transitive fanout of `node` up to `depth` levels (`None` = unbounded).
///
/// Latches reached are included but not expanded.
pub fn tfo(
    netlist: &Netlist,
    node: NodeId,
    depth: Option<usize>,
) -> Result<BTreeSet<NodeId>, NetlistError> {
    check(netlist, node)?;
    let mut out = BTreeSet::new();
    let mut frontier = vec![node];
    let mut d = 0;
    while !frontier.is_empty() && depth.is_none_or(|lim| d < lim) {
        let mut next = Vec::new();
        for id in frontier {
            for &o in netlist.fanouts(id) {
                if out.insert(o) && netlist.node(o).is_lut() {
                    next.push(o);
                }
            }
        }
        frontier = next;
        d += 1;
    }
    Ok(out)
}

/// Maximum fanout-free cone of a LUT: the node plus every LUT whose fanouts
/// all lead into the cone.
pub fn mffc(netlist: &Netlist, node: NodeId) -> Result<BTreeSet<NodeId>, NetlistError> {
    check(netlist, node)?;
    if !netlist.node(node).is_lut() {
        return Err(NetlistError::NotALut(netlist.name(node).to_string()));
    }
    let mut refs: HashMap<NodeId, usize> = HashMap::new();
    let mut cone = BTreeSet::new();
    cone.insert(node);
    let mut stack = vec![node];
    while let Some(id) = stack.pop() {
        for &f in netlist.fanins(id) {
            if !netlist.node(f).is_lut() {
                continue;
            }
            let r = refs
                .entry(f)
                .or_insert_with(|| netlist.fanouts(f).len() + netlist.po_refs(f) as usize);
            *r -= 1;
            if *r == 0 && cone.insert(f) {
                stack.push(f);
            }
        }
    }
    Ok(cone)
}
