//! Per-die netlists and their reassembly.
//!
//! A signal `x` driven on one die and read on another leaves its source die
//! through a buffer output `__sll_x_out` and enters each reading die as an
//! input `__sll_x_in`. Original input, output and latch names are kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::netlist::{Netlist, NetlistError, NodeId, NodeKind, RESERVED_PREFIX};
use crate::partition::{DieAssignment, PartitionError};
use crate::truth_table::TruthTable;

use super::FlowError;

pub fn export_name(net: &str) -> String {
    format!("{RESERVED_PREFIX}{net}_out")
}

pub fn import_name(net: &str) -> String {
    format!("{RESERVED_PREFIX}{net}_in")
}

fn imported_net(name: &str) -> Option<&str> {
    name.strip_prefix(RESERVED_PREFIX)?.strip_suffix("_in")
}

fn exported_net(name: &str) -> Option<&str> {
    name.strip_prefix(RESERVED_PREFIX)?.strip_suffix("_out")
}

/// One netlist per die, in die order.
pub fn split_per_die(
    netlist: &Netlist,
    assignment: &DieAssignment,
) -> Result<Vec<Netlist>, FlowError> {
    let err = |e: NetlistError| FlowError::split(e);
    netlist.check_reserved_names().map_err(err)?;
    assignment
        .check_total(netlist)
        .map_err(|e: PartitionError| FlowError::split(e))?;
    let k = assignment.num_dies();
    let mut parts: Vec<Netlist> = (0..k)
        .map(|d| {
            let name = if k == 1 {
                netlist.model_name().to_string()
            } else {
                format!("{}_die{d}", netlist.model_name())
            };
            Netlist::new(name).with_k_max(netlist.k_max())
        })
        .collect();
    let mut map: Vec<HashMap<NodeId, NodeId>> = vec![HashMap::new(); k];
    let die = |id: NodeId| assignment.die(id) as usize;

    for &pi in netlist.inputs() {
        let d = die(pi);
        let new = parts[d].add_input(netlist.name(pi)).map_err(err)?;
        map[d].insert(pi, new);
    }
    for l in netlist.latches() {
        let d = die(l);
        let NodeKind::Latch(latch) = &netlist.node(l).kind else {
            unreachable!()
        };
        let new = parts[d]
            .add_latch(netlist.name(l), latch.clone(), None)
            .map_err(err)?;
        map[d].insert(l, new);
    }

    // Resolves `src` as seen from die `d`, creating boundary pins on demand.
    let mut exported: BTreeSet<NodeId> = BTreeSet::new();
    let mut resolve = |parts: &mut Vec<Netlist>,
                       map: &mut Vec<HashMap<NodeId, NodeId>>,
                       src: NodeId,
                       d: usize|
     -> Result<NodeId, FlowError> {
        if let Some(&id) = map[d].get(&src) {
            return Ok(id);
        }
        let s = die(src);
        let net = netlist.name(src);
        if exported.insert(src) {
            let driver = map[s][&src];
            let buf = parts[s]
                .add_lut(export_name(net), vec![driver], TruthTable::var(1, 0))
                .map_err(err)?;
            parts[s].add_output(buf).map_err(err)?;
        }
        let pin = parts[d].add_input(import_name(net)).map_err(err)?;
        map[d].insert(src, pin);
        Ok(pin)
    };

    for id in netlist.topological_order().map_err(err)? {
        let NodeKind::Lut(tt) = &netlist.node(id).kind else {
            continue;
        };
        let d = die(id);
        let mut fanins = Vec::new();
        for &f in netlist.fanins(id) {
            fanins.push(resolve(&mut parts, &mut map, f, d)?);
        }
        let new = parts[d]
            .add_lut(netlist.name(id), fanins, tt.clone())
            .map_err(err)?;
        map[d].insert(id, new);
    }
    for l in netlist.latches() {
        let d = die(l);
        let driver = resolve(&mut parts, &mut map, netlist.fanins(l)[0], d)?;
        let new = map[d][&l];
        parts[d].set_latch_input(new, driver).map_err(err)?;
    }
    for &o in netlist.outputs() {
        let d = die(o);
        let new = map[d][&o];
        parts[d].add_output(new).map_err(err)?;
    }
    Ok(parts)
}

/// Reassembles per-die netlists by joining matching boundary pins.
pub fn stitch(parts: &[Netlist], model_name: &str) -> Result<Netlist, FlowError> {
    let err = |e: NetlistError| FlowError::split(e);
    let k_max = parts
        .iter()
        .map(|p| p.k_max())
        .max()
        .unwrap_or(crate::netlist::DEFAULT_K_MAX);
    let mut out = Netlist::new(model_name).with_k_max(k_max);
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    // Net name seen by a fanin reference in a part.
    let net_of = |p: &Netlist, id: NodeId| -> String {
        let name = p.name(id);
        imported_net(name).unwrap_or(name).to_string()
    };

    for p in parts {
        for &pi in p.inputs() {
            let name = p.name(pi);
            if imported_net(name).is_none() {
                ids.insert(name.to_string(), out.add_input(name).map_err(err)?);
            }
        }
    }
    for p in parts {
        for l in p.latches() {
            let NodeKind::Latch(latch) = &p.node(l).kind else {
                unreachable!()
            };
            let id = out.add_latch(p.name(l), latch.clone(), None).map_err(err)?;
            ids.insert(p.name(l).to_string(), id);
        }
    }

    // LUTs across parts, added once all their fanin nets exist.
    let mut pending: BTreeMap<String, (Vec<String>, TruthTable)> = BTreeMap::new();
    for p in parts {
        for id in p.luts() {
            let name = p.name(id);
            if exported_net(name).is_some() {
                continue;
            }
            let fanins = p.fanins(id).iter().map(|&f| net_of(p, f)).collect();
            pending.insert(
                name.to_string(),
                (fanins, p.node(id).function().unwrap().clone()),
            );
        }
    }
    while !pending.is_empty() {
        let ready: Vec<String> = pending
            .iter()
            .filter(|(_, (f, _))| f.iter().all(|n| ids.contains_key(n)))
            .map(|(n, _)| n.clone())
            .collect();
        if ready.is_empty() {
            let name = pending.keys().next().unwrap().clone();
            return Err(FlowError::split(NetlistError::UndeclaredNet(name)));
        }
        for name in ready {
            let (fanins, tt) = pending.remove(&name).unwrap();
            let fanins = fanins.iter().map(|n| ids[n]).collect();
            ids.insert(name.clone(), out.add_lut(name, fanins, tt).map_err(err)?);
        }
    }

    for p in parts {
        for l in p.latches() {
            let net = net_of(p, p.fanins(l)[0]);
            let driver = *ids
                .get(&net)
                .ok_or_else(|| FlowError::split(NetlistError::UndeclaredNet(net.clone())))?;
            out.set_latch_input(ids[p.name(l)], driver).map_err(err)?;
        }
        for &o in p.outputs() {
            if exported_net(p.name(o)).is_none() {
                out.add_output(ids[p.name(o)]).map_err(err)?;
            }
        }
    }
    out.validate().map_err(err)?;
    Ok(out)
}
