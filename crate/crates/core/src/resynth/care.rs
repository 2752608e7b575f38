//! Observability care sets over window minterms.

use super::window::{Window, WindowSim};
use super::ResynthError;
use crate::netlist::{Netlist, NodeId};
use crate::sim::Simulator;

/// Care minterms of a window, one bit per assignment of `over`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CareSet {
    pub over: Vec<NodeId>,
    pub bits: Vec<u64>,
}

impl CareSet {
    pub fn num_vars(&self) -> usize {
        self.over.len()
    }

    pub fn get(&self, minterm: usize) -> bool {
        (self.bits[minterm / 64] >> (minterm % 64)) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

/// A single-output combinational netlist restricting which input
/// assignments matter. Its inputs are matched to signals by name.
#[derive(Clone, Debug)]
pub struct CarePredicate {
    netlist: Netlist,
}

impl CarePredicate {
    pub fn new(netlist: Netlist) -> Result<Self, ResynthError> {
        if netlist.outputs().len() != 1 {
            return Err(ResynthError::InvalidPredicate(format!(
                "expected exactly one output, found {}",
                netlist.outputs().len()
            )));
        }
        if netlist.latch_count() > 0 {
            return Err(ResynthError::InvalidPredicate(
                "predicate must be combinational".into(),
            ));
        }
        Ok(CarePredicate { netlist })
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }

    pub fn input_names(&self) -> impl Iterator<Item = &str> {
        self.netlist.inputs().iter().map(|&i| self.netlist.name(i))
    }

    /// Evaluates the predicate with each input bound to the named word slice.
    /// Returns `None` when some predicate input has no binding.
    pub fn eval_words<'s>(
        &self,
        words: usize,
        mut binding: impl FnMut(&str) -> Option<&'s [u64]>,
    ) -> Option<Vec<u64>> {
        let mut sources = Vec::new();
        for name in self.input_names() {
            sources.push(binding(name)?.to_vec());
        }
        let sim = Simulator::new(&self.netlist).ok()?;
        sim.run_sinks(&sources, words).ok()?.into_iter().next()
    }

    /// The predicate restricted to the window, if all its inputs are window PIs.
    pub fn on_window(
        &self,
        netlist: &Netlist,
        window: &Window,
        sim: &WindowSim,
    ) -> Option<Vec<u64>> {
        let mut v = self.eval_words(sim.words, |name| {
            let id = netlist.find(name)?;
            if window.pis.contains(&id) {
                sim.value(id)
            } else {
                None
            }
        })?;
        sim.mask_tail(&mut v);
        Some(v)
    }
}

/// Minterms under which toggling the pivot changes at least one window
/// output, intersected with `injected` when it is expressible over the
/// window PIs.
///
/// When a window PI itself depends on the pivot through logic outside the
/// window, every minterm is treated as care.
pub fn extract_care_set(
    netlist: &Netlist,
    window: &Window,
    sim: &WindowSim,
    injected: Option<&CarePredicate>,
) -> Result<CareSet, ResynthError> {
    let mut bits = if window.pi_depends_on_pivot {
        sim.all_ones()
    } else {
        let zero = vec![0u64; sim.words];
        let one = sim.all_ones();
        let out0 = sim.outputs_with_pivot(netlist, window, zero);
        let out1 = sim.outputs_with_pivot(netlist, window, one);
        let mut care = vec![0u64; sim.words];
        for (a, b) in out0.iter().zip(&out1) {
            for ((c, x), y) in care.iter_mut().zip(a).zip(b) {
                *c |= x ^ y;
            }
        }
        care
    };
    if let Some(pred) = injected {
        if let Some(p) = pred.on_window(netlist, window, sim) {
            for (c, m) in bits.iter_mut().zip(&p) {
                *c &= m;
            }
        }
    }
    Ok(CareSet {
        over: window.pis.clone(),
        bits,
    })
}
