//! Bit-parallel combinational simulation.
//!
//! Each signal carries a slice of `u64` words, one bit per input vector.
//! Latch outputs are treated as extra inputs and latch data inputs as extra
//! outputs, in the order given by [`Netlist::comb_inputs`] and
//! [`Netlist::comb_outputs`].

use thiserror::Error;

use crate::netlist::{Netlist, NetlistError, NodeId, NodeKind};
use crate::truth_table::VAR_MASKS;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("expected {expected} input values, got {got}")]
    MissingAssignment { expected: usize, got: usize },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Word `word` of the exhaustive enumeration pattern of variable `var`.
/// Minterm `m` lives at bit `m % 64` of word `m / 64`.
pub fn exhaustive_word(var: usize, word: usize) -> u64 {
    if var < 6 {
        VAR_MASKS[var]
    } else if (word >> (var - 6)) & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

/// Mask of valid bits in the last word when enumerating `num_vars` variables.
pub fn exhaustive_tail_mask(num_vars: usize) -> u64 {
    if num_vars >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << num_vars)) - 1
    }
}

pub fn exhaustive_num_words(num_vars: usize) -> usize {
    if num_vars <= 6 {
        1
    } else {
        1 << (num_vars - 6)
    }
}

/// Reusable simulator over a fixed netlist.
pub struct Simulator<'a> {
    netlist: &'a Netlist,
    order: Vec<NodeId>,
    sources: Vec<NodeId>,
    sinks: Vec<(String, NodeId)>,
}

impl<'a> Simulator<'a> {
    pub fn new(netlist: &'a Netlist) -> Result<Self, NetlistError> {
        Ok(Simulator {
            netlist,
            order: netlist.topological_order()?,
            sources: netlist.comb_inputs(),
            sinks: netlist.comb_outputs(),
        })
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    pub fn sinks(&self) -> &[(String, NodeId)] {
        &self.sinks
    }

    /// Simulates `words` words. `source_words[i]` feeds `sources()[i]`.
    /// Returns per-node values indexed by node id (removed nodes stay empty).
    pub fn run(&self, source_words: &[Vec<u64>], words: usize) -> Result<Vec<Vec<u64>>, SimError> {
        if source_words.len() != self.sources.len() {
            return Err(SimError::MissingAssignment {
                expected: self.sources.len(),
                got: source_words.len(),
            });
        }
        let mut values: Vec<Vec<u64>> = vec![Vec::new(); self.netlist.id_bound()];
        for (src, w) in self.sources.iter().zip(source_words) {
            debug_assert_eq!(w.len(), words);
            values[src.index()] = w.clone();
        }
        for &id in &self.order {
            let node = self.netlist.node(id);
            let NodeKind::Lut(tt) = &node.kind else {
                continue;
            };
            let mut out = vec![0u64; words];
            {
                let ins: Vec<&[u64]> = node
                    .fanins
                    .iter()
                    .map(|f| values[f.index()].as_slice())
                    .collect();
                tt.eval_words(&ins, &mut out);
            }
            values[id.index()] = out;
        }
        Ok(values)
    }

    /// Simulates and returns only the sink values, in `sinks()` order.
    pub fn run_sinks(
        &self,
        source_words: &[Vec<u64>],
        words: usize,
    ) -> Result<Vec<Vec<u64>>, SimError> {
        let values = self.run(source_words, words)?;
        Ok(self
            .sinks
            .iter()
            .map(|(_, d)| values[d.index()].clone())
            .collect())
    }
}

/// Simulates one input vector. `assignment` follows [`Netlist::comb_inputs`];
/// the result follows [`Netlist::comb_outputs`].
pub fn simulate(netlist: &Netlist, assignment: &[bool]) -> Result<Vec<bool>, SimError> {
    let sim = Simulator::new(netlist)?;
    let words: Vec<Vec<u64>> = assignment.iter().map(|&b| vec![b as u64]).collect();
    let values = sim.run(&words, 1)?;
    Ok(sim
        .sinks
        .iter()
        .map(|(_, d)| values[d.index()][0] & 1 == 1)
        .collect())
}
