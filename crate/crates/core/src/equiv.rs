//! Combinational equivalence by simulation.
//!
//! Two netlists are compared over their combinational interface: primary
//! inputs and latch outputs as sources, primary outputs and latch inputs as
//! sinks, all matched by name. Small interfaces are enumerated exhaustively,
//! larger ones are sampled with a seeded generator. A random run with `N`
//! vectors misses a mismatch of density `p` with probability `(1 - p)^N`.

use std::collections::{BTreeSet, HashMap};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::Netlist;
use crate::resynth::CarePredicate;
use crate::sim::{
    exhaustive_num_words, exhaustive_tail_mask, exhaustive_word, SimError, Simulator,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquivError {
    #[error("interfaces differ: {0}")]
    InterfaceMismatch(String),
    #[error("exhaustive check over {inputs} inputs exceeds the limit of {limit}")]
    TooManyInputs { inputs: usize, limit: usize },
    #[error("care predicate input `{0}` is not an input of the compared netlists")]
    CareInput(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivMode {
    /// Exhaustive up to `exhaustive_limit` inputs, random above.
    Auto,
    Exhaustive,
    Random,
}

#[derive(Clone, Debug)]
pub struct EquivOptions<'a> {
    pub mode: EquivMode,
    pub seed: u64,
    pub random_vectors: u64,
    pub exhaustive_limit: usize,
    /// Only vectors satisfying this predicate are compared.
    pub care: Option<&'a CarePredicate>,
}

impl Default for EquivOptions<'_> {
    fn default() -> Self {
        EquivOptions {
            mode: EquivMode::Auto,
            seed: 0,
            random_vectors: 100_000,
            exhaustive_limit: 18,
            care: None,
        }
    }
}

/// Sink name with its value in each netlist.
pub type OutputDiff = (String, bool, bool);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Source values in the first netlist's interface order.
    pub inputs: Vec<(String, bool)>,
    /// Sinks that differ, with the value in each netlist.
    pub outputs: Vec<OutputDiff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivVerdict {
    pub mode: EquivMode,
    /// Vectors compared (only those inside the care predicate, if any).
    pub vectors_checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        self.counterexample.is_none()
    }
}

const BATCH_WORDS: usize = 64;

struct Side<'a> {
    sim: Simulator<'a>,
    /// For each source of this side, the index of the matching source of `a`.
    source_map: Vec<usize>,
    /// For each sink of `a`, the index of the matching sink of this side.
    sink_map: Vec<usize>,
}

impl<'a> Side<'a> {
    fn new(
        n: &'a Netlist,
        src_names: &[String],
        sink_names: &[String],
    ) -> Result<Self, EquivError> {
        let sim = Simulator::new(n).map_err(SimError::from)?;
        let src_idx: HashMap<&str, usize> = src_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let source_map = sim.sources().iter().map(|&s| src_idx[n.name(s)]).collect();
        let own_sinks: HashMap<&str, usize> = sim
            .sinks()
            .iter()
            .enumerate()
            .map(|(i, (s, _))| (s.as_str(), i))
            .collect();
        let sink_map = sink_names.iter().map(|s| own_sinks[s.as_str()]).collect();
        Ok(Side {
            sim,
            source_map,
            sink_map,
        })
    }

    fn eval(&self, sources: &[Vec<u64>], words: usize) -> Result<Vec<Vec<u64>>, EquivError> {
        let mine: Vec<Vec<u64>> = self
            .source_map
            .iter()
            .map(|&i| sources[i].clone())
            .collect();
        let out = self.sim.run_sinks(&mine, words)?;
        Ok(self.sink_map.iter().map(|&i| out[i].clone()).collect())
    }
}

fn names<T: Ord + Clone>(v: &[T]) -> BTreeSet<T> {
    v.iter().cloned().collect()
}

fn check_interface(a: &Netlist, b: &Netlist) -> Result<(Vec<String>, Vec<String>), EquivError> {
    let sources = |n: &Netlist| {
        n.comb_inputs()
            .iter()
            .map(|&i| n.name(i).to_string())
            .collect::<Vec<_>>()
    };
    let sinks = |n: &Netlist| {
        n.comb_outputs()
            .into_iter()
            .map(|(s, _)| s)
            .collect::<Vec<_>>()
    };
    let (sa, sb) = (sources(a), sources(b));
    let diff = |x: &BTreeSet<String>, y: &BTreeSet<String>, what: &str| -> Result<(), EquivError> {
        if x != y {
            let only_a: Vec<_> = x.difference(y).cloned().collect();
            let only_b: Vec<_> = y.difference(x).cloned().collect();
            return Err(EquivError::InterfaceMismatch(format!(
                "{what} only in first: {only_a:?}, only in second: {only_b:?}"
            )));
        }
        Ok(())
    };
    let latches = |n: &Netlist| {
        n.latches()
            .map(|l| n.name(l).to_string())
            .collect::<BTreeSet<_>>()
    };
    diff(&latches(a), &latches(b), "latches")?;
    diff(&names(&sa), &names(&sb), "inputs")?;
    let (ka, kb) = (sinks(a), sinks(b));
    diff(&names(&ka), &names(&kb), "outputs")?;
    Ok((sa, ka))
}

struct Checker<'a> {
    src_names: Vec<String>,
    sink_names: Vec<String>,
    a: Side<'a>,
    b: Side<'a>,
    care: Option<(&'a CarePredicate, Vec<usize>)>,
}

impl Checker<'_> {
    /// Mismatch mask and care mask of one batch.
    fn batch(
        &self,
        sources: &[Vec<u64>],
        words: usize,
        tail: u64,
    ) -> Result<(Vec<u64>, Vec<u64>), EquivError> {
        let mut care = vec![u64::MAX; words];
        if let Some((p, idx)) = &self.care {
            let mut k = 0;
            care = p
                .eval_words(words, |_| {
                    let s = sources[idx[k]].as_slice();
                    k += 1;
                    Some(s)
                })
                .expect("care inputs are bound");
        }
        care[words - 1] &= tail;
        let oa = self.a.eval(sources, words)?;
        let ob = self.b.eval(sources, words)?;
        let mut diff = vec![0u64; words];
        for (x, y) in oa.iter().zip(&ob) {
            for w in 0..words {
                diff[w] |= (x[w] ^ y[w]) & care[w];
            }
        }
        Ok((diff, care))
    }

    fn single(&self, v: &[bool]) -> Result<(bool, Vec<OutputDiff>), EquivError> {
        let src: Vec<Vec<u64>> = v.iter().map(|&b| vec![b as u64]).collect();
        let (diff, _) = self.batch(&src, 1, 1)?;
        let oa = self.a.eval(&src, 1)?;
        let ob = self.b.eval(&src, 1)?;
        let outs = self
            .sink_names
            .iter()
            .zip(oa.iter().zip(&ob))
            .filter(|(_, (x, y))| x[0] & 1 != y[0] & 1)
            .map(|(n, (x, y))| (n.clone(), x[0] & 1 == 1, y[0] & 1 == 1))
            .collect();
        Ok((diff[0] & 1 == 1, outs))
    }

    /// Greedily clears set bits while the vector still exposes a mismatch.
    fn minimize(&self, mut v: Vec<bool>) -> Result<Counterexample, EquivError> {
        for i in 0..v.len() {
            if v[i] {
                v[i] = false;
                if !self.single(&v)?.0 {
                    v[i] = true;
                }
            }
        }
        let (_, outputs) = self.single(&v)?;
        Ok(Counterexample {
            inputs: self.src_names.iter().cloned().zip(v).collect(),
            outputs,
        })
    }

    fn extract(sources: &[Vec<u64>], word: usize, bit: u32) -> Vec<bool> {
        sources.iter().map(|s| (s[word] >> bit) & 1 == 1).collect()
    }
}

/// Compares `a` and `b` over their shared interface.
pub fn check_equivalence(
    a: &Netlist,
    b: &Netlist,
    opts: &EquivOptions,
) -> Result<EquivVerdict, EquivError> {
    let (src_names, sink_names) = check_interface(a, b)?;
    let care = match opts.care {
        Some(p) => {
            let pos: HashMap<&str, usize> = src_names
                .iter()
                .enumerate()
                .map(|(i, s)| (s.as_str(), i))
                .collect();
            let idx = p
                .input_names()
                .map(|n| {
                    pos.get(n)
                        .copied()
                        .ok_or_else(|| EquivError::CareInput(n.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some((p, idx))
        }
        None => None,
    };
    let checker = Checker {
        a: Side::new(a, &src_names, &sink_names)?,
        b: Side::new(b, &src_names, &sink_names)?,
        src_names,
        sink_names,
        care,
    };
    let n = checker.src_names.len();
    let mode = match opts.mode {
        EquivMode::Auto if n <= opts.exhaustive_limit => EquivMode::Exhaustive,
        EquivMode::Auto => EquivMode::Random,
        m => m,
    };
    if mode == EquivMode::Exhaustive && n > opts.exhaustive_limit {
        return Err(EquivError::TooManyInputs {
            inputs: n,
            limit: opts.exhaustive_limit,
        });
    }

    let total_words = match mode {
        EquivMode::Exhaustive => exhaustive_num_words(n),
        _ => opts.random_vectors.div_ceil(64) as usize,
    };
    let last_tail = match mode {
        EquivMode::Exhaustive => exhaustive_tail_mask(n),
        _ => match opts.random_vectors % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checked = 0u64;
    let mut start = 0;
    while start < total_words {
        let words = BATCH_WORDS.min(total_words - start);
        let sources: Vec<Vec<u64>> = match mode {
            EquivMode::Exhaustive => (0..n)
                .map(|v| {
                    (start..start + words)
                        .map(|w| exhaustive_word(v, w))
                        .collect()
                })
                .collect(),
            _ => (0..n)
                .map(|_| (0..words).map(|_| rng.next_u64()).collect())
                .collect(),
        };
        let tail = if start + words == total_words {
            last_tail
        } else {
            u64::MAX
        };
        let (diff, care) = checker.batch(&sources, words, tail)?;
        for w in 0..words {
            if diff[w] != 0 {
                checked +=
                    (care[w] & ((1u64 << diff[w].trailing_zeros()) - 1)).count_ones() as u64 + 1;
                let v = Checker::extract(&sources, w, diff[w].trailing_zeros());
                return Ok(EquivVerdict {
                    mode,
                    vectors_checked: checked,
                    counterexample: Some(checker.minimize(v)?),
                });
            }
            checked += care[w].count_ones() as u64;
        }
        start += words;
    }
    Ok(EquivVerdict {
        mode,
        vectors_checked: checked,
        counterexample: None,
    })
}
