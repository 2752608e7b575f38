//! Dense truth tables for LUT functions.
//!
//! Minterm `m` is indexed so that input `i` contributes bit `i` of `m`
//! (input 0 is the least significant position).

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest LUT width a [`TruthTable`] will accept.
pub const MAX_TT_INPUTS: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruthTable {
    num_inputs: usize,
    words: Vec<u64>,
}

/// Patterns of the first six projection functions within a single word.
pub(crate) const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn num_words(num_inputs: usize) -> usize {
    if num_inputs <= 6 {
        1
    } else {
        1 << (num_inputs - 6)
    }
}

fn tail_mask(num_inputs: usize) -> u64 {
    if num_inputs >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << num_inputs)) - 1
    }
}

impl TruthTable {
    pub fn zero(num_inputs: usize) -> Self {
        assert!(num_inputs <= MAX_TT_INPUTS, "truth table too wide");
        TruthTable {
            num_inputs,
            words: vec![0; num_words(num_inputs)],
        }
    }

    pub fn constant(num_inputs: usize, value: bool) -> Self {
        let mut tt = Self::zero(num_inputs);
        if value {
            tt.words.iter_mut().for_each(|w| *w = u64::MAX);
            tt.mask_tail();
        }
        tt
    }

    /// Projection onto input `var`.
    pub fn var(num_inputs: usize, var: usize) -> Self {
        assert!(var < num_inputs);
        Self::from_fn(num_inputs, |m| (m >> var) & 1 == 1)
    }

    pub fn from_fn(num_inputs: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut tt = Self::zero(num_inputs);
        for m in 0..tt.num_bits() {
            if f(m) {
                tt.set(m, true);
            }
        }
        tt
    }

    /// Builds a table from the low `2^num_inputs` bits of `bits` (`num_inputs <= 6`).
    pub fn from_u64(num_inputs: usize, bits: u64) -> Self {
        assert!(num_inputs <= 6);
        let mut tt = TruthTable {
            num_inputs,
            words: vec![bits],
        };
        tt.mask_tail();
        tt
    }

    /// Parses a bit string written most-significant minterm first, e.g. `"0110"` for XOR2.
    pub fn from_bit_str(num_inputs: usize, s: &str) -> Option<Self> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 1 << num_inputs {
            return None;
        }
        let mut tt = Self::zero(num_inputs);
        for (i, c) in chars.iter().rev().enumerate() {
            match c {
                '0' => {}
                '1' => tt.set(i, true),
                _ => return None,
            }
        }
        Some(tt)
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_bits(&self) -> usize {
        1 << self.num_inputs
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, minterm: usize) -> bool {
        debug_assert!(minterm < self.num_bits());
        (self.words[minterm >> 6] >> (minterm & 63)) & 1 == 1
    }

    pub fn set(&mut self, minterm: usize, value: bool) {
        assert!(minterm < self.num_bits());
        let bit = 1u64 << (minterm & 63);
        if value {
            self.words[minterm >> 6] |= bit;
        } else {
            self.words[minterm >> 6] &= !bit;
        }
    }

    /// Evaluates the function on a vector of input values.
    pub fn eval(&self, inputs: &[bool]) -> bool {
        debug_assert_eq!(inputs.len(), self.num_inputs);
        let m = inputs
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i));
        self.get(m)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_const(&self) -> Option<bool> {
        match self.count_ones() {
            0 => Some(false),
            n if n == self.num_bits() => Some(true),
            _ => None,
        }
    }

    /// Minterms of the on-set in increasing order.
    pub fn on_set(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_bits()).filter(move |&m| self.get(m))
    }

    /// Whether the function actually depends on input `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        (0..self.num_bits())
            .filter(|m| (m >> var) & 1 == 0)
            .any(|m| self.get(m) != self.get(m | (1 << var)))
    }

    /// Re-expresses the function with inputs listed in `order`, so that new
    /// input `i` is old input `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.num_inputs);
        Self::from_fn(self.num_inputs, |m_new| {
            let m_old = order
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &old)| acc | (((m_new >> i) & 1) << old));
            self.get(m_old)
        })
    }

    pub fn complement(&self) -> Self {
        let mut tt = self.clone();
        tt.words.iter_mut().for_each(|w| *w = !*w);
        tt.mask_tail();
        tt
    }

    fn mask_tail(&mut self) {
        let m = tail_mask(self.num_inputs);
        if let Some(w) = self.words.last_mut() {
            *w &= m;
        }
    }

    /// Bit-parallel evaluation of this table over `inputs`, one word slice per input.
    /// All input slices and `out` must have the same length.
    pub fn eval_words(&self, inputs: &[&[u64]], out: &mut [u64]) {
        debug_assert_eq!(inputs.len(), self.num_inputs);
        let k = self.num_inputs;
        if k == 0 {
            let v = if self.get(0) { u64::MAX } else { 0 };
            out.iter_mut().for_each(|w| *w = v);
            return;
        }
        // Constant tables and projections short-circuit the mux tree.
        if let Some(c) = self.is_const() {
            let v = if c { u64::MAX } else { 0 };
            out.iter_mut().for_each(|w| *w = v);
            return;
        }
        let n = 1usize << k;
        let init: Vec<u64> = (0..n)
            .map(|m| if self.get(m) { u64::MAX } else { 0 })
            .collect();
        let mut buf = vec![0u64; n];
        for (w, o) in out.iter_mut().enumerate() {
            buf.copy_from_slice(&init);
            let mut len = n;
            for input in inputs.iter() {
                let x = input[w];
                len >>= 1;
                for j in 0..len {
                    buf[j] = (!x & buf[2 * j]) | (x & buf[2 * j + 1]);
                }
            }
            *o = buf[0];
        }
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}, {})", self.num_inputs, self)
    }
}

/// Most significant minterm first, matching the usual hex/binary notation.
impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in (0..self.num_bits()).rev() {
            f.write_str(if self.get(m) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
