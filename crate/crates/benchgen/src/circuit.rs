//! Gate-level circuit builder with constant folding and structural hashing.

use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sig(pub(crate) u32);

impl Sig {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Signal of gate number `i`.
    pub fn from_index(i: usize) -> Sig {
        Sig(i as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(String),
    Latch {
        name: String,
        init: bool,
    },
    Const(bool),
    Not(Sig),
    And(Sig, Sig),
    Or(Sig, Sig),
    Xor(Sig, Sig),
    /// `s ? t : e`
    Mux(Sig, Sig, Sig),
}

impl Gate {
    pub fn fanins(&self) -> Vec<Sig> {
        match *self {
            Gate::Input(_) | Gate::Latch { .. } | Gate::Const(_) => Vec::new(),
            Gate::Not(a) => vec![a],
            Gate::And(a, b) | Gate::Or(a, b) | Gate::Xor(a, b) => vec![a, b],
            Gate::Mux(s, t, e) => vec![s, t, e],
        }
    }

    pub fn is_source(&self) -> bool {
        matches!(self, Gate::Input(_) | Gate::Latch { .. })
    }

    /// Bitwise evaluation over fanin words.
    pub fn eval(&self, v: &[u64]) -> u64 {
        match self {
            Gate::Input(_) | Gate::Latch { .. } => unreachable!("sources have no function"),
            Gate::Const(b) => {
                if *b {
                    u64::MAX
                } else {
                    0
                }
            }
            Gate::Not(_) => !v[0],
            Gate::And(..) => v[0] & v[1],
            Gate::Or(..) => v[0] | v[1],
            Gate::Xor(..) => v[0] ^ v[1],
            Gate::Mux(..) => (v[0] & v[1]) | (!v[0] & v[2]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Circuit {
    pub name: String,
    pub gates: Vec<Gate>,
    pub outputs: Vec<(String, Sig)>,
    /// `(latch, next-state driver)` pairs.
    pub latch_inputs: Vec<(Sig, Sig)>,
    strash: HashMap<Gate, Sig>,
}

impl Circuit {
    pub fn new(name: impl Into<String>) -> Self {
        Circuit {
            name: name.into(),
            gates: Vec::new(),
            outputs: Vec::new(),
            latch_inputs: Vec::new(),
            strash: HashMap::new(),
        }
    }

    fn push(&mut self, g: Gate) -> Sig {
        if let Some(&s) = self.strash.get(&g) {
            return s;
        }
        let s = Sig(self.gates.len() as u32);
        self.gates.push(g.clone());
        if !g.is_source() {
            self.strash.insert(g, s);
        }
        s
    }

    pub fn gate(&self, s: Sig) -> &Gate {
        &self.gates[s.index()]
    }

    pub fn input(&mut self, name: impl Into<String>) -> Sig {
        self.push(Gate::Input(name.into()))
    }

    pub fn inputs(&mut self, prefix: &str, n: usize) -> Vec<Sig> {
        (0..n).map(|i| self.input(format!("{prefix}{i}"))).collect()
    }

    pub fn latch(&mut self, name: impl Into<String>, init: bool) -> Sig {
        self.push(Gate::Latch {
            name: name.into(),
            init,
        })
    }

    pub fn set_latch_input(&mut self, latch: Sig, driver: Sig) {
        self.latch_inputs.push((latch, driver));
    }

    pub fn output(&mut self, name: impl Into<String>, s: Sig) {
        self.outputs.push((name.into(), s));
    }

    pub fn outputs(&mut self, prefix: &str, sigs: &[Sig]) {
        for (i, &s) in sigs.iter().enumerate() {
            self.output(format!("{prefix}{i}"), s);
        }
    }

    pub fn constant(&mut self, b: bool) -> Sig {
        self.push(Gate::Const(b))
    }

    fn as_const(&self, s: Sig) -> Option<bool> {
        match self.gate(s) {
            Gate::Const(b) => Some(*b),
            _ => None,
        }
    }

    pub fn not(&mut self, a: Sig) -> Sig {
        match self.gate(a) {
            Gate::Const(b) => {
                let b = !*b;
                self.constant(b)
            }
            Gate::Not(x) => *x,
            _ => self.push(Gate::Not(a)),
        }
    }

    pub fn and(&mut self, a: Sig, b: Sig) -> Sig {
        match (self.as_const(a), self.as_const(b)) {
            (Some(false), _) | (_, Some(false)) => self.constant(false),
            (Some(true), _) => b,
            (_, Some(true)) => a,
            _ if a == b => a,
            _ => self.push(Gate::And(a.min(b), a.max(b))),
        }
    }

    pub fn or(&mut self, a: Sig, b: Sig) -> Sig {
        match (self.as_const(a), self.as_const(b)) {
            (Some(true), _) | (_, Some(true)) => self.constant(true),
            (Some(false), _) => b,
            (_, Some(false)) => a,
            _ if a == b => a,
            _ => self.push(Gate::Or(a.min(b), a.max(b))),
        }
    }

    pub fn xor(&mut self, a: Sig, b: Sig) -> Sig {
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), Some(y)) => self.constant(x ^ y),
            (Some(false), _) => b,
            (_, Some(false)) => a,
            (Some(true), _) => self.not(b),
            (_, Some(true)) => self.not(a),
            _ if a == b => self.constant(false),
            _ => self.push(Gate::Xor(a.min(b), a.max(b))),
        }
    }

    pub fn mux(&mut self, s: Sig, t: Sig, e: Sig) -> Sig {
        match self.as_const(s) {
            Some(true) => return t,
            Some(false) => return e,
            None => {}
        }
        if t == e {
            return t;
        }
        match (self.as_const(t), self.as_const(e)) {
            (Some(true), Some(false)) => s,
            (Some(false), Some(true)) => self.not(s),
            (Some(false), _) => {
                let ns = self.not(s);
                self.and(ns, e)
            }
            (Some(true), _) => self.or(s, e),
            (_, Some(false)) => self.and(s, t),
            (_, Some(true)) => {
                let ns = self.not(s);
                self.or(ns, t)
            }
            _ => self.push(Gate::Mux(s, t, e)),
        }
    }

    pub fn maj(&mut self, a: Sig, b: Sig, c: Sig) -> Sig {
        let ab = self.and(a, b);
        let o = self.or(a, b);
        let oc = self.and(o, c);
        self.or(ab, oc)
    }

    pub fn and_all(&mut self, v: &[Sig]) -> Sig {
        self.reduce(v, true, |c, a, b| c.and(a, b))
    }

    pub fn or_all(&mut self, v: &[Sig]) -> Sig {
        self.reduce(v, false, |c, a, b| c.or(a, b))
    }

    pub fn xor_all(&mut self, v: &[Sig]) -> Sig {
        self.reduce(v, false, |c, a, b| c.xor(a, b))
    }

    /// Balanced tree reduction.
    fn reduce(&mut self, v: &[Sig], empty: bool, f: fn(&mut Self, Sig, Sig) -> Sig) -> Sig {
        match v.len() {
            0 => self.constant(empty),
            1 => v[0],
            n => {
                let l = self.reduce(&v[..n / 2], empty, f);
                let r = self.reduce(&v[n / 2..], empty, f);
                f(self, l, r)
            }
        }
    }

    /// Full adder: `(sum, carry)`.
    pub fn full_add(&mut self, a: Sig, b: Sig, c: Sig) -> (Sig, Sig) {
        let ab = self.xor(a, b);
        let s = self.xor(ab, c);
        (s, self.maj(a, b, c))
    }

    /// Ripple-carry addition of equal-width little-endian words.
    pub fn add(&mut self, a: &[Sig], b: &[Sig], cin: Sig) -> (Vec<Sig>, Sig) {
        let mut c = cin;
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let (s, co) = self.full_add(x, y, c);
            out.push(s);
            c = co;
        }
        (out, c)
    }

    /// `a - b` and the no-borrow flag (`a >= b`).
    pub fn sub(&mut self, a: &[Sig], b: &[Sig]) -> (Vec<Sig>, Sig) {
        let nb: Vec<Sig> = b.iter().map(|&x| self.not(x)).collect();
        let one = self.constant(true);
        self.add(a, &nb, one)
    }

    /// `a < b` for unsigned little-endian words.
    pub fn less_than(&mut self, a: &[Sig], b: &[Sig]) -> Sig {
        let (_, geq) = self.sub(a, b);
        self.not(geq)
    }

    pub fn equal(&mut self, a: &[Sig], b: &[Sig]) -> Sig {
        let eq: Vec<Sig> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = self.xor(x, y);
                self.not(d)
            })
            .collect();
        self.and_all(&eq)
    }

    pub fn mux_word(&mut self, s: Sig, t: &[Sig], e: &[Sig]) -> Vec<Sig> {
        t.iter().zip(e).map(|(&x, &y)| self.mux(s, x, y)).collect()
    }

    pub fn zeros(&mut self, n: usize) -> Vec<Sig> {
        let z = self.constant(false);
        vec![z; n]
    }

    /// Unsigned array multiplication; the result has `a.len() + b.len()` bits.
    pub fn multiply(&mut self, a: &[Sig], b: &[Sig]) -> Vec<Sig> {
        let w = a.len() + b.len();
        let mut acc = self.zeros(w);
        for (j, &bj) in b.iter().enumerate() {
            let mut row = self.zeros(w);
            for (i, &ai) in a.iter().enumerate() {
                row[i + j] = self.and(ai, bj);
            }
            let zero = self.constant(false);
            acc = self.add(&acc, &row, zero).0;
        }
        acc
    }

    /// Logical left shift by a little-endian amount, one mux stage per bit.
    pub fn shift_left(&mut self, a: &[Sig], amount: &[Sig]) -> Vec<Sig> {
        let mut cur = a.to_vec();
        for (k, &s) in amount.iter().enumerate() {
            let sh = 1usize << k;
            let z = self.constant(false);
            let shifted: Vec<Sig> = (0..cur.len())
                .map(|i| if i >= sh { cur[i - sh] } else { z })
                .collect();
            cur = self.mux_word(s, &shifted, &cur);
        }
        cur
    }

    /// Arithmetic right shift by a constant.
    pub fn sra_const(&mut self, a: &[Sig], k: usize) -> Vec<Sig> {
        let top = *a.last().unwrap();
        (0..a.len())
            .map(|i| if i + k < a.len() { a[i + k] } else { top })
            .collect()
    }

    /// One-hot grant of the lowest-index set bit.
    pub fn first_one(&mut self, req: &[Sig]) -> Vec<Sig> {
        let mut none_before = self.constant(true);
        let mut out = Vec::with_capacity(req.len());
        for &r in req {
            out.push(self.and(r, none_before));
            let nr = self.not(r);
            none_before = self.and(none_before, nr);
        }
        out
    }

    /// Binary encoding of a one-hot word.
    pub fn encode(&mut self, onehot: &[Sig]) -> Vec<Sig> {
        let bits = usize::BITS as usize - (onehot.len().max(2) - 1).leading_zeros() as usize;
        (0..bits)
            .map(|b| {
                let sel: Vec<Sig> = onehot
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (i >> b) & 1 == 1)
                    .map(|(_, &s)| s)
                    .collect();
                self.or_all(&sel)
            })
            .collect()
    }

    /// Bitwise simulation of all gates for one batch of source words, in
    /// gate order. Latches read `latch_values` in gate order.
    pub fn simulate(&self, input_words: &HashMap<Sig, u64>) -> Vec<u64> {
        let mut v = vec![0u64; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            v[i] = if g.is_source() {
                input_words.get(&Sig(i as u32)).copied().unwrap_or(0)
            } else {
                let ins: Vec<u64> = g.fanins().iter().map(|f| v[f.index()]).collect();
                g.eval(&ins)
            };
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(sigs: &[Sig], vals: &[u64]) -> u64 {
        sigs.iter()
            .enumerate()
            .map(|(i, s)| (vals[s.index()] & 1) << i)
            .sum()
    }

    #[test]
    fn arithmetic_matches_integers() {
        let mut c = Circuit::new("t");
        let a = c.inputs("a", 5);
        let b = c.inputs("b", 5);
        let zero = c.constant(false);
        let (s, co) = c.add(&a, &b, zero);
        let p = c.multiply(&a, &b);
        let lt = c.less_than(&a, &b);
        for x in 0..32u64 {
            for y in 0..32u64 {
                let mut m = HashMap::new();
                for i in 0..5 {
                    m.insert(a[i], (x >> i) & 1);
                    m.insert(b[i], (y >> i) & 1);
                }
                let v = c.simulate(&m);
                assert_eq!(word(&s, &v) + ((v[co.index()] & 1) << 5), x + y);
                assert_eq!(word(&p, &v), x * y);
                assert_eq!(v[lt.index()] & 1 == 1, x < y);
            }
        }
    }

    #[test]
    fn folding_and_hashing() {
        let mut c = Circuit::new("t");
        let a = c.input("a");
        let b = c.input("b");
        assert_eq!(c.and(a, b), c.and(b, a));
        let one = c.constant(true);
        assert_eq!(c.and(a, one), a);
        let na = c.not(a);
        assert_eq!(c.not(na), a);
        assert_eq!(c.xor(a, a), c.constant(false));
    }
}
