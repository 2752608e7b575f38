//! Depth-oriented cut-based mapping of a gate circuit into `k`-input LUTs.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate, Sig};

const CUTS_PER_NODE: usize = 8;
const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

type Cut = Vec<u32>;

fn merge(a: &Cut, b: &Cut, k: usize) -> Option<Cut> {
    let mut out = Vec::with_capacity(k);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(x);
        if out.len() > k {
            return None;
        }
    }
    Some(out)
}

/// A mapped LUT: its root gate, ordered leaves and truth table bits.
#[derive(Clone, Debug)]
pub struct MappedLut {
    pub root: Sig,
    pub leaves: Vec<Sig>,
    pub bits: u64,
}

pub struct Mapping {
    pub luts: Vec<MappedLut>,
}

/// Maps `c` into LUTs with at most `k` inputs (`2 <= k <= 6`).
pub fn map_luts(c: &Circuit, k: usize) -> Mapping {
    assert!((2..=6).contains(&k), "LUT size must be between 2 and 6");
    let n = c.gates.len();
    let mut cuts: Vec<Vec<Cut>> = vec![Vec::new(); n];
    let mut depth = vec![0u32; n];
    for (i, g) in c.gates.iter().enumerate() {
        let me = i as u32;
        if g.is_source() {
            cuts[i] = vec![vec![me]];
            continue;
        }
        if let Gate::Const(_) = g {
            cuts[i] = vec![Vec::new()];
            continue;
        }
        let fanins = g.fanins();
        let mut acc: Vec<Cut> = vec![Vec::new()];
        for f in &fanins {
            let mut next = BTreeSet::new();
            for a in &acc {
                for b in &cuts[f.index()] {
                    if let Some(m) = merge(a, b, k) {
                        next.insert(m);
                    }
                }
            }
            acc = next.into_iter().collect();
        }
        let d = |cut: &Cut| 1 + cut.iter().map(|&l| depth[l as usize]).max().unwrap_or(0);
        acc.sort_by_key(|cut| (d(cut), cut.len(), cut.clone()));
        acc.truncate(CUTS_PER_NODE);
        depth[i] = acc.first().map_or(1, d);
        if !acc.iter().any(|cut| cut == &vec![me]) {
            acc.push(vec![me]);
        }
        cuts[i] = acc;
    }

    let mut required = BTreeSet::new();
    let mut stack: Vec<Sig> = c
        .outputs
        .iter()
        .map(|o| o.1)
        .chain(c.latch_inputs.iter().map(|l| l.1))
        .collect();
    while let Some(s) = stack.pop() {
        let g = c.gate(s);
        if g.is_source() || !required.insert(s) {
            continue;
        }
        for &l in &cuts[s.index()][0] {
            stack.push(Sig(l));
        }
    }
    let luts = required
        .into_iter()
        .map(|root| {
            let leaves: Vec<Sig> = cuts[root.index()][0].iter().map(|&l| Sig(l)).collect();
            let bits = cone_function(c, root, &leaves);
            MappedLut { root, leaves, bits }
        })
        .collect();
    Mapping { luts }
}

fn cone_function(c: &Circuit, root: Sig, leaves: &[Sig]) -> u64 {
    let mut memo: HashMap<Sig, u64> = leaves
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, VAR_MASKS[i]))
        .collect();
    fn eval(c: &Circuit, s: Sig, memo: &mut HashMap<Sig, u64>) -> u64 {
        if let Some(&v) = memo.get(&s) {
            return v;
        }
        let g = c.gate(s);
        let ins: Vec<u64> = g.fanins().iter().map(|&f| eval(c, f, memo)).collect();
        let v = g.eval(&ins);
        memo.insert(s, v);
        v
    }
    let v = eval(c, root, &mut memo);
    let width = 1u32 << leaves.len();
    if width == 64 {
        v
    } else {
        v & ((1u64 << width) - 1)
    }
}

fn gate_name(c: &Circuit, s: Sig) -> String {
    match c.gate(s) {
        Gate::Input(n) => n.clone(),
        Gate::Latch { name, .. } => name.clone(),
        _ => format!("n{}", s.index()),
    }
}

fn write_names(out: &mut String, inputs: &[String], name: &str, bits: u64) {
    let _ = write!(out, ".names");
    for i in inputs {
        let _ = write!(out, " {i}");
    }
    let _ = writeln!(out, " {name}");
    for m in 0..(1u64 << inputs.len()) {
        if (bits >> m) & 1 == 1 {
            let row: String = (0..inputs.len())
                .map(|i| if (m >> i) & 1 == 1 { '1' } else { '0' })
                .collect();
            if row.is_empty() {
                let _ = writeln!(out, "1");
            } else {
                let _ = writeln!(out, "{row} 1");
            }
        }
    }
}

/// Maps `c` into `k`-LUTs and renders the result as BLIF.
pub fn to_blif(c: &Circuit, k: usize) -> String {
    let mapping = map_luts(c, k);
    let mut names: HashMap<Sig, String> = HashMap::new();
    for (i, _) in c.gates.iter().enumerate() {
        names.insert(Sig(i as u32), gate_name(c, Sig(i as u32)));
    }
    // Outputs name their driving LUT when it is free; otherwise a buffer
    // carries the output name.
    let lut_roots: BTreeSet<Sig> = mapping.luts.iter().map(|l| l.root).collect();
    let mut claimed: BTreeSet<Sig> = BTreeSet::new();
    let mut buffers: Vec<(String, Sig)> = Vec::new();
    let latch_drivers: BTreeSet<Sig> = c.latch_inputs.iter().map(|l| l.1).collect();
    for (name, s) in &c.outputs {
        if lut_roots.contains(s) && !latch_drivers.contains(s) && claimed.insert(*s) {
            names.insert(*s, name.clone());
        } else {
            buffers.push((name.clone(), *s));
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, ".model {}", c.name);
    let inputs: Vec<String> = c
        .gates
        .iter()
        .filter_map(|g| match g {
            Gate::Input(n) => Some(n.clone()),
            _ => None,
        })
        .collect();
    let _ = writeln!(out, ".inputs {}", inputs.join(" "));
    let outs: Vec<&str> = c.outputs.iter().map(|o| o.0.as_str()).collect();
    let _ = writeln!(out, ".outputs {}", outs.join(" "));
    for &(latch, driver) in &c.latch_inputs {
        let Gate::Latch { name, init } = c.gate(latch) else {
            panic!("latch input set on a non-latch gate")
        };
        let _ = writeln!(out, ".latch {} {} {}", names[&driver], name, *init as u8);
    }
    for lut in &mapping.luts {
        let ins: Vec<String> = lut.leaves.iter().map(|l| names[l].clone()).collect();
        write_names(&mut out, &ins, &names[&lut.root], lut.bits);
    }
    for (name, s) in buffers {
        match c.gate(s) {
            Gate::Const(b) => write_names(&mut out, &[], &name, *b as u64),
            _ => write_names(&mut out, &[names[&s].clone()], &name, 0b10),
        }
    }
    let _ = writeln!(out, ".end");
    out
}
