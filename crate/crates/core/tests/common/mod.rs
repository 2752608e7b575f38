//! Random instances and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::ops::Range;

use rand::Rng;
use sllresyn::netlist::{LatchElement, LatchInit, Netlist};
use sllresyn::partition::DieAssignment;
use sllresyn::truth_table::TruthTable;

/// Random LUT DAG. Every LUT without fanout becomes an output, plus a few
/// random extra outputs; `latches` registers feed back from late LUTs.
pub fn random_netlist(
    rng: &mut impl Rng,
    pis: usize,
    luts: usize,
    k: usize,
    latches: usize,
) -> Netlist {
    let mut n = Netlist::new("rnd").with_k_max(k.max(2));
    let mut pool = Vec::new();
    for i in 0..pis {
        pool.push(n.add_input(format!("i{i}")).unwrap());
    }
    let mut regs = Vec::new();
    for i in 0..latches {
        let l = n
            .add_latch(
                format!("r{i}"),
                LatchElement {
                    init: LatchInit::Zero,
                    control: None,
                },
                None,
            )
            .unwrap();
        regs.push(l);
        pool.push(l);
    }
    let mut made = Vec::new();
    for j in 0..luts {
        let width = rng.gen_range(1..=k.min(pool.len()));
        let mut fanins = Vec::new();
        while fanins.len() < width {
            let f = pool[rng.gen_range(0..pool.len())];
            if !fanins.contains(&f) {
                fanins.push(f);
            }
        }
        let tt = TruthTable::from_fn(width, |_| rng.gen_bool(0.5));
        let id = n.add_lut(format!("g{j}"), fanins, tt).unwrap();
        pool.push(id);
        made.push(id);
    }
    for &l in &regs {
        let d = made
            .get(rng.gen_range(0..made.len().max(1)))
            .copied()
            .unwrap_or(pool[0]);
        n.set_latch_input(l, d).unwrap();
    }
    for &g in &made {
        if n.fanouts(g).is_empty() || rng.gen_bool(0.1) {
            n.add_output(g).unwrap();
        }
    }
    if n.outputs().is_empty() {
        n.add_output(pool[pool.len() - 1]).unwrap();
    }
    n
}

/// [`random_netlist`] with sizes drawn from the given ranges.
pub fn random_sized(
    rng: &mut impl Rng,
    pis: Range<usize>,
    luts: Range<usize>,
    k: usize,
    latches: Range<usize>,
) -> Netlist {
    let (p, l, r) = (
        rng.gen_range(pis),
        rng.gen_range(luts),
        rng.gen_range(latches),
    );
    random_netlist(rng, p, l, k, r)
}

pub fn random_assignment(rng: &mut impl Rng, n: &Netlist, dies: usize) -> DieAssignment {
    let mut a = DieAssignment::new(dies, n.id_bound());
    for id in n.node_ids() {
        a.set(id, rng.gen_range(0..dies as u32));
    }
    a
}

/// Signal connectivity scraped from BLIF text: `(sink, inputs)` per
/// `.names`/`.latch`, independent of the library's graph.
pub fn blif_edges(text: &str) -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            Some(&".names") => {
                let (sink, ins) = toks[1..].split_last().unwrap();
                out.push((
                    sink.to_string(),
                    ins.iter().map(|s| s.to_string()).collect(),
                ));
            }
            Some(&".latch") => out.push((toks[2].to_string(), vec![toks[1].to_string()])),
            _ => {}
        }
    }
    out
}

/// Cross-die fanin edges counted from BLIF text and a name-to-die map.
pub fn brute_sll_fo(text: &str, die: &HashMap<String, u32>) -> usize {
    blif_edges(text)
        .iter()
        .map(|(sink, ins)| ins.iter().filter(|i| die[*i] != die[sink]).count())
        .sum()
}

/// Per-driver distinct foreign sink dies, from BLIF text.
pub fn brute_sll(text: &str, die: &HashMap<String, u32>) -> usize {
    let mut dests: HashMap<&str, Vec<u32>> = HashMap::new();
    let edges = blif_edges(text);
    for (sink, ins) in &edges {
        for i in ins {
            let v = dests.entry(i.as_str()).or_default();
            if die[sink] != die[i] && !v.contains(&die[sink]) {
                v.push(die[sink]);
            }
        }
    }
    dests.values().map(Vec::len).sum()
}

pub fn die_map(n: &Netlist, a: &DieAssignment) -> HashMap<String, u32> {
    n.node_ids()
        .map(|id| (n.name(id).to_string(), a.die(id)))
        .collect()
}

/// Evaluates every signal of a combinational BLIF by cube matching.
pub fn eval_blif(text: &str, inputs: &HashMap<String, bool>) -> HashMap<String, bool> {
    let mut covers: HashMap<String, (Vec<String>, Vec<String>)> = HashMap::new();
    let mut current: Option<String> = None;
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks[0] == ".names" {
            let (sink, ins) = toks[1..].split_last().unwrap();
            covers.insert(
                sink.to_string(),
                (ins.iter().map(|s| s.to_string()).collect(), Vec::new()),
            );
            current = Some(sink.to_string());
        } else if toks[0].starts_with('.') {
            current = None;
        } else if let Some(c) = &current {
            let cube = if toks.len() == 1 {
                String::new()
            } else {
                toks[0].to_string()
            };
            assert_eq!(
                *toks.last().unwrap(),
                "1",
                "oracle handles on-set covers only"
            );
            covers.get_mut(c).unwrap().1.push(cube);
        }
    }
    let mut vals = inputs.clone();
    fn get(
        name: &str,
        covers: &HashMap<String, (Vec<String>, Vec<String>)>,
        vals: &mut HashMap<String, bool>,
    ) -> bool {
        if let Some(&v) = vals.get(name) {
            return v;
        }
        let (ins, cubes) = &covers[name];
        let iv: Vec<bool> = ins.iter().map(|i| get(i, covers, vals)).collect();
        let v = cubes.iter().any(|cube| {
            cube.chars().zip(&iv).all(|(ch, &b)| match ch {
                '1' => b,
                '0' => !b,
                _ => true,
            })
        });
        vals.insert(name.to_string(), v);
        v
    }
    let names: Vec<String> = covers.keys().cloned().collect();
    for name in names {
        get(&name, &covers, &mut vals);
    }
    vals
}
