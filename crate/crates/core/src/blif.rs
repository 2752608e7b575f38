//! Reading and writing flat BLIF.
//!
//! Supported: `.model`, `.inputs`, `.outputs`, single-output `.names` with
//! on-set covers, `.latch`, `.end`, `#` comments and `\` continuations.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::netlist::{
    LatchElement, LatchInit, Netlist, NetlistError, NodeId, NodeKind, DEFAULT_K_MAX,
};
use crate::truth_table::{TruthTable, MAX_TT_INPUTS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlifError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    AtLine { line: usize, source: NetlistError },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

fn syntax(line: usize, msg: impl Into<String>) -> BlifError {
    BlifError::Syntax {
        line,
        msg: msg.into(),
    }
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub k_max: usize,
    /// Accept names starting with the reserved inter-die prefix (per-die netlists).
    pub allow_reserved: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            k_max: DEFAULT_K_MAX,
            allow_reserved: false,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct WriteOptions {
    /// Merge on-set minterms into larger cubes instead of one row per minterm.
    pub merge_cubes: bool,
}

struct NamesBlock {
    line: usize,
    inputs: Vec<String>,
    output: String,
    rows: Vec<(usize, Vec<String>)>,
}

struct LatchLine {
    line: usize,
    input: String,
    output: String,
    control: Option<(String, String)>,
    init: LatchInit,
}

enum Item {
    Names(NamesBlock),
    Latch(LatchLine),
}

/// Joins continuation lines and strips comments. Yields (first line number, tokens).
fn logical_lines(text: &str) -> Vec<(usize, Vec<String>)> {
    let mut out = Vec::new();
    let mut acc = String::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if acc.is_empty() {
            start = i + 1;
        }
        let trimmed = line.trim_end();
        if let Some(body) = trimmed.strip_suffix('\\') {
            acc.push_str(body);
            acc.push(' ');
            continue;
        }
        acc.push_str(trimmed);
        let toks: Vec<String> = acc.split_whitespace().map(str::to_string).collect();
        if !toks.is_empty() {
            out.push((start, toks));
        }
        acc.clear();
    }
    let toks: Vec<String> = acc.split_whitespace().map(str::to_string).collect();
    if !toks.is_empty() {
        out.push((start, toks));
    }
    out
}

fn compile_cover(block: &NamesBlock) -> Result<TruthTable, BlifError> {
    let k = block.inputs.len();
    let mut tt = TruthTable::zero(k);
    for (line, row) in &block.rows {
        let (pattern, out) = match (k, row.as_slice()) {
            (0, [o]) => ("", o.as_str()),
            (_, [p, o]) if k > 0 => (p.as_str(), o.as_str()),
            _ => {
                return Err(syntax(
                    *line,
                    format!("malformed cover row for `{}`", block.output),
                ))
            }
        };
        match out {
            "1" => {}
            "0" => {
                return Err(syntax(
                    *line,
                    format!("off-set cover for `{}` is not supported", block.output),
                ))
            }
            _ => {
                return Err(syntax(
                    *line,
                    format!("invalid output value `{out}` for `{}`", block.output),
                ))
            }
        }
        if pattern.chars().count() != k {
            return Err(syntax(
                *line,
                format!(
                    "cover row width {} does not match {} inputs",
                    pattern.len(),
                    k
                ),
            ));
        }
        let mut care = 0usize;
        let mut value = 0usize;
        for (i, c) in pattern.chars().enumerate() {
            match c {
                '0' => care |= 1 << i,
                '1' => {
                    care |= 1 << i;
                    value |= 1 << i;
                }
                '-' => {}
                _ => return Err(syntax(*line, format!("invalid literal `{c}` in cover row"))),
            }
        }
        for m in 0..tt.num_bits() {
            if m & care == value {
                tt.set(m, true);
            }
        }
    }
    Ok(tt)
}

pub fn parse_blif(text: &str, opts: &ParseOptions) -> Result<Netlist, BlifError> {
    let mut model: Option<String> = None;
    let mut inputs: Vec<(usize, String)> = Vec::new();
    let mut outputs: Vec<(usize, String)> = Vec::new();
    let mut items: Vec<Item> = Vec::new();
    let mut in_names = false;

    for (line, toks) in logical_lines(text) {
        let head = toks[0].as_str();
        if !head.starts_with('.') {
            if !in_names {
                return Err(syntax(
                    line,
                    format!("unexpected `{head}` outside a .names cover"),
                ));
            }
            if let Some(Item::Names(b)) = items.last_mut() {
                b.rows.push((line, toks));
            }
            continue;
        }
        in_names = false;
        match head {
            ".model" => {
                if model.is_some() {
                    return Err(syntax(
                        line,
                        "multiple .model sections; only flat single-model BLIF is supported",
                    ));
                }
                model = Some(toks.get(1).cloned().unwrap_or_else(|| "top".to_string()));
            }
            ".inputs" => inputs.extend(toks[1..].iter().map(|t| (line, t.clone()))),
            ".outputs" => outputs.extend(toks[1..].iter().map(|t| (line, t.clone()))),
            ".names" => {
                if toks.len() < 2 {
                    return Err(syntax(line, ".names without an output"));
                }
                let output = toks[toks.len() - 1].clone();
                let ins = toks[1..toks.len() - 1].to_vec();
                items.push(Item::Names(NamesBlock {
                    line,
                    inputs: ins,
                    output,
                    rows: Vec::new(),
                }));
                in_names = true;
            }
            ".latch" => {
                let (control, init) = match toks.len() {
                    3 => (None, LatchInit::Unknown),
                    4 => (None, parse_init(line, &toks[3])?),
                    5 => (Some((toks[3].clone(), toks[4].clone())), LatchInit::Unknown),
                    6 => (
                        Some((toks[3].clone(), toks[4].clone())),
                        parse_init(line, &toks[5])?,
                    ),
                    _ => return Err(syntax(line, "malformed .latch")),
                };
                items.push(Item::Latch(LatchLine {
                    line,
                    input: toks[1].clone(),
                    output: toks[2].clone(),
                    control,
                    init,
                }));
            }
            ".end" => break,
            ".subckt" => {
                return Err(syntax(
                    line,
                    ".subckt is not supported; flatten the design before resynthesis",
                ))
            }
            other => return Err(syntax(line, format!("unsupported directive `{other}`"))),
        }
    }

    let mut n = Netlist::new(model.unwrap_or_else(|| "top".to_string())).with_k_max(opts.k_max);
    let reserved = |line: usize, name: &str| -> Result<(), BlifError> {
        if !opts.allow_reserved && name.starts_with(crate::netlist::RESERVED_PREFIX) {
            return Err(BlifError::AtLine {
                line,
                source: NetlistError::ReservedName(name.to_string()),
            });
        }
        Ok(())
    };
    let at = |line: usize| move |source: NetlistError| BlifError::AtLine { line, source };

    for (line, name) in &inputs {
        reserved(*line, name)?;
        n.add_input(name.clone()).map_err(at(*line))?;
    }
    let mut ids: Vec<NodeId> = Vec::with_capacity(items.len());
    for item in &items {
        let id = match item {
            Item::Names(b) => {
                reserved(b.line, &b.output)?;
                if b.inputs.len() > opts.k_max || b.inputs.len() > MAX_TT_INPUTS {
                    return Err(BlifError::AtLine {
                        line: b.line,
                        source: NetlistError::FaninLimit {
                            node: b.output.clone(),
                            count: b.inputs.len(),
                            k_max: opts.k_max,
                        },
                    });
                }
                let tt = compile_cover(b)?;
                n.add_lut_placeholder(b.output.clone(), tt)
                    .map_err(at(b.line))?
            }
            Item::Latch(l) => {
                reserved(l.line, &l.output)?;
                let latch = LatchElement {
                    init: l.init,
                    control: l.control.clone(),
                };
                n.add_latch(l.output.clone(), latch, None)
                    .map_err(at(l.line))?
            }
        };
        ids.push(id);
    }
    let resolve = |n: &Netlist, line: usize, name: &str| -> Result<NodeId, BlifError> {
        n.find(name).ok_or_else(|| BlifError::AtLine {
            line,
            source: NetlistError::UndeclaredNet(name.to_string()),
        })
    };
    for (item, &id) in items.iter().zip(&ids) {
        match item {
            Item::Names(b) => {
                let fanins = b
                    .inputs
                    .iter()
                    .map(|f| resolve(&n, b.line, f))
                    .collect::<Result<Vec<_>, _>>()?;
                n.connect_checked(id, fanins).map_err(at(b.line))?;
            }
            Item::Latch(l) => {
                let d = resolve(&n, l.line, &l.input)?;
                n.set_latch_input(id, d).map_err(at(l.line))?;
            }
        }
    }
    for (line, name) in &outputs {
        let id = resolve(&n, *line, name)?;
        n.add_output(id).map_err(at(*line))?;
    }
    n.validate()?;
    Ok(n)
}

fn parse_init(line: usize, tok: &str) -> Result<LatchInit, BlifError> {
    LatchInit::from_blif_code(tok)
        .ok_or_else(|| syntax(line, format!("invalid latch init value `{tok}`")))
}

/// Cubes as (care mask, value) pairs covering exactly the on-set.
fn cover_cubes(tt: &TruthTable, merge: bool) -> Vec<(usize, usize)> {
    let full = tt.num_bits() - 1;
    let mut cubes: Vec<(usize, usize)> = tt.on_set().map(|m| (full, m)).collect();
    if !merge {
        return cubes;
    }
    loop {
        let set: BTreeSet<(usize, usize)> = cubes.iter().copied().collect();
        let mut merged_any = false;
        let mut used = BTreeSet::new();
        let mut next = BTreeSet::new();
        for &(care, value) in &cubes {
            for bit in 0..tt.num_inputs() {
                let b = 1 << bit;
                if care & b == 0 || value & b != 0 {
                    continue;
                }
                let partner = (care, value | b);
                if set.contains(&partner) {
                    used.insert((care, value));
                    used.insert(partner);
                    next.insert((care & !b, value));
                    merged_any = true;
                }
            }
        }
        if !merged_any {
            return cubes;
        }
        next.extend(cubes.iter().filter(|c| !used.contains(c)).copied());
        // Drop cubes contained in another cube.
        let all: Vec<(usize, usize)> = next.into_iter().collect();
        cubes = all
            .iter()
            .filter(|&&(c, v)| {
                !all.iter()
                    .any(|&(c2, v2)| (c2, v2) != (c, v) && c2 & c == c2 && v & c2 == v2)
            })
            .copied()
            .collect();
    }
}

pub fn write_blif(netlist: &Netlist, opts: &WriteOptions) -> String {
    let mut s = String::new();
    let _ = writeln!(s, ".model {}", netlist.model_name());
    let join = |ids: &[NodeId]| {
        ids.iter()
            .map(|&i| netlist.name(i))
            .collect::<Vec<_>>()
            .join(" ")
    };
    if !netlist.inputs().is_empty() {
        let _ = writeln!(s, ".inputs {}", join(netlist.inputs()));
    }
    if !netlist.outputs().is_empty() {
        let _ = writeln!(s, ".outputs {}", join(netlist.outputs()));
    }
    let mut latches: Vec<NodeId> = netlist.latches().collect();
    latches.sort_by(|a, b| netlist.name(*a).cmp(netlist.name(*b)));
    for l in latches {
        let node = netlist.node(l);
        let NodeKind::Latch(latch) = &node.kind else {
            unreachable!()
        };
        let _ = write!(s, ".latch {} {}", netlist.name(node.fanins[0]), node.name);
        if let Some((ty, ctrl)) = &latch.control {
            let _ = write!(s, " {ty} {ctrl}");
        }
        let _ = writeln!(s, " {}", latch.init.blif_code());
    }
    let levels = netlist.levels().expect("netlist must be acyclic");
    let mut luts: Vec<NodeId> = netlist.luts().collect();
    luts.sort_by(|a, b| {
        (levels.level(*a), netlist.name(*a)).cmp(&(levels.level(*b), netlist.name(*b)))
    });
    for id in luts {
        let node = netlist.node(id);
        let tt = node.function().unwrap();
        let _ = write!(s, ".names");
        for &f in &node.fanins {
            let _ = write!(s, " {}", netlist.name(f));
        }
        let _ = writeln!(s, " {}", node.name);
        let k = node.fanins.len();
        for (care, value) in cover_cubes(tt, opts.merge_cubes) {
            if k == 0 {
                s.push_str("1\n");
                continue;
            }
            for i in 0..k {
                let c = if care >> i & 1 == 0 {
                    '-'
                } else if value >> i & 1 == 1 {
                    '1'
                } else {
                    '0'
                };
                s.push(c);
            }
            s.push_str(" 1\n");
        }
    }
    s.push_str(".end\n");
    s
}

/// Name-keyed view of a netlist used to compare two netlists structurally.
pub fn structural_signature(netlist: &Netlist) -> HashMap<String, (String, Vec<String>, String)> {
    netlist
        .node_ids()
        .map(|id| {
            let node = netlist.node(id);
            let kind = match &node.kind {
                NodeKind::Input => "input".to_string(),
                NodeKind::Lut(_) => "lut".to_string(),
                NodeKind::Latch(l) => format!("latch{}", l.init.blif_code()),
            };
            let fanins = node
                .fanins
                .iter()
                .map(|&f| netlist.name(f).to_string())
                .collect();
            let func = node.function().map(|t| t.to_string()).unwrap_or_default();
            (node.name.clone(), (kind, fanins, func))
        })
        .collect()
}
