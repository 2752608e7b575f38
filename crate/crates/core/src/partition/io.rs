//! Assignment files: one `<node-name> <die>` pair per line, `#` comments.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{DieAssignment, PartitionError};
use crate::netlist::Netlist;

/// Serializes every live node in id order.
pub fn save_assignment(netlist: &Netlist, assignment: &DieAssignment) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# dies {}", assignment.num_dies());
    for id in netlist.node_ids() {
        if let Some(d) = assignment.get(id) {
            let _ = writeln!(s, "{} {}", netlist.name(id), d);
        }
    }
    s
}

/// Parses an assignment file against `netlist`.
///
/// `num_dies` defaults to the `# dies K` header when present, otherwise to
/// one more than the largest die index in the file. Every LUT and latch must
/// be listed. Primary inputs may be omitted: an omitted input joins the die
/// holding most of its sinks (lowest index on ties, die 0 without sinks).
pub fn load_assignment(
    netlist: &Netlist,
    text: &str,
    num_dies: Option<usize>,
) -> Result<DieAssignment, PartitionError> {
    load(netlist, text, num_dies, false)
}

/// Like [`load_assignment`] but skips names absent from `netlist`, for
/// applying an assignment of the original design to a netlist that has
/// since lost nodes to resynthesis.
pub fn load_assignment_subset(
    netlist: &Netlist,
    text: &str,
    num_dies: Option<usize>,
) -> Result<DieAssignment, PartitionError> {
    load(netlist, text, num_dies, true)
}

fn load(
    netlist: &Netlist,
    text: &str,
    num_dies: Option<usize>,
    skip_unknown: bool,
) -> Result<DieAssignment, PartitionError> {
    let mut header_dies = None;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(comment) = raw.trim_start().strip_prefix('#') {
            let mut toks = comment.split_whitespace();
            if toks.next() == Some("dies") {
                header_dies = toks.next().and_then(|t| t.parse::<usize>().ok());
            }
            continue;
        }
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            [] => continue,
            [name, die] => {
                let die: u64 = die.parse().map_err(|_| PartitionError::Syntax { line })?;
                entries.push((line, name.to_string(), die));
            }
            _ => return Err(PartitionError::Syntax { line }),
        }
    }
    let k = num_dies
        .or(header_dies)
        .unwrap_or_else(|| entries.iter().map(|e| e.2 as usize + 1).max().unwrap_or(1));
    let mut a = DieAssignment::new(k, netlist.id_bound());
    let mut seen = HashSet::new();
    for (line, name, die) in entries {
        let id = match netlist.find(&name) {
            Some(id) => id,
            None if skip_unknown => continue,
            None => return Err(PartitionError::UnknownName { line, name }),
        };
        if !seen.insert(id) {
            return Err(PartitionError::Duplicate { line, name });
        }
        if die >= k as u64 {
            return Err(PartitionError::DieOutOfRange {
                line,
                die,
                num_dies: k,
            });
        }
        a.set(id, die as u32);
    }
    for id in netlist.node_ids() {
        if a.get(id).is_some() {
            continue;
        }
        if !netlist.node(id).is_input() {
            return Err(PartitionError::Unassigned(netlist.name(id).to_string()));
        }
        let mut votes = vec![0usize; k];
        for &s in netlist.fanouts(id) {
            if let Some(d) = a.get(s) {
                votes[d as usize] += 1;
            }
        }
        let best = (0..k)
            .max_by_key(|&d| (votes[d], std::cmp::Reverse(d)))
            .unwrap_or(0);
        a.set(id, best as u32);
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truth_table::TruthTable;

    fn small() -> Netlist {
        let mut n = Netlist::new("t");
        let a = n.add_input("a").unwrap();
        let b = n.add_input("b").unwrap();
        let x = n
            .add_lut("x", vec![a, b], TruthTable::from_u64(2, 0b0110))
            .unwrap();
        let y = n
            .add_lut("y", vec![x, b], TruthTable::from_u64(2, 0b1000))
            .unwrap();
        n.add_output(y).unwrap();
        n
    }

    #[test]
    fn round_trip() {
        let n = small();
        let a = DieAssignment::from_names(&n, 2, [("a", 0), ("b", 1), ("x", 0), ("y", 1)]).unwrap();
        let text = save_assignment(&n, &a);
        assert_eq!(load_assignment(&n, &text, None).unwrap(), a);
    }

    #[test]
    fn missing_node_is_named() {
        let n = small();
        let e = load_assignment(&n, "x 0\n", Some(2)).unwrap_err();
        assert_eq!(e, PartitionError::Unassigned("y".to_string()));
    }

    #[test]
    fn die_out_of_range() {
        let n = small();
        let e = load_assignment(&n, "x 0\ny 2\n", Some(2)).unwrap_err();
        assert_eq!(
            e,
            PartitionError::DieOutOfRange {
                line: 2,
                die: 2,
                num_dies: 2
            }
        );
    }

    #[test]
    fn duplicates_and_unknowns() {
        let n = small();
        let e = load_assignment(&n, "x 0\nx 1\ny 0\n", Some(2)).unwrap_err();
        assert!(matches!(e, PartitionError::Duplicate { line: 2, .. }));
        let e = load_assignment(&n, "q 0\n", Some(2)).unwrap_err();
        assert!(matches!(e, PartitionError::UnknownName { line: 1, .. }));
        let e = load_assignment(&n, "x zero\n", Some(2)).unwrap_err();
        assert_eq!(e, PartitionError::Syntax { line: 1 });
    }

    #[test]
    fn omitted_inputs_follow_sinks() {
        let n = small();
        let a = load_assignment(&n, "# dies 2\nx 1\ny 1\n", None).unwrap();
        assert_eq!(a.num_dies(), 2);
        assert_eq!(a.die(n.lookup("a").unwrap()), 1);
        assert_eq!(a.die(n.lookup("b").unwrap()), 1);
    }
}
