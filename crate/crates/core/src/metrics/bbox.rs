//! Bounding-box wirelength cost over a supplied placement.
//!
//! Dies are stacked by index: die `d + 1` sits directly above die `d`, so a
//! net leaving die `d` upward crosses at its top row and downward at row 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{count_sll, MetricsError};
use crate::netlist::{Netlist, NodeId};
use crate::partition::DieAssignment;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DieGeometry {
    pub width: i64,
    pub height: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlacementData {
    pub coords: HashMap<String, (i64, i64, u32)>,
    pub geometry: DieGeometry,
    /// Length of one interposer link in tile units.
    pub l_sll: f64,
    /// Weight by terminal count; missing counts use the nearest smaller
    /// entry, and 1.0 below the first entry.
    pub q_table: BTreeMap<usize, f64>,
}

impl PlacementData {
    pub fn new(geometry: DieGeometry, l_sll: f64) -> Result<Self, MetricsError> {
        if l_sll.is_nan() || l_sll <= 0.0 {
            return Err(MetricsError::InvalidLinkLength(l_sll));
        }
        Ok(PlacementData {
            coords: HashMap::new(),
            geometry,
            l_sll,
            q_table: BTreeMap::new(),
        })
    }

    pub fn place(
        &mut self,
        block: impl Into<String>,
        x: i64,
        y: i64,
        die: u32,
    ) -> Result<(), MetricsError> {
        let block = block.into();
        let g = self.geometry;
        if x < 0 || y < 0 || x >= g.width || y >= g.height {
            return Err(MetricsError::OutOfBounds {
                block,
                x,
                y,
                width: g.width,
                height: g.height,
            });
        }
        self.coords.insert(block, (x, y, die));
        Ok(())
    }

    pub fn q(&self, terminals: usize) -> f64 {
        self.q_table
            .range(..=terminals)
            .next_back()
            .map_or(1.0, |(_, &v)| v)
    }

    fn get(&self, netlist: &Netlist, id: NodeId) -> Result<(i64, i64, u32), MetricsError> {
        let name = netlist.name(id);
        self.coords
            .get(name)
            .copied()
            .ok_or_else(|| MetricsError::Unplaced(name.to_string()))
    }
}

/// Half-perimeter of the bounding box of `points`; 0 for fewer than two.
pub fn hpwl(points: &[(i64, i64)]) -> i64 {
    let Some(&(x0, y0)) = points.first() else {
        return 0;
    };
    let (mut lx, mut hx, mut ly, mut hy) = (x0, x0, y0, y0);
    for &(x, y) in points {
        lx = lx.min(x);
        hx = hx.max(x);
        ly = ly.min(y);
        hy = hy.max(y);
    }
    (hx - lx) + (hy - ly)
}

/// Driver followed by its sinks, for every node that drives something.
fn nets(netlist: &Netlist) -> impl Iterator<Item = Vec<NodeId>> + '_ {
    netlist
        .node_ids()
        .filter(|&id| !netlist.fanouts(id).is_empty())
        .map(move |id| {
            let mut t = vec![id];
            t.extend(netlist.fanouts(id).iter().copied());
            t
        })
}

/// Weighted HPWL of the nets whose terminals are all placed on `die`.
pub fn bbox_cost_sd(
    netlist: &Netlist,
    placement: &PlacementData,
    die: u32,
) -> Result<f64, MetricsError> {
    let mut cost = 0.0;
    for net in nets(netlist) {
        let mut pts = Vec::with_capacity(net.len());
        let mut local = true;
        for &t in &net {
            let (x, y, d) = placement.get(netlist, t)?;
            local &= d == die;
            pts.push((x, y));
        }
        if local {
            cost += placement.q(pts.len()) * hpwl(&pts) as f64;
        }
    }
    Ok(cost)
}

/// Multi-die cost: intra-die HPWL on every die, die-local boxes for nets
/// that span dies, and `N_sll * l_sll` for the interposer links.
///
/// Each die-local box of a spanning net gets a virtual terminal at the
/// crossing column (lower median of the net's terminal x, clamped to the
/// die) on the top row when the net continues to a higher die and on row 0
/// when it continues to a lower one.
pub fn bbox_cost_md(
    netlist: &Netlist,
    placement: &PlacementData,
    assignment: &DieAssignment,
) -> Result<f64, MetricsError> {
    assignment.check_total(netlist)?;
    for id in netlist.node_ids() {
        if netlist.fanouts(id).is_empty() && netlist.fanins(id).is_empty() {
            continue;
        }
        let (_, _, placed) = placement.get(netlist, id)?;
        let assigned = assignment.die(id);
        if placed != assigned {
            return Err(MetricsError::DieMismatch {
                block: netlist.name(id).to_string(),
                placed,
                assigned,
            });
        }
    }
    let g = placement.geometry;
    let mut cost = 0.0;
    for net in nets(netlist) {
        let mut by_die: BTreeMap<u32, Vec<(i64, i64)>> = BTreeMap::new();
        let mut xs = Vec::with_capacity(net.len());
        for &t in &net {
            let (x, y, d) = placement.get(netlist, t)?;
            by_die.entry(d).or_default().push((x, y));
            xs.push(x);
        }
        if by_die.len() == 1 {
            let pts = by_die.into_values().next().unwrap();
            cost += placement.q(pts.len()) * hpwl(&pts) as f64;
            continue;
        }
        xs.sort_unstable();
        let cross_x = xs[(xs.len() - 1) / 2].clamp(0, g.width - 1);
        let dies: BTreeSet<u32> = by_die.keys().copied().collect();
        let (lo, hi) = (*dies.first().unwrap(), *dies.last().unwrap());
        for (d, mut pts) in by_die {
            if d < hi {
                pts.push((cross_x, g.height - 1));
            }
            if d > lo {
                pts.push((cross_x, 0));
            }
            cost += placement.q(pts.len()) * hpwl(&pts) as f64;
        }
    }
    Ok(cost + count_sll(netlist, assignment)? as f64 * placement.l_sll)
}

fn syntax(line: usize, msg: impl Into<String>) -> MetricsError {
    MetricsError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses `<block> <x> <y> <die>` lines (`#` starts a comment).
pub fn load_placement(
    text: &str,
    geometry: DieGeometry,
    l_sll: f64,
) -> Result<PlacementData, MetricsError> {
    let mut p = PlacementData::new(geometry, l_sll)?;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [name, x, y, die] => {
                let x = x.parse().map_err(|_| syntax(line, "bad x coordinate"))?;
                let y = y.parse().map_err(|_| syntax(line, "bad y coordinate"))?;
                let die = die.parse().map_err(|_| syntax(line, "bad die index"))?;
                if p.coords.contains_key(*name) {
                    return Err(syntax(line, format!("block `{name}` placed twice")));
                }
                p.place(*name, x, y, die)?;
            }
            _ => return Err(syntax(line, "expected `<block> <x> <y> <die>`")),
        }
    }
    Ok(p)
}

/// Parses `<terminal-count> <factor>` lines.
pub fn load_q_table(text: &str) -> Result<BTreeMap<usize, f64>, MetricsError> {
    let mut q = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [n, f] => {
                let n: usize = n.parse().map_err(|_| syntax(line, "bad terminal count"))?;
                let f: f64 = f.parse().map_err(|_| syntax(line, "bad factor"))?;
                q.insert(n, f);
            }
            _ => return Err(syntax(line, "expected `<terminals> <factor>`")),
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hpwl_hand_values() {
        assert_eq!(hpwl(&[(0, 0), (3, 4)]), 7);
        assert_eq!(hpwl(&[(0, 0), (2, 1), (1, 5)]), 7);
        assert_eq!(hpwl(&[(5, 5)]), 0);
        assert_eq!(hpwl(&[]), 0);
    }

    #[test]
    fn q_lookup_falls_back() {
        let mut p = PlacementData::new(
            DieGeometry {
                width: 4,
                height: 4,
            },
            1.0,
        )
        .unwrap();
        assert_eq!(p.q(7), 1.0);
        p.q_table.insert(3, 1.5);
        p.q_table.insert(10, 2.0);
        assert_eq!(p.q(2), 1.0);
        assert_eq!(p.q(3), 1.5);
        assert_eq!(p.q(9), 1.5);
        assert_eq!(p.q(50), 2.0);
    }

    #[test]
    fn placement_file_errors() {
        let g = DieGeometry {
            width: 4,
            height: 4,
        };
        assert!(matches!(
            load_placement("a 1 1\n", g, 1.0),
            Err(MetricsError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            load_placement("a 9 1 0\n", g, 1.0),
            Err(MetricsError::OutOfBounds { .. })
        ));
        assert!(matches!(
            load_placement("", g, 0.0),
            Err(MetricsError::InvalidLinkLength(_))
        ));
        let p = load_placement("# c\na 1 2 0\nb 3 3 1 # tail\n", g, 2.0).unwrap();
        assert_eq!(p.coords["b"], (3, 3, 1));
    }
}
