//! Fiduccia–Mattheyses min-cut bisection, applied recursively for K > 2.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{node_weight, DieAssignment, PartitionConfig, PartitionError};
use crate::netlist::{Netlist, NodeId};

const MAX_PASSES: usize = 64;

/// Flat hypergraph: one net per driver with at least one sink.
struct Hypergraph {
    weight: Vec<u64>,
    cell_nets: Vec<Vec<usize>>,
    net_pins: Vec<Vec<usize>>,
}

impl Hypergraph {
    fn from_netlist(netlist: &Netlist, cells: &[NodeId]) -> Self {
        let mut index = vec![usize::MAX; netlist.id_bound()];
        for (i, id) in cells.iter().enumerate() {
            index[id.index()] = i;
        }
        let mut net_pins = Vec::new();
        let mut cell_nets = vec![Vec::new(); cells.len()];
        for (i, &id) in cells.iter().enumerate() {
            let mut pins = vec![i];
            for &s in netlist.fanouts(id) {
                let j = index[s.index()];
                if j != usize::MAX && !pins.contains(&j) {
                    pins.push(j);
                }
            }
            if pins.len() < 2 {
                continue;
            }
            let n = net_pins.len();
            for &p in &pins {
                cell_nets[p].push(n);
            }
            net_pins.push(pins);
        }
        Hypergraph {
            weight: cells.iter().map(|&id| node_weight(netlist, id)).collect(),
            cell_nets,
            net_pins,
        }
    }
}

struct Bisection<'a> {
    hg: &'a Hypergraph,
    side: Vec<u8>,
    count: Vec<[u32; 2]>,
    part_weight: [u64; 2],
    bound: [u64; 2],
}

impl<'a> Bisection<'a> {
    fn new(hg: &'a Hypergraph, side: Vec<u8>, bound: [u64; 2]) -> Self {
        let mut count = vec![[0u32; 2]; hg.net_pins.len()];
        for (n, pins) in hg.net_pins.iter().enumerate() {
            for &p in pins {
                count[n][side[p] as usize] += 1;
            }
        }
        let mut part_weight = [0u64; 2];
        for (c, &s) in side.iter().enumerate() {
            part_weight[s as usize] += hg.weight[c];
        }
        Bisection {
            hg,
            side,
            count,
            part_weight,
            bound,
        }
    }

    fn gain(&self, c: usize) -> i64 {
        let from = self.side[c] as usize;
        let to = 1 - from;
        let mut g = 0i64;
        for &n in &self.hg.cell_nets[c] {
            if self.count[n][from] == 1 {
                g += 1;
            }
            if self.count[n][to] == 0 {
                g -= 1;
            }
        }
        g
    }

    fn feasible(&self, c: usize) -> bool {
        let to = 1 - self.side[c] as usize;
        self.part_weight[to] + self.hg.weight[c] <= self.bound[to]
    }

    fn apply_move(&mut self, c: usize) {
        let from = self.side[c] as usize;
        let to = 1 - from;
        for &n in &self.hg.cell_nets[c] {
            self.count[n][from] -= 1;
            self.count[n][to] += 1;
        }
        self.side[c] = to as u8;
        self.part_weight[from] -= self.hg.weight[c];
        self.part_weight[to] += self.hg.weight[c];
    }

    /// One FM pass. Returns the cut improvement that was kept (>= 0).
    fn pass(&mut self) -> i64 {
        let cells = self.side.len();
        let mut gain: Vec<i64> = (0..cells).map(|c| self.gain(c)).collect();
        let mut locked = vec![false; cells];
        // Buckets per (source side, zero-weight class), ordered by
        // (descending gain, ascending id). All weighted cells weigh the same,
        // so feasibility only needs checking on the first entry of a bucket.
        let mut buckets: [BTreeSet<(i64, usize)>; 4] = Default::default();
        let slot =
            |this: &Self, c: usize| 2 * this.side[c] as usize + (this.hg.weight[c] == 0) as usize;
        for c in 0..cells {
            buckets[slot(self, c)].insert((-gain[c], c));
        }
        let mut moves = Vec::new();
        let mut total = 0i64;
        let mut best = 0i64;
        let mut best_len = 0usize;

        loop {
            let mut chosen: Option<(i64, usize)> = None;
            for b in &buckets {
                let Some(&first) = b.first() else { continue };
                if !self.feasible(first.1) {
                    continue;
                }
                chosen = match chosen {
                    None => Some(first),
                    Some(cur) if first.0 < cur.0 => Some(first),
                    Some(cur) if first.0 == cur.0 => {
                        // Equal gain: move off the heavier side, then lower id.
                        let heavier = (self.part_weight[1] > self.part_weight[0]) as u8;
                        let key = |c: usize| (self.side[c] != heavier, c);
                        if key(first.1) < key(cur.1) {
                            Some(first)
                        } else {
                            Some(cur)
                        }
                    }
                    keep => keep,
                };
            }
            let Some(chosen) = chosen else { break };
            let c = chosen.1;
            let from = self.side[c] as usize;
            let to = 1 - from;
            buckets[slot(self, c)].remove(&(-gain[c], c));
            locked[c] = true;

            let mut delta: Vec<(usize, i64)> = Vec::new();
            for &n in &self.hg.cell_nets[c] {
                let pins = &self.hg.net_pins[n];
                let [cf, ct] = [self.count[n][from], self.count[n][to]];
                if ct == 0 {
                    for &p in pins {
                        if !locked[p] {
                            delta.push((p, 1));
                        }
                    }
                } else if ct == 1 {
                    for &p in pins {
                        if !locked[p] && self.side[p] as usize == to {
                            delta.push((p, -1));
                        }
                    }
                }
                if cf - 1 == 0 {
                    for &p in pins {
                        if !locked[p] && p != c {
                            delta.push((p, -1));
                        }
                    }
                } else if cf - 1 == 1 {
                    for &p in pins {
                        if !locked[p] && p != c && self.side[p] as usize == from {
                            delta.push((p, 1));
                        }
                    }
                }
            }
            total += gain[c];
            self.apply_move(c);
            for (p, d) in delta {
                let s = slot(self, p);
                buckets[s].remove(&(-gain[p], p));
                gain[p] += d;
                buckets[s].insert((-gain[p], p));
            }
            moves.push(c);
            if total > best {
                best = total;
                best_len = moves.len();
            }
        }
        for &c in moves[best_len..].iter().rev() {
            self.apply_move(c);
        }
        best
    }
}

/// Grows side 0 by breadth-first search from seeded random starts until it
/// reaches `target` weight; everything else goes to side 1.
fn initial_sides(hg: &Hypergraph, target: u64, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let cells = hg.weight.len();
    let mut side = vec![1u8; cells];
    let mut order: Vec<usize> = (0..cells).collect();
    order.shuffle(rng);
    let mut visited = vec![false; cells];
    let mut w = 0u64;
    let mut queue = VecDeque::new();
    'outer: for &start in &order {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            if w + hg.weight[c] > target {
                if w >= target {
                    break 'outer;
                }
                continue;
            }
            side[c] = 0;
            w += hg.weight[c];
            for &n in &hg.cell_nets[c] {
                for &p in &hg.net_pins[n] {
                    if !visited[p] {
                        visited[p] = true;
                        queue.push_back(p);
                    }
                }
            }
        }
    }
    side
}

fn bisect_recursive(
    netlist: &Netlist,
    cells: Vec<NodeId>,
    first_die: u32,
    num_dies: usize,
    capacity: u64,
    rng: &mut ChaCha8Rng,
    out: &mut DieAssignment,
) {
    if num_dies == 1 {
        for id in cells {
            out.set(id, first_die);
        }
        return;
    }
    let left_dies = num_dies / 2;
    let right_dies = num_dies - left_dies;
    let hg = Hypergraph::from_netlist(netlist, &cells);
    let total: u64 = hg.weight.iter().sum();
    let target = (total * left_dies as u64) / num_dies as u64;
    let side = initial_sides(&hg, target, rng);
    let mut bis = Bisection::new(
        &hg,
        side,
        [capacity * left_dies as u64, capacity * right_dies as u64],
    );
    // The BFS start can overshoot the right bound when the left target was
    // rounded down; move zero-gain filler cells left until both bounds hold.
    if bis.part_weight[1] > bis.bound[1] {
        for c in 0..cells.len() {
            if bis.part_weight[1] <= bis.bound[1] {
                break;
            }
            if bis.side[c] == 1 && hg.weight[c] > 0 && bis.feasible(c) {
                bis.apply_move(c);
            }
        }
    }
    for _ in 0..MAX_PASSES {
        if bis.pass() <= 0 {
            break;
        }
    }
    debug_assert!(bis.part_weight[0] <= bis.bound[0] && bis.part_weight[1] <= bis.bound[1]);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (c, id) in cells.into_iter().enumerate() {
        if bis.side[c] == 0 {
            left.push(id);
        } else {
            right.push(id);
        }
    }
    bisect_recursive(netlist, left, first_die, left_dies, capacity, rng, out);
    bisect_recursive(
        netlist,
        right,
        first_die + left_dies as u32,
        right_dies,
        capacity,
        rng,
        out,
    );
}

/// Min-cut partition into `config.num_dies` dies under the imbalance bound.
///
/// Per-die capacity is `floor(UB * |V| / K)`, raised to `ceil(|V| / K)` when
/// integer granularity makes the bound unattainable. Recursive bisection
/// numbers the left half with the lower die indices.
pub fn partition_fm(
    netlist: &Netlist,
    config: &PartitionConfig,
) -> Result<DieAssignment, PartitionError> {
    config.validate()?;
    let k = config.num_dies;
    let cells: Vec<NodeId> = netlist.node_ids().collect();
    let total: u64 = cells.iter().map(|&id| node_weight(netlist, id)).sum();
    if total == 0 {
        return Err(PartitionError::Empty);
    }
    let exact = config.imbalance_upper_bound * total as f64 / k as f64;
    let max_weight = cells
        .iter()
        .map(|&id| node_weight(netlist, id))
        .max()
        .unwrap_or(0);
    if exact < max_weight as f64 {
        return Err(PartitionError::Infeasible {
            ub: config.imbalance_upper_bound,
            capacity: exact,
            max_weight,
        });
    }
    let capacity = (exact.floor() as u64).max(total.div_ceil(k as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = DieAssignment::new(k, netlist.id_bound());
    bisect_recursive(netlist, cells, 0, k, capacity, &mut rng, &mut out);
    Ok(out)
}
