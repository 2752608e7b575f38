use super::DieAssignment;
use crate::netlist::Netlist;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over the UTF-8 bytes of `s`.
pub fn fnv1a64(s: &str) -> u64 {
    s.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Labels each node with `fnv1a64(name) mod K`. Depends only on node names,
/// so identically named logic lands on the same die across LUT mappings.
pub fn partition_hash(netlist: &Netlist, num_dies: usize) -> DieAssignment {
    let mut a = DieAssignment::new(num_dies, netlist.id_bound());
    for id in netlist.node_ids() {
        a.set(id, (fnv1a64(netlist.name(id)) % num_dies as u64) as u32);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64("a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64("foobar"), 0x8594_4171_f739_67e8);
    }
}
