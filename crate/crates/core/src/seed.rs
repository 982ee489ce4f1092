//! Counter-based derivation of sub-seeds from one master seed.
//!
//! Every stochastic stage (noise, split shuffling, random init) gets its own
//! seed derived from `(master, domain, counter)`, so a whole experiment is
//! reproducible byte-for-byte from the master seed alone, and reordering or
//! skipping stages never shifts another stage's stream.

/// SplitMix64 finalizer; good avalanche for cheap key mixing.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive the seed for `(domain, counter)` under a master seed.
pub fn derive_seed(master: u64, domain: &str, counter: u64) -> u64 {
    splitmix64(master ^ fnv1a(domain.as_bytes()) ^ splitmix64(counter))
}
