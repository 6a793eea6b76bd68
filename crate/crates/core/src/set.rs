//! Packed vertex-set keys and deterministic hash containers.
//!
//! Every j-set of vertices (1 <= j <= MAX_SET_ARITY) is packed into a `u128`
//! key: the sorted vertices, each stored as `v + 1` in a 21-bit field. This
//! gives canonical, hashable keys for edges, tuples-as-sets and exposure
//! records without allocating.

use std::collections::{HashMap, HashSet};
use std::hash::{BuildHasherDefault, Hasher};

/// Vertices are dense 0-based labels.
pub type Vertex = u32;

/// Bits per packed field; supports labels up to `PACK_MAX_VERTEX`.
const FIELD_BITS: u32 = 21;

/// Largest vertex label a packed set can hold.
pub const PACK_MAX_VERTEX: u32 = (1 << FIELD_BITS) - 2;

/// Largest set arity a `u128` key can hold (6 * 21 = 126 bits).
pub const MAX_SET_ARITY: usize = 6;

/// Canonical packed key of a vertex set.
pub type SetKey = u128;

/// Packs an already strictly ascending slice.
#[inline]
pub fn pack_sorted(vs: &[Vertex]) -> SetKey {
    debug_assert!(vs.len() <= MAX_SET_ARITY);
    debug_assert!(vs.windows(2).all(|w| w[0] < w[1]));
    let mut key: u128 = 0;
    for &v in vs {
        debug_assert!(v <= PACK_MAX_VERTEX);
        key = (key << FIELD_BITS) | (v as u128 + 1);
    }
    key
}

/// Packs an arbitrary slice of distinct vertices (sorts a local copy).
#[inline]
pub fn pack_set(vs: &[Vertex]) -> SetKey {
    let mut buf = [0u32; MAX_SET_ARITY];
    let n = vs.len();
    buf[..n].copy_from_slice(vs);
    buf[..n].sort_unstable();
    pack_sorted(&buf[..n])
}

/// Unpacks a key back into ascending vertices.
pub fn unpack(mut key: SetKey) -> Vec<Vertex> {
    let mut out = Vec::new();
    while key != 0 {
        out.push((key & ((1 << FIELD_BITS) - 1)) as u32 - 1);
        key >>= FIELD_BITS;
    }
    out.reverse();
    out
}

/// Packs `sorted` with one extra vertex merged in.
#[inline]
pub fn pack_sorted_with(sorted: &[Vertex], extra: Vertex) -> SetKey {
    let mut buf = [0u32; MAX_SET_ARITY];
    let n = sorted.len();
    let mut i = 0;
    while i < n && sorted[i] < extra {
        buf[i] = sorted[i];
        i += 1;
    }
    buf[i] = extra;
    buf[i + 1..=n].copy_from_slice(&sorted[i..]);
    pack_sorted(&buf[..=n])
}

/// Multiply-xor hasher (fixed keys, deterministic across runs/platforms).
///
/// Quality is plenty for table use; coin flips use SipHash instead.
#[derive(Default)]
pub struct DetHasher(u64);

impl Hasher for DetHasher {
    #[inline]
    fn finish(&self) -> u64 {
        // final avalanche (splitmix64 tail)
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0 ^ x).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(23);
    }

    #[inline]
    fn write_u128(&mut self, x: u128) {
        self.write_u64(x as u64);
        self.write_u64((x >> 64) as u64);
    }

    #[inline]
    fn write_u32(&mut self, x: u32) {
        self.write_u64(x as u64);
    }

    #[inline]
    fn write_usize(&mut self, x: usize) {
        self.write_u64(x as u64);
    }
}

pub type FastMap<K, V> = HashMap<K, V, BuildHasherDefault<DetHasher>>;
pub type FastSet<K> = HashSet<K, BuildHasherDefault<DetHasher>>;

/// splitmix64 step; used to derive sub-seeds deterministically.
#[inline]
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Enumerates all `k`-subsets of `items`, invoking `f` on each.
pub fn for_each_subset<F: FnMut(&[Vertex])>(items: &[Vertex], k: usize, mut f: F) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0u32; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(idx.iter()) {
            *b = items[i];
        }
        f(&buf);
        // next combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] != pos + items.len() - k {
                break;
            }
        }
        if idx[pos] == pos + items.len() - k {
            return;
        }
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// binomial(n, k) saturating at u128 range for guard arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
