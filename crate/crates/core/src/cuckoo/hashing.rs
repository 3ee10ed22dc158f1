//! Seeded hashing for the filter. Every hash is XXH3-64 keyed by the filter's
//! 64-bit seed; the three uses are separated by a one-byte suffix tag.

use xxhash_rust::xxh3::{xxh3_64_with_seed, Xxh3};

use super::params::TableGeometry;

const FINGERPRINT_TAG: u8 = 0x01;
const ALT_INDEX_TAG: u8 = 0x02;

/// Inputs up to this length are tagged on the stack instead of streamed.
const INLINE_LEN: usize = 128;

/// A non-zero fingerprint. Zero marks an empty slot in the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(u64);

impl Fingerprint {
    /// Wraps a raw value, rejecting the empty-slot sentinel.
    pub fn new(bits: u64) -> Option<Self> {
        (bits != 0).then_some(Fingerprint(bits))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn hash_tagged(data: &[u8], tag: u8, seed: u64) -> u64 {
    if data.len() < INLINE_LEN {
        let mut buf = [0u8; INLINE_LEN];
        buf[..data.len()].copy_from_slice(data);
        buf[data.len()] = tag;
        xxh3_64_with_seed(&buf[..=data.len()], seed)
    } else {
        let mut h = Xxh3::with_seed(seed);
        h.update(data);
        h.update(&[tag]);
        h.digest()
    }
}

/// Primary index hash, `H(item)`.
pub fn item_hash(item: &[u8], seed: u64) -> u64 {
    xxh3_64_with_seed(item, seed)
}

/// Low `fingerprint_bits` of `H(item ‖ 0x01)`, with 0 remapped to 1.
pub fn fingerprint_of(item: &[u8], fingerprint_bits: u32, seed: u64) -> Fingerprint {
    let mask = (1u64 << fingerprint_bits) - 1;
    let raw = hash_tagged(item, FINGERPRINT_TAG, seed) & mask;
    Fingerprint(raw.max(1))
}

/// `H'(fp)`: hash of the fingerprint's little-endian u64 form tagged with 0x02.
pub fn fingerprint_hash(fp: Fingerprint, seed: u64) -> u64 {
    let mut buf = [0u8; 9];
    buf[..8].copy_from_slice(&fp.0.to_le_bytes());
    buf[8] = ALT_INDEX_TAG;
    xxh3_64_with_seed(&buf, seed)
}

/// The other candidate bucket. Applying it twice returns the starting bucket,
/// so a stored fingerprint can be relocated without the original item.
///
/// Power-of-two tables use `i XOR H'(fp)`; other sizes use
/// `(H'(fp) - i) mod bucket_count`, which is also an involution.
#[inline]
pub fn alt_index(index: u64, fp: Fingerprint, geometry: &TableGeometry, seed: u64) -> u64 {
    let h = fingerprint_hash(fp, seed);
    let n = geometry.bucket_count;
    if n.is_power_of_two() {
        (index ^ h) & geometry.index_mask()
    } else {
        let h = h % n;
        if h >= index {
            h - index
        } else {
            h + n - index
        }
    }
}

/// Both candidate buckets `(i1, i2)` for an item with fingerprint `fp`.
pub fn bucket_indexes(
    item: &[u8],
    fp: Fingerprint,
    geometry: &TableGeometry,
    seed: u64,
) -> (u64, u64) {
    let i1 = geometry.reduce(item_hash(item, seed));
    (i1, alt_index(i1, fp, geometry, seed))
}
