use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hashing::{alt_index, bucket_indexes, fingerprint_of, Fingerprint};
use super::keyed::SecretKey;
use super::params::{FilterParams, TableGeometry, DEFAULT_MAX_KICKS};

/// Slack after the packed payload so every slot can be read with one
/// unaligned 8-byte load.
const READ_PAD: usize = 8;

/// Mixed into the hash seed to seed the eviction PRNG.
const EVICTION_STREAM: u64 = 0x6b69_636b_5f72_6e67;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Ok,
    /// Both candidate buckets are full and no relocation path was found
    /// within `max_kicks`. The table is left exactly as it was.
    Full,
}

impl InsertOutcome {
    pub fn is_ok(self) -> bool {
        self == InsertOutcome::Ok
    }
}

/// Which buckets a lookup read, for checking the two-bucket bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LookupTrace {
    pub found: bool,
    pub buckets: [u64; 2],
}

/// Cuckoo filter over a bit-packed bucket table.
///
/// Fingerprints are packed row-major with no per-slot padding: slot `s` of
/// bucket `b` occupies bits `[(b·β + s)·f, (b·β + s + 1)·f)` of the
/// little-endian bit stream. A zero slot is empty.
#[derive(Debug, Clone)]
pub struct CuckooFilter {
    geometry: TableGeometry,
    max_kicks: u32,
    seed: u64,
    table: Vec<u8>,
    item_count: u64,
    kicks: u64,
    rng: ChaCha8Rng,
}

impl CuckooFilter {
    pub fn new(params: &FilterParams, seed: u64) -> Self {
        let mut filter = Self::empty(params.geometry(), seed);
        filter.max_kicks = params.max_kicks;
        filter
    }

    pub(crate) fn empty(geometry: TableGeometry, seed: u64) -> Self {
        let payload = geometry.payload_bytes() as usize;
        CuckooFilter {
            geometry,
            max_kicks: DEFAULT_MAX_KICKS,
            seed,
            table: vec![0u8; payload + READ_PAD],
            item_count: 0,
            kicks: 0,
            rng: ChaCha8Rng::seed_from_u64(seed ^ EVICTION_STREAM),
        }
    }

    pub fn geometry(&self) -> TableGeometry {
        self.geometry
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_kicks(&self) -> u32 {
        self.max_kicks
    }

    pub fn item_count(&self) -> u64 {
        self.item_count
    }

    /// Total relocations performed by successful and failed inserts so far.
    pub fn kicks(&self) -> u64 {
        self.kicks
    }

    pub fn occupancy(&self) -> f64 {
        self.item_count as f64 / self.geometry.slot_count() as f64
    }

    pub(crate) fn payload(&self) -> &[u8] {
        &self.table[..self.table.len() - READ_PAD]
    }

    pub(crate) fn payload_mut(&mut self) -> &mut [u8] {
        let end = self.table.len() - READ_PAD;
        &mut self.table[..end]
    }

    pub(crate) fn set_item_count(&mut self, count: u64) {
        self.item_count = count;
    }

    pub fn fingerprint(&self, item: &[u8]) -> Fingerprint {
        fingerprint_of(item, self.geometry.fingerprint_bits, self.seed)
    }

    pub fn bucket_indexes(&self, item: &[u8]) -> (u64, u64) {
        bucket_indexes(item, self.fingerprint(item), &self.geometry, self.seed)
    }

    #[inline]
    fn bit_offset(&self, bucket: u64, slot: u32) -> u64 {
        (bucket * self.geometry.beta as u64 + slot as u64) * self.geometry.fingerprint_bits as u64
    }

    #[inline]
    pub(crate) fn slot(&self, bucket: u64, slot: u32) -> u64 {
        let bit = self.bit_offset(bucket, slot);
        let byte = (bit >> 3) as usize;
        let word = u64::from_le_bytes(self.table[byte..byte + 8].try_into().unwrap());
        (word >> (bit & 7)) & self.geometry.fingerprint_mask()
    }

    #[inline]
    fn set_slot(&mut self, bucket: u64, slot: u32, value: u64) {
        let bit = self.bit_offset(bucket, slot);
        let byte = (bit >> 3) as usize;
        let shift = bit & 7;
        let mask = self.geometry.fingerprint_mask() << shift;
        let cell: &mut [u8; 8] = (&mut self.table[byte..byte + 8]).try_into().unwrap();
        let word = u64::from_le_bytes(*cell);
        *cell = ((word & !mask) | (value << shift)).to_le_bytes();
    }

    /// Compares every slot of the bucket without early exit.
    #[inline]
    fn bucket_contains(&self, bucket: u64, fp: Fingerprint) -> bool {
        let mut hit = false;
        for s in 0..self.geometry.beta {
            hit |= self.slot(bucket, s) == fp.get();
        }
        hit
    }

    fn try_place(&mut self, bucket: u64, fp: Fingerprint) -> bool {
        for s in 0..self.geometry.beta {
            if self.slot(bucket, s) == 0 {
                self.set_slot(bucket, s, fp.get());
                return true;
            }
        }
        false
    }

    /// Membership test. Always reads both candidate buckets, never more.
    #[inline]
    pub fn lookup(&self, item: &[u8]) -> bool {
        let fp = self.fingerprint(item);
        let (i1, i2) = bucket_indexes(item, fp, &self.geometry, self.seed);
        self.bucket_contains(i1, fp) | self.bucket_contains(i2, fp)
    }

    pub fn lookup_trace(&self, item: &[u8]) -> LookupTrace {
        let fp = self.fingerprint(item);
        let (i1, i2) = bucket_indexes(item, fp, &self.geometry, self.seed);
        LookupTrace {
            found: self.bucket_contains(i1, fp) | self.bucket_contains(i2, fp),
            buckets: [i1, i2],
        }
    }

    pub fn insert(&mut self, item: &[u8]) -> InsertOutcome {
        let fp = self.fingerprint(item);
        let (i1, i2) = bucket_indexes(item, fp, &self.geometry, self.seed);
        self.insert_fingerprint(i1, i2, fp)
    }

    /// Stores `HMAC_key(item)` as the item, so holders of the MAC output can
    /// run a plain [`lookup`](Self::lookup) without the key.
    pub fn keyed_insert(&mut self, key: &SecretKey, item: &[u8]) -> InsertOutcome {
        self.insert(key.mac(item).as_bytes())
    }

    pub fn keyed_lookup(&self, key: &SecretKey, item: &[u8]) -> bool {
        self.lookup(key.mac(item).as_bytes())
    }

    pub(crate) fn insert_fingerprint(
        &mut self,
        i1: u64,
        i2: u64,
        fp: Fingerprint,
    ) -> InsertOutcome {
        if self.try_place(i1, fp) || self.try_place(i2, fp) {
            self.item_count += 1;
            return InsertOutcome::Ok;
        }

        // Random-walk eviction. Every displacement is logged so a failed
        // walk can be undone and no stored fingerprint is lost.
        let mut undo: Vec<(u64, u32, u64)> = Vec::new();
        let mut bucket = if self.rng.gen::<bool>() { i1 } else { i2 };
        let mut carried = fp;
        for _ in 0..self.max_kicks {
            let victim_slot = self.rng.gen_range(0..self.geometry.beta);
            let victim = self.slot(bucket, victim_slot);
            self.set_slot(bucket, victim_slot, carried.get());
            undo.push((bucket, victim_slot, victim));
            self.kicks += 1;

            carried = Fingerprint::new(victim).expect("evicted from a full bucket");
            bucket = alt_index(bucket, carried, &self.geometry, self.seed);
            if self.try_place(bucket, carried) {
                self.item_count += 1;
                return InsertOutcome::Ok;
            }
        }

        for (b, s, old) in undo.into_iter().rev() {
            self.set_slot(b, s, old);
        }
        InsertOutcome::Full
    }
}
