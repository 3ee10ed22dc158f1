use std::collections::{HashMap, VecDeque};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cuckoo::{SecretKey, KEY_BYTES};
use crate::spectrum::{DeviceCharacteristics, EpochDay, SpectrumDb};

use super::run::{build_filter, FilterConfig, OpCounts};
use super::ProtocolError;

struct Prepared {
    key: SecretKey,
    filter_bytes: Vec<u8>,
    items: u64,
}

/// Keyed filters built ahead of time, `z` per characteristics class, each
/// under its own key. Every key is handed out once.
pub struct KeyPool {
    day: EpochDay,
    slots: HashMap<DeviceCharacteristics, VecDeque<Prepared>>,
    ops: OpCounts,
}

impl KeyPool {
    pub fn precompute(
        db: &SpectrumDb,
        classes: &[DeviceCharacteristics],
        z: usize,
        cfg: &FilterConfig,
        seed: u64,
    ) -> Result<Self, ProtocolError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ops = OpCounts::default();
        let mut slots = HashMap::new();
        for chr in classes {
            chr.validate(&db.grid())?;
            let queue: &mut VecDeque<Prepared> = slots.entry(*chr).or_default();
            for _ in 0..z {
                let mut key = [0u8; KEY_BYTES];
                rng.fill_bytes(&mut key);
                let key = SecretKey::from_bytes(key);
                let filter =
                    build_filter(db.retrieve(chr), cfg, rng.next_u64(), Some(&key), &mut ops)?;
                queue.push_back(Prepared {
                    key,
                    items: filter.item_count(),
                    filter_bytes: filter.to_bytes(),
                });
            }
        }
        Ok(KeyPool {
            day: db.day(),
            slots,
            ops,
        })
    }

    /// Unused filters left for `chr`.
    pub fn remaining(&self, chr: &DeviceCharacteristics) -> usize {
        self.slots.get(chr).map_or(0, VecDeque::len)
    }

    /// Work spent building the pool.
    pub fn precompute_ops(&self) -> OpCounts {
        self.ops
    }

    /// Removes and returns the next key with its serialized filter and item count.
    pub fn take(
        &mut self,
        chr: &DeviceCharacteristics,
        ts: EpochDay,
    ) -> Result<(SecretKey, Vec<u8>, u64), ProtocolError> {
        if ts != self.day {
            return Err(ProtocolError::UnknownDay(ts.0));
        }
        let p = self
            .slots
            .get_mut(chr)
            .and_then(VecDeque::pop_front)
            .ok_or(ProtocolError::PoolExhausted)?;
        Ok((p.key, p.filter_bytes, p.items))
    }
}
