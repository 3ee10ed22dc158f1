use super::FilterError;

/// Relocation bound used when none is given.
pub const DEFAULT_MAX_KICKS: u32 = 500;

/// Widest fingerprint the packed table can hold; slot reads use one unaligned
/// 64-bit load, which leaves 56 usable bits after the sub-byte shift.
pub const MAX_FINGERPRINT_BITS: u32 = 56;

/// Physical shape of a fingerprint table. This is everything a reader needs
/// to interpret a serialized filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableGeometry {
    pub fingerprint_bits: u32,
    pub beta: u32,
    pub bucket_count: u64,
}

impl TableGeometry {
    pub fn slot_count(&self) -> u64 {
        self.bucket_count * self.beta as u64
    }

    pub fn payload_bits(&self) -> u64 {
        self.slot_count() * self.fingerprint_bits as u64
    }

    pub fn payload_bytes(&self) -> u64 {
        self.payload_bits().div_ceil(8)
    }

    /// Low-bit mask for power-of-two tables; meaningless otherwise.
    pub fn index_mask(&self) -> u64 {
        self.bucket_count - 1
    }

    /// Reduces a hash to a bucket index.
    #[inline]
    pub fn reduce(&self, hash: u64) -> u64 {
        if self.bucket_count.is_power_of_two() {
            hash & self.index_mask()
        } else {
            hash % self.bucket_count
        }
    }

    pub fn fingerprint_mask(&self) -> u64 {
        (1u64 << self.fingerprint_bits) - 1
    }

    pub(crate) fn validate(&self) -> Result<(), FilterError> {
        if self.fingerprint_bits == 0 || self.fingerprint_bits > MAX_FINGERPRINT_BITS {
            return Err(FilterError::invalid(
                "fingerprint_bits",
                self.fingerprint_bits,
            ));
        }
        if self.beta == 0 || self.beta > u8::MAX as u32 {
            return Err(FilterError::invalid("beta", self.beta));
        }
        if self.bucket_count == 0 {
            return Err(FilterError::invalid("bucket_count", self.bucket_count));
        }
        Ok(())
    }
}

/// How the bucket count is rounded up from `capacity / (β·α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BucketSizing {
    /// Smallest sufficient power of two; alternate buckets by XOR.
    #[default]
    PowerOfTwo,
    /// Smallest sufficient integer; alternate buckets by `(H'(fp) - i) mod n`.
    Exact,
}

/// Design-time parameters of a cuckoo filter: target false-positive rate,
/// bucket width, load factor and the number of items it must hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub epsilon: f64,
    pub beta: u32,
    pub alpha: f64,
    pub capacity_items: u64,
    pub max_kicks: u32,
    geometry: TableGeometry,
}

impl FilterParams {
    /// Derives the table geometry for the requested targets.
    ///
    /// The fingerprint width is `ceil(log2(1/ε) + log2(2β))` and the bucket
    /// count is the smallest power of two with `bucket_count·β·α ≥ capacity`.
    pub fn derive(
        epsilon: f64,
        beta: u32,
        alpha: f64,
        capacity_items: u64,
    ) -> Result<Self, FilterError> {
        Self::derive_with(
            epsilon,
            beta,
            alpha,
            capacity_items,
            BucketSizing::PowerOfTwo,
        )
    }

    /// As [`derive`](Self::derive), with a choice of bucket-count rounding.
    pub fn derive_with(
        epsilon: f64,
        beta: u32,
        alpha: f64,
        capacity_items: u64,
        sizing: BucketSizing,
    ) -> Result<Self, FilterError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(FilterError::invalid("epsilon", epsilon));
        }
        if beta == 0 || beta > u8::MAX as u32 {
            return Err(FilterError::invalid("beta", beta));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(FilterError::invalid("alpha", alpha));
        }
        if capacity_items == 0 {
            return Err(FilterError::invalid("capacity_items", capacity_items));
        }

        let raw_bits = (1.0 / epsilon).log2() + (2.0 * beta as f64).log2();
        let fingerprint_bits = raw_bits.ceil().max(1.0) as u32;
        if fingerprint_bits > MAX_FINGERPRINT_BITS {
            return Err(FilterError::invalid("epsilon", epsilon));
        }

        let usable_per_bucket = beta as f64 * alpha;
        let bucket_count = match sizing {
            BucketSizing::PowerOfTwo => {
                let mut n: u64 = 1;
                while (n as f64) * usable_per_bucket < capacity_items as f64 {
                    n = n
                        .checked_mul(2)
                        .ok_or_else(|| FilterError::invalid("capacity_items", capacity_items))?;
                }
                n
            }
            BucketSizing::Exact => {
                let mut n = ((capacity_items as f64 / usable_per_bucket).ceil() as u64).max(1);
                while (n as f64) * usable_per_bucket < capacity_items as f64 {
                    n += 1;
                }
                n
            }
        };

        Ok(FilterParams {
            epsilon,
            beta,
            alpha,
            capacity_items,
            max_kicks: DEFAULT_MAX_KICKS,
            geometry: TableGeometry {
                fingerprint_bits,
                beta,
                bucket_count,
            },
        })
    }

    pub fn with_max_kicks(mut self, max_kicks: u32) -> Self {
        self.max_kicks = max_kicks;
        self
    }

    pub fn geometry(&self) -> TableGeometry {
        self.geometry
    }

    pub fn fingerprint_bits(&self) -> u32 {
        self.geometry.fingerprint_bits
    }

    pub fn bucket_count(&self) -> u64 {
        self.geometry.bucket_count
    }

    /// Stored bits per item at full load: `fingerprint_bits / α`.
    pub fn bits_per_item(&self) -> f64 {
        self.geometry.fingerprint_bits as f64 / self.alpha
    }
}

/// Pre-ceiling space cost per item, `(log2(1/ε) + log2(2β)) / α`.
pub fn formula_bits_per_item(epsilon: f64, beta: u32, alpha: f64) -> f64 {
    ((1.0 / epsilon).log2() + (2.0 * beta as f64).log2()) / alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_defaults_give_thirty_bit_fingerprints() {
        let p = FilterParams::derive(1e-8, 4, 0.95, 1).unwrap();
        assert_eq!(p.fingerprint_bits(), 30);
        assert!((p.bits_per_item() - 30.0 / 0.95).abs() < 1e-12);
        assert!((p.bits_per_item() - 31.58).abs() < 0.01);
    }

    #[test]
    fn half_epsilon_single_slot() {
        let p = FilterParams::derive(0.5, 1, 1.0, 1).unwrap();
        assert_eq!(p.fingerprint_bits(), 2);
        assert_eq!(p.bucket_count(), 1);
    }

    #[test]
    fn exact_sizing_is_smallest_sufficient_integer() {
        let p = FilterParams::derive_with(1e-8, 4, 0.95, 21080, BucketSizing::Exact).unwrap();
        // 5547 · 3.8 < 21080 ≤ 5548 · 3.8
        assert_eq!(p.bucket_count(), 5548);
        let one = FilterParams::derive_with(0.01, 4, 0.95, 1, BucketSizing::Exact).unwrap();
        assert_eq!(one.bucket_count(), 1);
    }

    #[test]
    fn bucket_count_is_smallest_sufficient_power_of_two() {
        let p = FilterParams::derive(1e-8, 4, 0.95, 21080).unwrap();
        assert_eq!(p.bucket_count(), 8192);
        // brute force over powers of two
        let smallest = (0..40)
            .map(|e| 1u64 << e)
            .find(|&b| b as f64 * 4.0 * 0.95 >= 21080.0)
            .unwrap();
        assert_eq!(smallest, 8192);
    }

    #[test]
    fn out_of_range_arguments_are_rejected() {
        assert!(FilterParams::derive(0.0, 4, 0.95, 1).is_err());
        assert!(FilterParams::derive(1.0, 4, 0.95, 1).is_err());
        assert!(FilterParams::derive(f64::NAN, 4, 0.95, 1).is_err());
        assert!(FilterParams::derive(0.01, 0, 0.95, 1).is_err());
        assert!(FilterParams::derive(0.01, 4, 0.0, 1).is_err());
        assert!(FilterParams::derive(0.01, 4, 1.01, 1).is_err());
        assert!(FilterParams::derive(0.01, 4, 0.95, 0).is_err());
        assert!(FilterParams::derive(1e-20, 4, 0.95, 1).is_err());
    }

    #[test]
    fn formula_matches_hand_evaluation() {
        let v = formula_bits_per_item(1e-8, 4, 0.95);
        assert!((v - (1e8f64.log2() + 3.0) / 0.95).abs() < 1e-12);
        assert!((v - 31.13).abs() < 0.01);
    }
}
