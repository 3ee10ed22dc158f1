//! Filter wire format.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "CKF1"
//!      4     2  version (u16 LE) = 1
//!      6     1  fingerprint_bits
//!      7     1  beta
//!      8     8  bucket_count (u64 LE)
//!     16     8  hash seed (u64 LE)
//!     24     8  zero padding
//!     32     …  packed fingerprints, ceil(bucket_count·β·f / 8) bytes
//! ```

use super::filter::CuckooFilter;
use super::params::TableGeometry;
use super::FilterError;

pub const MAGIC: [u8; 4] = *b"CKF1";
pub const VERSION: u16 = 1;
pub const HEADER_BYTES: usize = 32;

/// Total encoded length for a table of this shape.
pub fn encoded_len(geometry: &TableGeometry) -> u64 {
    HEADER_BYTES as u64 + geometry.payload_bytes()
}

impl CuckooFilter {
    pub fn encoded_len(&self) -> u64 {
        encoded_len(&self.geometry())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.geometry();
        let mut out = Vec::with_capacity(self.encoded_len() as usize);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(g.fingerprint_bits as u8);
        out.push(g.beta as u8);
        out.extend_from_slice(&g.bucket_count.to_le_bytes());
        out.extend_from_slice(&self.seed().to_le_bytes());
        out.resize(HEADER_BYTES, 0);
        out.extend_from_slice(self.payload());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FilterError> {
        if bytes.len() < HEADER_BYTES {
            return Err(FilterError::MalformedHeader(format!(
                "{} bytes is shorter than the {HEADER_BYTES}-byte header",
                bytes.len()
            )));
        }
        if bytes[..4] != MAGIC {
            return Err(FilterError::MalformedHeader("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(FilterError::MalformedHeader(format!(
                "unsupported version {version}"
            )));
        }
        if bytes[24..32].iter().any(|&b| b != 0) {
            return Err(FilterError::MalformedHeader(
                "non-zero header padding".into(),
            ));
        }
        let geometry = TableGeometry {
            fingerprint_bits: bytes[6] as u32,
            beta: bytes[7] as u32,
            bucket_count: u64::from_le_bytes(bytes[8..16].try_into().unwrap()),
        };
        geometry
            .validate()
            .map_err(|e| FilterError::MalformedHeader(e.to_string()))?;
        let seed = u64::from_le_bytes(bytes[16..24].try_into().unwrap());

        let expected = geometry
            .bucket_count
            .checked_mul(geometry.beta as u64)
            .and_then(|s| s.checked_mul(geometry.fingerprint_bits as u64))
            .map(|bits| bits.div_ceil(8))
            .ok_or_else(|| FilterError::MalformedHeader("table size overflows".into()))?;
        let actual = (bytes.len() - HEADER_BYTES) as u64;
        if actual < expected {
            return Err(FilterError::TruncatedPayload { expected, actual });
        }
        if actual > expected {
            return Err(FilterError::MalformedHeader(format!(
                "{} trailing bytes after payload",
                actual - expected
            )));
        }

        let mut filter = CuckooFilter::empty(geometry, seed);
        filter.payload_mut().copy_from_slice(&bytes[HEADER_BYTES..]);
        let mut count = 0;
        for b in 0..geometry.bucket_count {
            for s in 0..geometry.beta {
                count += (filter.slot(b, s) != 0) as u64;
            }
        }
        filter.set_item_count(count);
        Ok(filter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuckoo::FilterParams;

    fn sample() -> CuckooFilter {
        let params = FilterParams::derive(0.01, 4, 0.95, 2000).unwrap();
        let mut f = CuckooFilter::new(&params, 0xabcdef);
        for i in 0..1900u64 {
            assert!(f.insert(&i.to_le_bytes()).is_ok());
        }
        f
    }

    #[test]
    fn round_trip_preserves_lookups() {
        let f = sample();
        let g = CuckooFilter::from_bytes(&f.to_bytes()).unwrap();
        assert_eq!(g.item_count(), f.item_count());
        assert_eq!(g.geometry(), f.geometry());
        for i in 0..10_000u64 {
            assert_eq!(f.lookup(&i.to_le_bytes()), g.lookup(&i.to_le_bytes()));
        }
        assert_eq!(g.to_bytes(), f.to_bytes());
    }

    #[test]
    fn header_layout_is_fixed() {
        let f = sample();
        let bytes = f.to_bytes();
        assert_eq!(&bytes[..4], b"CKF1");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[6] as u32, f.geometry().fingerprint_bits);
        assert_eq!(bytes[7], 4);
        assert_eq!(
            u64::from_le_bytes(bytes[8..16].try_into().unwrap()),
            f.geometry().bucket_count
        );
        assert_eq!(
            u64::from_le_bytes(bytes[16..24].try_into().unwrap()),
            0xabcdef
        );
        assert_eq!(&bytes[24..32], &[0; 8]);
        assert_eq!(bytes.len() as u64, f.encoded_len());
    }

    #[test]
    fn evaluation_sized_filter_length() {
        let g = TableGeometry {
            fingerprint_bits: 30,
            beta: 4,
            bucket_count: 8192,
        };
        assert_eq!(encoded_len(&g), 32 + 122_880);
        assert_eq!(CuckooFilter::empty(g, 0).to_bytes().len(), 32 + 122_880);
    }

    #[test]
    fn corrupted_magic_is_rejected() {
        let mut bytes = sample().to_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            CuckooFilter::from_bytes(&bytes),
            Err(FilterError::MalformedHeader(_))
        ));
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let bytes = sample().to_bytes();
        let cut = &bytes[..bytes.len() - 1];
        assert!(matches!(
            CuckooFilter::from_bytes(cut),
            Err(FilterError::TruncatedPayload { .. })
        ));
        assert!(matches!(
            CuckooFilter::from_bytes(&bytes[..10]),
            Err(FilterError::MalformedHeader(_))
        ));
    }

    #[test]
    fn bad_geometry_is_rejected() {
        let mut bytes = sample().to_bytes();
        bytes[8..16].fill(0);
        assert!(matches!(
            CuckooFilter::from_bytes(&bytes),
            Err(FilterError::MalformedHeader(_))
        ));
        let mut bytes = sample().to_bytes();
        bytes[6] = 0;
        assert!(matches!(
            CuckooFilter::from_bytes(&bytes),
            Err(FilterError::MalformedHeader(_))
        ));
    }
}
