//! Cuckoo filter with partial-key cuckoo hashing, a bit-packed table and a
//! keyed (HMAC) insert path.

mod filter;
pub mod hashing;
mod keyed;
mod params;
pub mod wire;

use thiserror::Error;

pub use filter::{CuckooFilter, InsertOutcome, LookupTrace};
pub use hashing::Fingerprint;
pub use keyed::{MacTag, SecretKey, KEY_BYTES, MAC_BYTES};
pub use params::{
    formula_bits_per_item, BucketSizing, FilterParams, TableGeometry, DEFAULT_MAX_KICKS,
    MAX_FINGERPRINT_BITS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("{name} out of range: {value}")]
    InvalidRange { name: &'static str, value: String },
    #[error("malformed filter header: {0}")]
    MalformedHeader(String),
    #[error("truncated filter payload: expected {expected} bytes, got {actual}")]
    TruncatedPayload { expected: u64, actual: u64 },
}

impl FilterError {
    pub(crate) fn invalid(name: &'static str, value: impl std::fmt::Display) -> Self {
        FilterError::InvalidRange {
            name,
            value: value.to_string(),
        }
    }
}
