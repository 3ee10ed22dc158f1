//! Keys and MACs for the keyed filter. The MAC is HMAC-SHA-256.

use hmac::{Hmac, KeyInit, Mac};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

/// Key length in bytes (κ = 256).
pub const KEY_BYTES: usize = 32;
/// MAC output length in bytes (σ_HMAC).
pub const MAC_BYTES: usize = 32;

/// A κ-bit secret key shared by an SU and the DB for one query round.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SecretKey([u8; KEY_BYTES]);

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SecretKey(id={:016x})", self.key_id())
    }
}

impl SecretKey {
    pub fn from_bytes(bytes: [u8; KEY_BYTES]) -> Self {
        SecretKey(bytes)
    }

    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut bytes = [0u8; KEY_BYTES];
        rng.fill_bytes(&mut bytes);
        SecretKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; KEY_BYTES] {
        &self.0
    }

    /// Public handle for the key: the first 8 bytes of SHA-256(key), read
    /// little-endian.
    pub fn key_id(&self) -> u64 {
        let digest = Sha256::digest(self.0);
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }

    pub fn mac(&self, data: &[u8]) -> MacTag {
        let mut mac = <Hmac<Sha256> as KeyInit>::new_from_slice(&self.0)
            .expect("HMAC accepts any key length");
        mac.update(data);
        MacTag(mac.finalize().into_bytes().into())
    }
}

/// `HMAC_k(y)`, the value an SU sends to the query server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MacTag([u8; MAC_BYTES]);

impl MacTag {
    pub fn as_bytes(&self) -> &[u8; MAC_BYTES] {
        &self.0
    }

    pub fn from_bytes(bytes: [u8; MAC_BYTES]) -> Self {
        MacTag(bytes)
    }
}
