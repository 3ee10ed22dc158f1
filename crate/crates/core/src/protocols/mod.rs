//! The three query protocols run over simulated links, with per-party
//! observation ledgers and a privacy audit over them.

mod keypool;
mod ledger;
mod messages;
mod privacy;
mod run;
mod sensing;

use thiserror::Error;

use crate::cuckoo::FilterError;
use crate::spectrum::DbError;

pub use keypool::KeyPool;
pub use ledger::{LedgerEntry, Network, ObservationLedger, PartyId};
pub use messages::{
    decode_frame, encode_frame, Message, MessageKind, CHR_BYTES, FRAME_HEADER_BYTES,
};
pub use privacy::{assert_privacy, shared_probes, PrivacyReport, Violation};
pub use run::{
    expected_outcome, key_exchange, random_cell, run_lpdb, run_lpdb_leakage, run_lpdbqs,
    run_protocol, Decision, Fault, FilterConfig, KeySource, LinkBytes, OpCounts, Outcome,
    ProtocolChoice, ProtocolKind, ProtocolRun, QueryServer, RunOptions, RunStats,
};
pub use sensing::SensingOracle;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("filter full after {inserted} of {required} inserts")]
    FilterCapacity { inserted: u64, required: u64 },
    #[error("protocol order: {0}")]
    Order(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("no ground truth for day {0}")]
    UnknownDay(u64),
    #[error("unknown key id {0:#018x}")]
    UnknownKey(u64),
    #[error("key pool exhausted")]
    PoolExhausted,
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Db(#[from] DbError),
}
