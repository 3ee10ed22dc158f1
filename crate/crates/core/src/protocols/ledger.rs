use std::collections::BTreeMap;
use std::fmt;

use super::messages::{decode_frame, encode_frame, Message, MessageKind};
use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartyId {
    Su(u32),
    Db,
    Qp,
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Su(i) => write!(f, "SU{i}"),
            PartyId::Db => f.write_str("DB"),
            PartyId::Qp => f.write_str("QP"),
        }
    }
}

/// One received message as the receiver saw it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub from: PartyId,
    pub to: PartyId,
    pub kind: MessageKind,
    pub payload: Vec<u8>,
    pub byte_len: u64,
}

/// Append-only history of everything a party received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationLedger {
    owner: PartyId,
    entries: Vec<LedgerEntry>,
}

impl ObservationLedger {
    pub fn new(owner: PartyId) -> Self {
        ObservationLedger {
            owner,
            entries: Vec::new(),
        }
    }

    pub fn owner(&self) -> PartyId {
        self.owner
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn append(&mut self, entry: LedgerEntry) {
        debug_assert_eq!(entry.to, self.owner);
        debug_assert_eq!(entry.byte_len, entry.payload.len() as u64);
        self.entries.push(entry);
    }

    /// Total payload bytes received from `from`.
    pub fn bytes_from(&self, from: PartyId) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.from == from)
            .map(|e| e.byte_len)
            .sum()
    }
}

/// Simulated point-to-point links between the parties of one run.
///
/// Each send is framed, delivered, de-framed by the receiver and appended to
/// the receiver's ledger. Link totals count payload bytes; the 5-byte frame
/// headers are tallied separately.
#[derive(Debug, Clone)]
pub struct Network {
    ledgers: BTreeMap<PartyId, ObservationLedger>,
    link_bytes: BTreeMap<(PartyId, PartyId), u64>,
    frame_overhead: u64,
}

impl Network {
    pub fn new(parties: &[PartyId]) -> Self {
        Network {
            ledgers: parties
                .iter()
                .map(|&p| (p, ObservationLedger::new(p)))
                .collect(),
            link_bytes: BTreeMap::new(),
            frame_overhead: 0,
        }
    }

    /// Sends raw payload bytes under `kind`, returning what the receiver got.
    pub fn send_raw(
        &mut self,
        from: PartyId,
        to: PartyId,
        kind: MessageKind,
        payload: Vec<u8>,
    ) -> Result<Vec<u8>, ProtocolError> {
        let frame = encode_frame(kind, &payload);
        let (kind, delivered) = decode_frame(&frame)?;
        let ledger = self
            .ledgers
            .get_mut(&to)
            .ok_or_else(|| ProtocolError::Order(format!("{to} is not part of this run")))?;
        let byte_len = delivered.len() as u64;
        ledger.append(LedgerEntry {
            from,
            to,
            kind,
            payload: delivered.to_vec(),
            byte_len,
        });
        *self.link_bytes.entry((from, to)).or_default() += byte_len;
        self.frame_overhead += (frame.len() - delivered.len()) as u64;
        Ok(delivered.to_vec())
    }

    pub fn send(
        &mut self,
        from: PartyId,
        to: PartyId,
        msg: &Message,
    ) -> Result<Vec<u8>, ProtocolError> {
        self.send_raw(from, to, msg.kind(), msg.encode_payload())
    }

    pub fn link_bytes(&self, from: PartyId, to: PartyId) -> u64 {
        self.link_bytes.get(&(from, to)).copied().unwrap_or(0)
    }

    pub fn frame_overhead(&self) -> u64 {
        self.frame_overhead
    }

    pub fn ledger(&self, party: PartyId) -> Option<&ObservationLedger> {
        self.ledgers.get(&party)
    }

    pub fn into_ledgers(self) -> BTreeMap<PartyId, ObservationLedger> {
        self.ledgers
    }
}
