use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::ledger::{LedgerEntry, PartyId};
use super::messages::{Message, MessageKind};
use super::run::{ProtocolKind, ProtocolRun};
use crate::cuckoo::MAC_BYTES;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub party: PartyId,
    pub entry: usize,
    pub kind: MessageKind,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} entry {} ({:?}): {}",
            self.party, self.entry, self.kind, self.reason
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrivacyReport {
    pub entries_checked: usize,
    pub violations: Vec<Violation>,
}

impl PrivacyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn allowed(kind: ProtocolKind, party: PartyId) -> &'static [MessageKind] {
    use MessageKind::*;
    match (kind, party) {
        (ProtocolKind::Lpdb, PartyId::Db) => &[CharacteristicsQuery],
        (ProtocolKind::LpdbLeakage, PartyId::Db) => &[LeakyCharacteristicsQuery],
        (ProtocolKind::Lpdbqs, PartyId::Db) => {
            &[KeyExchange, KeyedCharacteristicsQuery, CharacteristicsQuery]
        }
        (ProtocolKind::Lpdbqs, PartyId::Qp) => &[FilterTransfer, HmacProbe],
        (ProtocolKind::Lpdbqs, PartyId::Su(_)) => &[KeyExchange, ProbeAnswer],
        (_, PartyId::Su(_)) => &[FilterTransfer],
        (_, PartyId::Qp) => &[],
    }
}

fn check_entry(party: PartyId, entry: &LedgerEntry) -> Option<String> {
    if entry.kind == MessageKind::HmacProbe && entry.payload.len() != MAC_BYTES {
        return Some(format!(
            "probe is {} bytes, a MAC tag is {MAC_BYTES}",
            entry.payload.len()
        ));
    }
    match Message::decode_payload(entry.kind, &entry.payload) {
        Err(e) => Some(format!("does not parse: {e}")),
        Ok((_, rest)) if !rest.is_empty() => {
            Some(format!("{} bytes beyond the declared fields", rest.len()))
        }
        Ok((Message::FilterTransfer { filter_bytes }, _))
            if party == PartyId::Qp || matches!(party, PartyId::Su(_)) =>
        {
            crate::cuckoo::CuckooFilter::from_bytes(&filter_bytes)
                .err()
                .map(|e| format!("filter does not parse: {e}"))
        }
        Ok(_) => None,
    }
}

/// Checks every ledger of a run against what its party may learn: only the
/// permitted message kinds, each exactly its schema with nothing appended,
/// and every query-server probe a MAC tag.
pub fn assert_privacy(run: &ProtocolRun) -> PrivacyReport {
    let mut report = PrivacyReport::default();
    for (&party, ledger) in &run.ledgers {
        let allow = allowed(run.kind, party);
        for (i, entry) in ledger.entries().iter().enumerate() {
            report.entries_checked += 1;
            let reason = if !allow.contains(&entry.kind) {
                Some(format!("{party} may not receive {:?}", entry.kind))
            } else {
                check_entry(party, entry)
            };
            if let Some(reason) = reason {
                report.violations.push(Violation {
                    party,
                    entry: i,
                    kind: entry.kind,
                    reason,
                });
            }
        }
    }
    report
}

/// Number of probe values the query server saw in more than one run.
/// With a fresh key per run this is zero, so probes cannot be linked
/// across sessions or SUs.
pub fn shared_probes(runs: &[ProtocolRun]) -> usize {
    let mut seen: HashMap<&[u8], BTreeSet<usize>> = HashMap::new();
    for (r, run) in runs.iter().enumerate() {
        let Some(qp) = run.ledger(PartyId::Qp) else {
            continue;
        };
        for e in qp
            .entries()
            .iter()
            .filter(|e| e.kind == MessageKind::HmacProbe)
        {
            seen.entry(&e.payload).or_default().insert(r);
        }
    }
    seen.values().filter(|runs| runs.len() > 1).count()
}
