use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::cuckoo::{
    BucketSizing, CuckooFilter, FilterParams, InsertOutcome, SecretKey, DEFAULT_MAX_KICKS,
    KEY_BYTES,
};
use crate::spectrum::{
    encode_entry_into, encode_query_into, Axis, Cell, DeviceCharacteristics, EpochDay, Retrieval,
    SpectrumDb, TxParam,
};

use super::keypool::KeyPool;
use super::ledger::{Network, ObservationLedger, PartyId};
use super::messages::{Message, MessageKind};
use super::sensing::SensingOracle;
use super::ProtocolError;

/// Hash evaluations per filter operation: item index, fingerprint, alternate index.
const HASHES_PER_OP: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Lpdb,
    LpdbLeakage,
    Lpdbqs,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Lpdb => "lpdb",
            ProtocolKind::LpdbLeakage => "lpdb-leak",
            ProtocolKind::Lpdbqs => "lpdbqs",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lpdb" => Some(ProtocolKind::Lpdb),
            "lpdb-leak" | "lpdb_leak" | "lpdb-leakage" => Some(ProtocolKind::LpdbLeakage),
            "lpdbqs" => Some(ProtocolKind::Lpdbqs),
            _ => None,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Filter targets the DB uses. Capacity comes from the retrieval itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub epsilon: f64,
    pub beta: u32,
    pub alpha: f64,
    pub max_kicks: u32,
    pub sizing: BucketSizing,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            epsilon: 1e-8,
            beta: 4,
            alpha: 0.95,
            max_kicks: DEFAULT_MAX_KICKS,
            sizing: BucketSizing::Exact,
        }
    }
}

impl FilterConfig {
    pub fn params_for(&self, items: u64) -> Result<FilterParams, ProtocolError> {
        Ok(FilterParams::derive_with(
            self.epsilon,
            self.beta,
            self.alpha,
            items.max(1),
            self.sizing,
        )?
        .with_max_kicks(self.max_kicks))
    }
}

/// Deliberate protocol deviations used to check that the privacy audit
/// catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// SU appends its x coordinate (or, with leakage, the unrevealed one) to qr.
    AppendLocationToQuery,
    /// SU sends `y` to the query server instead of `HMAC_k(y)`.
    PlaintextProbe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub su_index: u32,
    pub fault: Option<Fault>,
}

impl RunOptions {
    pub fn seeded(seed: u64) -> Self {
        RunOptions {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Outcome {
    ChannelAvailable { chn: u16, params: Vec<TxParam> },
    Busy,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Busy => f.write_str("busy"),
            Outcome::ChannelAvailable { chn, params } => {
                write!(f, "ch{chn}:")?;
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{}", p.value)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub outcome: Outcome,
    pub probes_used: u64,
    pub sensing_calls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounts {
    pub inserts: u64,
    pub lookups: u64,
    pub hashes: u64,
    pub hmacs: u64,
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;
    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            inserts: self.inserts + o.inserts,
            lookups: self.lookups + o.lookups,
            hashes: self.hashes + o.hashes,
            hmacs: self.hmacs + o.hmacs,
        }
    }
}

/// Payload bytes per directed link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LinkBytes {
    pub su_db: u64,
    pub db_su: u64,
    pub db_qp: u64,
    pub su_qp: u64,
    pub qp_su: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub protocol: ProtocolKind,
    pub m: u64,
    pub n_ch: u16,
    pub rho: f64,
    pub filter: FilterConfig,
    pub links: LinkBytes,
    pub frame_overhead: u64,
    /// Bytes of the characteristics query, the measured σ_qr.
    pub query_bytes: u64,
    pub filter_items: u64,
    pub filter_bytes: u64,
    pub su_ops: OpCounts,
    pub db_ops: OpCounts,
    pub qp_ops: OpCounts,
    pub sensing_calls: u64,
    pub probes: u64,
    pub outcome: Outcome,
}

impl RunStats {
    pub const CSV_HEADER: [&'static str; 17] = [
        "protocol",
        "m",
        "n_ch",
        "rho",
        "epsilon",
        "beta",
        "alpha",
        "bytes_su_db",
        "bytes_db_su",
        "bytes_db_qp",
        "bytes_su_qp",
        "inserts",
        "lookups",
        "hmacs",
        "sensing_calls",
        "probes",
        "decision",
    ];

    pub fn total_ops(&self) -> OpCounts {
        self.su_ops + self.db_ops + self.qp_ops
    }

    /// One CSV record. `bytes_su_qp` covers both directions of the SU–QP link;
    /// op counts are summed over all parties.
    pub fn csv_record(&self) -> Vec<String> {
        let ops = self.total_ops();
        vec![
            self.protocol.to_string(),
            self.m.to_string(),
            self.n_ch.to_string(),
            self.rho.to_string(),
            self.filter.epsilon.to_string(),
            self.filter.beta.to_string(),
            self.filter.alpha.to_string(),
            self.links.su_db.to_string(),
            self.links.db_su.to_string(),
            self.links.db_qp.to_string(),
            (self.links.su_qp + self.links.qp_su).to_string(),
            ops.inserts.to_string(),
            ops.lookups.to_string(),
            ops.hmacs.to_string(),
            self.sensing_calls.to_string(),
            self.probes.to_string(),
            self.outcome.to_string(),
        ]
    }
}

/// A completed protocol execution with every party's observations.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub kind: ProtocolKind,
    pub su: PartyId,
    pub decision: Decision,
    pub stats: RunStats,
    pub ledgers: BTreeMap<PartyId, ObservationLedger>,
}

impl ProtocolRun {
    pub fn ledger(&self, party: PartyId) -> Option<&ObservationLedger> {
        self.ledgers.get(&party)
    }
}

/// Fresh hash seeds the DB tries before reporting a capacity failure.
const SEED_ATTEMPTS: u64 = 8;

/// Inserts every available row of `rows` into a filter sized for exactly
/// that many entries; keyed when `key` is given. An insertion failure
/// rebuilds the same geometry under a new seed, which matters for tiny
/// filters where both candidate buckets often coincide.
pub(crate) fn build_filter(
    rows: Retrieval<'_>,
    cfg: &FilterConfig,
    seed: u64,
    key: Option<&SecretKey>,
    ops: &mut OpCounts,
) -> Result<CuckooFilter, ProtocolError> {
    let available = rows.available().count() as u64;
    let params = cfg.params_for(available)?;
    let mut x = Vec::new();
    let mut best = 0;
    for attempt in 0..SEED_ATTEMPTS {
        let mut filter = CuckooFilter::new(
            &params,
            seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
        );
        let mut full = false;
        for row in rows.available() {
            encode_entry_into(&row, &mut x)?;
            let kicks_before = filter.kicks();
            let outcome = match key {
                Some(k) => {
                    ops.hmacs += 1;
                    filter.keyed_insert(k, &x)
                }
                None => filter.insert(&x),
            };
            ops.inserts += 1;
            ops.hashes += HASHES_PER_OP + (filter.kicks() - kicks_before);
            if outcome == InsertOutcome::Full {
                full = true;
                break;
            }
        }
        if !full {
            return Ok(filter);
        }
        best = best.max(filter.item_count());
    }
    Err(ProtocolError::FilterCapacity {
        inserted: best,
        required: available,
    })
}

/// SU side of the query loop: every channel in range (ascending) times every
/// parameter tuple, stopping at the first filter hit that sensing confirms.
fn probe_loop<F>(
    db: &SpectrumDb,
    cell: Cell,
    chr: &DeviceCharacteristics,
    ts: EpochDay,
    sensing: &mut SensingOracle<'_>,
    mut probe: F,
) -> Result<Decision, ProtocolError>
where
    F: FnMut(&[u8]) -> Result<bool, ProtocolError>,
{
    let combos = db.domain().combinations();
    let mut y = Vec::new();
    let mut probes_used = 0;
    let mut sensing_calls = 0;
    for chn in chr.channels() {
        for params in &combos {
            encode_query_into(cell, chn, ts, params, &mut y);
            probes_used += 1;
            if probe(&y)? {
                sensing_calls += 1;
                if sensing.sense(cell, chn) {
                    return Ok(Decision {
                        outcome: Outcome::ChannelAvailable {
                            chn,
                            params: params.clone(),
                        },
                        probes_used,
                        sensing_calls,
                    });
                }
            }
        }
    }
    Ok(Decision {
        outcome: Outcome::Busy,
        probes_used,
        sensing_calls,
    })
}

fn check_inputs(
    db: &SpectrumDb,
    cell: Cell,
    chr: &DeviceCharacteristics,
) -> Result<(), ProtocolError> {
    if !db.grid().contains(cell) {
        return Err(ProtocolError::Invalid(format!(
            "SU cell ({}, {}) outside the grid",
            cell.lx, cell.ly
        )));
    }
    chr.validate(&db.grid())?;
    Ok(())
}

fn check_day(db: &SpectrumDb, ts: EpochDay) -> Result<(), ProtocolError> {
    if ts != db.day() {
        return Err(ProtocolError::UnknownDay(ts.0));
    }
    Ok(())
}

/// SU→DB query payload, with the configured fault applied.
fn query_payload(msg: &Message, fault: Option<Fault>, leaked: u32) -> Vec<u8> {
    let mut payload = msg.encode_payload();
    if fault == Some(Fault::AppendLocationToQuery) {
        payload.extend_from_slice(&leaked.to_le_bytes());
    }
    payload
}

struct Tally {
    kind: ProtocolKind,
    su_ops: OpCounts,
    db_ops: OpCounts,
    qp_ops: OpCounts,
    query_bytes: u64,
    filter_items: u64,
    filter_bytes: u64,
}

impl Tally {
    fn new(kind: ProtocolKind) -> Self {
        Tally {
            kind,
            su_ops: OpCounts::default(),
            db_ops: OpCounts::default(),
            qp_ops: OpCounts::default(),
            query_bytes: 0,
            filter_items: 0,
            filter_bytes: 0,
        }
    }

    fn finish(
        self,
        db: &SpectrumDb,
        cfg: &FilterConfig,
        su: PartyId,
        net: Network,
        decision: Decision,
    ) -> ProtocolRun {
        let links = LinkBytes {
            su_db: net.link_bytes(su, PartyId::Db),
            db_su: net.link_bytes(PartyId::Db, su),
            db_qp: net.link_bytes(PartyId::Db, PartyId::Qp),
            su_qp: net.link_bytes(su, PartyId::Qp),
            qp_su: net.link_bytes(PartyId::Qp, su),
        };
        let stats = RunStats {
            protocol: self.kind,
            m: db.grid().m(),
            n_ch: db.grid().n_ch,
            rho: db.rho_target(),
            filter: *cfg,
            links,
            frame_overhead: net.frame_overhead(),
            query_bytes: self.query_bytes,
            filter_items: self.filter_items,
            filter_bytes: self.filter_bytes,
            su_ops: self.su_ops,
            db_ops: self.db_ops,
            qp_ops: self.qp_ops,
            sensing_calls: decision.sensing_calls,
            probes: decision.probes_used,
            outcome: decision.outcome.clone(),
        };
        ProtocolRun {
            kind: self.kind,
            su,
            decision,
            stats,
            ledgers: net.into_ledgers(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_filter_download(
    db: &SpectrumDb,
    cell: Cell,
    chr: &DeviceCharacteristics,
    ts: EpochDay,
    revealed: Option<Axis>,
    cfg: &FilterConfig,
    sensing: &mut SensingOracle<'_>,
    opts: &RunOptions,
) -> Result<ProtocolRun, ProtocolError> {
    check_inputs(db, cell, chr)?;
    let kind = if revealed.is_some() {
        ProtocolKind::LpdbLeakage
    } else {
        ProtocolKind::Lpdb
    };
    let su = PartyId::Su(opts.su_index);
    let mut net = Network::new(&[su, PartyId::Db]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tally = Tally::new(kind);

    // SU: qr ← f(chr, ts), plus one coordinate when leaking.
    let (qr, hidden) = match revealed {
        None => (Message::CharacteristicsQuery { chr: *chr, ts }, cell.lx),
        Some(Axis::X) => (
            Message::LeakyCharacteristicsQuery {
                axis: Axis::X,
                coordinate: cell.lx,
                chr: *chr,
                ts,
            },
            cell.ly,
        ),
        Some(Axis::Y) => (
            Message::LeakyCharacteristicsQuery {
                axis: Axis::Y,
                coordinate: cell.ly,
                chr: *chr,
                ts,
            },
            cell.lx,
        ),
    };
    let payload = query_payload(&qr, opts.fault, hidden);
    tally.query_bytes = payload.len() as u64;
    let received = net.send_raw(su, PartyId::Db, qr.kind(), payload)?;

    // DB: retrieve, insert available rows, ship the filter.
    let (query, _) = Message::decode_payload(qr.kind(), &received)?;
    let rows = match query {
        Message::CharacteristicsQuery { chr, ts } => {
            check_day(db, ts)?;
            chr.validate(&db.grid())?;
            db.retrieve(&chr)
        }
        Message::LeakyCharacteristicsQuery {
            axis,
            coordinate,
            chr,
            ts,
        } => {
            check_day(db, ts)?;
            chr.validate(&db.grid())?;
            db.retrieve_on_line(&chr, axis, coordinate)
        }
        other => {
            return Err(ProtocolError::Order(format!(
                "DB cannot answer {:?}",
                other.kind()
            )))
        }
    };
    let filter = build_filter(rows, cfg, rng.next_u64(), None, &mut tally.db_ops)?;
    tally.filter_items = filter.item_count();
    let ckf = filter.to_bytes();
    tally.filter_bytes = ckf.len() as u64;
    let delivered = net.send(
        PartyId::Db,
        su,
        &Message::FilterTransfer { filter_bytes: ckf },
    )?;

    // SU: local lookups, sensing on hits.
    let su_filter = CuckooFilter::from_bytes(&delivered)?;
    let su_ops = &mut tally.su_ops;
    let decision = probe_loop(db, cell, chr, ts, sensing, |y| {
        su_ops.lookups += 1;
        su_ops.hashes += HASHES_PER_OP;
        Ok(su_filter.lookup(y))
    })?;
    Ok(tally.finish(db, cfg, su, net, decision))
}

/// LPDB: the DB ships a filter of every available entry matching the SU's
/// characteristics; the SU searches it locally.
pub fn run_lpdb(
    db: &SpectrumDb,
    su_cell: Cell,
    chr: &DeviceCharacteristics,
    ts: EpochDay,
    cfg: &FilterConfig,
    sensing: &mut SensingOracle<'_>,
    opts: &RunOptions,
) -> Result<ProtocolRun, ProtocolError> {
    run_filter_download(db, su_cell, chr, ts, None, cfg, sensing, opts)
}

/// LPDB with one coordinate revealed: the DB only inserts entries on the
/// SU's grid line, shrinking the filter by a factor of √m.
#[allow(clippy::too_many_arguments)]
pub fn run_lpdb_leakage(
    db: &SpectrumDb,
    su_cell: Cell,
    chr: &DeviceCharacteristics,
    ts: EpochDay,
    revealed_axis: Axis,
    cfg: &FilterConfig,
    sensing: &mut SensingOracle<'_>,
    opts: &RunOptions,
) -> Result<ProtocolRun, ProtocolError> {
    run_filter_download(
        db,
        su_cell,
        chr,
        ts,
        Some(revealed_axis),
        cfg,
        sensing,
        opts,
    )
}

/// Establishes a fresh κ-bit key between `su` and the DB over their secure
/// channel. Each side contributes a 32-byte share and the key is
/// SHA-256(su_share ‖ db_share), so both ledgers hold the key material and
/// no other party sees it.
pub fn key_exchange<R: RngCore>(
    net: &mut Network,
    su: PartyId,
    rng: &mut R,
) -> Result<SecretKey, ProtocolError> {
    let mut su_share = [0u8; KEY_BYTES];
    let mut db_share = [0u8; KEY_BYTES];
    rng.fill_bytes(&mut su_share);
    rng.fill_bytes(&mut db_share);
    let to_db = net.send(
        su,
        PartyId::Db,
        &Message::KeyExchange {
            key: SecretKey::from_bytes(su_share),
        },
    )?;
    let to_su = net.send(
        PartyId::Db,
        su,
        &Message::KeyExchange {
            key: SecretKey::from_bytes(db_share),
        },
    )?;
    let derive = |a: &[u8], b: &[u8]| -> SecretKey {
        let mut h = Sha256::new();
        h.update(a);
        h.update(b);
        SecretKey::from_bytes(h.finalize().into())
    };
    let db_key = derive(&to_db, &db_share);
    let su_key = derive(&su_share, &to_su);
    debug_assert_eq!(db_key, su_key);
    Ok(su_key)
}

/// The query server: holds the keyed filter and answers MAC probes.
#[derive(Debug, Default)]
pub struct QueryServer {
    filter: Option<CuckooFilter>,
    lookups: u64,
}

impl QueryServer {
    pub fn new() -> Self {
        QueryServer::default()
    }

    pub fn receive_filter(&mut self, bytes: &[u8]) -> Result<(), ProtocolError> {
        self.filter = Some(CuckooFilter::from_bytes(bytes)?);
        Ok(())
    }

    /// Looks the probe bytes up as-is. The server cannot interpret them.
    pub fn answer(&mut self, probe: &[u8]) -> Result<bool, ProtocolError> {
        let filter = self.filter.as_ref().ok_or_else(|| {
            ProtocolError::Order("probe arrived before the filter transfer".into())
        })?;
        self.lookups += 1;
        Ok(filter.lookup(probe))
    }

    pub fn lookups(&self) -> u64 {
        self.lookups
    }
}

/// Where the LPDBQS key and filter come from.
pub enum KeySource<'p> {
    /// Fresh key per run; the DB builds the keyed filter on request.
    Fresh,
    /// Key and filter taken from a precomputed pool; the DB hands the key to the SU.
    Pool(&'p mut KeyPool),
}

/// LPDBQS: the DB builds a keyed filter and sends it to the query server;
/// the SU probes the server with `HMAC_k(y)` values.
#[allow(clippy::too_many_arguments)]
pub fn run_lpdbqs(
    db: &SpectrumDb,
    su_cell: Cell,
    chr: &DeviceCharacteristics,
    ts: EpochDay,
    keys: KeySource<'_>,
    cfg: &FilterConfig,
    sensing: &mut SensingOracle<'_>,
    opts: &RunOptions,
) -> Result<ProtocolRun, ProtocolError> {
    check_inputs(db, su_cell, chr)?;
    let su = PartyId::Su(opts.su_index);
    let mut net = Network::new(&[su, PartyId::Db, PartyId::Qp]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tally = Tally::new(ProtocolKind::Lpdbqs);
    let mut qp = QueryServer::new();

    let key = match keys {
        KeySource::Fresh => {
            let key = key_exchange(&mut net, su, &mut rng)?;
            let qr = Message::KeyedCharacteristicsQuery {
                key_id: key.key_id(),
                chr: *chr,
                ts,
            };
            let payload = query_payload(&qr, opts.fault, su_cell.lx);
            tally.query_bytes = payload.len() as u64;
            let received = net.send_raw(su, PartyId::Db, qr.kind(), payload)?;

            let (query, _) =
                Message::decode_payload(MessageKind::KeyedCharacteristicsQuery, &received)?;
            let Message::KeyedCharacteristicsQuery {
                key_id,
                chr: q_chr,
                ts: q_ts,
            } = query
            else {
                unreachable!("decoded as keyed query");
            };
            // The DB holds the key from the exchange and must match the id.
            if key_id != key.key_id() {
                return Err(ProtocolError::UnknownKey(key_id));
            }
            check_day(db, q_ts)?;
            q_chr.validate(&db.grid())?;
            let filter = build_filter(
                db.retrieve(&q_chr),
                cfg,
                rng.next_u64(),
                Some(&key),
                &mut tally.db_ops,
            )?;
            tally.filter_items = filter.item_count();
            let ckf = filter.to_bytes();
            tally.filter_bytes = ckf.len() as u64;
            let delivered = net.send(
                PartyId::Db,
                PartyId::Qp,
                &Message::FilterTransfer { filter_bytes: ckf },
            )?;
            qp.receive_filter(&delivered)?;
            key
        }
        KeySource::Pool(pool) => {
            let qr = Message::CharacteristicsQuery { chr: *chr, ts };
            let payload = query_payload(&qr, opts.fault, su_cell.lx);
            tally.query_bytes = payload.len() as u64;
            let received = net.send_raw(su, PartyId::Db, qr.kind(), payload)?;
            let (query, _) = Message::decode_payload(MessageKind::CharacteristicsQuery, &received)?;
            let Message::CharacteristicsQuery {
                chr: q_chr,
                ts: q_ts,
            } = query
            else {
                unreachable!("decoded as characteristics query");
            };
            check_day(db, q_ts)?;
            let (key, ckf, items) = pool.take(&q_chr, q_ts)?;
            net.send(PartyId::Db, su, &Message::KeyExchange { key: key.clone() })?;
            tally.filter_items = items;
            tally.filter_bytes = ckf.len() as u64;
            let delivered = net.send(
                PartyId::Db,
                PartyId::Qp,
                &Message::FilterTransfer { filter_bytes: ckf },
            )?;
            qp.receive_filter(&delivered)?;
            key
        }
    };

    let su_ops = &mut tally.su_ops;
    let net_ref = &mut net;
    let qp_ref = &mut qp;
    let fault = opts.fault;
    let decision = probe_loop(db, su_cell, chr, ts, sensing, |y| {
        let payload = if fault == Some(Fault::PlaintextProbe) {
            y.to_vec()
        } else {
            su_ops.hmacs += 1;
            key.mac(y).as_bytes().to_vec()
        };
        let probe = net_ref.send_raw(su, PartyId::Qp, MessageKind::HmacProbe, payload)?;
        let hit = qp_ref.answer(&probe)?;
        let answer = net_ref.send(PartyId::Qp, su, &Message::ProbeAnswer { hit })?;
        match Message::decode_payload(MessageKind::ProbeAnswer, &answer)? {
            (Message::ProbeAnswer { hit }, _) => Ok(hit),
            _ => unreachable!("decoded as probe answer"),
        }
    })?;
    tally.qp_ops.lookups = qp.lookups();
    tally.qp_ops.hashes = qp.lookups() * HASHES_PER_OP;
    Ok(tally.finish(db, cfg, su, net, decision))
}

/// Which protocol to run, for callers that pick at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolChoice {
    Lpdb,
    LpdbLeakage(Axis),
    Lpdbqs,
}

impl ProtocolChoice {
    pub fn kind(self) -> ProtocolKind {
        match self {
            ProtocolChoice::Lpdb => ProtocolKind::Lpdb,
            ProtocolChoice::LpdbLeakage(_) => ProtocolKind::LpdbLeakage,
            ProtocolChoice::Lpdbqs => ProtocolKind::Lpdbqs,
        }
    }
}

pub fn run_protocol(
    choice: ProtocolChoice,
    db: &SpectrumDb,
    su_cell: Cell,
    chr: &DeviceCharacteristics,
    cfg: &FilterConfig,
    sensing: &mut SensingOracle<'_>,
    opts: &RunOptions,
) -> Result<ProtocolRun, ProtocolError> {
    let ts = db.day();
    match choice {
        ProtocolChoice::Lpdb => run_lpdb(db, su_cell, chr, ts, cfg, sensing, opts),
        ProtocolChoice::LpdbLeakage(axis) => {
            run_lpdb_leakage(db, su_cell, chr, ts, axis, cfg, sensing, opts)
        }
        ProtocolChoice::Lpdbqs => {
            run_lpdbqs(db, su_cell, chr, ts, KeySource::Fresh, cfg, sensing, opts)
        }
    }
}

/// The decision a perfect-sensing run must reach, read straight off the
/// ground truth.
pub fn expected_outcome(db: &SpectrumDb, cell: Cell, chr: &DeviceCharacteristics) -> Outcome {
    match db.first_available(cell, chr) {
        Some((chn, params)) => Outcome::ChannelAvailable { chn, params },
        None => Outcome::Busy,
    }
}

/// Draws a uniformly random SU cell.
pub fn random_cell<R: Rng>(db: &SpectrumDb, rng: &mut R) -> Cell {
    let side = db.grid().side;
    Cell {
        lx: rng.gen_range(0..side),
        ly: rng.gen_range(0..side),
    }
}
