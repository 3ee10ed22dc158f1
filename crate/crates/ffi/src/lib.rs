//! C interface to `ws-privdb`.
//!
//! Every function returns a [`WsStatus`]. Objects are opaque handles created
//! by a `*_new`/`*_generate`/`*_deserialize` call and released with the
//! matching `*_free`. After a non-OK status, `ws_last_error_message` returns
//! a description valid until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ws_privdb::cost_model::{self, CostError, CostParams, Party, PrivacyScheme, Scheme};
use ws_privdb::cuckoo::{
    BucketSizing, CuckooFilter, FilterError, FilterParams, SecretKey, KEY_BYTES,
};
use ws_privdb::protocols::{
    run_protocol, FilterConfig, Outcome, ProtocolChoice, ProtocolError, RunOptions, SensingOracle,
};
use ws_privdb::spectrum::{
    Axis, Cell, DbError, DeviceCharacteristics, EpochDay, GridSpec, ParamDomain, SpectrumDb,
};

/// Most transmission parameters reported in [`WsRunStats`].
pub const WS_MAX_PARAMS: usize = 8;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Insert found no free slot; the filter is unchanged.
    FilterFull = 3,
    /// The database filter could not hold its rows.
    Capacity = 4,
    Malformed = 5,
    BufferTooSmall = 6,
    Protocol = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsProtocol {
    Lpdb = 0,
    LpdbLeakX = 1,
    LpdbLeakY = 2,
    Lpdbqs = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsScheme {
    Lpdb = 0,
    LpdbLeakage = 1,
    Lpdbqs = 2,
    PriSpectrum = 3,
    Troja15 = 4,
    Troja14 = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsParty {
    Db = 0,
    Su = 1,
    Qp = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsPrivacyScheme {
    Lpdb = 0,
    LpdbLeakage = 1,
    Lpdbqs = 2,
    KAnonymity = 3,
    GeoIndistinguishability = 4,
    PriSpectrum = 5,
    Troja15 = 6,
    Troja14 = 7,
}

/// Cuckoo filter handle.
pub struct WsFilter(CuckooFilter);

/// Spectrum ground-truth handle.
pub struct WsDb(SpectrumDb);

/// Result of one protocol run. Byte counts are message payloads; framing is
/// in `frame_overhead`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WsRunStats {
    pub bytes_su_db: u64,
    pub bytes_db_su: u64,
    pub bytes_db_qp: u64,
    pub bytes_su_qp: u64,
    pub bytes_qp_su: u64,
    pub frame_overhead: u64,
    pub query_bytes: u64,
    pub filter_items: u64,
    pub filter_bytes: u64,
    pub inserts: u64,
    pub lookups: u64,
    pub hashes: u64,
    pub hmacs: u64,
    pub sensing_calls: u64,
    pub probes: u64,
    pub available: bool,
    pub channel: u16,
    pub param_count: u32,
    pub param_values: [u32; WS_MAX_PARAMS],
}

/// Cost-model inputs. Baseline fields set to NaN are treated as absent.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsCostParams {
    pub m: f64,
    pub n_ch: f64,
    pub rho: f64,
    pub epsilon: f64,
    pub beta: u32,
    pub alpha: f64,
    pub sigma_qr_bytes: f64,
    pub sigma_hmac_bytes: f64,
    pub p_bits: f64,
    pub q_bits: f64,
    pub b: f64,
    pub n_g: f64,
    pub v: f64,
    pub d: f64,
    pub troja15_n: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(WsStatus, String);

impl Fail {
    fn null(what: &str) -> Self {
        Fail(WsStatus::NullPointer, format!("{what} is null"))
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Fail(WsStatus::InvalidArgument, msg.into())
    }
}

impl From<FilterError> for Fail {
    fn from(e: FilterError) -> Self {
        let status = match e {
            FilterError::InvalidRange { .. } => WsStatus::InvalidArgument,
            _ => WsStatus::Malformed,
        };
        Fail(status, e.to_string())
    }
}

impl From<DbError> for Fail {
    fn from(e: DbError) -> Self {
        Fail(WsStatus::InvalidArgument, e.to_string())
    }
}

impl From<CostError> for Fail {
    fn from(e: CostError) -> Self {
        Fail(WsStatus::InvalidArgument, e.to_string())
    }
}

impl From<ProtocolError> for Fail {
    fn from(e: ProtocolError) -> Self {
        let status = match e {
            ProtocolError::FilterCapacity { .. } => WsStatus::Capacity,
            ProtocolError::Invalid(_)
            | ProtocolError::Db(_)
            | ProtocolError::Filter(FilterError::InvalidRange { .. }) => WsStatus::InvalidArgument,
            _ => WsStatus::Protocol,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WsStatus::Panic
        }
    }
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail::null(what))
}

unsafe fn filter_ref<'a>(f: *const WsFilter) -> Result<&'a CuckooFilter, Fail> {
    f.as_ref().map(|f| &f.0).ok_or_else(|| Fail::null("filter"))
}

unsafe fn filter_mut<'a>(f: *mut WsFilter) -> Result<&'a mut CuckooFilter, Fail> {
    f.as_mut()
        .map(|f| &mut f.0)
        .ok_or_else(|| Fail::null("filter"))
}

unsafe fn key(p: *const u8) -> Result<SecretKey, Fail> {
    let b = bytes(p, KEY_BYTES, "key")?;
    Ok(SecretKey::from_bytes(
        b.try_into().expect("KEY_BYTES slice"),
    ))
}

/// Message for the last non-OK status on this thread. Never null.
#[no_mangle]
pub extern "C" fn ws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates an empty filter sized for `capacity` items at false-positive
/// rate `epsilon`. With `exact_sizing` the bucket count is the smallest
/// sufficient integer, otherwise the next power of two.
///
/// # Safety
/// `out_filter` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_new(
    epsilon: f64,
    beta: u32,
    alpha: f64,
    capacity: u64,
    exact_sizing: bool,
    seed: u64,
    out_filter: *mut *mut WsFilter,
) -> WsStatus {
    guard(|| {
        let slot = out(out_filter, "out_filter")?;
        let sizing = if exact_sizing {
            BucketSizing::Exact
        } else {
            BucketSizing::PowerOfTwo
        };
        let params = FilterParams::derive_with(epsilon, beta, alpha, capacity, sizing)?;
        *slot = Box::into_raw(Box::new(WsFilter(CuckooFilter::new(&params, seed))));
        Ok(())
    })
}

/// # Safety
/// `filter` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_free(filter: *mut WsFilter) {
    if !filter.is_null() {
        drop(Box::from_raw(filter));
    }
}

/// # Safety
/// `filter` must be a live handle and `item` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_insert(
    filter: *mut WsFilter,
    item: *const u8,
    len: usize,
) -> WsStatus {
    guard(|| {
        let f = filter_mut(filter)?;
        let item = bytes(item, len, "item")?;
        if f.insert(item).is_ok() {
            Ok(())
        } else {
            Err(Fail(WsStatus::FilterFull, "filter full".into()))
        }
    })
}

/// Inserts HMAC-SHA-256(key, item).
///
/// # Safety
/// `filter` must be a live handle, `key` valid for 32 bytes and `item` for
/// `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_keyed_insert(
    filter: *mut WsFilter,
    key_bytes: *const u8,
    item: *const u8,
    len: usize,
) -> WsStatus {
    guard(|| {
        let f = filter_mut(filter)?;
        let k = key(key_bytes)?;
        let item = bytes(item, len, "item")?;
        if f.keyed_insert(&k, item).is_ok() {
            Ok(())
        } else {
            Err(Fail(WsStatus::FilterFull, "filter full".into()))
        }
    })
}

/// # Safety
/// `filter` must be a live handle, `item` valid for `len` bytes and `found`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_lookup(
    filter: *const WsFilter,
    item: *const u8,
    len: usize,
    found: *mut bool,
) -> WsStatus {
    guard(|| {
        let f = filter_ref(filter)?;
        let item = bytes(item, len, "item")?;
        *out(found, "found")? = f.lookup(item);
        Ok(())
    })
}

/// # Safety
/// As [`ws_filter_lookup`], plus `key` valid for 32 bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_keyed_lookup(
    filter: *const WsFilter,
    key_bytes: *const u8,
    item: *const u8,
    len: usize,
    found: *mut bool,
) -> WsStatus {
    guard(|| {
        let f = filter_ref(filter)?;
        let k = key(key_bytes)?;
        let item = bytes(item, len, "item")?;
        *out(found, "found")? = f.keyed_lookup(&k, item);
        Ok(())
    })
}

/// # Safety
/// `filter` must be a live handle and `count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_item_count(
    filter: *const WsFilter,
    count: *mut u64,
) -> WsStatus {
    guard(|| {
        *out(count, "count")? = filter_ref(filter)?.item_count();
        Ok(())
    })
}

/// Writes the wire encoding into `buf`. `written` always receives the
/// encoded length; pass a null `buf` to query it.
///
/// # Safety
/// `filter` must be a live handle, `buf` null or valid for `cap` bytes, and
/// `written` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_serialize(
    filter: *const WsFilter,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> WsStatus {
    guard(|| {
        let f = filter_ref(filter)?;
        let written = out(written, "written")?;
        let need = usize::try_from(f.encoded_len())
            .map_err(|_| Fail::invalid("filter larger than the address space"))?;
        *written = need;
        if buf.is_null() {
            return Ok(());
        }
        if cap < need {
            return Err(Fail(
                WsStatus::BufferTooSmall,
                format!("need {need} bytes, have {cap}"),
            ));
        }
        let encoded = f.to_bytes();
        ptr::copy_nonoverlapping(encoded.as_ptr(), buf, need);
        Ok(())
    })
}

/// # Safety
/// `buf` must be valid for `len` bytes and `out_filter` for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_filter_deserialize(
    buf: *const u8,
    len: usize,
    out_filter: *mut *mut WsFilter,
) -> WsStatus {
    guard(|| {
        let slot = out(out_filter, "out_filter")?;
        let f = CuckooFilter::from_bytes(bytes(buf, len, "buf")?)?;
        *slot = Box::into_raw(Box::new(WsFilter(f)));
        Ok(())
    })
}

/// Generates a `side × side` grid with `n_ch` channels, each row available
/// with probability `rho`, using the default parameter domain.
///
/// # Safety
/// `out_db` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_db_generate(
    side: u32,
    n_ch: u16,
    rho: f64,
    day: u64,
    seed: u64,
    out_db: *mut *mut WsDb,
) -> WsStatus {
    guard(|| {
        let slot = out(out_db, "out_db")?;
        let grid = GridSpec::new(side, n_ch)?;
        let db = SpectrumDb::generate(grid, ParamDomain::default(), rho, EpochDay(day), seed)?;
        *slot = Box::into_raw(Box::new(WsDb(db)));
        Ok(())
    })
}

/// # Safety
/// `db` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn ws_db_free(db: *mut WsDb) {
    if !db.is_null() {
        drop(Box::from_raw(db));
    }
}

/// # Safety
/// `db` must be a live handle and `available` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_db_is_available(
    db: *const WsDb,
    lx: u32,
    ly: u32,
    chn: u16,
    available: *mut bool,
) -> WsStatus {
    guard(|| {
        let db = &db.as_ref().ok_or_else(|| Fail::null("db"))?.0;
        let g = db.grid();
        let cell = Cell { lx, ly };
        if !g.contains(cell) || chn >= g.n_ch {
            return Err(Fail::invalid(format!("cell ({lx},{ly}) channel {chn}")));
        }
        *out(available, "available")? = db.is_available(cell, chn);
        Ok(())
    })
}

/// Runs one protocol execution for an SU at `(lx, ly)` with a full-range
/// device.
///
/// # Safety
/// `db` must be a live handle and `stats` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_protocol_run(
    db: *const WsDb,
    protocol: WsProtocol,
    lx: u32,
    ly: u32,
    epsilon: f64,
    beta: u32,
    alpha: f64,
    sensing_accuracy: f64,
    seed: u64,
    stats: *mut WsRunStats,
) -> WsStatus {
    guard(|| {
        let db = &db.as_ref().ok_or_else(|| Fail::null("db"))?.0;
        let stats = out(stats, "stats")?;
        let cell = Cell { lx, ly };
        let choice = match protocol {
            WsProtocol::Lpdb => ProtocolChoice::Lpdb,
            WsProtocol::LpdbLeakX => ProtocolChoice::LpdbLeakage(Axis::X),
            WsProtocol::LpdbLeakY => ProtocolChoice::LpdbLeakage(Axis::Y),
            WsProtocol::Lpdbqs => ProtocolChoice::Lpdbqs,
        };
        let cfg = FilterConfig {
            epsilon,
            beta,
            alpha,
            ..FilterConfig::default()
        };
        let chr = DeviceCharacteristics::full_range(&db.grid());
        let mut sensing = SensingOracle::new(db, sensing_accuracy, seed ^ 0x5e45)?;
        let run = run_protocol(
            choice,
            db,
            cell,
            &chr,
            &cfg,
            &mut sensing,
            &RunOptions::seeded(seed),
        )?;
        let s = &run.stats;
        let ops = s.su_ops + s.db_ops + s.qp_ops;
        let mut r = WsRunStats {
            bytes_su_db: s.links.su_db,
            bytes_db_su: s.links.db_su,
            bytes_db_qp: s.links.db_qp,
            bytes_su_qp: s.links.su_qp,
            bytes_qp_su: s.links.qp_su,
            frame_overhead: s.frame_overhead,
            query_bytes: s.query_bytes,
            filter_items: s.filter_items,
            filter_bytes: s.filter_bytes,
            inserts: ops.inserts,
            lookups: ops.lookups,
            hashes: ops.hashes,
            hmacs: ops.hmacs,
            sensing_calls: s.sensing_calls,
            probes: s.probes,
            ..WsRunStats::default()
        };
        if let Outcome::ChannelAvailable { chn, params } = &s.outcome {
            if params.len() > WS_MAX_PARAMS {
                return Err(Fail::invalid(format!(
                    "{} parameters exceed WS_MAX_PARAMS",
                    params.len()
                )));
            }
            r.available = true;
            r.channel = *chn;
            r.param_count = params.len() as u32;
            for (dst, p) in r.param_values.iter_mut().zip(params) {
                *dst = p.value;
            }
        }
        *stats = r;
        Ok(())
    })
}

/// Fills `params` with the evaluation defaults and no baseline fields.
///
/// # Safety
/// `params` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_cost_params_default(params: *mut WsCostParams) -> WsStatus {
    guard(|| {
        let d = CostParams::default();
        *out(params, "params")? = WsCostParams {
            m: d.m,
            n_ch: d.n_ch,
            rho: d.rho,
            epsilon: d.epsilon,
            beta: d.beta,
            alpha: d.alpha,
            sigma_qr_bytes: d.sigma_qr_bytes,
            sigma_hmac_bytes: d.sigma_hmac_bytes,
            p_bits: f64::NAN,
            q_bits: f64::NAN,
            b: f64::NAN,
            n_g: f64::NAN,
            v: f64::NAN,
            d: f64::NAN,
            troja15_n: f64::NAN,
        };
        Ok(())
    })
}

fn present(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

unsafe fn cost_params(p: *const WsCostParams) -> Result<CostParams, Fail> {
    let p = p.as_ref().ok_or_else(|| Fail::null("params"))?;
    Ok(CostParams {
        m: p.m,
        n_ch: p.n_ch,
        rho: p.rho,
        epsilon: p.epsilon,
        beta: p.beta,
        alpha: p.alpha,
        sigma_qr_bytes: p.sigma_qr_bytes,
        sigma_hmac_bytes: p.sigma_hmac_bytes,
        p_bits: present(p.p_bits),
        q_bits: present(p.q_bits),
        b: present(p.b),
        n_g: present(p.n_g),
        v: present(p.v),
        d: present(p.d),
        troja15_n: present(p.troja15_n),
        ..CostParams::default()
    })
}

fn scheme(s: WsScheme) -> Scheme {
    match s {
        WsScheme::Lpdb => Scheme::Lpdb,
        WsScheme::LpdbLeakage => Scheme::LpdbLeakage,
        WsScheme::Lpdbqs => Scheme::Lpdbqs,
        WsScheme::PriSpectrum => Scheme::PriSpectrum,
        WsScheme::Troja15 => Scheme::Troja15,
        WsScheme::Troja14 => Scheme::Troja14,
    }
}

/// Communication cost of one query in bits.
///
/// # Safety
/// `params` must be readable and `bits` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_cost_comm_bits(
    s: WsScheme,
    params: *const WsCostParams,
    bits: *mut f64,
) -> WsStatus {
    guard(|| {
        let p = cost_params(params)?;
        *out(bits, "bits")? = cost_model::comm(scheme(s), &p)?;
        Ok(())
    })
}

/// Computation cost for one party in unit operations, every primitive
/// weighted 1.
///
/// # Safety
/// `params` must be readable and `units` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_cost_comp_units(
    s: WsScheme,
    party: WsParty,
    params: *const WsCostParams,
    units: *mut f64,
) -> WsStatus {
    guard(|| {
        let p = cost_params(params)?;
        let party = match party {
            WsParty::Db => Party::Db,
            WsParty::Su => Party::Su,
            WsParty::Qp => Party::Qp,
        };
        *out(units, "units")? = cost_model::comp(scheme(s), party, &p)?.units(&p.units);
        Ok(())
    })
}

/// Probability that the database localizes the SU to its cell. `k` is used
/// by k-anonymity and `r` by geo-indistinguishability.
///
/// # Safety
/// `probability` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_localization_probability(
    s: WsPrivacyScheme,
    m: f64,
    k: f64,
    r: f64,
    probability: *mut f64,
) -> WsStatus {
    guard(|| {
        let s = match s {
            WsPrivacyScheme::Lpdb => PrivacyScheme::Lpdb,
            WsPrivacyScheme::LpdbLeakage => PrivacyScheme::LpdbLeakage,
            WsPrivacyScheme::Lpdbqs => PrivacyScheme::Lpdbqs,
            WsPrivacyScheme::PriSpectrum => PrivacyScheme::PriSpectrum,
            WsPrivacyScheme::Troja15 => PrivacyScheme::Troja15,
            WsPrivacyScheme::Troja14 => PrivacyScheme::Troja14,
            WsPrivacyScheme::KAnonymity => PrivacyScheme::KAnonymity { k },
            WsPrivacyScheme::GeoIndistinguishability => {
                PrivacyScheme::GeoIndistinguishability { r }
            }
        };
        *out(probability, "probability")? = cost_model::localization_probability(s, m)?;
        Ok(())
    })
}
