use std::ffi::CStr;
use std::ptr;

use ws_privdb_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ws_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn new_filter(capacity: u64) -> *mut WsFilter {
    let mut f = ptr::null_mut();
    let st = unsafe { ws_filter_new(1e-4, 4, 0.95, capacity, false, 7, &mut f) };
    assert_eq!(st, WsStatus::Ok);
    assert!(!f.is_null());
    f
}

fn lookup(f: *const WsFilter, item: &[u8]) -> bool {
    let mut found = false;
    let st = unsafe { ws_filter_lookup(f, item.as_ptr(), item.len(), &mut found) };
    assert_eq!(st, WsStatus::Ok);
    found
}

#[test]
fn filter_insert_lookup_and_round_trip() {
    let f = new_filter(1000);
    for i in 0u32..1000 {
        let item = i.to_le_bytes();
        assert_eq!(
            unsafe { ws_filter_insert(f, item.as_ptr(), item.len()) },
            WsStatus::Ok
        );
    }
    assert!((0u32..1000).all(|i| lookup(f, &i.to_le_bytes())));
    let mut count = 0;
    assert_eq!(unsafe { ws_filter_item_count(f, &mut count) }, WsStatus::Ok);
    assert_eq!(count, 1000);

    let mut need = 0usize;
    assert_eq!(
        unsafe { ws_filter_serialize(f, ptr::null_mut(), 0, &mut need) },
        WsStatus::Ok
    );
    let mut small = vec![0u8; need - 1];
    assert_eq!(
        unsafe { ws_filter_serialize(f, small.as_mut_ptr(), small.len(), &mut need) },
        WsStatus::BufferTooSmall
    );
    let mut buf = vec![0u8; need];
    let mut written = 0;
    assert_eq!(
        unsafe { ws_filter_serialize(f, buf.as_mut_ptr(), buf.len(), &mut written) },
        WsStatus::Ok
    );
    assert_eq!(written, need);
    assert_eq!(&buf[..4], b"CKF1");

    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { ws_filter_deserialize(buf.as_ptr(), buf.len(), &mut g) },
        WsStatus::Ok
    );
    for i in 0u32..5000 {
        assert_eq!(lookup(f, &i.to_le_bytes()), lookup(g, &i.to_le_bytes()));
    }
    unsafe {
        ws_filter_free(f);
        ws_filter_free(g);
    }
}

#[test]
fn keyed_items_need_the_key() {
    let f = new_filter(100);
    let k1 = [1u8; 32];
    let k2 = [2u8; 32];
    let item = b"cell 3,4 ch 7";
    assert_eq!(
        unsafe { ws_filter_keyed_insert(f, k1.as_ptr(), item.as_ptr(), item.len()) },
        WsStatus::Ok
    );
    let keyed = |k: &[u8; 32]| {
        let mut found = false;
        let st =
            unsafe { ws_filter_keyed_lookup(f, k.as_ptr(), item.as_ptr(), item.len(), &mut found) };
        assert_eq!(st, WsStatus::Ok);
        found
    };
    assert!(keyed(&k1));
    assert!(!keyed(&k2));
    assert!(!lookup(f, item));
    unsafe { ws_filter_free(f) };
}

#[test]
fn errors_carry_status_and_message() {
    let mut f = ptr::null_mut();
    let st = unsafe { ws_filter_new(1.5, 4, 0.95, 10, false, 1, &mut f) };
    assert_eq!(st, WsStatus::InvalidArgument);
    assert!(f.is_null());
    assert!(last_error().contains("epsilon"), "{}", last_error());

    assert_eq!(
        unsafe { ws_filter_new(0.01, 4, 0.95, 10, false, 1, ptr::null_mut()) },
        WsStatus::NullPointer
    );
    let mut found = false;
    assert_eq!(
        unsafe { ws_filter_lookup(ptr::null(), b"x".as_ptr(), 1, &mut found) },
        WsStatus::NullPointer
    );
    let junk = [0u8; 40];
    assert_eq!(
        unsafe { ws_filter_deserialize(junk.as_ptr(), junk.len(), &mut f) },
        WsStatus::Malformed
    );
    unsafe {
        ws_filter_free(ptr::null_mut());
        ws_db_free(ptr::null_mut());
    }
}

#[test]
fn full_filter_reports_full_and_keeps_items() {
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { ws_filter_new(0.01, 1, 1.0, 4, false, 3, &mut f) },
        WsStatus::Ok
    );
    let mut inserted = Vec::new();
    for i in 0u32..64 {
        let item = i.to_le_bytes();
        match unsafe { ws_filter_insert(f, item.as_ptr(), 4) } {
            WsStatus::Ok => inserted.push(i),
            WsStatus::FilterFull => break,
            other => panic!("{other:?}"),
        }
    }
    assert!(inserted.len() < 64);
    assert!(inserted.iter().all(|i| lookup(f, &i.to_le_bytes())));
    unsafe { ws_filter_free(f) };
}

#[test]
fn protocol_runs_match_ground_truth() {
    let mut db = ptr::null_mut();
    assert_eq!(
        unsafe { ws_db_generate(32, 31, 0.068, 20_000, 11, &mut db) },
        WsStatus::Ok
    );
    for (cell, seed) in [((0, 0), 1u64), ((5, 17), 2), ((31, 31), 3)] {
        let any_free = (0..31).any(|ch| {
            let mut avl = false;
            let st = unsafe { ws_db_is_available(db, cell.0, cell.1, ch, &mut avl) };
            assert_eq!(st, WsStatus::Ok);
            avl
        });
        let mut decisions = Vec::new();
        for p in [
            WsProtocol::Lpdb,
            WsProtocol::LpdbLeakX,
            WsProtocol::LpdbLeakY,
            WsProtocol::Lpdbqs,
        ] {
            let mut s = WsRunStats::default();
            let st =
                unsafe { ws_protocol_run(db, p, cell.0, cell.1, 1e-8, 4, 0.95, 1.0, seed, &mut s) };
            assert_eq!(st, WsStatus::Ok, "{}", last_error());
            assert_eq!(s.available, any_free);
            assert!(s.bytes_su_db > 0 && s.filter_bytes > 0);
            if p == WsProtocol::Lpdbqs {
                assert!(s.bytes_db_qp >= s.filter_bytes && s.hmacs > 0);
            } else {
                assert_eq!(s.bytes_db_su, s.filter_bytes);
            }
            decisions.push((s.available, s.channel, s.param_count, s.param_values));
        }
        assert!(decisions.windows(2).all(|w| w[0] == w[1]));
    }
    let mut s = WsRunStats::default();
    assert_eq!(
        unsafe { ws_protocol_run(db, WsProtocol::Lpdb, 32, 0, 1e-8, 4, 0.95, 1.0, 1, &mut s) },
        WsStatus::InvalidArgument
    );
    let mut avl = false;
    assert_eq!(
        unsafe { ws_db_is_available(db, 0, 0, 31, &mut avl) },
        WsStatus::InvalidArgument
    );
    unsafe { ws_db_free(db) };
}

#[test]
fn cost_model_through_the_abi() {
    let mut p = std::mem::MaybeUninit::<WsCostParams>::uninit();
    assert_eq!(
        unsafe { ws_cost_params_default(p.as_mut_ptr()) },
        WsStatus::Ok
    );
    let mut p = unsafe { p.assume_init() };
    let comm = |s: WsScheme, p: &WsCostParams| {
        let mut bits = 0.0;
        let st = unsafe { ws_cost_comm_bits(s, p, &mut bits) };
        (st, bits)
    };
    let (st, lpdb) = comm(WsScheme::Lpdb, &p);
    assert_eq!(st, WsStatus::Ok);
    let (_, leak) = comm(WsScheme::LpdbLeakage, &p);
    assert!(lpdb > leak && leak > 0.0);
    assert_eq!(comm(WsScheme::PriSpectrum, &p).0, WsStatus::InvalidArgument);
    assert!(last_error().contains("p_bits"), "{}", last_error());
    p.p_bits = 1024.0;
    assert_eq!(comm(WsScheme::PriSpectrum, &p).0, WsStatus::Ok);

    let mut units = 0.0;
    assert_eq!(
        unsafe { ws_cost_comp_units(WsScheme::Lpdb, WsParty::Db, &p, &mut units) },
        WsStatus::Ok
    );
    assert!(units > 0.0);

    let prob = |s| {
        let mut v = 0.0;
        assert_eq!(
            unsafe { ws_localization_probability(s, 4096.0, 5.0, 10.0, &mut v) },
            WsStatus::Ok
        );
        v
    };
    assert_eq!(prob(WsPrivacyScheme::Lpdb), 1.0 / 4096.0);
    assert_eq!(prob(WsPrivacyScheme::LpdbLeakage), 1.0 / 64.0);
    assert_eq!(prob(WsPrivacyScheme::KAnonymity), 0.2);
    assert_eq!(prob(WsPrivacyScheme::GeoIndistinguishability), 0.1);
}
