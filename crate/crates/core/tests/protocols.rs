use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ws_privdb::cuckoo::{wire, CuckooFilter};
use ws_privdb::protocols::*;
use ws_privdb::spectrum::{
    Axis, Cell, DeviceCharacteristics, DeviceType, EpochDay, GridSpec, ParamDomain, SpectrumDb,
};

fn db(side: u32, rho: f64, seed: u64) -> SpectrumDb {
    SpectrumDb::generate(
        GridSpec::new(side, 31).unwrap(),
        ParamDomain::default(),
        rho,
        EpochDay(20_000),
        seed,
    )
    .unwrap()
}

fn cfg() -> FilterConfig {
    FilterConfig {
        epsilon: 1e-6,
        ..FilterConfig::default()
    }
}

fn run(
    choice: ProtocolChoice,
    db: &SpectrumDb,
    cell: Cell,
    chr: &DeviceCharacteristics,
    opts: RunOptions,
) -> ProtocolRun {
    let mut sensing = SensingOracle::perfect(db);
    run_protocol(choice, db, cell, chr, &cfg(), &mut sensing, &opts).unwrap()
}

const CHOICES: [ProtocolChoice; 4] = [
    ProtocolChoice::Lpdb,
    ProtocolChoice::LpdbLeakage(Axis::X),
    ProtocolChoice::LpdbLeakage(Axis::Y),
    ProtocolChoice::Lpdbqs,
];

#[test]
fn decisions_match_ground_truth() {
    let db = db(12, 0.05, 1);
    let full = DeviceCharacteristics::full_range(&db.grid());
    let narrow = DeviceCharacteristics::new(DeviceType::Fixed, 30, 10, 13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut busy = 0;
    for i in 0..40 {
        let cell = random_cell(&db, &mut rng);
        for chr in [full, narrow] {
            let want = expected_outcome(&db, cell, &chr);
            busy += (want == Outcome::Busy) as u32;
            for choice in CHOICES {
                let r = run(choice, &db, cell, &chr, RunOptions::seeded(i));
                assert_eq!(r.decision.outcome, want, "{choice:?} at {cell:?}");
                assert!(r.decision.sensing_calls >= 1 || want == Outcome::Busy);
            }
        }
    }
    assert!(busy > 0, "narrow range should leave some cells busy");
}

#[test]
fn filter_bytes_on_the_wire() {
    let db = db(16, 0.1, 2);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let cell = Cell { lx: 3, ly: 4 };
    let r = run(ProtocolChoice::Lpdb, &db, cell, &chr, RunOptions::seeded(0));
    let items = db.available_count();
    let geometry = cfg().params_for(items).unwrap().geometry();
    assert_eq!(r.stats.filter_items, items);
    assert_eq!(r.stats.links.db_su, wire::encoded_len(&geometry));
    assert_eq!(r.stats.links.db_su, r.stats.filter_bytes);
    assert_eq!(r.stats.links.su_db, 15);
    assert_eq!(r.stats.query_bytes, 15);
    assert_eq!(
        r.stats.links.db_qp + r.stats.links.su_qp + r.stats.links.qp_su,
        0
    );
    assert_eq!(r.stats.frame_overhead, 2 * FRAME_HEADER_BYTES as u64);
    let su = r.ledger(r.su).unwrap();
    assert_eq!(su.bytes_from(PartyId::Db), r.stats.links.db_su);
    let f = CuckooFilter::from_bytes(&su.entries()[0].payload).unwrap();
    assert_eq!(f.item_count(), items);

    let q = run(
        ProtocolChoice::Lpdbqs,
        &db,
        cell,
        &chr,
        RunOptions::seeded(0),
    );
    assert_eq!(q.stats.links.db_qp, r.stats.links.db_su);
    assert_eq!(q.stats.links.su_qp, 32 * q.decision.probes_used);
    assert_eq!(q.stats.links.qp_su, q.decision.probes_used);
    assert_eq!(q.stats.links.su_db, 32 + 23);
    assert_eq!(q.stats.su_ops.hmacs, q.decision.probes_used);
    assert_eq!(q.stats.qp_ops.lookups, q.decision.probes_used);
    assert_eq!(q.stats.db_ops.hmacs, items);
}

#[test]
fn leakage_shrinks_the_filter() {
    let db = db(32, 0.1, 3);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let cell = Cell { lx: 7, ly: 20 };
    let full = run(ProtocolChoice::Lpdb, &db, cell, &chr, RunOptions::seeded(0));
    let line = run(
        ProtocolChoice::LpdbLeakage(Axis::X),
        &db,
        cell,
        &chr,
        RunOptions::seeded(0),
    );
    let on_line = db.retrieve_on_line(&chr, Axis::X, 7).available().count() as u64;
    assert_eq!(line.stats.filter_items, on_line);
    assert!(line.stats.filter_bytes * 8 < full.stats.filter_bytes);
    assert_eq!(line.stats.query_bytes, 20);
}

#[test]
fn honest_runs_pass_the_audit() {
    let db = db(10, 0.1, 4);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    for choice in CHOICES {
        let r = run(
            choice,
            &db,
            Cell { lx: 1, ly: 2 },
            &chr,
            RunOptions::seeded(5),
        );
        let report = assert_privacy(&r);
        assert!(report.is_clean(), "{choice:?}: {:?}", report.violations);
        assert!(report.entries_checked >= 2);
    }
}

#[test]
fn qp_never_sees_key_or_query() {
    let db = db(10, 0.1, 4);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let r = run(
        ProtocolChoice::Lpdbqs,
        &db,
        Cell { lx: 1, ly: 2 },
        &chr,
        RunOptions::seeded(5),
    );
    let qp = r.ledger(PartyId::Qp).unwrap();
    assert!(qp
        .entries()
        .iter()
        .all(|e| matches!(e.kind, MessageKind::FilterTransfer | MessageKind::HmacProbe)));
    assert!(qp
        .entries()
        .iter()
        .filter(|e| e.kind == MessageKind::HmacProbe)
        .all(|e| e.byte_len == 32));
    let db_ledger = r.ledger(PartyId::Db).unwrap();
    assert!(db_ledger
        .entries()
        .iter()
        .all(|e| e.kind != MessageKind::HmacProbe));
}

#[test]
fn faults_are_flagged() {
    let db = db(10, 0.1, 4);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let cell = Cell { lx: 6, ly: 2 };
    for choice in CHOICES {
        let opts = RunOptions {
            fault: Some(Fault::AppendLocationToQuery),
            ..RunOptions::seeded(1)
        };
        let r = run(choice, &db, cell, &chr, opts);
        let report = assert_privacy(&r);
        assert!(
            report.violations.iter().any(|v| v.party == PartyId::Db),
            "{choice:?} not flagged"
        );
        assert_eq!(r.decision.outcome, expected_outcome(&db, cell, &chr));
    }
    let opts = RunOptions {
        fault: Some(Fault::PlaintextProbe),
        ..RunOptions::seeded(1)
    };
    let r = run(ProtocolChoice::Lpdbqs, &db, cell, &chr, opts);
    let report = assert_privacy(&r);
    assert!(report
        .violations
        .iter()
        .any(|v| v.party == PartyId::Qp && v.kind == MessageKind::HmacProbe));
}

#[test]
fn probe_before_filter_is_an_order_error() {
    let mut qp = QueryServer::new();
    assert!(matches!(qp.answer(&[0; 32]), Err(ProtocolError::Order(_))));
    assert!(qp.receive_filter(&[1, 2, 3]).is_err());
}

#[test]
fn fresh_keys_make_probes_unlinkable() {
    let db = db(8, 0.02, 6);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let cell = Cell { lx: 0, ly: 0 };
    let runs: Vec<ProtocolRun> = (0..5)
        .map(|i| {
            run(
                ProtocolChoice::Lpdbqs,
                &db,
                cell,
                &chr,
                RunOptions {
                    su_index: i as u32,
                    ..RunOptions::seeded(i)
                },
            )
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0].decision == w[1].decision));
    assert_eq!(shared_probes(&runs), 0);
    let same = vec![runs[0].clone(), runs[0].clone()];
    assert!(shared_probes(&same) > 0);
}

#[test]
fn key_pool_runs_match_fresh_runs_and_exhaust() {
    let db = db(8, 0.1, 7);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let mut pool = KeyPool::precompute(&db, &[chr], 3, &cfg(), 11).unwrap();
    assert_eq!(pool.remaining(&chr), 3);
    assert_eq!(pool.precompute_ops().inserts, 3 * db.available_count());
    let mut seen = Vec::new();
    for i in 0..3u64 {
        let cell = Cell {
            lx: i as u32,
            ly: 5,
        };
        let mut sensing = SensingOracle::perfect(&db);
        let r = run_lpdbqs(
            &db,
            cell,
            &chr,
            db.day(),
            KeySource::Pool(&mut pool),
            &cfg(),
            &mut sensing,
            &RunOptions::seeded(i),
        )
        .unwrap();
        assert_eq!(r.decision.outcome, expected_outcome(&db, cell, &chr));
        assert!(assert_privacy(&r).is_clean());
        seen.push(r);
    }
    assert_eq!(shared_probes(&seen), 0);
    assert_eq!(pool.remaining(&chr), 0);
    let mut sensing = SensingOracle::perfect(&db);
    let err = run_lpdbqs(
        &db,
        Cell { lx: 0, ly: 0 },
        &chr,
        db.day(),
        KeySource::Pool(&mut pool),
        &cfg(),
        &mut sensing,
        &RunOptions::default(),
    );
    assert!(matches!(err, Err(ProtocolError::PoolExhausted)));
}

#[test]
fn capacity_failure_is_reported() {
    let db = db(16, 1.0, 8);
    let chr = DeviceCharacteristics::new(DeviceType::Fixed, 30, 0, 3).unwrap();
    let tight = FilterConfig {
        epsilon: 0.01,
        beta: 1,
        alpha: 1.0,
        max_kicks: 0,
        ..FilterConfig::default()
    };
    let mut sensing = SensingOracle::perfect(&db);
    let err = run_lpdb(
        &db,
        Cell { lx: 0, ly: 0 },
        &chr,
        db.day(),
        &tight,
        &mut sensing,
        &RunOptions::default(),
    );
    assert!(
        matches!(
            err,
            Err(ProtocolError::FilterCapacity { required: 1024, .. })
        ),
        "{err:?}"
    );
}

#[test]
fn bad_inputs_are_rejected() {
    let db = db(8, 0.1, 9);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let mut sensing = SensingOracle::perfect(&db);
    let opts = RunOptions::default();
    assert!(run_lpdb(
        &db,
        Cell { lx: 8, ly: 0 },
        &chr,
        db.day(),
        &cfg(),
        &mut sensing,
        &opts
    )
    .is_err());
    let wide = DeviceCharacteristics::new(DeviceType::ModeII, 2, 0, 31).unwrap();
    assert!(run_lpdb(
        &db,
        Cell { lx: 0, ly: 0 },
        &wide,
        db.day(),
        &cfg(),
        &mut sensing,
        &opts
    )
    .is_err());
    let err = run_lpdb(
        &db,
        Cell { lx: 0, ly: 0 },
        &chr,
        EpochDay(1),
        &cfg(),
        &mut sensing,
        &opts,
    );
    assert!(matches!(err, Err(ProtocolError::UnknownDay(1))));
}

#[test]
fn stats_csv_record_shape() {
    let db = db(8, 0.1, 10);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let r = run(
        ProtocolChoice::Lpdbqs,
        &db,
        Cell { lx: 2, ly: 2 },
        &chr,
        RunOptions::seeded(3),
    );
    let rec = r.stats.csv_record();
    assert_eq!(rec.len(), RunStats::CSV_HEADER.len());
    assert_eq!(rec[0], "lpdbqs");
    assert_eq!(rec[1], "64");
    let decision = rec.last().unwrap();
    assert!(decision == "busy" || decision.starts_with("ch"));
}

#[test]
fn imperfect_sensing_can_skip_a_true_channel() {
    let db = db(8, 0.3, 12);
    let chr = DeviceCharacteristics::full_range(&db.grid());
    let cell = Cell { lx: 1, ly: 1 };
    let mut sensing = SensingOracle::new(&db, 0.0, 1).unwrap();
    let r = run_lpdb(
        &db,
        cell,
        &chr,
        db.day(),
        &cfg(),
        &mut sensing,
        &RunOptions::default(),
    )
    .unwrap();
    // sensing always contradicts the DB, so every hit gets rejected
    assert_eq!(r.decision.outcome, Outcome::Busy);
    assert_eq!(
        r.decision.sensing_calls,
        (0..31).filter(|&c| db.is_available(cell, c)).count() as u64
    );
}
