use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cuckoo::{CuckooFilter, FilterParams, TableGeometry};

use super::HarnessError;

/// Distinct queries cycled through by each lookup thread.
const QUERY_SET: usize = 1 << 20;
/// Operations between clock reads.
const CLOCK_EVERY: usize = 4096;
/// Width of the load-factor window timed for each insert point.
const INSERT_WINDOW: f64 = 0.05;
/// Fill level for the lookup benchmark.
const LOOKUP_LOAD: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    LookupMops,
    InsertMops,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::LookupMops => "lookup_mops",
            Metric::InsertMops => "insert_mops",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub metric: Metric,
    /// f_p for lookups, α for inserts.
    pub x: f64,
    /// Million operations per second.
    pub value: f64,
    pub trials: u64,
    pub machine: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Payload size of the filter under test.
    pub filter_bytes: u64,
    pub epsilon: f64,
    pub beta: u32,
    pub duration: Duration,
    pub threads: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            filter_bytes: 112 << 20,
            epsilon: 1e-8,
            beta: 4,
            duration: Duration::from_secs(1),
            threads: 1,
            seed: 1,
        }
    }
}

impl BenchConfig {
    /// Largest power-of-two table whose payload fits in `filter_bytes`.
    fn geometry(&self) -> Result<FilterParams, HarnessError> {
        if self.duration < Duration::from_secs(1) {
            return Err(HarnessError::Config(format!(
                "duration {:?} is under one second",
                self.duration
            )));
        }
        if self.threads == 0 {
            return Err(HarnessError::Config("threads must be at least 1".into()));
        }
        let probe = FilterParams::derive(self.epsilon, self.beta, 1.0, 1)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut g = TableGeometry {
            bucket_count: 1,
            ..probe.geometry()
        };
        loop {
            let doubled = TableGeometry {
                bucket_count: g.bucket_count * 2,
                ..g
            };
            if doubled.payload_bytes() > self.filter_bytes {
                break;
            }
            g = doubled;
        }
        if g.payload_bytes() > self.filter_bytes {
            return Err(HarnessError::Config(format!(
                "filter_bytes {} below one bucket",
                self.filter_bytes
            )));
        }
        let capacity = g.slot_count();
        let params = FilterParams::derive(self.epsilon, self.beta, 1.0, capacity)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        debug_assert_eq!(params.geometry(), g);
        Ok(params)
    }
}

fn key(i: u64) -> [u8; 8] {
    i.to_le_bytes()
}

/// Fills a filter with keys `0, 1, …` until `target` items or the first Full.
fn fill(filter: &mut CuckooFilter, target: u64) -> u64 {
    let mut i = filter.item_count();
    while i < target {
        if !filter.insert(&key(i)).is_ok() {
            break;
        }
        i += 1;
    }
    i
}

/// Lookup throughput on a filter loaded to 95%, for each fraction of
/// positive queries. A hit takes a branch the predictor must guess, so
/// mixed workloads run slower than all-hit or all-miss ones.
pub fn bench_lookup(
    cfg: &BenchConfig,
    fp_fractions: &[f64],
) -> Result<Vec<BenchResult>, HarnessError> {
    let params = cfg.geometry()?;
    for &f in fp_fractions {
        if !(0.0..=1.0).contains(&f) {
            return Err(HarnessError::Config(format!("f_p {f}")));
        }
    }
    let slots = params.geometry().slot_count();
    let mut filter = CuckooFilter::new(&params, cfg.seed);
    let members = fill(&mut filter, (slots as f64 * LOOKUP_LOAD) as u64);
    if members == 0 {
        return Err(HarnessError::Capacity(
            "could not insert a single item".into(),
        ));
    }
    let machine = machine_fingerprint();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51);
    let mut out = Vec::with_capacity(fp_fractions.len());
    for &f_p in fp_fractions {
        let queries: Vec<[u8; 8]> = (0..QUERY_SET)
            .map(|_| {
                if rng.gen_bool(f_p) {
                    key(rng.gen_range(0..members))
                } else {
                    key(rng.gen_range(members..u64::MAX))
                }
            })
            .collect();
        let (ops, elapsed) = run_threads(cfg, |t, deadline| {
            let mut ops = 0u64;
            let mut hits = 0u64;
            let mut j = (t * QUERY_SET / cfg.threads) % QUERY_SET;
            loop {
                for _ in 0..CLOCK_EVERY {
                    if filter.lookup(&queries[j]) {
                        hits = black_box(hits + 1);
                    }
                    j += 1;
                    if j == QUERY_SET {
                        j = 0;
                    }
                }
                ops += CLOCK_EVERY as u64;
                if Instant::now() >= deadline {
                    black_box(hits);
                    return ops;
                }
            }
        });
        out.push(BenchResult {
            metric: Metric::LookupMops,
            x: f_p,
            value: ops as f64 / elapsed.as_secs_f64() / 1e6,
            trials: ops,
            machine: machine.clone(),
        });
    }
    Ok(out)
}

fn run_threads<F>(cfg: &BenchConfig, work: F) -> (u64, Duration)
where
    F: Fn(usize, Instant) -> u64 + Sync,
{
    let start = Instant::now();
    let deadline = start + cfg.duration;
    let work = &work;
    let ops = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.threads)
            .map(|t| s.spawn(move || work(t, deadline)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("benchmark thread panicked"))
            .sum()
    });
    (ops, start.elapsed())
}

/// Insert throughput near each load factor: every repetition fills a fresh
/// table untimed to `α − 0.05` and times the inserts up to `α`.
/// Repetitions continue until the configured duration is spent.
pub fn bench_insert(cfg: &BenchConfig, alphas: &[f64]) -> Result<Vec<BenchResult>, HarnessError> {
    let params = cfg.geometry()?;
    for &a in alphas {
        if !(a > 0.0 && a <= 1.0) {
            return Err(HarnessError::Config(format!("alpha {a}")));
        }
    }
    let slots = params.geometry().slot_count() as f64;
    let machine = machine_fingerprint();
    let mut out = Vec::with_capacity(alphas.len());
    for (k, &alpha) in alphas.iter().enumerate() {
        let from = (slots * (alpha - INSERT_WINDOW).max(0.0)) as u64;
        let to = (slots * alpha) as u64;
        let mut timed = Duration::ZERO;
        let mut ops = 0u64;
        let mut rep = 0u64;
        let wall = Instant::now();
        while rep == 0 || wall.elapsed() < cfg.duration {
            let mut filter =
                CuckooFilter::new(&params, cfg.seed.wrapping_add(rep * 0x9e37 + k as u64));
            let start = fill(&mut filter, from);
            if start < from {
                return Err(HarnessError::Capacity(format!(
                    "table full below alpha={alpha}"
                )));
            }
            let t = Instant::now();
            let end = fill(&mut filter, to);
            timed += t.elapsed();
            ops += end - start;
            rep += 1;
        }
        if ops == 0 || timed.is_zero() {
            return Err(HarnessError::Config(format!(
                "window at alpha={alpha} holds no inserts"
            )));
        }
        out.push(BenchResult {
            metric: Metric::InsertMops,
            x: alpha,
            value: ops as f64 / timed.as_secs_f64() / 1e6,
            trials: rep,
            machine: machine.clone(),
        });
    }
    Ok(out)
}

/// OS, architecture, core count and CPU model, for labeling results.
pub fn machine_fingerprint() -> String {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let model = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        })
        .unwrap_or_else(|| "unknown".into());
    format!(
        "{}-{} cpus={cpus} model={model}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

pub fn write_bench_csv<W: Write>(
    rows: &[BenchResult],
    cfg: &BenchConfig,
    out: W,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| HarnessError::Io(std::io::Error::other(e.to_string()));
    w.write_record([
        "metric",
        "x",
        "value",
        "trials",
        "threads",
        "filter_bytes",
        "machine",
    ])
    .map_err(io)?;
    for r in rows {
        w.write_record([
            r.metric.to_string(),
            r.x.to_string(),
            r.value.to_string(),
            r.trials.to_string(),
            cfg.threads.to_string(),
            cfg.filter_bytes.to_string(),
            r.machine.clone(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
