use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ws_privdb::cost_model::Sweep;
use ws_privdb::harness::{
    self, bench_insert, bench_lookup, parse_axis, parse_sizing, write_bench_csv, BenchConfig,
    HarnessError, Scenario,
};
use ws_privdb::protocols::ProtocolKind;
use ws_privdb::spectrum::{read_csv, write_csv, ParamDomain};

const SEED_ENV: &str = "WS_PRIVDB_SEED";

#[derive(Parser)]
#[command(
    name = "ws-privdb",
    version,
    about = "Location-private spectrum database experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run protocol executions and print one CSV row per trial.
    Simulate {
        /// key=value scenario file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Ground truth written by `groundtruth dump`.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure filter false-positive rates against a member-set oracle.
    Fprate {
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.01,0.001")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        beta: u32,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        /// Items inserted; by default the table is filled to alpha.
        #[arg(long)]
        members: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        probes: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lookup or insert throughput in million operations per second.
    Throughput {
        #[arg(long, value_enum, default_value_t = Mode::Lookup)]
        mode: Mode,
        #[arg(long, default_value_t = 112.0)]
        filter_mb: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        fp_fractions: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95"
        )]
        alphas: Vec<f64>,
        /// Seconds per point.
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 1e-8)]
        epsilon: f64,
        #[arg(long, default_value_t = 4)]
        beta: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cost-model table for one figure: fig3, fig4, fig5a, fig5b, fig6 or table2.
    Costmodel {
        figure: String,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write or check a ground-truth CSV.
    Groundtruth {
        #[command(subcommand)]
        action: GroundTruth,
    },
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum GroundTruth {
    /// Generate the scenario's ground truth as CSV.
    Dump {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a dump and print its shape.
    Load {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lookup,
    Insert,
}

#[derive(Args, Default)]
struct ScenarioArgs {
    #[arg(long)]
    side: Option<u32>,
    #[arg(long)]
    n_ch: Option<u16>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    day: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    beta: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_kicks: Option<u32>,
    /// pow2 or exact
    #[arg(long)]
    sizing: Option<String>,
    /// lpdb, lpdb-leak or lpdbqs
    #[arg(long)]
    protocol: Option<String>,
    /// x or y
    #[arg(long)]
    leak_axis: Option<String>,
    #[arg(long)]
    sensing_accuracy: Option<f64>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    m_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    rho_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<u32>>,
    #[arg(long = "eps-values", value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    m_fixed: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
}

impl SweepArgs {
    fn build(self) -> Sweep {
        let d = Sweep::default();
        Sweep {
            m_values: self.m_values.unwrap_or(d.m_values),
            rho_values: self.rho_values.unwrap_or(d.rho_values),
            betas: self.betas.unwrap_or(d.betas),
            epsilons: self.epsilons.unwrap_or(d.epsilons),
            m_fixed: self.m_fixed.unwrap_or(d.m_fixed),
            k: self.k.unwrap_or(d.k),
            r: self.r.unwrap_or(d.r),
        }
    }
}

fn env_seed() -> Result<Option<u64>, HarnessError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::Config(format!("{SEED_ENV}: cannot parse `{v}`"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(HarnessError::Config(format!("{SEED_ENV}: {e}"))),
    }
}

fn seed_or_env(seed: u64) -> Result<u64, HarnessError> {
    Ok(env_seed()?.unwrap_or(seed))
}

fn scenario(config: Option<PathBuf>, a: ScenarioArgs) -> Result<Scenario, HarnessError> {
    let mut s = match config {
        Some(path) => Scenario::parse(
            &std::fs::read_to_string(&path)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?,
        )?,
        None => Scenario::default(),
    };
    let bad = |what: &str, v: &str| HarnessError::Config(format!("{what}: `{v}`"));
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = a.$f { s.$f = v; })* };
    }
    set!(
        side,
        n_ch,
        rho,
        day,
        epsilon,
        beta,
        alpha,
        max_kicks,
        sensing_accuracy,
        trials,
        seed
    );
    if let Some(v) = a.sizing {
        s.sizing = parse_sizing(&v).ok_or_else(|| bad("sizing", &v))?;
    }
    if let Some(v) = a.protocol {
        s.protocol = ProtocolKind::parse(&v).ok_or_else(|| bad("protocol", &v))?;
    }
    if let Some(v) = a.leak_axis {
        s.leak_axis = parse_axis(&v).ok_or_else(|| bad("leak_axis", &v))?;
    }
    if let Some(seed) = env_seed()? {
        s.seed = seed;
    }
    s.validate()?;
    Ok(s)
}

fn output(path: Option<PathBuf>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(&p).map_err(|e| {
                HarnessError::Config(format!("{}: {e}", p.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &PathBuf) -> Result<BufReader<File>, HarnessError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate {
            config,
            ground_truth,
            scenario: a,
            out,
        } => {
            let s = scenario(config, a)?;
            let db = match ground_truth {
                Some(p) => Some(read_csv(open(&p)?, ParamDomain::default())?),
                None => None,
            };
            let rows = harness::simulate(&s, db.as_ref())?;
            let mut w = output(out)?;
            harness::write_stats_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Command::Fprate {
            epsilons,
            beta,
            alpha,
            members,
            probes,
            seed,
            out,
        } => {
            let rows =
                harness::fprate(&epsilons, beta, alpha, members, probes, seed_or_env(seed)?)?;
            let mut w = output(out)?;
            harness::write_fprate_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Command::Throughput {
            mode,
            filter_mb,
            fp_fractions,
            alphas,
            duration,
            threads,
            epsilon,
            beta,
            seed,
            out,
        } => {
            if !(filter_mb > 0.0 && duration.is_finite() && duration >= 0.0) {
                return Err(HarnessError::Config(format!(
                    "filter_mb {filter_mb}, duration {duration}"
                )));
            }
            let cfg = BenchConfig {
                filter_bytes: (filter_mb * (1u64 << 20) as f64) as u64,
                epsilon,
                beta,
                duration: Duration::from_secs_f64(duration),
                threads,
                seed: seed_or_env(seed)?,
            };
            let rows = match mode {
                Mode::Lookup => bench_lookup(&cfg, &fp_fractions)?,
                Mode::Insert => bench_insert(&cfg, &alphas)?,
            };
            let mut w = output(out)?;
            write_bench_csv(&rows, &cfg, &mut w)?;
            w.flush()?;
        }
        Command::Costmodel {
            figure,
            scenario: a,
            sweep,
            out,
        } => {
            let s = scenario(None, a)?;
            let mut w = output(out)?;
            harness::costmodel(&figure, &s, &sweep.build(), &mut w)?;
            w.flush()?;
        }
        Command::Groundtruth { action } => match action {
            GroundTruth::Dump {
                config,
                scenario: a,
                out,
            } => {
                let db = harness::generate_db(&scenario(config, a)?)?;
                let mut w = output(out)?;
                write_csv(&db, &mut w)?;
                w.flush()?;
            }
            GroundTruth::Load { file, out } => {
                let db = read_csv(open(&file)?, ParamDomain::default())?;
                let g = db.grid();
                let mut w = output(out)?;
                writeln!(w, "m,n_ch,day,available,rho")?;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    g.m(),
                    g.n_ch,
                    db.day().0,
                    db.available_count(),
                    db.realized_rho()
                )?;
                w.flush()?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
