use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dic::harness::{self, CheckLevel, RunConfig};
use dic::omv::{naive_multiply, parse_vector, C1Index, C1Matrix, DenseMatrix};
use dic::sls::SlsMode;
use dic::trace::{format_trace, parse_trace, generate, GenParams, TraceKind};

#[derive(Parser)]
#[command(name = "dic", version, about = "Dynamic interval coloring toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic update trace (JSONL, one event per line).
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Number of update events.
        #[arg(long)]
        n: usize,
        /// Per-step delete probability (mixed traces only).
        #[arg(long, default_value_t = 0.0)]
        delete_prob: f64,
        /// Coordinates are drawn from [0, coord-max].
        #[arg(long, default_value_t = 1_000_000)]
        coord_max: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace and emit a report.
    Run {
        #[command(flatten)]
        replay: ReplayArgs,
        /// When to audit the engine state against the reference checkers.
        #[arg(long, value_enum, default_value = "final")]
        check: CheckArg,
    },
    /// Replay with checks after every update (run --check every-update).
    Verify {
        #[command(flatten)]
        replay: ReplayArgs,
    },
    /// Timed replays; checks disabled, warm-up excluded.
    Bench {
        #[command(flatten)]
        replay: ReplayArgs,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
    /// Online matrix-vector products over a consecutive-ones matrix.
    Omv {
        /// Matrix file: a dimension line, then one 0/1 row per line.
        #[arg(long)]
        matrix: PathBuf,
        /// Query vectors, one 0/1 line each; stdin when omitted.
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Use the dense fallback instead of the interval index.
        #[arg(long)]
        naive: bool,
    },
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_enum, default_value = "dynamic")]
    mode: ModeArg,
    /// Report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Recorded in the report for provenance; does not affect the replay.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Uniform,
    Nested,
    Mixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Incremental,
    Dynamic,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    None,
    Final,
    #[value(alias = "every_update")]
    EveryUpdate,
}

impl From<KindArg> for TraceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Uniform => TraceKind::Uniform,
            KindArg::Nested => TraceKind::Nested,
            KindArg::Mixed => TraceKind::Mixed,
        }
    }
}

impl From<ModeArg> for SlsMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Incremental => SlsMode::Incremental,
            ModeArg::Dynamic => SlsMode::Dynamic,
        }
    }
}

impl From<CheckArg> for CheckLevel {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::None => CheckLevel::None,
            CheckArg::Final => CheckLevel::Final,
            CheckArg::EveryUpdate => CheckLevel::EveryUpdate,
        }
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DIC_LOG")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match command {
        Command::Gen { kind, n, delete_prob, coord_max, seed, out } => {
            let events = generate(GenParams {
                kind: kind.into(),
                n,
                delete_prob,
                coord_max,
                seed,
            })?;
            emit(out.as_deref(), &format_trace(&events))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { replay, check } => replay_trace(replay, check.into()),
        Command::Verify { replay } => replay_trace(replay, CheckLevel::EveryUpdate),
        Command::Bench { replay, repeat } => {
            let events = load_trace(&replay.trace)?;
            log::info!("benchmarking {} updates x{repeat}", events.len());
            let report = harness::bench(&events, replay.mode.into(), repeat, replay.seed)?;
            emit(replay.report.as_deref(), &report.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Omv { matrix, vectors, naive } => run_omv(&matrix, vectors.as_deref(), naive),
    }
}

fn replay_trace(replay: ReplayArgs, check: CheckLevel) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let events = load_trace(&replay.trace)?;
    log::info!("replaying {} updates", events.len());
    let config = RunConfig { mode: replay.mode.into(), check, seed: replay.seed };
    let outcome = harness::run(&events, config)?;
    emit(replay.report.as_deref(), &outcome.report.to_json())?;
    if let Some(violation) = outcome.violation {
        eprintln!("check failed: {violation}");
        return Ok(ExitCode::from(EXIT_CHECK_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_omv(
    matrix: &Path,
    vectors: Option<&Path>,
    naive: bool,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let text = fs::read_to_string(matrix)?;
    enum Backend {
        Indexed(C1Index),
        Dense(DenseMatrix),
    }
    let backend = if naive {
        Backend::Dense(DenseMatrix::parse(&text)?)
    } else {
        Backend::Indexed(C1Index::build(&C1Matrix::parse(&text)?))
    };
    let n = match &backend {
        Backend::Indexed(idx) => idx.n(),
        Backend::Dense(m) => m.n,
    };

    let reader: Box<dyn BufRead> = match vectors {
        Some(path) => Box::new(BufReader::new(fs::File::open(path)?)),
        None => Box::new(BufReader::new(io::stdin())),
    };
    let mut out = io::stdout().lock();
    // Online contract: each product is written (and flushed) before the next
    // vector is read.
    for line in reader.lines() {
        let line = line?;
        let v = parse_vector(&line, n)?;
        let product = match &backend {
            Backend::Indexed(idx) => idx.multiply(&v)?,
            Backend::Dense(m) => naive_multiply(m, &v)?,
        };
        writeln!(out, "{}", dic::omv::format_bits(&product))?;
        out.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn load_trace(path: &Path) -> Result<Vec<dic::trace::UpdateEvent>, Box<dyn std::error::Error>> {
    Ok(parse_trace(&fs::read_to_string(path)?)?)
}

fn emit(path: Option<&Path>, payload: &str) -> io::Result<()> {
    match path {
        Some(path) => {
            let mut text = payload.to_string();
            if !text.ends_with('\n') {
                text.push('\n');
            }
            fs::write(path, text)
        }
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{}", payload.trim_end_matches('\n'))
        }
    }
}
