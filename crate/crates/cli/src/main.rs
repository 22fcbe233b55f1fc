use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vanet_core::oracle::verify_all;
use vanet_core::sim::{append_csv, run, write_csv, ModelKind, Scenario, ScenarioError, SimReport, CSV_HEADER};

mod sweep;

/// Output directory used when `--out` is not given.
pub const OUT_DIR_ENV: &str = "VANET_OUT_DIR";

#[derive(Parser)]
#[command(name = "vanet", version, about = "Deterministic VANET traffic-monitoring simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV row and event log.
    Run(RunArgs),
    /// Run a scenario across a parameter range, or tabulate the cost formulas.
    Sweep(sweep::SweepArgs),
    /// Check the protocol logic against the built-in reference suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    scenario: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Output directory (defaults to $VANET_OUT_DIR, then the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 500)]
    cases: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Parse(String),
    Invariant(String),
    Verify,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Verify => 1,
            Failure::Parse(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub fn parse_model(s: &str) -> Result<ModelKind, String> {
    ModelKind::ALL
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| format!("unknown model {s:?}; expected proposed, majority, reputation or peer_auth"))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_toml(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

pub fn simulate(s: &Scenario) -> Result<SimReport, Failure> {
    let report = run(s).map_err(|e| match e {
        ScenarioError::Parse(e) => Failure::Parse(e.to_string()),
        ScenarioError::Invalid(m) => Failure::Parse(m),
    })?;
    report.check_invariants().map_err(Failure::Invariant)?;
    Ok(report)
}

pub fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."))
}

/// Appends rows to `path`, writing the header first if the file is new or empty.
pub fn append_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    if !fresh {
        let mut first = String::new();
        BufReader::new(File::open(path)?).read_line(&mut first)?;
        if first.trim_end() != header.join(",") {
            return Err(Failure::Io(format!("{}: existing file has a different header", path.display())));
        }
    }
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(header)?;
    }
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let mut s = load_scenario(&args.scenario)?;
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(m) = args.model {
        s.model = m;
    }
    let report = simulate(&s)?;

    let dir = out_dir(args.out);
    fs::create_dir_all(&dir)?;
    let stem = args.scenario.file_stem().and_then(|x| x.to_str()).unwrap_or("run");
    let csv_path = dir.join(format!("{stem}.csv"));
    let fresh = fs::metadata(&csv_path).map(|m| m.len() == 0).unwrap_or(true);
    if fresh {
        write_csv(File::create(&csv_path)?, [&report])?;
    } else {
        append_rows(&csv_path, &CSV_HEADER, &[])?;
        append_csv(OpenOptions::new().append(true).open(&csv_path)?, [&report])?;
    }
    let log_path = dir.join(format!("{stem}.events.jsonl"));
    let mut log = BufWriter::new(File::create(&log_path)?);
    for entry in &report.log {
        serde_json::to_writer(&mut log, entry).map_err(|e| Failure::Io(e.to_string()))?;
        log.write_all(b"\n")?;
    }
    log.flush()?;

    let time = report.decision_time_s().map(|t| format!("{t:.3} s")).unwrap_or_else(|| "none".into());
    println!(
        "{}: verdict {} ({}), accuracy {}, {} vehicle broadcasts, {} transmissions, decision at {time}",
        report.path,
        report.verdict_label(),
        report.basis,
        report.accuracy,
        report.vehicle_broadcasts(),
        report.total_transmissions(),
    );
    if let Some(d) = &report.decision {
        let ids: Vec<&str> = d.mal_list.iter().map(|v| v.as_str()).collect();
        println!("malicious: {}", if ids.is_empty() { "-".to_string() } else { ids.join(" ") });
    }
    println!("wrote {} and {}", csv_path.display(), log_path.display());
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut ok = true;
    for r in verify_all(args.cases, args.seed) {
        if r.passed() {
            println!("PASS {} ({} cases)", r.name, r.cases);
        } else {
            ok = false;
            println!("FAIL {} ({} of {} cases)", r.name, r.failures, r.cases);
            if let Some(f) = r.first_failure {
                println!("  first failure: {f}");
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => sweep::cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Parse(m) => eprintln!("invalid scenario: {m}"),
                Failure::Invariant(m) => eprintln!("invariant violated: {m}"),
                Failure::Verify => eprintln!("verification failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
