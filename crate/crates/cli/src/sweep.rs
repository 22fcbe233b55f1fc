use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use vanet_core::metrics::{displayed, energy_mw, total_transmissions, vehicle_broadcasts, CostModel, ModelPath};
use vanet_core::sim::{ModelKind, Scenario, SimReport, SweepAxis, CSV_HEADER};

use crate::{append_rows, load_scenario, out_dir, parse_model, simulate, Failure};

#[derive(Args)]
pub struct SweepArgs {
    /// Base scenario file (not needed with --formula).
    #[arg(required_unless_present = "formula")]
    base: Option<PathBuf>,
    /// Axis and inclusive range, e.g. malicious_pct=0..90:10 or rsu_spacing=1000..2500.
    #[arg(long)]
    vary: Option<String>,
    /// Comma-separated models, or "all".
    #[arg(long, default_value = "all")]
    models: String,
    /// Runs per point; run k uses the base seed plus k.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Tabulate transmission counts from the closed-form cost model instead of simulating.
    #[arg(long)]
    formula: bool,
    #[arg(long, default_value_t = 3)]
    threshold: u64,
    #[arg(long, default_value_t = 5)]
    n_rsu: u64,
    /// Output CSV; rows are appended. Defaults to sweep.csv in $VANET_OUT_DIR or the current directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub axis: String,
    pub values: Vec<f64>,
}

fn default_step(axis: &str) -> f64 {
    match axis {
        "rsu_spacing" => 500.0,
        "poc_distance" => 5.0,
        _ => 10.0,
    }
}

/// Parses `axis=lo..hi[:step]`.
pub fn parse_range(spec: &str) -> Result<Range, String> {
    let (axis, rest) = spec.split_once('=').ok_or("expected axis=lo..hi[:step]")?;
    let (span, step) = match rest.split_once(':') {
        Some((span, step)) => (span, Some(step)),
        None => (rest, None),
    };
    let (lo, hi) = span.split_once("..").ok_or("expected lo..hi")?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("not a number: {s:?}"));
    let (lo, hi) = (num(lo)?, num(hi)?);
    let step = match step {
        Some(s) => num(s)?,
        None => default_step(axis),
    };
    if step.is_nan() || step <= 0.0 || hi < lo {
        return Err("need lo <= hi and a positive step".into());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok(Range { axis: axis.to_string(), values: (0..count).map(|k| lo + step * k as f64).collect() })
}

fn parse_models(s: &str) -> Result<Vec<ModelKind>, String> {
    if s == "all" {
        return Ok(ModelKind::ALL.to_vec());
    }
    s.split(',').map(|m| parse_model(m.trim())).collect()
}

pub fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| Failure::Io(e.to_string()))?;
    }
    let out = args.out.clone().unwrap_or_else(|| out_dir(None).join("sweep.csv"));
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    if args.formula {
        return formula(&args, out);
    }
    let base = load_scenario(args.base.as_ref().expect("clap requires a base scenario"))?;
    let range = match &args.vary {
        Some(v) => parse_range(v).map_err(Failure::Parse)?,
        None => return Err(Failure::Parse("--vary is required unless --formula is given".into())),
    };
    let axis = SweepAxis::parse(&range.axis).ok_or_else(|| {
        Failure::Parse(format!("unknown axis {:?}; expected malicious_pct, poc_distance or rsu_spacing", range.axis))
    })?;
    let models = parse_models(&args.models).map_err(Failure::Parse)?;

    let mut jobs: Vec<(f64, u64, Scenario)> = Vec::new();
    for &value in &range.values {
        for &model in &models {
            for k in 0..args.seeds {
                let mut s = base.clone();
                s.set_axis(axis, value).map_err(|e| Failure::Parse(e.to_string()))?;
                s.model = model;
                s.seed = base.seed.wrapping_add(k);
                s.validate().map_err(|e| Failure::Parse(format!("{}={value}: {e}", axis.as_str())))?;
                jobs.push((value, s.seed, s));
            }
        }
    }
    let results: Vec<Result<SimReport, Failure>> = jobs.par_iter().map(|(_, _, s)| simulate(s)).collect();

    let mut header = vec!["axis", "value", "seed"];
    header.extend(CSV_HEADER);
    let mut rows = Vec::with_capacity(jobs.len());
    let mut reports = Vec::with_capacity(jobs.len());
    for ((value, seed, _), r) in jobs.iter().zip(results) {
        let r = r?;
        let mut row = vec![axis.as_str().to_string(), value.to_string(), seed.to_string()];
        row.extend(r.csv_record());
        rows.push(row);
        reports.push((*value, r));
    }
    append_rows(&out, &header, &rows)?;

    println!("{:>10}  {:<16} {:>9} {:>15}", axis.as_str(), "model", "accuracy", "mean time (s)");
    for &value in &range.values {
        for &model in &models {
            let group: Vec<&SimReport> =
                reports.iter().filter(|(v, r)| *v == value && r.model == model).map(|(_, r)| r).collect();
            let acc = group.iter().map(|r| r.accuracy).sum::<f64>() / group.len() as f64;
            let times: Vec<f64> = group.iter().filter_map(|r| r.decision_time_s()).collect();
            let time = if times.is_empty() {
                "-".to_string()
            } else {
                format!("{:.2}", times.iter().sum::<f64>() / times.len() as f64)
            };
            println!("{value:>10}  {:<16} {acc:>9.3} {time:>15}", model.as_str());
        }
    }
    println!("{} runs appended to {}", rows.len(), out.display());
    Ok(())
}

fn formula(args: &SweepArgs, out: PathBuf) -> Result<(), Failure> {
    let range = match &args.vary {
        Some(v) => parse_range(v).map_err(Failure::Parse)?,
        None => parse_range("n=30..100:10").expect("default range parses"),
    };
    if range.axis != "n" {
        return Err(Failure::Parse("formula mode varies n only".into()));
    }
    let header =
        ["n", "threshold", "n_rsu", "model", "total_transmissions", "exact", "energy_mw", "vehicle_broadcasts"];
    let mut rows = Vec::new();
    for &n in &range.values {
        let c = CostModel { n: n as u64, threshold: args.threshold, n_rsu: args.n_rsu };
        for path in ModelPath::ALL {
            let total = total_transmissions(path, c);
            rows.push(vec![
                c.n.to_string(),
                c.threshold.to_string(),
                c.n_rsu.to_string(),
                path.as_str().to_string(),
                displayed(total).to_string(),
                total.to_string(),
                displayed(energy_mw(path, c)).to_string(),
                vehicle_broadcasts(path, c.n, c.threshold).to_string(),
            ]);
        }
    }
    append_rows(&out, &header, &rows)?;
    println!("{:>4}  {:<16} {:>12}", "n", "model", "transmissions");
    for r in &rows {
        println!("{:>4}  {:<16} {:>12}", r[0], r[3], r[4]);
    }
    println!("{} rows appended to {}", rows.len(), out.display());
    Ok(())
}
