//! Command-line front end: design, optimize, simulate, memory and decode.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 on a data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mimqms::channel::{channel_llr, design_snr_from_sigma, quantize_observation};
use mimqms::codes::{joint_from_codes, JointDegreeDistribution, TannerCode};
use mimqms::decoders::{bp_decode, nms_decode, qms_decode, NmsQuantizer};
use mimqms::harness::{self, CountingPolicy, DecoderSpec, Experiment, ExperimentConfig, MemoryParams};
use mimqms::lutopt::{optimize, DEFAULT_Q_STAR};
use mimqms::mimde::{design_schedule, select_design_sigma, SIGMA_TIE_TOL};
use mimqms::{schedule_file, Error, LutSchedule};

#[derive(Parser)]
#[command(name = "mimqms", version, about = "Memory-efficient MIM-QMS LDPC decoder toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a per-iteration LUT schedule by density evolution.
    Design(DesignArgs),
    /// Merge the LUTs of a schedule into shared groups.
    Optimize(OptimizeArgs),
    /// Monte-Carlo FER/BER/I_avg simulation, written as CSV.
    Simulate(SimulateArgs),
    /// Memory requirement of the proposed and reference decoders.
    Memory(MemoryArgs),
    /// Decode a single frame and print the result.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Codes whose joint degree distribution is designed for (repeatable).
    #[arg(long = "code", required = true)]
    codes: Vec<String>,
    /// Design noise standard deviation.
    #[arg(long, conflicts_with = "tau_grid")]
    sigma: Option<f64>,
    /// Design-SNR grid in dB as `start:stop:step`; the best σ is selected.
    #[arg(long)]
    tau_grid: Option<String>,
    #[arg(long, default_value_t = 4)]
    q_m: u32,
    #[arg(long, default_value_t = 8)]
    q_v: u32,
    #[arg(long, default_value_t = 30)]
    i_max: usize,
    /// Worker threads for the σ grid search.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    schedule: PathBuf,
    /// Codes of the ensemble; defaults to the ensemble stored in the schedule.
    #[arg(long = "code")]
    codes: Vec<String>,
    /// Evaluation σ; defaults to the schedule's design σ.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_Q_STAR)]
    q_star: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment file; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    /// `nms`, `bp`, `fixture:r23|r34|r56|rc` or a schedule file.
    #[arg(long)]
    schedule: Option<String>,
    /// Comma-separated E_b/N_0 points in dB.
    #[arg(long, value_delimiter = ',')]
    snr: Vec<f64>,
    #[arg(long)]
    min_frame_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Iteration cap of the NMS and BP baselines.
    #[arg(long)]
    i_max: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MemoryArgs {
    /// Rate-compatible schedule.
    #[arg(long)]
    proposed: String,
    /// Rate-specific schedules as `label=schedule` (repeatable).
    #[arg(long = "rate-specific")]
    rate_specific: Vec<String>,
    /// Codes served by the decoders (repeatable).
    #[arg(long = "code", required = true)]
    codes: Vec<String>,
    #[arg(long, default_value_t = 4)]
    q_l: u32,
    /// Count every iteration's tables instead of one per group.
    #[arg(long)]
    per_iteration: bool,
    #[arg(long, default_value_t = 30)]
    i_max: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// `nms`, `bp`, `fixture:...` or a schedule file.
    #[arg(long)]
    schedule: String,
    #[arg(long)]
    code: String,
    /// File of whitespace-separated channel values.
    input: PathBuf,
    /// Interpret the input as quantizer indices instead of channel outputs.
    #[arg(long)]
    indices: bool,
    /// Noise σ used to form LLRs from channel outputs.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 30)]
    i_max: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Design(a) => design(a),
        Command::Optimize(a) => run_optimize(a),
        Command::Simulate(a) => simulate(a),
        Command::Memory(a) => memory(a),
        Command::Decode(a) => decode(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult = std::result::Result<(), CliError>;

fn load_codes(specs: &[String]) -> Result<Vec<TannerCode>, Error> {
    specs.iter().map(|s| harness::load_code(s)).collect()
}

fn ensemble_of(codes: &[TannerCode]) -> Result<JointDegreeDistribution, Error> {
    joint_from_codes(&codes.iter().collect::<Vec<_>>())
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid '{spec}' is not start:stop:step"));
    let parts: Vec<f64> = spec.split(':').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    // integer stepping keeps grid points free of accumulated drift
    Ok((0..=n).map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9).collect())
}

fn write_or_print(path: Option<&PathBuf>, text: &str) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Data(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn design(a: DesignArgs) -> CliResult {
    let codes = load_codes(&a.codes)?;
    let ensemble = ensemble_of(&codes)?;
    let sigma = match (a.sigma, a.tau_grid.as_deref()) {
        (Some(s), _) => s,
        (None, Some(grid)) => {
            let grid = parse_grid(grid)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(a.workers.max(1))
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let sel = pool.install(|| select_design_sigma(&ensemble, a.q_m, a.q_v, a.i_max, &grid, SIGMA_TIE_TOL))?;
            for c in &sel.candidates {
                eprintln!("tau {:.2} dB  sigma {:.4}  MI {:.8}", c.tau_db, c.sigma, c.mi);
            }
            sel.sigma
        }
        (None, None) => return Err(CliError::Usage("give --sigma or --tau-grid".into())),
    };
    let schedule = design_schedule(&ensemble, sigma, a.q_m, a.q_v, a.i_max)?;
    schedule_file::save(&schedule, &a.output)?;
    eprintln!(
        "designed sigma {:.4} (tau {:.2} dB), final MI {:.8}",
        sigma,
        design_snr_from_sigma(sigma, ensemble.design_rate())?,
        schedule.mi_trace.last().copied().unwrap_or(0.0)
    );
    Ok(())
}

fn run_optimize(a: OptimizeArgs) -> CliResult {
    let schedule = schedule_file::load(&a.schedule)?;
    let ensemble = if a.codes.is_empty() {
        schedule
            .ensemble
            .clone()
            .ok_or_else(|| CliError::Usage("schedule has no stored ensemble; pass --code".into()))?
    } else {
        ensemble_of(&load_codes(&a.codes)?)?
    };
    let sigma = a.sigma.unwrap_or(schedule.design_sigma);
    let out = optimize(&schedule, &ensemble, sigma, a.q_star)?;
    schedule_file::save(&out.schedule, &a.output)?;
    eprintln!("Q {:.8} -> {:.8}{}", out.q_initial, out.q_final, if out.schedule.flags.no_merge { " (no merge)" } else { "" });
    for k in &out.kinds {
        eprintln!("{:<8} M = {:<3} threshold {:.4}", k.kind.name(), k.partition.len(), k.delta_star);
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> CliResult {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(
            a.code.clone().ok_or_else(|| CliError::Usage("give --config or --code".into()))?,
            a.schedule.clone().ok_or_else(|| CliError::Usage("give --config or --schedule".into()))?,
            a.snr.clone(),
        ),
    };
    if let Some(c) = a.code {
        cfg.code = c;
    }
    if let Some(s) = a.schedule {
        cfg.schedule = s;
    }
    if !a.snr.is_empty() {
        cfg.snr_db = a.snr;
    }
    if let Some(v) = a.min_frame_errors {
        cfg.min_frame_errors = v;
    }
    if let Some(v) = a.max_frames {
        cfg.max_frames = v;
    }
    if let Some(v) = a.workers {
        cfg.workers = v;
    }
    if let Some(v) = a.i_max {
        cfg.i_max = v;
    }
    cfg.apply_env()?;
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if cfg.snr_db.is_empty() {
        return Err(CliError::Usage("no SNR points; pass --snr".into()));
    }
    let exp = Experiment::from_config(&cfg)?;
    let records = harness::run_fer(&exp)?;
    write_or_print(a.output.as_ref(), &harness::emit_csv(&records))
}

fn memory(a: MemoryArgs) -> CliResult {
    let proposed = harness::load_schedule(&a.proposed)?;
    let mut specific: Vec<(String, LutSchedule)> = Vec::new();
    for item in &a.rate_specific {
        let (label, path) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("'{item}' is not label=schedule")))?;
        specific.push((label.to_string(), harness::load_schedule(path)?));
    }
    let codes = load_codes(&a.codes)?;
    let params = MemoryParams {
        q_l: a.q_l,
        policy: if a.per_iteration { CountingPolicy::PerIteration } else { CountingPolicy::Dedup },
        i_max: a.i_max,
        q_m: proposed.q_m,
        q_v: proposed.q_v,
    };
    let refs: Vec<(&str, &LutSchedule)> = specific.iter().map(|(l, s)| (l.as_str(), s)).collect();
    let report = harness::memory_report(&proposed, &refs, &codes.iter().collect::<Vec<_>>(), params)?;
    let mut text = report.to_table();
    if let Some(r) = report.reduction(harness::PROPOSED, harness::LUT_BASED) {
        text.push_str(&format!("reduction vs LUT-based model: {:.2}%\n", 100.0 * r));
    }
    write_or_print(a.output.as_ref(), &text)
}

fn decode(a: DecodeArgs) -> CliResult {
    let code = harness::load_code(&a.code)?;
    let text = std::fs::read_to_string(&a.input).map_err(|e| CliError::Data(e.into()))?;
    let values: Vec<f64> = text
        .split_whitespace()
        .enumerate()
        .map(|(i, t)| t.parse().map_err(|_| CliError::Data(Error::InvalidInput(format!("value {} ('{t}') is not a number", i + 1)))))
        .collect::<Result<_, _>>()?;
    let spec = match a.schedule.as_str() {
        "nms" => DecoderSpec::Nms { scale: 0.75, i_max: a.i_max },
        "bp" => DecoderSpec::Bp { i_max: a.i_max },
        other => DecoderSpec::Qms(Box::new(harness::load_schedule(other)?)),
    };
    let llr = |v: &[f64]| v.iter().map(|&y| channel_llr(y, a.sigma)).collect::<Vec<_>>();
    let r = match &spec {
        DecoderSpec::Qms(s) => {
            let idx: Vec<u8> = if a.indices {
                values
                    .iter()
                    .map(|&v| if v >= 0.0 && v.fract() == 0.0 && v < 256.0 { Ok(v as u8) } else { Err(()) })
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::Data(Error::InvalidInput("indices must be small non-negative integers".into())))?
            } else {
                values.iter().map(|&y| quantize_observation(&s.channel, y, a.sigma) as u8).collect()
            };
            qms_decode(&code, &idx, s)?
        }
        DecoderSpec::Nms { scale, i_max } => nms_decode(&code, &llr(&values), *i_max, *scale, NmsQuantizer::for_sigma(a.sigma))?,
        DecoderSpec::Bp { i_max } => bp_decode(&code, &llr(&values), *i_max)?,
    };
    let bits: String = r.bits.iter().map(|b| char::from(b'0' + b)).collect();
    println!(
        "{{\"converged\": {}, \"iterations_used\": {}, \"bit_errors_vs_zero\": {}, \"bits\": \"{}\"}}",
        r.converged,
        r.iterations_used,
        r.bits.iter().filter(|&&b| b == 1).count(),
        bits
    );
    Ok(())
}
