//! Short Monte-Carlo FER curve of the rate-compatible fixture schedule on the
//! rate-2/3 code, written as CSV to stdout.

use mimqms::harness::{emit_csv, run_fer, Experiment, ExperimentConfig};

fn main() -> mimqms::Result<()> {
    let mut cfg = ExperimentConfig::new("ieee80211n:r23", "fixture:rc", vec![2.0, 2.4, 2.8]);
    cfg.min_frame_errors = 50;
    cfg.max_frames = 2000;
    cfg.seed = 1;
    cfg.workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let records = run_fer(&Experiment::from_config(&cfg)?)?;
    print!("{}", emit_csv(&records));
    Ok(())
}
