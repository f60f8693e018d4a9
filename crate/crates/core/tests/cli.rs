//! End-to-end runs of the `mimqms` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mimqms")).args(args).env_remove("MIMQMS_SEED").output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mimqms-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--snr", "abc"]).status.code(), Some(1));
    let bad_code = run(&["simulate", "--code", "ieee80211n:r99", "--schedule", "nms", "--snr", "3"]);
    assert_eq!(bad_code.status.code(), Some(2));
    let missing = run(&["memory", "--proposed", "/nonexistent/x.lut", "--code", "ieee80211n:r23"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn simulate_is_worker_independent() {
    let args = |w: &'static str| {
        vec!["simulate", "--code", "ieee80211n:r23", "--schedule", "fixture:rc", "--snr", "2.0,2.4", "--max-frames", "96", "--min-frame-errors", "1000", "--seed", "5", "--workers", w]
    };
    let a = run(&args("1"));
    let b = run(&args("4"));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("snr_db,frames,frame_errors,bit_errors,fer,ber,i_avg"));
}

#[test]
fn design_optimize_memory_pipeline() {
    let designed = scratch("designed.lut");
    let optimized = scratch("optimized.lut");
    let d = designed.to_str().unwrap();
    let o = optimized.to_str().unwrap();
    let r = run(&["design", "--code", "ieee80211n:r23", "--code", "ieee80211n:r34", "--code", "ieee80211n:r56", "--sigma", "0.6195", "--output", d]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let r = run(&["optimize", d, "--output", o]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let r = run(&["memory", "--proposed", o, "--code", "ieee80211n:r23", "--code", "ieee80211n:r34", "--code", "ieee80211n:r56"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(stdout(&r).contains("reduction vs LUT-based model"));
}

#[test]
fn decode_all_zero_frame() {
    let input = scratch("frame.txt");
    std::fs::write(&input, vec!["0.9"; 1296].join(" ")).unwrap();
    for schedule in ["fixture:rc", "nms", "bp"] {
        let r = run(&["decode", "--schedule", schedule, "--code", "ieee80211n:r23", "--sigma", "0.7", input.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
        assert!(stdout(&r).contains("\"converged\": true"), "{schedule}: {}", stdout(&r));
    }
}
