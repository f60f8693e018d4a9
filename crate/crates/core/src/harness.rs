//! Monte-Carlo FER/BER/I_avg experiments, CSV output and the decoder memory model.
//!
//! Simulations transmit the all-zero codeword. Frame `f` at SNR index `k` draws
//! its noise from a ChaCha stream keyed by `(seed, k, f)`, and frames are decoded
//! in fixed-size batches with the stopping rule checked between batches, so the
//! results do not depend on the number of workers.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{bpsk_awgn_transmit, channel_llr, quantize_observation, sigma_from_design_snr};
use crate::codes::{self, ieee80211n, joint_from_codes, TannerCode};
use crate::decoders::{BpDecoder, DecodeResult, NmsDecoder, NmsQuantizer, QmsDecoder};
use crate::error::{Error, Result};
use crate::lutopt::LutKind;
use crate::mimde::LutSchedule;
use crate::schedule_file;

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "MIMQMS_SEED";

pub const CONFIG_VERSION: u32 = 1;

fn default_min_frame_errors() -> u64 {
    100
}
fn default_max_frames() -> u64 {
    100_000
}
fn default_workers() -> usize {
    1
}
fn default_i_max() -> usize {
    30
}
fn default_nms_scale() -> f64 {
    0.75
}
fn default_batch_frames() -> usize {
    64
}

/// A simulation request as read from a TOML file.
///
/// `code` is `ieee80211n:r23|r34|r56`, a `.alist` path, or a base-matrix path.
/// `schedule` is `nms`, `bp`, `fixture:r23|r34|r56|rc`, or a schedule-file path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub code: String,
    pub schedule: String,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_min_frame_errors")]
    pub min_frame_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Iteration cap of the NMS and BP baselines.
    #[serde(default = "default_i_max")]
    pub i_max: usize,
    #[serde(default = "default_nms_scale")]
    pub nms_scale: f64,
    #[serde(default = "default_batch_frames")]
    pub batch_frames: usize,
}

impl ExperimentConfig {
    /// A config with every optional field at its default.
    pub fn new(code: impl Into<String>, schedule: impl Into<String>, snr_db: Vec<f64>) -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            code: code.into(),
            schedule: schedule.into(),
            snr_db,
            min_frame_errors: default_min_frame_errors(),
            max_frames: default_max_frames(),
            seed: 0,
            workers: default_workers(),
            i_max: default_i_max(),
            nms_scale: default_nms_scale(),
            batch_frames: default_batch_frames(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].lines().count().max(1));
            Error::Parse { line, msg: e.message().to_string() }
        })?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::InvalidInput(format!("unsupported config version {}", cfg.version)));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Replaces the seed with `$MIMQMS_SEED` when set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{SEED_ENV}='{v}' is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::InvalidInput("no SNR points".into()));
        }
        if self.min_frame_errors == 0 || self.max_frames == 0 || self.batch_frames == 0 || self.workers == 0 {
            return Err(Error::InvalidInput(
                "min_frame_errors, max_frames, batch_frames and workers must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Loads a code reference (see [`ExperimentConfig`]).
pub fn load_code(spec: &str) -> Result<TannerCode> {
    if let Some(name) = spec.strip_prefix("ieee80211n:") {
        let rate = ieee80211n::Rate::from_name(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown 802.11n rate '{name}'")))?;
        return Ok(ieee80211n::code(rate));
    }
    let text = std::fs::read_to_string(spec)?;
    if spec.ends_with(".alist") {
        codes::load_alist(&text)
    } else {
        let base = codes::BaseMatrix::parse(&text)?;
        let code = base.expand()?;
        // full rank assumed
        let rate = base.shifts.first().map_or(0.0, |r| 1.0 - base.shifts.len() as f64 / r.len() as f64);
        Ok(code.with_rate(rate))
    }
}

/// Which decoder a simulation runs.
#[derive(Clone, Debug)]
pub enum DecoderSpec {
    Qms(Box<LutSchedule>),
    Nms { scale: f64, i_max: usize },
    Bp { i_max: usize },
}

impl DecoderSpec {
    pub fn label(&self) -> &'static str {
        match self {
            DecoderSpec::Qms(_) => "qms",
            DecoderSpec::Nms { .. } => "nms",
            DecoderSpec::Bp { .. } => "bp",
        }
    }

    pub fn i_max(&self) -> usize {
        match self {
            DecoderSpec::Qms(s) => s.i_max,
            DecoderSpec::Nms { i_max, .. } | DecoderSpec::Bp { i_max } => *i_max,
        }
    }
}

/// Loads a schedule reference: `fixture:r23|r34|r56|rc` or a file path.
pub fn load_schedule(spec: &str) -> Result<LutSchedule> {
    match spec.strip_prefix("fixture:") {
        Some("r23") => Ok(schedule_file::fixtures::rate_2_3()),
        Some("r34") => Ok(schedule_file::fixtures::rate_3_4()),
        Some("r56") => Ok(schedule_file::fixtures::rate_5_6()),
        Some("rc") => Ok(schedule_file::fixtures::rate_compatible()),
        Some(other) => Err(Error::InvalidInput(format!("unknown fixture '{other}'"))),
        None => schedule_file::load(spec),
    }
}

pub fn resolve_decoder(cfg: &ExperimentConfig) -> Result<DecoderSpec> {
    match cfg.schedule.as_str() {
        "nms" => Ok(DecoderSpec::Nms { scale: cfg.nms_scale, i_max: cfg.i_max }),
        "bp" => Ok(DecoderSpec::Bp { i_max: cfg.i_max }),
        other => Ok(DecoderSpec::Qms(Box::new(load_schedule(other)?))),
    }
}

/// A fully resolved simulation.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub code: TannerCode,
    pub decoder: DecoderSpec,
    pub snr_db: Vec<f64>,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub workers: usize,
    pub batch_frames: usize,
}

impl Experiment {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Experiment {
            code: load_code(&cfg.code)?,
            decoder: resolve_decoder(cfg)?,
            snr_db: cfg.snr_db.clone(),
            min_frame_errors: cfg.min_frame_errors,
            max_frames: cfg.max_frames,
            seed: cfg.seed,
            workers: cfg.workers,
            batch_frames: cfg.batch_frames,
        })
    }

    pub fn new(code: TannerCode, decoder: DecoderSpec, snr_db: Vec<f64>) -> Self {
        Experiment {
            code,
            decoder,
            snr_db,
            min_frame_errors: default_min_frame_errors(),
            max_frames: default_max_frames(),
            seed: 0,
            workers: 1,
            batch_frames: default_batch_frames(),
        }
    }
}

/// One measured SNR point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FerRecord {
    pub snr_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub i_avg: f64,
}

impl FerRecord {
    /// Standard error of the FER estimate.
    pub fn fer_std_err(&self) -> f64 {
        (self.fer * (1.0 - self.fer) / self.frames as f64).sqrt()
    }
}

enum FrameDecoder<'a> {
    Qms(QmsDecoder<'a>, &'a LutSchedule),
    Nms(NmsDecoder<'a>),
    Bp(BpDecoder<'a>),
}

impl<'a> FrameDecoder<'a> {
    fn new(code: &'a TannerCode, spec: &'a DecoderSpec, sigma: f64) -> Result<Self> {
        Ok(match spec {
            DecoderSpec::Qms(s) => FrameDecoder::Qms(QmsDecoder::new(code, s)?, s),
            DecoderSpec::Nms { scale, i_max } => {
                FrameDecoder::Nms(NmsDecoder::new(code, *i_max, *scale, NmsQuantizer::for_sigma(sigma))?)
            }
            DecoderSpec::Bp { i_max } => FrameDecoder::Bp(BpDecoder::new(code, *i_max)?),
        })
    }

    fn decode(&mut self, y: &[f64], sigma: f64) -> Result<DecodeResult> {
        match self {
            FrameDecoder::Qms(d, s) => {
                let idx: Vec<u8> = y.iter().map(|&v| quantize_observation(&s.channel, v, sigma) as u8).collect();
                d.decode(&idx)
            }
            FrameDecoder::Nms(d) => d.decode(&y.iter().map(|&v| channel_llr(v, sigma)).collect::<Vec<_>>()),
            FrameDecoder::Bp(d) => d.decode(&y.iter().map(|&v| channel_llr(v, sigma)).collect::<Vec<_>>()),
        }
    }
}

/// Noise stream of one frame.
pub fn frame_rng(seed: u64, snr_index: usize, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 40) | frame);
    rng
}

#[derive(Clone, Copy, Default)]
struct FrameOutcome {
    bit_errors: u64,
    iterations: u64,
}

/// Runs every SNR point of the experiment.
pub fn run_fer(exp: &Experiment) -> Result<Vec<FerRecord>> {
    if exp.snr_db.is_empty() || exp.min_frame_errors == 0 || exp.max_frames == 0 || exp.batch_frames == 0 {
        return Err(Error::InvalidInput("experiment needs SNR points and positive frame limits".into()));
    }
    if let DecoderSpec::Qms(s) = &exp.decoder {
        s.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(exp.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let code = &exp.code;
    let rate = code.rate();
    let zeros = vec![0u8; code.n_vars()];
    let mut records = Vec::with_capacity(exp.snr_db.len());
    for (k, &snr) in exp.snr_db.iter().enumerate() {
        let sigma = sigma_from_design_snr(snr, rate)?;
        let (mut frames, mut frame_errors, mut bit_errors, mut iterations) = (0u64, 0u64, 0u64, 0u64);
        while frames < exp.max_frames && frame_errors < exp.min_frame_errors {
            let batch = (exp.batch_frames as u64).min(exp.max_frames - frames);
            let outcomes: Vec<Result<FrameOutcome>> = pool.install(|| {
                (frames..frames + batch)
                    .into_par_iter()
                    .map_init(
                        || FrameDecoder::new(code, &exp.decoder, sigma),
                        |dec, f| {
                            let dec = dec.as_mut().map_err(|e| Error::InvalidInput(e.to_string()))?;
                            let y = bpsk_awgn_transmit(&zeros, sigma, &mut frame_rng(exp.seed, k, f));
                            let r = dec.decode(&y, sigma)?;
                            Ok(FrameOutcome {
                                bit_errors: r.bits.iter().map(|&b| u64::from(b)).sum(),
                                iterations: r.iterations_used as u64,
                            })
                        },
                    )
                    .collect()
            });
            for o in outcomes {
                let o = o?;
                frames += 1;
                bit_errors += o.bit_errors;
                frame_errors += u64::from(o.bit_errors > 0);
                iterations += o.iterations;
            }
        }
        records.push(FerRecord {
            snr_db: snr,
            frames,
            frame_errors,
            bit_errors,
            fer: frame_errors as f64 / frames as f64,
            ber: bit_errors as f64 / (frames * code.n_vars() as u64) as f64,
            i_avg: iterations as f64 / frames as f64,
        });
    }
    Ok(records)
}

/// `%g`-style formatting with `sig` significant digits.
pub fn fmt_g(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

pub const CSV_HEADER: [&str; 7] = ["snr_db", "frames", "frame_errors", "bit_errors", "fer", "ber", "i_avg"];

pub fn emit_csv(records: &[FerRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            fmt_g(r.snr_db, 6),
            r.frames.to_string(),
            r.frame_errors.to_string(),
            r.bit_errors.to_string(),
            fmt_g(r.fer, 6),
            fmt_g(r.ber, 6),
            fmt_g(r.i_avg, 6),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("ascii output")
}

pub fn parse_csv(text: &str) -> Result<Vec<FerRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse { line: 1, msg: "unexpected CSV header".into() });
    }
    rd.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::Parse { line: i + 2, msg: e.to_string() }))
        .collect()
}

/// How repeated tables are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountingPolicy {
    /// One table per group (explicit `groups`, else per run of identical rows)
    /// for φ_v, φ_ch and Γ_v; Γ_e is stored per iteration.
    Dedup,
    /// Every iteration stores its own tables.
    PerIteration,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryParams {
    /// Bits per stored LUT entry.
    pub q_l: u32,
    pub policy: CountingPolicy,
    /// Parameters of the modelled LUT-based decoder.
    pub i_max: usize,
    pub q_m: u32,
    pub q_v: u32,
}

impl Default for MemoryParams {
    fn default() -> Self {
        MemoryParams { q_l: 4, policy: CountingPolicy::Dedup, i_max: 30, q_m: 4, q_v: 8 }
    }
}

/// Stored LUT entries of one schedule, per kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LutEntries {
    pub phi_v: usize,
    pub phi_ch: usize,
    pub gamma_v: usize,
    pub gamma_e: usize,
    pub gamma_ch: usize,
}

impl LutEntries {
    pub fn total(&self) -> usize {
        self.phi_v + self.phi_ch + self.gamma_v + self.gamma_e + self.gamma_ch
    }
}

fn runs_of_identical(rows: &[Vec<i32>]) -> usize {
    1 + rows.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn lut_entries(schedule: &LutSchedule, policy: CountingPolicy) -> LutEntries {
    let q_m = schedule.q_m;
    let tables = |kind: LutKind| -> usize {
        if policy == CountingPolicy::PerIteration || kind == LutKind::GammaE {
            return schedule.i_max;
        }
        let explicit = schedule.groups.as_ref().map(|g| match kind {
            LutKind::PhiV => g.phi_v.len(),
            LutKind::PhiCh => g.phi_ch.len(),
            LutKind::GammaV => g.gamma_v.len(),
            LutKind::GammaE => g.gamma_e.len(),
        });
        match explicit {
            Some(n) if n > 0 => n,
            _ => runs_of_identical(&crate::lutopt::LutTrace::from_schedule(schedule, kind).rows),
        }
    };
    LutEntries {
        phi_v: tables(LutKind::PhiV) * LutKind::PhiV.entries(q_m),
        phi_ch: tables(LutKind::PhiCh) * LutKind::PhiCh.entries(q_m),
        gamma_v: tables(LutKind::GammaV) * LutKind::GammaV.entries(q_m),
        gamma_e: tables(LutKind::GammaE) * LutKind::GammaE.entries(q_m),
        gamma_ch: schedule.channel.thresholds.len(),
    }
}

/// Memory of one decoder, in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderMemory {
    pub label: String,
    pub arithmetic_cn_bits: u64,
    pub arithmetic_vn_bits: u64,
    /// LUT storage per served rate (a single entry for a shared table set).
    pub lut_bits: Vec<(String, u64)>,
    pub total_bits: u64,
}

impl DecoderMemory {
    fn new(label: &str, cn: u64, vn: u64, lut_bits: Vec<(String, u64)>) -> Self {
        let total = cn + vn + lut_bits.iter().map(|(_, b)| b).sum::<u64>();
        DecoderMemory { label: label.into(), arithmetic_cn_bits: cn, arithmetic_vn_bits: vn, lut_bits, total_bits: total }
    }

    pub fn lut_total_bits(&self) -> u64 {
        self.lut_bits.iter().map(|(_, b)| b).sum()
    }
}

/// Bits → kB with 1 kB = 1024 bytes.
pub fn kib(bits: u64) -> f64 {
    bits as f64 / 8.0 / 1024.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryReport {
    pub params: MemoryParams,
    pub rows: Vec<DecoderMemory>,
}

impl MemoryReport {
    pub fn row(&self, label: &str) -> Option<&DecoderMemory> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// `1 − a/b` on total bits.
    pub fn reduction(&self, a: &str, b: &str) -> Option<f64> {
        Some(1.0 - self.row(a)?.total_bits as f64 / self.row(b)?.total_bits as f64)
    }

    /// Plain-text table in kB.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<24} {:>9} {:>9} {:>24} {:>9}\n", "decoder", "CN kB", "VN kB", "LUT kB", "total kB");
        for r in &self.rows {
            let lut = if r.lut_bits.is_empty() {
                "-".to_string()
            } else {
                r.lut_bits.iter().map(|(_, b)| format!("{:.2}", kib(*b))).collect::<Vec<_>>().join(" / ")
            };
            let vn = if r.arithmetic_vn_bits == 0 { "-".to_string() } else { format!("{:.2}", kib(r.arithmetic_vn_bits)) };
            out.push_str(&format!(
                "{:<24} {:>9.2} {:>9} {:>24} {:>9.2}\n",
                r.label,
                kib(r.arithmetic_cn_bits),
                vn,
                lut,
                kib(r.total_bits)
            ));
        }
        out
    }
}

/// Row labels of [`memory_report`].
pub const PROPOSED: &str = "proposed";
pub const RATE_SPECIFIC: &str = "rate-specific";
pub const NMS: &str = "nms";
pub const LUT_BASED: &str = "lut-based (model)";

/// Memory of the rate-compatible decoder, the rate-specific decoders, NMS and the
/// modelled LUT-based decoder for a family of codes.
///
/// Arithmetic memory: two q_m-bit minima per CN and one q_v-bit APP per VN, for
/// the largest code of the family. The LUT-based model stores
/// `I_max·(d_{v,max} + |D̃_v|)` tables of `2^{2 q_m}` q_m-bit entries and needs no
/// VN accumulators.
pub fn memory_report(
    proposed: &LutSchedule,
    rate_specific: &[(&str, &LutSchedule)],
    codes: &[&TannerCode],
    params: MemoryParams,
) -> Result<MemoryReport> {
    if params.q_l == 0 {
        return Err(Error::InvalidInput("q_l must be at least 1".into()));
    }
    if codes.is_empty() {
        return Err(Error::InvalidInput("memory report needs at least one code".into()));
    }
    let q_l = u64::from(params.q_l);
    let cn = codes.iter().map(|c| c.n_checks()).max().unwrap_or(0) as u64 * 2 * u64::from(params.q_m);
    let vn = codes.iter().map(|c| c.n_vars()).max().unwrap_or(0) as u64 * u64::from(params.q_v);
    let bits = |s: &LutSchedule| lut_entries(s, params.policy).total() as u64 * q_l;

    let mut rows = vec![DecoderMemory::new(PROPOSED, cn, vn, vec![("all".into(), bits(proposed))])];
    if !rate_specific.is_empty() {
        let luts = rate_specific.iter().map(|(l, s)| (l.to_string(), bits(s))).collect();
        rows.push(DecoderMemory::new(RATE_SPECIFIC, cn, vn, luts));
    }
    rows.push(DecoderMemory::new(NMS, cn, vn, Vec::new()));
    let joint = joint_from_codes(codes)?;
    let tables = params.i_max as u64 * (joint.max_vn_degree() + joint.vn.len()) as u64;
    let lut_model = tables * (1u64 << (2 * params.q_m)) * u64::from(params.q_m);
    rows.push(DecoderMemory::new(LUT_BASED, cn, 0, vec![("all".into(), lut_model)]));
    Ok(MemoryReport { params, rows })
}
