//! Density evolution for the quantized min-sum decoder over a joint degree
//! distribution, and the design loop that turns it into a [`LutSchedule`].
//!
//! Alphabets follow the decoder: `R` (V2C indices), `S` (C2V indices), `L`
//! (channel indices), all of size `2^{q_m}` with index 0 the strongest belief in
//! X = 0, and `B` (integer VN sums within the q_v-bit signed range).

use std::ops::Range;

use rayon::prelude::*;

use crate::channel::{
    design_channel_quantizer, design_snr_from_sigma, fine_channel_pmf, sigma_from_design_snr, ChannelQuantizer,
    FINE_BINS, FINE_CLIP,
};
use crate::codes::JointDegreeDistribution;
use crate::error::{Error, Result};
use crate::quantizer::{dp_quantize_in_order, mi, ConditionalPmf};

/// Signed value of index `s`: `0 ↦ +2^{q_m−1}`, …, `2^{q_m−1}−1 ↦ +1`,
/// `2^{q_m−1} ↦ −1`, …, `2^{q_m}−1 ↦ −2^{q_m−1}`.
pub fn signed_map(s: usize, q_m: u32) -> Result<i32> {
    let half = 1usize << (q_m - 1);
    if s >= 2 * half {
        return Err(Error::IndexOutOfRange(format!("index {s} for q_m = {q_m}")));
    }
    Ok(signed_map_unchecked(s, half))
}

#[inline]
pub(crate) fn signed_map_unchecked(s: usize, half: usize) -> i32 {
    if s < half {
        (half - s) as i32
    } else {
        -((s - half + 1) as i32)
    }
}

pub fn signed_unmap(value: i32, q_m: u32) -> Result<usize> {
    let half = 1i32 << (q_m - 1);
    if value == 0 || value.abs() > half {
        return Err(Error::IndexOutOfRange(format!("value {value} is not a q_m = {q_m} signed level")));
    }
    Ok(signed_unmap_unchecked(value, half as usize))
}

#[inline]
pub(crate) fn signed_unmap_unchecked(value: i32, half: usize) -> usize {
    if value > 0 {
        half - value as usize
    } else {
        half - 1 + (-value) as usize
    }
}

/// Index-domain min-sum of two messages: `f⁻¹(sign·sign·min(|·|, |·|))`.
pub(crate) fn cn_pair_table(q_m: u32) -> Vec<usize> {
    let n = 1usize << q_m;
    let half = n / 2;
    let mut t = vec![0; n * n];
    for a in 0..n {
        let fa = signed_map_unchecked(a, half);
        for b in 0..n {
            let fb = signed_map_unchecked(b, half);
            let v = fa.signum() * fb.signum() * fa.abs().min(fb.abs());
            t[a * n + b] = signed_unmap_unchecked(v, half);
        }
    }
    t
}

/// Maps a `2^{q_m}`-ary message index to a signed integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReconstructionFn {
    pub table: Vec<i32>,
}

impl ReconstructionFn {
    /// Validates odd symmetry and monotonicity.
    pub fn new(table: Vec<i32>) -> Result<Self> {
        let f = ReconstructionFn { table };
        if f.table.len() < 2 || !f.table.len().is_power_of_two() {
            return Err(Error::InvalidInput(format!("table length {} is not 2^q_m", f.table.len())));
        }
        if !f.is_odd_symmetric() {
            return Err(Error::InvalidInput(format!("table {:?} is not odd-symmetric", f.table)));
        }
        if !f.is_non_increasing() {
            return Err(Error::InvalidInput(format!("table {:?} is not non-increasing", f.table)));
        }
        Ok(f)
    }

    pub fn zero(levels: usize) -> Self {
        ReconstructionFn { table: vec![0; levels] }
    }

    pub fn is_odd_symmetric(&self) -> bool {
        let n = self.table.len();
        (0..n).all(|s| self.table[s] == -self.table[n - 1 - s])
    }

    pub fn is_non_increasing(&self) -> bool {
        self.table.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn max_abs(&self) -> i32 {
        self.table.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, s: usize) -> i32 {
        self.table[s]
    }
}

/// The LUTs used in one decoding iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LutIterSet {
    pub phi_v: ReconstructionFn,
    pub phi_ch: ReconstructionFn,
    /// Descending integer thresholds, `2^{q_m} − 1` of them.
    pub gamma_v: Vec<i32>,
    /// Decision threshold: bit 0 iff `app ≥ gamma_e`.
    pub gamma_e: i32,
}

impl LutIterSet {
    /// V2C index of a VN sum: the number of thresholds strictly above it.
    #[inline]
    pub fn quantize_v(&self, b: i32) -> usize {
        self.gamma_v.partition_point(|&g| g > b)
    }

    #[inline]
    pub fn decide(&self, app: i32) -> u8 {
        u8::from(app < self.gamma_e)
    }
}

/// Iteration groups per LUT kind, as 0-based half-open ranges covering `0..i_max`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LutGroups {
    pub phi_v: Vec<Range<usize>>,
    pub phi_ch: Vec<Range<usize>>,
    pub gamma_v: Vec<Range<usize>>,
    pub gamma_e: Vec<Range<usize>>,
}

/// Diagnostics attached to a schedule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScheduleFlags {
    /// First 1-based iteration whose LUTs were copied from the previous one after
    /// the design saturated.
    pub saturated_from: Option<usize>,
    /// LUT optimization found no candidate meeting its MI target.
    pub no_merge: bool,
}

/// Everything the quantized min-sum decoder needs.
#[derive(Clone, Debug, PartialEq)]
pub struct LutSchedule {
    pub q_m: u32,
    pub q_v: u32,
    pub i_max: usize,
    pub design_sigma: f64,
    pub channel: ChannelQuantizer,
    pub iters: Vec<LutIterSet>,
    pub ensemble: Option<JointDegreeDistribution>,
    pub groups: Option<LutGroups>,
    pub flags: ScheduleFlags,
    /// I(X; R) after each design iteration (empty for loaded schedules).
    pub mi_trace: Vec<f64>,
}

impl LutSchedule {
    pub fn levels(&self) -> usize {
        1 << self.q_m
    }

    /// Largest magnitude a q_v-bit accumulator holds.
    pub fn vn_limit(&self) -> i32 {
        (1 << (self.q_v - 1)) - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_m == 0 || self.q_m > 8 || self.q_v <= self.q_m || self.q_v > 16 {
            return Err(Error::Mismatch(format!("unsupported precisions q_m = {}, q_v = {}", self.q_m, self.q_v)));
        }
        if self.iters.len() != self.i_max || self.i_max == 0 {
            return Err(Error::Mismatch(format!("{} LUT sets for i_max = {}", self.iters.len(), self.i_max)));
        }
        let n = self.levels();
        if self.channel.levels() != n {
            return Err(Error::Mismatch(format!("channel quantizer has {} levels, expected {n}", self.channel.levels())));
        }
        for (t, it) in self.iters.iter().enumerate() {
            let ctx = |what: &str| Error::Mismatch(format!("iteration {}: {what}", t + 1));
            if it.phi_v.table.len() != n || it.phi_ch.table.len() != n {
                return Err(ctx("reconstruction table length"));
            }
            if it.gamma_v.len() != n - 1 {
                return Err(ctx("threshold count"));
            }
            if it.gamma_v.windows(2).any(|w| w[0] <= w[1]) {
                return Err(ctx("gamma_v not strictly decreasing"));
            }
            if it.phi_v.max_abs() > self.vn_limit() || it.phi_ch.max_abs() > self.vn_limit() {
                return Err(ctx("reconstruction exceeds q_v range"));
            }
        }
        Ok(())
    }
}

/// Dense pmf over a contiguous integer support starting at `lo`.
#[derive(Clone, Debug)]
struct IntDist {
    lo: i32,
    p0: Vec<f64>,
    p1: Vec<f64>,
}

impl IntDist {
    fn pushforward(pmf: &ConditionalPmf, table: &[i32]) -> IntDist {
        let lo = *table.iter().min().unwrap();
        let hi = *table.iter().max().unwrap();
        let w = (hi - lo + 1) as usize;
        let mut d = IntDist { lo, p0: vec![0.0; w], p1: vec![0.0; w] };
        for (s, &v) in table.iter().enumerate() {
            let k = (v - lo) as usize;
            d.p0[k] += pmf.p0[s];
            d.p1[k] += pmf.p1[s];
        }
        d
    }

    fn convolve(&self, other: &IntDist) -> IntDist {
        let w = self.p0.len() + other.p0.len() - 1;
        let mut out = IntDist { lo: self.lo + other.lo, p0: vec![0.0; w], p1: vec![0.0; w] };
        for (j, (&b0, &b1)) in other.p0.iter().zip(&other.p1).enumerate() {
            if b0 == 0.0 && b1 == 0.0 {
                continue;
            }
            for (i, (&a0, &a1)) in self.p0.iter().zip(&self.p1).enumerate() {
                out.p0[i + j] += a0 * b0;
                out.p1[i + j] += a1 * b1;
            }
        }
        out
    }
}

/// Mixture accumulator over `[-limit, limit]` that records mass outside it.
struct SumAccumulator {
    limit: i32,
    p0: Vec<f64>,
    p1: Vec<f64>,
    overflow: bool,
}

impl SumAccumulator {
    fn new(limit: i32) -> Self {
        let w = (2 * limit + 1) as usize;
        SumAccumulator { limit, p0: vec![0.0; w], p1: vec![0.0; w], overflow: false }
    }

    fn add(&mut self, d: &IntDist, weight: f64) {
        for k in 0..d.p0.len() {
            let (a, b) = (d.p0[k], d.p1[k]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let v = d.lo + k as i32;
            let c = v.clamp(-self.limit, self.limit);
            if c != v {
                self.overflow = true;
            }
            let idx = (c + self.limit) as usize;
            self.p0[idx] += weight * a;
            self.p1[idx] += weight * b;
        }
    }

    /// Support points with mass, in descending value order.
    fn into_pmf(self) -> ConditionalPmf {
        let mut values = Vec::new();
        let mut p0 = Vec::new();
        let mut p1 = Vec::new();
        for idx in (0..self.p0.len()).rev() {
            if self.p0[idx] > 0.0 || self.p1[idx] > 0.0 {
                values.push((idx as i32 - self.limit) as f64);
                p0.push(self.p0[idx]);
                p1.push(self.p1[idx]);
            }
        }
        let mut pmf = ConditionalPmf { values, p0, p1 };
        pmf.renormalize();
        pmf
    }
}

fn check_alphabet(pmf: &ConditionalPmf, n: usize, what: &str) -> Result<()> {
    if pmf.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: pmf.len() });
    }
    let (s0, s1) = pmf.totals();
    if (s0 - 1.0).abs() > 1e-9 || (s1 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("{what} pmf is not normalized")));
    }
    Ok(())
}

/// C2V pmf over S produced by min-sum CNs of the ensemble from i.i.d. V2C messages.
pub fn cn_evolve(v2c: &ConditionalPmf, joint: &JointDegreeDistribution, q_m: u32) -> Result<ConditionalPmf> {
    let n = 1usize << q_m;
    check_alphabet(v2c, n, "V2C")?;
    if joint.cn.iter().any(|&(d, _)| d < 2) {
        return Err(Error::InvalidInput("CN degree below 2 in the ensemble".into()));
    }
    let table = cn_pair_table(q_m);
    let half = n / 2;
    let mut out0 = vec![0.0; n];
    let mut out1 = vec![0.0; n];
    let mut acc0 = v2c.p0.clone();
    let mut acc1 = v2c.p1.clone();
    let mut deg = 2;
    for &(d, rho) in &joint.cn {
        while deg < d {
            let mut n0 = vec![0.0; n];
            let mut n1 = vec![0.0; n];
            for a in 0..n {
                let (a0, a1) = (acc0[a], acc1[a]);
                for b in 0..n {
                    let (b0, b1) = (v2c.p0[b], v2c.p1[b]);
                    let t = table[a * n + b];
                    // the two operands' bits XOR to the target bit
                    n0[t] += 0.5 * (a0 * b0 + a1 * b1);
                    n1[t] += 0.5 * (a0 * b1 + a1 * b0);
                }
            }
            acc0 = n0;
            acc1 = n1;
            deg += 1;
        }
        for s in 0..n {
            out0[s] += rho * acc0[s];
            out1[s] += rho * acc1[s];
        }
    }
    let values = (0..n).map(|s| signed_map_unchecked(s, half) as f64).collect();
    let mut pmf = ConditionalPmf { values, p0: out0, p1: out1 };
    pmf.renormalize();
    Ok(pmf)
}

/// Which C2V count enters the sum at a degree-j VN.
#[derive(Clone, Copy, PartialEq, Eq)]
enum SumKind {
    /// `j − 1` terms: the extrinsic V2C message.
    Extrinsic,
    /// `j` terms: the a-posteriori decision value.
    Decision,
}

fn vn_sum(
    ch: &ConditionalPmf,
    c2v: &ConditionalPmf,
    phi_ch: &ReconstructionFn,
    phi_v: &ReconstructionFn,
    joint: &JointDegreeDistribution,
    q_v: u32,
    kind: SumKind,
) -> Result<(ConditionalPmf, bool)> {
    let n = phi_ch.table.len();
    check_alphabet(ch, n, "channel")?;
    check_alphabet(c2v, n, "C2V")?;
    if phi_v.table.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: phi_v.table.len() });
    }
    if !(2..=16).contains(&q_v) {
        return Err(Error::InvalidInput(format!("unsupported q_v = {q_v}")));
    }
    let limit = (1i32 << (q_v - 1)) - 1;
    let base = IntDist::pushforward(ch, &phi_ch.table);
    let msg = IntDist::pushforward(c2v, &phi_v.table);
    let mut acc = SumAccumulator::new(limit);
    let mut cur = base;
    let mut terms = 0;
    for &(j, theta) in &joint.vn {
        let want = match kind {
            SumKind::Extrinsic => j - 1,
            SumKind::Decision => j,
        };
        while terms < want {
            cur = cur.convolve(&msg);
            terms += 1;
        }
        acc.add(&cur, theta);
    }
    let overflow = acc.overflow;
    Ok((acc.into_pmf(), overflow))
}

/// V2C-sum pmf over B: `φ_ch(L) + Σ_{k<j} φ_v(S_k)` mixed over VN degrees.
///
/// Fails if any sum leaves the q_v-bit signed range.
pub fn vn_evolve(
    ch: &ConditionalPmf,
    c2v: &ConditionalPmf,
    phi_ch: &ReconstructionFn,
    phi_v: &ReconstructionFn,
    joint: &JointDegreeDistribution,
    q_v: u32,
) -> Result<ConditionalPmf> {
    strict(vn_sum(ch, c2v, phi_ch, phi_v, joint, q_v, SumKind::Extrinsic)?)
}

/// Decision-value pmf: as [`vn_evolve`] with all `j` incoming C2V messages.
pub fn decision_evolve(
    ch: &ConditionalPmf,
    c2v: &ConditionalPmf,
    phi_ch: &ReconstructionFn,
    phi_v: &ReconstructionFn,
    joint: &JointDegreeDistribution,
    q_v: u32,
) -> Result<ConditionalPmf> {
    strict(vn_sum(ch, c2v, phi_ch, phi_v, joint, q_v, SumKind::Decision)?)
}

fn strict((pmf, overflow): (ConditionalPmf, bool)) -> Result<ConditionalPmf> {
    if overflow {
        return Err(Error::Degenerate("VN sum exceeds the q_v range; reconstruction is mis-scaled".into()));
    }
    Ok(pmf)
}

/// Largest reconstruction magnitude for which a VN with `max_vn_degree` C2V
/// inputs plus the channel term cannot exceed the q_v range.
pub fn reconstruction_cap(q_v: u32, max_vn_degree: usize) -> i32 {
    ((1i32 << (q_v - 1)) - 1) / (max_vn_degree as i32 + 1)
}

/// `φ(s) = round(α · LLR_s)` with odd symmetry and monotonicity enforced and
/// magnitudes capped at `cap`.
///
/// Symbols with an infinite LLR saturate to `cap`; empty symbols inherit their
/// higher-LLR neighbour's magnitude.
pub fn derive_reconstruction(pmf: &ConditionalPmf, alpha: f64, cap: i32) -> Result<ReconstructionFn> {
    let n = pmf.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!("pmf over {n} symbols is not a 2^q_m alphabet")));
    }
    if !(alpha > 0.0) || cap < 0 {
        return Err(Error::InvalidInput("alpha must be positive and cap non-negative".into()));
    }
    let half = n / 2;
    let mut mag = vec![0i32; half];
    for s in 0..half {
        let l = 0.5 * (pmf.llr(s) - pmf.llr(n - 1 - s));
        let m = if l.is_nan() {
            if s == 0 { cap } else { mag[s - 1] }
        } else if l == f64::INFINITY {
            cap
        } else {
            ((alpha * l).round().max(0.0) as i64).min(cap as i64) as i32
        };
        mag[s] = if s > 0 { m.min(mag[s - 1]) } else { m };
    }
    let mut table = vec![0; n];
    for s in 0..half {
        table[s] = mag[s];
        table[n - 1 - s] = -mag[s];
    }
    Ok(ReconstructionFn { table })
}

/// Integer threshold separating descending support values `upper > lower`:
/// `lower` maps below it, `upper` at or above it.
#[inline]
fn split_between(upper: i32, lower: i32) -> i32 {
    lower + (upper - lower + 1) / 2
}

/// DP over a descending-value pmf; returns integer thresholds and the coarse pmf.
fn integer_quantize(pmf: &ConditionalPmf, levels: usize) -> Result<(Vec<i32>, ConditionalPmf)> {
    let (ts, coarse) = dp_quantize_in_order(pmf, levels)?;
    let g = ts
        .cuts
        .iter()
        .map(|&c| split_between(pmf.values[c - 1] as i32, pmf.values[c] as i32))
        .collect();
    Ok((g, coarse))
}

/// Quantizes a descending-value pmf through fixed descending thresholds.
fn apply_integer_thresholds(pmf: &ConditionalPmf, gamma: &[i32]) -> ConditionalPmf {
    let k = gamma.len() + 1;
    let mut p0 = vec![0.0; k];
    let mut p1 = vec![0.0; k];
    for i in 0..pmf.len() {
        let b = pmf.values[i] as i32;
        let cell = gamma.partition_point(|&g| g > b);
        p0[cell] += pmf.p0[i];
        p1[cell] += pmf.p1[i];
    }
    ConditionalPmf { values: (0..k).map(|i| i as f64).collect(), p0, p1 }
}

/// Tunables of the design loop.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignConfig {
    pub fine_bins: usize,
    pub fine_clip: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_count: usize,
    /// Design stops adapting once I(X; R) ≥ 1 − `saturation_eps`.
    pub saturation_eps: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            fine_bins: FINE_BINS,
            fine_clip: FINE_CLIP,
            alpha_min: 0.05,
            alpha_max: 50.0,
            alpha_count: 64,
            saturation_eps: 1e-10,
        }
    }
}

impl DesignConfig {
    /// Log-spaced scale candidates, ascending.
    pub fn alpha_grid(&self) -> Vec<f64> {
        if self.alpha_count <= 1 {
            return vec![self.alpha_min];
        }
        let (a, b) = (self.alpha_min.ln(), self.alpha_max.ln());
        (0..self.alpha_count)
            .map(|k| (a + (b - a) * k as f64 / (self.alpha_count - 1) as f64).exp())
            .collect()
    }
}

/// Outcome of one reconstruction scale search.
#[derive(Clone, Debug)]
pub struct ScaleChoice {
    pub alpha: f64,
    pub phi_ch: ReconstructionFn,
    pub phi_v: ReconstructionFn,
    pub gamma_v: Vec<i32>,
    /// I(X; R) after quantizing the VN sums.
    pub mi: f64,
    pub next_v2c: ConditionalPmf,
}

/// Sweeps `alphas` (ascending) and keeps the scale whose tables maximize the MI of
/// the re-quantized V2C message. Ties keep the smallest scale.
pub fn select_scale(
    ch: &ConditionalPmf,
    c2v: &ConditionalPmf,
    joint: &JointDegreeDistribution,
    q_v: u32,
    alphas: &[f64],
) -> Result<ScaleChoice> {
    let levels = ch.len();
    let cap = reconstruction_cap(q_v, joint.max_vn_degree());
    let mut best: Option<ScaleChoice> = None;
    let mut seen: Option<(ReconstructionFn, ReconstructionFn)> = None;
    for &alpha in alphas {
        let phi_ch = derive_reconstruction(ch, alpha, cap)?;
        let phi_v = derive_reconstruction(c2v, alpha, cap)?;
        if seen.as_ref() == Some(&(phi_ch.clone(), phi_v.clone())) {
            continue;
        }
        seen = Some((phi_ch.clone(), phi_v.clone()));
        let (b, _) = vn_sum(ch, c2v, &phi_ch, &phi_v, joint, q_v, SumKind::Extrinsic)?;
        let Ok((gamma_v, next)) = integer_quantize(&b, levels) else {
            continue;
        };
        let m = mi(&next);
        if best.as_ref().is_none_or(|bc| m > bc.mi + 1e-12 * bc.mi.max(1e-300)) {
            best = Some(ScaleChoice { alpha, phi_ch, phi_v, gamma_v, mi: m, next_v2c: next });
        }
    }
    best.ok_or_else(|| Error::Degenerate("no reconstruction scale yields a full quantizer".into()))
}

/// Decision threshold from a K = 2 DP on the decision-value pmf.
fn decision_threshold(
    ch: &ConditionalPmf,
    c2v: &ConditionalPmf,
    phi_ch: &ReconstructionFn,
    phi_v: &ReconstructionFn,
    joint: &JointDegreeDistribution,
    q_v: u32,
) -> Result<i32> {
    let (d, _) = vn_sum(ch, c2v, phi_ch, phi_v, joint, q_v, SumKind::Decision)?;
    match integer_quantize(&d, 2) {
        Ok((g, _)) => Ok(g[0]),
        // a single support point carries no information; the sign rule applies
        Err(Error::Degenerate(_)) => Ok(0),
        Err(e) => Err(e),
    }
}

/// Runs the design loop with default tunables.
pub fn design_schedule(
    ensemble: &JointDegreeDistribution,
    sigma: f64,
    q_m: u32,
    q_v: u32,
    i_max: usize,
) -> Result<LutSchedule> {
    design_schedule_with(&DesignConfig::default(), ensemble, sigma, q_m, q_v, i_max)
}

pub fn design_schedule_with(
    cfg: &DesignConfig,
    ensemble: &JointDegreeDistribution,
    sigma: f64,
    q_m: u32,
    q_v: u32,
    i_max: usize,
) -> Result<LutSchedule> {
    if q_v <= q_m || q_m == 0 || q_v > 16 {
        return Err(Error::InvalidInput(format!("need 0 < q_m < q_v ≤ 16, got q_m = {q_m}, q_v = {q_v}")));
    }
    if i_max == 0 {
        return Err(Error::InvalidInput("i_max must be at least 1".into()));
    }
    if ensemble.cn.is_empty() || ensemble.vn.is_empty() {
        return Err(Error::InvalidInput("empty ensemble".into()));
    }
    let fine = fine_channel_pmf(sigma, cfg.fine_bins, cfg.fine_clip)?;
    let channel = design_channel_quantizer(&fine, q_m)?;
    let ch = channel.cond_pmf.clone();
    let alphas = cfg.alpha_grid();

    let mut iters: Vec<LutIterSet> = Vec::with_capacity(i_max);
    let mut mi_trace = Vec::with_capacity(i_max);
    let mut flags = ScheduleFlags::default();
    let mut v2c = ch.clone();
    for t in 0..i_max {
        let c2v = cn_evolve(&v2c, ensemble, q_m)?;
        if flags.saturated_from.is_none() {
            match select_scale(&ch, &c2v, ensemble, q_v, &alphas) {
                Ok(choice) => {
                    let gamma_e = decision_threshold(&ch, &c2v, &choice.phi_ch, &choice.phi_v, ensemble, q_v)?;
                    iters.push(LutIterSet {
                        phi_v: choice.phi_v,
                        phi_ch: choice.phi_ch,
                        gamma_v: choice.gamma_v,
                        gamma_e,
                    });
                    mi_trace.push(choice.mi);
                    v2c = choice.next_v2c;
                    if choice.mi >= 1.0 - cfg.saturation_eps && t + 1 < i_max {
                        flags.saturated_from = Some(t + 2);
                    }
                    continue;
                }
                Err(Error::Degenerate(msg)) => {
                    if t == 0 {
                        return Err(Error::Degenerate(msg));
                    }
                    flags.saturated_from = Some(t + 1);
                }
                Err(e) => return Err(e),
            }
        }
        // frozen: repeat the last LUT set and keep tracking the MI it achieves
        let last = iters.last().expect("first iteration always designs").clone();
        let (b, _) = vn_sum(&ch, &c2v, &last.phi_ch, &last.phi_v, ensemble, q_v, SumKind::Extrinsic)?;
        v2c = apply_integer_thresholds(&b, &last.gamma_v);
        mi_trace.push(mi(&v2c));
        iters.push(last);
    }

    Ok(LutSchedule {
        q_m,
        q_v,
        i_max,
        design_sigma: sigma,
        channel,
        iters,
        ensemble: Some(ensemble.clone()),
        groups: None,
        flags,
        mi_trace,
    })
}

/// I(X; R) after each iteration when every LUT is held fixed.
pub fn schedule_mi_trace(schedule: &LutSchedule, ensemble: &JointDegreeDistribution, sigma: f64) -> Result<Vec<f64>> {
    schedule.validate()?;
    let ch = schedule.channel.pmf_at(sigma)?;
    let mut v2c = ch.clone();
    let mut trace = Vec::with_capacity(schedule.i_max);
    for it in &schedule.iters {
        let c2v = cn_evolve(&v2c, ensemble, schedule.q_m)?;
        // the decoder saturates, so the evaluation does too
        let (b, _) = vn_sum(&ch, &c2v, &it.phi_ch, &it.phi_v, ensemble, schedule.q_v, SumKind::Extrinsic)?;
        v2c = apply_integer_thresholds(&b, &it.gamma_v);
        trace.push(mi(&v2c));
    }
    Ok(trace)
}

/// I(X; R) at the last iteration with all LUTs fixed.
pub fn schedule_mi(schedule: &LutSchedule, ensemble: &JointDegreeDistribution, sigma: f64) -> Result<f64> {
    Ok(*schedule_mi_trace(schedule, ensemble, sigma)?.last().expect("i_max ≥ 1"))
}

/// LUT kinds that [`redesign`] recomputes instead of reusing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rederive {
    pub phi_ch: bool,
    pub gamma_v: bool,
    pub gamma_e: bool,
}

/// Re-runs the design density evolution with `φ_v` and every kind not named in
/// `which` held fixed, recomputing the named kinds from the evolved pmfs.
///
/// A re-derived `φ_ch` is the MI-best scaling over `alphas` against the fixed
/// `φ_v`. Returns the updated schedule and its per-iteration MI. A kind whose
/// re-derivation degenerates keeps its previous row.
pub fn redesign(
    schedule: &LutSchedule,
    ensemble: &JointDegreeDistribution,
    sigma: f64,
    which: Rederive,
    alphas: &[f64],
) -> Result<(LutSchedule, Vec<f64>)> {
    schedule.validate()?;
    let ch = schedule.channel.pmf_at(sigma)?;
    let levels = schedule.levels();
    let cap = reconstruction_cap(schedule.q_v, ensemble.max_vn_degree());
    let mut out = schedule.clone();
    let mut v2c = ch.clone();
    let mut trace = Vec::with_capacity(schedule.i_max);
    for it in out.iters.iter_mut() {
        let c2v = cn_evolve(&v2c, ensemble, schedule.q_m)?;
        if which.phi_ch {
            let mut best: Option<(f64, ReconstructionFn, Vec<i32>)> = None;
            let mut seen: Option<ReconstructionFn> = None;
            for &alpha in alphas {
                let phi_ch = derive_reconstruction(&ch, alpha, cap)?;
                if seen.as_ref() == Some(&phi_ch) {
                    continue;
                }
                seen = Some(phi_ch.clone());
                let (b, _) = vn_sum(&ch, &c2v, &phi_ch, &it.phi_v, ensemble, schedule.q_v, SumKind::Extrinsic)?;
                let Ok((g, next)) = integer_quantize(&b, levels) else {
                    continue;
                };
                let m = mi(&next);
                if best.as_ref().is_none_or(|(bm, _, _)| m > bm + 1e-12 * bm.max(1e-300)) {
                    best = Some((m, phi_ch, g));
                }
            }
            if let Some((_, phi_ch, g)) = best {
                it.phi_ch = phi_ch;
                if which.gamma_v {
                    it.gamma_v = g;
                }
            }
        }
        let (b, _) = vn_sum(&ch, &c2v, &it.phi_ch, &it.phi_v, ensemble, schedule.q_v, SumKind::Extrinsic)?;
        if which.gamma_v && !which.phi_ch {
            match integer_quantize(&b, levels) {
                Ok((g, _)) => it.gamma_v = g,
                Err(Error::Degenerate(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if which.gamma_e {
            it.gamma_e = decision_threshold(&ch, &c2v, &it.phi_ch, &it.phi_v, ensemble, schedule.q_v)?;
        }
        v2c = apply_integer_thresholds(&b, &it.gamma_v);
        trace.push(mi(&v2c));
    }
    Ok((out, trace))
}

/// One evaluated point of a design-SNR search.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaCandidate {
    pub tau_db: f64,
    pub sigma: f64,
    pub mi: f64,
}

#[derive(Clone, Debug)]
pub struct SigmaSelection {
    pub sigma: f64,
    pub tau_db: f64,
    pub candidates: Vec<SigmaCandidate>,
}

/// Default slack under which two final MIs count as equal when selecting σ_d.
pub const SIGMA_TIE_TOL: f64 = 1e-4;

/// Designs one schedule per τ (dB, converted at the ensemble's design rate) and
/// returns the σ whose final MI is largest. Values within `tie_tol` of the best
/// count as ties, resolved toward the lowest τ.
pub fn select_design_sigma(
    ensemble: &JointDegreeDistribution,
    q_m: u32,
    q_v: u32,
    i_max: usize,
    tau_grid: &[f64],
    tie_tol: f64,
) -> Result<SigmaSelection> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidInput("empty design-SNR grid".into()));
    }
    let rate = ensemble.design_rate();
    let candidates: Vec<SigmaCandidate> = tau_grid
        .par_iter()
        .map(|&tau| {
            let sigma = sigma_from_design_snr(tau, rate)?;
            let s = design_schedule(ensemble, sigma, q_m, q_v, i_max)?;
            let mi = *s.mi_trace.last().expect("i_max ≥ 1");
            Ok(SigmaCandidate { tau_db: tau, sigma, mi })
        })
        .collect::<Result<_>>()?;
    let best = candidates.iter().map(|c| c.mi).fold(f64::NEG_INFINITY, f64::max);
    let pick = candidates
        .iter()
        .filter(|c| c.mi >= best - tie_tol)
        .min_by(|a, b| a.tau_db.total_cmp(&b.tau_db))
        .expect("non-empty");
    Ok(SigmaSelection { sigma: pick.sigma, tau_db: pick.tau_db, candidates: candidates.clone() })
}

/// τ of `sigma` at the ensemble's design rate.
pub fn ensemble_design_snr(ensemble: &JointDegreeDistribution, sigma: f64) -> Result<f64> {
    design_snr_from_sigma(sigma, ensemble.design_rate())
}
