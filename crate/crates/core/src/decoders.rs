//! Flooding decoders over a [`TannerCode`]: the LUT-driven quantized min-sum
//! decoder, a 4-bit normalized min-sum baseline and floating-point BP.
//!
//! Every decoder stops as soon as the hard decision satisfies all checks.

use crate::codes::TannerCode;
use crate::error::{Error, Result};
use crate::mimde::{signed_map_unchecked, signed_unmap_unchecked, LutSchedule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    /// Iteration at which decoding stopped, in `1..=i_max`.
    pub iterations_used: usize,
    /// The hard decision has an all-zero syndrome.
    pub converged: bool,
}

fn check_code(code: &TannerCode) -> Result<()> {
    if code.min_check_degree() < 2 {
        return Err(Error::Mismatch("message passing needs every check degree ≥ 2".into()));
    }
    Ok(())
}

fn syndrome_ok(code: &TannerCode, bits: &[u8]) -> bool {
    (0..code.n_checks()).all(|c| code.check_adj(c).iter().fold(0u8, |acc, &v| acc ^ bits[v]) == 0)
}

/// Min-sum over message indices: output `e` combines all inputs except `e`.
///
/// Uses the two smallest magnitudes of the signed values.
pub fn qms_check_update(inputs: &[u8], outputs: &mut [u8], q_m: u32) {
    let half = 1usize << (q_m - 1);
    let mut sign = 1i32;
    let (mut min1, mut min2, mut arg) = (i32::MAX, i32::MAX, 0);
    for (k, &s) in inputs.iter().enumerate() {
        let f = signed_map_unchecked(s as usize, half);
        sign *= f.signum();
        let m = f.abs();
        if m < min1 {
            min2 = min1;
            min1 = m;
            arg = k;
        } else if m < min2 {
            min2 = m;
        }
    }
    for (k, (&s, out)) in inputs.iter().zip(outputs.iter_mut()).enumerate() {
        let f = signed_map_unchecked(s as usize, half);
        let m = if k == arg { min2 } else { min1 };
        *out = signed_unmap_unchecked(sign * f.signum() * m, half) as u8;
    }
}

/// Per-iteration tables flattened for the decoding loop.
#[derive(Clone, Debug)]
struct IterTables {
    phi_v: Vec<i32>,
    phi_ch: Vec<i32>,
    /// V2C index of every sum in `[-limit, limit]`, offset by `limit`.
    quant: Vec<u8>,
    gamma_e: i32,
}

/// Reusable (q_m, q_v) quantized min-sum decoder bound to one code and schedule.
#[derive(Clone, Debug)]
pub struct QmsDecoder<'a> {
    code: &'a TannerCode,
    q_m: u32,
    limit: i32,
    tables: Vec<IterTables>,
    v2c: Vec<u8>,
    c2v: Vec<u8>,
    app: Vec<i32>,
    bits: Vec<u8>,
    scratch_in: Vec<u8>,
    scratch_out: Vec<u8>,
}

impl<'a> QmsDecoder<'a> {
    pub fn new(code: &'a TannerCode, schedule: &LutSchedule) -> Result<Self> {
        schedule.validate()?;
        check_code(code)?;
        if schedule.q_m > 8 {
            return Err(Error::Mismatch(format!("q_m = {} exceeds byte-sized messages", schedule.q_m)));
        }
        let limit = schedule.vn_limit();
        let tables = schedule
            .iters
            .iter()
            .map(|it| IterTables {
                phi_v: it.phi_v.table.clone(),
                phi_ch: it.phi_ch.table.clone(),
                quant: (-limit..=limit).map(|b| it.quantize_v(b) as u8).collect(),
                gamma_e: it.gamma_e,
            })
            .collect();
        let dmax = code.max_check_degree();
        Ok(QmsDecoder {
            code,
            q_m: schedule.q_m,
            limit,
            tables,
            v2c: vec![0; code.n_edges()],
            c2v: vec![0; code.n_edges()],
            app: vec![0; code.n_vars()],
            bits: vec![0; code.n_vars()],
            scratch_in: vec![0; dmax],
            scratch_out: vec![0; dmax],
        })
    }

    /// A-posteriori sums of the last iteration, saturated to the q_v range.
    pub fn app(&self) -> &[i32] {
        &self.app
    }

    pub fn decode(&mut self, channel_idx: &[u8]) -> Result<DecodeResult> {
        let code = self.code;
        if channel_idx.len() != code.n_vars() {
            return Err(Error::LengthMismatch { expected: code.n_vars(), got: channel_idx.len() });
        }
        let levels = 1usize << self.q_m;
        if let Some(&bad) = channel_idx.iter().find(|&&i| i as usize >= levels) {
            return Err(Error::Mismatch(format!("channel index {bad} outside a {levels}-ary alphabet")));
        }
        for v in 0..code.n_vars() {
            for &e in code.var_edges(v) {
                self.v2c[e] = channel_idx[v];
            }
        }
        let limit = self.limit;
        let mut used = self.tables.len();
        let mut converged = false;
        for (t, tab) in self.tables.iter().enumerate() {
            for c in 0..code.n_checks() {
                let r = code.check_edges(c);
                let d = r.len();
                self.scratch_in[..d].copy_from_slice(&self.v2c[r.clone()]);
                qms_check_update(&self.scratch_in[..d], &mut self.scratch_out[..d], self.q_m);
                self.c2v[r].copy_from_slice(&self.scratch_out[..d]);
            }
            for v in 0..code.n_vars() {
                let edges = code.var_edges(v);
                let mut total = tab.phi_ch[channel_idx[v] as usize];
                for &e in edges {
                    total += tab.phi_v[self.c2v[e] as usize];
                }
                for &e in edges {
                    let b = (total - tab.phi_v[self.c2v[e] as usize]).clamp(-limit, limit);
                    self.v2c[e] = tab.quant[(b + limit) as usize];
                }
                let app = total.clamp(-limit, limit);
                self.app[v] = app;
                self.bits[v] = u8::from(app < tab.gamma_e);
            }
            if syndrome_ok(code, &self.bits) {
                used = t + 1;
                converged = true;
                break;
            }
        }
        Ok(DecodeResult { bits: self.bits.clone(), iterations_used: used, converged })
    }
}

/// One-shot quantized min-sum decoding.
pub fn qms_decode(code: &TannerCode, channel_idx: &[u8], schedule: &LutSchedule) -> Result<DecodeResult> {
    QmsDecoder::new(code, schedule)?.decode(channel_idx)
}

/// Uniform message quantizer of the NMS baseline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NmsQuantizer {
    /// LLR step per message level.
    pub step: f64,
    /// Largest message magnitude (7 for 4-bit sign-magnitude messages).
    pub max_level: i32,
}

impl NmsQuantizer {
    /// 4-bit messages with step `1/σ`, so the clip level `8·step` is four
    /// standard deviations of the channel LLR.
    pub fn for_sigma(sigma: f64) -> Self {
        NmsQuantizer { step: 1.0 / sigma, max_level: 7 }
    }

    #[inline]
    pub fn quantize(&self, llr: f64) -> i32 {
        let q = (llr / self.step).round();
        q.clamp(-f64::from(self.max_level), f64::from(self.max_level)) as i32
    }
}

/// Reusable normalized min-sum decoder on integer messages.
#[derive(Clone, Debug)]
pub struct NmsDecoder<'a> {
    code: &'a TannerCode,
    i_max: usize,
    scale: f64,
    quant: NmsQuantizer,
    /// `round(scale · m)` for every magnitude `m ≤ max_level`.
    scaled: Vec<i32>,
    v2c: Vec<i32>,
    c2v: Vec<i32>,
    ch: Vec<i32>,
    bits: Vec<u8>,
}

impl<'a> NmsDecoder<'a> {
    pub fn new(code: &'a TannerCode, i_max: usize, scale: f64, quant: NmsQuantizer) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(Error::InvalidInput(format!("scale must lie in (0, 1], got {scale}")));
        }
        if i_max == 0 || quant.max_level < 1 || !(quant.step > 0.0) {
            return Err(Error::InvalidInput("i_max, step and max_level must be positive".into()));
        }
        check_code(code)?;
        let scaled = (0..=quant.max_level).map(|m| (scale * f64::from(m)).round() as i32).collect();
        Ok(NmsDecoder {
            code,
            i_max,
            scale,
            quant,
            scaled,
            v2c: vec![0; code.n_edges()],
            c2v: vec![0; code.n_edges()],
            ch: vec![0; code.n_vars()],
            bits: vec![0; code.n_vars()],
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn decode(&mut self, llrs: &[f64]) -> Result<DecodeResult> {
        let code = self.code;
        if llrs.len() != code.n_vars() {
            return Err(Error::LengthMismatch { expected: code.n_vars(), got: llrs.len() });
        }
        let lim = self.quant.max_level;
        for v in 0..code.n_vars() {
            self.ch[v] = self.quant.quantize(llrs[v]);
            for &e in code.var_edges(v) {
                self.v2c[e] = self.ch[v];
            }
        }
        let mut used = self.i_max;
        let mut converged = false;
        for t in 0..self.i_max {
            for c in 0..code.n_checks() {
                let r = code.check_edges(c);
                let mut neg = false;
                let (mut min1, mut min2, mut arg) = (i32::MAX, i32::MAX, usize::MAX);
                for e in r.clone() {
                    let m = self.v2c[e];
                    neg ^= m < 0;
                    let a = m.abs();
                    if a < min1 {
                        min2 = min1;
                        min1 = a;
                        arg = e;
                    } else if a < min2 {
                        min2 = a;
                    }
                }
                for e in r {
                    let m = if e == arg { min2 } else { min1 };
                    let s = neg ^ (self.v2c[e] < 0);
                    let mag = self.scaled[m.min(lim) as usize];
                    self.c2v[e] = if s { -mag } else { mag };
                }
            }
            for v in 0..code.n_vars() {
                let edges = code.var_edges(v);
                let total: i32 = self.ch[v] + edges.iter().map(|&e| self.c2v[e]).sum::<i32>();
                for &e in edges {
                    self.v2c[e] = (total - self.c2v[e]).clamp(-lim, lim);
                }
                self.bits[v] = u8::from(total < 0);
            }
            if syndrome_ok(code, &self.bits) {
                used = t + 1;
                converged = true;
                break;
            }
        }
        Ok(DecodeResult { bits: self.bits.clone(), iterations_used: used, converged })
    }
}

/// One-shot normalized min-sum decoding with the quantizer derived from `sigma`.
pub fn nms_decode(code: &TannerCode, llrs: &[f64], i_max: usize, scale: f64, quant: NmsQuantizer) -> Result<DecodeResult> {
    NmsDecoder::new(code, i_max, scale, quant)?.decode(llrs)
}

const BP_TANH_LIMIT: f64 = 1.0 - 1e-15;
const BP_LLR_LIMIT: f64 = 1e3;

/// Tanh-rule check update: output `e` combines all inputs except `e`.
pub fn bp_check_update(inputs: &[f64], outputs: &mut [f64]) {
    let d = inputs.len();
    let t: Vec<f64> = inputs.iter().map(|&l| (0.5 * l).tanh()).collect();
    // prefix/suffix products exclude each edge without dividing
    let mut prefix = vec![1.0; d + 1];
    for k in 0..d {
        prefix[k + 1] = prefix[k] * t[k];
    }
    let mut suffix = 1.0;
    for k in (0..d).rev() {
        let p = (prefix[k] * suffix).clamp(-BP_TANH_LIMIT, BP_TANH_LIMIT);
        outputs[k] = 2.0 * p.atanh();
        suffix *= t[k];
    }
}

/// Reusable sum-product decoder in double precision.
#[derive(Clone, Debug)]
pub struct BpDecoder<'a> {
    code: &'a TannerCode,
    i_max: usize,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    bits: Vec<u8>,
    scratch_in: Vec<f64>,
    scratch_out: Vec<f64>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(code: &'a TannerCode, i_max: usize) -> Result<Self> {
        if i_max == 0 {
            return Err(Error::InvalidInput("i_max must be positive".into()));
        }
        check_code(code)?;
        let dmax = code.max_check_degree();
        Ok(BpDecoder {
            code,
            i_max,
            v2c: vec![0.0; code.n_edges()],
            c2v: vec![0.0; code.n_edges()],
            bits: vec![0; code.n_vars()],
            scratch_in: vec![0.0; dmax],
            scratch_out: vec![0.0; dmax],
        })
    }

    pub fn decode(&mut self, llrs: &[f64]) -> Result<DecodeResult> {
        let code = self.code;
        if llrs.len() != code.n_vars() {
            return Err(Error::LengthMismatch { expected: code.n_vars(), got: llrs.len() });
        }
        if llrs.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidInput("channel LLRs must be finite".into()));
        }
        for v in 0..code.n_vars() {
            for &e in code.var_edges(v) {
                self.v2c[e] = llrs[v];
            }
        }
        let mut used = self.i_max;
        let mut converged = false;
        for t in 0..self.i_max {
            for c in 0..code.n_checks() {
                let r = code.check_edges(c);
                let d = r.len();
                self.scratch_in[..d].copy_from_slice(&self.v2c[r.clone()]);
                bp_check_update(&self.scratch_in[..d], &mut self.scratch_out[..d]);
                self.c2v[r].copy_from_slice(&self.scratch_out[..d]);
            }
            for v in 0..code.n_vars() {
                let edges = code.var_edges(v);
                let total: f64 = llrs[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
                for &e in edges {
                    self.v2c[e] = (total - self.c2v[e]).clamp(-BP_LLR_LIMIT, BP_LLR_LIMIT);
                }
                self.bits[v] = u8::from(total < 0.0);
            }
            if syndrome_ok(code, &self.bits) {
                used = t + 1;
                converged = true;
                break;
            }
        }
        Ok(DecodeResult { bits: self.bits.clone(), iterations_used: used, converged })
    }
}

pub fn bp_decode(code: &TannerCode, llrs: &[f64], i_max: usize) -> Result<DecodeResult> {
    BpDecoder::new(code, i_max)?.decode(llrs)
}
