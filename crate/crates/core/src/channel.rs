//! BPSK over AWGN: noise/SNR conversions, the fine LLR-domain channel pmf, and
//! the q_m-bit channel quantizer Γ_ch.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quantizer::{dp_quantize, ConditionalPmf};

/// Fine-grid defaults used by the design pipeline.
pub const FINE_BINS: usize = 2000;
pub const FINE_CLIP: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    pub sigma: f64,
    pub rate: f64,
}

impl ChannelModel {
    pub fn new(sigma: f64, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        Ok(ChannelModel { sigma, rate })
    }

    /// Channel built from `E_b/N_0` in dB.
    pub fn from_ebn0_db(ebn0_db: f64, rate: f64) -> Result<Self> {
        Self::new(sigma_from_design_snr(ebn0_db, rate)?, rate)
    }

    pub fn ebn0_db(&self) -> f64 {
        design_snr_from_sigma(self.sigma, self.rate).expect("validated rate")
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidInput(format!("rate must lie in (0, 1), got {rate}")));
    }
    Ok(())
}

/// σ such that `τ = −20·log10(√(2·R·σ²))`. The same relation maps `E_b/N_0` to σ.
pub fn sigma_from_design_snr(tau_db: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok((10f64.powf(-tau_db / 10.0) / (2.0 * rate)).sqrt())
}

pub fn design_snr_from_sigma(sigma: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    Ok(-10.0 * (2.0 * rate * sigma * sigma).log10())
}

/// `y_k = (1 − 2·b_k) + n_k`, with one standard-normal draw per bit in order.
pub fn bpsk_awgn_transmit<R: Rng + ?Sized>(bits: &[u8], sigma: f64, rng: &mut R) -> Vec<f64> {
    bits.iter()
        .map(|&b| {
            let n: f64 = rng.sample(StandardNormal);
            (1.0 - 2.0 * f64::from(b & 1)) + sigma * n
        })
        .collect()
}

/// `2y / σ²`.
#[inline]
pub fn channel_llr(y: f64, sigma: f64) -> f64 {
    2.0 * y / (sigma * sigma)
}

/// Upper tail `P(Z ≥ z)` of the standard normal.
#[inline]
fn q_func(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `P(lo ≤ LLR < hi | X = 0)` for LLR bounds (possibly infinite).
fn llr_interval_prob(lo: f64, hi: f64, sigma: f64) -> f64 {
    // LLR = 2y/σ² with y ~ N(1, σ²)  ⇒  z = (LLR·σ²/2 − 1)/σ
    let z = |l: f64| {
        if l.is_infinite() {
            l
        } else {
            (l * sigma * sigma / 2.0 - 1.0) / sigma
        }
    };
    let (zl, zh) = (z(lo), z(hi));
    // difference of upper tails on the side where both are small, for accuracy
    if zl >= 0.0 {
        (q_func(zl) - q_func(zh)).max(0.0)
    } else {
        (q_func(-zh) - q_func(-zl)).max(0.0)
    }
}

/// Pmf of a channel LLR partitioned by descending `edges` (`edges[0] = +∞`,
/// last `= −∞`); symbol k covers `[edges[k+1], edges[k])`.
fn pmf_from_edges(edges: &[f64], values: Vec<f64>, sigma: f64) -> ConditionalPmf {
    let n = edges.len() - 1;
    let p0: Vec<f64> = (0..n).map(|k| llr_interval_prob(edges[k + 1], edges[k], sigma)).collect();
    // symmetric channel: P(cell | 1) = P(mirror cell | 0)
    let p1: Vec<f64> = (0..n).map(|k| p0[n - 1 - k]).collect();
    ConditionalPmf { values, p0, p1 }
}

/// A fine channel pmf together with the LLR edges it was cut at.
#[derive(Clone, Debug)]
pub struct FineChannelPmf {
    pub sigma: f64,
    /// Descending LLR edges, `edges[0] = +∞`, last `= −∞`.
    pub edges: Vec<f64>,
    pub pmf: ConditionalPmf,
}

/// Partitions the LLR axis into `bins` uniform cells on `[−clip, clip]` plus two tails.
///
/// Symbol 0 is the upper tail. An infinite `clip` is accepted only with two bins
/// (the sign channel), in which case the tails are empty.
pub fn fine_channel_pmf(sigma: f64, bins: usize, clip: f64) -> Result<FineChannelPmf> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    if bins < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 bins, got {bins}")));
    }
    if !(clip > 0.0) {
        return Err(Error::InvalidInput(format!("clip must be positive, got {clip}")));
    }
    let mut edges = Vec::with_capacity(bins + 3);
    edges.push(f64::INFINITY);
    if clip.is_infinite() {
        if bins != 2 {
            return Err(Error::InvalidInput("an infinite clip needs exactly 2 bins".into()));
        }
        edges.extend([f64::INFINITY, 0.0, f64::NEG_INFINITY]);
    } else {
        let w = 2.0 * clip / bins as f64;
        for k in 0..=bins {
            // exact mirror: edge k = −edge (bins − k)
            let e = if 2 * k == bins {
                0.0
            } else if 2 * k < bins {
                clip - k as f64 * w
            } else {
                -(clip - (bins - k) as f64 * w)
            };
            edges.push(e);
        }
    }
    edges.push(f64::NEG_INFINITY);
    let values = (0..edges.len() - 1)
        .map(|k| {
            let (lo, hi) = (edges[k + 1], edges[k]);
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo,
                (false, true) => hi,
                (false, false) => 0.0,
            }
        })
        .collect();
    let pmf = pmf_from_edges(&edges, values, sigma);
    Ok(FineChannelPmf { sigma, edges, pmf })
}

/// The q_m-bit channel quantizer: descending LLR thresholds and the induced pmf.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelQuantizer {
    pub thresholds: Vec<f64>,
    /// Pmf of the quantizer output given X, at the noise level it was built for.
    pub cond_pmf: ConditionalPmf,
}

impl ChannelQuantizer {
    /// Wraps descending, odd-symmetric thresholds and evaluates the output pmf at `sigma`.
    pub fn from_thresholds(thresholds: Vec<f64>, sigma: f64) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidInput("channel quantizer needs at least one threshold".into()));
        }
        if thresholds.windows(2).any(|w| !(w[0] > w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("channel thresholds must be finite and strictly decreasing".into()));
        }
        let n = thresholds.len();
        if (0..n).any(|k| (thresholds[k] + thresholds[n - 1 - k]).abs() > 1e-9) {
            return Err(Error::InvalidInput("channel thresholds must be odd-symmetric".into()));
        }
        let cond_pmf = Self::pmf_for(&thresholds, sigma)?;
        Ok(ChannelQuantizer { thresholds, cond_pmf })
    }

    fn pmf_for(thresholds: &[f64], sigma: f64) -> Result<ConditionalPmf> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        let mut edges = Vec::with_capacity(thresholds.len() + 2);
        edges.push(f64::INFINITY);
        edges.extend_from_slice(thresholds);
        edges.push(f64::NEG_INFINITY);
        let values = (0..=thresholds.len()).map(|i| i as f64).collect();
        Ok(pmf_from_edges(&edges, values, sigma))
    }

    /// Number of output symbols, `2^{q_m}`.
    pub fn levels(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Output pmf when the LLR is computed and the channel operates at `sigma`.
    pub fn pmf_at(&self, sigma: f64) -> Result<ConditionalPmf> {
        Self::pmf_for(&self.thresholds, sigma)
    }

    /// Index of an LLR: the number of thresholds strictly above it.
    #[inline]
    pub fn index_of_llr(&self, llr: f64) -> usize {
        self.thresholds.partition_point(|&t| t > llr)
    }
}

/// DP-optimal channel quantizer with `2^{q_m}` levels, symmetrized by averaging
/// mirrored threshold magnitudes.
pub fn design_channel_quantizer(fine: &FineChannelPmf, q_m: u32) -> Result<ChannelQuantizer> {
    if !(1..=8).contains(&q_m) {
        return Err(Error::InvalidInput(format!("q_m must be in 1..=8, got {q_m}")));
    }
    let levels = 1usize << q_m;
    if fine.pmf.len() < levels {
        return Err(Error::InvalidInput(format!(
            "fine pmf has {} symbols, fewer than {levels} levels",
            fine.pmf.len()
        )));
    }
    let (ts, _) = dp_quantize(&fine.pmf, levels)?;
    let raw: Vec<f64> = ts.cuts.iter().map(|&c| fine.edges[c]).collect();
    let n = raw.len();
    let sym: Vec<f64> = (0..n).map(|k| 0.5 * (raw[k] - raw[n - 1 - k])).collect();
    if sym.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Degenerate("channel thresholds collapse after symmetrization".into()));
    }
    ChannelQuantizer::from_thresholds(sym, fine.sigma)
}

/// Channel output index for the observation `y` at noise level `sigma`.
#[inline]
pub fn quantize_observation(quantizer: &ChannelQuantizer, y: f64, sigma: f64) -> usize {
    quantizer.index_of_llr(channel_llr(y, sigma))
}
