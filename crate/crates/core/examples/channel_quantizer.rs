//! Designs the 4-bit channel quantizer at a design SNR and applies it to noisy
//! BPSK observations.

use mimqms::channel::{
    bpsk_awgn_transmit, design_channel_quantizer, fine_channel_pmf, quantize_observation, sigma_from_design_snr,
    FINE_BINS, FINE_CLIP,
};
use mimqms::quantizer::mi;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mimqms::Result<()> {
    let tau = 2.4;
    let sigma = sigma_from_design_snr(tau, 0.75)?;
    let fine = fine_channel_pmf(sigma, FINE_BINS, FINE_CLIP)?;
    let q = design_channel_quantizer(&fine, 4)?;
    println!("τ = {tau} dB at R = 0.75 → σ = {sigma:.4}");
    println!("thresholds {:?}", q.thresholds.iter().map(|t| (t * 100.0).round() / 100.0).collect::<Vec<_>>());
    println!("I(X; L) = {:.6} of I(X; Y) ≈ {:.6}", mi(&q.cond_pmf), mi(&fine.pmf));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let y = bpsk_awgn_transmit(&[0; 12], sigma, &mut rng);
    let idx: Vec<usize> = y.iter().map(|&v| quantize_observation(&q, v, sigma)).collect();
    println!("y   {:?}", y.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>());
    println!("idx {idx:?}");
    Ok(())
}
