//! Decodes one noisy all-zero frame with the quantized min-sum decoder and the
//! NMS and BP baselines.

use mimqms::channel::{bpsk_awgn_transmit, channel_llr, quantize_observation, sigma_from_design_snr};
use mimqms::codes::ieee80211n::{self, Rate};
use mimqms::decoders::{bp_decode, nms_decode, qms_decode, NmsQuantizer};
use mimqms::schedule_file::fixtures;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mimqms::Result<()> {
    let code = ieee80211n::code(Rate::R23);
    let schedule = fixtures::rate_compatible();
    let sigma = sigma_from_design_snr(2.6, code.rate())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y = bpsk_awgn_transmit(&vec![0; code.n_vars()], sigma, &mut rng);
    let hard_errors = y.iter().filter(|&&v| v < 0.0).count();
    println!("E_b/N_0 = 2.6 dB, σ = {sigma:.4}, {hard_errors} hard-decision errors");

    let idx: Vec<u8> = y.iter().map(|&v| quantize_observation(&schedule.channel, v, sigma) as u8).collect();
    let llr: Vec<f64> = y.iter().map(|&v| channel_llr(v, sigma)).collect();
    let results = [
        ("QMS", qms_decode(&code, &idx, &schedule)?),
        ("NMS", nms_decode(&code, &llr, 30, 0.75, NmsQuantizer::for_sigma(sigma))?),
        ("BP", bp_decode(&code, &llr, 30)?),
    ];
    for (name, r) in results {
        let errors = r.bits.iter().filter(|&&b| b == 1).count();
        println!("{name:<4} converged {:5}  iterations {:2}  bit errors {errors}", r.converged, r.iterations_used);
    }
    Ok(())
}
