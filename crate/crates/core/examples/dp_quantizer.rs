//! Quantizes a fine BPSK-AWGN LLR pmf into 2, 4, 8 and 16 cells with the
//! MI-maximizing dynamic program.

use mimqms::channel::fine_channel_pmf;
use mimqms::quantizer::{dp_quantize, mi};

fn main() -> mimqms::Result<()> {
    let fine = fine_channel_pmf(0.7, 400, 20.0)?;
    println!("fine pmf: {} symbols, I(X; Y) = {:.6}", fine.pmf.len(), mi(&fine.pmf));
    for levels in [2, 4, 8, 16] {
        let (cuts, coarse) = dp_quantize(&fine.pmf, levels)?;
        let llr_edges: Vec<String> = cuts.cuts.iter().map(|&c| format!("{:.2}", fine.edges[c])).collect();
        println!("K = {levels:2}: I = {:.6}, LLR thresholds [{}]", mi(&coarse), llr_edges.join(", "));
    }
    Ok(())
}
