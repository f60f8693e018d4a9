//! Runs density evolution for the rate-compatible ensemble and prints the
//! per-iteration LUTs and mutual information.

use mimqms::codes::ieee80211n::{self, Rate};
use mimqms::codes::joint_from_codes;
use mimqms::mimde::design_schedule;

fn main() -> mimqms::Result<()> {
    let codes: Vec<_> = Rate::ALL.iter().map(|&r| ieee80211n::code(r)).collect();
    let joint = joint_from_codes(&codes.iter().collect::<Vec<_>>())?;
    let s = design_schedule(&joint, 0.6195, 4, 8, 30)?;
    for (t, it) in s.iters.iter().enumerate() {
        println!(
            "{:2}  I = {:.8}  φ_v {:?}  φ_ch {:?}  Γ_e {}",
            t + 1,
            s.mi_trace[t],
            &it.phi_v.table[..8],
            &it.phi_ch.table[..8],
            it.gamma_e
        );
    }
    if let Some(t) = s.flags.saturated_from {
        println!("saturated from iteration {t}");
    }
    Ok(())
}
