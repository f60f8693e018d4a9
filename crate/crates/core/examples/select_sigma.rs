//! Scans a design-SNR grid and picks the σ_d whose schedule ends with the largest
//! mutual information.

use mimqms::codes::ieee80211n::{self, Rate};
use mimqms::codes::{edge_degree_distribution, JointDegreeDistribution};
use mimqms::mimde::{select_design_sigma, SIGMA_TIE_TOL};

fn main() -> mimqms::Result<()> {
    let joint = JointDegreeDistribution::from_single(&edge_degree_distribution(&ieee80211n::code(Rate::R23)));
    let grid: Vec<f64> = (0..=10).map(|k| 1.4 + 0.1 * k as f64).collect();
    let pick = select_design_sigma(&joint, 4, 8, 30, &grid, SIGMA_TIE_TOL)?;
    for c in &pick.candidates {
        println!("τ = {:.1} dB  σ = {:.4}  I_30 = {:.10}", c.tau_db, c.sigma, c.mi);
    }
    println!("selected σ_d = {:.4} (τ = {:.1} dB)", pick.sigma, pick.tau_db);
    Ok(())
}
