//! Merges the per-iteration LUTs of a designed schedule into shared groups and
//! reports the group count per LUT kind.

use mimqms::codes::ieee80211n::{self, Rate};
use mimqms::codes::joint_from_codes;
use mimqms::harness::{lut_entries, CountingPolicy};
use mimqms::lutopt::optimize;
use mimqms::mimde::design_schedule;

fn main() -> mimqms::Result<()> {
    let codes: Vec<_> = Rate::ALL.iter().map(|&r| ieee80211n::code(r)).collect();
    let joint = joint_from_codes(&codes.iter().collect::<Vec<_>>())?;
    let sigma = 0.6195;
    let designed = design_schedule(&joint, sigma, 4, 8, 30)?;
    let out = optimize(&designed, &joint, sigma, 0.9999)?;
    println!("Q: {:.8} → {:.8}", out.q_initial, out.q_final);
    for k in &out.kinds {
        println!(
            "{:<8} M = {:2}  Δd* = {:7.3}  evaluated {:2}  accepted {:2}  groups {:?}",
            k.kind.name(),
            k.partition.len(),
            k.delta_star,
            k.evaluated,
            k.accepted,
            k.partition.groups
        );
    }
    let before = lut_entries(&designed, CountingPolicy::PerIteration).total();
    let after = lut_entries(&out.schedule, CountingPolicy::Dedup).total();
    println!("stored LUT entries: {before} → {after}");
    Ok(())
}
