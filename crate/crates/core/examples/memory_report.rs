//! Memory of the rate-compatible decoder against rate-specific decoders, NMS and
//! the modelled LUT-based decoder.

use mimqms::codes::ieee80211n::{self, Rate};
use mimqms::harness::{memory_report, MemoryParams, LUT_BASED, PROPOSED};
use mimqms::schedule_file::fixtures;

fn main() -> mimqms::Result<()> {
    let codes: Vec<_> = Rate::ALL.iter().map(|&r| ieee80211n::code(r)).collect();
    let (r23, r34, r56) = (fixtures::rate_2_3(), fixtures::rate_3_4(), fixtures::rate_5_6());
    let report = memory_report(
        &fixtures::rate_compatible(),
        &[("R=2/3", &r23), ("R=3/4", &r34), ("R=5/6", &r56)],
        &codes.iter().collect::<Vec<_>>(),
        MemoryParams::default(),
    )?;
    print!("{}", report.to_table());
    if let Some(r) = report.reduction(PROPOSED, LUT_BASED) {
        println!("reduction vs LUT-based model: {:.2}%", 100.0 * r);
    }
    Ok(())
}
