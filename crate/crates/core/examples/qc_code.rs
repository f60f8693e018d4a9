//! Expands the 802.11n quasi-cyclic codes, prints their degree distributions and
//! the joint distribution the rate-compatible decoder is designed for.

use mimqms::codes::ieee80211n::{self, Rate};
use mimqms::codes::{edge_degree_distribution, is_codeword, joint_from_codes, load_alist};

fn main() -> mimqms::Result<()> {
    let codes: Vec<_> = Rate::ALL.iter().map(|&r| ieee80211n::code(r)).collect();
    for (rate, code) in Rate::ALL.iter().zip(&codes) {
        let dist = edge_degree_distribution(code);
        println!(
            "{}: n = {}, m = {}, edges = {}, rate = {:.4}",
            rate.name(),
            code.n_vars(),
            code.n_checks(),
            code.n_edges(),
            code.rate()
        );
        println!("  ρ(x) edge fractions {:?}", dist.cn_coeffs);
        println!("  λ(x) edge fractions {:?}", dist.vn_coeffs);
    }

    let joint = joint_from_codes(&codes.iter().collect::<Vec<_>>())?;
    println!("joint CN {:?}", joint.cn);
    println!("joint VN {:?}", joint.vn);
    println!("joint design rate {:.4}", joint.design_rate());

    // alist round trip
    let again = load_alist(&codes[0].to_alist())?;
    assert_eq!(again.n_edges(), codes[0].n_edges());
    println!("all-zero word is a codeword: {}", is_codeword(&again, &vec![0; again.n_vars()]));
    Ok(())
}
