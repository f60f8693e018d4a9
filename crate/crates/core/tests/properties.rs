//! Invariants of the building blocks under randomized inputs.

mod common;

use common::check_update_oracle;
use mimqms::codes::ieee80211n::{self, Rate};
use mimqms::codes::JointDegreeDistribution;
use mimqms::decoders::{qms_check_update, qms_decode};
use mimqms::harness::{emit_csv, load_schedule, parse_csv, FerRecord};
use mimqms::lutopt::{merge_group, partition_by_threshold, LutKind, LutTrace};
use mimqms::mimde::cn_evolve;
use mimqms::quantizer::{dp_quantize, mi};
use mimqms::ConditionalPmf;
use proptest::prelude::*;

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

/// Symmetric pmf over `n` symbols: `p1[s] = p0[n − 1 − s]`.
fn symmetric_pmf(n: usize) -> impl Strategy<Value = ConditionalPmf> {
    weights(n).prop_map(move |p0| {
        let p1 = p0.iter().rev().copied().collect();
        ConditionalPmf::indexed(p0, p1).unwrap()
    })
}

fn trace() -> impl Strategy<Value = LutTrace> {
    (1usize..12, 1usize..6).prop_flat_map(|(len, width)| {
        prop::collection::vec(prop::collection::vec(-20i32..20, width), len)
            .prop_map(|rows| LutTrace::new(LutKind::PhiV, rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_is_contiguous_cover(t in trace(), delta in 0.0f64..30.0) {
        let p = partition_by_threshold(&t, delta);
        prop_assert_eq!(p.groups.len(), p.merged.len());
        prop_assert_eq!(p.groups.first().unwrap().start, 0);
        prop_assert_eq!(p.groups.last().unwrap().end, t.rows.len());
        for w in p.groups.windows(2) {
            prop_assert_eq!(w[0].end, w[1].start);
        }
        prop_assert!(p.groups.iter().all(|g| !g.is_empty()));
        prop_assert_eq!(p.expand().len(), t.rows.len());
    }

    #[test]
    fn larger_threshold_coarsens(t in trace(), a in 0.0f64..30.0, b in 0.0f64..30.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fine = partition_by_threshold(&t, lo);
        let coarse = partition_by_threshold(&t, hi);
        prop_assert!(coarse.len() <= fine.len());
        for g in &fine.groups {
            prop_assert!(coarse.groups.iter().any(|c| c.start <= g.start && g.end <= c.end));
        }
    }

    #[test]
    fn merge_ignores_row_order(rows in prop::collection::vec(prop::collection::vec(-50i32..50, 4), 1..8), seed in any::<u64>()) {
        let mut shuffled = rows.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(merge_group(&rows).unwrap(), merge_group(&shuffled).unwrap());
    }

    #[test]
    fn merge_is_idempotent(rows in prop::collection::vec(prop::collection::vec(-50i32..50, 4), 1..8), k in 1usize..5) {
        let m = merge_group(&rows).unwrap();
        prop_assert_eq!(merge_group(&vec![m.clone(); k]).unwrap(), m);
    }

    #[test]
    fn cn_evolve_preserves_mass_and_symmetry(v2c in symmetric_pmf(16), d_small in 2usize..5, d_large in 5usize..9, w in 0.0f64..1.0) {
        let joint = JointDegreeDistribution { cn: vec![(d_small, w), (d_large, 1.0 - w)], vn: vec![(3, 1.0)] };
        let c2v = cn_evolve(&v2c, &joint, 4).unwrap();
        let (s0, s1) = c2v.totals();
        prop_assert!((s0 - 1.0).abs() < 1e-12 && (s1 - 1.0).abs() < 1e-12);
        for s in 0..16 {
            prop_assert!((c2v.p0[s] - c2v.p1[15 - s]).abs() < 1e-12);
        }
    }

    #[test]
    fn cn_evolve_loses_information(v2c in symmetric_pmf(8), d in 2usize..7) {
        let joint = JointDegreeDistribution { cn: vec![(d, 1.0)], vn: vec![(3, 1.0)] };
        let c2v = cn_evolve(&v2c, &joint, 3).unwrap();
        prop_assert!(mi(&c2v) <= mi(&v2c) + 1e-12);
    }

    #[test]
    fn dp_cuts_increase_and_mass_is_kept(p0 in weights(12), p1 in weights(12), k in 2usize..6) {
        let mut pairs: Vec<(f64, f64)> = p0.into_iter().zip(p1).collect();
        pairs.sort_by(|a, b| (b.0 / b.1).total_cmp(&(a.0 / a.1)));
        let pmf = ConditionalPmf::indexed(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect()).unwrap();
        let (cuts, coarse) = dp_quantize(&pmf, k).unwrap();
        prop_assert!(cuts.cuts.windows(2).all(|w| w[0] < w[1]));
        let (s0, s1) = coarse.totals();
        prop_assert!((s0 - 1.0).abs() < 1e-12 && (s1 - 1.0).abs() < 1e-12);
        prop_assert!(mi(&coarse) <= mi(&pmf) + 1e-12);
    }

    #[test]
    fn two_minima_equal_exclusion_minimum(inputs in prop::collection::vec(0u8..16, 2..=6)) {
        let mut out = vec![0; inputs.len()];
        qms_check_update(&inputs, &mut out, 4);
        prop_assert_eq!(out, check_update_oracle(&inputs, 4));
    }

    #[test]
    fn csv_round_trip_is_a_fixed_point(
        rows in prop::collection::vec((0u32..60, 1u64..1_000_000, 0u64..1000, 0u64..100_000, 0.0f64..30.0), 1..6)
    ) {
        let records: Vec<FerRecord> = rows
            .into_iter()
            .map(|(snr, frames, fe, be, it)| {
                let fe = fe.min(frames);
                FerRecord {
                    snr_db: f64::from(snr) / 10.0,
                    frames,
                    frame_errors: fe,
                    bit_errors: be,
                    fer: fe as f64 / frames as f64,
                    ber: be as f64 / (frames as f64 * 1296.0),
                    i_avg: it,
                }
            })
            .collect();
        let text = emit_csv(&records);
        let back = parse_csv(&text).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in back.iter().zip(&records) {
            prop_assert_eq!((a.frames, a.frame_errors, a.bit_errors), (b.frames, b.frame_errors, b.bit_errors));
            prop_assert!((a.fer - b.fer).abs() <= 1e-5 * b.fer.abs().max(1e-300));
        }
        prop_assert_eq!(emit_csv(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn qms_decoding_is_deterministic(idx in prop::collection::vec(0u8..16, 1296)) {
        let code = ieee80211n::code(Rate::R56);
        let schedule = load_schedule("fixture:rc").unwrap();
        let a = qms_decode(&code, &idx, &schedule).unwrap();
        let b = qms_decode(&code, &idx, &schedule).unwrap();
        prop_assert_eq!(a, b);
    }
}
