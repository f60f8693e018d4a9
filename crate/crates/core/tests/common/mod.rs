//! Brute-force reference implementations shared by the test targets.

#![allow(dead_code)]

use std::collections::BTreeMap;

use mimqms::codes::JointDegreeDistribution;
use mimqms::mimde::{signed_map, signed_unmap};
use mimqms::quantizer::mi;
use mimqms::{ConditionalPmf, ReconstructionFn};
use rand::Rng;

/// Strictly positive pmf over `n` symbols, sorted by decreasing LLR.
pub fn random_sorted_pmf<R: Rng>(rng: &mut R, n: usize) -> ConditionalPmf {
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.01..1.0), rng.random_range(0.01..1.0))).collect();
    let (s0, s1) = pairs.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    for p in &mut pairs {
        p.0 /= s0;
        p.1 /= s1;
    }
    pairs.sort_by(|a, b| (b.0 / b.1).total_cmp(&(a.0 / a.1)));
    ConditionalPmf::indexed(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect()).unwrap()
}

/// Strictly positive pmf over `n` symbols in random order.
pub fn random_pmf<R: Rng>(rng: &mut R, n: usize) -> ConditionalPmf {
    let mut p0: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let mut p1: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let (s0, s1): (f64, f64) = (p0.iter().sum(), p1.iter().sum());
    p0.iter_mut().for_each(|p| *p /= s0);
    p1.iter_mut().for_each(|p| *p /= s1);
    ConditionalPmf::indexed(p0, p1).unwrap()
}

/// Largest MI over every partition of the symbol order into `levels` contiguous cells.
pub fn exhaustive_sequential_mi(pmf: &ConditionalPmf, levels: usize) -> f64 {
    fn rec(pmf: &ConditionalPmf, start: usize, left: usize, cells: &mut Vec<(f64, f64)>, best: &mut f64) {
        let n = pmf.len();
        if left == 1 {
            let cell = (pmf.p0[start..].iter().sum(), pmf.p1[start..].iter().sum());
            cells.push(cell);
            let coarse = ConditionalPmf::indexed(cells.iter().map(|c| c.0).collect(), cells.iter().map(|c| c.1).collect())
                .unwrap();
            *best = best.max(mi(&coarse));
            cells.pop();
            return;
        }
        for end in start + 1..=n - (left - 1) {
            cells.push((pmf.p0[start..end].iter().sum(), pmf.p1[start..end].iter().sum()));
            rec(pmf, end, left - 1, cells, best);
            cells.pop();
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(pmf, 0, levels, &mut Vec::new(), &mut best);
    best
}

/// Calls `f` on every tuple of `len` symbols from `0..n`.
fn for_each_tuple(n: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0; len];
    loop {
        f(&t);
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            t[k] += 1;
            if t[k] < n {
                break;
            }
            t[k] = 0;
            k += 1;
        }
    }
}

/// C2V pmf by literal enumeration: for every degree-d CN, all tuples of the d − 1
/// incoming indices and all bit patterns whose XOR is the target bit.
pub fn cn_evolve_oracle(v2c: &ConditionalPmf, joint: &JointDegreeDistribution, q_m: u32) -> (Vec<f64>, Vec<f64>) {
    let n = 1usize << q_m;
    let mut out = (vec![0.0; n], vec![0.0; n]);
    for &(d, rho) in &joint.cn {
        let m = d - 1;
        for_each_tuple(n, m, |s| {
            let values: Vec<i32> = s.iter().map(|&i| signed_map(i, q_m).unwrap()).collect();
            let sign: i32 = values.iter().map(|v| v.signum()).product();
            let mag = values.iter().map(|v| v.abs()).min().unwrap();
            let t = signed_unmap(sign * mag, q_m).unwrap();
            let (mut w0, mut w1) = (0.0, 0.0);
            for bits in 0u32..(1 << m) {
                let prob: f64 = (0..m)
                    .map(|k| if bits >> k & 1 == 0 { v2c.p0[s[k]] } else { v2c.p1[s[k]] })
                    .product();
                if bits.count_ones() % 2 == 0 {
                    w0 += prob;
                } else {
                    w1 += prob;
                }
            }
            let norm = 2f64.powi(m as i32 - 1);
            out.0[t] += rho * w0 / norm;
            out.1[t] += rho * w1 / norm;
        });
    }
    out
}

/// Pmf of `φ_ch(L) + Σ φ_v(S_k)` by enumeration, with `j − 1` (`decision` false) or
/// `j` C2V terms at a degree-j VN. Keys are the integer sums.
pub fn vn_sum_oracle(
    ch: &ConditionalPmf,
    c2v: &ConditionalPmf,
    phi_ch: &ReconstructionFn,
    phi_v: &ReconstructionFn,
    joint: &JointDegreeDistribution,
    decision: bool,
) -> BTreeMap<i32, (f64, f64)> {
    let n = ch.len();
    let mut out: BTreeMap<i32, (f64, f64)> = BTreeMap::new();
    for &(j, theta) in &joint.vn {
        let terms = if decision { j } else { j - 1 };
        for l in 0..n {
            for_each_tuple(n, terms, |s| {
                let v = phi_ch.get(l) + s.iter().map(|&i| phi_v.get(i)).sum::<i32>();
                let p0 = ch.p0[l] * s.iter().map(|&i| c2v.p0[i]).product::<f64>();
                let p1 = ch.p1[l] * s.iter().map(|&i| c2v.p1[i]).product::<f64>();
                let e = out.entry(v).or_insert((0.0, 0.0));
                e.0 += theta * p0;
                e.1 += theta * p1;
            });
        }
    }
    out.retain(|_, p| p.0 > 0.0 || p.1 > 0.0);
    out
}

/// Odd-symmetric, non-increasing reconstruction over `n` levels with magnitudes ≤ `max`.
pub fn random_reconstruction<R: Rng>(rng: &mut R, n: usize, max: i32) -> ReconstructionFn {
    let half = n / 2;
    let mut mags: Vec<i32> = (0..half).map(|_| rng.random_range(0..=max)).collect();
    mags.sort_unstable_by(|a, b| b.cmp(a));
    let mut table = mags.clone();
    table.extend(mags.iter().rev().map(|m| -m));
    ReconstructionFn::new(table).unwrap()
}

/// Largest absolute difference between a computed pmf and an oracle keyed by label.
pub fn max_deviation(pmf: &ConditionalPmf, oracle: &BTreeMap<i32, (f64, f64)>) -> f64 {
    let mut computed: BTreeMap<i32, (f64, f64)> = BTreeMap::new();
    for i in 0..pmf.len() {
        computed.insert(pmf.values[i] as i32, (pmf.p0[i], pmf.p1[i]));
    }
    computed
        .keys()
        .chain(oracle.keys())
        .map(|k| {
            let (a, b) = computed.get(k).copied().unwrap_or_default();
            let (c, d) = oracle.get(k).copied().unwrap_or_default();
            (a - c).abs().max((b - d).abs())
        })
        .fold(0.0, f64::max)
}

/// Exclusion minimum at every edge, straight from the definition.
pub fn check_update_oracle(inputs: &[u8], q_m: u32) -> Vec<u8> {
    (0..inputs.len())
        .map(|e| {
            let others: Vec<i32> = inputs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != e)
                .map(|(_, &s)| signed_map(s as usize, q_m).unwrap())
                .collect();
            let sign: i32 = others.iter().map(|v| v.signum()).product();
            let mag = others.iter().map(|v| v.abs()).min().unwrap();
            signed_unmap(sign * mag, q_m).unwrap() as u8
        })
        .collect()
}
