//! Binary-input conditional pmfs and the dynamic-programming quantizer that
//! maximizes mutual information over sequential (contiguous) partitions.

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Relative slack under which two candidate partitions are treated as tied.
const TIE_TOL: f64 = 1e-13;

/// A finite alphabet with probabilities conditioned on the coded bit X ∈ {0, 1}.
///
/// Symbol order matters: quantizers cut this sequence into contiguous cells, and
/// index 0 is by convention the strongest belief in X = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalPmf {
    /// Label carried by each symbol (an integer message value or an LLR).
    pub values: Vec<f64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
}

impl ConditionalPmf {
    /// Validates lengths, non-negativity and normalization (±1e-9 per bit).
    pub fn new(values: Vec<f64>, p0: Vec<f64>, p1: Vec<f64>) -> Result<Self> {
        if values.len() != p0.len() || p0.len() != p1.len() {
            return Err(Error::InvalidInput("pmf vectors differ in length".into()));
        }
        if p0.is_empty() {
            return Err(Error::InvalidInput("empty pmf".into()));
        }
        if p0.iter().chain(&p1).any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput("pmf has a negative or non-finite entry".into()));
        }
        let pmf = ConditionalPmf { values, p0, p1 };
        let (s0, s1) = pmf.totals();
        if (s0 - 1.0).abs() > NORM_TOL || (s1 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!("pmf not normalized: Σp0 = {s0}, Σp1 = {s1}")));
        }
        Ok(pmf)
    }

    /// Builds a pmf whose labels are the symbol indices.
    pub fn indexed(p0: Vec<f64>, p1: Vec<f64>) -> Result<Self> {
        let values = (0..p0.len()).map(|i| i as f64).collect();
        Self::new(values, p0, p1)
    }

    pub fn len(&self) -> usize {
        self.p0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p0.is_empty()
    }

    pub fn totals(&self) -> (f64, f64) {
        (self.p0.iter().sum(), self.p1.iter().sum())
    }

    /// Rescales both conditionals to unit mass. Repeated density evolution
    /// amplifies rounding in the totals geometrically.
    pub fn renormalize(&mut self) {
        let (s0, s1) = self.totals();
        if s0 > 0.0 {
            self.p0.iter_mut().for_each(|p| *p /= s0);
        }
        if s1 > 0.0 {
            self.p1.iter_mut().for_each(|p| *p /= s1);
        }
    }

    /// Natural-log LLR `ln(p0 / p1)` of symbol `i`; ±∞ when one side is zero and NaN
    /// for an empty symbol.
    pub fn llr(&self, i: usize) -> f64 {
        let (a, b) = (self.p0[i], self.p1[i]);
        match (a > 0.0, b > 0.0) {
            (true, true) => (a / b).ln(),
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (false, false) => f64::NAN,
        }
    }

    /// True when non-empty symbols have non-increasing LLR (with a small relative slack).
    pub fn is_llr_sorted(&self) -> bool {
        let mut prev = f64::INFINITY;
        for i in 0..self.len() {
            let l = self.llr(i);
            if l.is_nan() {
                continue;
            }
            if l > prev + 1e-9 * (1.0 + prev.abs()) {
                return false;
            }
            prev = l;
        }
        true
    }

    /// Channel symmetry: `p0[i] == p1[n - 1 - i]` within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.len();
        (0..n).all(|i| (self.p0[i] - self.p1[n - 1 - i]).abs() <= tol)
    }

    /// The pmf seen with the roles of X = 0 and X = 1 swapped and the symbol order
    /// reversed. Equal to `self` for a symmetric pmf.
    pub fn mirrored(&self) -> Self {
        ConditionalPmf {
            values: self.values.iter().rev().map(|v| -v).collect(),
            p0: self.p1.iter().rev().copied().collect(),
            p1: self.p0.iter().rev().copied().collect(),
        }
    }
}

/// I(X; Z) in bits for prior `P(X = 0) = prior`.
pub fn mutual_information(pmf: &ConditionalPmf, prior: f64) -> f64 {
    pmf.p0
        .iter()
        .zip(&pmf.p1)
        .map(|(&a, &b)| cell_mi(a, b, prior))
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Uniform-prior MI, the quantity every design step maximizes.
pub fn mi(pmf: &ConditionalPmf) -> f64 {
    mutual_information(pmf, 0.5)
}

#[inline]
fn cell_mi(a: f64, b: f64, prior: f64) -> f64 {
    let q = 1.0 - prior;
    let mix = prior * a + q * b;
    if mix <= 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    if a > 0.0 {
        s += prior * a * (a / mix).log2();
    }
    if b > 0.0 {
        s += q * b * (b / mix).log2();
    }
    s
}

/// Cut positions of a sequential quantizer: cut `c` separates symbols `c - 1` and `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdSet {
    pub cuts: Vec<usize>,
}

impl ThresholdSet {
    pub fn new(cuts: Vec<usize>) -> Self {
        ThresholdSet { cuts }
    }

    /// Number of output cells.
    pub fn levels(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Cell index of every input symbol for an alphabet of `n` symbols.
    pub fn cell_of_each(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n);
        let mut cell = 0;
        for i in 0..n {
            while cell < self.cuts.len() && self.cuts[cell] <= i {
                cell += 1;
            }
            out.push(cell);
        }
        out
    }

    /// Cells as half-open symbol ranges.
    pub fn cells(&self, n: usize) -> Vec<std::ops::Range<usize>> {
        let mut edges = Vec::with_capacity(self.cuts.len() + 2);
        edges.push(0);
        edges.extend_from_slice(&self.cuts);
        edges.push(n);
        edges.windows(2).map(|w| w[0]..w[1]).collect()
    }

    fn validate(&self, n: usize) -> Result<()> {
        let mut prev = 0;
        for &c in &self.cuts {
            if c <= prev || c >= n {
                return Err(Error::IndexOutOfRange(format!("cut {c} invalid for {n} symbols")));
            }
            prev = c;
        }
        Ok(())
    }
}

/// Sums member-symbol probabilities per cell. Output labels are cell indices.
pub fn apply_partition(pmf: &ConditionalPmf, thresholds: &ThresholdSet) -> Result<ConditionalPmf> {
    thresholds.validate(pmf.len())?;
    let cells = thresholds.cells(pmf.len());
    let p0 = cells.iter().map(|r| pmf.p0[r.clone()].iter().sum()).collect();
    let p1 = cells.iter().map(|r| pmf.p1[r.clone()].iter().sum()).collect();
    let values = (0..cells.len()).map(|i| i as f64).collect();
    Ok(ConditionalPmf { values, p0, p1 })
}

/// MI-optimal sequential quantizer of an LLR-sorted pmf into `levels` cells.
///
/// Returns the cut set and the induced coarse pmf. Fails when the input is not
/// sorted by decreasing LLR or has fewer non-empty symbols than `levels`.
pub fn dp_quantize(pmf: &ConditionalPmf, levels: usize) -> Result<(ThresholdSet, ConditionalPmf)> {
    if !pmf.is_llr_sorted() {
        return Err(Error::InvalidInput("pmf is not sorted by decreasing LLR".into()));
    }
    dp_quantize_in_order(pmf, levels)
}

/// Like [`dp_quantize`] but optimizes over contiguous partitions of the given
/// symbol order without requiring LLR monotonicity.
pub fn dp_quantize_in_order(pmf: &ConditionalPmf, levels: usize) -> Result<(ThresholdSet, ConditionalPmf)> {
    let n = pmf.len();
    if levels == 0 || levels > n {
        return Err(Error::InvalidInput(format!("cannot quantize {n} symbols into {levels} cells")));
    }

    // Empty symbols join their higher-LLR (preceding) neighbour; a leading run of
    // empty symbols joins the first non-empty one.
    let live: Vec<usize> = (0..n).filter(|&i| pmf.p0[i] > 0.0 || pmf.p1[i] > 0.0).collect();
    if live.len() < levels {
        return Err(Error::Degenerate(format!(
            "{} non-empty symbols cannot fill {levels} cells",
            live.len()
        )));
    }
    let m = live.len();
    let mut c0 = vec![0.0; m + 1];
    let mut c1 = vec![0.0; m + 1];
    for (k, &i) in live.iter().enumerate() {
        c0[k + 1] = c0[k] + pmf.p0[i];
        c1[k + 1] = c1[k] + pmf.p1[i];
    }

    let cuts_live = if levels == 1 {
        Vec::new()
    } else {
        optimal_cuts(&c0, &c1, levels)
    };

    // Compressed cut k sits before live[k]; map back so that trailing empties stay
    // with the preceding cell.
    let cuts: Vec<usize> = cuts_live.iter().map(|&k| live[k]).collect();
    let ts = ThresholdSet::new(cuts);
    let coarse = apply_partition(pmf, &ts)?;
    Ok((ts, coarse))
}

/// Dynamic program over prefix partitions: `best[k][j]` is the largest MI obtainable
/// by splitting the first `j` symbols into `k` cells.
fn optimal_cuts(c0: &[f64], c1: &[f64], levels: usize) -> Vec<usize> {
    let m = c0.len() - 1;
    let cost = |i: usize, j: usize| cell_mi(c0[j] - c0[i], c1[j] - c1[i], 0.5);

    // Triangular cost table, row i holds cells [i, j) for j in i+1..=m.
    let row_start: Vec<usize> = (0..m).scan(0usize, |acc, i| {
        let s = *acc;
        *acc += m - i;
        Some(s)
    }).collect();
    let mut table = vec![0.0; m * (m + 1) / 2];
    for i in 0..m {
        for j in i + 1..=m {
            table[row_start[i] + (j - i - 1)] = cost(i, j);
        }
    }
    let g = |i: usize, j: usize| table[row_start[i] + (j - i - 1)];

    let neg = f64::NEG_INFINITY;
    let mut best = vec![neg; m + 1];
    for j in 1..=m {
        best[j] = g(0, j);
    }
    let mut arg: Vec<Vec<usize>> = Vec::with_capacity(levels);
    arg.push(vec![0; m + 1]);
    for k in 2..=levels {
        let mut next = vec![neg; m + 1];
        let mut choice = vec![0; m + 1];
        // the remaining levels - k cells need at least one symbol each
        for j in k..=m - (levels - k) {
            let mut b = neg;
            let mut a = 0;
            for i in (k - 1)..j {
                let v = best[i] + g(i, j);
                if v > b + TIE_TOL * b.abs().max(1e-300) || b == neg {
                    b = v;
                    a = i;
                }
            }
            next[j] = b;
            choice[j] = a;
        }
        best = next;
        arg.push(choice);
    }

    let mut cuts = vec![0; levels - 1];
    let mut j = m;
    for k in (1..levels).rev() {
        let i = arg[k][j];
        cuts[k - 1] = i;
        j = i;
    }
    cuts
}
