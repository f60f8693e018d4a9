//! LDPC codes: Tanner-graph representation, alist and quasi-cyclic base-matrix
//! ingestion, and edge-perspective degree distributions.
//!
//! Codes are stored as two compressed adjacency lists over a common edge numbering.
//! Edges are numbered check-major: the edges of check node `c` are
//! `check_ptr[c]..check_ptr[c + 1]`. The variable-node view lists, for each VN, the
//! ids of its edges in that same numbering, which is what the message-passing
//! decoders index into.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};

/// Sparse parity-check matrix with CN/VN adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct TannerCode {
    n_vars: usize,
    n_checks: usize,
    rate: f64,
    check_ptr: Vec<usize>,
    check_vars: Vec<usize>,
    var_ptr: Vec<usize>,
    var_edges: Vec<usize>,
    var_checks: Vec<usize>,
}

impl TannerCode {
    /// Builds a code from per-check adjacency lists (0-based VN indices).
    ///
    /// Degree-1 checks are representable (a lifted identity block produces them);
    /// the decoders reject codes whose checks have fewer than two neighbours.
    ///
    /// The rate defaults to `(n_vars - n_checks) / n_vars`; H is assumed full rank.
    pub fn from_check_adjacency(n_vars: usize, check_adj: &[Vec<usize>]) -> Result<Self> {
        let n_checks = check_adj.len();
        if n_vars == 0 || n_checks == 0 {
            return Err(Error::InvalidInput("code must have at least one VN and one CN".into()));
        }
        let mut check_ptr = Vec::with_capacity(n_checks + 1);
        let mut check_vars = Vec::new();
        check_ptr.push(0);
        for (c, vars) in check_adj.iter().enumerate() {
            if vars.is_empty() {
                return Err(Error::InvalidInput(format!("check node {c} has no neighbours")));
            }
            for &v in vars {
                if v >= n_vars {
                    return Err(Error::IndexOutOfRange(format!("check node {c} references VN {v} >= {n_vars}")));
                }
            }
            let mut sorted = vars.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("check node {c} lists a VN twice")));
            }
            check_vars.extend_from_slice(vars);
            check_ptr.push(check_vars.len());
        }

        let mut var_deg = vec![0usize; n_vars];
        for &v in &check_vars {
            var_deg[v] += 1;
        }
        if let Some(v) = var_deg.iter().position(|&d| d == 0) {
            return Err(Error::InvalidInput(format!("variable node {v} has degree 0")));
        }
        let mut var_ptr = Vec::with_capacity(n_vars + 1);
        var_ptr.push(0);
        for d in &var_deg {
            var_ptr.push(var_ptr.last().unwrap() + d);
        }
        let mut fill = var_ptr[..n_vars].to_vec();
        let mut var_edges = vec![0; check_vars.len()];
        let mut var_checks = vec![0; check_vars.len()];
        for c in 0..n_checks {
            for e in check_ptr[c]..check_ptr[c + 1] {
                let v = check_vars[e];
                var_edges[fill[v]] = e;
                var_checks[fill[v]] = c;
                fill[v] += 1;
            }
        }
        let rate = (n_vars as f64 - n_checks as f64) / n_vars as f64;
        Ok(TannerCode {
            n_vars,
            n_checks,
            rate,
            check_ptr,
            check_vars,
            var_ptr,
            var_edges,
            var_checks,
        })
    }

    /// Overrides the code rate taken from metadata.
    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_edges(&self) -> usize {
        self.check_vars.len()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// VN indices incident to check node `c`, in edge order.
    pub fn check_adj(&self, c: usize) -> &[usize] {
        &self.check_vars[self.check_ptr[c]..self.check_ptr[c + 1]]
    }

    /// CN indices incident to variable node `v`.
    pub fn var_adj(&self, v: usize) -> &[usize] {
        &self.var_checks[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    /// Edge range of check node `c` in the check-major edge numbering.
    pub fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_ptr[c]..self.check_ptr[c + 1]
    }

    /// Edge ids incident to variable node `v`.
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    /// VN endpoint of every edge, indexed by edge id.
    pub fn edge_vars(&self) -> &[usize] {
        &self.check_vars
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_ptr[c + 1] - self.check_ptr[c]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_ptr[v + 1] - self.var_ptr[v]
    }

    pub fn max_check_degree(&self) -> usize {
        (0..self.n_checks).map(|c| self.check_degree(c)).max().unwrap_or(0)
    }

    pub fn min_check_degree(&self) -> usize {
        (0..self.n_checks).map(|c| self.check_degree(c)).min().unwrap_or(0)
    }

    pub fn max_var_degree(&self) -> usize {
        (0..self.n_vars).map(|v| self.var_degree(v)).max().unwrap_or(0)
    }

    /// Serializes to the alist layout (1-based indices).
    pub fn to_alist(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n_vars, self.n_checks);
        let _ = writeln!(s, "{} {}", self.max_var_degree(), self.max_check_degree());
        let vdeg: Vec<String> = (0..self.n_vars).map(|v| self.var_degree(v).to_string()).collect();
        let _ = writeln!(s, "{}", vdeg.join(" "));
        let cdeg: Vec<String> = (0..self.n_checks).map(|c| self.check_degree(c).to_string()).collect();
        let _ = writeln!(s, "{}", cdeg.join(" "));
        for v in 0..self.n_vars {
            let row: Vec<String> = self.var_adj(v).iter().map(|c| (c + 1).to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        for c in 0..self.n_checks {
            let row: Vec<String> = self.check_adj(c).iter().map(|v| (v + 1).to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

/// Parses an alist document.
///
/// Trailing zeros after the declared degree (fixed-width padding) are accepted. Every
/// adjacency row must match its declared degree and the two adjacency halves must
/// describe the same edge set.
pub fn load_alist(text: &str) -> Result<TannerCode> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next_ints = |what: &str| -> Result<(usize, Vec<i64>)> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(text.lines().count() + 1, format!("unexpected end of file, expected {what}")))?;
        let vals = l
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| parse_err(ln, format!("non-integer token {t:?} in {what}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok((ln, vals))
    };

    let (ln, hdr) = next_ints("header")?;
    if hdr.len() != 2 || hdr[0] <= 0 || hdr[1] <= 0 {
        return Err(parse_err(ln, "malformed header: expected 'n m'"));
    }
    let (n, m) = (hdr[0] as usize, hdr[1] as usize);
    let (ln, maxd) = next_ints("max degrees")?;
    if maxd.len() != 2 {
        return Err(parse_err(ln, "malformed header: expected max VN and CN degrees"));
    }
    let (ln, vdeg) = next_ints("VN degree list")?;
    if vdeg.len() != n {
        return Err(parse_err(ln, format!("VN degree list has {} entries, expected {n}", vdeg.len())));
    }
    let (ln, cdeg) = next_ints("CN degree list")?;
    if cdeg.len() != m {
        return Err(parse_err(ln, format!("CN degree list has {} entries, expected {m}", cdeg.len())));
    }

    let mut var_adj = Vec::with_capacity(n);
    for (v, &d) in vdeg.iter().enumerate() {
        let (ln, row) = next_ints("VN adjacency")?;
        let adj = adjacency_row(ln, &row, d, m, "VN", v, "CN")?;
        var_adj.push((ln, adj));
    }
    let mut check_adj = Vec::with_capacity(m);
    for (c, &d) in cdeg.iter().enumerate() {
        let (ln, row) = next_ints("CN adjacency")?;
        let adj = adjacency_row(ln, &row, d, n, "CN", c, "VN")?;
        check_adj.push(adj);
    }

    // transpose consistency
    let mut from_checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, adj) in check_adj.iter().enumerate() {
        for &v in adj {
            from_checks[v].push(c);
        }
    }
    for (v, (ln, adj)) in var_adj.iter().enumerate() {
        let mut a = adj.clone();
        a.sort_unstable();
        if a != from_checks[v] {
            return Err(parse_err(*ln, format!("VN {} adjacency disagrees with the CN lists", v + 1)));
        }
    }
    TannerCode::from_check_adjacency(n, &check_adj)
}

/// One alist adjacency row: the first `degree` entries are 1-based indices, any
/// further entries must be zero padding.
fn adjacency_row(
    ln: usize,
    row: &[i64],
    degree: i64,
    bound: usize,
    node: &str,
    idx: usize,
    other: &str,
) -> Result<Vec<usize>> {
    let d = degree.max(0) as usize;
    if row.len() < d || row[d..].iter().any(|&x| x != 0) {
        let listed = row.iter().filter(|&&x| x != 0).count();
        return Err(parse_err(
            ln,
            format!("degree mismatch: {node} {} declares {degree} but lists {listed}", idx + 1),
        ));
    }
    row[..d]
        .iter()
        .map(|&x| {
            if x < 1 || x as usize > bound {
                Err(parse_err(ln, format!("index out of range: {other} index {x} not in 1..={bound}")))
            } else {
                Ok(x as usize - 1)
            }
        })
        .collect()
}

/// Quasi-cyclic base matrix: shift values with `-1` marking an all-zero block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMatrix {
    pub shifts: Vec<Vec<i64>>,
    pub lift: usize,
}

impl BaseMatrix {
    /// Parses the plain grid format: first line `rows cols Z`, then `rows` lines of
    /// `cols` integers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, hdr) = lines.next().ok_or_else(|| parse_err(1, "empty base matrix"))?;
        let hdr: Vec<usize> = hdr
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        if hdr.len() != 3 || hdr.iter().any(|&x| x == 0) {
            return Err(parse_err(ln, "malformed header: expected 'rows cols Z'"));
        }
        let (rows, cols, lift) = (hdr[0], hdr[1], hdr[2]);
        let mut shifts = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "missing base-matrix row"))?;
            let row: Vec<i64> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad shift token {t:?}"))))
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(parse_err(ln, format!("row has {} entries, expected {cols}", row.len())));
            }
            shifts.push(row);
        }
        Ok(BaseMatrix { shifts, lift })
    }

    pub fn expand(&self) -> Result<TannerCode> {
        expand_base_matrix(&self.shifts, self.lift)
    }
}

/// Lifts a base matrix: entry `s >= 0` becomes the Z×Z identity cyclically shifted
/// right by `s` (row `k` of the block connects column `(k + s) mod Z`).
pub fn expand_base_matrix(base: &[Vec<i64>], lift: usize) -> Result<TannerCode> {
    if lift == 0 {
        return Err(Error::InvalidInput("lift must be positive".into()));
    }
    let cols = base.first().map_or(0, Vec::len);
    if base.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput("ragged base matrix".into()));
    }
    let z = lift as i64;
    let mut check_adj = Vec::with_capacity(base.len() * lift);
    for (i, row) in base.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if s < -1 || s >= z {
                return Err(Error::InvalidInput(format!("shift {s} at ({i}, {j}) outside [-1, {}]", z - 1)));
            }
        }
        for k in 0..lift {
            let adj = row
                .iter()
                .enumerate()
                .filter(|(_, &s)| s >= 0)
                .map(|(j, &s)| j * lift + (k + s as usize) % lift)
                .collect();
            check_adj.push(adj);
        }
    }
    TannerCode::from_check_adjacency(cols * lift, &check_adj)
}

/// Edge-perspective degree distribution of one code.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    /// degree → fraction of edges on CNs of that degree
    pub cn_coeffs: BTreeMap<usize, f64>,
    /// degree → fraction of edges on VNs of that degree
    pub vn_coeffs: BTreeMap<usize, f64>,
}

impl DegreeDistribution {
    pub fn new(cn_coeffs: BTreeMap<usize, f64>, vn_coeffs: BTreeMap<usize, f64>) -> Result<Self> {
        for (name, map) in [("CN", &cn_coeffs), ("VN", &vn_coeffs)] {
            if map.is_empty() {
                return Err(Error::InvalidInput(format!("{name} distribution is empty")));
            }
            if map.keys().any(|&d| d == 0) || map.values().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidInput(format!("{name} distribution has an invalid entry")));
            }
            let total: f64 = map.values().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("{name} coefficients sum to {total}")));
            }
        }
        Ok(DegreeDistribution { cn_coeffs, vn_coeffs })
    }
}

pub fn edge_degree_distribution(code: &TannerCode) -> DegreeDistribution {
    let e = code.n_edges() as f64;
    let mut cn = BTreeMap::new();
    for c in 0..code.n_checks() {
        *cn.entry(code.check_degree(c)).or_insert(0usize) += code.check_degree(c);
    }
    let mut vn = BTreeMap::new();
    for v in 0..code.n_vars() {
        *vn.entry(code.var_degree(v)).or_insert(0usize) += code.var_degree(v);
    }
    DegreeDistribution {
        cn_coeffs: cn.into_iter().map(|(d, n)| (d, n as f64 / e)).collect(),
        vn_coeffs: vn.into_iter().map(|(d, n)| (d, n as f64 / e)).collect(),
    }
}

/// Joint (multi-code) degree distribution over the union degree sets.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDegreeDistribution {
    /// `(degree, ρ̃)` sorted by degree
    pub cn: Vec<(usize, f64)>,
    /// `(degree, θ̃)` sorted by degree
    pub vn: Vec<(usize, f64)>,
}

impl JointDegreeDistribution {
    pub fn cn_degrees(&self) -> Vec<usize> {
        self.cn.iter().map(|&(d, _)| d).collect()
    }

    pub fn vn_degrees(&self) -> Vec<usize> {
        self.vn.iter().map(|&(d, _)| d).collect()
    }

    pub fn max_cn_degree(&self) -> usize {
        self.cn.last().map_or(0, |&(d, _)| d)
    }

    pub fn max_vn_degree(&self) -> usize {
        self.vn.last().map_or(0, |&(d, _)| d)
    }

    /// Design rate of the ensemble, `1 - (Σ ρ̃_i / i) / (Σ θ̃_j / j)`.
    pub fn design_rate(&self) -> f64 {
        let c: f64 = self.cn.iter().map(|&(d, p)| p / d as f64).sum();
        let v: f64 = self.vn.iter().map(|&(d, p)| p / d as f64).sum();
        1.0 - c / v
    }

    pub fn from_single(dist: &DegreeDistribution) -> Self {
        JointDegreeDistribution {
            cn: dist.cn_coeffs.iter().map(|(&d, &p)| (d, p)).collect(),
            vn: dist.vn_coeffs.iter().map(|(&d, &p)| (d, p)).collect(),
        }
    }
}

/// Mixes per-code distributions with non-negative weights.
///
/// `ρ̃_i = Σ_k w_k ρ_{i,k} / Σ_k w_k` (and likewise for θ̃); degrees absent from a
/// code contribute zero for it.
pub fn joint_degree_distribution(dists: &[(DegreeDistribution, f64)]) -> Result<JointDegreeDistribution> {
    if dists.is_empty() {
        return Err(Error::InvalidInput("no degree distributions given".into()));
    }
    if dists.iter().any(|(_, w)| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidInput("weights must be finite and non-negative".into()));
    }
    let total: f64 = dists.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::InvalidInput("at least one weight must be positive".into()));
    }
    let mut cn: BTreeMap<usize, f64> = BTreeMap::new();
    let mut vn: BTreeMap<usize, f64> = BTreeMap::new();
    for (d, w) in dists {
        for (&deg, &p) in &d.cn_coeffs {
            *cn.entry(deg).or_insert(0.0) += w * p;
        }
        for (&deg, &p) in &d.vn_coeffs {
            *vn.entry(deg).or_insert(0.0) += w * p;
        }
    }
    Ok(JointDegreeDistribution {
        cn: cn.into_iter().map(|(d, p)| (d, p / total)).collect(),
        vn: vn.into_iter().map(|(d, p)| (d, p / total)).collect(),
    })
}

/// Joint distribution of several codes, each weighted by its total edge count.
pub fn joint_from_codes(codes: &[&TannerCode]) -> Result<JointDegreeDistribution> {
    let dists: Vec<_> = codes
        .iter()
        .map(|c| (edge_degree_distribution(c), c.n_edges() as f64))
        .collect();
    joint_degree_distribution(&dists)
}

/// Parity checks of a binary word (one byte per bit, values 0/1).
pub fn syndrome(code: &TannerCode, bits: &[u8]) -> Result<Vec<u8>> {
    if bits.len() != code.n_vars() {
        return Err(Error::LengthMismatch {
            expected: code.n_vars(),
            got: bits.len(),
        });
    }
    Ok((0..code.n_checks())
        .map(|c| code.check_adj(c).iter().fold(0u8, |acc, &v| acc ^ (bits[v] & 1)))
        .collect())
}

/// True when every parity check is satisfied. Stops at the first failing check.
pub fn is_codeword(code: &TannerCode, bits: &[u8]) -> bool {
    (0..code.n_checks()).all(|c| code.check_adj(c).iter().fold(0u8, |acc, &v| acc ^ bits[v]) == 0)
}

/// The length-1296 IEEE 802.11n codes (lift Z = 54).
pub mod ieee80211n {
    use super::{BaseMatrix, TannerCode};

    pub const R23_BASE: &str = include_str!("../fixtures/ieee80211n_r23_z54.txt");
    pub const R34_BASE: &str = include_str!("../fixtures/ieee80211n_r34_z54.txt");
    pub const R56_BASE: &str = include_str!("../fixtures/ieee80211n_r56_z54.txt");

    /// Code rates available in this module.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum Rate {
        R23,
        R34,
        R56,
    }

    impl Rate {
        pub const ALL: [Rate; 3] = [Rate::R23, Rate::R34, Rate::R56];

        pub fn value(self) -> f64 {
            match self {
                Rate::R23 => 2.0 / 3.0,
                Rate::R34 => 3.0 / 4.0,
                Rate::R56 => 5.0 / 6.0,
            }
        }

        pub fn name(self) -> &'static str {
            match self {
                Rate::R23 => "r23",
                Rate::R34 => "r34",
                Rate::R56 => "r56",
            }
        }

        pub fn from_name(s: &str) -> Option<Rate> {
            Rate::ALL.into_iter().find(|r| r.name() == s)
        }
    }

    pub fn base_matrix(rate: Rate) -> BaseMatrix {
        let text = match rate {
            Rate::R23 => R23_BASE,
            Rate::R34 => R34_BASE,
            Rate::R56 => R56_BASE,
        };
        BaseMatrix::parse(text).expect("bundled base matrix is well-formed")
    }

    pub fn code(rate: Rate) -> TannerCode {
        base_matrix(rate)
            .expand()
            .expect("bundled base matrix expands")
            .with_rate(rate.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY_ALIST: &str = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";

    #[test]
    fn toy_alist_loads() {
        let code = load_alist(TOY_ALIST).unwrap();
        assert_eq!(code.n_vars(), 3);
        assert_eq!(code.n_checks(), 2);
        assert_eq!((0..2).map(|c| code.check_degree(c)).collect::<Vec<_>>(), vec![2, 2]);
        assert_eq!((0..3).map(|v| code.var_degree(v)).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(load_alist(&code.to_alist()).unwrap(), code);
    }

    #[test]
    fn alist_index_zero_is_out_of_range() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n0\n1 2\n2\n1 2\n2 3\n";
        let err = load_alist(bad).unwrap_err().to_string();
        assert!(err.contains("index out of range"), "{err}");
        assert!(err.starts_with("line 5"), "{err}");
        // trailing zeros beyond the declared degree are padding
        let padded = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        assert_eq!(load_alist(padded).unwrap(), load_alist(TOY_ALIST).unwrap());
        let too_big = "3 2\n2 2\n1 2 1\n2 2\n3\n1 2\n2\n1 2\n2 3\n";
        assert!(load_alist(too_big).unwrap_err().to_string().contains("index out of range"));
    }

    #[test]
    fn alist_malformed_header() {
        let err = load_alist("3\n").unwrap_err().to_string();
        assert!(err.contains("line 1") && err.contains("malformed header"), "{err}");
    }

    #[test]
    fn alist_degree_mismatch_reports_line() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n3\n";
        let err = load_alist(bad).unwrap_err().to_string();
        assert!(err.starts_with("line 9") && err.contains("degree mismatch"), "{err}");
    }

    #[test]
    fn expand_identity_and_rotation() {
        let c = expand_base_matrix(&[vec![0]], 3).unwrap();
        for k in 0..3 {
            assert_eq!(c.check_adj(k), &[k]);
        }
        let c = expand_base_matrix(&[vec![1]], 3).unwrap();
        for k in 0..3 {
            assert_eq!(c.check_adj(k), &[(k + 1) % 3]);
        }
        assert!(expand_base_matrix(&[vec![3]], 3).is_err());
    }

    #[test]
    fn ieee_r56_shape() {
        let c = ieee80211n::code(ieee80211n::Rate::R56);
        assert_eq!(c.n_vars(), 1296);
        assert_eq!(c.n_checks(), 216);
        assert_eq!(c.max_var_degree(), 4);
        assert_eq!(c.max_check_degree(), 22);
        let d = edge_degree_distribution(&c);
        assert!((d.cn_coeffs[&21] - 0.7412).abs() < 5e-5);
        assert!((d.cn_coeffs[&22] - 0.2588).abs() < 5e-5);
    }

    #[test]
    fn regular_distribution() {
        // (3,6)-regular: 6 VNs of degree 3, 3 CNs of degree 6.
        let adj: Vec<Vec<usize>> = (0..3).map(|_| (0..6).collect()).collect();
        let c = TannerCode::from_check_adjacency(6, &adj).unwrap();
        let d = edge_degree_distribution(&c);
        assert_eq!(d.cn_coeffs.get(&6), Some(&1.0));
        assert_eq!(d.vn_coeffs.get(&3), Some(&1.0));
    }

    #[test]
    fn symmetric_mixture() {
        let a = DegreeDistribution::new([(4, 1.0)].into(), [(2, 1.0)].into()).unwrap();
        let b = DegreeDistribution::new([(6, 1.0)].into(), [(2, 1.0)].into()).unwrap();
        let j = joint_degree_distribution(&[(a, 1.0), (b, 1.0)]).unwrap();
        assert_eq!(j.cn, vec![(4, 0.5), (6, 0.5)]);
        assert!(joint_degree_distribution(&[]).is_err());
    }

    #[test]
    fn syndrome_unit_vector() {
        let code = load_alist(TOY_ALIST).unwrap();
        assert_eq!(syndrome(&code, &[0, 0, 0]).unwrap(), vec![0, 0]);
        assert_eq!(syndrome(&code, &[0, 1, 0]).unwrap(), vec![1, 1]);
        // rows {v1,v2},{v2,v3}: word 101 → (1, 1); word 110 → (0, 1)
        assert_eq!(syndrome(&code, &[1, 0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(syndrome(&code, &[1, 1, 0]).unwrap(), vec![0, 1]);
        assert!(matches!(syndrome(&code, &[0, 1]), Err(Error::LengthMismatch { .. })));
    }
}
