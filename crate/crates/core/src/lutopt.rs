//! Discrepancy-driven merging of per-iteration LUTs into contiguous groups that
//! share one table, subject to a target MI at the last iteration.

use std::ops::Range;

use crate::codes::JointDegreeDistribution;
use crate::error::{Error, Result};
use crate::mimde::{redesign, schedule_mi_trace, DesignConfig, LutGroups, LutSchedule, ReconstructionFn, Rederive};

/// Default MI target.
pub const DEFAULT_Q_STAR: f64 = 0.9999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LutKind {
    PhiV,
    PhiCh,
    GammaV,
    GammaE,
}

impl LutKind {
    pub const ALL: [LutKind; 4] = [LutKind::PhiV, LutKind::PhiCh, LutKind::GammaV, LutKind::GammaE];

    pub fn name(self) -> &'static str {
        match self {
            LutKind::PhiV => "phi_v",
            LutKind::PhiCh => "phi_ch",
            LutKind::GammaV => "gamma_v",
            LutKind::GammaE => "gamma_e",
        }
    }

    /// Entries per table for `2^{q_m}`-ary messages.
    pub fn entries(self, q_m: u32) -> usize {
        match self {
            LutKind::PhiV | LutKind::PhiCh => 1 << q_m,
            LutKind::GammaV => (1 << q_m) - 1,
            LutKind::GammaE => 1,
        }
    }
}

/// The per-iteration rows of one LUT kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LutTrace {
    pub kind: LutKind,
    pub rows: Vec<Vec<i32>>,
}

impl LutTrace {
    pub fn new(kind: LutKind, rows: Vec<Vec<i32>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidInput("empty LUT trace".into()));
        };
        if let Some(bad) = rows.iter().find(|r| r.len() != first.len()) {
            return Err(Error::LengthMismatch { expected: first.len(), got: bad.len() });
        }
        Ok(LutTrace { kind, rows })
    }

    pub fn from_schedule(schedule: &LutSchedule, kind: LutKind) -> Self {
        let rows = schedule
            .iters
            .iter()
            .map(|it| match kind {
                LutKind::PhiV => it.phi_v.table.clone(),
                LutKind::PhiCh => it.phi_ch.table.clone(),
                LutKind::GammaV => it.gamma_v.clone(),
                LutKind::GammaE => vec![it.gamma_e],
            })
            .collect();
        LutTrace { kind, rows }
    }
}

/// Contiguous iteration groups (0-based, half-open) and each group's merged row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPartition {
    pub groups: Vec<Range<usize>>,
    pub merged: Vec<Vec<i32>>,
}

impl GroupPartition {
    /// Number of groups M.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// One row per iteration, taken from the iteration's group.
    pub fn expand(&self) -> Vec<Vec<i32>> {
        self.groups
            .iter()
            .zip(&self.merged)
            .flat_map(|(g, row)| std::iter::repeat_n(row.clone(), g.len()))
            .collect()
    }
}

/// Euclidean distance between two LUTs.
pub fn discrepancy(y: &[i32], y2: &[i32]) -> Result<f64> {
    if y.len() != y2.len() {
        return Err(Error::LengthMismatch { expected: y.len(), got: y2.len() });
    }
    let s: i64 = y.iter().zip(y2).map(|(&a, &b)| (i64::from(a) - i64::from(b)).pow(2)).sum();
    Ok((s as f64).sqrt())
}

/// Nearest integer to `num / den` (den > 0), halves rounded away from zero.
fn div_round_half_away(num: i64, den: i64) -> i64 {
    let q = (2 * num.abs() + den) / (2 * den);
    if num < 0 {
        -q
    } else {
        q
    }
}

/// Component-wise mean of the rows, rounded half away from zero.
pub fn merge_group(rows: &[Vec<i32>]) -> Result<Vec<i32>> {
    let Some(first) = rows.first() else {
        return Err(Error::InvalidInput("cannot merge an empty group".into()));
    };
    if let Some(bad) = rows.iter().find(|r| r.len() != first.len()) {
        return Err(Error::LengthMismatch { expected: first.len(), got: bad.len() });
    }
    let n = rows.len() as i64;
    Ok((0..first.len())
        .map(|k| {
            let s: i64 = rows.iter().map(|r| i64::from(r[k])).sum();
            div_round_half_away(s, n) as i32
        })
        .collect())
}

/// Greedy left-to-right grouping: iteration t + 1 joins the current group when
/// `d(y^(t), y^(t+1)) ≤ delta`, otherwise it opens a new one.
pub fn partition_by_threshold(trace: &LutTrace, delta: f64) -> GroupPartition {
    let n = trace.rows.len();
    let mut groups = Vec::new();
    let mut start = 0;
    for t in 1..=n {
        let split = t == n
            || discrepancy(&trace.rows[t - 1], &trace.rows[t]).expect("trace rows share a length") > delta;
        if split {
            groups.push(start..t);
            start = t;
        }
    }
    let merged = groups
        .iter()
        .map(|g| merge_group(&trace.rows[g.clone()]).expect("non-empty group"))
        .collect();
    GroupPartition { groups, merged }
}

/// Replaces one kind's rows in a schedule.
fn with_rows(schedule: &LutSchedule, kind: LutKind, rows: &[Vec<i32>]) -> Result<LutSchedule> {
    let mut s = schedule.clone();
    for (it, row) in s.iters.iter_mut().zip(rows) {
        match kind {
            LutKind::PhiV => it.phi_v = ReconstructionFn::new(row.clone())?,
            LutKind::PhiCh => it.phi_ch = ReconstructionFn::new(row.clone())?,
            LutKind::GammaV => it.gamma_v = row.clone(),
            LutKind::GammaE => it.gamma_e = row[0],
        }
    }
    Ok(s)
}

/// Q of a candidate: the design density evolution rerun with the candidate rows,
/// re-deriving the threshold sets not yet settled when `kind` is searched.
fn evaluate(
    candidate: &LutSchedule,
    kind: LutKind,
    ensemble: &JointDegreeDistribution,
    sigma: f64,
) -> Result<(LutSchedule, f64)> {
    let which = Rederive {
        phi_ch: kind == LutKind::PhiV,
        gamma_v: matches!(kind, LutKind::PhiV | LutKind::PhiCh),
        gamma_e: kind != LutKind::GammaE,
    };
    let (s, trace) = redesign(candidate, ensemble, sigma, which, &DesignConfig::default().alpha_grid())?;
    Ok((s, *trace.last().expect("i_max ≥ 1")))
}

fn set_groups(groups: &mut LutGroups, kind: LutKind, g: Vec<Range<usize>>) {
    match kind {
        LutKind::PhiV => groups.phi_v = g,
        LutKind::PhiCh => groups.phi_ch = g,
        LutKind::GammaV => groups.gamma_v = g,
        LutKind::GammaE => groups.gamma_e = g,
    }
}

/// Search result for one LUT kind.
#[derive(Clone, Debug)]
pub struct KindOutcome {
    pub kind: LutKind,
    pub partition: GroupPartition,
    /// Accepted threshold Δd* (0 when nothing was accepted).
    pub delta_star: f64,
    /// Candidates for which Q was evaluated.
    pub evaluated: usize,
    /// Candidates that met the MI target.
    pub accepted: usize,
}

#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub schedule: LutSchedule,
    pub kinds: Vec<KindOutcome>,
    /// Q of the input schedule.
    pub q_initial: f64,
    /// Q of the returned schedule.
    pub q_final: f64,
}

impl OptimizeOutcome {
    pub fn kind(&self, kind: LutKind) -> &KindOutcome {
        self.kinds.iter().find(|k| k.kind == kind).expect("every kind is searched")
    }
}

/// Merges iteration LUTs kind by kind (φ_v, φ_ch, Γ_v, Γ_e).
///
/// For each kind, every adjacent-row discrepancy is a candidate threshold; a
/// candidate not above the best accepted one is skipped, otherwise the trace is
/// grouped and merged and Q, the MI at the last iteration, is computed by
/// rerunning density evolution with the kinds already settled. Threshold sets
/// not yet settled are re-derived during that run. The largest threshold with
/// Q ≥ `q_star` wins. Identical consecutive rows always share a group.
pub fn optimize(
    schedule: &LutSchedule,
    ensemble: &JointDegreeDistribution,
    sigma: f64,
    q_star: f64,
) -> Result<OptimizeOutcome> {
    if !(q_star > 0.0 && q_star < 1.0) {
        return Err(Error::InvalidInput(format!("q_star must lie in (0, 1), got {q_star}")));
    }
    schedule.validate()?;
    let q_initial = *schedule_mi_trace(schedule, ensemble, sigma)?.last().expect("i_max ≥ 1");

    let mut current = schedule.clone();
    let mut groups = LutGroups::default();
    let mut kinds = Vec::with_capacity(4);
    let mut q_current = q_initial;
    for kind in LutKind::ALL {
        let trace = LutTrace::from_schedule(&current, kind);
        let mut best = partition_by_threshold(&trace, 0.0);
        let mut best_schedule = current.clone();
        let mut best_q = q_current;
        let mut delta_star = 0.0;
        let (mut evaluated, mut accepted) = (0, 0);
        for k in 0..trace.rows.len().saturating_sub(1) {
            let dk = discrepancy(&trace.rows[k], &trace.rows[k + 1])?;
            if dk <= delta_star {
                continue;
            }
            let cand = partition_by_threshold(&trace, dk);
            let (cand_schedule, q) = evaluate(&with_rows(&current, kind, &cand.expand())?, kind, ensemble, sigma)?;
            evaluated += 1;
            if q >= q_star && dk >= delta_star {
                accepted += 1;
                delta_star = dk;
                best = cand;
                best_schedule = cand_schedule;
                best_q = q;
            }
        }
        set_groups(&mut groups, kind, best.groups.clone());
        current = best_schedule;
        q_current = best_q;
        kinds.push(KindOutcome { kind, partition: best, delta_star, evaluated, accepted });
    }

    let any_accepted = kinds.iter().any(|k| k.accepted > 0);
    let any_evaluated = kinds.iter().any(|k| k.evaluated > 0);
    current.groups = Some(groups);
    current.flags.no_merge = !any_accepted && (any_evaluated || q_current < q_star);
    if current.flags.no_merge {
        // nothing met the target: hand back the input rows, grouped losslessly
        let mut original = schedule.clone();
        original.groups = current.groups.take();
        original.flags.no_merge = true;
        current = original;
        q_current = q_initial;
    }
    Ok(OptimizeOutcome { schedule: current, kinds, q_initial, q_final: q_current })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrepancy_examples() {
        assert_eq!(discrepancy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0.0);
        assert_eq!(discrepancy(&[0, 3], &[4, 0]).unwrap(), 5.0);
        assert!(discrepancy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge_group(&[vec![2, 4], vec![3, 5]]).unwrap(), vec![3, 5]);
        assert_eq!(merge_group(&[vec![1, -1], vec![2, -2]]).unwrap(), vec![2, -2]);
        assert_eq!(merge_group(&[vec![7, -3], vec![7, -3]]).unwrap(), vec![7, -3]);
        assert_eq!(merge_group(&[vec![1], vec![1], vec![2]]).unwrap(), vec![1]);
        assert!(merge_group(&[]).is_err());
    }

    #[test]
    fn partition_examples() {
        let t = LutTrace::new(LutKind::GammaE, vec![vec![0], vec![1], vec![5], vec![6]]).unwrap();
        let p = partition_by_threshold(&t, 1.0);
        assert_eq!(p.groups, vec![0..2, 2..4]);
        assert_eq!(partition_by_threshold(&t, 0.0).len(), 4);
        assert_eq!(partition_by_threshold(&t, f64::INFINITY).groups, vec![0..4]);
    }
}
