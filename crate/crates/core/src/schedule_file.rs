//! Text serialization of [`LutSchedule`].
//!
//! ```text
//! mimqms-schedule v1
//! q_m = 4
//! q_v = 8
//! i_max = 30
//! design_sigma = 0.6195
//! gamma_ch = 6.06 4.42 … -6.06
//!
//! [phi_v]
//! 1-14 = 11 8 6 4 3 2 1 0 0 -1 -2 -3 -4 -6 -8 -11
//! 15 = …
//! [phi_ch]
//! [gamma_v]
//! [gamma_e]
//! 1-30 = 1
//! [groups]            (optional)
//! phi_v = 1-14 15-16 17-30
//! ```
//!
//! Iteration ranges are 1-based and inclusive; every section must cover
//! `1..=i_max` exactly once. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use crate::channel::ChannelQuantizer;
use crate::codes::JointDegreeDistribution;
use crate::error::{parse_err, Result};
use crate::mimde::{LutGroups, LutIterSet, LutSchedule, ReconstructionFn, ScheduleFlags};

pub const HEADER: &str = "mimqms-schedule v1";

const SECTIONS: [&str; 4] = ["phi_v", "phi_ch", "gamma_v", "gamma_e"];

pub fn load(path: impl AsRef<Path>) -> Result<LutSchedule> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn save(schedule: &LutSchedule, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write(schedule))?;
    Ok(())
}

fn parse_range(tok: &str, line: usize) -> Result<Range<usize>> {
    let bad = || parse_err(line, format!("bad iteration range '{tok}'"));
    let (a, b) = match tok.split_once('-') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (tok.trim(), tok.trim()),
    };
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok(a - 1..b)
}

fn parse_ints(text: &str, line: usize) -> Result<Vec<i32>> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(line, format!("'{t}' is not an integer"))))
        .collect()
}

fn parse_floats(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(line, format!("'{t}' is not a number"))))
        .collect()
}

fn parse_degree_pairs(text: &str, line: usize) -> Result<Vec<(usize, f64)>> {
    text.split_whitespace()
        .map(|t| {
            let (d, p) = t.split_once(':').ok_or_else(|| parse_err(line, format!("expected degree:coeff, got '{t}'")))?;
            let d = d.parse().map_err(|_| parse_err(line, format!("bad degree '{d}'")))?;
            let p = p.parse().map_err(|_| parse_err(line, format!("bad coefficient '{p}'")))?;
            Ok((d, p))
        })
        .collect()
}

struct Rows {
    header_line: usize,
    rows: Vec<(Range<usize>, Vec<i32>, usize)>,
}

fn expand_rows(name: &str, r: &Rows, i_max: usize, width: usize) -> Result<Vec<Vec<i32>>> {
    let mut out: Vec<Option<Vec<i32>>> = vec![None; i_max];
    for (range, vals, line) in &r.rows {
        if vals.len() != width {
            return Err(parse_err(*line, format!("[{name}] row has {} values, expected {width}", vals.len())));
        }
        if range.end > i_max {
            return Err(parse_err(*line, format!("iteration {} beyond i_max = {i_max}", range.end)));
        }
        for t in range.clone() {
            if out[t].is_some() {
                return Err(parse_err(*line, format!("iteration {} listed twice in [{name}]", t + 1)));
            }
            out[t] = Some(vals.clone());
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(t, v)| v.ok_or_else(|| parse_err(r.header_line, format!("[{name}] misses iteration {}", t + 1))))
        .collect()
}

pub fn parse(text: &str) -> Result<LutSchedule> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()));
    match lines.by_ref().find(|(_, l)| !l.is_empty()) {
        Some((_, l)) if l == HEADER => {}
        Some((n, l)) => return Err(parse_err(n, format!("expected '{HEADER}', found '{l}'"))),
        None => return Err(parse_err(1, "empty schedule file")),
    }

    let mut keys: BTreeMap<String, (String, usize)> = BTreeMap::new();
    let mut sections: BTreeMap<String, Rows> = BTreeMap::new();
    let mut groups_lines: Vec<(String, String, usize)> = Vec::new();
    let mut current: Option<String> = None;
    for (n, l) in lines {
        if l.is_empty() {
            continue;
        }
        if let Some(name) = l.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) && name != "groups" {
                return Err(parse_err(n, format!("unknown section [{name}]")));
            }
            if name != "groups" && sections.contains_key(&name) {
                return Err(parse_err(n, format!("duplicate section [{name}]")));
            }
            if name != "groups" {
                sections.insert(name.clone(), Rows { header_line: n, rows: Vec::new() });
            }
            current = Some(name);
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| parse_err(n, format!("expected 'key = value', found '{l}'")))?;
        let (k, v) = (k.trim(), v.trim());
        match current.as_deref() {
            None => {
                if keys.insert(k.to_string(), (v.to_string(), n)).is_some() {
                    return Err(parse_err(n, format!("duplicate key '{k}'")));
                }
            }
            Some("groups") => groups_lines.push((k.to_string(), v.to_string(), n)),
            Some(sec) => {
                let range = parse_range(k, n)?;
                let vals = parse_ints(v, n)?;
                sections.get_mut(sec).expect("section registered").rows.push((range, vals, n));
            }
        }
    }

    let get = |k: &str| keys.get(k).ok_or_else(|| parse_err(1, format!("missing key '{k}'")));
    let int_key = |k: &str| -> Result<usize> {
        let (v, n) = get(k)?;
        v.parse().map_err(|_| parse_err(*n, format!("'{k}' must be a non-negative integer")))
    };
    let q_m = int_key("q_m")? as u32;
    let q_v = int_key("q_v")? as u32;
    let i_max = int_key("i_max")?;
    if q_m == 0 || q_m > 8 || q_v <= q_m || q_v > 16 || i_max == 0 {
        let (_, n) = get("q_m")?;
        return Err(parse_err(*n, format!("unsupported q_m = {q_m}, q_v = {q_v}, i_max = {i_max}")));
    }
    let (sig, sig_line) = get("design_sigma")?;
    let design_sigma: f64 = sig.parse().map_err(|_| parse_err(*sig_line, "design_sigma must be a number"))?;
    let (gch, gch_line) = get("gamma_ch")?;
    let thresholds = parse_floats(gch, *gch_line)?;
    let levels = 1usize << q_m;
    if thresholds.len() != levels - 1 {
        return Err(parse_err(*gch_line, format!("gamma_ch has {} values, expected {}", thresholds.len(), levels - 1)));
    }
    let channel = ChannelQuantizer::from_thresholds(thresholds, design_sigma)
        .map_err(|e| parse_err(*gch_line, e.to_string()))?;

    let mut flags = ScheduleFlags::default();
    if let Some((v, n)) = keys.get("saturated_from") {
        flags.saturated_from = Some(v.parse().map_err(|_| parse_err(*n, "saturated_from must be an integer"))?);
    }
    if let Some((v, n)) = keys.get("no_merge") {
        flags.no_merge = v.parse().map_err(|_| parse_err(*n, "no_merge must be true or false"))?;
    }
    let ensemble = match (keys.get("ensemble_cn"), keys.get("ensemble_vn")) {
        (Some((c, cn)), Some((v, vn))) => Some(JointDegreeDistribution {
            cn: parse_degree_pairs(c, *cn)?,
            vn: parse_degree_pairs(v, *vn)?,
        }),
        (None, None) => None,
        (Some((_, n)), None) | (None, Some((_, n))) => {
            return Err(parse_err(*n, "ensemble_cn and ensemble_vn must appear together"))
        }
    };
    let mi_trace = match keys.get("design_mi") {
        Some((v, n)) => parse_floats(v, *n)?,
        None => Vec::new(),
    };
    for k in keys.keys() {
        let known = [
            "q_m", "q_v", "i_max", "design_sigma", "gamma_ch", "saturated_from", "no_merge", "ensemble_cn",
            "ensemble_vn", "design_mi",
        ];
        if !known.contains(&k.as_str()) {
            return Err(parse_err(keys[k].1, format!("unknown key '{k}'")));
        }
    }

    let section = |name: &str, width: usize| -> Result<Vec<Vec<i32>>> {
        let r = sections.get(name).ok_or_else(|| parse_err(1, format!("missing section [{name}]")))?;
        expand_rows(name, r, i_max, width)
    };
    let phi_v = section("phi_v", levels)?;
    let phi_ch = section("phi_ch", levels)?;
    let gamma_v = section("gamma_v", levels - 1)?;
    let gamma_e = section("gamma_e", 1)?;

    let recon = |name: &str, row: Vec<i32>, t: usize| -> Result<ReconstructionFn> {
        let line = sections[name].rows.iter().find(|(r, _, _)| r.contains(&t)).map_or(1, |x| x.2);
        ReconstructionFn::new(row).map_err(|e| parse_err(line, format!("[{name}] iteration {}: {e}", t + 1)))
    };
    let mut iters = Vec::with_capacity(i_max);
    for t in 0..i_max {
        let gv = gamma_v[t].clone();
        if gv.windows(2).any(|w| w[0] <= w[1]) {
            let line = sections["gamma_v"].rows.iter().find(|(r, _, _)| r.contains(&t)).map_or(1, |x| x.2);
            return Err(parse_err(line, format!("[gamma_v] iteration {} is not strictly decreasing", t + 1)));
        }
        iters.push(LutIterSet {
            phi_v: recon("phi_v", phi_v[t].clone(), t)?,
            phi_ch: recon("phi_ch", phi_ch[t].clone(), t)?,
            gamma_v: gv,
            gamma_e: gamma_e[t][0],
        });
    }

    let groups = if groups_lines.is_empty() {
        None
    } else {
        let mut g = LutGroups::default();
        for (k, v, n) in groups_lines {
            let ranges: Vec<Range<usize>> = v.split_whitespace().map(|t| parse_range(t, n)).collect::<Result<_>>()?;
            let covers = ranges.first().is_some_and(|r| r.start == 0)
                && ranges.windows(2).all(|w| w[0].end == w[1].start)
                && ranges.last().is_some_and(|r| r.end == i_max);
            if !covers {
                return Err(parse_err(n, format!("groups for '{k}' must tile 1-{i_max} in order")));
            }
            let slot = match k.as_str() {
                "phi_v" => &mut g.phi_v,
                "phi_ch" => &mut g.phi_ch,
                "gamma_v" => &mut g.gamma_v,
                "gamma_e" => &mut g.gamma_e,
                _ => return Err(parse_err(n, format!("unknown LUT kind '{k}'"))),
            };
            *slot = ranges;
        }
        Some(g)
    };

    let schedule = LutSchedule {
        q_m,
        q_v,
        i_max,
        design_sigma,
        channel,
        iters,
        ensemble,
        groups,
        flags,
        mi_trace,
    };
    schedule.validate()?;
    Ok(schedule)
}

/// Prints a threshold with two decimals when that is exact, else in shortest
/// round-trip form.
fn fmt_threshold(x: f64) -> String {
    let two = format!("{x:.2}");
    if two.parse::<f64>().ok() == Some(x) {
        two
    } else {
        format!("{x}")
    }
}

fn fmt_range(r: &Range<usize>) -> String {
    if r.end - r.start == 1 {
        format!("{}", r.start + 1)
    } else {
        format!("{}-{}", r.start + 1, r.end)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn write_rows(out: &mut String, name: &str, rows: &[Vec<i32>]) {
    let _ = writeln!(out, "\n[{name}]");
    let mut start = 0;
    for t in 1..=rows.len() {
        if t == rows.len() || rows[t] != rows[start] {
            let _ = writeln!(out, "{} = {}", fmt_range(&(start..t)), join(&rows[start]));
            start = t;
        }
    }
}

pub fn write(s: &LutSchedule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "q_m = {}", s.q_m);
    let _ = writeln!(out, "q_v = {}", s.q_v);
    let _ = writeln!(out, "i_max = {}", s.i_max);
    let _ = writeln!(out, "design_sigma = {}", s.design_sigma);
    let g: Vec<String> = s.channel.thresholds.iter().map(|&t| fmt_threshold(t)).collect();
    let _ = writeln!(out, "gamma_ch = {}", g.join(" "));
    if let Some(t) = s.flags.saturated_from {
        let _ = writeln!(out, "saturated_from = {t}");
    }
    if s.flags.no_merge {
        let _ = writeln!(out, "no_merge = true");
    }
    if let Some(e) = &s.ensemble {
        let pairs = |v: &[(usize, f64)]| v.iter().map(|(d, p)| format!("{d}:{p}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "ensemble_cn = {}", pairs(&e.cn));
        let _ = writeln!(out, "ensemble_vn = {}", pairs(&e.vn));
    }
    if !s.mi_trace.is_empty() {
        let _ = writeln!(out, "design_mi = {}", join(&s.mi_trace));
    }
    let rows = |f: &dyn Fn(&LutIterSet) -> Vec<i32>| s.iters.iter().map(f).collect::<Vec<_>>();
    write_rows(&mut out, "phi_v", &rows(&|it| it.phi_v.table.clone()));
    write_rows(&mut out, "phi_ch", &rows(&|it| it.phi_ch.table.clone()));
    write_rows(&mut out, "gamma_v", &rows(&|it| it.gamma_v.clone()));
    write_rows(&mut out, "gamma_e", &rows(&|it| vec![it.gamma_e]));
    if let Some(g) = &s.groups {
        let _ = writeln!(out, "\n[groups]");
        for (name, ranges) in [("phi_v", &g.phi_v), ("phi_ch", &g.phi_ch), ("gamma_v", &g.gamma_v), ("gamma_e", &g.gamma_e)] {
            if !ranges.is_empty() {
                let _ = writeln!(out, "{name} = {}", ranges.iter().map(fmt_range).collect::<Vec<_>>().join(" "));
            }
        }
    }
    out
}

/// Bundled schedules transcribed from published tables.
pub mod fixtures {
    use super::parse;
    use crate::mimde::LutSchedule;

    pub const BUNDLED_R23: &str = include_str!("../fixtures/qms_r23.lut");
    pub const BUNDLED_R34: &str = include_str!("../fixtures/qms_r34.lut");
    pub const BUNDLED_R56: &str = include_str!("../fixtures/qms_r56.lut");
    pub const BUNDLED_RC: &str = include_str!("../fixtures/qms_rc.lut");

    /// Rate-specific 2/3 decoder.
    pub fn rate_2_3() -> LutSchedule {
        parse(BUNDLED_R23).expect("bundled fixture parses")
    }

    /// Rate-specific 3/4 decoder.
    pub fn rate_3_4() -> LutSchedule {
        parse(BUNDLED_R34).expect("bundled fixture parses")
    }

    /// Rate-specific 5/6 decoder.
    pub fn rate_5_6() -> LutSchedule {
        parse(BUNDLED_R56).expect("bundled fixture parses")
    }

    /// Rate-compatible decoder shared by all three rates.
    pub fn rate_compatible() -> LutSchedule {
        parse(BUNDLED_RC).expect("bundled fixture parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn fixtures_load() {
        for s in [fixtures::rate_2_3(), fixtures::rate_3_4(), fixtures::rate_5_6(), fixtures::rate_compatible()] {
            assert_eq!(s.i_max, 30);
            assert_eq!(s.q_m, 4);
            assert_eq!(s.q_v, 8);
        }
        let d = fixtures::rate_compatible();
        assert_eq!(d.iters[0].phi_v.table[0], 11);
        assert_eq!(d.iters[29].gamma_e, 1);
        assert_eq!(d.channel.thresholds[0], 6.06);
    }

    #[test]
    fn round_trip() {
        let d = fixtures::rate_compatible();
        let again = parse(&write(&d)).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = fixtures::BUNDLED_RC.replacen("1-14 = 11 8", "1-14 = 11 x", 1);
        match parse(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 10),
            other => panic!("{other:?}"),
        }
        let text = fixtures::BUNDLED_RC.replacen("1-30 = 1", "1-29 = 1", 1);
        assert!(matches!(parse(&text), Err(Error::Parse { .. })));
        assert!(parse("not a schedule").is_err());
    }
}
