//! Check reports, per-point tables and the pass/fail rule.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Which way the inequality points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `LHS ≤ C·RHS`; the empirical constant is the largest ratio.
    #[serde(rename = "leq")]
    LeqC,
    /// `LHS ≥ C·RHS`; the empirical constant is the smallest ratio.
    #[serde(rename = "geq")]
    GeqC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Rows whose decisive side is below this multiple of `‖f‖` carry no
/// information (rounding level) and are left out of the constant.
pub const DEGENERATE_REL: f64 = 1e-11;

/// Default bound on the per-series spread of ratios.
pub const DEFAULT_SPREAD_BOUND: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Which function / order / norm the row belongs to.
    pub series: String,
    /// Dyadic index (`n`, `j`, `ℓ`) or sample number.
    pub index: i64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, absent when `rhs = 0`.
    pub ratio: Option<f64>,
    pub degenerate: bool,
}

impl Row {
    /// A row whose degeneracy is judged against `scale` (usually `‖f‖_B`).
    pub fn new(series: impl Into<String>, index: i64, lhs: f64, rhs: f64, scale: f64, direction: Direction) -> Self {
        let floor = DEGENERATE_REL * scale;
        let decisive = match direction {
            Direction::GeqC => rhs,
            Direction::LeqC => lhs,
        };
        let ratio = if rhs > 0.0 && lhs.is_finite() && rhs.is_finite() { Some(lhs / rhs) } else { None };
        Row { series: series.into(), index, lhs, rhs, ratio, degenerate: !(decisive > floor) }
    }

    fn live_ratio(&self) -> Option<f64> {
        if self.degenerate {
            None
        } else {
            self.ratio
        }
    }
}

/// Result of one registry check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    /// Parameters as used, defaults filled in.
    pub params: Value,
    pub direction: Direction,
    pub rows: Vec<Row>,
    /// Extremal ratio over nondegenerate rows.
    pub constant: Option<f64>,
    /// Worst per-series spread (`max/median` for `≤`, `median/min` for `≥`).
    pub spread: Option<f64>,
    pub spread_bound: Option<f64>,
    pub verdict: Verdict,
    pub runtime_ms: u64,
    pub seed: u64,
    pub resolutions: Value,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Table as CSV with header `index,lhs,rhs,ratio`; an undefined ratio is
    /// an empty field. Floats use the shortest round-trip representation.
    pub fn csv(&self) -> String {
        let mut out = String::from("index,lhs,rhs,ratio\n");
        for r in &self.rows {
            let ratio = r.ratio.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", r.index, r.lhs, r.rhs, ratio);
        }
        out
    }

    /// Ratios of nondegenerate rows.
    pub fn live_ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(Row::live_ratio).collect()
    }
}

/// Acceptance rule of a check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Judge {
    pub direction: Direction,
    pub spread_bound: Option<f64>,
    /// Every live ratio must be at least this.
    pub ratio_min: Option<f64>,
    /// Every live ratio must be at most this.
    pub ratio_max: Option<f64>,
}

impl Judge {
    pub fn new(direction: Direction, spread_bound: Option<f64>) -> Self {
        Judge { direction, spread_bound, ratio_min: None, ratio_max: None }
    }

    pub fn at_least(mut self, v: f64) -> Self {
        self.ratio_min = Some(v);
        self
    }

    pub fn at_most(mut self, v: f64) -> Self {
        self.ratio_max = Some(v);
        self
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn series_spread(ratios: &mut [f64], direction: Direction) -> f64 {
    ratios.sort_by(f64::total_cmp);
    let med = median(ratios);
    match direction {
        Direction::LeqC => ratios[ratios.len() - 1] / med,
        Direction::GeqC => med / ratios[0],
    }
}

pub(crate) struct Verdicts {
    pub constant: Option<f64>,
    pub spread: Option<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Applies `judge` to a table.
pub(crate) fn judge_rows(rows: &[Row], judge: Judge) -> Verdicts {
    let mut notes = Vec::new();
    let live: Vec<&Row> = rows.iter().filter(|r| r.live_ratio().is_some()).collect();
    let skipped = rows.len() - live.len();
    if skipped > 0 {
        notes.push(format!("{skipped} degenerate row(s) excluded from the constant"));
    }
    if live.is_empty() {
        notes.push("no nondegenerate rows".into());
        return Verdicts { constant: None, spread: None, verdict: Verdict::Fail, notes };
    }
    let ratios: Vec<f64> = live.iter().filter_map(|r| r.live_ratio()).collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let constant = match judge.direction {
        Direction::LeqC => hi,
        Direction::GeqC => lo,
    };

    // Spread per series, in order of first appearance.
    let mut names: Vec<&str> = Vec::new();
    for r in &live {
        if !names.contains(&r.series.as_str()) {
            names.push(&r.series);
        }
    }
    let mut spread = 0.0f64;
    for name in names {
        let mut v: Vec<f64> = live.iter().filter(|r| r.series == name).filter_map(|r| r.live_ratio()).collect();
        let sp = series_spread(&mut v, judge.direction);
        spread = if sp.is_nan() { f64::INFINITY } else { spread.max(sp) };
    }

    let mut ok = constant.is_finite();
    if judge.direction == Direction::GeqC && !(constant > 0.0) {
        ok = false;
        notes.push("constant is not positive".into());
    }
    if let Some(m) = judge.ratio_min {
        if lo < m {
            ok = false;
            notes.push(format!("smallest ratio {lo} is below the required {m}"));
        }
    }
    if let Some(m) = judge.ratio_max {
        if hi > m {
            ok = false;
            notes.push(format!("largest ratio {hi} exceeds the allowed {m}"));
        }
    }
    if let Some(bound) = judge.spread_bound {
        if !(spread <= bound) {
            ok = false;
            notes.push(format!("spread {spread} exceeds the bound {bound}"));
        }
    }
    Verdicts {
        constant: Some(constant),
        spread: Some(spread),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(series: &str, i: i64, lhs: f64, rhs: f64) -> Row {
        Row::new(series, i, lhs, rhs, 1.0, Direction::GeqC)
    }

    #[test]
    fn geq_constant_and_spread() {
        let rows = vec![row("a", 1, 2.0, 1.0), row("a", 2, 1.0, 1.0), row("a", 3, 3.0, 1.0)];
        let v = judge_rows(&rows, Judge::new(Direction::GeqC, Some(10.0)));
        assert_eq!(v.constant, Some(1.0));
        assert_eq!(v.spread, Some(2.0));
        assert_eq!(v.verdict, Verdict::Pass);
        let v = judge_rows(&rows, Judge::new(Direction::GeqC, Some(1.5)));
        assert_eq!(v.verdict, Verdict::Fail);
    }

    #[test]
    fn degenerate_rows_are_skipped() {
        let rows = vec![row("a", 1, 2.0, 1.0), row("a", 2, 5.0, 1e-15)];
        let v = judge_rows(&rows, Judge::new(Direction::GeqC, None));
        assert_eq!(v.constant, Some(2.0));
        let all_bad = vec![row("a", 1, 1.0, 0.0)];
        assert_eq!(judge_rows(&all_bad, Judge::new(Direction::GeqC, None)).verdict, Verdict::Fail);
    }

    #[test]
    fn ratio_window() {
        let rows = vec![Row::new("x", 0, 1.5, 1.0, 1.0, Direction::LeqC)];
        let j = Judge::new(Direction::LeqC, None).at_least(1.0).at_most(2.0);
        assert_eq!(judge_rows(&rows, j).verdict, Verdict::Pass);
        assert_eq!(judge_rows(&rows, j.at_most(1.2)).verdict, Verdict::Fail);
    }

    #[test]
    fn csv_layout() {
        let rep = CheckReport {
            id: "x".into(),
            params: Value::Null,
            direction: Direction::LeqC,
            rows: vec![Row::new("s", 3, 0.5, 0.0, 1.0, Direction::LeqC), Row::new("s", 4, 0.25, 0.5, 1.0, Direction::LeqC)],
            constant: Some(0.5),
            spread: Some(1.0),
            spread_bound: None,
            verdict: Verdict::Pass,
            runtime_ms: 0,
            seed: 0,
            resolutions: Value::Null,
            notes: vec![],
        };
        assert_eq!(rep.csv(), "index,lhs,rhs,ratio\n3,0.5,0,\n4,0.25,0.5,0.5\n");
    }
}
