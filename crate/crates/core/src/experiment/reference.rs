//! Published coverage tables and the comparison report against them.

use std::fmt;

use serde::Serialize;

use super::config::{Strategy, DEFAULT_FIELD_SIDE, DEFAULT_SENSING_RADIUS};
use super::sweep::{Summary, SweepResult};

/// One published column: node count and coverage percentage, as printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceTable {
    pub name: &'static str,
    /// Strategy whose sweep rows are compared against this column.
    pub strategy: Strategy,
    pub entries: &'static [(usize, &'static str)],
    /// Exact absolute values cannot be expected, only the curve shape.
    pub shape_only: bool,
}

impl ReferenceTable {
    /// `(n, coverage fraction)` pairs.
    pub fn values(&self) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .map(|&(n, pct)| (n, pct.parse::<f64>().expect("table literal") / 100.0))
            .collect()
    }

    pub fn value_at(&self, n: usize) -> Option<f64> {
        self.values().into_iter().find(|&(m, _)| m == n).map(|(_, v)| v)
    }

    pub fn node_counts(&self) -> Vec<usize> {
        self.entries.iter().map(|&(n, _)| n).collect()
    }

    pub fn by_name(name: &str) -> Option<ReferenceTable> {
        [GA_TABLE, GAUSSIAN_TABLE].into_iter().find(|t| t.name == name)
    }
}

/// GA coverage against node count.
pub const GA_TABLE: ReferenceTable = ReferenceTable {
    name: "table2",
    strategy: Strategy::Ga,
    entries: &[
        (50, "30.9371"),
        (100, "43.7516"),
        (150, "50.5200"),
        (200, "59.5384"),
        (250, "66.4327"),
        (300, "72.9193"),
        (400, "84.6200"),
        (500, "93.95"),
        (550, "98.9833"),
        (586, "99.99"),
    ],
    shape_only: false,
};

/// Two-dimensional Gaussian deployment against node count.
pub const GAUSSIAN_TABLE: ReferenceTable = ReferenceTable {
    name: "table3-gaussian",
    strategy: Strategy::Gaussian,
    entries: &[
        (100, "35"),
        (200, "51"),
        (300, "63"),
        (400, "74"),
        (500, "82"),
        (600, "88"),
        (700, "92"),
        (800, "95"),
        (900, "97"),
        (1000, "99.99"),
    ],
    shape_only: true,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub seeds: usize,
    pub reference: f64,
    /// `mean - reference`, as a fraction.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    /// `None` when the sweep lacks the rows the check needs.
    pub passed: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub table: &'static str,
    pub strategy: Strategy,
    pub shape_only: bool,
    pub banner: String,
    pub rows: Vec<ComparisonRow>,
    /// Table node counts without any sweep rows.
    pub missing: Vec<usize>,
    pub verdicts: Vec<Verdict>,
}

impl ComparisonReport {
    pub fn is_partial(&self) -> bool {
        !self.missing.is_empty()
    }

    /// False if any verdict that could be evaluated failed.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed != Some(false))
    }
}

pub fn banner() -> String {
    format!(
        "The published tables do not state field size, sensing radius or Gaussian spread. \
         Numbers below assume the derived default configuration ({DEFAULT_FIELD_SIDE}x{DEFAULT_FIELD_SIDE} field, r_s = {DEFAULT_SENSING_RADIUS}) \
         unless the sweep config says otherwise; treat absolute deltas as indicative."
    )
}

fn verdict(check: &str, passed: Option<bool>, detail: String) -> Verdict {
    Verdict {
        check: check.to_string(),
        passed,
        detail,
    }
}

/// Pairwise monotonicity of the mean curve, with `slack` allowed for noise.
fn monotone(points: &[(usize, Summary)], slack: f64) -> Option<bool> {
    (points.len() >= 2).then(|| points.windows(2).all(|w| w[1].1.mean >= w[0].1.mean - slack))
}

pub fn compare_to_reference(result: &SweepResult, table: &ReferenceTable) -> ComparisonReport {
    let summary = result.summary(table.strategy);
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for (n, reference) in table.values() {
        match summary.get(&n) {
            Some(s) => rows.push(ComparisonRow {
                n,
                mean: s.mean,
                std: s.std,
                seeds: s.count,
                reference,
                delta: s.mean - reference,
            }),
            None => missing.push(n),
        }
    }
    if !missing.is_empty() {
        log::warn!(
            "partial report: no {} rows for n = {:?}",
            table.strategy,
            missing
        );
    }

    let covered: Vec<(usize, Summary)> = table
        .node_counts()
        .into_iter()
        .filter_map(|n| summary.get(&n).map(|s| (n, *s)))
        .collect();
    let mean_at = |n: usize| summary.get(&n).map(|s| s.mean);
    let mut verdicts = vec![verdict(
        "mean coverage increases with n (0.02 slack)",
        monotone(&covered, 0.02),
        format!("{} node counts present", covered.len()),
    )];

    if table.strategy == Strategy::Ga {
        let m50 = mean_at(50);
        verdicts.push(verdict(
            "n = 50 mean within [0.26, 0.36]",
            m50.map(|m| (0.26..=0.36).contains(&m)),
            fmt_opt(m50),
        ));
        let m586 = mean_at(586);
        verdicts.push(verdict("n = 586 mean >= 0.99", m586.map(|m| m >= 0.99), fmt_opt(m586)));
    } else {
        let ga = result.summary(Strategy::Ga);
        let shared: Vec<usize> = (1..=5)
            .map(|k| k * 100)
            .filter(|n| ga.contains_key(n) && summary.contains_key(n))
            .collect();
        let ordered = (!shared.is_empty()).then(|| shared.iter().all(|n| ga[n].mean >= summary[n].mean));
        verdicts.push(verdict(
            "GA mean >= Gaussian mean for n in 100..=500",
            ordered,
            format!("shared node counts {shared:?}"),
        ));
        let m1000 = mean_at(1000);
        verdicts.push(verdict("n = 1000 mean >= 0.99", m1000.map(|m| m >= 0.99), fmt_opt(m1000)));
    }

    ComparisonReport {
        table: table.name,
        strategy: table.strategy,
        shape_only: table.shape_only,
        banner: banner(),
        rows,
        missing,
        verdicts,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "no rows".to_string(), |m| format!("mean {m:.4}"))
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {} vs {}{}", self.strategy, self.table, if self.shape_only { " (shape-only)" } else { "" })?;
        writeln!(f, "NOTE: {}", self.banner)?;
        if self.shape_only {
            writeln!(f, "NOTE: shape-only comparison; the published column used an unknown spread, so deltas are not expected to vanish.")?;
        }
        if self.is_partial() {
            writeln!(f, "WARNING: partial report, missing n = {:?}", self.missing)?;
        }
        writeln!(f)?;
        writeln!(f, "{:>6}  {:>8}  {:>7}  {:>5}  {:>8}  {:>8}", "n", "mean%", "std%", "seeds", "paper%", "delta%")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6}  {:>8.3}  {:>7.3}  {:>5}  {:>8.4}  {:>+8.3}",
                r.n,
                100.0 * r.mean,
                100.0 * r.std,
                r.seeds,
                100.0 * r.reference,
                100.0 * r.delta
            )?;
        }
        writeln!(f)?;
        for v in &self.verdicts {
            let tag = match v.passed {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "N/A ",
            };
            writeln!(f, "[{tag}] {} ({})", v.check, v.detail)?;
        }
        Ok(())
    }
}
