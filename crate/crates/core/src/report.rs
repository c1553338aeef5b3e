//! CSV and text renderings of run results.

use std::fmt::Write as _;

use crate::loss::LossKind;
use crate::train::{RunResult, RunStatus};

pub const CURVE_HEADER: &str = "epoch,train_loss,test_overall_variance";
pub const SWEEP_HEADER: &str = "n_t,seed,epochs_to_threshold";
pub const TABLE_HEADER: [&str; 8] = [
    "loss",
    "hyperparameters",
    "overall_variance",
    "epochs_run",
    "epochs_to_threshold",
    "decimal_accuracy",
    "correct_count",
    "status",
];

/// Per-epoch curve as CSV (LF line endings, shortest round-trip reals).
pub fn curve_csv(result: &RunResult) -> String {
    let mut out = String::with_capacity(32 * (result.curve.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for r in &result.curve {
        let _ = writeln!(out, "{},{},{}", r.epoch, r.train_loss, r.test_overall_variance);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_t: u32,
    pub seed: u64,
    pub epochs_to_threshold: Option<usize>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let ept = r.epochs_to_threshold.map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", r.n_t, r.seed, ept);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub loss: LossKind,
    pub hyperparameters: String,
    pub overall_variance: f64,
    pub epochs_run: usize,
    pub epochs_to_threshold: Option<usize>,
    pub decimal_accuracy: u32,
    /// `(correct, out of)` for arithmetic experiments.
    pub correct_count: Option<(usize, usize)>,
    pub status: RunStatus,
}

impl ComparisonRow {
    pub fn from_result(result: &RunResult, with_correct_count: bool) -> Self {
        let m = &result.final_metrics;
        Self {
            loss: result.config.loss.kind,
            hyperparameters: result.config.loss.hyperparameters(),
            overall_variance: m.overall_variance,
            epochs_run: result.epochs_run,
            epochs_to_threshold: result.epochs_to_threshold,
            decimal_accuracy: m.decimal_accuracy,
            correct_count: with_correct_count.then_some((m.correct_count, m.correct_total)),
            status: result.status,
        }
    }

    fn cells(&self, csv: bool) -> [String; 8] {
        let status = match self.status {
            RunStatus::Completed => "completed",
            RunStatus::ReachedThreshold => "reached-threshold",
            RunStatus::Diverged => "diverged",
        };
        let correct = match self.correct_count {
            Some((c, _)) if csv => c.to_string(),
            Some((c, total)) => format!("{c}/{total}"),
            None => String::new(),
        };
        [
            self.loss.name().to_string(),
            self.hyperparameters.clone(),
            self.overall_variance.to_string(),
            self.epochs_run.to_string(),
            self.epochs_to_threshold.map(|e| e.to_string()).unwrap_or_default(),
            self.decimal_accuracy.to_string(),
            correct,
            status.to_string(),
        ]
    }
}

/// Rows in fixed loss order: huber, log-cosh, mse, mae, sr-narme, dr-narme.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn new(mut rows: Vec<ComparisonRow>) -> Self {
        let rank = |k: LossKind| LossKind::TABLE_ORDER.iter().position(|&o| o == k).unwrap();
        // Stable: rows of the same kind keep their request order.
        rows.sort_by_key(|r| rank(r.loss));
        Self { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = TABLE_HEADER.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.cells(true).join(","));
            out.push('\n');
        }
        out
    }

    /// Column-aligned plain-text table.
    pub fn to_text(&self) -> String {
        let mut grid: Vec<[String; 8]> = vec![TABLE_HEADER.map(String::from)];
        grid.extend(self.rows.iter().map(|r| r.cells(false)));
        let mut widths = [0usize; 8];
        for row in &grid {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for (i, row) in grid.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        out
    }
}
