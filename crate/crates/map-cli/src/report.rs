//! Evaluation reports: one struct, rendered to text, CSV, and JSON.
//!
//! Everything here is a pure function of the evaluation outcome, so a
//! re-run over the same data produces byte-identical files. Wall-clock
//! timings live in a separate sidecar for exactly that reason.

use map_core::classifier::ConfusionMatrix;
use map_core::trajectory::Label;
use serde::Serialize;

/// One evaluated reproduction. `predicted`/`p_success` are absent for
/// leave-one-out folds that were skipped because the training split lost
/// a whole class.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub trajectory_id: String,
    pub actual: String,
    pub predicted: Option<String>,
    pub p_success: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OutcomeCounts {
    pub success: usize,
    pub failure: usize,
}

/// Confusion counts keyed by actual label, then predicted.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConfusionCounts {
    pub success: OutcomeCounts,
    pub failure: OutcomeCounts,
}

impl ConfusionCounts {
    pub fn from_matrix(m: &ConfusionMatrix) -> ConfusionCounts {
        ConfusionCounts {
            success: OutcomeCounts {
                success: m.count(Label::Success, Label::Success),
                failure: m.count(Label::Success, Label::Failure),
            },
            failure: OutcomeCounts {
                success: m.count(Label::Failure, Label::Success),
                failure: m.count(Label::Failure, Label::Failure),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub mode: String,
    pub datasets: Vec<String>,
    pub reps: usize,
    pub evaluated: usize,
    pub skipped: usize,
    /// Correct over evaluated.
    pub accuracy: f64,
    pub confusion: ConfusionCounts,
    pub per_trajectory: Vec<ReportRow>,
}

/// Seconds spent per pipeline stage. Not part of the deterministic
/// report; persisted to its own sidecar and echoed on stderr.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct StageTimings {
    pub load_s: f64,
    pub demo_fit_s: f64,
    pub rep_fit_s: f64,
    pub feature_s: f64,
    pub classify_s: f64,
    pub total_s: f64,
}

impl StageTimings {
    pub fn summary(&self) -> String {
        format!(
            "timing: load {:.3}s, demo fit {:.3}s, rep fits {:.3}s, features {:.3}s, \
             classify {:.3}s, total {:.3}s",
            self.load_s, self.demo_fit_s, self.rep_fit_s, self.feature_s, self.classify_s,
            self.total_s
        )
    }
}

/// Aligned, human-readable rendering.
pub fn render_text(r: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("mode: {}\n", r.mode));
    out.push_str(&format!("datasets: {}\n", r.datasets.join(" ")));
    out.push_str(&format!(
        "reps: {}  evaluated: {}  skipped: {}\n",
        r.reps, r.evaluated, r.skipped
    ));
    out.push_str(&format!("accuracy: {:.4}\n\n", r.accuracy));

    out.push_str("                 predicted\n");
    out.push_str("                 success  failure\n");
    out.push_str(&format!(
        "actual success  {:>8} {:>8}\n",
        r.confusion.success.success, r.confusion.success.failure
    ));
    out.push_str(&format!(
        "actual failure  {:>8} {:>8}\n\n",
        r.confusion.failure.success, r.confusion.failure.failure
    ));

    let id_width = r
        .per_trajectory
        .iter()
        .map(|row| row.trajectory_id.len())
        .chain(std::iter::once("trajectory_id".len()))
        .max()
        .unwrap_or(0);
    out.push_str(&format!(
        "{:<id_width$}  {:<8}  {:<9}  {}\n",
        "trajectory_id", "actual", "predicted", "p_success"
    ));
    for row in &r.per_trajectory {
        let predicted = row.predicted.as_deref().unwrap_or("skipped");
        let p = match row.p_success {
            Some(p) => format!("{p:.6}"),
            None => String::from("-"),
        };
        out.push_str(&format!(
            "{:<id_width$}  {:<8}  {:<9}  {}\n",
            row.trajectory_id, row.actual, predicted, p
        ));
    }
    out
}

/// Per-trajectory rows as CSV; skipped folds leave their fields empty.
/// Probabilities are rounded to six decimals here; full precision lives
/// in the JSON report.
pub fn render_csv(r: &EvalReport) -> String {
    let mut out = String::from("trajectory_id,actual,predicted,p_success\n");
    for row in &r.per_trajectory {
        let predicted = row.predicted.as_deref().unwrap_or("");
        let p = match row.p_success {
            Some(p) => format!("{p:.6}"),
            None => String::new(),
        };
        out.push_str(&format!("{},{},{},{}\n", row.trajectory_id, row.actual, predicted, p));
    }
    out
}

pub fn render_confusion_csv(r: &EvalReport) -> String {
    format!(
        "actual,predicted_success,predicted_failure\nsuccess,{},{}\nfailure,{},{}\n",
        r.confusion.success.success,
        r.confusion.success.failure,
        r.confusion.failure.success,
        r.confusion.failure.failure
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EvalReport {
        EvalReport {
            mode: String::from("loocv"),
            datasets: vec![String::from("ds")],
            reps: 2,
            evaluated: 2,
            skipped: 0,
            accuracy: 0.5,
            confusion: ConfusionCounts {
                success: OutcomeCounts { success: 1, failure: 0 },
                failure: OutcomeCounts { success: 1, failure: 0 },
            },
            per_trajectory: vec![
                ReportRow {
                    trajectory_id: String::from("rep_00"),
                    actual: String::from("success"),
                    predicted: Some(String::from("success")),
                    p_success: Some(0.75),
                },
                ReportRow {
                    trajectory_id: String::from("rep_01"),
                    actual: String::from("failure"),
                    predicted: None,
                    p_success: None,
                },
            ],
        }
    }

    #[test]
    fn csv_leaves_skipped_fields_empty() {
        let csv = render_csv(&sample());
        assert!(csv.contains("rep_00,success,success,0.750000\n"));
        assert!(csv.contains("rep_01,failure,,\n"));
    }

    #[test]
    fn text_marks_skipped_folds() {
        let text = render_text(&sample());
        assert!(text.contains("skipped"));
        assert!(text.contains("accuracy: 0.5000"));
    }

    #[test]
    fn confusion_csv_is_row_per_actual() {
        let csv = render_confusion_csv(&sample());
        assert_eq!(
            csv,
            "actual,predicted_success,predicted_failure\nsuccess,1,0\nfailure,1,0\n"
        );
    }
}
