//! Machine-readable experiment outputs.

use commgraph_core::eval::{ExperimentReport, MetricsRow, RunResult};
use commgraph_core::{Class, Corpus};

use crate::io::{format_predictions, PredictionRow};

pub fn report_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

const RUN_COLUMNS: [&str; 2] = ["run", "method"];

fn metric_columns() -> Vec<String> {
    let mut cols = Vec::new();
    for block in ["racism", "sexism", "clean", "macro"] {
        for m in ["precision", "recall", "f1"] {
            cols.push(format!("{block}_{m}"));
        }
    }
    cols
}

fn metric_values(m: &MetricsRow) -> Vec<String> {
    m.per_class
        .iter()
        .chain(std::iter::once(&m.macro_avg))
        .flat_map(|p| [p.precision, p.recall, p.f1])
        .map(|v| v.to_string())
        .collect()
}

/// One row per (run, method) with per-class and macro P/R/F1.
pub fn runs_csv(report: &ExperimentReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = RUN_COLUMNS.iter().map(|s| s.to_string()).chain(metric_columns()).collect();
    w.write_record(&header).expect("in-memory write");
    for (i, run) in report.runs.iter().enumerate() {
        for m in &report.methods {
            let mut rec = vec![run.run.to_string(), m.method.as_str().to_string()];
            rec.extend(metric_values(&m.per_run[i]));
            w.write_record(&rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

/// Test-set predictions of every method in every run.
pub fn predictions_csv(corpus: &Corpus, runs: &[RunResult]) -> String {
    let mut rows = Vec::new();
    for r in runs {
        for m in &r.methods {
            for (k, &d) in r.test_docs.iter().enumerate() {
                let doc = &corpus.documents()[d];
                rows.push((
                    vec![r.run.to_string(), m.method.as_str().to_string()],
                    PredictionRow {
                        doc_id: &doc.doc_id,
                        gold: doc.label,
                        predicted: m.predictions[k],
                        probs: m.probs.row(k),
                    },
                ));
            }
        }
    }
    format_predictions(&RUN_COLUMNS, rows)
}

pub fn class_summary(counts: [usize; 3]) -> String {
    Class::ALL
        .iter()
        .map(|c| format!("{} {}", c.as_str(), counts[c.index()]))
        .collect::<Vec<_>>()
        .join(", ")
}
