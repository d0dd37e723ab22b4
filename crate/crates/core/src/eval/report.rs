use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::experiment::ExperimentReport;
use super::stats::TestOutcome;

pub const CLASS_BLOCKS: [&str; 3] = ["Racism", "Sexism", "Overall"];
pub const METRIC_COLUMNS: [&str; 3] = ["P", "R", "F1"];

const NAME_WIDTH: usize = 10;
const CELL: usize = 7;

/// Aligned table with one row per method and `P R F1` under each of
/// Racism, Sexism and Overall. Values are fractions, printed as percentages
/// with two decimals.
pub fn render_table<'a>(rows: impl IntoIterator<Item = (&'a str, [f64; 9])>) -> String {
    let block = 3 * CELL;
    let mut out = String::new();
    let _ = write!(out, "{:<NAME_WIDTH$}", "Method");
    for b in CLASS_BLOCKS {
        let _ = write!(out, " |{b:^block$}");
    }
    let trimmed = out.trim_end().len();
    out.truncate(trimmed);
    out.push('\n');
    let _ = write!(out, "{:<NAME_WIDTH$}", "");
    for _ in CLASS_BLOCKS {
        out.push_str(" |");
        for m in METRIC_COLUMNS {
            let _ = write!(out, "{m:>CELL$}");
        }
    }
    out.push('\n');
    let _ = write!(out, "{}", "-".repeat(NAME_WIDTH));
    for _ in CLASS_BLOCKS {
        let _ = write!(out, "-+{}", "-".repeat(block));
    }
    out.push('\n');
    for (name, values) in rows {
        let _ = write!(out, "{name:<NAME_WIDTH$}");
        for chunk in values.chunks(3) {
            out.push_str(" |");
            for v in chunk {
                let _ = write!(out, "{:>CELL$.2}", v * 100.0);
            }
        }
        out.push('\n');
    }
    out
}

/// Table of mean metrics followed by the significance block.
pub fn render_text_report(report: &ExperimentReport) -> String {
    let mut out = format!("Mean over {} run(s)\n\n", report.n_runs);
    out.push_str(&render_table(
        report.methods.iter().map(|m| (m.label.as_str(), m.mean.table_values())),
    ));
    out.push_str("\nPaired two-tailed t-tests on macro F1\n");
    if report.significance.status != "ok" {
        let _ = writeln!(out, "  {}", report.significance.status);
        return out;
    }
    let label = |k: crate::methods::MethodKind| k.label();
    for t in &report.significance.tests {
        let r = &t.result;
        let _ = write!(out, "  {} vs {}: ", label(t.a), label(t.b));
        match r.outcome {
            TestOutcome::Tested => {
                let _ = writeln!(
                    out,
                    "mean diff {:+.4}, t = {:.4}, df = {}, p = {:.4}{}",
                    r.mean_difference,
                    r.t_statistic,
                    r.df,
                    r.p_value,
                    if r.p_value < 0.05 { " *" } else { "" }
                );
            }
            TestOutcome::ExactTie => {
                let _ = writeln!(out, "identical per-run scores, p = 1");
            }
            TestOutcome::ZeroVariance => {
                let _ = writeln!(out, "constant difference {:+.4}, t undefined", r.mean_difference);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_layout() {
        let t = render_table([("LR", [0.5, 0.25, 1.0 / 3.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0])]);
        let lines: alloc::vec::Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "LR         |  50.00  25.00  33.33 |   0.00   0.00   0.00 | 100.00 100.00 100.00");
        assert!(lines[1..].iter().all(|l| l.len() == lines[1].len()));
        assert_eq!(lines[0], lines[0].trim_end());
    }
}
