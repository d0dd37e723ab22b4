use crate::corpus::Class;
use crate::error::{Error, Result};
use crate::NUM_CLASSES;

/// Precision, recall and F1 for one class or a macro average.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Self {
            precision,
            recall,
            f1: harmonic(precision, recall),
        }
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Per-class scores in [`Class::ALL`] order plus the unweighted macro mean.
/// Macro F1 is the mean of per-class F1 values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsRow {
    pub per_class: [Prf; NUM_CLASSES],
    #[cfg_attr(feature = "serde", serde(rename = "macro"))]
    pub macro_avg: Prf,
}

impl MetricsRow {
    pub fn class(&self, c: Class) -> Prf {
        self.per_class[c.index()]
    }

    /// The nine values shown in a table row: racism, sexism, overall, each as
    /// (P, R, F1).
    pub fn table_values(&self) -> [f64; 9] {
        let r = self.class(Class::Racism);
        let s = self.class(Class::Sexism);
        let m = self.macro_avg;
        [r.precision, r.recall, r.f1, s.precision, s.recall, s.f1, m.precision, m.recall, m.f1]
    }

    /// Element-wise mean of several rows.
    pub fn mean(rows: &[MetricsRow]) -> MetricsRow {
        let mut out = MetricsRow::default();
        if rows.is_empty() {
            return out;
        }
        let n = rows.len() as f64;
        let add = |acc: &mut Prf, x: Prf| {
            acc.precision += x.precision / n;
            acc.recall += x.recall / n;
            acc.f1 += x.f1 / n;
        };
        for r in rows {
            for k in 0..NUM_CLASSES {
                add(&mut out.per_class[k], r.per_class[k]);
            }
            add(&mut out.macro_avg, r.macro_avg);
        }
        out
    }
}

/// Confusion counts `[gold][predicted]`.
pub fn confusion(gold: &[Class], predicted: &[Class]) -> Result<[[usize; NUM_CLASSES]; NUM_CLASSES]> {
    if gold.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            context: "metrics predictions",
            expected: gold.len(),
            found: predicted.len(),
        });
    }
    let mut m = [[0usize; NUM_CLASSES]; NUM_CLASSES];
    for (g, p) in gold.iter().zip(predicted) {
        m[g.index()][p.index()] += 1;
    }
    Ok(m)
}

pub fn compute_metrics(gold: &[Class], predicted: &[Class]) -> Result<MetricsRow> {
    let m = confusion(gold, predicted)?;
    let mut row = MetricsRow::default();
    for k in 0..NUM_CLASSES {
        let tp = m[k][k];
        let fp: usize = (0..NUM_CLASSES).filter(|&g| g != k).map(|g| m[g][k]).sum();
        let fn_: usize = (0..NUM_CLASSES).filter(|&p| p != k).map(|p| m[k][p]).sum();
        row.per_class[k] = Prf::from_counts(tp, fp, fn_);
    }
    let n = NUM_CLASSES as f64;
    row.macro_avg = Prf {
        precision: row.per_class.iter().map(|p| p.precision).sum::<f64>() / n,
        recall: row.per_class.iter().map(|p| p.recall).sum::<f64>() / n,
        f1: row.per_class.iter().map(|p| p.f1).sum::<f64>() / n,
    };
    Ok(row)
}
