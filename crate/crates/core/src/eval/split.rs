use alloc::vec::Vec;
use rand::seq::SliceRandom;

use crate::corpus::Class;
use crate::error::{Error, Result};
use crate::math;
use crate::rng::{stream, Stream};
use crate::NUM_CLASSES;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub val_fraction_of_train: f64,
    pub n_runs: usize,
    pub base_seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.1,
            val_fraction_of_train: 0.1,
            n_runs: 10,
            base_seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("test_fraction", self.test_fraction),
            ("val_fraction_of_train", self.val_fraction_of_train),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConfig(alloc::format!("split.{name} must lie in (0, 1)")));
            }
        }
        if self.n_runs == 0 {
            return Err(Error::InvalidConfig("split.n_runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Indices into the label slice handed to [`stratified_split`], each set
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per-class shares of `total` proportional to `counts`, rounded by largest
/// remainder. Remainder ties go to the lower class index.
pub fn largest_remainder(counts: &[usize], fraction: f64) -> Vec<usize> {
    let n: usize = counts.iter().sum();
    let target = math::round(n as f64 * fraction) as usize;
    let quotas: Vec<f64> = counts.iter().map(|&c| c as f64 * fraction).collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|&q| math::floor(q) as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - math::floor(quotas[a]);
        let rb = quotas[b] - math::floor(quotas[b]);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut given: usize = alloc.iter().sum();
    for &k in order.iter().cycle().take(2 * counts.len()) {
        if given >= target {
            break;
        }
        if alloc[k] < counts[k] {
            alloc[k] += 1;
            given += 1;
        }
    }
    alloc
}

pub fn stratified_split(labels: &[Class], spec: &SplitSpec, run_index: usize) -> Result<Split> {
    spec.validate()?;
    let mut members: [Vec<usize>; NUM_CLASSES] = Default::default();
    for (i, c) in labels.iter().enumerate() {
        members[c.index()].push(i);
    }
    // Tolerance keeps 1/0.1 from rounding up to 11.
    let min_size = math::ceil(1.0 / spec.test_fraction - 1e-9) as usize;
    for (k, m) in members.iter().enumerate() {
        if m.len() < min_size {
            return Err(Error::ClassTooSmall {
                class: k,
                count: m.len(),
            });
        }
    }
    let counts: Vec<usize> = members.iter().map(Vec::len).collect();
    let n_test = largest_remainder(&counts, spec.test_fraction);
    let mut rng = stream(spec.base_seed, run_index as u64, Stream::Split);
    let mut rest: [Vec<usize>; NUM_CLASSES] = Default::default();
    let mut test = Vec::new();
    for k in 0..NUM_CLASSES {
        let mut m = members[k].clone();
        m.shuffle(&mut rng);
        test.extend_from_slice(&m[..n_test[k]]);
        rest[k] = m[n_test[k]..].to_vec();
    }
    let rest_counts: Vec<usize> = rest.iter().map(Vec::len).collect();
    let n_val = largest_remainder(&rest_counts, spec.val_fraction_of_train);
    let mut train = Vec::new();
    let mut val = Vec::new();
    for k in 0..NUM_CLASSES {
        val.extend_from_slice(&rest[k][..n_val[k]]);
        train.extend_from_slice(&rest[k][n_val[k]..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, val, test })
}
