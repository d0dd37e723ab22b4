//! The five compared methods and the shared dispatch over per-run artifacts.

use alloc::format;
use alloc::vec::Vec;

use crate::corpus::{Class, Corpus};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::gcn::predict_gcn;
use crate::logreg::{predict_logreg, train_logreg, LogRegConfig};
use crate::profiles::AuthorProfiles;
use crate::sparse::{SparseMatrix, SparseRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MethodKind {
    Lr,
    LrAuth,
    LrExtd,
    Gcn,
    LrGcn,
}

impl MethodKind {
    /// Table order.
    pub const ALL: [MethodKind; 5] = [
        MethodKind::Lr,
        MethodKind::LrAuth,
        MethodKind::LrExtd,
        MethodKind::Gcn,
        MethodKind::LrGcn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::Lr => "lr",
            MethodKind::LrAuth => "lr_auth",
            MethodKind::LrExtd => "lr_extd",
            MethodKind::Gcn => "gcn",
            MethodKind::LrGcn => "lr_gcn",
        }
    }

    /// Display name used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            MethodKind::Lr => "LR",
            MethodKind::LrAuth => "LR + AUTH",
            MethodKind::LrExtd => "LR + EXTD",
            MethodKind::Gcn => "GCN",
            MethodKind::LrGcn => "LR + GCN",
        }
    }

    pub fn profile_source(self) -> Option<ProfileSource> {
        match self {
            MethodKind::Lr | MethodKind::Gcn => None,
            MethodKind::LrAuth => Some(ProfileSource::Node2vecCommunity),
            MethodKind::LrExtd => Some(ProfileSource::Node2vecExtended),
            MethodKind::LrGcn => Some(ProfileSource::GcnEmbedding),
        }
    }
}

impl core::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

/// Where an author profile comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProfileSource {
    Node2vecCommunity,
    Node2vecExtended,
    GcnEmbedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub profile_source: Option<ProfileSource>,
}

impl MethodSpec {
    pub fn validate(&self) -> Result<()> {
        if self.profile_source.is_some() != self.kind.profile_source().is_some() {
            return Err(Error::InvalidConfig(format!(
                "method {} {} a profile source",
                self.kind,
                if self.profile_source.is_some() { "does not take" } else { "requires" }
            )));
        }
        Ok(())
    }
}

impl From<MethodKind> for MethodSpec {
    fn from(kind: MethodKind) -> Self {
        Self {
            kind,
            profile_source: kind.profile_source(),
        }
    }
}

/// Appends `profile` after the n-gram block. Zero profile entries stay
/// implicit.
pub fn concat_features(ngram_row: &SparseRow, profile: &[f64], profile_dim: usize) -> Result<SparseRow> {
    if profile.len() != profile_dim {
        return Err(Error::DimensionMismatch {
            context: "author profile",
            expected: profile_dim,
            found: profile.len(),
        });
    }
    let offset = ngram_row.len;
    let mut indices = ngram_row.indices.clone();
    let mut values = ngram_row.values.clone();
    for (j, &v) in profile.iter().enumerate() {
        if v != 0.0 {
            indices.push(offset + j);
            values.push(v);
        }
    }
    Ok(SparseRow {
        len: offset + profile_dim,
        indices,
        values,
    })
}

/// Document index sets into the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocSplit {
    /// Rows used to fit the GCN.
    pub train: Vec<usize>,
    /// GCN early-stopping rows; the LR methods also fit on them.
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl DocSplit {
    /// Train and validation rows together, in ascending order.
    pub fn fit_rows(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.train.iter().chain(&self.val).copied().collect();
        v.sort_unstable();
        v
    }
}

/// Inputs shared by all methods within one run. Absent artifacts are only an
/// error for methods that need them.
#[derive(Debug, Clone, Default)]
pub struct RunArtifacts {
    /// N-gram design matrix over every corpus document.
    pub ngrams: Option<SparseMatrix>,
    pub community_profiles: Option<AuthorProfiles>,
    pub extended_profiles: Option<AuthorProfiles>,
    pub gcn_profiles: Option<AuthorProfiles>,
    /// Evaluation-mode GCN class probabilities, one row per extended-graph
    /// node.
    pub gcn_probs: Option<DenseMatrix>,
    /// Extended-graph node of each corpus document.
    pub doc_nodes: Option<Vec<usize>>,
}

impl RunArtifacts {
    pub fn profiles(&self, source: ProfileSource) -> Result<&AuthorProfiles> {
        let (p, name) = match source {
            ProfileSource::Node2vecCommunity => (&self.community_profiles, "community node2vec profiles"),
            ProfileSource::Node2vecExtended => (&self.extended_profiles, "extended node2vec profiles"),
            ProfileSource::GcnEmbedding => (&self.gcn_profiles, "GCN author embeddings"),
        };
        p.as_ref().ok_or(Error::MissingArtifact(name))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutput {
    /// Test-set predictions in `split.test` order.
    pub predictions: Vec<Class>,
    /// `test × NUM_CLASSES` probabilities.
    pub probs: DenseMatrix,
}

/// Design matrix for `docs`, optionally widened by author profiles.
pub fn design_matrix(
    corpus: &Corpus,
    ngrams: &SparseMatrix,
    profiles: Option<&AuthorProfiles>,
    docs: &[usize],
) -> Result<SparseMatrix> {
    let Some(profiles) = profiles else {
        return Ok(ngrams.select_rows(docs));
    };
    let dim = profiles.dim();
    let rows = docs
        .iter()
        .map(|&d| {
            let author = &corpus.authors()[corpus.doc_author(d)];
            concat_features(&ngrams.row(d), profiles.get(author)?, dim)
        })
        .collect::<Result<Vec<_>>>()?;
    SparseMatrix::from_rows(ngrams.n_cols() + dim, &rows)
}

pub fn run_method(
    spec: &MethodSpec,
    corpus: &Corpus,
    split: &DocSplit,
    artifacts: &RunArtifacts,
    logreg: &LogRegConfig,
) -> Result<MethodOutput> {
    spec.validate()?;
    if spec.kind == MethodKind::Gcn {
        let probs = artifacts.gcn_probs.as_ref().ok_or(Error::MissingArtifact("GCN probabilities"))?;
        let doc_nodes = artifacts.doc_nodes.as_ref().ok_or(Error::MissingArtifact("document node map"))?;
        let nodes: Vec<usize> = split.test.iter().map(|&d| doc_nodes[d]).collect();
        let predictions = predict_gcn(probs, &nodes)
            .into_iter()
            .map(|c| Class::from_index(c).expect("three classes"))
            .collect();
        return Ok(MethodOutput {
            predictions,
            probs: probs.select_rows(&nodes),
        });
    }
    let ngrams = artifacts.ngrams.as_ref().ok_or(Error::MissingArtifact("n-gram features"))?;
    let profiles = spec.profile_source.map(|s| artifacts.profiles(s)).transpose()?;
    let fit_rows = split.fit_rows();
    let y: Vec<Class> = fit_rows
        .iter()
        .map(|&d| corpus.documents()[d].label.ok_or(Error::InvalidMask(format!("document {d} has no label"))))
        .collect::<Result<_>>()?;
    let x_fit = design_matrix(corpus, ngrams, profiles, &fit_rows)?;
    let model = train_logreg(&x_fit, &y, logreg)?;
    let x_test = design_matrix(corpus, ngrams, profiles, &split.test)?;
    let pred = predict_logreg(&model, &x_test)?;
    Ok(MethodOutput {
        predictions: pred.labels,
        probs: pred.probs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_profile_keeps_ngram_support() {
        let row = SparseRow::from_entries(3, vec![(0, 1.0), (2, 1.0)]).unwrap();
        let out = concat_features(&row, &[0.0; 200], 200).unwrap();
        assert_eq!(out.len, 203);
        assert_eq!(out.indices, row.indices);
    }

    #[test]
    fn profile_occupies_trailing_block() {
        let row = SparseRow::from_entries(3, vec![(1, 1.0)]).unwrap();
        let profile: Vec<f64> = (0..200).map(|i| if i % 3 == 0 { 0.0 } else { i as f64 * 0.01 - 1.0 }).collect();
        let out = concat_features(&row, &profile, 200).unwrap();
        let dense = out.to_dense();
        assert_eq!(&dense[..3], &row.to_dense()[..]);
        assert_eq!(&dense[3..], &profile[..]);
        assert!(concat_features(&row, &profile[..199], 200).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for k in MethodKind::ALL {
            assert_eq!(k.as_str().parse::<MethodKind>().unwrap(), k);
            MethodSpec::from(k).validate().unwrap();
        }
        let bad = MethodSpec {
            kind: MethodKind::Lr,
            profile_source: Some(ProfileSource::GcnEmbedding),
        };
        assert!(bad.validate().is_err());
        let bad = MethodSpec {
            kind: MethodKind::LrGcn,
            profile_source: None,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn missing_artifacts_named() {
        let corpus = Corpus::new(vec![]).unwrap();
        let split = DocSplit { train: vec![], val: vec![], test: vec![] };
        let r = run_method(&MethodKind::Gcn.into(), &corpus, &split, &RunArtifacts::default(), &LogRegConfig::default());
        assert!(matches!(r, Err(Error::MissingArtifact(_))));
        let r = run_method(&MethodKind::LrAuth.into(), &corpus, &split, &RunArtifacts {
            ngrams: Some(SparseMatrix::zeros(0, 1)),
            ..RunArtifacts::default()
        }, &LogRegConfig::default());
        assert!(matches!(r, Err(Error::MissingArtifact("community node2vec profiles"))));
    }
}
