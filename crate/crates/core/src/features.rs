//! Node features for the GCN (binary word bag, L1-normalized rows) and the
//! character n-gram indicators used by the logistic-regression methods.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeKind};
use crate::sparse::{SparseMatrix, SparseRow};

/// Text normalization applied before tokenization or n-gram extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TokenOptions {
    pub lowercase: bool,
    /// Drop whitespace-delimited tokens that look like URLs.
    pub strip_urls: bool,
}

impl Default for TokenOptions {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_urls: false,
        }
    }
}

fn is_url(token: &str) -> bool {
    let t = token.to_ascii_lowercase();
    t.starts_with("http://") || t.starts_with("https://") || t.starts_with("www.")
}

pub fn normalize_text(text: &str, opts: TokenOptions) -> String {
    let mut s = if opts.lowercase {
        text.to_lowercase()
    } else {
        String::from(text)
    };
    if opts.strip_urls {
        let kept: Vec<&str> = s.split_whitespace().filter(|t| !is_url(t)).collect();
        s = kept.join(" ");
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum VocabKind {
    Word,
    CharNgram,
}

/// Token → column map in first-seen order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    kind: VocabKind,
    n_max: usize,
    tokens: Vec<String>,
    entries: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn new(kind: VocabKind, n_max: usize) -> Self {
        Self {
            kind,
            n_max,
            tokens: Vec::new(),
            entries: BTreeMap::new(),
        }
    }

    /// Rebuilds a vocabulary from an ordered token list (column = position).
    pub fn from_tokens(kind: VocabKind, n_max: usize, tokens: Vec<String>) -> Result<Self> {
        let mut v = Self::new(kind, n_max);
        for t in tokens {
            if v.entries.contains_key(&t) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "duplicate vocabulary token `{t}`"
                )));
            }
            v.insert(&t);
        }
        Ok(v)
    }

    fn insert(&mut self, token: &str) {
        if !self.entries.contains_key(token) {
            self.entries.insert(String::from(token), self.tokens.len());
            self.tokens.push(String::from(token));
        }
    }

    pub fn kind(&self) -> VocabKind {
        self.kind
    }

    /// Longest n-gram length; 0 for word vocabularies.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.entries.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// FNV-1a over the ordered token list, for checkpoint consistency checks.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |b: u8| {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        };
        feed(self.kind as u8);
        feed(self.n_max as u8);
        for t in &self.tokens {
            for b in t.bytes() {
                feed(b);
            }
            feed(0xff);
        }
        h
    }
}

/// Word vocabulary over every document of the corpus.
pub fn build_word_vocab(corpus: &Corpus, opts: TokenOptions) -> Vocabulary {
    let mut v = Vocabulary::new(VocabKind::Word, 0);
    for doc in corpus.documents() {
        let text = normalize_text(&doc.text, opts);
        for tok in text.split_whitespace() {
            v.insert(tok);
        }
    }
    v
}

/// Binary node-by-token presence matrix. Author rows hold the union of their
/// documents' tokens. Tokens outside the vocabulary are skipped.
pub fn build_binary_features(
    graph: &HeteroGraph,
    corpus: &Corpus,
    vocab: &Vocabulary,
    opts: TokenOptions,
) -> Result<SparseMatrix> {
    let doc_index: BTreeMap<&str, usize> = corpus
        .documents()
        .iter()
        .enumerate()
        .map(|(i, d)| (d.doc_id.as_str(), i))
        .collect();
    let by_author = corpus.docs_by_author();
    let doc_tokens = |d: usize, into: &mut BTreeSet<usize>| {
        let text = normalize_text(&corpus.documents()[d].text, opts);
        into.extend(text.split_whitespace().filter_map(|t| vocab.get(t)));
    };

    let mut rows = Vec::with_capacity(graph.n_nodes());
    for n in 0..graph.n_nodes() {
        let (id, kind) = graph.node(n);
        let mut cols = BTreeSet::new();
        match kind {
            NodeKind::Author => {
                let a = corpus
                    .author_index(id)
                    .ok_or_else(|| Error::UnknownAuthor(String::from(id)))?;
                for &d in &by_author[a] {
                    doc_tokens(d, &mut cols);
                }
            }
            NodeKind::Document => {
                let d = *doc_index
                    .get(id)
                    .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown document `{id}`")))?;
                doc_tokens(d, &mut cols);
            }
        }
        let n_cols = cols.len();
        rows.push(SparseRow {
            len: vocab.len(),
            indices: cols.into_iter().collect(),
            values: alloc::vec![1.0; n_cols],
        });
    }
    SparseMatrix::from_rows(vocab.len(), &rows)
}

/// GCN input features: binary presence rows, L1-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub matrix: SparseMatrix,
    pub vocab: Vocabulary,
}

impl FeatureMatrix {
    pub fn n_features(&self) -> usize {
        self.matrix.n_cols()
    }
}

pub fn build_feature_matrix(
    graph: &HeteroGraph,
    corpus: &Corpus,
    vocab: &Vocabulary,
    opts: TokenOptions,
) -> Result<FeatureMatrix> {
    let binary = build_binary_features(graph, corpus, vocab, opts)?;
    Ok(FeatureMatrix {
        matrix: binary.normalize_rows_l1(),
        vocab: vocab.clone(),
    })
}

/// Calls `f` on every contiguous character substring of length `1..=n_max`,
/// ordered by start position then length.
fn for_each_char_ngram(text: &str, n_max: usize, mut f: impl FnMut(&str)) {
    let bounds: Vec<usize> = text
        .char_indices()
        .map(|(i, _)| i)
        .chain(core::iter::once(text.len()))
        .collect();
    let n_chars = bounds.len() - 1;
    for start in 0..n_chars {
        for k in 1..=n_max.min(n_chars - start) {
            f(&text[bounds[start]..bounds[start + k]]);
        }
    }
}

/// Character n-gram vocabulary over training texts only. N-grams span word
/// boundaries and include whitespace.
pub fn build_char_ngram_vocab<S: AsRef<str>>(
    train_texts: &[S],
    n_max: usize,
    opts: TokenOptions,
) -> Result<Vocabulary> {
    if n_max == 0 {
        return Err(Error::InvalidConfig("n_max must be at least 1".into()));
    }
    let mut v = Vocabulary::new(VocabKind::CharNgram, n_max);
    for text in train_texts {
        let text = normalize_text(text.as_ref(), opts);
        for_each_char_ngram(&text, n_max, |g| v.insert(g));
    }
    Ok(v)
}

/// Binary indicator row over an n-gram vocabulary; unseen n-grams are
/// ignored.
pub fn vectorize_char_ngrams(text: &str, vocab: &Vocabulary, opts: TokenOptions) -> SparseRow {
    let text = normalize_text(text, opts);
    let mut cols = BTreeSet::new();
    for_each_char_ngram(&text, vocab.n_max(), |g| {
        if let Some(j) = vocab.get(g) {
            cols.insert(j);
        }
    });
    let nnz = cols.len();
    SparseRow {
        len: vocab.len(),
        indices: cols.into_iter().collect(),
        values: alloc::vec![1.0; nnz],
    }
}

/// Stacks the n-gram rows of `texts` into a design matrix.
pub fn char_ngram_matrix<S: AsRef<str>>(
    texts: &[S],
    vocab: &Vocabulary,
    opts: TokenOptions,
) -> SparseMatrix {
    let rows: Vec<SparseRow> = texts
        .iter()
        .map(|t| vectorize_char_ngrams(t.as_ref(), vocab, opts))
        .collect();
    SparseMatrix::from_rows(vocab.len(), &rows).expect("rows share the vocabulary width")
}
