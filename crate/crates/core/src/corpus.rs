//! Documents, authors and follower edges.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Gold label of a document. The discriminant is the class index used by
/// every model and metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Class {
    Racism = 0,
    Sexism = 1,
    Clean = 2,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::Racism, Class::Sexism, Class::Clean];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Class> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Class::Racism => "racism",
            Class::Sexism => "sexism",
            Class::Clean => "clean",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel(pub String);

impl fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown label `{}`", self.0)
    }
}

impl FromStr for Class {
    type Err = UnknownLabel;

    /// Accepts the canonical names plus the annotation-style adjectives
    /// (`racist`, `sexist`, `neither`).
    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "racism" | "racist" => Ok(Class::Racism),
            "sexism" | "sexist" => Ok(Class::Sexism),
            "clean" | "neither" | "none" => Ok(Class::Clean),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DocumentRecord {
    pub doc_id: String,
    pub author_id: String,
    pub text: String,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub label: Option<Class>,
}

impl DocumentRecord {
    pub fn new(
        doc_id: impl Into<String>,
        author_id: impl Into<String>,
        text: impl Into<String>,
        label: Option<Class>,
    ) -> Self {
        Self {
            doc_id: doc_id.into(),
            author_id: author_id.into(),
            text: text.into(),
            label,
        }
    }
}

/// An ordered document collection plus the author set it induces.
///
/// Authors are ordered by first appearance in the documents, followed by any
/// document-less authors registered explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<DocumentRecord>,
    authors: Vec<String>,
    author_index: BTreeMap<String, usize>,
    doc_author: Vec<usize>,
}

impl Corpus {
    pub fn new(documents: Vec<DocumentRecord>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut corpus = Corpus::default();
        for doc in &documents {
            if doc.author_id.is_empty() {
                return Err(Error::EmptyAuthor(doc.doc_id.clone()));
            }
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::DuplicateDocId(doc.doc_id.clone()));
            }
            let a = corpus.intern_author(&doc.author_id);
            corpus.doc_author.push(a);
        }
        corpus.documents = documents;
        Ok(corpus)
    }

    /// Builds a corpus whose author order starts with `authors` (in the given
    /// order); authors appearing only in documents follow.
    pub fn with_authors(authors: &[String], documents: Vec<DocumentRecord>) -> Result<Self> {
        let mut pre = Corpus::default();
        for a in authors {
            if a.is_empty() {
                return Err(Error::InvalidConfig("empty author id".into()));
            }
            pre.intern_author(a);
        }
        let docs = Corpus::new(documents)?;
        for d in &docs.documents {
            let a = pre.intern_author(&d.author_id);
            pre.doc_author.push(a);
        }
        pre.documents = docs.documents;
        Ok(pre)
    }

    /// Registers an author that has no documents. Returns its index.
    pub fn register_author(&mut self, id: &str) -> usize {
        self.intern_author(id)
    }

    fn intern_author(&mut self, id: &str) -> usize {
        if let Some(&i) = self.author_index.get(id) {
            return i;
        }
        let i = self.authors.len();
        self.authors.push(id.to_string());
        self.author_index.insert(id.to_string(), i);
        i
    }

    pub fn documents(&self) -> &[DocumentRecord] {
        &self.documents
    }

    pub fn authors(&self) -> &[String] {
        &self.authors
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn n_authors(&self) -> usize {
        self.authors.len()
    }

    pub fn author_index(&self, id: &str) -> Option<usize> {
        self.author_index.get(id).copied()
    }

    /// Author index of document `doc`.
    pub fn doc_author(&self, doc: usize) -> usize {
        self.doc_author[doc]
    }

    /// Document indices grouped by author index.
    pub fn docs_by_author(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.authors.len()];
        for (d, &a) in self.doc_author.iter().enumerate() {
            out[a].push(d);
        }
        out
    }

    pub fn labels(&self) -> Vec<Option<Class>> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn class_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for d in &self.documents {
            if let Some(c) = d.label {
                counts[c.index()] += 1;
            }
        }
        counts
    }
}

/// Undirected author–author relations, one edge per unordered pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeList {
    pairs: BTreeSet<(String, String)>,
}

impl EdgeList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `{a, b}`. Returns `false` when the pair was already present.
    pub fn insert(&mut self, a: &str, b: &str) -> Result<bool> {
        if a == b {
            return Err(Error::SelfPair(a.to_string()));
        }
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        Ok(self.pairs.insert(key))
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        self.pairs.contains(&(x.to_string(), y.to_string()))
    }

    /// Pairs in sorted order, smaller id first.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl<'a> FromIterator<(&'a str, &'a str)> for EdgeList {
    /// Collects pairs, silently skipping self-pairs.
    fn from_iter<I: IntoIterator<Item = (&'a str, &'a str)>>(iter: I) -> Self {
        let mut e = EdgeList::new();
        for (a, b) in iter {
            let _ = e.insert(a, b);
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ValidationReport {
    /// Edge endpoints with no corpus entry, sorted.
    pub unknown_authors: Vec<String>,
    /// Corpus authors without incident edges, in corpus order.
    pub solitary_authors: Vec<String>,
    pub solitary_count: usize,
    /// Indexed by [`Class::index`].
    pub class_counts: [usize; 3],
    pub unlabeled_count: usize,
    pub empty_text_count: usize,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.unknown_authors.is_empty()
    }
}

pub fn validate(corpus: &Corpus, edges: &EdgeList) -> ValidationReport {
    let mut unknown = BTreeSet::new();
    let mut connected = alloc::vec![false; corpus.n_authors()];
    for (a, b) in edges.iter() {
        for id in [a, b] {
            match corpus.author_index(id) {
                Some(i) => connected[i] = true,
                None => {
                    unknown.insert(id.to_string());
                }
            }
        }
    }
    let solitary_authors: Vec<String> = corpus
        .authors()
        .iter()
        .zip(&connected)
        .filter(|(_, &c)| !c)
        .map(|(a, _)| a.clone())
        .collect();
    ValidationReport {
        unknown_authors: unknown.into_iter().collect(),
        solitary_count: solitary_authors.len(),
        solitary_authors,
        class_counts: corpus.class_counts(),
        unlabeled_count: corpus.documents().iter().filter(|d| d.label.is_none()).count(),
        empty_text_count: corpus.documents().iter().filter(|d| d.text.is_empty()).count(),
    }
}
