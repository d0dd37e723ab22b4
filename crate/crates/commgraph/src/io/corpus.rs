use std::path::Path;
use std::str::FromStr;

use commgraph_core::{Class, Corpus, DocumentRecord};
use serde::Deserialize;

use super::{read_to_string, write_file};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Tsv,
    Jsonl,
}

impl CorpusFormat {
    /// `.jsonl` / `.json` are JSON lines, anything else TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Tsv,
        }
    }
}

const TSV_COLUMNS: [&str; 4] = ["doc_id", "author_id", "label", "text"];

fn parse_label(path: &Path, line: u64, raw: &str) -> Result<Option<Class>> {
    if raw.trim().is_empty() {
        return Ok(None);
    }
    Class::from_str(raw)
        .map(Some)
        .map_err(|e| Error::parse(path, line, e.to_string()))
}

fn finish(path: &Path, docs: Vec<(u64, DocumentRecord)>) -> Result<Corpus> {
    let mut seen = std::collections::HashMap::new();
    for (line, d) in &docs {
        if d.author_id.is_empty() {
            return Err(Error::parse(path, *line, format!("document `{}` has an empty author_id", d.doc_id)));
        }
        if let Some(first) = seen.insert(d.doc_id.as_str(), *line) {
            return Err(Error::parse(
                path,
                *line,
                format!("duplicate doc_id `{}` (first seen on line {first})", d.doc_id),
            ));
        }
    }
    Corpus::new(docs.into_iter().map(|(_, d)| d).collect()).map_err(|e| Error::parse(path, 0, e.to_string()))
}

/// Tab-separated corpus with a header naming the columns doc_id, author_id,
/// label and text in any order. Fields containing tabs, newlines or quotes
/// are double-quoted. An empty label field means unlabeled; an empty file is
/// an empty corpus.
pub fn parse_tsv(path: &Path, contents: &str) -> Result<Corpus> {
    if contents.trim().is_empty() {
        return Ok(Corpus::default());
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(true)
        .from_reader(contents.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let mut cols = [0usize; 4];
    for (k, name) in TSV_COLUMNS.iter().enumerate() {
        cols[k] = header
            .iter()
            .position(|h| h.trim() == *name)
            .ok_or_else(|| Error::parse(path, 1, format!("header lacks column `{name}`")))?;
    }
    let mut docs = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |k: usize| rec.get(cols[k]).unwrap_or_default();
        docs.push((
            line,
            DocumentRecord::new(field(0), field(1), field(3), parse_label(path, line, field(2))?),
        ));
    }
    finish(path, docs)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDoc {
    doc_id: String,
    author_id: String,
    text: String,
    #[serde(default)]
    label: Option<String>,
}

/// One JSON object per line with keys doc_id, author_id, text and an
/// optional label. Blank lines are skipped.
pub fn parse_jsonl(path: &Path, contents: &str) -> Result<Corpus> {
    let mut docs = Vec::new();
    for (i, line) in contents.lines().enumerate() {
        let n = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let d: JsonDoc = serde_json::from_str(line).map_err(|e| Error::parse(path, n, e.to_string()))?;
        let label = match d.label.as_deref() {
            None => None,
            Some(l) => parse_label(path, n, l)?,
        };
        docs.push((n, DocumentRecord::new(d.doc_id, d.author_id, d.text, label)));
    }
    finish(path, docs)
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    let contents = read_to_string(path)?;
    match format {
        CorpusFormat::Tsv => parse_tsv(path, &contents),
        CorpusFormat::Jsonl => parse_jsonl(path, &contents),
    }
}

pub fn format_tsv(corpus: &Corpus) -> String {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(Vec::new());
    w.write_record(TSV_COLUMNS).expect("in-memory write");
    for d in corpus.documents() {
        let label = d.label.map_or("", Class::as_str);
        w.write_record([d.doc_id.as_str(), d.author_id.as_str(), label, d.text.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn format_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for d in corpus.documents() {
        out.push_str(&serde_json::to_string(d).expect("documents serialize"));
        out.push('\n');
    }
    out
}

pub fn save_corpus(path: &Path, corpus: &Corpus, format: CorpusFormat) -> Result<()> {
    let text = match format {
        CorpusFormat::Tsv => format_tsv(corpus),
        CorpusFormat::Jsonl => format_jsonl(corpus),
    };
    write_file(path, text)
}
