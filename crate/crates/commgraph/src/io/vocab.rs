use std::path::Path;

use commgraph_core::features::{VocabKind, Vocabulary};

use super::{read_to_string, write_file};
use crate::error::{Error, Result};

// Character n-grams may contain whitespace, so tokens are escaped:
// `\\`, `\t`, `\n`, `\r`.
fn escape(token: &str) -> String {
    let mut s = String::with_capacity(token.len());
    for c in token.chars() {
        match c {
            '\\' => s.push_str("\\\\"),
            '\t' => s.push_str("\\t"),
            '\n' => s.push_str("\\n"),
            '\r' => s.push_str("\\r"),
            c => s.push(c),
        }
    }
    s
}

fn unescape(line: &str) -> std::result::Result<String, String> {
    let mut s = String::with_capacity(line.len());
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            s.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => s.push('\\'),
            Some('t') => s.push('\t'),
            Some('n') => s.push('\n'),
            Some('r') => s.push('\r'),
            other => return Err(format!("bad escape `\\{}`", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(s)
}

/// A `# kind n_max` header line, then one escaped token per line; the line
/// order is the column index.
pub fn format_vocab(vocab: &Vocabulary) -> String {
    let kind = match vocab.kind() {
        VocabKind::Word => "word",
        VocabKind::CharNgram => "char_ngram",
    };
    let mut out = format!("# {kind} {}\n", vocab.n_max());
    for t in vocab.tokens() {
        out.push_str(&escape(t));
        out.push('\n');
    }
    out
}

pub fn parse_vocab(path: &Path, contents: &str) -> Result<Vocabulary> {
    let mut lines = contents.split('\n');
    let header = lines.next().unwrap_or_default();
    let fields: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    let (kind, n_max) = match fields[..] {
        ["word", n] => (VocabKind::Word, n),
        ["char_ngram", n] => (VocabKind::CharNgram, n),
        _ => return Err(Error::parse(path, 1, "expected `# word|char_ngram <n_max>` header")),
    };
    let n_max: usize = n_max.parse().map_err(|_| Error::parse(path, 1, "bad n_max"))?;
    let mut tokens = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        tokens.push(unescape(line).map_err(|m| Error::parse(path, i as u64 + 2, m))?);
    }
    Vocabulary::from_tokens(kind, n_max, tokens).map_err(|e| Error::parse(path, 0, e.to_string()))
}

pub fn save_vocab(path: &Path, vocab: &Vocabulary) -> Result<()> {
    write_file(path, format_vocab(vocab))
}

pub fn load_vocab(path: &Path) -> Result<Vocabulary> {
    parse_vocab(path, &read_to_string(path)?)
}
