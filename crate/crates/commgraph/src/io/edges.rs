use std::path::Path;

use commgraph_core::EdgeList;

use super::{read_to_string, write_file};
use crate::error::{Error, Result};

/// Two whitespace-separated author ids per line. Blank lines and lines
/// starting with `#` are ignored; `a b` and `b a` are the same edge.
pub fn parse_edges(path: &Path, contents: &str) -> Result<EdgeList> {
    let mut edges = EdgeList::new();
    for (i, line) in contents.lines().enumerate() {
        let n = i as u64 + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = t.split_whitespace().collect();
        let [a, b] = tokens[..] else {
            return Err(Error::parse(path, n, format!("expected two author ids, found {}", tokens.len())));
        };
        if a == b {
            return Err(Error::parse(path, n, format!("self-pair edge on author `{a}`")));
        }
        edges.insert(a, b).map_err(|e| Error::parse(path, n, e.to_string()))?;
    }
    Ok(edges)
}

pub fn load_edges(path: &Path) -> Result<EdgeList> {
    parse_edges(path, &read_to_string(path)?)
}

/// One `a b` line per edge, sorted. Fails on ids containing whitespace,
/// which the format cannot represent.
pub fn format_edges(edges: &EdgeList) -> std::result::Result<String, String> {
    let mut out = String::new();
    for (a, b) in edges.iter() {
        for id in [a, b] {
            if id.is_empty() || id.chars().any(char::is_whitespace) || id.starts_with('#') {
                return Err(format!("author id `{id}` cannot be written to an edge file"));
            }
        }
        out.push_str(a);
        out.push(' ');
        out.push_str(b);
        out.push('\n');
    }
    Ok(out)
}

pub fn save_edges(path: &Path, edges: &EdgeList) -> Result<()> {
    let text = format_edges(edges).map_err(|m| Error::config(path, m))?;
    write_file(path, text)
}
