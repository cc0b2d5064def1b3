//! Text formats: edge lists, edit batches, covers and LFR ground truth.
//!
//! All formats are line based, accept LF or CRLF, and skip blank lines and
//! lines starting with `#`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::{EditBatch, Graph, LoadStats, VertexId};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn parse_id(token: &str, line: usize) -> Result<VertexId> {
    if token.starts_with('-') && token[1..].bytes().all(|b| b.is_ascii_digit()) && token.len() > 1 {
        return Err(Error::Parse { line, message: format!("negative vertex id {token}") });
    }
    token.parse().map_err(|_| Error::Parse { line, message: format!("{token:?} is not a vertex id") })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One edge per line: two vertex ids.
pub fn parse_edge_list(text: &str) -> Result<(Graph, LoadStats)> {
    let mut edges = Vec::new();
    for (line, tokens) in lines(text) {
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected two vertex ids, found {} tokens", tokens.len()),
            });
        }
        edges.push((parse_id(tokens[0], line)?, parse_id(tokens[1], line)?));
    }
    Ok(Graph::from_edges(edges))
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<(Graph, LoadStats)> {
    parse_edge_list(&read(path.as_ref())?)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &format_edge_list(g))
}

/// Lines `+ u v` (insert) and `- u v` (delete).
pub fn parse_batch(text: &str) -> Result<EditBatch> {
    let mut batch = EditBatch::default();
    for (line, tokens) in lines(text) {
        if tokens.len() != 3 {
            return Err(Error::Parse { line, message: "expected `+ u v` or `- u v`".into() });
        }
        let (u, v) = (parse_id(tokens[1], line)?, parse_id(tokens[2], line)?);
        let added = match tokens[0] {
            "+" => batch.insert(u, v),
            "-" => batch.delete(u, v),
            op => return Err(Error::Parse { line, message: format!("unknown operation {op:?}") }),
        };
        added.map_err(|e| Error::Parse { line, message: e.to_string() })?;
    }
    Ok(batch)
}

pub fn read_batch(path: impl AsRef<Path>) -> Result<EditBatch> {
    parse_batch(&read(path.as_ref())?)
}

/// Deletions first, then insertions, each in ascending order.
pub fn format_batch(b: &EditBatch) -> String {
    let mut out = String::new();
    for (u, v) in b.deletions() {
        let _ = writeln!(out, "- {u} {v}");
    }
    for (u, v) in b.insertions() {
        let _ = writeln!(out, "+ {u} {v}");
    }
    out
}

pub fn write_batch(b: &EditBatch, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &format_batch(b))
}

/// One community per line, members separated by spaces.
pub fn parse_cover(text: &str) -> Result<Cover> {
    let mut communities = Vec::new();
    for (line, tokens) in lines(text) {
        let members = tokens.iter().map(|t| parse_id(t, line)).collect::<Result<Vec<_>>>()?;
        communities.push(members);
    }
    Ok(Cover::new(communities))
}

pub fn read_cover(path: impl AsRef<Path>) -> Result<Cover> {
    parse_cover(&read(path.as_ref())?)
}

pub fn format_cover(c: &Cover) -> String {
    let mut out = String::new();
    for community in c.communities() {
        let line: Vec<String> = community.iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_cover(c: &Cover, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &format_cover(c))
}

/// LFR-style membership: `vertex<TAB>community community ...`.
pub fn parse_lfr_truth(text: &str) -> Result<Cover> {
    let mut by_id: BTreeMap<u64, Vec<VertexId>> = BTreeMap::new();
    for (line, tokens) in lines(text) {
        if tokens.len() < 2 {
            return Err(Error::Parse { line, message: "expected a vertex and at least one community".into() });
        }
        let v = parse_id(tokens[0], line)?;
        for t in &tokens[1..] {
            let c =
                t.parse::<u64>().map_err(|_| Error::Parse { line, message: format!("{t:?} is not a community id") })?;
            by_id.entry(c).or_default().push(v);
        }
    }
    Ok(Cover::new(by_id.into_values()))
}

pub fn read_lfr_truth(path: impl AsRef<Path>) -> Result<Cover> {
    parse_lfr_truth(&read(path.as_ref())?)
}

pub fn format_lfr_truth(c: &Cover) -> String {
    let mut out = String::new();
    for (v, cs) in c.membership() {
        let ids: Vec<String> = cs.iter().map(|c| (c + 1).to_string()).collect();
        let _ = writeln!(out, "{v}\t{}", ids.join(" "));
    }
    out
}
