//! Generic edge-list ingestion: "source target weight" triples with opaque
//! node ids, so non-musical networks can run through the same metrics.

use super::mel::strip_comment;
use crate::error::{Error, Result};
use crate::graph::{GraphKind, MelodyNetwork, NodeLabel};

/// Parse a directed weighted edge list. Duplicate (source, target) lines
/// sum their weights; the returned network has no event sequence.
pub fn parse_edge_list(input: &str, name: &str) -> Result<MelodyNetwork> {
    let mut edges = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 'source target weight', got {} fields", tokens.len()),
            ));
        }
        let weight: u64 = tokens[2].parse().map_err(|_| {
            Error::parse(line_no, format!("weight '{}' is not a positive integer", tokens[2]))
        })?;
        if weight == 0 {
            return Err(Error::parse(line_no, "weight must be positive"));
        }
        edges.push((NodeLabel::new(tokens[0]), NodeLabel::new(tokens[1]), weight));
    }
    MelodyNetwork::from_edges(name, GraphKind::Directed, [], edges)
}
