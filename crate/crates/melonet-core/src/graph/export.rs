//! Graph writers: GEXF 1.2, DOT, and a JSON document with stable node
//! ordering so exports diff cleanly between runs.

use super::{GraphKind, MelodyNetwork, NodeLabel};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Serialize)]
struct JsonEdge<'a> {
    source: &'a NodeLabel,
    target: &'a NodeLabel,
    weight: u64,
}

#[derive(Serialize)]
struct JsonNetwork<'a> {
    name: &'a str,
    nodes: Vec<&'a NodeLabel>,
    edges: Vec<JsonEdge<'a>>,
    sequence: &'a [NodeLabel],
}

pub fn export_json(net: &MelodyNetwork) -> String {
    let doc = JsonNetwork {
        name: net.name(),
        nodes: net.nodes().collect(),
        edges: net
            .edges()
            .map(|(source, target, weight)| JsonEdge {
                source,
                target,
                weight,
            })
            .collect(),
        sequence: net.sequence(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("network serializes");
    out.push('\n');
    out
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

/// GEXF 1.2 with the label as a node attribute and the edge weight in the
/// standard weight slot. An optional community map is emitted as an
/// integer node attribute for external coloring.
pub fn export_gexf(net: &MelodyNetwork, communities: Option<&BTreeMap<NodeLabel, usize>>) -> String {
    let (labels, _) = net.index();
    let edge_type = match net.kind() {
        GraphKind::Directed => "directed",
        GraphKind::Undirected => "undirected",
    };
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n");
    let _ = writeln!(
        out,
        "  <graph mode=\"static\" defaultedgetype=\"{edge_type}\" name=\"{}\">",
        xml_escape(net.name())
    );
    if communities.is_some() {
        out.push_str("    <attributes class=\"node\">\n");
        out.push_str("      <attribute id=\"0\" title=\"community\" type=\"integer\"/>\n");
        out.push_str("    </attributes>\n");
    }
    out.push_str("    <nodes>\n");
    for (i, label) in labels.iter().enumerate() {
        let escaped = xml_escape(label.as_str());
        match communities.and_then(|m| m.get(label)) {
            Some(community) => {
                let _ = writeln!(
                    out,
                    "      <node id=\"{i}\" label=\"{escaped}\">\n        \
                     <attvalues><attvalue for=\"0\" value=\"{community}\"/></attvalues>\n      </node>"
                );
            }
            None => {
                let _ = writeln!(out, "      <node id=\"{i}\" label=\"{escaped}\"/>");
            }
        }
    }
    out.push_str("    </nodes>\n    <edges>\n");
    let (_, index) = net.index();
    for (i, (u, v, w)) in net.edges().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{i}\" source=\"{}\" target=\"{}\" weight=\"{w}\"/>",
            index[u], index[v]
        );
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT with the weight doubling as penwidth so weights are visible in
/// default renderings.
pub fn export_dot(net: &MelodyNetwork) -> String {
    let (keyword, arrow) = match net.kind() {
        GraphKind::Directed => ("digraph", "->"),
        GraphKind::Undirected => ("graph", "--"),
    };
    let mut out = String::new();
    let _ = writeln!(out, "{keyword} \"{}\" {{", dot_escape(net.name()));
    for label in net.nodes() {
        let _ = writeln!(out, "  \"{}\";", dot_escape(label.as_str()));
    }
    for (u, v, w) in net.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" {arrow} \"{}\" [weight={w}, penwidth={w}];",
            dot_escape(u.as_str()),
            dot_escape(v.as_str())
        );
    }
    out.push_str("}\n");
    out
}
