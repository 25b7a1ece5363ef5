//! The note-transition network: weighted directed graph with self-loops
//! plus the ordered label sequence that makes the score reconstructable.

mod export;

pub use export::{export_dot, export_gexf, export_json};

use crate::error::{Error, Result};
use crate::score::{Duration, MelodyEvent, Pitch, PitchClass};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Canonical node identity. For melody-built networks the string is one of
/// the three label forms (note `D4:1/8`, rest `R:1/8`, chord
/// `C4+E4+G4:1/2`); edge-list ingestion admits opaque ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeLabel(String);

impl NodeLabel {
    pub fn new(label: impl Into<String>) -> Self {
        NodeLabel(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Canonical label of an event; equal labels iff kind, pitches, and
    /// duration are all equal.
    pub fn for_event(event: &MelodyEvent) -> Self {
        let head = match event.pitches.as_slice() {
            [] => "R".to_string(),
            pitches => pitches
                .iter()
                .map(Pitch::to_string)
                .collect::<Vec<_>>()
                .join("+"),
        };
        NodeLabel(format!("{head}:{}", event.duration))
    }

    /// Parse a canonical label back into its event shape: the pitch list
    /// (empty for a rest) and the duration.
    pub fn parse_event(&self) -> Result<(Vec<Pitch>, Duration)> {
        let bad = || Error::domain(format!("'{}' is not a canonical node label", self.0));
        let (head, dur) = self.0.rsplit_once(':').ok_or_else(bad)?;
        let (num, den) = dur.split_once('/').ok_or_else(bad)?;
        let duration = Duration::new(num.parse().map_err(|_| bad())?, den.parse().map_err(|_| bad())?)?;
        if head == "R" {
            return Ok((Vec::new(), duration));
        }
        let mut pitches = Vec::new();
        for part in head.split('+') {
            let (name, octave) = part.split_at(part.len().checked_sub(1).ok_or_else(bad)?);
            let class = PitchClass::parse(name).ok_or_else(bad)?;
            let octave = octave.parse::<u8>().map_err(|_| bad())?;
            pitches.push(Pitch::new(class, octave)?);
        }
        if pitches.len() > 1 && pitches.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad());
        }
        Ok((pitches, duration))
    }

    pub fn is_rest(&self) -> bool {
        self.0.starts_with("R:")
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Directed,
    Undirected,
}

/// Weighted graph over NodeLabels. Directed when built from a melody;
/// undirected after projection, with edge keys stored as (min, max).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MelodyNetwork {
    name: String,
    kind: GraphKind,
    nodes: BTreeSet<NodeLabel>,
    edges: BTreeMap<(NodeLabel, NodeLabel), u64>,
    sequence: Vec<NodeLabel>,
}

impl MelodyNetwork {
    /// Assemble a network from explicit parts; endpoints are added to the
    /// node set, undirected keys are canonicalized, zero weights rejected.
    pub fn from_edges(
        name: impl Into<String>,
        kind: GraphKind,
        nodes: impl IntoIterator<Item = NodeLabel>,
        edges: impl IntoIterator<Item = (NodeLabel, NodeLabel, u64)>,
    ) -> Result<Self> {
        let mut net = MelodyNetwork {
            name: name.into(),
            kind,
            nodes: nodes.into_iter().collect(),
            edges: BTreeMap::new(),
            sequence: Vec::new(),
        };
        for (u, v, w) in edges {
            if w == 0 {
                return Err(Error::domain(format!("edge {u} -> {v} has zero weight")));
            }
            net.nodes.insert(u.clone());
            net.nodes.insert(v.clone());
            let key = net.canonical_key(u, v);
            *net.edges.entry(key).or_insert(0) += w;
        }
        Ok(net)
    }

    fn canonical_key(&self, u: NodeLabel, v: NodeLabel) -> (NodeLabel, NodeLabel) {
        if self.kind == GraphKind::Undirected && v < u {
            (v, u)
        } else {
            (u, v)
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Distinct edges (not summed weights).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeLabel> {
        self.nodes.iter()
    }

    pub fn contains(&self, label: &NodeLabel) -> bool {
        self.nodes.contains(label)
    }

    /// Edges in sorted key order; for undirected networks each edge
    /// appears once with source <= target.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeLabel, &NodeLabel, u64)> {
        self.edges.iter().map(|((u, v), w)| (u, v, *w))
    }

    pub fn weight(&self, u: &NodeLabel, v: &NodeLabel) -> u64 {
        let key = if self.kind == GraphKind::Undirected && v < u {
            (v.clone(), u.clone())
        } else {
            (u.clone(), v.clone())
        };
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn sequence(&self) -> &[NodeLabel] {
        &self.sequence
    }

    /// Sorted node list plus label-to-index lookup; index order is the
    /// deterministic basis for every metric computation.
    pub fn index(&self) -> (Vec<&NodeLabel>, BTreeMap<&NodeLabel, usize>) {
        let list: Vec<&NodeLabel> = self.nodes.iter().collect();
        let map = list.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        (list, map)
    }

    /// Out-adjacency over node indices. For undirected networks each edge
    /// is listed from both endpoints; self-loops appear once.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let (_, map) = self.index();
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (u, v) in self.edges.keys() {
            let ui = map[u];
            let vi = map[v];
            adj[ui].push(vi);
            if self.kind == GraphKind::Undirected && ui != vi {
                adj[vi].push(ui);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Stored event order; errors for networks without one (edge-list
    /// ingestion, projections, rest removal).
    pub fn reconstruct_events(&self) -> Result<Vec<NodeLabel>> {
        if self.sequence.is_empty() {
            return Err(Error::domain("no sequence stored"));
        }
        Ok(self.sequence.clone())
    }

    /// Drop rest nodes and their incident edges; no bridging. The sequence
    /// is cleared because it no longer describes the remaining graph.
    pub fn remove_rests(&self) -> MelodyNetwork {
        let nodes: BTreeSet<NodeLabel> = self
            .nodes
            .iter()
            .filter(|l| !l.is_rest())
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|((u, v), _)| !u.is_rest() && !v.is_rest())
            .map(|(k, w)| (k.clone(), *w))
            .collect();
        MelodyNetwork {
            name: self.name.clone(),
            kind: self.kind,
            nodes,
            edges,
            sequence: Vec::new(),
        }
    }

    /// Merge reciprocal edges: one undirected edge per unordered pair with
    /// weight w(u->v) + w(v->u). Self-loops dropped unless asked for.
    pub fn undirected_projection(&self, keep_self_loops: bool) -> MelodyNetwork {
        let mut edges: BTreeMap<(NodeLabel, NodeLabel), u64> = BTreeMap::new();
        for ((u, v), w) in &self.edges {
            if u == v && !keep_self_loops {
                continue;
            }
            let key = if v < u {
                (v.clone(), u.clone())
            } else {
                (u.clone(), v.clone())
            };
            *edges.entry(key).or_insert(0) += w;
        }
        MelodyNetwork {
            name: self.name.clone(),
            kind: GraphKind::Undirected,
            nodes: self.nodes.clone(),
            edges,
            sequence: Vec::new(),
        }
    }
}

/// Algorithm: walk the event list, adding a node per unseen label and
/// incrementing the edge weight for every consecutive label pair.
pub fn build_network(events: &[MelodyEvent], name: &str) -> Result<MelodyNetwork> {
    if events.is_empty() {
        return Err(Error::domain("empty melody"));
    }
    for (i, ev) in events.iter().enumerate() {
        if ev.position != i {
            return Err(Error::domain(format!(
                "positions not consecutive: expected {i}, got {}",
                ev.position
            )));
        }
    }
    let labels: Vec<NodeLabel> = events.iter().map(NodeLabel::for_event).collect();
    let mut net = MelodyNetwork {
        name: name.to_string(),
        kind: GraphKind::Directed,
        nodes: labels.iter().cloned().collect(),
        edges: BTreeMap::new(),
        sequence: labels.clone(),
    };
    for pair in labels.windows(2) {
        *net
            .edges
            .entry((pair[0].clone(), pair[1].clone()))
            .or_insert(0) += 1;
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::parse_mel_text;

    /// The worked example melody: C, D, D, C, D, G eighth, rest eighth,
    /// G quarter, then G an octave up.
    pub(crate) const FIG_MELODY: &str = "\
note C 4 1/4
note D 4 1/4
note D 4 1/4
note C 4 1/4
note D 4 1/4
note G 4 1/8
rest 1/8
note G 4 1/4
note G 5 1/4
";

    fn fig_network() -> MelodyNetwork {
        build_network(&parse_mel_text(FIG_MELODY).unwrap(), "fig").unwrap()
    }

    fn label(s: &str) -> NodeLabel {
        NodeLabel::new(s)
    }

    #[test]
    fn label_forms() {
        let events = parse_mel_text("note C# 4 1/8\nrest 1/2\nchord C/4,E/4,G/4 1/2").unwrap();
        let labels: Vec<String> = events
            .iter()
            .map(|e| NodeLabel::for_event(e).to_string())
            .collect();
        assert_eq!(labels, ["C#4:1/8", "R:1/2", "C4+E4+G4:1/2"]);
    }

    #[test]
    fn label_round_trips_to_event_shape() {
        let events =
            parse_mel_text("note C# 4 1/8\nrest 1/2\nchord C/4,E/4,G/4 1/2\nnote B 0 3/8").unwrap();
        for ev in &events {
            let (pitches, duration) = NodeLabel::for_event(ev).parse_event().unwrap();
            assert_eq!(pitches, ev.pitches);
            assert_eq!(duration, ev.duration);
        }
        assert!(label("junk").parse_event().is_err());
        assert!(label("C4").parse_event().is_err());
        // unsorted chord labels are not canonical
        assert!(label("E4+C4:1/2").parse_event().is_err());
    }

    #[test]
    fn reference_melody_network_shape() {
        let net = fig_network();
        assert_eq!(net.node_count(), 6);
        assert_eq!(net.edge_count(), 7);
        assert_eq!(net.weight(&label("C4:1/4"), &label("D4:1/4")), 2);
        for (u, v, w) in net.edges() {
            if !(u.as_str() == "C4:1/4" && v.as_str() == "D4:1/4") {
                assert_eq!(w, 1, "{u} -> {v}");
            }
        }
        assert_eq!(net.total_weight(), 8);
        assert_eq!(net.sequence().len(), 9);
    }

    #[test]
    fn reconstruction_round_trip() {
        let events = parse_mel_text(FIG_MELODY).unwrap();
        let net = build_network(&events, "fig").unwrap();
        let seq = net.reconstruct_events().unwrap();
        let expected: Vec<NodeLabel> = events.iter().map(NodeLabel::for_event).collect();
        assert_eq!(seq, expected);
        // rebuilding from the reconstructed order is the identity
        let shapes: Vec<MelodyEvent> = seq
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let (pitches, duration) = l.parse_event().unwrap();
                MelodyEvent {
                    pitches,
                    duration,
                    position: i,
                }
            })
            .collect();
        assert_eq!(build_network(&shapes, "fig").unwrap(), net);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(build_network(&[], "x").is_err());
        let mut events = parse_mel_text("note C 4 1/4\nnote D 4 1/4").unwrap();
        events[1].position = 5;
        assert!(build_network(&events, "x").is_err());
    }

    #[test]
    fn single_event_and_self_loop() {
        let one = build_network(&parse_mel_text("note A 4 1/4").unwrap(), "x").unwrap();
        assert_eq!((one.node_count(), one.edge_count()), (1, 0));
        assert_eq!(one.reconstruct_events().unwrap().len(), 1);

        let five = "note A 4 1/4\n".repeat(5);
        let net = build_network(&parse_mel_text(&five).unwrap(), "x").unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (1, 1));
        assert_eq!(net.weight(&label("A4:1/4"), &label("A4:1/4")), 4);
    }

    #[test]
    fn remove_rests_drops_rest_row() {
        let net = fig_network();
        let cut = net.remove_rests();
        assert_eq!(cut.node_count(), 5);
        assert_eq!(cut.edge_count(), 5);
        assert!(!cut.nodes().any(|l| l.is_rest()));
        // the fragment past the rest survives without bridging
        assert_eq!(cut.weight(&label("G4:1/4"), &label("G5:1/4")), 1);
        assert_eq!(cut.weight(&label("G4:1/8"), &label("G4:1/4")), 0);
        assert!(cut.reconstruct_events().is_err());
        // no-rest networks come back unchanged apart from the sequence
        let again = cut.remove_rests();
        assert_eq!(again.node_count(), cut.node_count());
        assert_eq!(again.edge_count(), cut.edge_count());
        // a rest-only network empties out
        let rest_only = build_network(&parse_mel_text("rest 1/4").unwrap(), "r").unwrap();
        assert_eq!(rest_only.remove_rests().node_count(), 0);
    }

    #[test]
    fn projection_merges_reciprocal_edges() {
        let net = MelodyNetwork::from_edges(
            "t",
            GraphKind::Directed,
            [],
            [
                (label("a"), label("b"), 2),
                (label("b"), label("a"), 3),
                (label("a"), label("a"), 7),
            ],
        )
        .unwrap();
        let kept = net.undirected_projection(true);
        assert_eq!(kept.weight(&label("a"), &label("b")), 5);
        assert_eq!(kept.weight(&label("b"), &label("a")), 5);
        assert_eq!(kept.weight(&label("a"), &label("a")), 7);
        assert_eq!(kept.edge_count(), 2);
        let dropped = net.undirected_projection(false);
        assert_eq!(dropped.edge_count(), 1);
    }

    #[test]
    fn projection_of_reference_melody() {
        // of the 7 directed edges, C->D and D->C merge and D->D is the
        // lone self-loop: 5 undirected edges without it, 6 with it
        let net = fig_network();
        assert_eq!(net.undirected_projection(false).edge_count(), 5);
        assert_eq!(net.undirected_projection(true).edge_count(), 6);
    }

    #[test]
    fn directed_cycle_projects_to_triangle() {
        let net = MelodyNetwork::from_edges(
            "t",
            GraphKind::Directed,
            [],
            [
                (label("a"), label("b"), 1),
                (label("b"), label("c"), 1),
                (label("c"), label("a"), 1),
            ],
        )
        .unwrap();
        let proj = net.undirected_projection(false);
        assert_eq!((proj.node_count(), proj.edge_count()), (3, 3));
        assert_eq!(proj.adjacency(), vec![vec![1, 2], vec![0, 2], vec![0, 1]]);
    }

    #[test]
    fn from_edges_canonicalizes_and_validates() {
        assert!(MelodyNetwork::from_edges(
            "t",
            GraphKind::Directed,
            [],
            [(label("a"), label("b"), 0)]
        )
        .is_err());
        let net = MelodyNetwork::from_edges(
            "t",
            GraphKind::Undirected,
            [label("isolated")],
            [(label("b"), label("a"), 1), (label("a"), label("b"), 1)],
        )
        .unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edge_count(), 1);
        assert_eq!(net.weight(&label("a"), &label("b")), 2);
    }
}
