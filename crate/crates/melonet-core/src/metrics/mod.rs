//! Scalar and distributional metrics for one network: degrees, density,
//! breadth-first distances, clustering, and Brandes betweenness.

mod power_law;

pub use power_law::{fit_power_law, PowerLawFit};

use crate::error::{Error, Result};
use crate::graph::{GraphKind, MelodyNetwork, NodeLabel};
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeRecord {
    pub node: NodeLabel,
    pub in_degree: usize,
    pub out_degree: usize,
    /// in + out; a self-loop contributes 1 to each side, hence 2 here.
    pub total_degree: usize,
}

/// One record per node, counting distinct edges rather than weights.
/// On undirected networks each incident edge counts once per direction,
/// as if it were a reciprocal directed pair.
pub fn degree_table(net: &MelodyNetwork) -> Vec<DegreeRecord> {
    let (labels, index) = net.index();
    let mut ins = vec![0usize; labels.len()];
    let mut outs = vec![0usize; labels.len()];
    for (u, v, _) in net.edges() {
        let ui = index[u];
        let vi = index[v];
        outs[ui] += 1;
        ins[vi] += 1;
        if net.kind() == GraphKind::Undirected && ui != vi {
            outs[vi] += 1;
            ins[ui] += 1;
        }
    }
    labels
        .iter()
        .enumerate()
        .map(|(i, label)| DegreeRecord {
            node: (*label).clone(),
            in_degree: ins[i],
            out_degree: outs[i],
            total_degree: ins[i] + outs[i],
        })
        .collect()
}

/// P(k) = fraction of nodes with total degree k.
pub fn degree_distribution(net: &MelodyNetwork) -> Result<BTreeMap<usize, f64>> {
    if net.node_count() == 0 {
        return Err(Error::domain("degree distribution of an empty network"));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for record in degree_table(net) {
        *counts.entry(record.total_degree).or_insert(0) += 1;
    }
    let n = net.node_count() as f64;
    Ok(counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect())
}

/// edge_count / node_count^2: the directed-with-self-loops convention,
/// under which a complete graph scores exactly 1.
pub fn density(net: &MelodyNetwork) -> Result<f64> {
    if net.node_count() == 0 {
        return Err(Error::domain("density of an empty network"));
    }
    let n = net.node_count() as f64;
    Ok(net.edge_count() as f64 / (n * n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub avg_distance: f64,
    pub diameter: usize,
    /// Fraction of ordered node pairs (u != v) with a finite distance;
    /// the average is taken over exactly those pairs.
    pub reachable_fraction: f64,
}

/// Unweighted breadth-first distances. The average runs over ordered
/// reachable pairs; the diameter is the longest finite distance.
pub fn distances(net: &MelodyNetwork, mode: DistanceMode) -> Result<DistanceSummary> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::domain("distances need at least 2 nodes"));
    }
    let adj = match (net.kind(), mode) {
        (GraphKind::Directed, DistanceMode::Undirected) => {
            net.undirected_projection(true).adjacency()
        }
        _ => net.adjacency(),
    };
    let (sum, reachable, diameter) = bfs_totals(&adj);
    if reachable == 0 {
        return Err(Error::domain("fully disconnected"));
    }
    Ok(DistanceSummary {
        avg_distance: sum as f64 / reachable as f64,
        diameter,
        reachable_fraction: reachable as f64 / (n * (n - 1)) as f64,
    })
}

/// Sum of finite pairwise distances, count of reachable ordered pairs,
/// and the maximum finite distance.
fn bfs_totals(adj: &[Vec<usize>]) -> (u64, u64, usize) {
    let n = adj.len();
    let mut sum = 0u64;
    let mut reachable = 0u64;
    let mut diameter = 0usize;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (target, &d) in dist.iter().enumerate() {
            if target != source && d != usize::MAX {
                sum += d as u64;
                reachable += 1;
                diameter = diameter.max(d);
            }
        }
    }
    (sum, reachable, diameter)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusteringSummary {
    /// Closed triplets / connected triplets (transitivity).
    pub global: f64,
    /// Mean over all nodes of the local coefficient; degree < 2 counts 0.
    pub avg_local: f64,
    /// Set when the graph has fewer than 3 nodes and both values are 0.
    pub degenerate: bool,
}

/// Clustering on the undirected projection with self-loops dropped.
pub fn clustering(net: &MelodyNetwork) -> ClusteringSummary {
    let simple = net.undirected_projection(false);
    let n = simple.node_count();
    if n < 3 {
        return ClusteringSummary {
            global: 0.0,
            avg_local: 0.0,
            degenerate: true,
        };
    }
    let adj = simple.adjacency();
    let mut closed = 0u64;
    let mut triplets = 0u64;
    let mut local_sum = 0.0f64;
    for u in 0..n {
        let deg = adj[u].len();
        if deg < 2 {
            continue;
        }
        let mut links = 0u64;
        for (i, &v) in adj[u].iter().enumerate() {
            for &w in &adj[u][i + 1..] {
                if adj[v].binary_search(&w).is_ok() {
                    links += 1;
                }
            }
        }
        let pairs = (deg * (deg - 1) / 2) as u64;
        triplets += pairs;
        closed += links;
        local_sum += links as f64 / pairs as f64;
    }
    ClusteringSummary {
        global: if triplets == 0 {
            0.0
        } else {
            closed as f64 / triplets as f64
        },
        avg_local: local_sum / n as f64,
        degenerate: false,
    }
}

/// Brandes accumulation over breadth-first shortest-path DAGs: directed,
/// unweighted, endpoints excluded, ordered pairs, no normalization.
pub fn betweenness(net: &MelodyNetwork) -> BTreeMap<NodeLabel, f64> {
    let (labels, _) = net.index();
    let adj = net.adjacency();
    let n = labels.len();
    let mut score = vec![0.0f64; n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        stack.clear();
        for list in &mut preds {
            list.clear();
        }
        sigma.fill(0.0);
        sigma[source] = 1.0;
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            stack.push(u);
            for &v in &adj[u] {
                if v == u {
                    continue;
                }
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
        delta.fill(0.0);
        while let Some(w) = stack.pop() {
            for &u in &preds[w] {
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
            }
            if w != source {
                score[w] += delta[w];
            }
        }
    }
    labels
        .into_iter()
        .zip(score)
        .map(|(label, s)| (label.clone(), s))
        .collect()
}

/// Divide raw scores by (n-1)(n-2), the number of ordered pairs a node
/// can sit between.
pub fn normalize_betweenness(
    scores: &BTreeMap<NodeLabel, f64>,
) -> BTreeMap<NodeLabel, f64> {
    let n = scores.len();
    if n < 3 {
        return scores.keys().map(|k| (k.clone(), 0.0)).collect();
    }
    let scale = ((n - 1) * (n - 2)) as f64;
    scores
        .iter()
        .map(|(k, v)| (k.clone(), v / scale))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedNode {
    pub node: NodeLabel,
    pub value: f64,
}

/// Everything the per-track report carries; field order is the JSON order.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub name: String,
    /// Sequence length (0 for networks ingested without one).
    pub length: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub median_degree: f64,
    pub density: f64,
    pub avg_distance_directed: f64,
    pub avg_distance_undirected: f64,
    pub diameter: usize,
    pub reachable_fraction_directed: f64,
    pub reachable_fraction_undirected: f64,
    pub clustering_global: f64,
    pub clustering_avg_local: f64,
    pub degree_distribution: BTreeMap<usize, f64>,
    pub in_degree_distribution: BTreeMap<usize, f64>,
    pub out_degree_distribution: BTreeMap<usize, f64>,
    pub power_law: PowerLawFit,
    pub betweenness: BTreeMap<NodeLabel, f64>,
    pub top_by_degree: Vec<RankedNode>,
    pub top_by_betweenness: Vec<RankedNode>,
}

/// Aggregate every metric. Distances fall back to 0 with reachable
/// fraction 0 when undefined (single node or no reachable pair), so a
/// report always exists for a nonempty network.
pub fn full_report(net: &MelodyNetwork, r_squared_threshold: f64) -> Result<MetricsReport> {
    if net.node_count() == 0 {
        return Err(Error::domain("empty network"));
    }
    let records = degree_table(net);
    let mut totals: Vec<usize> = records.iter().map(|r| r.total_degree).collect();
    totals.sort_unstable();
    let n = totals.len();
    let max_degree = *totals.last().unwrap();
    let median_degree = if n % 2 == 1 {
        totals[n / 2] as f64
    } else {
        (totals[n / 2 - 1] + totals[n / 2]) as f64 / 2.0
    };
    let avg_degree = totals.iter().sum::<usize>() as f64 / n as f64;

    let empty = DistanceSummary {
        avg_distance: 0.0,
        diameter: 0,
        reachable_fraction: 0.0,
    };
    let directed = distances(net, DistanceMode::Directed).unwrap_or(empty);
    let undirected = distances(net, DistanceMode::Undirected).unwrap_or(empty);
    let clustering = clustering(net);
    let dist = degree_distribution(net)?;
    let power_law = fit_power_law(&dist, r_squared_threshold);
    let betweenness = betweenness(net);

    let mut by_degree: Vec<RankedNode> = records
        .iter()
        .map(|r| RankedNode {
            node: r.node.clone(),
            value: r.total_degree as f64,
        })
        .collect();
    by_degree.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.node.cmp(&b.node)));
    by_degree.truncate(10);
    let mut by_betweenness: Vec<RankedNode> = betweenness
        .iter()
        .map(|(node, value)| RankedNode {
            node: node.clone(),
            value: *value,
        })
        .collect();
    by_betweenness.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.node.cmp(&b.node)));
    by_betweenness.truncate(10);

    let side = |records: &[DegreeRecord], pick: fn(&DegreeRecord) -> usize| {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for r in records {
            *counts.entry(pick(r)).or_insert(0) += 1;
        }
        counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / n as f64))
            .collect::<BTreeMap<usize, f64>>()
    };

    Ok(MetricsReport {
        name: net.name().to_string(),
        length: net.sequence().len(),
        node_count: net.node_count(),
        edge_count: net.edge_count(),
        avg_degree,
        max_degree,
        median_degree,
        density: density(net)?,
        avg_distance_directed: directed.avg_distance,
        avg_distance_undirected: undirected.avg_distance,
        diameter: directed.diameter,
        reachable_fraction_directed: directed.reachable_fraction,
        reachable_fraction_undirected: undirected.reachable_fraction,
        clustering_global: clustering.global,
        clustering_avg_local: clustering.avg_local,
        degree_distribution: dist,
        in_degree_distribution: side(&records, |r| r.in_degree),
        out_degree_distribution: side(&records, |r| r.out_degree),
        power_law,
        betweenness,
        top_by_degree: by_degree,
        top_by_betweenness: by_betweenness,
    })
}
