//! Independent oracles and seeded generators for the acceptance suite.
//! Each oracle recomputes a metric through a different algorithm and data
//! structure than the library uses.

use melonet_core::{GraphKind, MelodyNetwork, NodeLabel};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub const FIG_MELODY: &str = "\
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

pub fn label(s: &str) -> NodeLabel {
    NodeLabel::new(s)
}

fn node(i: usize) -> NodeLabel {
    label(&format!("n{i:03}"))
}

/// Random directed graph: every ordered pair (u, v), u != v, becomes an
/// edge with probability per_mille/1000; all weights 1.
pub fn seeded_digraph(n: usize, per_mille: u32, seed: u64) -> MelodyNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_range(0..1000) < per_mille {
                edges.push((node(u), node(v), 1));
            }
        }
    }
    MelodyNetwork::from_edges(
        format!("digraph_{n}_{seed}"),
        GraphKind::Directed,
        (0..n).map(node),
        edges,
    )
    .unwrap()
}

/// Random simple undirected graph, same edge rule over unordered pairs.
pub fn seeded_undirected(n: usize, per_mille: u32, seed: u64) -> MelodyNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_range(0..1000) < per_mille {
                edges.push((node(u), node(v), 1));
            }
        }
    }
    MelodyNetwork::from_edges(
        format!("ugraph_{n}_{seed}"),
        GraphKind::Undirected,
        (0..n).map(node),
        edges,
    )
    .unwrap()
}

/// Random weighted undirected graph with occasional self-loops, for the
/// modularity oracles.
pub fn seeded_weighted(n: usize, per_mille: u32, seed: u64) -> MelodyNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            let threshold = if u == v { per_mille / 4 } else { per_mille };
            if rng.random_range(0..1000) < threshold {
                edges.push((node(u), node(v), rng.random_range(1..6)));
            }
        }
    }
    MelodyNetwork::from_edges(
        format!("wgraph_{n}_{seed}"),
        GraphKind::Undirected,
        (0..n).map(node),
        edges,
    )
    .unwrap()
}

/// Ring lattice where every node links to its k/2 nearest neighbors on
/// each side, with a seeded fraction of edges rewired to random targets.
pub fn ring_rewired(n: usize, k: usize, rewire_per_mille: u32, seed: u64) -> MelodyNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for u in 0..n {
        for step in 1..=(k / 2) {
            let v = (u + step) % n;
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let original: Vec<(usize, usize)> = edges.iter().copied().collect();
    for (u, v) in original {
        if rng.random_range(0..1000) >= rewire_per_mille {
            continue;
        }
        // draw a fresh endpoint for u, keeping the graph simple
        let mut tries = 0;
        loop {
            let w = rng.random_range(0..n);
            let candidate = (u.min(w), u.max(w));
            if w != u && !edges.contains(&candidate) {
                edges.remove(&(u, v));
                edges.insert(candidate);
                break;
            }
            tries += 1;
            if tries > 100 {
                break;
            }
        }
    }
    MelodyNetwork::from_edges(
        format!("ring_{n}_{k}"),
        GraphKind::Undirected,
        (0..n).map(node),
        edges.into_iter().map(|(u, v)| (node(u), node(v), 1)),
    )
    .unwrap()
}

/// All-pairs shortest paths by dynamic programming over intermediates.
pub fn floyd_warshall(adj: &[Vec<usize>]) -> Vec<Vec<Option<u64>>> {
    let n = adj.len();
    let mut dist: Vec<Vec<Option<u64>>> = vec![vec![None; n]; n];
    for (u, neighbors) in adj.iter().enumerate() {
        dist[u][u] = Some(0);
        for &v in neighbors {
            if v != u {
                dist[u][v] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (dist[i][k], dist[k][j]) {
                    if dist[i][j].is_none_or(|c| a + b < c) {
                        dist[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    dist
}

/// (sum of finite distances, reachable ordered pairs, max finite distance)
/// from a Floyd-Warshall table.
pub fn distance_totals(dist: &[Vec<Option<u64>>]) -> (u64, u64, u64) {
    let mut sum = 0;
    let mut pairs = 0;
    let mut diameter = 0;
    for (i, row) in dist.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            if i != j {
                if let Some(d) = *d {
                    sum += d;
                    pairs += 1;
                    diameter = diameter.max(d);
                }
            }
        }
    }
    (sum, pairs, diameter)
}

/// Boolean-matrix triplet scan: (closed triplets, connected triplets) and
/// the per-node local coefficients summed in ascending node order.
pub fn brute_clustering(simple_undirected: &MelodyNetwork) -> (u64, u64, f64) {
    let n = simple_undirected.node_count();
    let adj = simple_undirected.adjacency();
    let mut matrix = vec![vec![false; n]; n];
    for (u, neighbors) in adj.iter().enumerate() {
        for &v in neighbors {
            matrix[u][v] = true;
            matrix[v][u] = true;
        }
    }
    let mut closed = 0u64;
    let mut connected = 0u64;
    let mut local_sum = 0.0;
    for u in 0..n {
        let mut node_pairs = 0u64;
        let mut node_links = 0u64;
        for v in 0..n {
            for w in (v + 1)..n {
                if v != u && w != u && matrix[u][v] && matrix[u][w] {
                    node_pairs += 1;
                    if matrix[v][w] {
                        node_links += 1;
                    }
                }
            }
        }
        connected += node_pairs;
        closed += node_links;
        if node_pairs > 0 {
            local_sum += node_links as f64 / node_pairs as f64;
        }
    }
    (closed, connected, local_sum / n as f64)
}

/// Betweenness by exhaustive simple-path enumeration: every shortest path
/// is found explicitly and its interior nodes credited 1/sigma each.
pub fn brute_betweenness(net: &MelodyNetwork) -> BTreeMap<NodeLabel, f64> {
    let (labels, _) = net.index();
    let adj = net.adjacency();
    let n = labels.len();
    let mut scores = vec![0.0f64; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut current = vec![s];
            let mut visited = vec![false; n];
            visited[s] = true;
            enumerate_paths(&adj, t, &mut current, &mut visited, &mut paths);
            let Some(min_len) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.len() == min_len).collect();
            let sigma = shortest.len() as f64;
            for path in shortest {
                for &v in &path[1..path.len() - 1] {
                    scores[v] += 1.0 / sigma;
                }
            }
        }
    }
    labels
        .into_iter()
        .zip(scores)
        .map(|(l, s)| (l.clone(), s))
        .collect()
}

fn enumerate_paths(
    adj: &[Vec<usize>],
    target: usize,
    current: &mut Vec<usize>,
    visited: &mut [bool],
    paths: &mut Vec<Vec<usize>>,
) {
    let u = *current.last().unwrap();
    if u == target {
        paths.push(current.clone());
        return;
    }
    for &v in &adj[u] {
        if v != u && !visited[v] {
            visited[v] = true;
            current.push(v);
            enumerate_paths(adj, target, current, visited, paths);
            current.pop();
            visited[v] = false;
        }
    }
}

/// Q by the literal double sum over all ordered node pairs, with the
/// adjacency matrix convention A_ii = 2 * self-loop weight.
pub fn brute_modularity(net: &MelodyNetwork, mapping: &BTreeMap<NodeLabel, usize>) -> f64 {
    let owned;
    let undirected = if net.kind() == GraphKind::Undirected {
        net
    } else {
        owned = net.undirected_projection(true);
        &owned
    };
    let (labels, index) = undirected.index();
    let n = labels.len();
    let mut a = vec![vec![0.0f64; n]; n];
    for (u, v, w) in undirected.edges() {
        let (ui, vi, w) = (index[u], index[v], w as f64);
        if ui == vi {
            a[ui][ui] += 2.0 * w;
        } else {
            a[ui][vi] += w;
            a[vi][ui] += w;
        }
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let community: Vec<usize> = labels.iter().map(|l| mapping[*l]).collect();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if community[i] == community[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Maximum Q over every partition of the node set, enumerated as
/// restricted growth strings. Feasible up to n = 8 (4140 partitions).
pub fn exhaustive_best_q(net: &MelodyNetwork) -> f64 {
    let (labels, _) = net.index();
    let n = labels.len();
    assert!(n <= 8, "exhaustive partition search limited to 8 nodes");
    let mut assignment = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mapping: BTreeMap<NodeLabel, usize> = labels
            .iter()
            .zip(&assignment)
            .map(|(l, c)| ((*l).clone(), *c))
            .collect();
        best = best.max(brute_modularity(net, &mapping));
        // next restricted growth string: digit i may not exceed
        // max(digits before i) + 1
        let mut i = n;
        loop {
            if i == 1 {
                return best;
            }
            i -= 1;
            let cap = assignment[..i].iter().max().unwrap() + 1;
            if assignment[i] < cap {
                assignment[i] += 1;
                for d in assignment[i + 1..].iter_mut() {
                    *d = 0;
                }
                break;
            }
        }
    }
}
