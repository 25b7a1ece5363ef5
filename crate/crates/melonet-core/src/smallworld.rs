//! Small-world assessment: compare the network's clustering and average
//! distance against an ensemble of random graphs with the same node and
//! edge counts, sigma = (cc/cc_rg) / (l/l_rg).

use crate::error::{Error, Result};
use crate::graph::{GraphKind, MelodyNetwork, NodeLabel};
use crate::metrics::clustering;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::collections::VecDeque;

/// Uniform draw from G(n, m): simple undirected graphs with exactly n
/// nodes and m edges. Deterministic for a given seed.
pub fn random_graph(n: usize, m: usize, seed: u64) -> Result<MelodyNetwork> {
    let total = n.saturating_sub(1) * n / 2;
    if m > total {
        return Err(Error::domain(format!(
            "cannot place {m} edges among {n} nodes (max {total})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // virtual Fisher-Yates over pair indices: only touched slots are stored
    let mut swapped: HashMap<usize, usize> = HashMap::new();
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let j = rng.random_range(i..total);
        let picked = *swapped.get(&j).unwrap_or(&j);
        let displaced = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, displaced);
        edges.push(pair_from_index(n, picked));
    }
    let nodes = (0..n).map(node_name);
    let edge_iter = edges
        .into_iter()
        .map(|(u, v)| (node_name(u), node_name(v), 1));
    MelodyNetwork::from_edges(format!("gnm_{n}_{m}"), GraphKind::Undirected, nodes, edge_iter)
}

fn node_name(i: usize) -> NodeLabel {
    NodeLabel::new(format!("v{i:06}"))
}

/// Decode a linear index over the pairs (u, v), u < v, ordered
/// lexicographically: row u holds indices [C(u), C(u+1)) with
/// C(u) = u*(2n - u - 1)/2.
fn pair_from_index(n: usize, index: usize) -> (usize, usize) {
    let row_start = |u: usize| u * (2 * n - u - 1) / 2;
    let mut lo = 0usize;
    let mut hi = n - 1;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if row_start(mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = lo;
    let v = u + 1 + (index - row_start(u));
    (u, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallWorldResult {
    /// Average local clustering of the undirected simple projection.
    pub cc: f64,
    pub cc_rg: f64,
    /// Average distance over the largest connected component.
    pub l: f64,
    pub l_rg: f64,
    /// None when the whole ensemble has zero clustering.
    pub sigma: Option<f64>,
    pub ensemble_size: usize,
    pub seed: u64,
}

/// Average-local clustering and largest-component average distance, the
/// two ingredients of sigma, computed identically for the real network
/// and every ensemble member.
fn cc_and_l(net: &MelodyNetwork) -> (f64, f64) {
    let cc = clustering(net).avg_local;
    let adj = net.adjacency();
    let component = largest_component(&adj);
    let mut sum = 0u64;
    let mut pairs = 0u64;
    let mut dist: Vec<usize> = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &source in &component {
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
        for &target in &component {
            if target != source {
                sum += dist[target] as u64;
                pairs += 1;
            }
        }
    }
    let l = if pairs == 0 {
        0.0
    } else {
        sum as f64 / pairs as f64
    };
    (cc, l)
}

fn largest_component(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut component = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < component.len() {
            let u = component[head];
            head += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    component.push(v);
                }
            }
        }
        if component.len() > best.len() {
            best = component;
        }
    }
    best.sort_unstable();
    best
}

/// Sigma per the (cc/cc_rg)/(l/l_rg) ratio. The network is projected to a
/// simple undirected graph; each ensemble member is a G(n, m) draw with
/// the projection's node and edge counts, seeded seed + member index.
pub fn small_world_sigma(
    net: &MelodyNetwork,
    ensemble_size: usize,
    seed: u64,
) -> Result<SmallWorldResult> {
    if ensemble_size == 0 {
        return Err(Error::domain("ensemble size must be at least 1"));
    }
    let proj = net.undirected_projection(false);
    let n = proj.node_count();
    let m = proj.edge_count();
    if n < 3 || m == 0 {
        return Err(Error::domain(
            "small-world sigma needs at least 3 nodes and 1 edge",
        ));
    }
    let (cc, l) = cc_and_l(&proj);
    let mut cc_sum = 0.0;
    let mut l_sum = 0.0;
    for member in 0..ensemble_size {
        let member_seed = seed.wrapping_add(member as u64);
        let sample = random_graph(n, m, member_seed)?;
        let (sample_cc, sample_l) = cc_and_l(&sample);
        cc_sum += sample_cc;
        l_sum += sample_l;
    }
    let cc_rg = cc_sum / ensemble_size as f64;
    let l_rg = l_sum / ensemble_size as f64;
    let sigma = if cc_rg > 0.0 && l > 0.0 && l_rg > 0.0 {
        Some((cc / cc_rg) / (l / l_rg))
    } else {
        None
    };
    Ok(SmallWorldResult {
        cc,
        cc_rg,
        l,
        l_rg,
        sigma,
        ensemble_size,
        seed,
    })
}
