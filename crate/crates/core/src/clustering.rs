//! Splitting large collections into overlapping subgraphs.
//!
//! Collections above [`CLUSTERING_THRESHOLD`] images are partitioned into
//! balanced clusters by similarity, each cluster is grown by its 1-hop
//! neighbors in a top-k candidate graph, ranks are predicted per cluster, and
//! pairs covered by several clusters are averaged.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gnn::{predict_edge_ranks, GnnWeights, NodeEmbedding};
use crate::graph::{ImageGraph, ScoreMatrix};
use crate::selection::knn_select;

/// Collections with at most this many images are never split.
pub const CLUSTERING_THRESHOLD: usize = 500;

/// `1 + floor(n / n_max)`, or 1 when `n` does not exceed [`CLUSTERING_THRESHOLD`].
pub fn num_clusters(n: usize, n_max: usize) -> Result<usize> {
    if n == 0 || n_max == 0 {
        return Err(Error::argument(format!("num_clusters needs n >= 1 and n_max >= 1, got {n} and {n_max}")));
    }
    Ok(if n <= CLUSTERING_THRESHOLD { 1 } else { 1 + n / n_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionConfig {
    /// Largest allowed cluster, as a multiple of `N / n_clusters`.
    pub imbalance: f64,
    pub seed: u64,
    pub restarts: usize,
    pub max_passes: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            imbalance: 1.2,
            seed: 0,
            restarts: 4,
            max_passes: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    num_clusters: usize,
    assignment: Vec<usize>,
    expanded: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from a cluster id per node; ids must cover `0..num_clusters`.
    pub fn from_assignment(assignment: Vec<usize>, num_clusters: usize) -> Result<Self> {
        let mut members = vec![Vec::new(); num_clusters];
        for (node, &c) in assignment.iter().enumerate() {
            let slot = members
                .get_mut(c)
                .ok_or_else(|| Error::argument(format!("node {node} assigned to cluster {c} of {num_clusters}")))?;
            slot.push(node);
        }
        if let Some(c) = members.iter().position(Vec::is_empty) {
            return Err(Error::argument(format!("cluster {c} is empty")));
        }
        Ok(Partition {
            num_clusters,
            assignment,
            expanded: members,
        })
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn num_nodes(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == cluster).collect()
    }

    /// Sorted node set of a cluster after expansion (the base set before it).
    pub fn expanded_members(&self, cluster: usize) -> &[usize] {
        &self.expanded[cluster]
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Total similarity of pairs split across clusters; masked entries count as 0.
    pub fn cut_weight(&self, similarity: &ScoreMatrix) -> f64 {
        similarity
            .upper_triangle()
            .filter(|&(i, j, _)| self.assignment[i] != self.assignment[j])
            .filter_map(|(_, _, s)| s)
            .sum()
    }
}

fn dense_similarity(similarity: &ScoreMatrix) -> Vec<f64> {
    let n = similarity.size();
    let mut dense = vec![0.0; n * n];
    for (i, j, s) in similarity.upper_triangle() {
        let s = s.unwrap_or(0.0);
        dense[i * n + j] = s;
        dense[j * n + i] = s;
    }
    dense
}

struct Refiner<'a> {
    n: usize,
    k: usize,
    sim: &'a [f64],
    assignment: Vec<usize>,
    sizes: Vec<usize>,
    /// `conn[i * k + c]`: similarity from node `i` to the members of cluster `c`.
    conn: Vec<f64>,
}

const GAIN_EPS: f64 = 1e-12;

impl<'a> Refiner<'a> {
    fn new(n: usize, k: usize, sim: &'a [f64]) -> Self {
        Refiner {
            n,
            k,
            sim,
            assignment: vec![usize::MAX; n],
            sizes: vec![0; k],
            conn: vec![0.0; n * k],
        }
    }

    fn place(&mut self, node: usize, cluster: usize) {
        let old = self.assignment[node];
        for j in 0..self.n {
            let s = self.sim[j * self.n + node];
            if j != node && s != 0.0 {
                if old != usize::MAX {
                    self.conn[j * self.k + old] -= s;
                }
                self.conn[j * self.k + cluster] += s;
            }
        }
        if old != usize::MAX {
            self.sizes[old] -= 1;
        }
        self.assignment[node] = cluster;
        self.sizes[cluster] += 1;
    }

    fn grow(&mut self, rng: &mut ChaCha8Rng, target: usize) {
        let mut seeds = vec![rng.random_range(0..self.n)];
        while seeds.len() < self.k {
            // Next seed: the node least similar to every existing seed.
            let next = (0..self.n)
                .filter(|i| !seeds.contains(i))
                .map(|i| {
                    let closeness = seeds.iter().map(|&s| self.sim[i * self.n + s]).fold(f64::NEG_INFINITY, f64::max);
                    (closeness, i)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, i)| i)
                .expect("k <= n leaves a candidate seed");
            seeds.push(next);
        }
        for (c, &s) in seeds.iter().enumerate() {
            self.place(s, c);
        }
        for _ in self.k..self.n {
            let cluster = (0..self.k)
                .filter(|&c| self.sizes[c] < target)
                .min_by_key(|&c| (self.sizes[c], c))
                .expect("targets cover all nodes");
            let node = (0..self.n)
                .filter(|&i| self.assignment[i] == usize::MAX)
                .max_by(|&a, &b| {
                    self.conn[a * self.k + cluster]
                        .total_cmp(&self.conn[b * self.k + cluster])
                        .then(b.cmp(&a))
                })
                .expect("an unassigned node remains");
            self.place(node, cluster);
        }
    }

    fn move_pass(&mut self, cap: usize) -> bool {
        let mut improved = false;
        for i in 0..self.n {
            let src = self.assignment[i];
            if self.sizes[src] <= 1 {
                continue;
            }
            let base = self.conn[i * self.k + src];
            let best = (0..self.k)
                .filter(|&c| c != src && self.sizes[c] < cap)
                .map(|c| (self.conn[i * self.k + c] - base, c))
                .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
            if let Some((gain, c)) = best {
                if gain > GAIN_EPS {
                    self.place(i, c);
                    improved = true;
                }
            }
        }
        improved
    }

    fn swap_pass(&mut self) -> bool {
        let mut improved = false;
        for u in 0..self.n {
            let a = self.assignment[u];
            let mut best: Option<(f64, usize)> = None;
            for v in 0..self.n {
                let b = self.assignment[v];
                if b == a {
                    continue;
                }
                let gain = self.conn[u * self.k + b] - self.conn[u * self.k + a] + self.conn[v * self.k + a]
                    - self.conn[v * self.k + b]
                    - 2.0 * self.sim[u * self.n + v];
                if gain > GAIN_EPS && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, v));
                }
            }
            if let Some((_, v)) = best {
                let b = self.assignment[v];
                self.place(u, b);
                self.place(v, a);
                improved = true;
            }
        }
        improved
    }

    fn cut(&self) -> f64 {
        let mut cut = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.assignment[i] != self.assignment[j] {
                    cut += self.sim[i * self.n + j];
                }
            }
        }
        cut
    }
}

/// Renumbers clusters in order of their smallest member.
fn canonical_labels(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    assignment
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect()
}

/// Balanced partition minimizing the similarity cut between clusters.
pub fn partition_graph(similarity: &ScoreMatrix, n_clusters: usize, config: &PartitionConfig) -> Result<Partition> {
    let n = similarity.size();
    if n_clusters == 0 || n_clusters > n {
        return Err(Error::argument(format!("cannot split {n} nodes into {n_clusters} clusters")));
    }
    if !(config.imbalance >= 1.0) {
        return Err(Error::argument(format!("imbalance factor {} must be at least 1", config.imbalance)));
    }
    if n_clusters == 1 {
        return Partition::from_assignment(vec![0; n], 1);
    }
    let target = n.div_ceil(n_clusters);
    let cap = ((config.imbalance * n as f64 / n_clusters as f64 + 1e-9).floor() as usize).max(target);
    let sim = dense_similarity(similarity);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..config.restarts.max(1) {
        let mut refiner = Refiner::new(n, n_clusters, &sim);
        refiner.grow(&mut rng, target);
        for _ in 0..config.max_passes {
            let moved = refiner.move_pass(cap);
            let swapped = refiner.swap_pass();
            if !moved && !swapped {
                break;
            }
        }
        let cut = refiner.cut();
        if best.as_ref().is_none_or(|(c, _)| cut < *c - GAIN_EPS) {
            best = Some((cut, refiner.assignment));
        }
    }
    let (_, assignment) = best.expect("at least one restart");
    Partition::from_assignment(canonical_labels(&assignment, n_clusters), n_clusters)
}

/// Adds every candidate-graph neighbor of each cluster's base set.
pub fn expand_one_hop(partition: &Partition, graph: &ImageGraph) -> Result<Partition> {
    if graph.num_nodes() != partition.num_nodes() {
        return Err(Error::argument(format!(
            "candidate graph has {} nodes but the partition has {}",
            graph.num_nodes(),
            partition.num_nodes()
        )));
    }
    let adjacency = graph.adjacency();
    let expanded = (0..partition.num_clusters)
        .map(|c| {
            let mut set: BTreeSet<usize> = partition.members(c).into_iter().collect();
            for i in partition.members(c) {
                set.extend(adjacency[i].iter().copied());
            }
            set.into_iter().collect()
        })
        .collect();
    Ok(Partition {
        num_clusters: partition.num_clusters,
        assignment: partition.assignment.clone(),
        expanded,
    })
}

/// Ranks predicted on one subgraph; `scores` is indexed locally, so local
/// index `a` refers to global node `nodes[a]`.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub nodes: Vec<usize>,
    pub scores: ScoreMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergedPrediction {
    pub scores: ScoreMatrix,
    counts: Vec<u32>,
}

impl MergedPrediction {
    /// Number of fragments that contributed to the pair.
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.scores.size() + j]
    }
}

/// Averages overlapping fragments; pairs no fragment covers stay masked.
/// Contributions are summed in a canonical order so the result does not
/// depend on fragment order.
pub fn merge_predictions(num_nodes: usize, fragments: &[Fragment]) -> Result<MergedPrediction> {
    let mut contributions: Vec<(usize, usize, f64)> = Vec::new();
    for (f, fragment) in fragments.iter().enumerate() {
        if fragment.scores.size() != fragment.nodes.len() {
            return Err(Error::format(
                format!("fragment {f}"),
                format!("{} nodes but a {}x{} score matrix", fragment.nodes.len(), fragment.scores.size(), fragment.scores.size()),
            ));
        }
        let mut seen = BTreeSet::new();
        for &g in &fragment.nodes {
            if g >= num_nodes {
                return Err(Error::format(format!("fragment {f}"), format!("node {g} outside manifest of {num_nodes}")));
            }
            if !seen.insert(g) {
                return Err(Error::format(format!("fragment {f}"), format!("node {g} listed twice")));
            }
        }
        for (a, b, s) in fragment.scores.upper_triangle() {
            if let Some(s) = s {
                let (i, j) = crate::graph::canonical(fragment.nodes[a], fragment.nodes[b]);
                contributions.push((i, j, s));
            }
        }
    }
    contributions.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));

    let mut scores = ScoreMatrix::masked(num_nodes);
    let mut counts = vec![0u32; num_nodes * num_nodes];
    for group in contributions.chunk_by(|x, y| (x.0, x.1) == (y.0, y.1)) {
        let (i, j, _) = group[0];
        let sum: f64 = group.iter().map(|c| c.2).sum();
        scores.set(i, j, (sum / group.len() as f64).clamp(0.0, 1.0))?;
        counts[i * num_nodes + j] = group.len() as u32;
        counts[j * num_nodes + i] = group.len() as u32;
    }
    Ok(MergedPrediction { scores, counts })
}

/// Cosine similarity of embeddings mapped to `[0, 1]`; zero-norm embeddings get 0.5.
pub fn embedding_similarity(nodes: &[NodeEmbedding]) -> Result<ScoreMatrix> {
    let dim = nodes.first().map_or(0, NodeEmbedding::dim);
    if let Some(bad) = nodes.iter().position(|e| e.dim() != dim) {
        return Err(Error::argument(format!("embedding {bad} has dimension {}, expected {dim}", nodes[bad].dim())));
    }
    let norms: Vec<f64> = nodes.iter().map(NodeEmbedding::norm).collect();
    ScoreMatrix::from_fn(nodes.len(), |i, j| {
        let dot: f64 = nodes[i].0.iter().zip(&nodes[j].0).map(|(a, b)| a * b).sum();
        let cos = if norms[i] == 0.0 || norms[j] == 0.0 { 0.0 } else { dot / (norms[i] * norms[j]) };
        Some((0.5 * (1.0 + cos)).clamp(0.0, 1.0))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusteringConfig {
    pub n_max: usize,
    /// Neighbors per node in the candidate graph used for expansion.
    pub candidate_k: usize,
    pub partition: PartitionConfig,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            n_max: 500,
            candidate_k: 10,
            partition: PartitionConfig::default(),
        }
    }
}

/// Partition into `k` clusters, each expanded by its neighbors in the top-k candidate graph.
pub fn partition_and_expand(similarity: &ScoreMatrix, k: usize, config: &ClusteringConfig) -> Result<Partition> {
    let base = partition_graph(similarity, k, &config.partition)?;
    let n = similarity.size();
    if k == 1 || n < 2 {
        return Ok(base);
    }
    let candidates = knn_select(similarity, config.candidate_k.clamp(1, n - 1))?;
    expand_one_hop(&base, &candidates)
}

/// Partition of a collection sized by [`num_clusters`], ready for per-cluster prediction.
pub fn plan_clusters(nodes: &[NodeEmbedding], config: &ClusteringConfig) -> Result<Partition> {
    let k = num_clusters(nodes.len(), config.n_max)?;
    partition_and_expand(&embedding_similarity(nodes)?, k, config)
}

#[derive(Debug, Clone)]
pub struct ClusteredRanks {
    pub merged: MergedPrediction,
    pub partition: Partition,
}

/// Edge ranks for a collection of any size: direct prediction at or below the
/// threshold, otherwise per expanded cluster followed by a merge.
pub fn predict_ranks_clustered(
    nodes: &[NodeEmbedding],
    weights: &GnnWeights,
    config: &ClusteringConfig,
) -> Result<ClusteredRanks> {
    let partition = plan_clusters(nodes, config)?;
    let mut fragments = Vec::with_capacity(partition.num_clusters());
    for c in 0..partition.num_clusters() {
        let members = partition.expanded_members(c).to_vec();
        if members.len() < 2 {
            continue;
        }
        let sub: Vec<NodeEmbedding> = members.iter().map(|&i| nodes[i].clone()).collect();
        let prediction = predict_edge_ranks(&sub, weights)?;
        fragments.push(Fragment {
            nodes: members,
            scores: prediction.ranks,
        });
    }
    let merged = merge_predictions(nodes.len(), &fragments)?;
    Ok(ClusteredRanks { merged, partition })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub size: usize,
    pub expanded_size: usize,
    pub members: Vec<String>,
    pub expanded: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub num_images: usize,
    pub num_clusters: usize,
    pub assignment: Vec<(String, usize)>,
    pub clusters: Vec<ClusterEntry>,
    pub cut_weight: f64,
    pub total_weight: f64,
    /// Largest base cluster divided by `N / num_clusters`.
    pub max_imbalance: f64,
}

impl PartitionReport {
    pub fn new(partition: &Partition, similarity: &ScoreMatrix, names: &[String]) -> Result<Self> {
        let n = partition.num_nodes();
        if names.len() != n || similarity.size() != n {
            return Err(Error::argument(format!(
                "partition has {n} nodes, manifest {} names, similarity size {}",
                names.len(),
                similarity.size()
            )));
        }
        let sizes = partition.cluster_sizes();
        let clusters = (0..partition.num_clusters())
            .map(|c| ClusterEntry {
                id: c,
                size: sizes[c],
                expanded_size: partition.expanded_members(c).len(),
                members: partition.members(c).iter().map(|&i| names[i].clone()).collect(),
                expanded: partition.expanded_members(c).iter().map(|&i| names[i].clone()).collect(),
            })
            .collect();
        let mean = n as f64 / partition.num_clusters() as f64;
        Ok(PartitionReport {
            num_images: n,
            num_clusters: partition.num_clusters(),
            assignment: names.iter().cloned().zip(partition.assignment().iter().copied()).collect(),
            clusters,
            cut_weight: partition.cut_weight(similarity),
            total_weight: similarity.upper_triangle().filter_map(|(_, _, s)| s).sum(),
            max_imbalance: sizes.iter().copied().max().unwrap_or(0) as f64 / mean,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
