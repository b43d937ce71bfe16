//! Edge-rank predictor: edge features from node embeddings, two rounds of
//! edge/node message passing over the complete graph, and a rank head.
//!
//! Inference only. Batch normalization uses stored running statistics and
//! dropout is the identity. Weights are held as `f32` tensors (the container
//! type) and evaluated in `f64`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::ScoreMatrix;
use crate::io::tensor::TensorSet;

pub const BATCH_NORM_EPS: f64 = 1e-5;
pub const NUM_ROUNDS: usize = 2;

/// Per-image descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEmbedding(pub Vec<f64>);

impl NodeEmbedding {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl From<Vec<f64>> for NodeEmbedding {
    fn from(v: Vec<f64>) -> Self {
        NodeEmbedding(v)
    }
}

pub fn cosine_similarity(a: &NodeEmbedding, b: &NodeEmbedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::argument(format!("embedding dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::argument("cosine similarity of a zero-norm vector"));
    }
    Ok(cosine_unchecked(&a.0, &b.0, na, nb))
}

fn cosine_unchecked(a: &[f64], b: &[f64], na: f64, nb: f64) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Layer widths. The embedding width `d` is preserved across rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GnnConfig {
    pub embed_dim: usize,
    pub edge_dim: usize,
    pub head_hidden: usize,
}

impl Default for GnnConfig {
    fn default() -> Self {
        GnnConfig {
            embed_dim: 32,
            edge_dim: 64,
            head_hidden: 32,
        }
    }
}

#[derive(Debug, Clone)]
struct Linear {
    in_dim: usize,
    // Row-major `out_dim x in_dim`.
    weight: Vec<f64>,
    bias: Vec<f64>,
}

impl Linear {
    fn forward_into(&self, x: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(x.len(), self.in_dim);
        out.clear();
        out.extend(self.weight.chunks_exact(self.in_dim).zip(&self.bias).map(|(row, b)| {
            b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
        }));
    }
}

#[derive(Debug, Clone)]
struct BatchNorm {
    scale: Vec<f64>,
    shift: Vec<f64>,
}

impl BatchNorm {
    fn new(mean: &[f64], var: &[f64], gamma: &[f64], beta: &[f64]) -> Self {
        let scale: Vec<f64> = var
            .iter()
            .zip(gamma)
            .map(|(v, g)| g / (v + BATCH_NORM_EPS).sqrt())
            .collect();
        let shift = mean.iter().zip(beta).zip(&scale).map(|((m, b), s)| b - m * s).collect();
        BatchNorm { scale, shift }
    }

    fn apply_relu(&self, x: &mut [f64]) {
        for ((v, s), t) in x.iter_mut().zip(&self.scale).zip(&self.shift) {
            *v = (*v * s + t).max(0.0);
        }
    }
}

/// `Linear -> BatchNorm -> ReLU -> Linear -> BatchNorm -> ReLU`.
#[derive(Debug, Clone)]
struct Mlp2 {
    fc0: Linear,
    bn0: BatchNorm,
    fc1: Linear,
    bn1: BatchNorm,
}

impl Mlp2 {
    fn forward(&self, x: &[f64], hidden: &mut Vec<f64>, out: &mut Vec<f64>) {
        self.fc0.forward_into(x, hidden);
        self.bn0.apply_relu(hidden);
        self.fc1.forward_into(hidden, out);
        self.bn1.apply_relu(out);
    }
}

#[derive(Debug, Clone)]
struct RoundLayers {
    edge: Mlp2,
    msg: Mlp2,
    update: Mlp2,
}

/// All learned parameters of the predictor.
///
/// Tensor names follow `init.*`, `round{1,2}.{edge,msg,update}.{fc,bn}{0,1}.*`
/// and `head.fc{0,1}.*`; see [`GnnWeights::expected_shapes`].
#[derive(Debug, Clone)]
pub struct GnnWeights {
    config: GnnConfig,
    tensors: TensorSet,
    init: Linear,
    rounds: Vec<RoundLayers>,
    head0: Linear,
    head1: Linear,
}

const MLP_BLOCKS: [&str; 3] = ["edge", "msg", "update"];

impl GnnWeights {
    /// Every tensor the predictor needs, with its shape, in manifest order.
    pub fn expected_shapes(config: &GnnConfig) -> Vec<(String, Vec<usize>)> {
        let (d, dl, h) = (config.embed_dim, config.edge_dim, config.head_hidden);
        let mut out = vec![
            ("init.weight".to_owned(), vec![dl, 2 * d + 1]),
            ("init.bias".to_owned(), vec![dl]),
        ];
        for r in 1..=NUM_ROUNDS {
            for block in MLP_BLOCKS {
                let (input, hidden, output) = match block {
                    "edge" => (dl + 2 * d, dl, dl),
                    "msg" => (dl + d, d, d),
                    _ => (2 * d, d, d),
                };
                for (k, (i, o)) in [(input, hidden), (hidden, output)].into_iter().enumerate() {
                    let p = format!("round{r}.{block}");
                    out.push((format!("{p}.fc{k}.weight"), vec![o, i]));
                    out.push((format!("{p}.fc{k}.bias"), vec![o]));
                    for stat in ["mean", "var", "gamma", "beta"] {
                        out.push((format!("{p}.bn{k}.{stat}"), vec![o]));
                    }
                }
            }
        }
        out.push(("head.fc0.weight".to_owned(), vec![h, dl]));
        out.push(("head.fc0.bias".to_owned(), vec![h]));
        out.push(("head.fc1.weight".to_owned(), vec![1, h]));
        out.push(("head.fc1.bias".to_owned(), vec![1]));
        out
    }

    /// Validates a tensor set against the layer arithmetic and builds the layers.
    /// Widths are inferred from `init.weight` and `head.fc0.weight`.
    pub fn from_tensors(tensors: TensorSet) -> Result<Self> {
        let fetch = |name: &str| {
            tensors
                .get(name)
                .ok_or_else(|| Error::format(name, "missing tensor"))
        };
        let init_w = fetch("init.weight")?;
        let head_w = fetch("head.fc0.weight")?;
        if init_w.shape.len() != 2 || head_w.shape.len() != 2 {
            return Err(Error::format("init.weight", "expected a 2-D weight"));
        }
        let in_dim = init_w.shape[1];
        if in_dim < 3 || in_dim % 2 == 0 {
            return Err(Error::format("init.weight", format!("input width {in_dim} is not 2d+1")));
        }
        let config = GnnConfig {
            embed_dim: (in_dim - 1) / 2,
            edge_dim: init_w.shape[0],
            head_hidden: head_w.shape[0],
        };
        for (name, shape) in Self::expected_shapes(&config) {
            let t = fetch(&name)?;
            if t.shape != shape {
                return Err(Error::format(
                    name,
                    format!("shape {:?} does not match expected {:?}", t.shape, shape),
                ));
            }
            if let Some(bad) = t.data.iter().find(|v| !v.is_finite()) {
                return Err(Error::format(name, format!("non-finite value {bad}")));
            }
        }
        for t in tensors.iter().filter(|t| t.name.ends_with(".var")) {
            if let Some(v) = t.data.iter().find(|v| **v < 0.0) {
                return Err(Error::format(&t.name, format!("negative running variance {v}")));
            }
        }

        let vec64 = |name: &str| -> Vec<f64> {
            tensors.get(name).map(|t| t.data.iter().map(|&v| v as f64).collect()).unwrap_or_default()
        };
        let linear = |prefix: &str| {
            let w = tensors.get(&format!("{prefix}.weight")).expect("validated");
            Linear {
                in_dim: w.shape[1],
                weight: w.data.iter().map(|&v| v as f64).collect(),
                bias: vec64(&format!("{prefix}.bias")),
            }
        };
        let bn = |prefix: &str| {
            BatchNorm::new(
                &vec64(&format!("{prefix}.mean")),
                &vec64(&format!("{prefix}.var")),
                &vec64(&format!("{prefix}.gamma")),
                &vec64(&format!("{prefix}.beta")),
            )
        };
        let mlp = |prefix: &str| Mlp2 {
            fc0: linear(&format!("{prefix}.fc0")),
            bn0: bn(&format!("{prefix}.bn0")),
            fc1: linear(&format!("{prefix}.fc1")),
            bn1: bn(&format!("{prefix}.bn1")),
        };
        let rounds = (1..=NUM_ROUNDS)
            .map(|r| RoundLayers {
                edge: mlp(&format!("round{r}.edge")),
                msg: mlp(&format!("round{r}.msg")),
                update: mlp(&format!("round{r}.update")),
            })
            .collect();
        Ok(GnnWeights {
            config,
            init: linear("init"),
            rounds,
            head0: linear("head.fc0"),
            head1: linear("head.fc1"),
            tensors,
        })
    }

    /// Deterministic random initialization, used for fixtures and smoke runs.
    pub fn random(config: GnnConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = TensorSet::new();
        for (name, shape) in Self::expected_shapes(&config) {
            let n: usize = shape.iter().product();
            let data: Vec<f32> = if name.ends_with(".weight") {
                let bound = (6.0 / (shape[0] + shape[1]) as f64).sqrt();
                (0..n).map(|_| rng.random_range(-bound..bound) as f32).collect()
            } else if name.ends_with(".var") || name.ends_with(".gamma") {
                (0..n).map(|_| rng.random_range(0.5..1.5) as f32).collect()
            } else if name.ends_with(".mean") {
                (0..n).map(|_| rng.random_range(-0.05..0.05) as f32).collect()
            } else {
                (0..n).map(|_| rng.random_range(-0.1..0.1) as f32).collect()
            };
            set.push(name, shape, data)?;
        }
        GnnWeights::from_tensors(set)
    }

    pub fn config(&self) -> GnnConfig {
        self.config
    }

    pub fn tensors(&self) -> &TensorSet {
        &self.tensors
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.tensors.write(path)
    }
}

/// Reads and validates a weight container.
pub fn load_weights(path: &Path) -> Result<GnnWeights> {
    GnnWeights::from_tensors(TensorSet::read(path)?)
}

/// One feature vector per ordered pair `(i, j)`, `i != j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFeatures {
    num_nodes: usize,
    dim: usize,
    // `num_nodes * num_nodes` slots; diagonal slots stay zero and are never read.
    data: Vec<f64>,
}

impl EdgeFeatures {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of directed edges, `N (N - 1)`.
    pub fn len(&self) -> usize {
        self.num_nodes * self.num_nodes.saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&[f64]> {
        if i == j || i >= self.num_nodes || j >= self.num_nodes {
            return None;
        }
        let start = (i * self.num_nodes + j) * self.dim;
        Some(&self.data[start..start + self.dim])
    }

    fn row_mut_chunks(&mut self) -> impl IndexedParallelIterator<Item = &mut [f64]> {
        self.data.par_chunks_mut((self.num_nodes * self.dim).max(1))
    }
}

fn check_nodes(nodes: &[NodeEmbedding], weights: &GnnWeights) -> Result<()> {
    let d = weights.config.embed_dim;
    if let Some((i, n)) = nodes.iter().enumerate().find(|(_, n)| n.dim() != d) {
        return Err(Error::weight(format!(
            "embedding {i} has dimension {}, weights expect {d}",
            n.dim()
        )));
    }
    if let Some(i) = nodes.iter().position(|n| n.0.iter().any(|v| !v.is_finite())) {
        return Err(Error::argument(format!("embedding {i} has non-finite entries")));
    }
    Ok(())
}

/// `e_ij = ReLU(W [d_i, d_j, cos(d_i, d_j)] + b)` for every ordered pair.
///
/// A zero-norm embedding contributes a cosine of 0.
pub fn init_edge_features(nodes: &[NodeEmbedding], weights: &GnnWeights) -> Result<EdgeFeatures> {
    check_nodes(nodes, weights)?;
    let n = nodes.len();
    let dl = weights.config.edge_dim;
    let norms: Vec<f64> = nodes.iter().map(NodeEmbedding::norm).collect();
    let mut features = EdgeFeatures {
        num_nodes: n,
        dim: dl,
        data: vec![0.0; n * n * dl],
    };
    features.row_mut_chunks().enumerate().for_each(|(i, row)| {
        let mut input = Vec::with_capacity(weights.init.in_dim);
        let mut out = Vec::with_capacity(dl);
        for (j, slot) in row.chunks_exact_mut(dl).enumerate() {
            if i == j {
                continue;
            }
            let cos = if norms[i] == 0.0 || norms[j] == 0.0 {
                0.0
            } else {
                cosine_unchecked(&nodes[i].0, &nodes[j].0, norms[i], norms[j])
            };
            input.clear();
            input.extend_from_slice(&nodes[i].0);
            input.extend_from_slice(&nodes[j].0);
            input.push(cos);
            weights.init.forward_into(&input, &mut out);
            for (s, v) in slot.iter_mut().zip(&out) {
                *s = v.max(0.0);
            }
        }
    });
    Ok(features)
}

/// One round of edge/node message passing (`round_index` is 1 or 2).
///
/// Edges are refreshed first, `e'_ij = f_edge([e_ij, d_i, d_j])`; node `i` then
/// receives `m_ji = f_msg([e'_ij, d_j])` from every `j != i`, the sum is divided
/// by the total node count `N`, and `d'_i = f_update([d_i, m_i])`.
pub fn message_pass_round(
    nodes: &[NodeEmbedding],
    edges: &EdgeFeatures,
    weights: &GnnWeights,
    round_index: usize,
) -> Result<(EdgeFeatures, Vec<NodeEmbedding>)> {
    if !(1..=NUM_ROUNDS).contains(&round_index) {
        return Err(Error::argument(format!("round index {round_index} not in 1..={NUM_ROUNDS}")));
    }
    check_nodes(nodes, weights)?;
    let n = nodes.len();
    if edges.num_nodes != n || edges.dim != weights.config.edge_dim {
        return Err(Error::weight(format!(
            "edge features ({} nodes, width {}) do not match {} nodes, width {}",
            edges.num_nodes, edges.dim, n, weights.config.edge_dim
        )));
    }
    let layers = &weights.rounds[round_index - 1];
    let (d, dl) = (weights.config.embed_dim, weights.config.edge_dim);

    let mut new_edges = EdgeFeatures {
        num_nodes: n,
        dim: dl,
        data: vec![0.0; n * n * dl],
    };
    let mut messages = vec![0.0; n * d];
    new_edges
        .row_mut_chunks()
        .zip(messages.par_chunks_mut(d.max(1)))
        .enumerate()
        .for_each(|(i, (row, msg_sum))| {
            let mut input = Vec::with_capacity(dl + 2 * d);
            let (mut hidden, mut out, mut msg) = (Vec::new(), Vec::new(), Vec::new());
            for (j, slot) in row.chunks_exact_mut(dl).enumerate() {
                if i == j {
                    continue;
                }
                input.clear();
                input.extend_from_slice(edges.get(i, j).expect("off-diagonal"));
                input.extend_from_slice(&nodes[i].0);
                input.extend_from_slice(&nodes[j].0);
                layers.edge.forward(&input, &mut hidden, &mut out);
                slot.copy_from_slice(&out);

                input.clear();
                input.extend_from_slice(&out);
                input.extend_from_slice(&nodes[j].0);
                layers.msg.forward(&input, &mut hidden, &mut msg);
                for (s, m) in msg_sum.iter_mut().zip(&msg) {
                    *s += m;
                }
            }
        });

    let new_nodes = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut input = Vec::with_capacity(2 * d);
            input.extend_from_slice(&nodes[i].0);
            input.extend(messages[i * d..(i + 1) * d].iter().map(|m| m / n as f64));
            let (mut hidden, mut out) = (Vec::new(), Vec::new());
            layers.update.forward(&input, &mut hidden, &mut out);
            NodeEmbedding(out)
        })
        .collect();
    Ok((new_edges, new_nodes))
}

#[inline]
fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Predicted ranks for every pair.
#[derive(Debug, Clone)]
pub struct EdgeRankPrediction {
    /// Symmetrized ranks, `(r_ij + r_ji) / 2`.
    pub ranks: ScoreMatrix,
    num_nodes: usize,
    directed: Vec<f64>,
}

impl EdgeRankPrediction {
    /// Rank of the directed edge `(i, j)` before symmetrization.
    pub fn directed(&self, i: usize, j: usize) -> Option<f64> {
        (i != j && i < self.num_nodes && j < self.num_nodes).then(|| self.directed[i * self.num_nodes + j])
    }
}

/// Full forward pass: init, both rounds, then `logistic(head(e_ij))`.
pub fn predict_edge_ranks(nodes: &[NodeEmbedding], weights: &GnnWeights) -> Result<EdgeRankPrediction> {
    let n = nodes.len();
    if n < 2 {
        return Err(Error::argument(format!("need at least 2 images, got {n}")));
    }
    let mut edges = init_edge_features(nodes, weights)?;
    let mut current = nodes.to_vec();
    for round in 1..=NUM_ROUNDS {
        let (e, d) = message_pass_round(&current, &edges, weights, round)?;
        edges = e;
        current = d;
    }

    let mut directed = vec![0.0; n * n];
    directed.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let (mut hidden, mut out) = (Vec::new(), Vec::new());
        for (j, r) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            weights.head0.forward_into(edges.get(i, j).expect("off-diagonal"), &mut hidden);
            for h in hidden.iter_mut() {
                *h = h.max(0.0);
            }
            weights.head1.forward_into(&hidden, &mut out);
            *r = logistic(out[0]);
        }
    });

    let ranks = ScoreMatrix::from_fn(n, |i, j| Some(0.5 * (directed[i * n + j] + directed[j * n + i])))?;
    Ok(EdgeRankPrediction {
        ranks,
        num_nodes: n,
        directed,
    })
}
