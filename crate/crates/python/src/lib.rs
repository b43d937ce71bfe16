//! Python bindings for the `posegraph` library.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;

use posegraph::clustering::{self, PartitionConfig};
use posegraph::gnn::{self, GnnConfig, NodeEmbedding};
use posegraph::graph::{self, ImageGraph};
use posegraph::io::matrix::MatrixFile;
use posegraph::metrics::{self, RankedList};
use posegraph::oracle::{self, Layout, NoiseConfig, NormalizationConfig, OracleConfig};
use posegraph::selection;

fn to_py(e: posegraph::Error) -> PyErr {
    match e {
        posegraph::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Symmetric matrix of pair scores in [0, 1]; `None` marks a masked pair.
#[pyclass(name = "ScoreMatrix", module = "posegraph_py", skip_from_py_object)]
#[derive(Clone)]
struct PyScoreMatrix {
    inner: graph::ScoreMatrix,
}

#[pymethods]
impl PyScoreMatrix {
    /// Builds a matrix from square rows; diagonal entries are ignored.
    #[new]
    fn new(rows: Vec<Vec<Option<f64>>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("rows must form a square matrix"));
        }
        for i in 0..n {
            for j in i + 1..n {
                let same = match (rows[i][j], rows[j][i]) {
                    (Some(a), Some(b)) => a == b,
                    (None, None) => true,
                    _ => false,
                };
                if !same {
                    return Err(PyValueError::new_err(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let inner = graph::ScoreMatrix::from_fn(n, |i, j| rows[i][j]).map_err(to_py)?;
        Ok(PyScoreMatrix { inner })
    }

    #[staticmethod]
    fn masked(size: usize) -> Self {
        PyScoreMatrix {
            inner: graph::ScoreMatrix::masked(size),
        }
    }

    /// Reads a matrix file; returns `(matrix, names)`.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<(Self, Vec<String>)> {
        let file = MatrixFile::read(&path).map_err(to_py)?;
        Ok((PyScoreMatrix { inner: file.scores }, file.names))
    }

    fn save(&self, path: PathBuf, names: Vec<String>) -> PyResult<()> {
        MatrixFile::new(names, self.inner.clone())
            .and_then(|f| f.write(&path))
            .map_err(to_py)
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<Option<f64>> {
        self.check(i, j)?;
        Ok(self.inner.get(i, j))
    }

    fn set(&mut self, i: usize, j: usize, value: f64) -> PyResult<()> {
        self.check(i, j)?;
        self.inner.set(i, j, value).map_err(to_py)
    }

    fn mask(&mut self, i: usize, j: usize) -> PyResult<()> {
        self.check(i, j)?;
        self.inner.mask(i, j);
        Ok(())
    }

    fn to_rows(&self) -> Vec<Vec<Option<f64>>> {
        let n = self.inner.size();
        (0..n).map(|i| (0..n).map(|j| if i == j { None } else { self.inner.get(i, j) }).collect()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __repr__(&self) -> String {
        format!("ScoreMatrix(size={})", self.inner.size())
    }
}

impl PyScoreMatrix {
    fn check(&self, i: usize, j: usize) -> PyResult<()> {
        let n = self.inner.size();
        if i >= n || j >= n {
            return Err(PyIndexError::new_err(format!("index ({i}, {j}) out of range for size {n}")));
        }
        Ok(())
    }
}

/// Parameters of the multi-tree selection.
#[pyclass(name = "SelectionConfig", module = "posegraph_py", get_all, set_all, from_py_object)]
#[derive(Clone)]
struct PySelectionConfig {
    num_trees: usize,
    lam: f64,
    top_candidates: usize,
    rank_threshold: f64,
    thresholding: bool,
    modulation: bool,
    distance_normalization: bool,
    exchange_repair: bool,
}

#[pymethods]
impl PySelectionConfig {
    #[new]
    #[pyo3(signature = (num_trees=1, lam=0.5, top_candidates=5, rank_threshold=0.9, thresholding=true, modulation=true, distance_normalization=true, exchange_repair=true))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        num_trees: usize,
        lam: f64,
        top_candidates: usize,
        rank_threshold: f64,
        thresholding: bool,
        modulation: bool,
        distance_normalization: bool,
        exchange_repair: bool,
    ) -> Self {
        PySelectionConfig {
            num_trees,
            lam,
            top_candidates,
            rank_threshold,
            thresholding,
            modulation,
            distance_normalization,
            exchange_repair,
        }
    }
}

impl PySelectionConfig {
    fn to_core(&self) -> selection::SelectionConfig {
        selection::SelectionConfig {
            num_trees: self.num_trees,
            lambda: self.lam,
            top_candidates: self.top_candidates,
            rank_threshold: self.rank_threshold,
            thresholding_enabled: self.thresholding,
            modulation_enabled: self.modulation,
            distance_normalization_enabled: self.distance_normalization,
            exchange_repair_enabled: self.exchange_repair,
            ..selection::SelectionConfig::default()
        }
    }
}

/// Union of the selected spanning trees.
#[pyclass(name = "PoseGraph", module = "posegraph_py")]
struct PyPoseGraph {
    inner: selection::PoseGraphInit,
    config: selection::SelectionConfig,
}

#[pymethods]
impl PyPoseGraph {
    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.num_nodes
    }

    /// `(a, b, tree_index, score, readmitted)` in tree order.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize, usize, f64, bool)> {
        self.inner
            .ordered_edges()
            .iter()
            .map(|e| (e.a, e.b, e.mst_index, e.score, e.readmitted))
            .collect()
    }

    fn tree(&self, index: usize) -> Vec<(usize, usize)> {
        self.inner.tree(index)
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.iter().map(ToString::to_string).collect()
    }

    fn pair_list(&self, names: Vec<String>) -> PyResult<String> {
        selection::emit_pair_list(&self.inner, &names).map_err(to_py)
    }

    fn report_json(&self) -> String {
        selection::SelectionReport::for_mst(&self.inner, &self.config).to_json()
    }

    fn num_components(&self) -> usize {
        self.inner.to_graph().num_components()
    }

    /// Hop diameter of the union, or `None` when disconnected.
    fn diameter(&self) -> Option<u32> {
        let g = self.inner.to_graph();
        graph::graph_diameter(&graph::HopDistanceMatrix::compute(&g)).finite()
    }

    fn __len__(&self) -> usize {
        self.inner.edges.len()
    }
}

#[pyfunction]
#[pyo3(signature = (ranks, config=None))]
fn build_multi_mst(ranks: &PyScoreMatrix, config: Option<PySelectionConfig>) -> PyResult<PyPoseGraph> {
    let config = config.map_or_else(selection::SelectionConfig::default, |c| c.to_core());
    let inner = selection::build_multi_mst(&ranks.inner, &config).map_err(to_py)?;
    Ok(PyPoseGraph { inner, config })
}

/// Each image's `k` best partners; returns canonical pairs.
#[pyfunction]
fn knn_select(ranks: &PyScoreMatrix, k: usize) -> PyResult<Vec<(usize, usize)>> {
    let g = selection::knn_select(&ranks.inner, k).map_err(to_py)?;
    let mut pairs: Vec<_> = g.edges().iter().map(|e| e.pair()).collect();
    pairs.sort_unstable();
    Ok(pairs)
}

/// Minimum spanning forest of weighted edges `(a, b, weight)`.
#[pyfunction]
fn kruskal_mst(num_nodes: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Vec<(usize, usize, f64)>> {
    let g = ImageGraph::new(num_nodes, edges).map_err(to_py)?;
    Ok(graph::kruskal_mst(&g).iter().map(|e| (e.a, e.b, e.weight)).collect())
}

/// Hop diameter of an unweighted graph, or `None` when disconnected.
#[pyfunction]
fn graph_diameter(num_nodes: usize, pairs: Vec<(usize, usize)>) -> PyResult<Option<u32>> {
    let g = ImageGraph::from_pairs(num_nodes, pairs).map_err(to_py)?;
    Ok(graph::graph_diameter(&graph::HopDistanceMatrix::compute(&g)).finite())
}

/// Message-passing network weights.
#[pyclass(name = "GnnWeights", module = "posegraph_py")]
struct PyGnnWeights {
    inner: gnn::GnnWeights,
}

#[pymethods]
impl PyGnnWeights {
    #[staticmethod]
    #[pyo3(signature = (seed=0, embed_dim=32, edge_dim=64, head_hidden=32))]
    fn random(seed: u64, embed_dim: usize, edge_dim: usize, head_hidden: usize) -> PyResult<Self> {
        let config = GnnConfig {
            embed_dim,
            edge_dim,
            head_hidden,
        };
        Ok(PyGnnWeights {
            inner: gnn::GnnWeights::random(config, seed).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyGnnWeights {
            inner: gnn::load_weights(&path).map_err(to_py)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(to_py)
    }

    #[getter]
    fn embed_dim(&self) -> usize {
        self.inner.config().embed_dim
    }
}

fn embeddings(rows: Vec<Vec<f64>>) -> Vec<NodeEmbedding> {
    rows.into_iter().map(NodeEmbedding).collect()
}

/// Symmetrized edge ranks for a list of image embeddings.
#[pyfunction]
fn predict_edge_ranks(embeddings_rows: Vec<Vec<f64>>, weights: &PyGnnWeights) -> PyResult<PyScoreMatrix> {
    let p = gnn::predict_edge_ranks(&embeddings(embeddings_rows), &weights.inner).map_err(to_py)?;
    Ok(PyScoreMatrix { inner: p.ranks })
}

/// Ranks for any collection size, splitting into clusters above 500 images.
/// Returns the merged matrix and the cluster id of each image.
#[pyfunction]
#[pyo3(signature = (embeddings_rows, weights, n_max=500, candidate_k=10, seed=0))]
fn predict_ranks_clustered(
    embeddings_rows: Vec<Vec<f64>>,
    weights: &PyGnnWeights,
    n_max: usize,
    candidate_k: usize,
    seed: u64,
) -> PyResult<(PyScoreMatrix, Vec<usize>)> {
    let config = clustering::ClusteringConfig {
        n_max,
        candidate_k,
        partition: PartitionConfig {
            seed,
            ..PartitionConfig::default()
        },
    };
    let r = clustering::predict_ranks_clustered(&embeddings(embeddings_rows), &weights.inner, &config).map_err(to_py)?;
    Ok((PyScoreMatrix { inner: r.merged.scores }, r.partition.assignment().to_vec()))
}

#[pyfunction]
fn num_clusters(n: usize, n_max: usize) -> PyResult<usize> {
    clustering::num_clusters(n, n_max).map_err(to_py)
}

/// Balanced min-cut partition; returns a cluster id per node.
#[pyfunction]
#[pyo3(signature = (similarity, n_clusters, imbalance=1.2, seed=0))]
fn partition_graph(similarity: &PyScoreMatrix, n_clusters: usize, imbalance: f64, seed: u64) -> PyResult<Vec<usize>> {
    let config = PartitionConfig {
        imbalance,
        seed,
        ..PartitionConfig::default()
    };
    let p = clustering::partition_graph(&similarity.inner, n_clusters, &config).map_err(to_py)?;
    Ok(p.assignment().to_vec())
}

/// Synthetic cameras and points with per-camera visibility.
#[pyclass(name = "SyntheticScene", module = "posegraph_py")]
struct PySyntheticScene {
    inner: oracle::SyntheticScene,
}

#[pymethods]
impl PySyntheticScene {
    #[new]
    #[pyo3(signature = (seed=0, num_cameras=12, num_points=2000, layout="ring"))]
    fn new(seed: u64, num_cameras: usize, num_points: usize, layout: &str) -> PyResult<Self> {
        let layout: Layout = layout.parse().map_err(to_py)?;
        Ok(PySyntheticScene {
            inner: oracle::generate_synthetic_scene(seed, num_cameras, num_points, layout).map_err(to_py)?,
        })
    }

    #[getter]
    fn num_cameras(&self) -> usize {
        self.inner.num_cameras()
    }

    #[getter]
    fn camera_names(&self) -> Vec<String> {
        self.inner.camera_names()
    }

    fn visible(&self, camera: usize) -> PyResult<Vec<usize>> {
        self.inner
            .visibility
            .get(camera)
            .cloned()
            .ok_or_else(|| PyIndexError::new_err(format!("camera {camera} out of range")))
    }

    fn count_covisible(&self, i: usize, j: usize) -> PyResult<usize> {
        oracle::count_covisible(&self.inner, i, j).map_err(to_py)
    }

    #[pyo3(signature = (i, j, outlier_rate=0.2, detection_rate=0.9))]
    fn simulate_inliers(&self, i: usize, j: usize, outlier_rate: f64, detection_rate: f64) -> PyResult<u64> {
        let noise = NoiseConfig {
            outlier_rate,
            detection_rate,
        };
        oracle::simulate_inliers(&self.inner, i, j, &noise).map_err(to_py)
    }

    /// Ground-truth rank matrix with the low-inlier filter applied.
    #[pyo3(signature = (outlier_rate=0.2, detection_rate=0.9, cap=10_000, min_inliers=15))]
    fn ground_truth(&self, outlier_rate: f64, detection_rate: f64, cap: u64, min_inliers: u64) -> PyResult<PyScoreMatrix> {
        let config = OracleConfig {
            noise: NoiseConfig {
                outlier_rate,
                detection_rate,
            },
            normalization: NormalizationConfig { cap },
            min_inliers,
        };
        let gt = oracle::ground_truth(&self.inner, &config).map_err(to_py)?;
        Ok(PyScoreMatrix { inner: gt.ranks })
    }
}

#[pyfunction]
#[pyo3(signature = (count, cap=10_000))]
fn normalize_count(count: u64, cap: u64) -> f64 {
    oracle::normalize_count(count, &NormalizationConfig { cap })
}

/// Combined rank of a single pair from its inlier and covisibility counts.
#[pyfunction]
#[pyo3(signature = (inliers, covisible, cap=10_000))]
fn combine_counts(inliers: u64, covisible: u64, cap: u64) -> f64 {
    let cfg = NormalizationConfig { cap };
    0.5 * (oracle::normalize_count(inliers, &cfg) + oracle::normalize_count(covisible, &cfg))
}

#[pyfunction]
fn dcg(truth: Vec<usize>, predicted: Vec<usize>) -> PyResult<f64> {
    Ok(metrics::dcg(&RankedList::new(truth, predicted).map_err(to_py)?))
}

#[pyfunction]
fn ndcg(truth: Vec<usize>, predicted: Vec<usize>) -> PyResult<f64> {
    Ok(metrics::ndcg(&RankedList::new(truth, predicted).map_err(to_py)?))
}

/// Mean per-image NDCG of `predicted` against `truth`.
#[pyfunction]
fn matrix_ndcg(truth: &PyScoreMatrix, predicted: &PyScoreMatrix) -> PyResult<f64> {
    Ok(metrics::rank_matrix_ndcg(&truth.inner, &predicted.inner).map_err(to_py)?.mean_ndcg)
}

/// Relative pose AUC between two pose files at each threshold (degrees).
#[pyfunction]
#[pyo3(signature = (estimated, ground_truth, thresholds=vec![2.5, 5.0], rotation_only=false))]
fn pose_auc(estimated: PathBuf, ground_truth: PathBuf, thresholds: Vec<f64>, rotation_only: bool) -> PyResult<Vec<f64>> {
    let est = posegraph::io::poses::read_poses(&estimated).map_err(to_py)?;
    let gt = posegraph::io::poses::read_poses(&ground_truth).map_err(to_py)?;
    let mode = if rotation_only {
        metrics::PairErrorMode::RotationOnly
    } else {
        metrics::PairErrorMode::Max
    };
    metrics::relative_pose_auc(&est, &gt, &thresholds, mode).map_err(to_py)
}

#[pymodule]
fn posegraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScoreMatrix>()?;
    m.add_class::<PySelectionConfig>()?;
    m.add_class::<PyPoseGraph>()?;
    m.add_class::<PyGnnWeights>()?;
    m.add_class::<PySyntheticScene>()?;
    m.add_function(wrap_pyfunction!(build_multi_mst, m)?)?;
    m.add_function(wrap_pyfunction!(knn_select, m)?)?;
    m.add_function(wrap_pyfunction!(kruskal_mst, m)?)?;
    m.add_function(wrap_pyfunction!(graph_diameter, m)?)?;
    m.add_function(wrap_pyfunction!(predict_edge_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(predict_ranks_clustered, m)?)?;
    m.add_function(wrap_pyfunction!(num_clusters, m)?)?;
    m.add_function(wrap_pyfunction!(partition_graph, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_count, m)?)?;
    m.add_function(wrap_pyfunction!(combine_counts, m)?)?;
    m.add_function(wrap_pyfunction!(dcg, m)?)?;
    m.add_function(wrap_pyfunction!(ndcg, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_ndcg, m)?)?;
    m.add_function(wrap_pyfunction!(pose_auc, m)?)?;
    Ok(())
}
