//! File-to-file pipeline steps behind the command-line tool.
//!
//! Each command reads its inputs, runs the library operations and writes its
//! outputs, returning a serializable summary. Commands are deterministic for
//! identical inputs and options.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::clustering::{
    embedding_similarity, partition_and_expand, plan_clusters, predict_ranks_clustered, ClusteringConfig, PartitionReport,
};
use crate::error::{Error, Result};
use crate::gnn::{load_weights, GnnConfig, GnnWeights};
use crate::graph::ImageGraph;
use crate::io::manifest::{default_names, read_embeddings, read_manifest};
use crate::io::matrix::{MatrixFile, MATRIX_MAGIC};
use crate::io::pairs::parse_pair_list;
use crate::io::poses::{read_poses, write_poses};
use crate::metrics::{
    graph_report, pose_report, rank_matrix_ndcg, CameraPose, GraphReport, PairErrorMode, PoseReport, PoseSet,
    RankingReport,
};
use crate::oracle::{generate_synthetic_scene, ground_truth, Layout, OracleConfig};
use crate::selection::{
    build_multi_mst, emit_graph_pair_list, emit_pair_list, knn_select, SelectionConfig, SelectionReport,
};

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_text(path, &text)
}

/// Image names from a manifest file or from the header of a matrix file.
pub fn read_names(path: &Path) -> Result<Vec<String>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MATRIX_MAGIC.as_bytes()) {
        Ok(MatrixFile::from_bytes(&bytes, &path.display().to_string())?.names)
    } else {
        read_manifest(path)
    }
}

#[derive(Debug, Clone)]
pub struct RankArgs {
    pub embeddings: PathBuf,
    pub weights: PathBuf,
    pub manifest: Option<PathBuf>,
    pub output: PathBuf,
    pub partition_report: Option<PathBuf>,
    pub clustering: ClusteringConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankSummary {
    pub num_images: usize,
    pub num_clusters: usize,
    pub covered_pairs: usize,
    pub masked_pairs: usize,
}

pub fn cmd_rank(args: &RankArgs) -> Result<RankSummary> {
    let nodes = read_embeddings(&args.embeddings)?;
    let weights = load_weights(&args.weights)?;
    let names = match &args.manifest {
        Some(p) => read_names(p)?,
        None => default_names(nodes.len()),
    };
    if names.len() != nodes.len() {
        return Err(Error::argument(format!(
            "manifest has {} names but {} embeddings were given",
            names.len(),
            nodes.len()
        )));
    }
    let result = predict_ranks_clustered(&nodes, &weights, &args.clustering)?;
    let scores = result.merged.scores;
    let masked_pairs = scores.upper_triangle().filter(|e| e.2.is_none()).count();
    let total = nodes.len() * (nodes.len() - 1) / 2;
    if let Some(path) = &args.partition_report {
        let similarity = embedding_similarity(&nodes)?;
        write_json(path, &PartitionReport::new(&result.partition, &similarity, &names)?)?;
    }
    MatrixFile::new(names, scores)?.write(&args.output)?;
    Ok(RankSummary {
        num_images: nodes.len(),
        num_clusters: result.partition.num_clusters(),
        covered_pairs: total - masked_pairs,
        masked_pairs,
    })
}

#[derive(Debug, Clone)]
pub enum SelectMode {
    MultiMst(SelectionConfig),
    Knn(usize),
}

#[derive(Debug, Clone)]
pub struct SelectArgs {
    pub matrix: PathBuf,
    pub output: PathBuf,
    pub report: Option<PathBuf>,
    pub mode: SelectMode,
}

pub fn cmd_select(args: &SelectArgs) -> Result<SelectionReport> {
    if let SelectMode::MultiMst(config) = &args.mode {
        config.validate()?;
    }
    let file = MatrixFile::read(&args.matrix)?;
    let (pairs, report) = match &args.mode {
        SelectMode::MultiMst(config) => {
            let init = build_multi_mst(&file.scores, config)?;
            (emit_pair_list(&init, &file.names)?, SelectionReport::for_mst(&init, config))
        }
        SelectMode::Knn(k) => {
            let graph = knn_select(&file.scores, *k)?;
            (emit_graph_pair_list(&graph, &file.names)?, SelectionReport::for_knn(&graph, *k))
        }
    };
    write_text(&args.output, &pairs)?;
    if let Some(path) = &args.report {
        write_json(path, &report)?;
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct OracleArgs {
    pub layout: Layout,
    pub seed: u64,
    pub num_cameras: usize,
    pub num_points: usize,
    pub config: OracleConfig,
    pub output: PathBuf,
    /// JSON dump of cameras, points, visibility and pair counts.
    pub scene: Option<PathBuf>,
    /// Camera poses in pose-file format.
    pub poses: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub layout: Layout,
    pub seed: u64,
    pub num_cameras: usize,
    pub num_points: usize,
    pub filtered_pairs: usize,
    pub mean_rank: f64,
}

#[derive(Serialize)]
struct SceneDump<'a> {
    scene: &'a crate::oracle::SyntheticScene,
    config: &'a OracleConfig,
    inliers: Vec<Vec<u64>>,
    covisible: Vec<Vec<u64>>,
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<OracleSummary> {
    let scene = generate_synthetic_scene(args.seed, args.num_cameras, args.num_points, args.layout)?;
    let gt = ground_truth(&scene, &args.config)?;
    let n = scene.num_cameras();
    let names = scene.camera_names();
    if let Some(path) = &args.scene {
        let rows = |m: &crate::oracle::CountMatrix| (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { m.get(i, j) }).collect()).collect();
        let dump = SceneDump {
            scene: &scene,
            config: &args.config,
            inliers: rows(&gt.inliers),
            covisible: rows(&gt.covisible),
        };
        write_json(path, &dump)?;
    }
    if let Some(path) = &args.poses {
        let poses = scene.cameras.iter().map(|c| CameraPose::from_rotation(c.rotation, c.translation)).collect();
        write_poses(&PoseSet::new(names.clone(), poses)?, path)?;
    }
    let filtered_pairs = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| gt.inliers.get(i, j) < args.config.min_inliers)
        .count();
    let values: Vec<f64> = gt.ranks.upper_triangle().filter_map(|e| e.2).collect();
    let mean_rank = values.iter().sum::<f64>() / values.len() as f64;
    MatrixFile::new(names, gt.ranks)?.write(&args.output)?;
    Ok(OracleSummary {
        layout: args.layout,
        seed: args.seed,
        num_cameras: n,
        num_points: args.num_points,
        filtered_pairs,
        mean_rank,
    })
}

#[derive(Debug, Clone)]
pub enum EvaluateArgs {
    Ranking {
        predicted: PathBuf,
        ground_truth: PathBuf,
    },
    Graph {
        pairs: PathBuf,
        /// Manifest or matrix file supplying the image names.
        names: PathBuf,
    },
    Poses {
        estimated: PathBuf,
        ground_truth: PathBuf,
        thresholds: Vec<f64>,
        mode: PairErrorMode,
    },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluationReport {
    Ranking(RankingReport),
    Graph(GraphReport),
    Poses(PoseReport),
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        match self {
            EvaluationReport::Ranking(r) => format!(
                "images {}\nevaluated {}\nmean_ndcg {:.6}\nmin_ndcg {:.6}\n",
                r.num_images, r.evaluated_images, r.mean_ndcg, r.min_ndcg
            ),
            EvaluationReport::Graph(g) => format!(
                "nodes {}\nedges {}\ncomponents {}\ndiameter {}\nmean_degree {:.4}\n",
                g.num_nodes, g.num_edges, g.num_components, g.diameter, g.mean_degree
            ),
            EvaluationReport::Poses(p) => {
                let mut s = format!("pairs {}\nregistered {}/{}\n", p.num_pairs, p.registered_estimated, p.registered_ground_truth);
                for (t, a) in p.thresholds.iter().zip(&p.auc) {
                    s.push_str(&format!("auc@{t} {a:.6}\n"));
                }
                s
            }
        }
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs, report: Option<&Path>) -> Result<EvaluationReport> {
    let result = match args {
        EvaluateArgs::Ranking { predicted, ground_truth } => {
            let p = MatrixFile::read(predicted)?;
            let t = MatrixFile::read(ground_truth)?;
            if p.names != t.names {
                return Err(Error::argument("predicted and ground-truth matrices list different images"));
            }
            EvaluationReport::Ranking(rank_matrix_ndcg(&t.scores, &p.scores)?)
        }
        EvaluateArgs::Graph { pairs, names } => {
            let names = read_names(names)?;
            let text = std::fs::read_to_string(pairs).map_err(|e| Error::io(pairs, e))?;
            let list = parse_pair_list(&text, &names, &pairs.display().to_string())?;
            EvaluationReport::Graph(graph_report(&ImageGraph::from_pairs(names.len(), list)?))
        }
        EvaluateArgs::Poses {
            estimated,
            ground_truth,
            thresholds,
            mode,
        } => EvaluationReport::Poses(pose_report(&read_poses(estimated)?, &read_poses(ground_truth)?, thresholds, *mode)?),
    };
    if let Some(path) = report {
        write_json(path, &result)?;
    }
    Ok(result)
}

#[derive(Debug, Clone)]
pub enum ClusterInput {
    Embeddings(PathBuf),
    /// Similarity matrix; masked entries count as zero similarity.
    Similarity(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ClusterArgs {
    pub input: ClusterInput,
    pub manifest: Option<PathBuf>,
    /// Overrides the size-based cluster count.
    pub num_clusters: Option<usize>,
    pub clustering: ClusteringConfig,
    pub output: PathBuf,
}

pub fn cmd_cluster(args: &ClusterArgs) -> Result<PartitionReport> {
    let (names, similarity, partition) = match &args.input {
        ClusterInput::Embeddings(path) => {
            let nodes = read_embeddings(path)?;
            let similarity = embedding_similarity(&nodes)?;
            let partition = match args.num_clusters {
                None => plan_clusters(&nodes, &args.clustering)?,
                Some(k) => partition_and_expand(&similarity, k, &args.clustering)?,
            };
            (default_names(nodes.len()), similarity, partition)
        }
        ClusterInput::Similarity(path) => {
            let file = MatrixFile::read(path)?;
            let k = match args.num_clusters {
                Some(k) => k,
                None => crate::clustering::num_clusters(file.scores.size(), args.clustering.n_max)?,
            };
            let partition = partition_and_expand(&file.scores, k, &args.clustering)?;
            (file.names, file.scores, partition)
        }
    };
    let names = match &args.manifest {
        Some(p) => read_names(p)?,
        None => names,
    };
    let report = PartitionReport::new(&partition, &similarity, &names)?;
    write_json(&args.output, &report)?;
    Ok(report)
}

pub fn cmd_init_weights(config: GnnConfig, seed: u64, output: &Path) -> Result<()> {
    GnnWeights::random(config, seed)?.save(output)
}
