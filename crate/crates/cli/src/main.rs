use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use posegraph::clustering::{ClusteringConfig, PartitionConfig};
use posegraph::commands::{
    cmd_cluster, cmd_evaluate, cmd_init_weights, cmd_oracle, cmd_rank, cmd_select, ClusterArgs, ClusterInput,
    EvaluateArgs, OracleArgs, RankArgs, SelectArgs, SelectMode,
};
use posegraph::gnn::GnnConfig;
use posegraph::metrics::PairErrorMode;
use posegraph::oracle::{Layout, NoiseConfig, NormalizationConfig, OracleConfig};
use posegraph::selection::SelectionConfig;

/// Pose graph initialization for structure-from-motion.
#[derive(Parser)]
#[command(name = "posegraph", version)]
struct Cli {
    /// Worker threads for parallel sections (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict edge ranks from image embeddings and write a matrix file.
    Rank(RankCli),
    /// Select image pairs from a rank matrix and write a pair list.
    Select(SelectCli),
    /// Generate a synthetic scene and write its ground-truth rank matrix.
    Oracle(OracleCli),
    /// Score rankings, pair lists or pose estimates.
    Evaluate(EvaluateCli),
    /// Partition a collection into overlapping clusters.
    Cluster(ClusterCli),
    /// Write randomly initialized network weights.
    InitWeights(InitWeightsCli),
}

#[derive(Args)]
struct ClusteringFlags {
    /// Largest cluster size used to choose the number of clusters.
    #[arg(long, default_value_t = 500)]
    n_max: usize,
    /// Neighbors per image in the candidate graph used for cluster expansion.
    #[arg(long, default_value_t = 10)]
    candidate_k: usize,
    /// Allowed cluster size relative to the mean.
    #[arg(long, default_value_t = 1.2)]
    imbalance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ClusteringFlags {
    fn config(&self) -> ClusteringConfig {
        ClusteringConfig {
            n_max: self.n_max,
            candidate_k: self.candidate_k,
            partition: PartitionConfig {
                imbalance: self.imbalance,
                seed: self.seed,
                ..PartitionConfig::default()
            },
        }
    }
}

#[derive(Args)]
struct RankCli {
    /// Tensor container holding an `embeddings` tensor of shape N x d.
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    /// Image names, one per line (default: img_00000, img_00001, ...).
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, short)]
    output: PathBuf,
    /// Write the cluster layout as JSON.
    #[arg(long)]
    partition_report: Option<PathBuf>,
    #[command(flatten)]
    clustering: ClusteringFlags,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Knn,
}

#[derive(Args)]
struct SelectCli {
    #[arg(long)]
    matrix: PathBuf,
    /// Pair list output.
    #[arg(long, short)]
    output: PathBuf,
    /// Run report output (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Number of spanning trees, or neighbors per image with `--baseline knn`.
    #[arg(long, short, default_value_t = 1)]
    k: usize,
    /// Weight of the hop-distance term in score modulation.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Partners per image eligible for modulation.
    #[arg(long, default_value_t = 5)]
    top_candidates: usize,
    /// Edges ranked below this are pruned from the second tree onward.
    #[arg(long, default_value_t = 0.9)]
    rank_threshold: f64,
    #[arg(long)]
    no_threshold: bool,
    #[arg(long)]
    no_modulation: bool,
    #[arg(long)]
    no_distance_normalization: bool,
    #[arg(long)]
    no_exchange_repair: bool,
    /// Use a baseline selector instead of spanning trees.
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
}

#[derive(Args)]
struct OracleCli {
    #[arg(long, default_value = "ring")]
    layout: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    cameras: usize,
    #[arg(long, default_value_t = 2000)]
    points: usize,
    #[arg(long, default_value_t = 0.2)]
    outlier_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    detection_rate: f64,
    /// Count at which normalization saturates.
    #[arg(long, default_value_t = 10_000)]
    cap: u64,
    /// Pairs with fewer inliers get rank 0.
    #[arg(long, default_value_t = 15)]
    min_inliers: u64,
    #[arg(long, short)]
    output: PathBuf,
    /// Scene dump (JSON).
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Ground-truth camera poses.
    #[arg(long)]
    poses: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateCli {
    #[command(subcommand)]
    target: EvaluateTarget,
    /// Machine-readable report output (JSON).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum EvaluateTarget {
    /// Per-image NDCG of a predicted matrix against ground truth.
    Ranking {
        #[arg(long)]
        predicted: PathBuf,
        #[arg(long)]
        ground_truth: PathBuf,
    },
    /// Connectivity statistics of a pair list.
    Graph {
        #[arg(long)]
        pairs: PathBuf,
        /// Manifest or matrix file naming the images.
        #[arg(long)]
        names: PathBuf,
    },
    /// Relative pose AUC.
    Poses {
        #[arg(long)]
        estimated: PathBuf,
        #[arg(long)]
        ground_truth: PathBuf,
        /// Thresholds in degrees.
        #[arg(long, value_delimiter = ',', default_values_t = [2.5, 5.0])]
        thresholds: Vec<f64>,
        /// Ignore translation-direction errors.
        #[arg(long)]
        rotation_only: bool,
    },
}

#[derive(Args)]
struct ClusterCli {
    /// Embeddings container; similarity is derived from cosine similarity.
    #[arg(long, conflicts_with = "similarity", required_unless_present = "similarity")]
    embeddings: Option<PathBuf>,
    /// Similarity matrix file.
    #[arg(long)]
    similarity: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Fixed number of clusters instead of the size-based count.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, short)]
    output: PathBuf,
    #[command(flatten)]
    clustering: ClusteringFlags,
}

#[derive(Args)]
struct InitWeightsCli {
    #[arg(long, default_value_t = 32)]
    embed_dim: usize,
    #[arg(long, default_value_t = 64)]
    edge_dim: usize,
    #[arg(long, default_value_t = 32)]
    head_hidden: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: PathBuf,
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        anyhow::ensure!(threads > 0, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Rank(a) => {
            let summary = cmd_rank(&RankArgs {
                embeddings: a.embeddings,
                weights: a.weights,
                manifest: a.manifest,
                output: a.output,
                partition_report: a.partition_report,
                clustering: a.clustering.config(),
            })?;
            println!(
                "images {}\nclusters {}\ncovered_pairs {}\nmasked_pairs {}",
                summary.num_images, summary.num_clusters, summary.covered_pairs, summary.masked_pairs
            );
        }
        Command::Select(a) => {
            let mode = match a.baseline {
                Some(Baseline::Knn) => SelectMode::Knn(a.k),
                None => SelectMode::MultiMst(SelectionConfig {
                    num_trees: a.k,
                    lambda: a.lambda,
                    top_candidates: a.top_candidates,
                    rank_threshold: a.rank_threshold,
                    thresholding_enabled: !a.no_threshold,
                    modulation_enabled: !a.no_modulation,
                    distance_normalization_enabled: !a.no_distance_normalization,
                    exchange_repair_enabled: !a.no_exchange_repair,
                    ..SelectionConfig::default()
                }),
            };
            let report = cmd_select(&SelectArgs {
                matrix: a.matrix,
                output: a.output,
                report: a.report,
                mode,
            })?;
            for w in &report.warning_messages {
                eprintln!("warning: {w}");
            }
            println!(
                "edges {}\ncomponents {}\ndiameter {}",
                report.total_edges, report.num_components, report.diameter
            );
        }
        Command::Oracle(a) => {
            let layout: Layout = a.layout.parse()?;
            let summary = cmd_oracle(&OracleArgs {
                layout,
                seed: a.seed,
                num_cameras: a.cameras,
                num_points: a.points,
                config: OracleConfig {
                    noise: NoiseConfig {
                        outlier_rate: a.outlier_rate,
                        detection_rate: a.detection_rate,
                    },
                    normalization: NormalizationConfig { cap: a.cap },
                    min_inliers: a.min_inliers,
                },
                output: a.output,
                scene: a.scene,
                poses: a.poses,
            })?;
            println!(
                "layout {}\ncameras {}\nfiltered_pairs {}\nmean_rank {:.6}",
                summary.layout, summary.num_cameras, summary.filtered_pairs, summary.mean_rank
            );
        }
        Command::Evaluate(a) => {
            let args = match a.target {
                EvaluateTarget::Ranking { predicted, ground_truth } => EvaluateArgs::Ranking { predicted, ground_truth },
                EvaluateTarget::Graph { pairs, names } => EvaluateArgs::Graph { pairs, names },
                EvaluateTarget::Poses {
                    estimated,
                    ground_truth,
                    thresholds,
                    rotation_only,
                } => EvaluateArgs::Poses {
                    estimated,
                    ground_truth,
                    thresholds,
                    mode: if rotation_only { PairErrorMode::RotationOnly } else { PairErrorMode::Max },
                },
            };
            let report = cmd_evaluate(&args, a.report.as_deref())?;
            if a.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Cluster(a) => {
            let input = match (a.embeddings, a.similarity) {
                (Some(e), _) => ClusterInput::Embeddings(e),
                (None, Some(s)) => ClusterInput::Similarity(s),
                (None, None) => unreachable!("clap requires one input"),
            };
            let report = cmd_cluster(&ClusterArgs {
                input,
                manifest: a.manifest,
                num_clusters: a.clusters,
                clustering: a.clustering.config(),
                output: a.output,
            })?;
            let sizes: Vec<String> = report.clusters.iter().map(|c| format!("{}/{}", c.size, c.expanded_size)).collect();
            println!(
                "clusters {}\nsizes {}\ncut_weight {:.6}",
                report.num_clusters,
                sizes.join(" "),
                report.cut_weight
            );
        }
        Command::InitWeights(a) => {
            let config = GnnConfig {
                embed_dim: a.embed_dim,
                edge_dim: a.edge_dim,
                head_hidden: a.head_hidden,
            };
            cmd_init_weights(config, a.seed, &a.output)?;
            println!("wrote {}", a.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
