use std::path::Path;
use std::process::{Command, Output};

fn posegraph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posegraph"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = posegraph(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn oracle_select_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let summary = ok(d, &["oracle", "--layout", "ring", "--cameras", "12", "-o", "gt.mat", "--poses", "gt.poses"]);
    assert!(summary.contains("cameras 12"), "{summary}");

    let select = ok(d, &["select", "--matrix", "gt.mat", "-k", "2", "-o", "pairs.txt", "--report", "run.json"]);
    assert!(select.contains("components 1"), "{select}");
    let pairs = std::fs::read_to_string(d.join("pairs.txt")).unwrap();
    assert_eq!(pairs.lines().count(), 22);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("run.json")).unwrap()).unwrap();
    assert_eq!(report["total_edges"], 22);

    let graph = ok(d, &["evaluate", "graph", "--pairs", "pairs.txt", "--names", "gt.mat", "--json"]);
    let graph: serde_json::Value = serde_json::from_str(&graph).unwrap();
    assert_eq!(graph["num_components"], 1);

    let poses = ok(d, &["evaluate", "poses", "--estimated", "gt.poses", "--ground-truth", "gt.poses", "--json"]);
    let poses: serde_json::Value = serde_json::from_str(&poses).unwrap();
    assert_eq!(poses["auc"], serde_json::json!([1.0, 1.0]));

    let ranking = ok(d, &["evaluate", "ranking", "--predicted", "gt.mat", "--ground-truth", "gt.mat"]);
    assert!(ranking.contains("mean_ndcg"), "{ranking}");
}

#[test]
fn rank_and_cluster_from_embeddings() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["init-weights", "--embed-dim", "4", "--edge-dim", "8", "--head-hidden", "4", "-o", "w.bin"]);
    ok(d, &["oracle", "--layout", "two-cluster", "--cameras", "12", "-o", "gt.mat"]);

    let cluster = ok(d, &["cluster", "--similarity", "gt.mat", "--clusters", "2", "--candidate-k", "2", "-o", "part.json"]);
    assert!(cluster.contains("clusters 2"), "{cluster}");
    let part: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("part.json")).unwrap()).unwrap();
    assert_eq!(part["num_clusters"], 2);

    // A corrupt embeddings file is reported, not a panic.
    std::fs::write(d.join("emb.bin"), b"not a tensor container").unwrap();
    let out = posegraph(d, &["rank", "--embeddings", "emb.bin", "--weights", "w.bin", "-o", "r.mat"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn knn_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["oracle", "--layout", "corridor", "--cameras", "10", "-o", "gt.mat"]);
    ok(d, &["select", "--matrix", "gt.mat", "--baseline", "knn", "-k", "1", "-o", "knn.txt"]);
    let lines = std::fs::read_to_string(d.join("knn.txt")).unwrap().lines().count();
    assert!((5..=10).contains(&lines), "{lines} pairs");
}

#[test]
fn invalid_arguments_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = posegraph(d, &["oracle", "--layout", "spiral", "-o", "x.mat"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spiral"));

    let out = posegraph(d, &["select", "--matrix", "missing.mat", "-o", "p.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.mat"));

    ok(d, &["oracle", "--cameras", "6", "-o", "gt.mat"]);
    let out = posegraph(d, &["select", "--matrix", "gt.mat", "--lambda", "1.5", "-o", "p.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!posegraph(d, &["select"]).status.success());
}
