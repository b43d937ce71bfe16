//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use posegraph::io::tensor::TensorSet;

fn tensor<'a>(set: &'a TensorSet, name: &str) -> (&'a [usize], Vec<f64>) {
    let t = set.get(name).unwrap_or_else(|| panic!("missing {name}"));
    (&t.shape, t.data.iter().map(|&v| f64::from(v)).collect())
}

fn linear(set: &TensorSet, prefix: &str, x: &[f64]) -> Vec<f64> {
    let (shape, w) = tensor(set, &format!("{prefix}.weight"));
    let (_, b) = tensor(set, &format!("{prefix}.bias"));
    let (rows, cols) = (shape[0], shape[1]);
    assert_eq!(cols, x.len(), "{prefix} input width");
    let mut y = vec![0.0; rows];
    for r in 0..rows {
        let mut acc = b[r];
        for c in 0..cols {
            acc += w[r * cols + c] * x[c];
        }
        y[r] = acc;
    }
    y
}

fn batch_norm_relu(set: &TensorSet, prefix: &str, x: &[f64]) -> Vec<f64> {
    let (_, mean) = tensor(set, &format!("{prefix}.mean"));
    let (_, var) = tensor(set, &format!("{prefix}.var"));
    let (_, gamma) = tensor(set, &format!("{prefix}.gamma"));
    let (_, beta) = tensor(set, &format!("{prefix}.beta"));
    let mut y = vec![0.0; x.len()];
    for k in 0..x.len() {
        let v = (x[k] - mean[k]) / (var[k] + 1e-5).sqrt() * gamma[k] + beta[k];
        y[k] = if v > 0.0 { v } else { 0.0 };
    }
    y
}

fn mlp(set: &TensorSet, prefix: &str, x: &[f64]) -> Vec<f64> {
    let h = linear(set, &format!("{prefix}.fc0"), x);
    let h = batch_norm_relu(set, &format!("{prefix}.bn0"), &h);
    let y = linear(set, &format!("{prefix}.fc1"), &h);
    batch_norm_relu(set, &format!("{prefix}.bn1"), &y)
}

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    let mut out = Vec::new();
    for p in parts {
        out.extend_from_slice(p);
    }
    out
}

/// Straight-line forward pass; returns the symmetrized rank of every pair.
pub fn reference_ranks(nodes: &[Vec<f64>], weights: &TensorSet) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut edges: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dot: f64 = (0..nodes[i].len()).map(|k| nodes[i][k] * nodes[j][k]).sum();
            let ni: f64 = nodes[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            let nj: f64 = nodes[j].iter().map(|v| v * v).sum::<f64>().sqrt();
            let cos = if ni == 0.0 || nj == 0.0 { 0.0 } else { dot / (ni * nj) };
            let x = concat(&[&nodes[i], &nodes[j], &[cos]]);
            edges[i][j] = linear(weights, "init", &x).into_iter().map(|v| v.max(0.0)).collect();
        }
    }

    let mut d: Vec<Vec<f64>> = nodes.to_vec();
    for round in 1..=2 {
        let p = format!("round{round}");
        let mut new_edges = edges.clone();
        let mut new_nodes = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    new_edges[i][j] = mlp(weights, &format!("{p}.edge"), &concat(&[&edges[i][j], &d[i], &d[j]]));
                }
            }
        }
        for i in 0..n {
            let mut m = vec![0.0; d[i].len()];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let msg = mlp(weights, &format!("{p}.msg"), &concat(&[&new_edges[i][j], &d[j]]));
                for k in 0..m.len() {
                    m[k] += msg[k];
                }
            }
            for v in &mut m {
                *v /= n as f64;
            }
            new_nodes.push(mlp(weights, &format!("{p}.update"), &concat(&[&d[i], &m])));
        }
        edges = new_edges;
        d = new_nodes;
    }

    let mut directed = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let h: Vec<f64> = linear(weights, "head.fc0", &edges[i][j]).into_iter().map(|v| v.max(0.0)).collect();
                let z = linear(weights, "head.fc1", &h)[0];
                directed[i][j] = 1.0 / (1.0 + (-z).exp());
            }
        }
    }
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 0.5 * (directed[i][j] + directed[j][i]) }).collect())
        .collect()
}

/// Minimum total weight over all spanning trees, by subset enumeration.
pub fn brute_force_mst_weight(n: usize, edges: &[(usize, usize, f64)]) -> Option<f64> {
    fn connected_tree(n: usize, chosen: &[(usize, usize, f64)]) -> bool {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &(a, b, _) in chosen {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }
    fn recurse(
        n: usize,
        edges: &[(usize, usize, f64)],
        start: usize,
        chosen: &mut Vec<(usize, usize, f64)>,
        best: &mut Option<f64>,
    ) {
        if chosen.len() == n - 1 {
            if connected_tree(n, chosen) {
                let w: f64 = chosen.iter().map(|e| e.2).sum();
                if best.is_none_or(|b| w < b) {
                    *best = Some(w);
                }
            }
            return;
        }
        for k in start..edges.len() {
            chosen.push(edges[k]);
            recurse(n, edges, k + 1, chosen, best);
            chosen.pop();
        }
    }
    if n <= 1 {
        return Some(0.0);
    }
    let mut best = None;
    recurse(n, edges, 0, &mut Vec::new(), &mut best);
    best
}

/// All-pairs hop distances by Floyd–Warshall.
pub fn floyd_warshall(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
    }
    for &(a, b) in pairs {
        d[a][b] = Some(1);
        d[b][a] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Direct summation of `(2^(M - r) - 1) / log2(rhat + 1)`.
pub fn naive_dcg(truth: &[usize], predicted: &[usize]) -> f64 {
    let m = truth.len() as f64;
    let mut total = 0.0;
    for k in 0..truth.len() {
        total += (2f64.powf(m - truth[k] as f64) - 1.0) / (predicted[k] as f64 + 1.0).log2();
    }
    total
}

/// The scalar form of the count normalization.
pub fn scalar_normalize(c: u64, cap: u64) -> f64 {
    if c <= 1000 {
        0.8 * c as f64 / 1000.0
    } else {
        0.8 + 0.2 * ((c as f64 - 1000.0) / (cap as f64 - 1000.0)).min(1.0)
    }
}
