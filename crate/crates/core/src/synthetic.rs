//! Seeded score-matrix generators used as fixtures by tests, benchmarks and
//! the CLI's demo paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::ScoreMatrix;

/// Independent uniform ranks in `[0, 1)` for every pair.
pub fn random_ranks(n: usize, seed: u64) -> ScoreMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScoreMatrix::from_fn(n, |_, _| Some(rng.random::<f64>())).expect("uniform ranks are in range")
}

/// Shape of a two-cluster rank matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoClusterSpec {
    pub num_nodes: usize,
    /// Range of ranks inside each cluster.
    pub intra: (f64, f64),
    /// Range of ranks between clusters.
    pub cross: (f64, f64),
    /// Number of cross pairs promoted to bridge ranks.
    pub bridges: usize,
    pub bridge: (f64, f64),
}

impl TwoClusterSpec {
    pub fn new(num_nodes: usize) -> Self {
        TwoClusterSpec {
            num_nodes,
            intra: (0.8, 1.0),
            cross: (0.0, 0.3),
            bridges: 6,
            bridge: (0.9, 0.95),
        }
    }

    /// Cluster id of each node: the first half is cluster 0.
    pub fn labels(&self) -> Vec<usize> {
        (0..self.num_nodes).map(|i| usize::from(i >= self.num_nodes / 2)).collect()
    }
}

/// Two dense blocks with weak cross ranks and a few bridge pairs.
///
/// Nodes `0..n/2` form one cluster. Bridge pairs are drawn uniformly among
/// cross pairs without repetition.
pub fn two_cluster_ranks(spec: &TwoClusterSpec, seed: u64) -> ScoreMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.num_nodes;
    let half = n / 2;
    let mut cross_pairs: Vec<(usize, usize)> = (0..half).flat_map(|i| (half..n).map(move |j| (i, j))).collect();
    let mut bridges = Vec::new();
    for _ in 0..spec.bridges.min(cross_pairs.len()) {
        let k = rng.random_range(0..cross_pairs.len());
        bridges.push(cross_pairs.swap_remove(k));
    }
    let mut draw = |(lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..hi) } else { lo };
    ScoreMatrix::from_fn(n, |i, j| {
        let v = if (i < half) == (j < half) {
            draw(spec.intra)
        } else if bridges.contains(&(i, j)) {
            draw(spec.bridge)
        } else {
            draw(spec.cross)
        };
        Some(v)
    })
    .expect("ranges lie in [0, 1]")
}
