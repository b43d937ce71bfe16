//! Undirected image graphs and the exact graph algorithms the selection
//! stage is built on: union-find, Kruskal, BFS hop distances, diameter.
//!
//! Pairs are stored once in canonical `(min, max)` order. Hop distances use
//! `None` for unreachable pairs rather than a large finite number, so a
//! disconnected graph can never leak into arithmetic.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Orders a pair as `(min, max)`.
#[inline]
pub fn canonical(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl Edge {
    pub fn pair(&self) -> (usize, usize) {
        (self.a, self.b)
    }
}

/// Nodes `0..num_nodes` plus a weighted undirected edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGraph {
    num_nodes: usize,
    edges: Vec<Edge>,
    index: HashSet<(usize, usize)>,
}

impl ImageGraph {
    /// Builds a graph, canonicalizing every pair to `a < b`.
    ///
    /// Rejects out-of-range ids, self-loops, repeated pairs and NaN weights.
    /// Infinite weights are accepted and mean "never select".
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut graph = ImageGraph::empty(num_nodes);
        for (i, j, w) in edges {
            graph.add_edge(i, j, w)?;
        }
        Ok(graph)
    }

    /// Unit-weight graph from a list of pairs.
    pub fn from_pairs(num_nodes: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        ImageGraph::new(num_nodes, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn empty(num_nodes: usize) -> Self {
        ImageGraph {
            num_nodes,
            edges: Vec::new(),
            index: HashSet::new(),
        }
    }

    pub fn add_edge(&mut self, i: usize, j: usize, weight: f64) -> Result<()> {
        if i >= self.num_nodes || j >= self.num_nodes {
            return Err(Error::argument(format!(
                "edge ({i}, {j}) out of range for {} nodes",
                self.num_nodes
            )));
        }
        if i == j {
            return Err(Error::argument(format!("self-loop on node {i}")));
        }
        if weight.is_nan() {
            return Err(Error::argument(format!("NaN weight on edge ({i}, {j})")));
        }
        let (a, b) = canonical(i, j);
        if !self.index.insert((a, b)) {
            return Err(Error::argument(format!("duplicate edge ({a}, {b})")));
        }
        self.edges.push(Edge { a, b, weight });
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn pair_set(&self) -> &HashSet<(usize, usize)> {
        &self.index
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.index.contains(&canonical(i, j))
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Component label per node; labels are numbered in order of first appearance.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut dsu = DisjointSet::new(self.num_nodes);
        for e in &self.edges {
            dsu.union(e.a, e.b);
        }
        let mut label_of_root = vec![usize::MAX; self.num_nodes];
        let mut next = 0;
        (0..self.num_nodes)
            .map(|v| {
                let root = dsu.find(v);
                if label_of_root[root] == usize::MAX {
                    label_of_root[root] = next;
                    next += 1;
                }
                label_of_root[root]
            })
            .collect()
    }

    pub fn num_components(&self) -> usize {
        let mut dsu = DisjointSet::new(self.num_nodes);
        for e in &self.edges {
            dsu.union(e.a, e.b);
        }
        dsu.num_components()
    }
}

/// Symmetric `N x N` matrix of scores in `[0, 1]`.
///
/// Entries may be masked (no score). The diagonal is always masked.
#[derive(Clone)]
pub struct ScoreMatrix {
    size: usize,
    // NaN marks a masked entry.
    values: Vec<f64>,
}

impl fmt::Debug for ScoreMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoreMatrix").field("size", &self.size).finish_non_exhaustive()
    }
}

impl PartialEq for ScoreMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()))
    }
}

impl ScoreMatrix {
    /// All entries masked.
    pub fn masked(size: usize) -> Self {
        ScoreMatrix {
            size,
            values: vec![f64::NAN; size * size],
        }
    }

    /// Fills every unordered pair `i < j` from `f(i, j)`; `None` masks the pair.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Result<Self> {
        let mut m = ScoreMatrix::masked(size);
        for i in 0..size {
            for j in i + 1..size {
                if let Some(v) = f(i, j) {
                    m.set(i, j, v)?;
                }
            }
        }
        Ok(m)
    }

    /// Builds from dense rows. Diagonal entries are ignored, NaN entries are
    /// masked, and off-diagonal entries must be symmetric and in `[0, 1]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::argument("score matrix rows must form a square matrix"));
        }
        let mut m = ScoreMatrix::masked(n);
        for i in 0..n {
            for j in i + 1..n {
                let (x, y) = (rows[i][j], rows[j][i]);
                let same = (x.is_nan() && y.is_nan()) || x == y;
                if !same {
                    return Err(Error::argument(format!(
                        "score matrix not symmetric at ({i}, {j}): {x} vs {y}"
                    )));
                }
                if !x.is_nan() {
                    m.set(i, j, x)?;
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.values[i * self.size + j];
        (!v.is_nan()).then_some(v)
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i >= self.size || j >= self.size {
            return Err(Error::argument(format!("index ({i}, {j}) out of range for size {}", self.size)));
        }
        if i == j {
            return Err(Error::argument("diagonal entries are always masked"));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::argument(format!("score {value} at ({i}, {j}) outside [0, 1]")));
        }
        self.values[i * self.size + j] = value;
        self.values[j * self.size + i] = value;
        Ok(())
    }

    pub fn mask(&mut self, i: usize, j: usize) {
        self.values[i * self.size + j] = f64::NAN;
        self.values[j * self.size + i] = f64::NAN;
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.values[i * self.size + j].is_nan()
    }

    /// True if any off-diagonal entry is masked.
    pub fn has_masked(&self) -> bool {
        self.upper_triangle().any(|(_, _, v)| v.is_none())
    }

    /// Unordered pairs `i < j` in row-major order with their scores.
    pub fn upper_triangle(&self) -> impl Iterator<Item = (usize, usize, Option<f64>)> + '_ {
        let n = self.size;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.get(i, j))))
    }

    /// Relabels nodes: entry `(perm[i], perm[j])` of the result equals entry `(i, j)` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.size)?;
        let mut out = ScoreMatrix::masked(self.size);
        for (i, j, v) in self.upper_triangle() {
            if let Some(v) = v {
                out.set(perm[i], perm[j], v)?;
            }
        }
        Ok(out)
    }

    /// Complete graph over unmasked pairs with weight `f(score)`.
    pub fn to_graph(&self, mut weight: impl FnMut(f64) -> f64) -> ImageGraph {
        let edges: Vec<Edge> = self
            .upper_triangle()
            .filter_map(|(i, j, v)| v.map(|v| Edge { a: i, b: j, weight: weight(v) }))
            .collect();
        ImageGraph {
            num_nodes: self.size,
            index: edges.iter().map(Edge::pair).collect(),
            edges,
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::argument(format!("permutation length {} != {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::argument("not a permutation"));
        }
    }
    Ok(())
}

/// Union-find with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets containing `a` and `b`. Returns false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn num_components(&self) -> usize {
        self.components
    }
}

/// Greedy forest construction over edges already sorted by preference.
/// Edges closing a cycle are skipped.
pub fn kruskal_in_order(num_nodes: usize, edges: impl IntoIterator<Item = Edge>) -> Vec<Edge> {
    let mut dsu = DisjointSet::new(num_nodes);
    let mut forest = Vec::with_capacity(num_nodes.saturating_sub(1));
    for e in edges {
        if forest.len() + 1 == num_nodes {
            break;
        }
        if dsu.union(e.a, e.b) {
            forest.push(e);
        }
    }
    forest
}

/// Minimum spanning forest by Kruskal's algorithm.
///
/// Ties in weight are broken by `(a, b)`. Edges with infinite weight are
/// never selected.
pub fn kruskal_mst(graph: &ImageGraph) -> Vec<Edge> {
    let mut edges: Vec<Edge> = graph
        .edges
        .iter()
        .copied()
        .filter(|e| e.weight.is_finite())
        .collect();
    edges.sort_by(|x, y| {
        x.weight
            .total_cmp(&y.weight)
            .then_with(|| x.pair().cmp(&y.pair()))
    });
    kruskal_in_order(graph.num_nodes, edges)
}

/// Hop counts from `source`; `None` where no path exists.
pub fn bfs_hop_distances(graph: &ImageGraph, source: usize) -> Result<Vec<Option<u32>>> {
    if source >= graph.num_nodes {
        return Err(Error::argument(format!(
            "source {source} out of range for {} nodes",
            graph.num_nodes
        )));
    }
    Ok(bfs_from(&graph.adjacency(), source))
}

fn bfs_from(adj: &[Vec<usize>], source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let next = dist[v].map(|d| d + 1);
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// All-pairs hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopDistanceMatrix {
    size: usize,
    dist: Vec<Option<u32>>,
}

impl HopDistanceMatrix {
    /// One BFS per source, run in parallel.
    pub fn compute(graph: &ImageGraph) -> Self {
        let adj = graph.adjacency();
        let n = graph.num_nodes;
        let rows: Vec<Vec<Option<u32>>> = (0..n).into_par_iter().map(|s| bfs_from(&adj, s)).collect();
        HopDistanceMatrix {
            size: n,
            dist: rows.into_iter().flatten().collect(),
        }
    }

    /// Distances for a graph with no edges at all.
    pub fn disconnected(size: usize) -> Self {
        let mut dist = vec![None; size * size];
        for i in 0..size {
            dist[i * size + i] = Some(0);
        }
        HopDistanceMatrix { size, dist }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        self.dist[i * self.size + j]
    }
}

/// Serializes as the hop count, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diameter {
    Finite(u32),
    /// Some pair of nodes is disconnected.
    Infinite,
}

impl Diameter {
    pub fn finite(self) -> Option<u32> {
        match self {
            Diameter::Finite(d) => Some(d),
            Diameter::Infinite => None,
        }
    }
}

impl Serialize for Diameter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Diameter::Finite(d) => s.serialize_u32(*d),
            Diameter::Infinite => s.serialize_str("inf"),
        }
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Infinite => f.write_str("inf"),
        }
    }
}

impl PartialOrd for Diameter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Diameter {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Diameter::Finite(a), Diameter::Finite(b)) => a.cmp(b),
            (Diameter::Finite(_), Diameter::Infinite) => Ordering::Less,
            (Diameter::Infinite, Diameter::Finite(_)) => Ordering::Greater,
            (Diameter::Infinite, Diameter::Infinite) => Ordering::Equal,
        }
    }
}

pub fn graph_diameter(distances: &HopDistanceMatrix) -> Diameter {
    let mut best = 0;
    for d in &distances.dist {
        match d {
            Some(d) => best = best.max(*d),
            None => return Diameter::Infinite,
        }
    }
    Diameter::Finite(best)
}

pub fn is_connected(graph: &ImageGraph) -> bool {
    graph.num_components() <= 1
}
