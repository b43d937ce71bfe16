//! Initial pose graph construction.
//!
//! The graph is a union of `k` edge-disjoint maximum-score spanning trees.
//! From the second tree on, scores of each image's strongest candidates are
//! blended with the normalized hop distance in the union built so far, which
//! pulls in edges bridging far-apart regions. Candidates below the rank
//! threshold are dropped unless a tree cannot be completed without them.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{graph_diameter, Diameter, DisjointSet, HopDistanceMatrix, ImageGraph, ScoreMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionConfig {
    /// Number of spanning trees.
    pub num_trees: usize,
    /// Modulation weight in `[0, 1]`.
    pub lambda: f64,
    /// Per-image count of strongest candidates eligible for modulation.
    pub top_candidates: usize,
    pub rank_threshold: f64,
    pub thresholding_enabled: bool,
    /// First tree (1-based) at which the rank threshold applies.
    pub threshold_from_iteration: usize,
    pub modulation_enabled: bool,
    /// When disabled, hop distances are divided by `N - 1` instead of the
    /// current diameter.
    pub distance_normalization_enabled: bool,
    /// Exchange edges with earlier trees when greedy selection cannot complete a tree.
    pub exchange_repair_enabled: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            num_trees: 1,
            lambda: 0.5,
            top_candidates: 5,
            rank_threshold: 0.9,
            thresholding_enabled: true,
            threshold_from_iteration: 2,
            modulation_enabled: true,
            distance_normalization_enabled: true,
            exchange_repair_enabled: true,
        }
    }
}

impl SelectionConfig {
    pub fn with_trees(num_trees: usize) -> Self {
        SelectionConfig {
            num_trees,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_trees == 0 {
            return Err(Error::argument("number of spanning trees must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::argument(format!("lambda {} outside [0, 1]", self.lambda)));
        }
        if self.top_candidates == 0 {
            return Err(Error::argument("top_candidates must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.rank_threshold) {
            return Err(Error::argument(format!("rank threshold {} outside [0, 1]", self.rank_threshold)));
        }
        if self.threshold_from_iteration == 0 {
            return Err(Error::argument("threshold_from_iteration is 1-based"));
        }
        Ok(())
    }

    fn thresholds_at(&self, iteration: usize) -> bool {
        self.thresholding_enabled && iteration >= self.threshold_from_iteration
    }
}

/// Hop distances scaled into `[0, 1]`; unreachable pairs map to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDistances {
    size: usize,
    values: Vec<f64>,
}

impl NormalizedDistances {
    /// Every off-diagonal entry is 1, the value for an empty graph.
    pub fn uniform(size: usize) -> Self {
        NormalizedDistances::from_fn(size, |_, _| 1.0)
    }

    fn from_fn(size: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    values[i * size + j] = f(i, j);
                }
            }
        }
        NormalizedDistances { size, values }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }
}

/// `d(i, j) / D` when the diameter `D` is finite; 1 everywhere otherwise.
pub fn normalize_distances(distances: &HopDistanceMatrix) -> NormalizedDistances {
    match graph_diameter(distances) {
        Diameter::Finite(diameter) if diameter > 0 => NormalizedDistances::from_fn(distances.size(), |i, j| {
            distances.get(i, j).map_or(1.0, |d| d as f64 / diameter as f64)
        }),
        Diameter::Finite(_) => NormalizedDistances::from_fn(distances.size(), |_, _| 0.0),
        Diameter::Infinite => NormalizedDistances::uniform(distances.size()),
    }
}

/// Hop distances divided by the longest possible path, `N - 1`.
fn scale_by_path_bound(distances: &HopDistanceMatrix) -> NormalizedDistances {
    let bound = distances.size().saturating_sub(1).max(1) as f64;
    NormalizedDistances::from_fn(distances.size(), |i, j| {
        distances.get(i, j).map_or(1.0, |d| d as f64 / bound)
    })
}

/// Candidate scores for one spanning-tree iteration.
///
/// Entries that are not candidates (already selected, below the rank
/// threshold, or without a predicted rank) hold `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedScores {
    pub iteration: usize,
    size: usize,
    values: Vec<f64>,
    // Pairs dropped by the rank threshold, kept for re-admission.
    pruned: Vec<(usize, usize)>,
}

impl ModulatedScores {
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn is_candidate(&self, i: usize, j: usize) -> bool {
        self.get(i, j) != f64::NEG_INFINITY
    }

    pub fn pruned(&self) -> &[(usize, usize)] {
        &self.pruned
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.size + j] = v;
        self.values[j * self.size + i] = v;
    }
}

/// Scores for `iteration` (1-based): `s = (1 - lambda) * r + lambda * dbar`
/// for each image's top `top_candidates` edges by rank (an edge qualifies
/// through either endpoint), `s = r` for the remaining candidates.
///
/// `selected` holds edges chosen by earlier trees; they are masked to `-inf`.
/// At or after `threshold_from_iteration`, candidates with rank below
/// `rank_threshold` are masked as well and listed in [`ModulatedScores::pruned`].
pub fn modulate_scores(
    ranks: &ScoreMatrix,
    normalized: &NormalizedDistances,
    selected: &ImageGraph,
    config: &SelectionConfig,
    iteration: usize,
) -> Result<ModulatedScores> {
    let n = ranks.size();
    if normalized.size() != n || selected.num_nodes() != n {
        return Err(Error::argument(format!(
            "size mismatch: ranks {n}, distances {}, selected graph {}",
            normalized.size(),
            selected.num_nodes()
        )));
    }
    let mut out = ModulatedScores {
        iteration,
        size: n,
        values: vec![f64::NEG_INFINITY; n * n],
        pruned: Vec::new(),
    };
    let threshold = config.thresholds_at(iteration);

    let mut per_node: Vec<Vec<(f64, usize, usize)>> = vec![Vec::new(); n];
    for (i, j, r) in ranks.upper_triangle() {
        let Some(r) = r else { continue };
        if selected.has_edge(i, j) {
            continue;
        }
        if threshold && r < config.rank_threshold {
            out.pruned.push((i, j));
            continue;
        }
        out.set(i, j, r);
        per_node[i].push((r, i, j));
        per_node[j].push((r, i, j));
    }
    if !config.modulation_enabled {
        return Ok(out);
    }

    let mut eligible = vec![false; n * n];
    for list in &mut per_node {
        list.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| (x.1, x.2).cmp(&(y.1, y.2))));
        for &(_, i, j) in list.iter().take(config.top_candidates) {
            eligible[i * n + j] = true;
        }
    }
    let lambda = config.lambda;
    for i in 0..n {
        for j in i + 1..n {
            if eligible[i * n + j] {
                let r = out.get(i, j);
                out.set(i, j, (1.0 - lambda) * r + lambda * normalized.get(i, j));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectedEdge {
    pub a: usize,
    pub b: usize,
    /// 1-based index of the spanning tree that chose this edge.
    pub mst_index: usize,
    /// Score the edge was ranked by when chosen.
    pub score: f64,
    /// True if the edge fell below the rank threshold and was taken back to
    /// complete the tree.
    pub readmitted: bool,
}

impl SelectedEdge {
    pub fn pair(&self) -> (usize, usize) {
        (self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionWarning {
    /// A below-threshold edge was re-admitted to keep the tree spanning.
    Readmitted { iteration: usize, a: usize, b: usize, rank: f64 },
    /// Edges were exchanged between trees so that tree `iteration` could span.
    Exchanged { iteration: usize, augmentations: usize },
    /// No spanning tree exists over the remaining candidates.
    IncompleteTree { iteration: usize, components: usize },
}

impl fmt::Display for SelectionWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionWarning::Readmitted { iteration, a, b, rank } => write!(
                f,
                "tree {iteration}: re-admitted below-threshold edge ({a}, {b}) with rank {rank:.4}"
            ),
            SelectionWarning::Exchanged { iteration, augmentations } => write!(
                f,
                "tree {iteration}: completed by {augmentations} edge exchange(s) with earlier trees"
            ),
            SelectionWarning::IncompleteTree { iteration, components } => write!(
                f,
                "tree {iteration}: candidates exhausted, forest has {components} components"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub edges_added: usize,
    pub readmitted: usize,
    pub union_edges: usize,
    pub union_components: usize,
    pub union_diameter: Diameter,
}

/// Union of the selected spanning trees.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseGraphInit {
    pub num_nodes: usize,
    pub edges: Vec<SelectedEdge>,
    pub iterations: Vec<IterationStats>,
    pub warnings: Vec<SelectionWarning>,
}

impl PoseGraphInit {
    pub fn to_graph(&self) -> ImageGraph {
        ImageGraph::new(self.num_nodes, self.edges.iter().map(|e| (e.a, e.b, e.score)))
            .expect("selected edges are distinct canonical pairs")
    }

    /// Edges of tree `mst_index` (1-based).
    pub fn tree(&self, mst_index: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|e| e.mst_index == mst_index)
            .map(SelectedEdge::pair)
            .collect()
    }

    /// Edges ordered by `(mst_index, a, b)`.
    pub fn ordered_edges(&self) -> Vec<SelectedEdge> {
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| (e.mst_index, e.a, e.b));
        edges
    }
}

/// Run summary written next to the pair list.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionReport {
    pub mode: &'static str,
    pub num_nodes: usize,
    pub config: Option<SelectionConfig>,
    pub knn_k: Option<usize>,
    pub total_edges: usize,
    pub num_components: usize,
    pub diameter: Diameter,
    pub iterations: Vec<IterationStats>,
    pub warnings: Vec<SelectionWarning>,
    pub warning_messages: Vec<String>,
}

impl SelectionReport {
    pub fn for_mst(init: &PoseGraphInit, config: &SelectionConfig) -> Self {
        let graph = init.to_graph();
        SelectionReport {
            mode: "multi_mst",
            num_nodes: init.num_nodes,
            config: Some(config.clone()),
            knn_k: None,
            total_edges: init.edges.len(),
            num_components: graph.num_components(),
            diameter: graph_diameter(&HopDistanceMatrix::compute(&graph)),
            iterations: init.iterations.clone(),
            warning_messages: init.warnings.iter().map(ToString::to_string).collect(),
            warnings: init.warnings.clone(),
        }
    }

    pub fn for_knn(graph: &ImageGraph, k: usize) -> Self {
        SelectionReport {
            mode: "knn",
            num_nodes: graph.num_nodes(),
            config: None,
            knn_k: Some(k),
            total_edges: graph.num_edges(),
            num_components: graph.num_components(),
            diameter: graph_diameter(&HopDistanceMatrix::compute(graph)),
            iterations: Vec::new(),
            warnings: Vec::new(),
            warning_messages: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

// Preference order: higher score, then higher rank, then canonical pair.
fn by_preference(x: &(f64, f64, usize, usize), y: &(f64, f64, usize, usize)) -> Ordering {
    (1.0 - x.0)
        .total_cmp(&(1.0 - y.0))
        .then_with(|| y.1.total_cmp(&x.1))
        .then_with(|| (x.2, x.3).cmp(&(y.2, y.3)))
}

/// Builds the union of `num_trees` edge-disjoint spanning trees.
///
/// Each tree is a minimum spanning tree on weights `1 - s`, with `s` from
/// [`modulate_scores`] over hop distances in the union of earlier trees. The
/// first tree uses the raw ranks. When a tree cannot be completed from the
/// surviving candidates, below-threshold edges are re-admitted by rank; if it
/// still cannot span, edges are exchanged with earlier trees along augmenting
/// paths, which completes every tree whenever `num_trees` edge-disjoint
/// spanning trees exist among the ranked pairs.
pub fn build_multi_mst(ranks: &ScoreMatrix, config: &SelectionConfig) -> Result<PoseGraphInit> {
    config.validate()?;
    let n = ranks.size();
    if n < 2 {
        return Err(Error::argument(format!("need at least 2 images, got {n}")));
    }

    let mut union = ImageGraph::empty(n);
    let mut forests: Vec<Vec<SelectedEdge>> = Vec::new();
    let mut iterations = Vec::new();
    let mut warnings = Vec::new();
    let mut distances = HopDistanceMatrix::disconnected(n);

    for iteration in 1..=config.num_trees {
        let normalized = if iteration == 1 || !config.modulation_enabled {
            NormalizedDistances::uniform(n)
        } else if config.distance_normalization_enabled {
            normalize_distances(&distances)
        } else {
            scale_by_path_bound(&distances)
        };
        let step_config = SelectionConfig {
            modulation_enabled: config.modulation_enabled && iteration > 1,
            ..config.clone()
        };
        let scores = modulate_scores(ranks, &normalized, &union, &step_config, iteration)?;

        let mut ordered: Vec<(f64, f64, usize, usize)> = ranks
            .upper_triangle()
            .filter(|&(i, j, _)| scores.is_candidate(i, j))
            .map(|(i, j, r)| (scores.get(i, j), r.expect("candidates have ranks"), i, j))
            .collect();
        ordered.sort_by(by_preference);

        let mut dsu = DisjointSet::new(n);
        let mut tree = Vec::new();
        for &(s, _, i, j) in &ordered {
            if dsu.num_components() == 1 {
                break;
            }
            if dsu.union(i, j) {
                tree.push(SelectedEdge {
                    a: i,
                    b: j,
                    mst_index: iteration,
                    score: s,
                    readmitted: false,
                });
            }
        }

        let mut readmitted = 0;
        if dsu.num_components() > 1 && !scores.pruned().is_empty() {
            let mut pruned: Vec<(f64, f64, usize, usize)> = scores
                .pruned()
                .iter()
                .map(|&(i, j)| {
                    let r = ranks.get(i, j).expect("pruned pairs have ranks");
                    (r, r, i, j)
                })
                .collect();
            pruned.sort_by(by_preference);
            for (r, _, i, j) in pruned {
                if dsu.num_components() == 1 {
                    break;
                }
                if dsu.union(i, j) {
                    readmitted += 1;
                    warnings.push(SelectionWarning::Readmitted { iteration, a: i, b: j, rank: r });
                    tree.push(SelectedEdge {
                        a: i,
                        b: j,
                        mst_index: iteration,
                        score: r,
                        readmitted: true,
                    });
                }
            }
        }
        forests.push(tree);

        let mut components = dsu.num_components();
        if components > 1 && config.exchange_repair_enabled {
            let threshold = config.thresholds_at(iteration);
            let outcome = exchange_repair(ranks, &mut forests, |r| threshold && r < config.rank_threshold);
            for &(a, b, rank) in &outcome.readmitted {
                readmitted += 1;
                warnings.push(SelectionWarning::Readmitted { iteration, a, b, rank });
            }
            if outcome.augmentations > 0 {
                warnings.push(SelectionWarning::Exchanged {
                    iteration,
                    augmentations: outcome.augmentations,
                });
            }
            components = n - forests[iteration - 1].len();
        }
        if components > 1 {
            warnings.push(SelectionWarning::IncompleteTree { iteration, components });
        }

        union = ImageGraph::new(
            n,
            forests.iter().flatten().map(|e| (e.a, e.b, e.score)),
        )?;
        distances = HopDistanceMatrix::compute(&union);
        iterations.push(IterationStats {
            iteration,
            edges_added: forests[iteration - 1].len(),
            readmitted,
            union_edges: union.num_edges(),
            union_components: union.num_components(),
            union_diameter: graph_diameter(&distances),
        });
    }
    Ok(PoseGraphInit {
        num_nodes: n,
        edges: forests.into_iter().flatten().collect(),
        iterations,
        warnings,
    })
}

struct RepairOutcome {
    augmentations: usize,
    readmitted: Vec<(usize, usize, f64)>,
}

/// Forest with per-component rooted parent pointers for path queries.
struct RootedForest {
    component: Vec<usize>,
    parent: Vec<usize>,
    depth: Vec<usize>,
}

impl RootedForest {
    fn build(n: usize, edges: &[SelectedEdge]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut component = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        for root in 0..n {
            if component[root] != usize::MAX {
                continue;
            }
            component[root] = root;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if component[w] == usize::MAX {
                        component[w] = root;
                        parent[w] = v;
                        depth[w] = depth[v] + 1;
                        stack.push(w);
                    }
                }
            }
        }
        RootedForest { component, parent, depth }
    }

    /// Canonical pairs on the tree path between `u` and `v` (same component).
    fn path(&self, mut u: usize, mut v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while u != v {
            if self.depth[u] >= self.depth[v] {
                out.push(crate::graph::canonical(u, self.parent[u]));
                u = self.parent[u];
            } else {
                out.push(crate::graph::canonical(v, self.parent[v]));
                v = self.parent[v];
            }
        }
        out
    }
}

/// Grows non-spanning forests by matroid-union augmenting paths.
///
/// Sources are ranked pairs used by no forest, tried in rank order. An arc
/// `x -> y` labelled `l` means `x` may replace `y` in forest `l`; a path ends
/// at an element that joins two components of some forest. Shortest paths
/// keep every forest acyclic after the exchanges are applied.
fn exchange_repair(
    ranks: &ScoreMatrix,
    forests: &mut [Vec<SelectedEdge>],
    below_threshold: impl Fn(f64) -> bool,
) -> RepairOutcome {
    use std::collections::{HashMap, VecDeque};

    let n = ranks.size();
    let mut outcome = RepairOutcome {
        augmentations: 0,
        readmitted: Vec::new(),
    };
    loop {
        if forests.iter().all(|f| f.len() + 1 >= n) {
            return outcome;
        }
        let mut owner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (l, forest) in forests.iter().enumerate() {
            for (k, e) in forest.iter().enumerate() {
                owner.insert(e.pair(), (l, k));
            }
        }
        let mut sources: Vec<(f64, f64, usize, usize)> = ranks
            .upper_triangle()
            .filter(|(i, j, _)| !owner.contains_key(&(*i, *j)))
            .filter_map(|(i, j, r)| r.map(|r| (r, r, i, j)))
            .collect();
        sources.sort_by(by_preference);
        let rooted: Vec<RootedForest> = forests.iter().map(|f| RootedForest::build(n, f)).collect();

        // pred[y] = (x, l): x takes y's place in forest l.
        let mut pred: HashMap<(usize, usize), ((usize, usize), usize)> = HashMap::new();
        let mut visited: std::collections::HashSet<(usize, usize)> =
            sources.iter().map(|s| (s.2, s.3)).collect();
        let mut queue: VecDeque<(usize, usize)> = sources.iter().map(|s| (s.2, s.3)).collect();
        let mut sink = None;
        'search: while let Some(x) = queue.pop_front() {
            let home = owner.get(&x).map(|o| o.0);
            for (l, rf) in rooted.iter().enumerate() {
                if home == Some(l) {
                    continue;
                }
                if rf.component[x.0] != rf.component[x.1] {
                    sink = Some((x, l));
                    break 'search;
                }
                for y in rf.path(x.0, x.1) {
                    if visited.insert(y) {
                        pred.insert(y, (x, l));
                        queue.push_back(y);
                    }
                }
            }
        }
        let Some((last, target)) = sink else {
            return outcome;
        };

        let rank_of = |p: (usize, usize)| ranks.get(p.0, p.1).expect("ranked pair");
        let mut placements = vec![(last, target)];
        let mut cur = last;
        while let Some(&(prev, l)) = pred.get(&cur) {
            placements.push((prev, l));
            cur = prev;
        }
        // Detach every moved edge first, then attach it to its new forest.
        let mut moved = Vec::new();
        for &(edge, _) in &placements {
            match owner.get(&edge) {
                Some(&(l, _)) => {
                    let k = forests[l].iter().position(|e| e.pair() == edge).expect("owned edge");
                    moved.push(Some(forests[l].swap_remove(k)));
                }
                None => moved.push(None),
            }
        }
        for ((edge, l), old) in placements.into_iter().zip(moved) {
            let rank = rank_of(edge);
            let entry = match old {
                Some(mut e) => {
                    e.mst_index = l + 1;
                    e
                }
                None => {
                    let readmitted = below_threshold(rank);
                    if readmitted {
                        outcome.readmitted.push((edge.0, edge.1, rank));
                    }
                    SelectedEdge {
                        a: edge.0,
                        b: edge.1,
                        mst_index: l + 1,
                        score: rank,
                        readmitted,
                    }
                }
            };
            forests[l].push(entry);
        }
        outcome.augmentations += 1;
    }
}

/// Connects every image to its `k` highest-scoring partners.
///
/// Ties go to the lower partner index. The result is deduplicated, so it has
/// between `N k / 2` and `N k` edges when no scores are masked.
pub fn knn_select(ranks: &ScoreMatrix, k: usize) -> Result<ImageGraph> {
    let n = ranks.size();
    if k == 0 || k >= n {
        return Err(Error::argument(format!("k = {k} must satisfy 1 <= k < N = {n}")));
    }
    let mut graph = ImageGraph::empty(n);
    for i in 0..n {
        let mut partners: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .filter_map(|j| ranks.get(i, j).map(|r| (r, j)))
            .collect();
        partners.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        for &(r, j) in partners.iter().take(k) {
            if !graph.has_edge(i, j) {
                graph.add_edge(i, j, r)?;
            }
        }
    }
    Ok(graph)
}

fn check_names(names: &[String], n: usize) -> Result<()> {
    if names.len() != n {
        return Err(Error::argument(format!(
            "manifest has {} names but the graph has {n} nodes",
            names.len()
        )));
    }
    Ok(())
}

/// One `"nameA nameB"` line per selected edge, ordered by `(mst_index, pair)`.
pub fn emit_pair_list(init: &PoseGraphInit, names: &[String]) -> Result<String> {
    check_names(names, init.num_nodes)?;
    let pairs: Vec<(usize, usize)> = init.ordered_edges().iter().map(SelectedEdge::pair).collect();
    crate::io::pairs::format_pair_list(&pairs, names)
}

/// Pair list for an arbitrary graph, in canonical pair order.
pub fn emit_graph_pair_list(graph: &ImageGraph, names: &[String]) -> Result<String> {
    check_names(names, graph.num_nodes())?;
    let mut pairs: Vec<(usize, usize)> = graph.edges().iter().map(|e| e.pair()).collect();
    pairs.sort_unstable();
    crate::io::pairs::format_pair_list(&pairs, names)
}
