//! Ranking quality, graph statistics and relative-pose accuracy.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{graph_diameter, Diameter, HopDistanceMatrix, ImageGraph, ScoreMatrix};
use crate::oracle::{Mat3, Vec3};
use crate::selection::PoseGraphInit;

/// Items with a ground-truth rank and a predicted rank, both permutations of `1..=M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedList {
    truth: Vec<usize>,
    predicted: Vec<usize>,
}

fn check_permutation(ranks: &[usize], what: &str) -> Result<()> {
    let m = ranks.len();
    let mut seen = vec![false; m];
    for &r in ranks {
        if r == 0 || r > m || std::mem::replace(&mut seen[r - 1], true) {
            return Err(Error::argument(format!("{what} ranks are not a permutation of 1..={m}")));
        }
    }
    Ok(())
}

impl RankedList {
    pub fn new(truth: Vec<usize>, predicted: Vec<usize>) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::argument(format!(
                "{} ground-truth ranks but {} predicted ranks",
                truth.len(),
                predicted.len()
            )));
        }
        check_permutation(&truth, "ground-truth")?;
        check_permutation(&predicted, "predicted")?;
        Ok(RankedList { truth, predicted })
    }

    /// Ranks items by descending score on each side; ties go to the lower index.
    pub fn from_scores(truth: &[f64], predicted: &[f64]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::argument(format!("{} ground-truth scores but {} predicted", truth.len(), predicted.len())));
        }
        Self::new(ranks_descending(truth), ranks_descending(predicted))
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }

    pub fn truth(&self) -> &[usize] {
        &self.truth
    }

    pub fn predicted(&self) -> &[usize] {
        &self.predicted
    }
}

fn ranks_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; scores.len()];
    for (pos, &item) in order.iter().enumerate() {
        ranks[item] = pos + 1;
    }
    ranks
}

/// `sum (2^v - 1) / log2(rhat + 1)` with relevance `v = M - r`.
/// Overflows to infinity for lists longer than about 1000 items; [`ndcg`] does not.
pub fn dcg(list: &RankedList) -> f64 {
    let m = list.len() as i32;
    list.truth
        .iter()
        .zip(&list.predicted)
        .map(|(&r, &rh)| (((m - r as i32) as f64).exp2() - 1.0) / ((rh + 1) as f64).log2())
        .sum()
}

/// DCG with every gain multiplied by `2^-(M-1)`, which keeps the terms finite.
fn scaled_dcg(truth: &[usize], predicted: &[usize]) -> f64 {
    let m = truth.len() as i32;
    truth
        .iter()
        .zip(predicted)
        .map(|(&r, &rh)| {
            let v = m - r as i32;
            let gain = ((v - (m - 1)) as f64).exp2() - (-((m - 1) as f64)).exp2();
            gain / ((rh + 1) as f64).log2()
        })
        .sum()
}

/// DCG over the ideal DCG. An ideal DCG of zero (a single item) yields 1.
pub fn ndcg(list: &RankedList) -> f64 {
    let ideal = scaled_dcg(&list.truth, &list.truth);
    if ideal == 0.0 {
        return 1.0;
    }
    scaled_dcg(&list.truth, &list.predicted) / ideal
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingReport {
    pub num_images: usize,
    /// Images whose partner list had at least one comparable entry.
    pub evaluated_images: usize,
    pub mean_ndcg: f64,
    pub min_ndcg: f64,
    /// Lists with a single item, whose NDCG is 1 by convention.
    pub degenerate_lists: usize,
    pub per_image: Vec<f64>,
}

/// Per-image NDCG of predicted partner ordering against ground truth.
/// Pairs masked in either matrix are left out of both lists.
pub fn rank_matrix_ndcg(truth: &ScoreMatrix, predicted: &ScoreMatrix) -> Result<RankingReport> {
    let n = truth.size();
    if predicted.size() != n {
        return Err(Error::argument(format!("matrix sizes differ: {n} vs {}", predicted.size())));
    }
    let per_image: Vec<Option<(f64, bool)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (t, p): (Vec<f64>, Vec<f64>) = (0..n)
                .filter(|&j| j != i)
                .filter_map(|j| Some((truth.get(i, j)?, predicted.get(i, j)?)))
                .unzip();
            if t.is_empty() {
                return Ok(None);
            }
            let list = RankedList::from_scores(&t, &p)?;
            Ok(Some((ndcg(&list), list.len() == 1)))
        })
        .collect::<Result<_>>()?;
    let scores: Vec<f64> = per_image.iter().flatten().map(|x| x.0).collect();
    let mean = if scores.is_empty() { 0.0 } else { scores.iter().sum::<f64>() / scores.len() as f64 };
    Ok(RankingReport {
        num_images: n,
        evaluated_images: scores.len(),
        mean_ndcg: mean,
        min_ndcg: scores.iter().copied().reduce(f64::min).unwrap_or(0.0),
        degenerate_lists: per_image.iter().flatten().filter(|x| x.1).count(),
        per_image: per_image.iter().map(|x| x.map_or(f64::NAN, |v| v.0)).collect(),
    })
}

/// World-to-camera pose, `x_cam = R x_world + t`, with the quaternion
/// `(w, x, y, z)` kept as given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CameraPose {
    pub quaternion: [f64; 4],
    pub translation: Vec3,
    pub registered: bool,
    #[serde(skip)]
    rotation: Mat3,
}

fn quaternion_to_matrix(q: [f64; 4]) -> Result<Mat3> {
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::argument(format!("quaternion {q:?} cannot be normalized")));
    }
    let [w, x, y, z] = q.map(|v| v / norm);
    Ok([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])
}

/// Unit quaternion with non-negative `w` for a rotation matrix.
pub fn matrix_to_quaternion(r: &Mat3) -> [f64; 4] {
    let trace = r[0][0] + r[1][1] + r[2][2];
    let q = if trace > 0.0 {
        let s = 2.0 * (trace + 1.0).sqrt();
        [0.25 * s, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s]
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = 2.0 * (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt();
        [(r[2][1] - r[1][2]) / s, 0.25 * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s]
    } else if r[1][1] > r[2][2] {
        let s = 2.0 * (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt();
        [(r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, 0.25 * s, (r[1][2] + r[2][1]) / s]
    } else {
        let s = 2.0 * (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt();
        [(r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, 0.25 * s]
    };
    let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
    q.map(|v| v * sign)
}

impl CameraPose {
    pub fn from_quaternion(quaternion: [f64; 4], translation: Vec3, registered: bool) -> Result<Self> {
        Ok(CameraPose {
            rotation: quaternion_to_matrix(quaternion)?,
            quaternion,
            translation,
            registered,
        })
    }

    pub fn from_rotation(rotation: Mat3, translation: Vec3) -> Self {
        let quaternion = matrix_to_quaternion(&rotation);
        CameraPose {
            rotation,
            quaternion,
            translation,
            registered: true,
        }
    }

    pub fn unregistered() -> Self {
        CameraPose {
            quaternion: [1.0, 0.0, 0.0, 0.0],
            translation: [0.0; 3],
            registered: false,
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoseSet {
    pub names: Vec<String>,
    pub poses: Vec<CameraPose>,
}

impl PoseSet {
    pub fn new(names: Vec<String>, poses: Vec<CameraPose>) -> Result<Self> {
        if names.len() != poses.len() {
            return Err(Error::argument(format!("{} names but {} poses", names.len(), poses.len())));
        }
        let mut sorted: Vec<&String> = names.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::argument(format!("camera {:?} appears twice", w[0])));
        }
        Ok(PoseSet { names, poses })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn num_registered(&self) -> usize {
        self.poses.iter().filter(|p| p.registered).count()
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairErrorMode {
    /// Larger of the rotation and translation-direction errors.
    #[default]
    Max,
    RotationOnly,
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Rotation angle of `m` in degrees, stable near 0 and 180.
pub fn rotation_angle_deg(m: &Mat3) -> f64 {
    let trace = m[0][0] + m[1][1] + m[2][2];
    let axis = [m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]];
    let sin = 0.5 * axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    sin.atan2(0.5 * (trace - 1.0)).to_degrees()
}

/// Angle between two vectors in degrees; 0 when either is zero.
pub fn direction_angle_deg(a: &Vec3, b: &Vec3) -> f64 {
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let sin = cross.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    sin.atan2(cos).to_degrees()
}

fn relative(a: &CameraPose, b: &CameraPose) -> (Mat3, Vec3) {
    let r = mat_mul(&b.rotation, &transpose(&a.rotation));
    let ta = a.translation;
    let rt = [0, 1, 2].map(|i| r[i][0] * ta[0] + r[i][1] * ta[1] + r[i][2] * ta[2]);
    (r, [0, 1, 2].map(|i| b.translation[i] - rt[i]))
}

/// Error in degrees for every unordered pair registered in the ground truth;
/// pairs with an unregistered estimate get infinite error.
pub fn pairwise_pose_errors(estimated: &PoseSet, ground_truth: &PoseSet, mode: PairErrorMode) -> Result<Vec<f64>> {
    if estimated.len() != ground_truth.len() {
        return Err(Error::argument(format!(
            "estimated set has {} cameras, ground truth {}",
            estimated.len(),
            ground_truth.len()
        )));
    }
    let map: Vec<usize> = ground_truth
        .names
        .iter()
        .map(|name| {
            estimated
                .index_of(name)
                .ok_or_else(|| Error::argument(format!("camera {name:?} missing from the estimated poses")))
        })
        .collect::<Result<_>>()?;
    let registered: Vec<usize> = (0..ground_truth.len()).filter(|&i| ground_truth.poses[i].registered).collect();
    if registered.len() < 2 {
        return Err(Error::argument("ground truth needs at least 2 registered cameras"));
    }
    let pairs: Vec<(usize, usize)> = registered
        .iter()
        .enumerate()
        .flat_map(|(x, &i)| registered[x + 1..].iter().map(move |&j| (i, j)))
        .collect();
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ei, ej) = (&estimated.poses[map[i]], &estimated.poses[map[j]]);
            if !ei.registered || !ej.registered {
                return f64::INFINITY;
            }
            let (r_est, t_est) = relative(ei, ej);
            let (r_gt, t_gt) = relative(&ground_truth.poses[i], &ground_truth.poses[j]);
            let rot = rotation_angle_deg(&mat_mul(&r_est, &transpose(&r_gt)));
            match mode {
                PairErrorMode::RotationOnly => rot,
                PairErrorMode::Max => rot.max(direction_angle_deg(&t_est, &t_gt)),
            }
        })
        .collect())
}

/// Normalized area under the recall curve up to `threshold`:
/// the mean of `max(0, 1 - e / threshold)` over pair errors `e`.
pub fn auc_from_errors(errors: &[f64], threshold: f64) -> f64 {
    if errors.is_empty() {
        return 0.0;
    }
    errors.iter().map(|&e| (1.0 - e / threshold).clamp(0.0, 1.0)).sum::<f64>() / errors.len() as f64
}

/// AUC at each threshold (degrees).
pub fn relative_pose_auc(
    estimated: &PoseSet,
    ground_truth: &PoseSet,
    thresholds: &[f64],
    mode: PairErrorMode,
) -> Result<Vec<f64>> {
    if let Some(t) = thresholds.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::argument(format!("AUC threshold {t} must be positive")));
    }
    let errors = pairwise_pose_errors(estimated, ground_truth, mode)?;
    Ok(thresholds.iter().map(|&t| auc_from_errors(&errors, t)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoseReport {
    pub mode: PairErrorMode,
    pub num_pairs: usize,
    pub registered_estimated: usize,
    pub registered_ground_truth: usize,
    pub thresholds: Vec<f64>,
    pub auc: Vec<f64>,
}

pub fn pose_report(estimated: &PoseSet, ground_truth: &PoseSet, thresholds: &[f64], mode: PairErrorMode) -> Result<PoseReport> {
    let auc = relative_pose_auc(estimated, ground_truth, thresholds, mode)?;
    let registered = ground_truth.num_registered();
    Ok(PoseReport {
        mode,
        num_pairs: registered * (registered - 1) / 2,
        registered_estimated: estimated.num_registered(),
        registered_ground_truth: registered,
        thresholds: thresholds.to_vec(),
        auc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub num_components: usize,
    pub diameter: Diameter,
    pub mean_degree: f64,
    pub per_iteration_diameters: Vec<Diameter>,
}

pub fn graph_report(graph: &ImageGraph) -> GraphReport {
    let n = graph.num_nodes();
    GraphReport {
        num_nodes: n,
        num_edges: graph.num_edges(),
        num_components: graph.num_components(),
        diameter: graph_diameter(&HopDistanceMatrix::compute(graph)),
        mean_degree: if n == 0 { 0.0 } else { 2.0 * graph.num_edges() as f64 / n as f64 },
        per_iteration_diameters: Vec::new(),
    }
}

/// [`graph_report`] of the tree union, with the diameter after each tree.
pub fn selection_graph_report(init: &PoseGraphInit) -> GraphReport {
    let mut report = graph_report(&init.to_graph());
    report.per_iteration_diameters = init.iterations.iter().map(|it| it.union_diameter).collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(truth: &[usize], predicted: &[usize]) -> RankedList {
        RankedList::new(truth.to_vec(), predicted.to_vec()).unwrap()
    }

    #[test]
    fn dcg_examples() {
        assert_eq!(dcg(&list(&[1], &[1])), 0.0);
        assert_eq!(dcg(&list(&[1, 2], &[1, 2])), 1.0);
        assert!((dcg(&list(&[1, 2], &[2, 1])) - 1.0 / 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn ndcg_examples() {
        assert_eq!(ndcg(&list(&[1, 2, 3], &[1, 2, 3])), 1.0);
        assert!((ndcg(&list(&[1, 2], &[2, 1])) - 1.0 / 3f64.log2()).abs() < 1e-12);
        assert_eq!(ndcg(&list(&[1], &[1])), 1.0);
        let m = 3000;
        let ident: Vec<usize> = (1..=m).collect();
        let rev: Vec<usize> = (1..=m).rev().collect();
        assert_eq!(ndcg(&list(&ident, &ident)), 1.0);
        let worst = ndcg(&list(&ident, &rev));
        assert!(worst > 0.0 && worst < 1.0);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(RankedList::new(vec![1, 1], vec![1, 2]).is_err());
        assert!(RankedList::new(vec![1, 2], vec![0, 1]).is_err());
        assert!(RankedList::new(vec![1, 2], vec![1]).is_err());
        assert!(RankedList::new(vec![1, 3], vec![1, 2]).is_err());
    }

    #[test]
    fn ranks_from_scores() {
        let l = RankedList::from_scores(&[0.1, 0.9, 0.5], &[0.3, 0.3, 0.2]).unwrap();
        assert_eq!(l.truth(), &[3, 1, 2]);
        assert_eq!(l.predicted(), &[1, 2, 3]);
    }

    #[test]
    fn matrix_ndcg_identity() {
        let m = ScoreMatrix::from_fn(5, |i, j| Some(((i * 7 + j * 3) % 11) as f64 / 11.0)).unwrap();
        let report = rank_matrix_ndcg(&m, &m).unwrap();
        assert_eq!(report.mean_ndcg, 1.0);
        assert_eq!(report.evaluated_images, 5);
    }

    fn rot_z(deg: f64) -> Mat3 {
        let (s, c) = deg.to_radians().sin_cos();
        [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
    }

    fn poses(rots: &[f64]) -> PoseSet {
        let names = (0..rots.len()).map(|i| format!("c{i}")).collect();
        let poses = rots
            .iter()
            .enumerate()
            .map(|(i, &d)| CameraPose::from_rotation(rot_z(d), [i as f64, 1.0, 0.5]))
            .collect();
        PoseSet::new(names, poses).unwrap()
    }

    #[test]
    fn quaternion_round_trip() {
        for deg in [0.0, 30.0, 179.0, -120.0] {
            let r = rot_z(deg);
            let p = CameraPose::from_rotation(r, [0.0; 3]);
            let back = quaternion_to_matrix(p.quaternion).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((back[i][j] - r[i][j]).abs() < 1e-12);
                }
            }
        }
        assert!(CameraPose::from_quaternion([0.0; 4], [0.0; 3], true).is_err());
    }

    #[test]
    fn identical_poses_score_one() {
        let gt = poses(&[0.0, 20.0, 45.0, 90.0]);
        let auc = relative_pose_auc(&gt, &gt, &[2.5, 5.0], PairErrorMode::Max).unwrap();
        assert_eq!(auc, vec![1.0, 1.0]);
    }

    #[test]
    fn unregistered_scores_zero() {
        let gt = poses(&[0.0, 20.0, 45.0]);
        let mut est = gt.clone();
        for p in &mut est.poses {
            *p = CameraPose::unregistered();
        }
        assert_eq!(relative_pose_auc(&est, &gt, &[5.0], PairErrorMode::Max).unwrap(), vec![0.0]);
    }

    #[test]
    fn half_threshold_errors() {
        // Every relative rotation is off by exactly 2.5 degrees.
        let gt = poses(&[0.0, 10.0]);
        let est = poses(&[0.0, 12.5]);
        let auc = relative_pose_auc(&est, &gt, &[5.0], PairErrorMode::RotationOnly).unwrap();
        assert!((auc[0] - 0.5).abs() < 1e-9);
        assert_eq!(auc_from_errors(&[2.5, 2.5, 2.5], 5.0), 0.5);
    }

    #[test]
    fn pose_argument_errors() {
        let gt = poses(&[0.0, 10.0]);
        let other = PoseSet::new(
            vec!["x".into(), "c1".into()],
            vec![CameraPose::unregistered(), CameraPose::unregistered()],
        )
        .unwrap();
        assert!(relative_pose_auc(&other, &gt, &[5.0], PairErrorMode::Max).is_err());
        assert!(relative_pose_auc(&gt, &gt, &[0.0], PairErrorMode::Max).is_err());
        let single = poses(&[0.0]);
        assert!(relative_pose_auc(&single, &single, &[5.0], PairErrorMode::Max).is_err());
        assert!(PoseSet::new(vec!["a".into(), "a".into()], vec![CameraPose::unregistered(); 2]).is_err());
    }

    #[test]
    fn angle_helpers() {
        assert!((rotation_angle_deg(&rot_z(179.9)) - 179.9).abs() < 1e-9);
        assert!(rotation_angle_deg(&rot_z(0.0)).abs() < 1e-12);
        assert!((direction_angle_deg(&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0]) - 90.0).abs() < 1e-12);
        assert_eq!(direction_angle_deg(&[0.0; 3], &[1.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn graph_report_examples() {
        let path = ImageGraph::from_pairs(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let r = graph_report(&path);
        assert_eq!((r.num_edges, r.num_components, r.diameter), (4, 1, Diameter::Finite(4)));
        assert!((r.mean_degree - 1.6).abs() < 1e-12);
        let split = ImageGraph::from_pairs(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(graph_report(&split).diameter, Diameter::Infinite);
    }
}
