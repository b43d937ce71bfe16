//! Geometry-derived ground-truth edge ranks.
//!
//! A seeded synthetic scene stands in for an SfM reconstruction. For each
//! pair, `v` counts 3D points visible in both cameras and `u` is an inlier
//! count derived from `v` through a fixed inlier-rate surrogate. Both are
//! mapped to `[0, 1]` by a piecewise-linear normalization (counts up to 1000
//! fill `[0, 0.8]`, larger counts fill `[0.8, 1.0]` up to a cap) and averaged.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ScoreMatrix;

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intrinsics {
    pub focal: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    pub height: f64,
}

impl Default for Intrinsics {
    fn default() -> Self {
        Intrinsics {
            focal: 400.0,
            cx: 320.0,
            cy: 240.0,
            width: 640.0,
            height: 480.0,
        }
    }
}

/// Pinhole camera; `x_cam = rotation * x_world + translation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneCamera {
    pub name: String,
    pub rotation: Mat3,
    pub translation: Vec3,
    pub intrinsics: Intrinsics,
}

impl SceneCamera {
    /// Camera at `center` looking at `target` with world `+z` up.
    fn looking_at(name: String, center: Vec3, target: Vec3, intrinsics: Intrinsics) -> Self {
        let forward = normalize(sub(target, center));
        let right = normalize(cross(forward, [0.0, 0.0, 1.0]));
        let down = cross(forward, right);
        let rotation = [right, down, forward];
        let translation = neg(mat_vec(&rotation, center));
        SceneCamera {
            name,
            rotation,
            translation,
            intrinsics,
        }
    }

    pub fn center(&self) -> Vec3 {
        let r = &self.rotation;
        let t = self.translation;
        // -R^T t
        [
            -(r[0][0] * t[0] + r[1][0] * t[1] + r[2][0] * t[2]),
            -(r[0][1] * t[0] + r[1][1] * t[1] + r[2][1] * t[2]),
            -(r[0][2] * t[0] + r[1][2] * t[1] + r[2][2] * t[2]),
        ]
    }

    /// Pixel coordinates and depth, if the point lies in front of the camera
    /// and inside the image.
    pub fn project(&self, point: &Vec3) -> Option<([f64; 2], f64)> {
        let p = add(mat_vec(&self.rotation, *point), self.translation);
        if p[2] <= 0.0 {
            return None;
        }
        let k = &self.intrinsics;
        let u = k.focal * p[0] / p[2] + k.cx;
        let v = k.focal * p[1] / p[2] + k.cy;
        let inside = (0.0..k.width).contains(&u) && (0.0..k.height).contains(&v);
        inside.then_some(([u, v], p[2]))
    }
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn neg(a: Vec3) -> Vec3 {
    [-a[0], -a[1], -a[2]]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: Vec3) -> Vec3 {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Cameras on a circle looking outward at a cylindrical wall; banded covisibility.
    Ring,
    /// Cameras stepping along a line, looking sideways at a wall; banded covisibility.
    Corridor,
    /// Two sites each surrounded by cameras, linked through a small shared region
    /// seen by one camera from each site.
    TwoCluster,
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring" => Ok(Layout::Ring),
            "corridor" => Ok(Layout::Corridor),
            "two-cluster" | "two_cluster" => Ok(Layout::TwoCluster),
            other => Err(Error::argument(format!(
                "unknown layout {other:?}; expected ring, corridor or two-cluster"
            ))),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Ring => "ring",
            Layout::Corridor => "corridor",
            Layout::TwoCluster => "two-cluster",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticScene {
    pub layout: Layout,
    pub seed: u64,
    pub cameras: Vec<SceneCamera>,
    pub points: Vec<Vec3>,
    /// Points farther than this from a camera are not observed by it.
    pub max_depth: f64,
    /// Sorted indices of the points each camera observes.
    pub visibility: Vec<Vec<usize>>,
}

impl SyntheticScene {
    pub fn num_cameras(&self) -> usize {
        self.cameras.len()
    }

    pub fn camera_names(&self) -> Vec<String> {
        self.cameras.iter().map(|c| c.name.clone()).collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.cameras.len() {
            return Err(Error::argument(format!(
                "camera index {i} out of range for {} cameras",
                self.cameras.len()
            )));
        }
        Ok(())
    }
}

fn camera_name(i: usize) -> String {
    format!("cam_{i:04}.jpg")
}

pub fn generate_synthetic_scene(seed: u64, num_cameras: usize, num_points: usize, layout: Layout) -> Result<SyntheticScene> {
    if num_cameras < 2 {
        return Err(Error::argument(format!("need at least 2 cameras, got {num_cameras}")));
    }
    if num_points == 0 {
        return Err(Error::argument("need at least 1 point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = Intrinsics::default();
    let jitter = |rng: &mut ChaCha8Rng, s: f64| rng.random_range(-s..s);

    let (cameras, points, max_depth) = match layout {
        Layout::Ring => {
            let cams = (0..num_cameras)
                .map(|i| {
                    let theta = std::f64::consts::TAU * i as f64 / num_cameras as f64 + jitter(&mut rng, 0.02);
                    let (s, c) = theta.sin_cos();
                    let center = [c, s, jitter(&mut rng, 0.05)];
                    SceneCamera::looking_at(camera_name(i), center, [10.0 * c, 10.0 * s, 0.0], k)
                })
                .collect();
            let pts = (0..num_points)
                .map(|_| {
                    let phi = rng.random_range(0.0..std::f64::consts::TAU);
                    let r = 10.0 + jitter(&mut rng, 0.3);
                    [r * phi.cos(), r * phi.sin(), rng.random_range(-2.0..2.0)]
                })
                .collect();
            (cams, pts, 20.0)
        }
        Layout::Corridor => {
            let cams = (0..num_cameras)
                .map(|i| {
                    let x = i as f64 + jitter(&mut rng, 0.1);
                    SceneCamera::looking_at(camera_name(i), [x, 0.0, 0.0], [x, 5.0, 0.0], k)
                })
                .collect();
            let length = (num_cameras - 1) as f64;
            let pts = (0..num_points)
                .map(|_| {
                    [
                        rng.random_range(-4.0..length + 4.0),
                        5.0 + jitter(&mut rng, 0.3),
                        rng.random_range(-2.0..2.0),
                    ]
                })
                .collect();
            (cams, pts, 20.0)
        }
        Layout::TwoCluster => two_cluster_scene(&mut rng, num_cameras, num_points, k),
    };

    let mut scene = SyntheticScene {
        layout,
        seed,
        cameras,
        points,
        max_depth,
        visibility: Vec::new(),
    };
    scene.visibility = scene
        .cameras
        .iter()
        .map(|cam| {
            scene
                .points
                .iter()
                .enumerate()
                .filter(|(_, p)| cam.project(p).is_some_and(|(_, depth)| depth <= max_depth))
                .map(|(idx, _)| idx)
                .collect()
        })
        .collect();
    Ok(scene)
}

// Site A at the origin, site B at x = 10, a small shared region at x = 5.
// Site cameras sit on the far side of their site so the shared region stays
// out of range; one camera per site straddles its site and the shared region.
fn two_cluster_scene(
    rng: &mut ChaCha8Rng,
    num_cameras: usize,
    num_points: usize,
    k: Intrinsics,
) -> (Vec<SceneCamera>, Vec<Vec3>, f64) {
    const SITE_B: f64 = 10.0;
    let half = num_cameras / 2;
    let mut cams = Vec::with_capacity(num_cameras);
    for i in 0..num_cameras {
        let in_a = i < half;
        let (site, group_index, group_size) = if in_a { (0.0, i, half) } else { (SITE_B, i - half, num_cameras - half) };
        let is_bridge = num_cameras >= 4 && ((in_a && i == half - 1) || (!in_a && i == half));
        let cam = if is_bridge {
            let x = if in_a { 2.5 } else { 7.5 };
            SceneCamera::looking_at(camera_name(i), [x, -4.0, 0.0], [x, 0.0, 0.0], k)
        } else {
            let ring = group_size.saturating_sub(usize::from(num_cameras >= 4)).max(1);
            let frac = (group_index as f64 + 0.5) / ring as f64;
            // Far-side arc: angles in [105, 255] degrees around site A, mirrored for B.
            let angle = (105.0 + 150.0 * frac + rng.random_range(-2.0..2.0)).to_radians();
            let dir = if in_a { 1.0 } else { -1.0 };
            let center = [site + dir * 5.0 * angle.cos(), 5.0 * angle.sin(), rng.random_range(-0.1..0.1)];
            SceneCamera::looking_at(camera_name(i), center, [site, 0.0, 0.0], k)
        };
        cams.push(cam);
    }

    let bridge_points = (num_points / 10).max(1).min(num_points);
    let site_points = num_points - bridge_points;
    let ball = |rng: &mut ChaCha8Rng, c: Vec3, r: f64| loop {
        let p = [rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r)];
        if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= r * r {
            return add(c, p);
        }
    };
    let mut pts = Vec::with_capacity(num_points);
    for n in 0..site_points {
        let c = if n % 2 == 0 { [0.0, 0.0, 0.0] } else { [SITE_B, 0.0, 0.0] };
        pts.push(ball(rng, c, 1.5));
    }
    for _ in 0..bridge_points {
        pts.push(ball(rng, [SITE_B / 2.0, 0.0, 0.0], 0.7));
    }
    (cams, pts, 7.0)
}

/// Points visible in both cameras.
pub fn count_covisible(scene: &SyntheticScene, i: usize, j: usize) -> Result<usize> {
    scene.check_index(i)?;
    scene.check_index(j)?;
    let (a, b) = (&scene.visibility[i], &scene.visibility[j]);
    let (mut x, mut y, mut count) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    Ok(count)
}

/// Inlier-rate surrogate for two-view verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseConfig {
    /// Fraction of tentative matches rejected as outliers, in `[0, 1)`.
    pub outlier_rate: f64,
    /// Fraction of covisible points that yield a tentative match, in `[0, 1]`.
    pub detection_rate: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            outlier_rate: 0.2,
            detection_rate: 0.9,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.outlier_rate) {
            return Err(Error::argument(format!("outlier rate {} outside [0, 1)", self.outlier_rate)));
        }
        if !(0.0..=1.0).contains(&self.detection_rate) {
            return Err(Error::argument(format!("detection rate {} outside [0, 1]", self.detection_rate)));
        }
        Ok(())
    }
}

/// `round(v * (1 - outlier_rate) * detection_rate)`.
pub fn simulate_inliers(scene: &SyntheticScene, i: usize, j: usize, noise: &NoiseConfig) -> Result<u64> {
    noise.validate()?;
    let v = count_covisible(scene, i, j)?;
    Ok(inliers_from_covisible(v as u64, noise))
}

fn inliers_from_covisible(v: u64, noise: &NoiseConfig) -> u64 {
    (v as f64 * (1.0 - noise.outlier_rate) * noise.detection_rate).round() as u64
}

/// Count normalization; the breakpoint is fixed at 1000.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationConfig {
    /// Count at which the upper segment saturates at 1.0.
    pub cap: u64,
}

pub const COUNT_BREAKPOINT: u64 = 1000;

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig { cap: 10_000 }
    }
}

pub fn normalize_count(c: u64, config: &NormalizationConfig) -> f64 {
    if c <= COUNT_BREAKPOINT {
        0.8 * c as f64 / COUNT_BREAKPOINT as f64
    } else if config.cap <= COUNT_BREAKPOINT {
        1.0
    } else {
        let t = (c - COUNT_BREAKPOINT) as f64 / (config.cap - COUNT_BREAKPOINT) as f64;
        0.8 + 0.2 * t.min(1.0)
    }
}

/// Symmetric matrix of pair counts; the diagonal is unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    size: usize,
    values: Vec<u64>,
}

impl CountMatrix {
    pub fn zeros(size: usize) -> Self {
        CountMatrix {
            size,
            values: vec![0; size * size],
        }
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut m = CountMatrix::zeros(size);
        for i in 0..size {
            for j in i + 1..size {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.values[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.values[i * self.size + j] = v;
        self.values[j * self.size + i] = v;
    }
}

/// `0.5 * (norm(u) + norm(v))` for every pair.
pub fn combine_scores(u: &CountMatrix, v: &CountMatrix, config: &NormalizationConfig) -> Result<ScoreMatrix> {
    if u.size() != v.size() {
        return Err(Error::argument(format!("count matrices differ in size: {} vs {}", u.size(), v.size())));
    }
    ScoreMatrix::from_fn(u.size(), |i, j| {
        Some(0.5 * (normalize_count(u.get(i, j), config) + normalize_count(v.get(i, j), config)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub noise: NoiseConfig,
    pub normalization: NormalizationConfig,
    /// Pairs with fewer inliers are exported with rank 0.
    pub min_inliers: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            noise: NoiseConfig::default(),
            normalization: NormalizationConfig::default(),
            min_inliers: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub inliers: CountMatrix,
    pub covisible: CountMatrix,
    pub ranks: ScoreMatrix,
}

/// Inlier and covisibility counts for every pair, combined into ranks, with
/// the low-inlier filter applied.
pub fn ground_truth(scene: &SyntheticScene, config: &OracleConfig) -> Result<GroundTruth> {
    config.noise.validate()?;
    let n = scene.num_cameras();
    let mut covisible = CountMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            covisible.set(i, j, count_covisible(scene, i, j)? as u64);
        }
    }
    let inliers = CountMatrix::from_fn(n, |i, j| inliers_from_covisible(covisible.get(i, j), &config.noise));
    let mut ranks = combine_scores(&inliers, &covisible, &config.normalization)?;
    for i in 0..n {
        for j in i + 1..n {
            if inliers.get(i, j) < config.min_inliers {
                ranks.set(i, j, 0.0)?;
            }
        }
    }
    Ok(GroundTruth {
        inliers,
        covisible,
        ranks,
    })
}
