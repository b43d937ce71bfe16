//! Pose files: one whitespace-delimited record per camera,
//! `name qw qx qy qz tx ty tz registered`, with `registered` 0 or 1.
//! Lines starting with `#` are comments.

use std::path::Path;

use super::matrix::check_manifest;
use crate::error::{Error, Result};
use crate::metrics::{CameraPose, PoseSet};

pub const POSE_HEADER: &str = "# name qw qx qy qz tx ty tz registered";

pub fn format_poses(set: &PoseSet) -> Result<String> {
    check_manifest(&set.names, "pose manifest")?;
    let mut out = String::from(POSE_HEADER);
    out.push('\n');
    for (name, pose) in set.names.iter().zip(&set.poses) {
        let [w, x, y, z] = pose.quaternion;
        let [tx, ty, tz] = pose.translation;
        out.push_str(&format!("{name} {w} {x} {y} {z} {tx} {ty} {tz} {}\n", u8::from(pose.registered)));
    }
    Ok(out)
}

pub fn parse_poses(text: &str, context: &str) -> Result<PoseSet> {
    let mut names = Vec::new();
    let mut poses = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::format(context, format!("line {}: {msg}", line_no + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(bad(&format!("expected 9 fields, found {}", fields.len())));
        }
        let nums: Vec<f64> = fields[1..8]
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| bad("non-numeric or non-finite pose value"))?;
        let registered = match fields[8] {
            "0" => false,
            "1" => true,
            other => return Err(bad(&format!("registered flag must be 0 or 1, got {other:?}"))),
        };
        let pose = CameraPose::from_quaternion([nums[0], nums[1], nums[2], nums[3]], [nums[4], nums[5], nums[6]], registered)
            .map_err(|e| bad(&e.to_string()))?;
        names.push(fields[0].to_owned());
        poses.push(pose);
    }
    check_manifest(&names, context)?;
    PoseSet::new(names, poses)
}

pub fn read_poses(path: &Path) -> Result<PoseSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_poses(&text, &path.display().to_string())
}

pub fn write_poses(set: &PoseSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_poses(set)?).map_err(|e| Error::io(path, e))
}
