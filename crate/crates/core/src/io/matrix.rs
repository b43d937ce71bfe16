//! Symmetric score matrix with an image-name manifest.
//!
//! ```text
//! POSEGRAPH-MATRIX 1
//! size <N>
//! masked <0|1>
//! <name of image 0>
//! ...
//! end
//! <N(N-1)/2 little-endian f32 values: row-major upper triangle, NaN = masked>
//! ```

use std::path::Path;

use super::tensor::{expect_magic, split_header, validate_name};
use crate::error::{Error, Result};
use crate::graph::ScoreMatrix;

pub const MATRIX_MAGIC: &str = "POSEGRAPH-MATRIX";
pub const MATRIX_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub names: Vec<String>,
    pub scores: ScoreMatrix,
}

fn header_value(line: Option<String>, key: &str, context: &str) -> Result<usize> {
    line.as_deref()
        .and_then(|l| l.strip_prefix(key))
        .and_then(|l| l.strip_prefix(' '))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::format(context, format!("missing or invalid `{key}` line")))
}

impl MatrixFile {
    pub fn new(names: Vec<String>, scores: ScoreMatrix) -> Result<Self> {
        if names.len() != scores.size() {
            return Err(Error::argument(format!(
                "manifest has {} names but the matrix is {}x{}",
                names.len(),
                scores.size(),
                scores.size()
            )));
        }
        check_manifest(&names, "image manifest")?;
        Ok(MatrixFile { names, scores })
    }

    /// Values are stored as f32, so a write/read cycle rounds scores to single precision.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.scores.size();
        let mut header = format!(
            "{MATRIX_MAGIC} {MATRIX_VERSION}\nsize {n}\nmasked {}\n",
            u8::from(self.scores.has_masked())
        );
        for name in &self.names {
            header.push_str(name);
            header.push('\n');
        }
        header.push_str("end\n");
        let mut out = header.into_bytes();
        out.reserve(n * n.saturating_sub(1) * 2);
        for (_, _, v) in self.scores.upper_triangle() {
            out.extend_from_slice(&v.map_or(f32::NAN, |v| v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], context: &str) -> Result<Self> {
        let (lines, payload) = split_header(bytes, context)?;
        let mut lines = lines.into_iter();
        expect_magic(&lines.next().unwrap_or_default(), MATRIX_MAGIC, MATRIX_VERSION, context)?;
        let n = header_value(lines.next(), "size", context)?;
        let masked = match header_value(lines.next(), "masked", context)? {
            0 => false,
            1 => true,
            other => return Err(Error::format(context, format!("masked flag must be 0 or 1, got {other}"))),
        };
        let names: Vec<String> = lines.collect();
        if names.len() != n {
            return Err(Error::format(context, format!("manifest lists {} images, header says {n}", names.len())));
        }
        check_manifest(&names, context)?;
        let expected = n * n.saturating_sub(1) / 2 * 4;
        if payload.len() != expected {
            return Err(Error::format(
                context,
                format!("payload has {} bytes, expected {expected} for {n} images", payload.len()),
            ));
        }
        let mut values = payload.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]));
        let mut scores = ScoreMatrix::masked(n);
        let mut saw_mask = false;
        for i in 0..n {
            for j in i + 1..n {
                let v = values.next().expect("payload length checked");
                if v.is_nan() {
                    saw_mask = true;
                } else {
                    scores
                        .set(i, j, f64::from(v))
                        .map_err(|e| Error::format(context, format!("entry ({i}, {j}): {e}")))?;
                }
            }
        }
        if saw_mask && !masked {
            return Err(Error::format(context, "payload contains masked entries but the header says none"));
        }
        Ok(MatrixFile { names, scores })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        MatrixFile::from_bytes(&bytes, &path.display().to_string())
    }
}

/// Names must be non-empty, whitespace-free and unique.
pub fn check_manifest(names: &[String], context: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::with_capacity(names.len());
    for name in names {
        validate_name(name, context)?;
        if !seen.insert(name.as_str()) {
            return Err(Error::format(context, format!("image {name:?} listed twice")));
        }
    }
    Ok(())
}
