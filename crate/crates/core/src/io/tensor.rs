//! Named-tensor container used for network weights and image embeddings.
//!
//! ```text
//! POSEGRAPH-TENSORS 1
//! count <n>
//! <name> f32 <d0>x<d1>...
//! ...
//! end
//! <raw little-endian f32 payloads, manifest order, row-major>
//! ```

use std::path::Path;

use crate::error::{Error, Result};

pub const TENSOR_MAGIC: &str = "POSEGRAPH-TENSORS";
pub const TENSOR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn numel(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Ordered collection of uniquely named tensors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorSet {
    tensors: Vec<Tensor>,
}

pub(crate) fn validate_name(name: &str, context: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::format(context, format!("invalid name {name:?}: must be non-empty without whitespace")));
    }
    Ok(())
}

impl TensorSet {
    pub fn new() -> Self {
        TensorSet::default()
    }

    pub fn push(&mut self, name: impl Into<String>, shape: Vec<usize>, data: Vec<f32>) -> Result<()> {
        let name = name.into();
        validate_name(&name, "tensor manifest")?;
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::format(name, format!("invalid shape {shape:?}")));
        }
        let numel: usize = shape.iter().product();
        if numel != data.len() {
            return Err(Error::format(
                name,
                format!("shape {shape:?} needs {numel} values, got {}", data.len()),
            ));
        }
        if self.get(&name).is_some() {
            return Err(Error::format(name, "duplicate tensor name"));
        }
        self.tensors.push(Tensor { name, shape, data });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tensor> {
        self.tensors.iter()
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut header = format!("{TENSOR_MAGIC} {TENSOR_VERSION}\ncount {}\n", self.tensors.len());
        for t in &self.tensors {
            let dims: Vec<String> = t.shape.iter().map(usize::to_string).collect();
            header.push_str(&format!("{} f32 {}\n", t.name, dims.join("x")));
        }
        header.push_str("end\n");
        let mut out = header.into_bytes();
        for t in &self.tensors {
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parses a container; `context` (usually the path) prefixes header errors.
    pub fn from_bytes(bytes: &[u8], context: &str) -> Result<Self> {
        let (lines, mut payload) = split_header(bytes, context)?;
        let mut lines = lines.into_iter();

        let first = lines.next().unwrap_or_default();
        expect_magic(&first, TENSOR_MAGIC, TENSOR_VERSION, context)?;

        let count: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("count ").map(str::to_owned))
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| Error::format(context, "missing or invalid `count` line"))?;
        let manifest: Vec<String> = lines.collect();
        if manifest.len() != count {
            return Err(Error::format(
                context,
                format!("manifest lists {} tensors, header says {count}", manifest.len()),
            ));
        }

        let mut set = TensorSet::new();
        for line in manifest {
            let fields: Vec<&str> = line.split(' ').collect();
            let [name, dtype, dims] = fields[..] else {
                return Err(Error::format(context, format!("malformed manifest line {line:?}")));
            };
            if dtype != "f32" {
                return Err(Error::format(name, format!("unsupported scalar type {dtype:?}")));
            }
            let shape: Vec<usize> = dims
                .split('x')
                .map(|d| d.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::format(name, format!("invalid shape {dims:?}")))?;
            let numel: usize = shape.iter().product();
            let need = numel * 4;
            if payload.len() < need {
                return Err(Error::format(
                    name,
                    format!("tensor truncated: expected {need} bytes, found {}", payload.len()),
                ));
            }
            let data = payload[..need]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            payload = &payload[need..];
            set.push(name, shape, data)?;
        }
        if !payload.is_empty() {
            return Err(Error::format(context, format!("{} trailing bytes after last tensor", payload.len())));
        }
        Ok(set)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        TensorSet::from_bytes(&bytes, &path.display().to_string())
    }
}

/// Splits a text header terminated by an `end` line from the binary payload.
pub(crate) fn split_header<'a>(bytes: &'a [u8], context: &str) -> Result<(Vec<String>, &'a [u8])> {
    let mut lines = Vec::new();
    let mut rest = bytes;
    loop {
        let Some(nl) = rest.iter().position(|&b| b == b'\n') else {
            return Err(Error::format(context, "header not terminated by `end` line"));
        };
        let line = std::str::from_utf8(&rest[..nl])
            .map_err(|_| Error::format(context, "header is not valid UTF-8"))?;
        rest = &rest[nl + 1..];
        if line == "end" {
            return Ok((lines, rest));
        }
        lines.push(line.to_owned());
    }
}

pub(crate) fn expect_magic(line: &str, magic: &str, version: u32, context: &str) -> Result<()> {
    let mut parts = line.split(' ');
    if parts.next() != Some(magic) {
        return Err(Error::format(context, format!("bad magic: expected {magic}")));
    }
    match parts.next().and_then(|v| v.parse::<u32>().ok()) {
        Some(v) if v == version => Ok(()),
        Some(v) => Err(Error::format(context, format!("unsupported version {v}, expected {version}"))),
        None => Err(Error::format(context, "missing version")),
    }
}
