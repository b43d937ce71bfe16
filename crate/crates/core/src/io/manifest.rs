//! Image manifests (one name per line) and embedding containers.

use std::path::Path;

use super::matrix::check_manifest;
use super::tensor::TensorSet;
use crate::error::{Error, Result};
use crate::gnn::NodeEmbedding;

/// Tensor holding one embedding per row in an embeddings container.
pub const EMBEDDINGS_TENSOR: &str = "embeddings";

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("img_{i:05}")).collect()
}

pub fn parse_manifest(text: &str, context: &str) -> Result<Vec<String>> {
    let names: Vec<String> = text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect();
    check_manifest(&names, context)?;
    Ok(names)
}

pub fn read_manifest(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, &path.display().to_string())
}

pub fn format_manifest(names: &[String]) -> Result<String> {
    check_manifest(names, "image manifest")?;
    Ok(names.iter().map(|n| format!("{n}\n")).collect())
}

pub fn embeddings_to_tensors(nodes: &[NodeEmbedding]) -> Result<TensorSet> {
    let dim = nodes.first().map_or(0, NodeEmbedding::dim);
    if nodes.iter().any(|e| e.dim() != dim) {
        return Err(Error::argument("embeddings have differing dimensions"));
    }
    let mut set = TensorSet::new();
    let data = nodes.iter().flat_map(|e| e.0.iter().map(|&v| v as f32)).collect();
    set.push(EMBEDDINGS_TENSOR, vec![nodes.len(), dim], data)?;
    Ok(set)
}

pub fn embeddings_from_tensors(set: &TensorSet, context: &str) -> Result<Vec<NodeEmbedding>> {
    let t = set
        .get(EMBEDDINGS_TENSOR)
        .ok_or_else(|| Error::format(context, format!("missing tensor {EMBEDDINGS_TENSOR:?}")))?;
    let [n, d] = t.shape[..] else {
        return Err(Error::format(EMBEDDINGS_TENSOR, format!("expected a 2-D tensor, got shape {:?}", t.shape)));
    };
    if t.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::format(EMBEDDINGS_TENSOR, "non-finite embedding value"));
    }
    Ok((0..n)
        .map(|i| NodeEmbedding(t.data[i * d..(i + 1) * d].iter().map(|&v| f64::from(v)).collect()))
        .collect())
}

pub fn read_embeddings(path: &Path) -> Result<Vec<NodeEmbedding>> {
    embeddings_from_tensors(&TensorSet::read(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings_round_trip() {
        let nodes = vec![NodeEmbedding(vec![1.0, -2.5]), NodeEmbedding(vec![0.0, 0.25])];
        let set = embeddings_to_tensors(&nodes).unwrap();
        assert_eq!(embeddings_from_tensors(&set, "e").unwrap(), nodes);
        assert!(embeddings_from_tensors(&TensorSet::new(), "e").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let names = parse_manifest("a.jpg\nb.jpg\n\n", "m").unwrap();
        assert_eq!(format_manifest(&names).unwrap(), "a.jpg\nb.jpg\n");
        assert!(parse_manifest("a\na\n", "m").is_err());
    }
}
