//! Pair lists: one `"nameA nameB"` line per selected image pair.

use std::collections::{HashMap, HashSet};

use super::matrix::check_manifest;
use crate::error::{Error, Result};
use crate::graph::canonical;

pub fn format_pair_list(pairs: &[(usize, usize)], names: &[String]) -> Result<String> {
    check_manifest(names, "image manifest")?;
    let mut out = String::new();
    for &(a, b) in pairs {
        let (Some(na), Some(nb)) = (names.get(a), names.get(b)) else {
            return Err(Error::argument(format!("pair ({a}, {b}) outside manifest of {}", names.len())));
        };
        out.push_str(na);
        out.push(' ');
        out.push_str(nb);
        out.push('\n');
    }
    Ok(out)
}

/// Pairs in file order, as canonical `(low, high)` index pairs.
pub fn parse_pair_list(text: &str, names: &[String], context: &str) -> Result<Vec<(usize, usize)>> {
    check_manifest(names, context)?;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(Error::format(context, format!("line {}: expected two image names", line_no + 1)));
        };
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::argument(format!("{context} line {}: image {name:?} not in manifest", line_no + 1)))
        };
        let (i, j) = (lookup(a)?, lookup(b)?);
        if i == j {
            return Err(Error::format(context, format!("line {}: self pair {a:?}", line_no + 1)));
        }
        if !seen.insert(canonical(i, j)) {
            return Err(Error::format(context, format!("line {}: pair {a} {b} repeated", line_no + 1)));
        }
        pairs.push(canonical(i, j));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let names: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let text = format_pair_list(&[(0, 1), (1, 2)], &names).unwrap();
        assert_eq!(text, "a b\nb c\n");
        let pairs = parse_pair_list(&text, &names, "p").unwrap();
        assert_eq!(format_pair_list(&pairs, &names).unwrap(), text);
        assert_eq!(parse_pair_list("c a\n", &names, "p").unwrap(), vec![(0, 2)]);
    }

    #[test]
    fn rejects_bad_lines() {
        let names: Vec<String> = ["a", "b"].map(String::from).to_vec();
        assert!(parse_pair_list("a\n", &names, "p").is_err());
        assert!(matches!(parse_pair_list("a z\n", &names, "p"), Err(Error::Argument(_))));
        assert!(parse_pair_list("a a\n", &names, "p").is_err());
        assert!(parse_pair_list("a b\nb a\n", &names, "p").is_err());
        assert!(format_pair_list(&[(0, 5)], &names).is_err());
    }
}
