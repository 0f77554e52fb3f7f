use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DatasetBundle, Splits};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub num_nodes: usize,
    pub num_features: usize,
    pub num_classes: usize,
    pub directed: bool,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::load(path, None, e.to_string()))
}

/// Parses `a<TAB>b` lines of non-negative integers. Blank lines are errors.
fn parse_pairs(path: &Path, text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = Some(i + 1);
        let mut fields = line.split('\t');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => return Err(Error::load(path, lineno, format!("expected two tab-separated integers, got '{line}'"))),
        };
        let parse = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::load(path, lineno, format!("'{s}' is not a non-negative integer")))
        };
        out.push((parse(a)?, parse(b)?));
    }
    Ok(out)
}

pub fn load_dataset(dir: &Path) -> Result<DatasetBundle> {
    if !dir.is_dir() {
        return Err(Error::load(dir, None, "dataset directory not found"));
    }
    let meta_path = dir.join("meta.json");
    let meta: Meta = serde_json::from_str(&read_text(&meta_path)?)
        .map_err(|e| Error::load(&meta_path, Some(e.line()), e.to_string()))?;
    let n = meta.num_nodes;

    let edges_path = dir.join("edges.tsv");
    let edges = parse_pairs(&edges_path, &read_text(&edges_path)?)?;
    for (i, &(u, v)) in edges.iter().enumerate() {
        if u >= n || v >= n {
            return Err(Error::load(&edges_path, Some(i + 1), format!("edge ({u}, {v}) outside {n} nodes")));
        }
    }
    let graph = Graph::build(n, &edges, meta.directed)?;

    let feat_path = dir.join("features.bin");
    let bytes = fs::read(&feat_path).map_err(|e| Error::load(&feat_path, None, e.to_string()))?;
    let expected = n * meta.num_features * 4;
    if bytes.len() != expected {
        return Err(Error::load(
            &feat_path,
            None,
            format!(
                "expected {expected} bytes for {n} x {} f32 features, found {} ({} rows)",
                meta.num_features,
                bytes.len(),
                bytes.len() / (4 * meta.num_features.max(1))
            ),
        ));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let features = Tensor::new(n, meta.num_features, data)?;

    let labels_path = dir.join("labels.tsv");
    let mut labels = vec![None; n];
    for (i, (node, class)) in parse_pairs(&labels_path, &read_text(&labels_path)?)?.into_iter().enumerate() {
        let lineno = Some(i + 1);
        if node >= n {
            return Err(Error::load(&labels_path, lineno, format!("node {node} outside {n} nodes")));
        }
        if class >= meta.num_classes {
            return Err(Error::load(&labels_path, lineno, format!("class {class} outside {} classes", meta.num_classes)));
        }
        if labels[node].replace(class).is_some() {
            return Err(Error::load(&labels_path, lineno, format!("node {node} labelled twice")));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(u, l)| l.ok_or_else(|| Error::load(&labels_path, None, format!("node {u} has no label"))))
        .collect::<Result<Vec<_>>>()?;

    let splits_path = dir.join("splits.json");
    let splits = if splits_path.exists() {
        let s: Splits = serde_json::from_str(&read_text(&splits_path)?)
            .map_err(|e| Error::load(&splits_path, Some(e.line()), e.to_string()))?;
        Some(s.validated(n).map_err(|e| Error::load(&splits_path, None, e.to_string()))?)
    } else {
        None
    };

    DatasetBundle::new(graph, features, labels, meta.num_classes, splits)
}

/// Writes the canonical form: sorted edges (`u < v` for undirected
/// graphs), labels in node order, sorted splits. Saving a loaded bundle
/// reproduces the same bytes.
pub fn save_dataset(bundle: &DatasetBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let meta = Meta {
        num_nodes: bundle.num_nodes(),
        num_features: bundle.num_features(),
        num_classes: bundle.num_classes,
        directed: bundle.graph.is_directed(),
    };
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)? + "\n")?;

    let mut edges = Vec::new();
    for (u, v) in bundle.graph.edge_list() {
        writeln!(edges, "{u}\t{v}")?;
    }
    fs::write(dir.join("edges.tsv"), edges)?;

    let mut feats = Vec::with_capacity(bundle.features.len() * 4);
    for &x in bundle.features.data() {
        feats.extend_from_slice(&x.to_le_bytes());
    }
    fs::write(dir.join("features.bin"), feats)?;

    let mut labels = Vec::new();
    for (u, l) in bundle.labels.iter().enumerate() {
        writeln!(labels, "{u}\t{l}")?;
    }
    fs::write(dir.join("labels.tsv"), labels)?;

    let splits_path = dir.join("splits.json");
    match &bundle.splits {
        Some(s) => fs::write(splits_path, serde_json::to_string(s)? + "\n")?,
        None if splits_path.exists() => fs::remove_file(splits_path)?,
        None => {}
    }
    Ok(())
}
