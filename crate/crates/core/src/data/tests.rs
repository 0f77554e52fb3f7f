use super::*;
use crate::graph::SynthKind;
use std::fs;
use std::path::Path;

fn community(n: usize, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        topology: Topology::Communities { n, p_in: 0.2, p_out: 0.02 },
        features: 6,
        classes: 3,
        feature_kind: FeatureKind::Gaussian { noise: 1.0 },
        seed,
    }
}

fn write_fixture(dir: &Path, meta: &str, edges: &str, features: &[f32], labels: &str) {
    fs::write(dir.join("meta.json"), meta).unwrap();
    fs::write(dir.join("edges.tsv"), edges).unwrap();
    let bytes: Vec<u8> = features.iter().flat_map(|x| x.to_le_bytes()).collect();
    fs::write(dir.join("features.bin"), bytes).unwrap();
    fs::write(dir.join("labels.tsv"), labels).unwrap();
}

const TWO_NODE_META: &str = r#"{"num_nodes": 2, "num_features": 2, "num_classes": 2, "directed": false}"#;

#[test]
fn two_node_fixture_loads_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), TWO_NODE_META, "1\t0\n", &[1.0, -0.5, 0.25, 3.0], "0\t0\n1\t1\n");
    fs::write(dir.path().join("splits.json"), r#"{"train": [0], "val": [1], "test": [1]}"#).unwrap();
    assert!(load_dataset(dir.path()).is_err(), "overlapping splits must be rejected");
    fs::remove_file(dir.path().join("splits.json")).unwrap();

    let b = load_dataset(dir.path()).unwrap();
    assert_eq!(b.graph.num_arcs(), 2);
    assert_eq!(b.features.data(), &[1.0, -0.5, 0.25, 3.0]);
    assert_eq!(b.labels, vec![0, 1]);
    assert!(b.splits.is_none());

    let out = tempfile::tempdir().unwrap();
    save_dataset(&b, out.path()).unwrap();
    let again = load_dataset(out.path()).unwrap();
    assert_eq!(again, b);
    assert!(again.features.data().iter().zip(b.features.data()).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn save_load_save_is_byte_identical() {
    let b = synthetic_bundle(&community(60, 4)).unwrap();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    save_dataset(&b, d1.path()).unwrap();
    save_dataset(&load_dataset(d1.path()).unwrap(), d2.path()).unwrap();
    for f in ["meta.json", "edges.tsv", "features.bin", "labels.tsv", "splits.json"] {
        assert_eq!(fs::read(d1.path().join(f)).unwrap(), fs::read(d2.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn feature_count_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let meta = r#"{"num_nodes": 5, "num_features": 2, "num_classes": 1, "directed": false}"#;
    write_fixture(dir.path(), meta, "", &[0.0; 8], "0\t0\n1\t0\n2\t0\n3\t0\n4\t0\n");
    let err = load_dataset(dir.path()).unwrap_err().to_string();
    assert!(err.contains("features.bin") && err.contains("4 rows"), "{err}");
}

#[test]
fn malformed_rows_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), TWO_NODE_META, "0\t1\n0 1\n", &[0.0; 4], "0\t0\n1\t1\n");
    let err = load_dataset(dir.path()).unwrap_err().to_string();
    assert!(err.contains("edges.tsv:2"), "{err}");

    write_fixture(dir.path(), TWO_NODE_META, "0\t1\n", &[0.0; 4], "0\t0\n");
    let err = load_dataset(dir.path()).unwrap_err().to_string();
    assert!(err.contains("labels.tsv") && err.contains("node 1 has no label"), "{err}");

    write_fixture(dir.path(), TWO_NODE_META, "0\t5\n", &[0.0; 4], "0\t0\n1\t1\n");
    let err = load_dataset(dir.path()).unwrap_err().to_string();
    assert!(err.contains("edges.tsv:1"), "{err}");

    fs::remove_file(dir.path().join("meta.json")).unwrap();
    let err = load_dataset(dir.path()).unwrap_err().to_string();
    assert!(err.contains("meta.json"), "{err}");
}

#[test]
fn self_loops_dropped_on_load() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), TWO_NODE_META, "0\t0\n0\t1\n", &[0.0; 4], "0\t0\n1\t1\n");
    let b = load_dataset(dir.path()).unwrap();
    assert_eq!(b.graph.num_arcs(), 2);
    assert_eq!(b.graph.self_loops_removed(), 1);
}

#[test]
fn missing_directory() {
    let err = load_dataset(Path::new("/nonexistent/cora")).unwrap_err().to_string();
    assert!(err.contains("not found"), "{err}");
}

#[test]
fn random_split_counts_and_determinism() {
    // 15 classes as in Coauthor-CS, sized so the test set is non-trivial.
    let labels: Vec<usize> = (0..15 * 70).map(|u| u % 15).collect();
    let s = random_split(&labels, 15, 20, 30, 1).unwrap();
    assert_eq!((s.train.len(), s.val.len(), s.test.len()), (300, 450, 15 * 70 - 750));
    assert_eq!(s, random_split(&labels, 15, 20, 30, 1).unwrap());
    assert_ne!(s, random_split(&labels, 15, 20, 30, 2).unwrap());

    let mut seen = vec![0; labels.len()];
    for &i in s.train.iter().chain(&s.val).chain(&s.test) {
        seen[i] += 1;
    }
    assert!(seen.iter().all(|&k| k == 1));
    for c in 0..15 {
        assert_eq!(s.train.iter().filter(|&&u| labels[u] == c).count(), 20);
    }
}

#[test]
fn random_split_errors() {
    let labels: Vec<usize> = (0..100).map(|u| u % 2).collect();
    let err = random_split(&labels, 2, 20, 30, 0).unwrap_err().to_string();
    assert!(err.contains("no test"), "{err}");
    let small: Vec<usize> = (0..60).map(|u| usize::from(u >= 55)).collect();
    let err = random_split(&small, 2, 20, 30, 0).unwrap_err().to_string();
    assert!(err.contains("class 1"), "{err}");
}

#[test]
fn synthetic_bundles() {
    let a = synthetic_bundle(&community(90, 3)).unwrap();
    assert_eq!(a, synthetic_bundle(&community(90, 3)).unwrap());
    assert_ne!(a, synthetic_bundle(&community(90, 4)).unwrap());
    let s = a.splits().unwrap();
    assert_eq!((s.train.len(), s.val.len(), s.test.len()), (18, 18, 54));

    let probe = SyntheticSpec {
        topology: Topology::Synth { graph: SynthKind::Complete { n: 3 } },
        features: 3,
        classes: 1,
        feature_kind: FeatureKind::Identity,
        seed: 0,
    };
    let b = synthetic_bundle(&probe).unwrap();
    assert_eq!(b.features, Tensor::identity(3));
    assert_eq!(b.graph.num_arcs(), 6);

    let single = SyntheticSpec {
        topology: Topology::Synth { graph: SynthKind::Path { n: 1 } },
        features: 1,
        classes: 1,
        feature_kind: FeatureKind::Identity,
        seed: 0,
    };
    assert!(synthetic_bundle(&single).is_err());
}

#[test]
fn bundle_validation() {
    let g = Graph::build(2, &[(0, 1)], false).unwrap();
    assert!(DatasetBundle::new(g.clone(), Tensor::zeros(3, 1), vec![0, 0], 1, None).is_err());
    assert!(DatasetBundle::new(g.clone(), Tensor::zeros(2, 1), vec![0, 2], 2, None).is_err());
    let mut b = DatasetBundle::new(g, Tensor::from_fn(2, 2, |r, c| (r + c + 1) as f32), vec![0, 1], 2, None).unwrap();
    b.row_normalize_features();
    assert_eq!(b.features.data(), &[1.0 / 3.0, 2.0 / 3.0, 0.4, 0.6]);
}
