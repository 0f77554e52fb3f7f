//! Deep models on a planted-partition graph: tree propagation keeps accuracy
//! at depth 20 while stacked GCN layers lose it.

use gtnet_core::data::{synthetic_bundle, DatasetBundle, FeatureKind, SyntheticSpec, Topology};
use gtnet_core::graph::Scheme;
use gtnet_core::models::{Arch, ModelSpec};
use gtnet_core::training::{train, TrainConfig};

fn bundle() -> DatasetBundle {
    synthetic_bundle(&SyntheticSpec {
        topology: Topology::Communities { n: 300, p_in: 0.06, p_out: 0.005 },
        features: 16,
        classes: 3,
        feature_kind: FeatureKind::Gaussian { noise: 1.0 },
        seed: 8,
    })
    .unwrap()
}

fn mean_test_acc(b: &DatasetBundle, arch: Arch, hops: usize) -> f64 {
    let spec = ModelSpec {
        arch,
        hops,
        in_dim: b.num_features(),
        hidden: 32,
        classes: b.num_classes,
        dropout_input: 0.5,
        dropout_prop: if arch == Arch::Gcn { 0.0 } else { 0.5 },
        scheme: Scheme::Symmetric,
    };
    let cfg = TrainConfig { max_epochs: 200, patience: 100, ..TrainConfig::default() };
    let seeds = [0, 1, 2];
    seeds.iter().map(|&s| train(&spec, b, &cfg, s).unwrap().0.test_acc).sum::<f64>() / seeds.len() as f64
}

#[test]
fn tree_propagation_survives_depth() {
    let b = bundle();
    let shallow = mean_test_acc(&b, Arch::Gtcn, 2);
    let deep = mean_test_acc(&b, Arch::Gtcn, 20);
    let gcn_deep = mean_test_acc(&b, Arch::Gcn, 20);
    assert!(deep > 0.8, "gtcn L20 {deep:.3}");
    assert!(deep >= shallow - 0.05, "gtcn L2 {shallow:.3} L20 {deep:.3}");
    assert!(gcn_deep < deep - 0.2, "gcn L20 {gcn_deep:.3} vs gtcn L20 {deep:.3}");
}
