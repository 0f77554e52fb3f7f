//! Published hyperparameters keyed by model, dataset and depth.

use std::fmt;
use std::str::FromStr;

use gtnet_core::models::Arch;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetName {
    Cora,
    Citeseer,
    Pubmed,
    CoauthorCs,
    OgbnArxiv,
}

impl DatasetName {
    pub const ALL: [DatasetName; 5] = [
        DatasetName::Cora,
        DatasetName::Citeseer,
        DatasetName::Pubmed,
        DatasetName::CoauthorCs,
        DatasetName::OgbnArxiv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetName::Cora => "cora",
            DatasetName::Citeseer => "citeseer",
            DatasetName::Pubmed => "pubmed",
            DatasetName::CoauthorCs => "coauthor-cs",
            DatasetName::OgbnArxiv => "ogbn-arxiv",
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "cora" => Ok(DatasetName::Cora),
            "citeseer" => Ok(DatasetName::Citeseer),
            "pubmed" => Ok(DatasetName::Pubmed),
            "coauthorcs" | "cs" => Ok(DatasetName::CoauthorCs),
            "ogbnarxiv" | "arxiv" => Ok(DatasetName::OgbnArxiv),
            _ => {
                let valid: Vec<&str> = DatasetName::ALL.iter().map(|d| d.name()).collect();
                Err(format!("no preset for dataset '{s}' (known: {})", valid.join(", ")))
            }
        }
    }
}

/// Everything a preset fixes. Model dimensions `D` and `C` come from the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub hops: usize,
    pub hidden: usize,
    pub dropout_input: f64,
    pub dropout_prop: f64,
    pub lr: f64,
    pub weight_decay: f64,
    pub patience: usize,
    pub max_epochs: usize,
}

/// Depth used when neither a flag nor a preset says otherwise.
pub fn default_hops(arch: Arch, dataset: Option<DatasetName>) -> usize {
    match (arch.parent(), dataset) {
        (Arch::Gcn | Arch::Gat, Some(DatasetName::OgbnArxiv)) => 3,
        (Arch::Gcn | Arch::Gat, _) => 2,
        (Arch::Gtcn, Some(DatasetName::OgbnArxiv)) => 5,
        (Arch::Gtan, Some(DatasetName::OgbnArxiv)) => 4,
        _ => 10,
    }
}

/// Settings for the accuracy experiments at the model's default depth,
/// before any depth-specific adjustment.
fn base(arch: Arch, d: DatasetName) -> Preset {
    use DatasetName::*;
    let p = |hidden, di, dp, lr, wd, patience| Preset {
        hops: default_hops(arch, Some(d)),
        hidden,
        dropout_input: di,
        dropout_prop: dp,
        lr,
        weight_decay: wd,
        patience,
        max_epochs: 1000,
    };
    match (arch, d) {
        (Arch::Gcn, OgbnArxiv) => p(256, 0.5, 0.0, 0.01, 0.0, 200),
        (Arch::Gcn, _) => p(64, 0.5, 0.0, 0.01, 5e-4, 200),

        (Arch::Gat, Cora | Citeseer) => p(64, 0.8, 0.8, 0.01, 5e-4, 200),
        (Arch::Gat, Pubmed | CoauthorCs) => p(64, 0.8, 0.2, 0.01, 5e-4, 200),
        (Arch::Gat, OgbnArxiv) => p(128, 0.2, 0.0, 0.01, 0.0, 200),

        (Arch::Gtcn, Cora) => p(64, 0.6, 0.6, 0.01, 5e-4, 200),
        (Arch::Gtcn, Citeseer) => p(64, 0.8, 0.6, 0.01, 5e-4, 200),
        (Arch::Gtcn, Pubmed) => p(64, 0.8, 0.5, 0.02, 5e-4, 200),
        (Arch::Gtcn, CoauthorCs) => p(64, 0.6, 0.2, 0.01, 5e-3, 200),
        (Arch::Gtcn, OgbnArxiv) => p(256, 0.2, 0.2, 0.01, 5e-5, 200),

        (Arch::Gtan, Cora | Pubmed) => p(64, 0.6, 0.0, 0.01, 5e-4, 300),
        (Arch::Gtan, Citeseer) => p(64, 0.6, 0.6, 0.01, 5e-4, 300),
        (Arch::Gtan, CoauthorCs) => p(64, 0.2, 0.2, 0.01, 5e-3, 300),
        (Arch::Gtan, OgbnArxiv) => p(128, 0.2, 0.0, 0.01, 5e-5, 300),

        (variant, _) => Preset { hops: default_hops(variant, Some(d)), ..base(variant.parent(), d) },
    }
}

/// Published settings for `arch` on `dataset`, at `hops` if given.
///
/// GAT changes with depth: attention dropout 0 from depth 5, and from depth
/// 10 on dropouts (0.2, 0) with weight decay 5e-3. GTAN uses attention
/// dropout 0.6 on Cora and Citeseer below depth 10. Variants take their
/// parent model's settings.
pub fn published_preset(arch: Arch, dataset: DatasetName, hops: Option<usize>) -> Preset {
    let mut p = base(arch, dataset);
    let Some(depth) = hops else {
        return p;
    };
    p.hops = depth;
    if dataset == DatasetName::OgbnArxiv {
        return p;
    }
    match arch.parent() {
        Arch::Gat if depth >= 10 => {
            p.dropout_input = 0.2;
            p.dropout_prop = 0.0;
            p.weight_decay = 5e-3;
        }
        Arch::Gat if depth > 2 => p.dropout_prop = 0.0,
        Arch::Gtan if depth < 10 && matches!(dataset, DatasetName::Cora | DatasetName::Citeseer) => {
            p.dropout_prop = 0.6;
        }
        _ => {}
    }
    p
}

/// Settings used without `--preset`.
pub fn fallback(arch: Arch) -> Preset {
    Preset {
        hops: default_hops(arch, None),
        hidden: 64,
        dropout_input: 0.5,
        dropout_prop: if arch.parent() == Arch::Gcn { 0.0 } else { 0.5 },
        lr: 0.01,
        weight_decay: 5e-4,
        patience: 200,
        max_epochs: 1000,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use DatasetName::*;

    fn at(arch: Arch, d: DatasetName) -> Preset {
        published_preset(arch, d, None)
    }

    #[test]
    fn dataset_names() {
        assert_eq!("Cora".parse::<DatasetName>(), Ok(Cora));
        assert_eq!("coauthor_cs".parse::<DatasetName>(), Ok(CoauthorCs));
        assert_eq!("ogbn-arxiv".parse::<DatasetName>(), Ok(OgbnArxiv));
        assert!("reddit".parse::<DatasetName>().unwrap_err().contains("cora"));
    }

    #[test]
    fn shared_settings() {
        for d in [Cora, Citeseer, Pubmed, CoauthorCs] {
            for arch in [Arch::Gcn, Arch::Gat, Arch::Gtcn, Arch::Gtan] {
                let p = at(arch, d);
                assert_eq!(p.hidden, 64);
                assert_eq!(p.max_epochs, 1000);
            }
        }
        for arch in Arch::ALL {
            assert_eq!(at(arch, Cora).max_epochs, 1000);
        }
    }

    #[test]
    fn patience() {
        assert_eq!(at(Arch::Gtan, Cora).patience, 300);
        assert_eq!(at(Arch::Gtcn, Cora).patience, 200);
        assert_eq!(at(Arch::Gcn, Cora).patience, 200);
        assert_eq!(at(Arch::Gat, Cora).patience, 200);
    }

    #[test]
    fn gcn() {
        for d in [Cora, Citeseer, Pubmed, CoauthorCs] {
            let p = at(Arch::Gcn, d);
            assert_eq!(p.hops, 2);
            assert_eq!(p.dropout_input, 0.5);
            assert_eq!(p.lr, 0.01);
            assert_eq!(p.weight_decay, 5e-4);
        }
        for depth in [2, 5, 10, 20, 50] {
            let p = published_preset(Arch::Gcn, Cora, Some(depth));
            assert_eq!((p.dropout_input, p.lr, p.weight_decay), (0.5, 0.01, 5e-4));
        }
    }

    #[test]
    fn gat() {
        for d in [Cora, Citeseer] {
            let p = at(Arch::Gat, d);
            assert_eq!(p.hops, 2);
            assert_eq!(p.dropout_input, 0.8);
            assert_eq!(p.dropout_prop, 0.8);
        }
        for d in [Pubmed, CoauthorCs] {
            let p = at(Arch::Gat, d);
            assert_eq!(p.dropout_input, 0.8);
            assert_eq!(p.dropout_prop, 0.2);
        }
        for d in [Cora, Citeseer, Pubmed, CoauthorCs] {
            assert_eq!(at(Arch::Gat, d).lr, 0.01);
            assert_eq!(at(Arch::Gat, d).weight_decay, 5e-4);
        }
    }

    #[test]
    fn gat_by_depth() {
        for d in [Cora, Citeseer, Pubmed, CoauthorCs] {
            let two = published_preset(Arch::Gat, d, Some(2));
            assert_eq!(two, at(Arch::Gat, d));
            let five = published_preset(Arch::Gat, d, Some(5));
            assert_eq!(five.dropout_prop, 0.0);
            assert_eq!(five.dropout_input, two.dropout_input);
            assert_eq!(five.weight_decay, 5e-4);
            for depth in [10, 20, 50] {
                let p = published_preset(Arch::Gat, d, Some(depth));
                assert_eq!((p.dropout_input, p.dropout_prop), (0.2, 0.0));
                assert_eq!(p.lr, 0.01);
                assert_eq!(p.weight_decay, 5e-3);
            }
        }
    }

    #[test]
    fn gtcn() {
        assert_eq!((at(Arch::Gtcn, Cora).dropout_input, at(Arch::Gtcn, Cora).dropout_prop), (0.6, 0.6));
        assert_eq!((at(Arch::Gtcn, Citeseer).dropout_input, at(Arch::Gtcn, Citeseer).dropout_prop), (0.8, 0.6));
        assert_eq!((at(Arch::Gtcn, Pubmed).dropout_input, at(Arch::Gtcn, Pubmed).dropout_prop), (0.8, 0.5));
        assert_eq!((at(Arch::Gtcn, CoauthorCs).dropout_input, at(Arch::Gtcn, CoauthorCs).dropout_prop), (0.6, 0.2));
        assert_eq!(at(Arch::Gtcn, Cora).lr, 0.01);
        assert_eq!(at(Arch::Gtcn, Citeseer).lr, 0.01);
        assert_eq!(at(Arch::Gtcn, CoauthorCs).lr, 0.01);
        assert_eq!(at(Arch::Gtcn, Pubmed).lr, 0.02);
        assert_eq!(at(Arch::Gtcn, Cora).weight_decay, 5e-4);
        assert_eq!(at(Arch::Gtcn, Citeseer).weight_decay, 5e-4);
        assert_eq!(at(Arch::Gtcn, Pubmed).weight_decay, 5e-4);
        assert_eq!(at(Arch::Gtcn, CoauthorCs).weight_decay, 5e-3);
        for d in [Cora, Citeseer, Pubmed, CoauthorCs] {
            assert_eq!(at(Arch::Gtcn, d).hops, 10);
            for depth in [2, 5, 20, 50] {
                let p = published_preset(Arch::Gtcn, d, Some(depth));
                assert_eq!(Preset { hops: 10, ..p }, at(Arch::Gtcn, d));
            }
        }
    }

    #[test]
    fn gtan() {
        assert_eq!((at(Arch::Gtan, Cora).dropout_input, at(Arch::Gtan, Cora).dropout_prop), (0.6, 0.0));
        assert_eq!((at(Arch::Gtan, Pubmed).dropout_input, at(Arch::Gtan, Pubmed).dropout_prop), (0.6, 0.0));
        assert_eq!((at(Arch::Gtan, Citeseer).dropout_input, at(Arch::Gtan, Citeseer).dropout_prop), (0.6, 0.6));
        assert_eq!((at(Arch::Gtan, CoauthorCs).dropout_input, at(Arch::Gtan, CoauthorCs).dropout_prop), (0.2, 0.2));
        for d in [Cora, Citeseer, Pubmed, CoauthorCs] {
            assert_eq!(at(Arch::Gtan, d).lr, 0.01);
            assert_eq!(at(Arch::Gtan, d).hops, 10);
        }
        assert_eq!(at(Arch::Gtan, Cora).weight_decay, 5e-4);
        assert_eq!(at(Arch::Gtan, Citeseer).weight_decay, 5e-4);
        assert_eq!(at(Arch::Gtan, Pubmed).weight_decay, 5e-4);
        assert_eq!(at(Arch::Gtan, CoauthorCs).weight_decay, 5e-3);
    }

    #[test]
    fn gtan_by_depth() {
        for d in [Cora, Citeseer] {
            for depth in [2, 5] {
                assert_eq!(published_preset(Arch::Gtan, d, Some(depth)).dropout_prop, 0.6);
            }
        }
        assert_eq!(published_preset(Arch::Gtan, Pubmed, Some(2)).dropout_prop, 0.0);
        assert_eq!(published_preset(Arch::Gtan, Cora, Some(10)).dropout_prop, 0.0);
    }

    #[test]
    fn arxiv() {
        let gcn = at(Arch::Gcn, OgbnArxiv);
        assert_eq!((gcn.hops, gcn.hidden, gcn.dropout_input, gcn.lr, gcn.weight_decay), (3, 256, 0.5, 0.01, 0.0));
        let gat = at(Arch::Gat, OgbnArxiv);
        assert_eq!((gat.hops, gat.hidden, gat.dropout_input, gat.dropout_prop), (3, 128, 0.2, 0.0));
        assert_eq!((gat.lr, gat.weight_decay), (0.01, 0.0));
        let gtcn = at(Arch::Gtcn, OgbnArxiv);
        assert_eq!((gtcn.hops, gtcn.hidden, gtcn.dropout_input, gtcn.dropout_prop), (5, 256, 0.2, 0.2));
        assert_eq!((gtcn.lr, gtcn.weight_decay), (0.01, 5e-5));
        let gtan = at(Arch::Gtan, OgbnArxiv);
        assert_eq!((gtan.hops, gtan.hidden, gtan.dropout_input, gtan.dropout_prop), (4, 128, 0.2, 0.0));
        assert_eq!((gtan.lr, gtan.weight_decay), (0.01, 5e-5));
    }

    #[test]
    fn variants_follow_parents() {
        for d in DatasetName::ALL {
            for arch in [Arch::SimpleGcn, Arch::SimpleGat, Arch::Gtcn2, Arch::Gtan2] {
                for depth in [2, 5, 10, 50] {
                    let mine = published_preset(arch, d, Some(depth));
                    let parent = published_preset(arch.parent(), d, Some(depth));
                    assert_eq!(mine, parent, "{arch} on {d} at {depth}");
                }
            }
        }
    }
}
