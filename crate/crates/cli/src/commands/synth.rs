use std::io::Write;

use gtnet_core::data::{save_dataset, synthetic_bundle, FeatureKind, SyntheticSpec, Topology};

use crate::args::SynthArgs;
use crate::error::{CliError, CliResult};

fn communities(s: &str) -> CliResult<Topology> {
    let bad = || CliError::usage(format!("--communities expects n:p_in:p_out, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [n, p_in, p_out] = parts.as_slice() else {
        return Err(bad());
    };
    Ok(Topology::Communities {
        n: n.parse().map_err(|_| bad())?,
        p_in: p_in.parse().map_err(|_| bad())?,
        p_out: p_out.parse().map_err(|_| bad())?,
    })
}

pub fn synth(args: &SynthArgs, out: &mut dyn Write) -> CliResult<()> {
    let topology = match (&args.graph, &args.communities) {
        (Some(g), None) => Topology::Synth { graph: g.clone() },
        (None, Some(c)) => communities(c)?,
        _ => return Err(CliError::usage("synth needs exactly one of --graph or --communities")),
    };
    let spec = SyntheticSpec {
        topology,
        features: args.features,
        classes: args.classes,
        feature_kind: if args.identity_features {
            FeatureKind::Identity
        } else {
            FeatureKind::Gaussian { noise: args.noise }
        },
        seed: args.seed,
    };
    let bundle = synthetic_bundle(&spec).map_err(CliError::usage)?;
    save_dataset(&bundle, &args.out)?;
    let s = bundle.stats();
    writeln!(
        out,
        "wrote {}: {} nodes, {} edges, {} features, {} classes ({}/{}/{} split)",
        args.out.display(),
        s.num_nodes,
        s.undirected_edges,
        s.num_features,
        s.num_classes,
        s.train,
        s.val,
        s.test
    )?;
    Ok(())
}
