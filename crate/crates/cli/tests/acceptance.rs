//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria 1-4 need the Cora, Citeseer and PubMed directories under
//! `$GTNET_DATA_DIR` (named `cora`, `citeseer`, `pubmed`). Without them those
//! criteria print FAIL with the reason and are not asserted; every other
//! criterion is asserted.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use gtnet_cli::args::RunFlags;
use gtnet_cli::experiment::{self, LoadedDataset};
use gtnet_core::analysis::{convergence_trace, min_pairwise_distance, smoothing_curves, spectral_check};
use gtnet_core::data::{synthetic_bundle, FeatureKind, SyntheticSpec, Topology};
use gtnet_core::graph::{normalize, synthesize, Graph, Scheme, SynthKind};
use gtnet_core::models::{
    classify, forward, gat_forward, gcn_forward, gtan_forward, gtcn_forward, infer, initial_transform, variant_forward, Arch,
    Bound, GraphContext, ModelSpec, ParameterSet, Pass,
};
use gtnet_core::tensor::{finite_difference_check_many, Tape, Tensor, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

// Pinned tolerances.
const ACC_BAND: f64 = 0.015;
const DEEP_KEEP: f64 = 0.02;
const DEEP_COLLAPSE: f64 = 0.40;
const ABLATION_MARGIN: f64 = 0.05;
const ABLATION_COLLAPSE: f64 = 0.50;
const ABLATION_KEEP: f64 = 0.05;
const LIMIT_TOL: f64 = 1e-8;
const RATE_REL_TOL: f64 = 0.10;
const MIN_GAP: f64 = 0.05;
const COLLAPSE_TOL: f64 = 1e-9;
const DISTINCT_TOL: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-4;
const FD_STEP: f64 = 1e-5;
const TIME_RATIO: (f64, f64) = (1.6, 2.4);
const TIME_REPS: usize = 15;
/// Runs per cell for the depth and ablation criteria.
const SWEEP_RUNS: usize = 10;

enum Outcome {
    Pass(String),
    Fail(String),
    Unavailable(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------- datasets ----------

fn dataset(name: &str) -> Result<LoadedDataset, String> {
    let root = std::env::var_os("GTNET_DATA_DIR").ok_or("GTNET_DATA_DIR not set")?;
    experiment::load(name, Some(&PathBuf::from(root)), false).map_err(|e| e.to_string())
}

fn flags(data_name: &str, runs: usize) -> RunFlags {
    RunFlags {
        dataset: data_name.into(),
        preset: Some("published".into()),
        hidden: None,
        lr: None,
        weight_decay: None,
        dropout_input: None,
        dropout_prop: None,
        patience: None,
        max_epochs: None,
        runs,
        seed: 0,
        scheme: Scheme::Symmetric,
        out: PathBuf::new(),
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get().min(8)),
        row_normalize: false,
        data_dir: None,
    }
}

/// Trimmed mean test accuracy of `runs` published-preset runs.
fn accuracy(data: &LoadedDataset, arch: Arch, depth: usize, runs: usize) -> Result<f64, String> {
    let f = flags(&data.label, runs);
    let setup = experiment::setup(arch, Some(depth), &f, data).map_err(|e| e.to_string())?;
    let out = experiment::run_all(&setup, &data.bundle, f.jobs).map_err(|e| e.to_string())?;
    Ok(experiment::aggregate(&setup, &data.label, &out).test_accuracy.mean)
}

fn within(name: &str, got: f64, want: f64, band: f64) -> (bool, String) {
    let ok = (got - want).abs() <= band;
    (ok, format!("{name} {:.1} (target {:.1} ± {:.1})", 100.0 * got, 100.0 * want, 100.0 * band))
}

fn targets(cases: &[(&str, Arch, usize, f64)]) -> Outcome {
    let mut all = true;
    let mut parts = Vec::new();
    for &(ds, arch, depth, want) in cases {
        let data = match dataset(ds) {
            Ok(d) => d,
            Err(e) => return Outcome::Unavailable(format!("{ds}: {e}")),
        };
        match accuracy(&data, arch, depth, 30) {
            Ok(acc) => {
                let (ok, s) = within(&format!("{ds}/{arch}-L{depth}"), acc, want, ACC_BAND);
                all &= ok;
                parts.push(s);
            }
            Err(e) => return Outcome::Fail(e),
        }
    }
    check(all, parts.join("; "))
}

fn criterion_1() -> Outcome {
    targets(&[
        ("cora", Arch::Gcn, 2, 0.815),
        ("cora", Arch::Gat, 2, 0.830),
        ("cora", Arch::Gtcn, 10, 0.845),
        ("cora", Arch::Gtan, 10, 0.837),
    ])
}

fn criterion_2() -> Outcome {
    targets(&[("citeseer", Arch::Gtcn, 10, 0.729), ("pubmed", Arch::Gtan, 10, 0.796)])
}

fn criterion_3() -> Outcome {
    let data = match dataset("cora") {
        Ok(d) => d,
        Err(e) => return Outcome::Unavailable(format!("cora: {e}")),
    };
    let acc = |a, d| accuracy(&data, a, d, SWEEP_RUNS);
    let run = || -> Result<(bool, String), String> {
        let mut ok = true;
        let mut parts = Vec::new();
        for arch in [Arch::Gtcn, Arch::Gtan] {
            let (shallow, deep) = (acc(arch, 2)?, acc(arch, 10)?);
            ok &= deep >= shallow - DEEP_KEEP;
            parts.push(format!("{arch} L2 {:.1} L10 {:.1}", 100.0 * shallow, 100.0 * deep));
        }
        for arch in [Arch::Gcn, Arch::Gat] {
            for depth in [20, 50] {
                let a = acc(arch, depth)?;
                ok &= a < DEEP_COLLAPSE;
                parts.push(format!("{arch} L{depth} {:.1}", 100.0 * a));
            }
        }
        Ok((ok, parts.join("; ")))
    };
    match run() {
        Ok((ok, s)) => check(ok, s),
        Err(e) => Outcome::Fail(e),
    }
}

fn criterion_4() -> Outcome {
    let data = match dataset("cora") {
        Ok(d) => d,
        Err(e) => return Outcome::Unavailable(format!("cora: {e}")),
    };
    let acc = |a, d| accuracy(&data, a, d, SWEEP_RUNS);
    let run = || -> Result<(bool, String), String> {
        let (sg10, g10, sg50) = (acc(Arch::SimpleGcn, 10)?, acc(Arch::Gcn, 10)?, acc(Arch::SimpleGcn, 50)?);
        let mut ok = sg10 >= g10 + ABLATION_MARGIN && sg50 < ABLATION_COLLAPSE;
        let mut parts = vec![format!(
            "simple_gcn L10 {:.1} vs gcn L10 {:.1}; simple_gcn L50 {:.1}",
            100.0 * sg10,
            100.0 * g10,
            100.0 * sg50
        )];
        for (v, p) in [(Arch::Gtcn2, Arch::Gtcn), (Arch::Gtan2, Arch::Gtan)] {
            let (a, b) = (acc(v, 10)?, acc(p, 10)?);
            ok &= (a - b).abs() <= ABLATION_KEEP;
            parts.push(format!("{v} {:.1} vs {p} {:.1}", 100.0 * a, 100.0 * b));
        }
        Ok((ok, parts.join("; ")))
    };
    match run() {
        Ok((ok, s)) => check(ok, s),
        Err(e) => Outcome::Fail(e),
    }
}

// ---------- theory ----------

/// Twenty sparse random graphs, 50 to 200 nodes, average degree about 2 to 6.
fn graph_family() -> Vec<(SynthKind, Graph)> {
    (0..20)
        .map(|i| {
            let n = 50 + 150 * i / 19;
            let avg = 2.0 + (i % 5) as f64;
            let kind = SynthKind::ErdosRenyi { n, p: avg / (n - 1) as f64, seed: 7000 + i as u64 };
            let g = synthesize(&kind).unwrap();
            (kind, g)
        })
        .collect()
}

fn gaussian(n: usize, d: usize, seed: u64) -> Tensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tensor::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

fn criterion_5() -> Outcome {
    let depths: Vec<usize> = (1..=200).collect();
    let (mut worst_dist, mut worst_rate, mut rated) = (0.0f64, 0.0f64, 0);
    let mut ok = true;
    for (i, (kind, g)) in graph_family().into_iter().enumerate() {
        let norm = normalize(&g, Scheme::Symmetric);
        let z = gaussian(g.num_nodes(), 4, i as u64);
        let t = convergence_trace(&norm, &z, &depths).unwrap();
        worst_dist = worst_dist.max(t.final_distance());
        ok &= t.final_distance() < LIMIT_TOL;
        let s = spectral_check(&norm).unwrap();
        if s.dominance_gap() > MIN_GAP {
            let Some(rate) = t.fitted_rate else {
                return Outcome::Fail(format!("{kind}: no rate could be fitted"));
            };
            let rel = (rate - s.spectral_radius).abs() / s.spectral_radius;
            worst_rate = worst_rate.max(rel);
            ok &= rel <= RATE_REL_TOL;
            rated += 1;
        }
    }
    check(
        ok,
        format!(
            "max distance at L=200 {worst_dist:.2e} (< {LIMIT_TOL:.0e}); rate vs max|eig| worst relative error {:.2}% over {rated} graphs with gap > {MIN_GAP}",
            100.0 * worst_rate
        ),
    )
}

fn criterion_6() -> Outcome {
    let (mut a_min, mut a_max, mut l_min, mut l_max) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut ok = true;
    for (_, g) in graph_family() {
        let s = spectral_check(&normalize(&g, Scheme::Symmetric)).unwrap();
        ok &= s.method == "dense";
        ok &= s.a1_eigenvalues.iter().all(|&a| a > -1.0 && a < 1.0);
        ok &= s.i_minus_a1_eigenvalues.iter().all(|&l| l > 0.0 && l < 2.0);
        a_min = a_min.min(s.a1_min);
        a_max = a_max.max(s.a1_max);
        l_min = l_min.min(s.lambda_min);
        l_max = l_max.max(s.lambda_max);
    }
    check(ok, format!("A₁ eigenvalues in [{a_min:.4}, {a_max:.4}], I − A₁ in [{l_min:.4}, {l_max:.4}]"))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [3, 5, 10] {
        let norm = normalize(&synthesize(&SynthKind::Complete { n }).unwrap(), Scheme::Symmetric);
        for (zname, z) in [("I", Tensor::identity(n)), ("gaussian", gaussian(n, 3, n as u64))] {
            assert!(min_pairwise_distance(&z) > 0.0);
            let c = smoothing_curves(&norm, &z, &[1, 2]).unwrap();
            let (gcn, tree) = (c.gcn_max_distance[0], c.gtcn_min_distance[1]);
            ok &= gcn < COLLAPSE_TOL && tree > DISTINCT_TOL;
            parts.push(format!("K{n}/{zname}: GCN L1 {gcn:.1e}, GTCN L2 {tree:.2e}"));
        }
    }
    check(ok, parts.join("; "))
}

// ---------- gradients ----------

const GN: usize = 10;
const GD: usize = 5;
const GC: usize = 3;

fn grad_graph() -> Graph {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 5), (5, 6), (6, 7), (7, 8), (8, 4), (1, 5)];
    Graph::build(GN, &edges, false).unwrap()
}

fn grad_spec(arch: Arch) -> ModelSpec {
    ModelSpec { arch, hops: 3, in_dim: GD, hidden: 4, classes: GC, dropout_input: 0.3, dropout_prop: 0.3, scheme: Scheme::Symmetric }
}

/// Max relative error of `stage` reduced by a fixed random projection, with
/// parameters and the stage input both differentiated.
fn stage_error<F>(arch: Arch, input_cols: usize, stage: F) -> f64
where
    F: Fn(&mut Tape<f64>, &ModelSpec, &GraphContext<f64>, &Bound, Var, &mut Pass) -> gtnet_core::Result<Var>,
{
    let spec = grad_spec(arch);
    let ctx = GraphContext::<f64>::new(&grad_graph(), spec.scheme);
    let params = ParameterSet::<f64>::init(&spec, 3).unwrap();
    let names: Vec<String> = params.entries().iter().map(|(n, _)| n.clone()).collect();
    // Zero-initialized biases put ReLU inputs exactly on the kink wherever
    // dropout clears a whole neighbourhood, so every parameter is jittered.
    let mut inputs: Vec<Tensor<f64>> = params
        .entries()
        .iter()
        .enumerate()
        .map(|(i, (_, t))| {
            let jitter = gaussian(t.rows(), t.cols(), 100 + i as u64);
            Tensor::from_fn(t.rows(), t.cols(), |r, c| t.get(r, c) + 0.1 * jitter.get(r, c))
        })
        .collect();
    inputs.push(gaussian(GN, input_cols, 17));
    finite_difference_check_many(
        |tape, vars| {
            let (x, ps) = vars.split_last().unwrap();
            let bound = Bound::from_vars(&names, ps);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let mut pass = Pass::train(&mut rng);
            let out = stage(tape, &spec, &ctx, &bound, *x, &mut pass)?;
            let [rows, cols] = tape.value(out).shape();
            let r = tape.constant(gaussian(rows, cols, 23));
            let weighted = tape.mul(out, r)?;
            tape.sum(weighted)
        },
        &inputs,
        FD_STEP,
    )
    .unwrap()
}

fn criterion_8() -> Outcome {
    let f = 4; // hidden width of grad_spec
    let mut rows: Vec<(String, f64)> = vec![
        ("initial_transform".into(), stage_error(Arch::Gtcn, GD, |t, s, _, p, x, pass| initial_transform(t, s, p, x, pass))),
        ("tree_conv".into(), stage_error(Arch::Gtcn, f, |t, s, c, _, z, pass| gtcn_forward(t, s, c, z, pass))),
        ("tree_attention".into(), stage_error(Arch::Gtan, f, gtan_forward)),
        ("gcn_layers".into(), stage_error(Arch::Gcn, GD, gcn_forward)),
        ("gat_layers".into(), stage_error(Arch::Gat, GD, gat_forward)),
        ("classifier".into(), stage_error(Arch::Gtcn, f, |t, _, _, p, h, _| classify(t, p, h))),
    ];
    for arch in [Arch::SimpleGcn, Arch::SimpleGat, Arch::Gtcn2, Arch::Gtan2] {
        rows.push((format!("{arch}_propagation"), stage_error(arch, f, variant_forward)));
    }
    for arch in Arch::ALL {
        let labels: Vec<usize> = (0..GN).map(|u| u % GC).collect();
        let mask: Vec<usize> = (0..GN).collect();
        let err = stage_error(arch, GD, move |t, s, c, p, x, pass| {
            let out = forward(t, s, c, p, x, pass)?;
            t.masked_nll(out, &labels, &mask)
        });
        rows.push((format!("{arch}_loss"), err));
    }
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let names: Vec<String> = rows.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect();
    check(worst < GRAD_TOL, format!("max relative error {worst:.2e} over {} checks ({})", rows.len(), names.join(", ")))
}

// ---------- determinism ----------

fn gtnet(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_gtnet")).args(args).env_remove("GTNET_DATA_DIR").output().unwrap();
    assert!(out.status.success() || args[0] == "verify", "gtnet {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

/// Every file under `dir` except timing metadata, with contents.
fn payload(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "timing.json" {
                files.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let ds = root.join("ds");
    let ds = ds.to_str().unwrap();
    let mut compared = Vec::new();
    let mut ok = true;
    for pass in ["a", "b"] {
        let base = root.join(pass);
        let b = |s: &str| base.join(s).display().to_string();
        if pass == "a" {
            gtnet(&["synth", "--communities", "90:0.15:0.01", "--features", "8", "--classes", "3", "--seed", "4", "--out", ds]);
        }
        let outs = [
            gtnet(&["synth", "--graph", "erdos_renyi:60:0.08:2", "--features", "6", "--classes", "3", "--seed", "1", "--out", &b("synth")]),
            gtnet(&["train", "--model", "gtan", "--dataset", ds, "--runs", "3", "--seed", "5", "--max-epochs", "40", "--save-checkpoints", "--out", &b("train")]),
            gtnet(&["train", "--model", "gcn", "--hops", "2", "--dataset", ds, "--runs", "2", "--seed", "0", "--max-epochs", "40", "--jobs", "2", "--out", &b("train2")]),
            gtnet(&["sweep-depth", "--dataset", ds, "--depths", "2,4", "--runs", "1", "--max-epochs", "25", "--out", &b("sweep")]),
            gtnet(&["ablation", "--dataset", ds, "--depths", "3", "--runs", "1", "--max-epochs", "15", "--out", &b("ablation")]),
            gtnet(&["verify", "--graph", "erdos_renyi:80:0.05:1", "--json", "--out", &b("verify.json")]),
            gtnet(&["eval", "--checkpoint", &b("train/checkpoints/run-001.gtnt"), "--dataset", ds, "--out", &b("eval.json")]),
        ];
        compared.push((payload(&base), outs.iter().map(|o| o.stdout.clone()).collect::<Vec<_>>()));
    }
    let (a, b) = (&compared[0], &compared[1]);
    ok &= a.0.len() == b.0.len() && a.0.iter().zip(&b.0).all(|(x, y)| x == y);
    // Standard output embeds output paths, which differ between the two passes.
    let strip = |v: &Vec<u8>, pass: &str| String::from_utf8_lossy(v).replace(&root.join(pass).display().to_string(), "");
    ok &= a.1.iter().zip(&b.1).all(|(x, y)| strip(x, "a") == strip(y, "b"));
    check(ok, format!("{} result files and 7 command outputs byte-identical across two invocations", a.0.len()))
}

// ---------- complexity ----------

fn criterion_10() -> Outcome {
    let bundle = synthetic_bundle(&SyntheticSpec {
        topology: Topology::Synth { graph: SynthKind::ErdosRenyi { n: 2000, p: 0.005, seed: 42 } },
        features: 16,
        classes: 4,
        feature_kind: FeatureKind::Gaussian { noise: 1.0 },
        seed: 42,
    })
    .unwrap();
    let edges = bundle.graph.num_undirected_edges();
    let mut parts = vec![format!("{edges} edges")];
    let mut ok = (9_000..=11_000).contains(&edges);
    // One worker thread and interleaved repetitions keep scheduler noise out
    // of the ratio; the minimum over repetitions is the least disturbed run.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    for arch in [Arch::Gtcn, Arch::Gtan] {
        let models: Vec<_> = [10, 20]
            .map(|depth| {
                let spec = ModelSpec {
                    arch,
                    hops: depth,
                    in_dim: 16,
                    hidden: 64,
                    classes: 4,
                    dropout_input: 0.0,
                    dropout_prop: 0.0,
                    scheme: Scheme::Symmetric,
                };
                let params = ParameterSet::<f32>::init(&spec, 0).unwrap();
                (spec, params)
            })
            .into();
        let ctx = GraphContext::<f32>::new(&bundle.graph, Scheme::Symmetric);
        let mut best = [f64::INFINITY; 2];
        pool.install(|| {
            for rep in 0..TIME_REPS + 1 {
                for (i, (spec, params)) in models.iter().enumerate() {
                    let t = Instant::now();
                    std::hint::black_box(infer(spec, &ctx, params, &bundle.features).unwrap());
                    if rep > 0 {
                        best[i] = best[i].min(t.elapsed().as_secs_f64());
                    }
                }
            }
        });
        let ratio = best[1] / best[0];
        ok &= (TIME_RATIO.0..=TIME_RATIO.1).contains(&ratio);
        parts.push(format!("{arch} L20/L10 = {ratio:.2} ({:.2} ms / {:.2} ms)", 1e3 * best[1], 1e3 * best[0]));
    }
    check(ok, parts.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Cora accuracy", criterion_1),
        ("2 Citeseer/PubMed accuracy", criterion_2),
        ("3 deep capability", criterion_3),
        ("4 ablation direction", criterion_4),
        ("5 convergence to the closed-form limit", criterion_5),
        ("6 eigenvalue bounds", criterion_6),
        ("7 complete-graph smoothing", criterion_7),
        ("8 gradient correctness", criterion_8),
        ("9 determinism", criterion_9),
        ("10 depth scaling of inference time", criterion_10),
    ];
    println!();
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Outcome::Pass(d) => println!("PASS {name}: {d}"),
            Outcome::Fail(d) => {
                println!("FAIL {name}: {d}");
                failed.push(name);
            }
            Outcome::Unavailable(d) => println!("FAIL {name}: not run, dataset unavailable ({d})"),
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
