use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::metrics::evaluate;
use crate::data::DatasetBundle;
use crate::error::{Error, Result};
use crate::models::{forward, infer, GraphContext, ModelSpec, ParameterSet, Pass};
use crate::tensor::{Tape, Tensor};

/// Optimizer and stopping settings. Weight decay applies to every
/// parameter array, biases and attention vectors included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub runs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.01,
            weight_decay: 5e-4,
            max_epochs: 1000,
            patience: 200,
            seed: 0,
            runs: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Param(format!("learning rate {} must be positive", self.lr)));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::Param(format!("weight decay {} must be non-negative", self.weight_decay)));
        }
        if self.patience == 0 {
            return Err(Error::Param("patience must be at least 1".into()));
        }
        if self.patience > self.max_epochs {
            return Err(Error::Param(format!(
                "patience {} exceeds max_epochs {}",
                self.patience, self.max_epochs
            )));
        }
        if self.runs == 0 {
            return Err(Error::Param("runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one seeded run. Epochs are 0-based. Wall times are kept out of
/// the serialized form so result files are reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub checkpoint_epoch: usize,
    pub best_val_acc: f64,
    pub test_acc: f64,
    pub test_macro_f1: f64,
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub train_acc: Vec<f64>,
    pub val_acc: Vec<f64>,
    #[serde(skip)]
    pub epoch_seconds: Vec<f64>,
}

pub fn train(spec: &ModelSpec, bundle: &DatasetBundle, cfg: &TrainConfig, seed: u64) -> Result<(RunResult, ParameterSet<f32>)> {
    let ctx = GraphContext::new(&bundle.graph, spec.scheme);
    train_with_context(spec, bundle, &ctx, cfg, seed)
}

fn nll(log_probs: &Tensor<f32>, labels: &[usize], mask: &[usize]) -> f64 {
    let total: f64 = mask.iter().map(|&u| f64::from(log_probs.get(u, labels[u]))).sum();
    -total / mask.len() as f64
}

/// Trains from a fresh initialization for one seed, sharing a prebuilt
/// graph context.
pub fn train_with_context(
    spec: &ModelSpec,
    bundle: &DatasetBundle,
    ctx: &GraphContext<f32>,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(RunResult, ParameterSet<f32>)> {
    spec.validate()?;
    cfg.validate()?;
    if spec.in_dim != bundle.num_features() || spec.classes != bundle.num_classes {
        return Err(Error::Param(format!(
            "model expects D={}, C={} but dataset has D={}, C={}",
            spec.in_dim,
            spec.classes,
            bundle.num_features(),
            bundle.num_classes
        )));
    }
    let splits = bundle.splits()?;
    let labels = &bundle.labels;

    let mut params = ParameterSet::<f32>::init(spec, seed)?;
    let mut adam = AdamState::new(&params);
    // Dropout gets its own stream so the initialization is independent of it.
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9E37_79B9_7F4A_7C15));

    let mut best_params = params.clone();
    let mut best_val = f64::NEG_INFINITY;
    let mut best_epoch = 0;
    let mut since_best = 0;
    let mut r = RunResult {
        seed,
        epochs_run: 0,
        best_epoch: 0,
        checkpoint_epoch: 0,
        best_val_acc: 0.0,
        test_acc: 0.0,
        test_macro_f1: 0.0,
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        train_acc: Vec::new(),
        val_acc: Vec::new(),
        epoch_seconds: Vec::new(),
    };

    for epoch in 0..cfg.max_epochs {
        let started = Instant::now();
        let mut tape = Tape::new();
        let p = params.bind(&mut tape);
        let x = tape.constant(bundle.features.clone());
        let out = forward(&mut tape, spec, ctx, &p, x, &mut Pass::train(&mut rng))?;
        let loss = tape.masked_nll(out, labels, &splits.train)?;
        let loss_value = f64::from(tape.value(loss).item()?);
        if !loss_value.is_finite() {
            return Err(Error::Numeric(format!("training loss became non-finite at epoch {epoch}")));
        }
        tape.backward(loss)?;
        let grads: Vec<Tensor<f32>> = p
            .vars()
            .zip(params.entries())
            .map(|(v, (_, t))| tape.grad(v).cloned().unwrap_or_else(|| Tensor::zeros(t.rows(), t.cols())))
            .collect();
        drop(tape);
        adam_step(&mut params, &grads, &mut adam, cfg.lr, cfg.weight_decay)
            .map_err(|e| Error::Numeric(format!("epoch {epoch}: {e}")))?;

        let log_probs = infer(spec, ctx, &params, &bundle.features)?;
        log_probs
            .check_finite("evaluation")
            .map_err(|e| Error::Numeric(format!("epoch {epoch}: {e}")))?;
        let train_m = evaluate(&log_probs, labels, &splits.train)?;
        let val_m = evaluate(&log_probs, labels, &splits.val)?;
        r.train_loss.push(loss_value);
        r.val_loss.push(nll(&log_probs, labels, &splits.val));
        r.train_acc.push(train_m.accuracy);
        r.val_acc.push(val_m.accuracy);
        r.epoch_seconds.push(started.elapsed().as_secs_f64());
        r.epochs_run = epoch + 1;

        if val_m.accuracy > best_val {
            best_val = val_m.accuracy;
            best_epoch = epoch;
            best_params = params.clone();
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }

    let log_probs = infer(spec, ctx, &best_params, &bundle.features)?;
    let test = evaluate(&log_probs, labels, &splits.test)?;
    r.best_epoch = best_epoch;
    r.checkpoint_epoch = best_epoch;
    r.best_val_acc = best_val;
    r.test_acc = test.accuracy;
    r.test_macro_f1 = test.macro_f1;
    debug_assert_eq!(evaluate(&log_probs, labels, &splits.val)?.accuracy, best_val);
    Ok((r, best_params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthetic_bundle, FeatureKind, SyntheticSpec, Topology};
    use crate::graph::Scheme;
    use crate::models::Arch;

    fn bundle(seed: u64) -> DatasetBundle {
        synthetic_bundle(&SyntheticSpec {
            topology: Topology::Communities { n: 50, p_in: 0.25, p_out: 0.02 },
            features: 8,
            classes: 3,
            feature_kind: FeatureKind::Gaussian { noise: 1.5 },
            seed,
        })
        .unwrap()
    }

    fn spec(arch: Arch, hops: usize) -> ModelSpec {
        ModelSpec {
            arch,
            hops,
            in_dim: 8,
            hidden: 16,
            classes: 3,
            dropout_input: 0.0,
            dropout_prop: 0.0,
            scheme: Scheme::Symmetric,
        }
    }

    #[test]
    fn config_validation() {
        let mut c = TrainConfig::default();
        assert!(c.validate().is_ok());
        c.patience = 0;
        assert!(c.validate().is_err());
        c.patience = 2000;
        assert!(c.validate().is_err());
        let c = TrainConfig { lr: 0.0, ..TrainConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let b = bundle(1);
        let mut s = spec(Arch::Gtan, 3);
        s.dropout_input = 0.5;
        s.dropout_prop = 0.3;
        let cfg = TrainConfig { max_epochs: 30, patience: 10, ..TrainConfig::default() };
        let (a, pa) = train(&s, &b, &cfg, 4).unwrap();
        let (c, pc) = train(&s, &b, &cfg, 4).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
        assert_eq!(pa, pc);
        let (d, _) = train(&s, &b, &cfg, 5).unwrap();
        assert_ne!(a.train_loss, d.train_loss);
    }

    #[test]
    fn reports_the_best_validation_epoch() {
        let b = bundle(2);
        let cfg = TrainConfig { max_epochs: 60, patience: 15, ..TrainConfig::default() };
        for arch in Arch::ALL {
            let (r, _) = train(&spec(arch, 2), &b, &cfg, 0).unwrap();
            assert_eq!(r.checkpoint_epoch, r.best_epoch);
            assert!(r.best_epoch < r.epochs_run);
            let max = r.val_acc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(r.val_acc[r.best_epoch], max);
            assert_eq!(r.val_acc.iter().position(|&v| v == max), Some(r.best_epoch), "ties go to the earlier epoch");
            assert!(r.epochs_run == cfg.max_epochs || r.epochs_run == r.best_epoch + 1 + cfg.patience);
            for v in r.train_acc.iter().chain(&r.val_acc).chain([&r.test_acc]) {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn smoke_loss_decreases_early() {
        // Loss over the first 10 epochs is non-increasing in at least 8 of 10 seeds.
        let cfg = TrainConfig { max_epochs: 10, patience: 10, ..TrainConfig::default() };
        for arch in Arch::ALL {
            let mut good = 0;
            for seed in 0..10 {
                let b = bundle(100 + seed);
                let (r, _) = train(&spec(arch, 2), &b, &cfg, seed).unwrap();
                if r.train_loss.windows(2).all(|w| w[1] <= w[0]) {
                    good += 1;
                }
            }
            assert!(good >= 8, "{arch}: {good}/10 monotone runs");
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let b = bundle(0);
        let mut s = spec(Arch::Gcn, 2);
        s.in_dim = 9;
        assert!(train(&s, &b, &TrainConfig::default(), 0).is_err());
    }
}
