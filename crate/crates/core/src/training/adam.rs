use crate::error::{Error, Result};
use crate::models::ParameterSet;
use crate::scalar::Real;
use crate::tensor::Tensor;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// First and second moments per parameter array.
#[derive(Clone, Debug)]
pub struct AdamState<T> {
    m: Vec<Tensor<T>>,
    v: Vec<Tensor<T>>,
    t: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(params: &ParameterSet<T>) -> Self {
        let zeros = || params.entries().iter().map(|(_, p)| Tensor::zeros(p.rows(), p.cols())).collect();
        Self { m: zeros(), v: zeros(), t: 0 }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One Adam update with coupled L2: the decay term is added to the gradient
/// before the moments are updated.
pub fn adam_step<T: Real>(
    params: &mut ParameterSet<T>,
    grads: &[Tensor<T>],
    state: &mut AdamState<T>,
    lr: f64,
    weight_decay: f64,
) -> Result<()> {
    if grads.len() != params.len() || state.m.len() != params.len() {
        return Err(Error::shape(
            "adam_step",
            format!("{} params, {} grads, {} moments", params.len(), grads.len(), state.m.len()),
        ));
    }
    for ((name, p), g) in params.entries().iter().zip(grads) {
        if p.shape() != g.shape() {
            return Err(Error::shape("adam_step", format!("{name}: {:?} vs grad {:?}", p.shape(), g.shape())));
        }
        if !g.is_finite() {
            return Err(Error::Numeric(format!("non-finite gradient for {name}")));
        }
    }
    state.t += 1;
    let t = state.t as i32;
    let (b1, b2) = (T::of(ADAM_BETA1), T::of(ADAM_BETA2));
    let (one, eps, lr_t, wd) = (T::one(), T::of(ADAM_EPS), T::of(lr), T::of(weight_decay));
    let c1 = one - b1.powi(t);
    let c2 = one - b2.powi(t);
    for (((p, g), m), v) in params.tensors_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        for (((theta, &gi), mi), vi) in p
            .data_mut()
            .iter_mut()
            .zip(g.data())
            .zip(m.data_mut())
            .zip(v.data_mut())
        {
            let g2 = gi + wd * *theta;
            *mi = b1 * *mi + (one - b1) * g2;
            *vi = b2 * *vi + (one - b2) * g2 * g2;
            let m_hat = *mi / c1;
            let v_hat = *vi / c2;
            *theta -= lr_t * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Scheme;
    use crate::models::{Arch, ModelSpec};

    fn scalar_set(theta: f64) -> (ModelSpec, ParameterSet<f64>) {
        // Smallest layout with a single scalar weight: a one-layer GCN 1→1.
        let spec = ModelSpec {
            arch: Arch::Gcn,
            hops: 1,
            in_dim: 1,
            hidden: 1,
            classes: 1,
            dropout_input: 0.0,
            dropout_prop: 0.0,
            scheme: Scheme::Symmetric,
        };
        let p = ParameterSet::from_entries(
            &spec,
            vec![
                ("layers.0.weight".into(), Tensor::scalar(theta)),
                ("layers.0.bias".into(), Tensor::scalar(0.0)),
            ],
        )
        .unwrap();
        (spec, p)
    }

    fn weight(p: &ParameterSet<f64>) -> f64 {
        p.get("layers.0.weight").unwrap().get(0, 0)
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let (_, mut p) = scalar_set(0.7);
        let mut s = AdamState::new(&p);
        let before = p.clone();
        for _ in 0..5 {
            adam_step(&mut p, &[Tensor::scalar(0.0), Tensor::scalar(0.0)], &mut s, 0.01, 0.0).unwrap();
        }
        assert_eq!(p, before);
        assert_eq!(s.step_count(), 5);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let (_, mut p) = scalar_set(0.0);
        let mut s = AdamState::new(&p);
        adam_step(&mut p, &[Tensor::scalar(1.0), Tensor::scalar(0.0)], &mut s, 0.01, 0.0).unwrap();
        // m̂ = v̂ = 1, so the step is lr / (1 + ε).
        assert!((weight(&p) + 0.01 / (1.0 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn coupled_decay_equals_gradient() {
        let lambda = 0.3;
        let (_, mut a) = scalar_set(1.0);
        let mut sa = AdamState::new(&a);
        adam_step(&mut a, &[Tensor::scalar(0.0), Tensor::scalar(0.0)], &mut sa, 0.05, lambda).unwrap();
        let (_, mut b) = scalar_set(1.0);
        let mut sb = AdamState::new(&b);
        adam_step(&mut b, &[Tensor::scalar(lambda), Tensor::scalar(0.0)], &mut sb, 0.05, 0.0).unwrap();
        assert_eq!(weight(&a), weight(&b));
    }

    #[test]
    fn zero_lr_is_bit_identical() {
        let (_, mut p) = scalar_set(-0.123456789);
        let before = p.clone();
        let mut s = AdamState::new(&p);
        for g in [1.0, -3.0, 1e-9] {
            adam_step(&mut p, &[Tensor::scalar(g), Tensor::scalar(g)], &mut s, 0.0, 5e-4).unwrap();
        }
        assert_eq!(weight(&p).to_bits(), weight(&before).to_bits());
    }

    #[test]
    fn non_finite_gradient_aborts() {
        let (_, mut p) = scalar_set(0.0);
        let mut s = AdamState::new(&p);
        let err = adam_step(&mut p, &[Tensor::scalar(f64::NAN), Tensor::scalar(0.0)], &mut s, 0.01, 0.0);
        assert!(matches!(err, Err(Error::Numeric(_))));
        assert_eq!(s.step_count(), 0);
    }
}
