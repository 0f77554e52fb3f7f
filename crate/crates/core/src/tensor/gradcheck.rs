use crate::error::{Error, Result};
use crate::tensor::{Tape, Tensor, Var};

/// Max over coordinates of `|analytic - central difference| / max(1, |analytic|)`
/// for a scalar function of one tensor.
///
/// `f` must be deterministic: if it uses dropout it has to seed its own rng
/// on every call.
pub fn finite_difference_check<F>(f: F, x: &Tensor<f64>, h: f64) -> Result<f64>
where
    F: Fn(&mut Tape<f64>, Var) -> Result<Var>,
{
    finite_difference_check_many(|tape, vars| f(tape, vars[0]), std::slice::from_ref(x), h)
}

/// Same as [`finite_difference_check`] over several input tensors at once.
pub fn finite_difference_check_many<F>(f: F, inputs: &[Tensor<f64>], h: f64) -> Result<f64>
where
    F: Fn(&mut Tape<f64>, &[Var]) -> Result<Var>,
{
    if !(h > 0.0) {
        return Err(Error::Param(format!("finite-difference step {h} must be positive")));
    }
    let eval = |values: &[Tensor<f64>]| -> Result<f64> {
        let mut tape = Tape::new();
        let vars: Vec<Var> = values.iter().map(|v| tape.constant(v.clone())).collect();
        let out = f(&mut tape, &vars)?;
        let y = tape.value(out).item()?;
        if !y.is_finite() {
            return Err(Error::Numeric("non-finite value during finite differencing".into()));
        }
        Ok(y)
    };

    let mut tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|v| tape.param(v.clone())).collect();
    let out = f(&mut tape, &vars)?;
    tape.check_finite(out, "finite_difference_check")?;
    tape.backward(out)?;
    let analytic: Vec<Tensor<f64>> = vars
        .iter()
        .zip(inputs)
        .map(|(&v, x)| tape.grad(v).cloned().unwrap_or_else(|| Tensor::zeros(x.rows(), x.cols())))
        .collect();

    let mut worst = 0.0f64;
    let mut probe: Vec<Tensor<f64>> = inputs.to_vec();
    for (i, grad) in analytic.iter().enumerate() {
        grad.check_finite("analytic gradient")?;
        for j in 0..inputs[i].len() {
            let base = inputs[i].data()[j];
            probe[i].data_mut()[j] = base + h;
            let plus = eval(&probe)?;
            probe[i].data_mut()[j] = base - h;
            let minus = eval(&probe)?;
            probe[i].data_mut()[j] = base;
            let numeric = (plus - minus) / (2.0 * h);
            let a = grad.data()[j];
            worst = worst.max((a - numeric).abs() / a.abs().max(1.0));
        }
    }
    Ok(worst)
}
