use serde::{Deserialize, Serialize};

use super::{NdError, NdResult, Tape, Tensor};
use crate::measures::RngState;

/// Supported layer nonlinearities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }

    pub fn prime(self, x: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
        }
    }

    /// Second derivative; zero a.e. for ReLU by convention.
    pub fn second(self, x: f64) -> f64 {
        match self {
            Activation::Identity | Activation::Relu => 0.0,
            Activation::Tanh => {
                let t = x.tanh();
                -2.0 * t * (1.0 - t * t)
            }
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Relu => 1,
            Activation::Tanh => 2,
        }
    }

    pub fn from_code(code: u8) -> NdResult<Self> {
        match code {
            0 => Ok(Activation::Identity),
            1 => Ok(Activation::Relu),
            2 => Ok(Activation::Tanh),
            other => Err(NdError::Format(format!("unknown activation code {other}"))),
        }
    }
}

/// Fully-connected network shape: layer widths plus one activation per
/// hidden layer and a final activation restricted to identity or tanh.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub widths: Vec<usize>,
    pub hidden: Vec<Activation>,
    pub final_act: Activation,
}

impl MlpSpec {
    pub fn new(widths: Vec<usize>, hidden: Vec<Activation>, final_act: Activation) -> NdResult<Self> {
        if widths.len() < 2 {
            return Err(NdError::Contract(
                "an MLP needs at least two widths (one affine layer)".into(),
            ));
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(NdError::Contract("layer widths must be positive".into()));
        }
        if hidden.len() != widths.len() - 2 {
            return Err(NdError::Contract(format!(
                "expected {} hidden activations, got {}",
                widths.len() - 2,
                hidden.len()
            )));
        }
        if !matches!(final_act, Activation::Identity | Activation::Tanh) {
            return Err(NdError::Contract(
                "final activation must be identity or tanh".into(),
            ));
        }
        Ok(MlpSpec {
            widths,
            hidden,
            final_act,
        })
    }

    /// ReLU hidden layers, identity output.
    pub fn relu(widths: Vec<usize>) -> NdResult<Self> {
        let hidden = vec![Activation::Relu; widths.len().saturating_sub(2)];
        MlpSpec::new(widths, hidden, Activation::Identity)
    }

    pub fn layer_count(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn layer_dims(&self, layer: usize) -> (usize, usize) {
        (self.widths[layer], self.widths[layer + 1])
    }

    pub fn activation(&self, layer: usize) -> Activation {
        if layer + 1 == self.layer_count() {
            self.final_act
        } else {
            self.hidden[layer]
        }
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.widths.last().expect("validated non-empty")
    }

    pub fn param_count(&self) -> usize {
        (0..self.layer_count())
            .map(|l| {
                let (i, o) = self.layer_dims(l);
                i * o + o
            })
            .sum()
    }
}

/// A spec plus its flat parameter vector (`W1, b1, W2, b2, ...`, weights
/// row-major `in x out`).
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    spec: MlpSpec,
    params: Vec<f64>,
}

impl Mlp {
    pub fn new(spec: MlpSpec, params: Vec<f64>) -> NdResult<Self> {
        if params.len() != spec.param_count() {
            return Err(NdError::Contract(format!(
                "parameter vector length {} does not match spec count {}",
                params.len(),
                spec.param_count()
            )));
        }
        Ok(Mlp { spec, params })
    }

    pub fn zeros(spec: MlpSpec) -> Self {
        let n = spec.param_count();
        Mlp {
            spec,
            params: vec![0.0; n],
        }
    }

    /// He-style fan-in uniform init: weights from U(-b, b) with
    /// b = sqrt(6 / fan_in), biases zero.
    pub fn init_he(spec: MlpSpec, rng: &mut RngState) -> Self {
        let mut params = Vec::with_capacity(spec.param_count());
        for l in 0..spec.layer_count() {
            let (fan_in, fan_out) = spec.layer_dims(l);
            let bound = (6.0 / fan_in as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.uniform(-bound, bound));
            }
            params.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Mlp { spec, params }
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: Vec<f64>) -> NdResult<()> {
        if params.len() != self.spec.param_count() {
            return Err(NdError::Contract("parameter length mismatch".into()));
        }
        self.params = params;
        Ok(())
    }

    /// Tape-free forward evaluation.
    pub fn eval(&self, x: &Tensor) -> NdResult<Tensor> {
        mlp_forward(self, x)
    }
}

/// Deterministic forward pass of `input[batch x in] -> [batch x out]`.
pub fn mlp_forward(net: &Mlp, input: &Tensor) -> NdResult<Tensor> {
    let mut tape = Tape::new();
    let x = tape.constant(input);
    let bound = tape.bind(net);
    let out = tape.forward(&bound, x)?;
    Ok(tape.to_tensor(out))
}

/// Rows of `grad_x psi(x_i)` for a scalar-output network.
pub fn input_gradient(net: &Mlp, x: &Tensor) -> NdResult<Tensor> {
    let mut tape = Tape::new();
    let xn = tape.constant(x);
    let bound = tape.bind(net);
    let u = tape.input_gradient(&bound, xn)?;
    let out = tape.to_tensor(u);
    out.ensure_finite("input gradient")?;
    Ok(out)
}

/// Gradient penalty `mean_i ||grad_x psi(x_i)||^2` together with its
/// gradient over the network parameters.
pub fn grad_penalty_and_param_grad(net: &Mlp, x: &Tensor) -> NdResult<(f64, Vec<f64>)> {
    let mut tape = Tape::new();
    let xn = tape.constant(x);
    let bound = tape.bind(net);
    let u = tape.input_gradient(&bound, xn)?;
    let sq = tape.mul(u, u)?;
    let total = tape.sum(sq);
    let penalty = tape.affine(total, 1.0 / x.rows() as f64, 0.0);
    let value = tape.scalar(penalty)?;
    if !value.is_finite() {
        return Err(NdError::NonFinite {
            context: "gradient penalty",
        });
    }
    let grads = tape.backward(penalty)?;
    Ok((value, grads.of_net(&bound, &tape)))
}
