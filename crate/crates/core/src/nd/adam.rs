use super::{NdError, NdResult};

/// Bias-corrected Adam state for one flat parameter vector.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub step_count: u64,
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    /// beta1 = 0.5 is the usual adversarial-training choice.
    pub fn new(param_len: usize) -> Self {
        AdamState {
            step_count: 0,
            first_moment: vec![0.0; param_len],
            second_moment: vec![0.0; param_len],
            beta1: 0.5,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// One descent step: `params -= lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) -> NdResult<()> {
        if params.len() != grads.len()
            || params.len() != self.first_moment.len()
            || params.len() != self.second_moment.len()
        {
            return Err(NdError::Contract(format!(
                "adam length mismatch: params {}, grads {}, moments {}",
                params.len(),
                grads.len(),
                self.first_moment.len()
            )));
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.first_moment[i] = self.beta1 * self.first_moment[i] + (1.0 - self.beta1) * g;
            self.second_moment[i] = self.beta2 * self.second_moment[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.first_moment[i] / bc1;
            let v_hat = self.second_moment[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}
