use crate::error::{Error, Result};
use crate::operational::{Gradients, OperationalLayerParams};

use super::TrainConfig;

/// Bias-corrected ADAM moments for one operational layer.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Gradients,
    pub second_moment: Gradients,
    pub step_count: u64,
}

impl AdamState {
    pub fn new(params: &OperationalLayerParams) -> Self {
        Self {
            first_moment: Gradients::zeros_like(params),
            second_moment: Gradients::zeros_like(params),
            step_count: 0,
        }
    }
}

fn update(theta: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64], c: &StepConsts) {
    for (((t, &g), m), v) in theta.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
        *m = c.beta1 * *m + (1.0 - c.beta1) * g;
        *v = c.beta2 * *v + (1.0 - c.beta2) * g * g;
        let m_hat = *m / c.correction1;
        let v_hat = *v / c.correction2;
        *t -= c.lr * m_hat / (v_hat.sqrt() + c.epsilon);
    }
}

struct StepConsts {
    beta1: f64,
    beta2: f64,
    correction1: f64,
    correction2: f64,
    lr: f64,
    epsilon: f64,
}

/// One ADAM update in place. The step counter is incremented before the bias
/// corrections are computed.
pub fn adam_step(
    params: &mut OperationalLayerParams,
    grads: &Gradients,
    state: &mut AdamState,
    config: &TrainConfig,
) -> Result<()> {
    let sizes = (params.weights.len(), params.biases.len());
    for (name, g) in [
        ("gradient", grads),
        ("first moment", &state.first_moment),
        ("second moment", &state.second_moment),
    ] {
        if (g.d_weights.len(), g.d_biases.len()) != sizes {
            return Err(Error::shape(format!("{name} does not match parameter shapes")));
        }
    }
    state.step_count += 1;
    let t = state.step_count as i32;
    let c = StepConsts {
        beta1: config.beta1,
        beta2: config.beta2,
        correction1: 1.0 - config.beta1.powi(t),
        correction2: 1.0 - config.beta2.powi(t),
        lr: config.learning_rate,
        epsilon: config.epsilon,
    };
    update(
        &mut params.weights,
        &grads.d_weights,
        &mut state.first_moment.d_weights,
        &mut state.second_moment.d_weights,
        &c,
    );
    update(
        &mut params.biases,
        &grads.d_biases,
        &mut state.first_moment.d_biases,
        &mut state.second_moment.d_biases,
        &c,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> OperationalLayerParams {
        let mut p = OperationalLayerParams::zeros(3, 2, 3).unwrap();
        for (i, w) in p.weights.iter_mut().enumerate() {
            *w = i as f64 * 0.01;
        }
        p
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut p = params();
        let before = p.clone();
        let mut s = AdamState::new(&p);
        let g = Gradients::zeros_like(&p);
        for _ in 0..3 {
            adam_step(&mut p, &g, &mut s, &TrainConfig::default()).unwrap();
        }
        assert_eq!(p, before);
        assert_eq!(s.step_count, 3);
    }

    #[test]
    fn first_step_is_a_sign_step() {
        let cfg = TrainConfig::default();
        let mut p = params();
        let before = p.clone();
        let mut s = AdamState::new(&p);
        let mut g = Gradients::zeros_like(&p);
        for (i, v) in g.d_weights.iter_mut().enumerate() {
            *v = if i % 2 == 0 { 0.3 } else { -2.0 };
        }
        for v in g.d_biases.iter_mut() {
            *v = 1e-3;
        }
        adam_step(&mut p, &g, &mut s, &cfg).unwrap();
        for i in 0..p.weights.len() {
            let gi = g.d_weights[i];
            let expected = -cfg.learning_rate * gi / (gi.abs() + cfg.epsilon);
            assert!((p.weights[i] - before.weights[i] - expected).abs() < 1e-15);
        }
        for (b, g) in p.biases.iter().zip(&g.d_biases) {
            assert!((b + cfg.learning_rate * g / (g.abs() + cfg.epsilon)).abs() < 1e-15);
        }
        assert!(s.second_moment.d_weights.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn identical_runs_match() {
        let cfg = TrainConfig::default();
        let run = || {
            let mut p = params();
            let mut s = AdamState::new(&p);
            for t in 0..10 {
                let mut g = Gradients::zeros_like(&p);
                for (i, v) in g.d_weights.iter_mut().enumerate() {
                    *v = ((i + t) as f64).sin();
                }
                adam_step(&mut p, &g, &mut s, &cfg).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn shape_mismatch() {
        let mut p = params();
        let other = OperationalLayerParams::zeros(5, 2, 3).unwrap();
        let mut s = AdamState::new(&p);
        let g = Gradients::zeros_like(&other);
        assert!(matches!(
            adam_step(&mut p, &g, &mut s, &TrainConfig::default()),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
