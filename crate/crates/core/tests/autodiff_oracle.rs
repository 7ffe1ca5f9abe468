//! Finite-difference oracle for the reverse-mode engine: parameter
//! gradients, input gradients, and the gradient-penalty parameter gradient
//! are probed coordinate-by-coordinate against central differences on
//! every network shape the training runs use.

use gmelab_core::measures::{RngState, Stream};
use gmelab_core::nd::{grad_penalty_and_param_grad, Mlp, MlpSpec, Tape, Tensor};

const FD_STEP: f64 = 1e-5;
const PROBES_PER_SHAPE: usize = 100;

/// |a - b| relative to max(|a|, |b|); tiny pairs count as matching.
fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-7 {
        return 0.0;
    }
    (a - b).abs() / scale
}

/// Loss used by the oracles: sum of squared network outputs on a fixed batch.
fn loss_value(net: &Mlp, x: &Tensor) -> f64 {
    let out = net.eval(x).unwrap();
    out.data().iter().map(|v| v * v).sum()
}

fn loss_grads(net: &Mlp, x: &Tensor) -> (Vec<f64>, Tensor) {
    let mut tape = Tape::new();
    let xn = tape.constant(x);
    let bound = tape.bind(net);
    let out = tape.forward(&bound, xn).unwrap();
    let sq = tape.mul(out, out).unwrap();
    let loss = tape.sum(sq);
    let grads = tape.backward(loss).unwrap();
    let param_grad = grads.of_net(&bound, &tape);
    let input_grad = Tensor::new(x.rows(), x.cols(), grads.node(xn, &tape)).unwrap();
    (param_grad, input_grad)
}

/// Central-difference derivative of `f` along one coordinate of `v`.
fn central_diff(mut f: impl FnMut(&[f64]) -> f64, v: &[f64], i: usize) -> f64 {
    let mut plus = v.to_vec();
    let mut minus = v.to_vec();
    plus[i] += FD_STEP;
    minus[i] -= FD_STEP;
    (f(&plus) - f(&minus)) / (2.0 * FD_STEP)
}

fn artifact_shapes() -> Vec<Vec<usize>> {
    // Generator, encoder, discriminator, inverse corrector.
    vec![
        vec![2, 128, 128, 100],
        vec![100, 128, 128, 2],
        vec![100, 128, 128, 1],
        vec![2, 128, 128, 2],
    ]
}

fn random_net_and_batch(widths: &[usize], seed: u64) -> (Mlp, Tensor) {
    let mut rng = RngState::stream(seed, Stream::Init);
    let net = Mlp::init_he(MlpSpec::relu(widths.to_vec()).unwrap(), &mut rng);
    let batch = 4;
    let data: Vec<f64> = (0..batch * widths[0]).map(|_| rng.normal()).collect();
    (net, Tensor::new(batch, widths[0], data).unwrap())
}

#[test]
fn parameter_gradients_match_finite_differences() {
    for (shape_idx, widths) in artifact_shapes().iter().enumerate() {
        let (net, x) = random_net_and_batch(widths, 40 + shape_idx as u64);
        let (param_grad, _) = loss_grads(&net, &x);
        let mut probe_rng = RngState::stream(90 + shape_idx as u64, Stream::Probe);
        for probe in 0..PROBES_PER_SHAPE {
            let coord = probe_rng.index(net.params().len());
            let fd = central_diff(
                |p| {
                    let perturbed = Mlp::new(net.spec().clone(), p.to_vec()).unwrap();
                    loss_value(&perturbed, &x)
                },
                net.params(),
                coord,
            );
            let err = rel_err(param_grad[coord], fd);
            assert!(
                err <= 1e-4,
                "shape {widths:?} probe {probe} coord {coord}: ad {} vs fd {} (rel {err})",
                param_grad[coord],
                fd
            );
        }
    }
}

#[test]
fn input_gradients_match_finite_differences() {
    // Input gradients are defined for scalar-output networks.
    let widths = vec![100usize, 128, 128, 1];
    let (net, x) = random_net_and_batch(&widths, 61);
    let (_, input_grad) = loss_grads(&net, &x);
    let mut probe_rng = RngState::stream(62, Stream::Probe);
    let flat: Vec<f64> = x.data().to_vec();
    for probe in 0..PROBES_PER_SHAPE {
        let coord = probe_rng.index(flat.len());
        let fd = central_diff(
            |v| {
                let xt = Tensor::new(x.rows(), x.cols(), v.to_vec()).unwrap();
                loss_value(&net, &xt)
            },
            &flat,
            coord,
        );
        let ad = input_grad.data()[coord];
        let err = rel_err(ad, fd);
        assert!(
            err <= 1e-4,
            "probe {probe} coord {coord}: ad {ad} vs fd {fd} (rel {err})"
        );
    }
}

#[test]
fn dedicated_input_gradient_op_matches_loss_gradient() {
    // grad_x of psi itself (not the squared loss): check against central
    // differences of the raw output for a single row.
    let widths = vec![2usize, 128, 128, 1];
    let (net, _) = random_net_and_batch(&widths, 63);
    let x = Tensor::new(1, 2, vec![0.37, -0.81]).unwrap();
    let g = gmelab_core::nd::input_gradient(&net, &x).unwrap();
    for coord in 0..2 {
        let fd = central_diff(
            |v| {
                let xt = Tensor::new(1, 2, v.to_vec()).unwrap();
                net.eval(&xt).unwrap().get(0, 0)
            },
            x.data(),
            coord,
        );
        let err = rel_err(g.get(0, coord), fd);
        assert!(err <= 1e-4, "coord {coord}: {} vs {fd}", g.get(0, coord));
    }
}

#[test]
fn grad_penalty_gradient_matches_finite_differences() {
    let widths = vec![100usize, 128, 128, 1];
    let (net, x) = random_net_and_batch(&widths, 70);
    let (_, analytic) = grad_penalty_and_param_grad(&net, &x).unwrap();
    let mut probe_rng = RngState::stream(71, Stream::Probe);
    for probe in 0..PROBES_PER_SHAPE {
        let coord = probe_rng.index(net.params().len());
        let fd = central_diff(
            |p| {
                let perturbed = Mlp::new(net.spec().clone(), p.to_vec()).unwrap();
                grad_penalty_and_param_grad(&perturbed, &x).unwrap().0
            },
            net.params(),
            coord,
        );
        let err = rel_err(analytic[coord], fd);
        assert!(
            err <= 1e-3,
            "probe {probe} coord {coord}: ad {} vs fd {fd} (rel {err})",
            analytic[coord]
        );
    }
}

#[test]
fn grad_penalty_gradient_is_exact_for_tanh_networks() {
    // tanh has an analytic second derivative, so the extended pass is exact
    // there too (no a.e. convention involved).
    let spec = MlpSpec::new(
        vec![3, 8, 1],
        vec![gmelab_core::nd::Activation::Tanh],
        gmelab_core::nd::Activation::Identity,
    )
    .unwrap();
    let mut rng = RngState::stream(77, Stream::Init);
    let net = Mlp::init_he(spec, &mut rng);
    let x = Tensor::new(3, 3, (0..9).map(|_| rng.normal()).collect()).unwrap();
    let (_, analytic) = grad_penalty_and_param_grad(&net, &x).unwrap();
    for coord in 0..net.params().len() {
        let fd = central_diff(
            |p| {
                let perturbed = Mlp::new(net.spec().clone(), p.to_vec()).unwrap();
                grad_penalty_and_param_grad(&perturbed, &x).unwrap().0
            },
            net.params(),
            coord,
        );
        let err = rel_err(analytic[coord], fd);
        assert!(err <= 1e-5, "coord {coord}: {} vs {fd}", analytic[coord]);
    }
}

#[test]
fn analytic_tape_gradient_example() {
    // loss = theta^2 at theta = 3: gradient 6.
    let mut tape = Tape::new();
    let theta = tape.param(1, 1, vec![3.0]);
    let loss = tape.mul(theta, theta).unwrap();
    let grads = tape.backward(loss).unwrap();
    assert_eq!(grads.node(theta, &tape), vec![6.0]);

    // A loss constant in theta has zero gradient.
    let mut tape = Tape::new();
    let theta = tape.param(1, 1, vec![3.0]);
    let c = tape.constant_owned(1, 1, vec![5.0]);
    let loss = tape.mul(c, c).unwrap();
    let grads = tape.backward(loss).unwrap();
    assert_eq!(grads.node(theta, &tape), vec![0.0]);

    // Non-scalar roots are contract errors.
    let mut tape = Tape::new();
    let v = tape.param(2, 1, vec![1.0, 2.0]);
    assert!(tape.backward(v).is_err());
}

#[test]
fn forward_backward_is_deterministic() {
    let widths = vec![2usize, 128, 128, 2];
    let run = || {
        let (net, x) = random_net_and_batch(&widths, 99);
        loss_grads(&net, &x).0
    };
    assert_eq!(run(), run());
}
