//! Minimal dense-network stack in f64: tanh hidden layers, linear output,
//! exact reverse-mode gradients (for parameters and inputs), and Adam.
//!
//! Batches are column-major: one sample per column, so a forward pass over
//! a batch is a handful of matrix-matrix products.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One affine layer. Also reused as the container for per-layer gradients
/// and optimizer moments, which share the parameter shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub w: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl Layer {
    fn zeros_like(&self) -> Layer {
        Layer {
            w: DMatrix::zeros(self.w.nrows(), self.w.ncols()),
            b: DVector::zeros(self.b.nrows()),
        }
    }
}

/// Feed-forward network: tanh on every hidden layer, linear output.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

/// Per-layer parameter gradients, shaped exactly like the network.
#[derive(Clone, Debug)]
pub struct MlpGrads {
    pub layers: Vec<Layer>,
}

/// Intermediate activations of one forward pass, kept for backprop.
/// `activations[0]` is the input; `activations[i+1]` is layer i's output
/// (post-tanh for hidden layers, raw affine for the last layer).
pub struct ForwardCache {
    activations: Vec<DMatrix<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &DMatrix<f64> {
        self.activations.last().expect("cache holds >= 2 matrices")
    }
}

impl Mlp {
    /// Uniform init in ±1/sqrt(fan_in) for weights and biases, drawn in a
    /// fixed order so a seed fully determines the parameters.
    pub fn new(sizes: &[usize], rng: &mut ChaCha8Rng) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        assert!(sizes.iter().all(|&s| s > 0), "layer sizes must be positive");
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for pair in sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let w = DMatrix::from_fn(fan_out, fan_in, |_, _| rng.gen_range(-bound..bound));
            let b = DVector::from_fn(fan_out, |_, _| rng.gen_range(-bound..bound));
            layers.push(Layer { w, b });
        }
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").w.nrows()
    }

    /// Forward pass over a batch (input_dim × batch → output_dim × batch).
    pub fn forward(&self, input: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(input.nrows(), self.input_dim(), "input dimension mismatch");
        let last = self.layers.len() - 1;
        let mut h = input.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = &layer.w * &h;
            for mut col in z.column_iter_mut() {
                col += &layer.b;
            }
            h = if i == last { z } else { z.map(f64::tanh) };
        }
        h
    }

    /// Forward pass keeping every intermediate activation for `backward`.
    pub fn forward_cached(&self, input: &DMatrix<f64>) -> ForwardCache {
        assert_eq!(input.nrows(), self.input_dim(), "input dimension mismatch");
        let last = self.layers.len() - 1;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.clone());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = &layer.w * activations.last().expect("non-empty");
            for mut col in z.column_iter_mut() {
                col += &layer.b;
            }
            activations.push(if i == last { z } else { z.map(f64::tanh) });
        }
        ForwardCache { activations }
    }

    /// Reverse accumulation: given dL/d(output) for the cached pass, returns
    /// dL/d(parameters) and dL/d(input). The caller bakes any batch scaling
    /// into `grad_output`.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        grad_output: &DMatrix<f64>,
    ) -> (MlpGrads, DMatrix<f64>) {
        assert_eq!(cache.activations.len(), self.layers.len() + 1);
        assert_eq!(grad_output.nrows(), self.output_dim());
        assert_eq!(grad_output.ncols(), cache.activations[0].ncols());

        let mut grads: Vec<Layer> = self.layers.iter().map(Layer::zeros_like).collect();
        // The output layer is linear, so its pre-activation gradient is
        // grad_output itself.
        let mut delta = grad_output.clone();
        for i in (0..self.layers.len()).rev() {
            grads[i].w = &delta * cache.activations[i].transpose();
            grads[i].b = delta.column_sum();
            let grad_input = self.layers[i].w.transpose() * &delta;
            if i == 0 {
                return (MlpGrads { layers: grads }, grad_input);
            }
            // Hidden activation a = tanh(z): d tanh/dz = 1 - a^2.
            delta = grad_input.zip_map(&cache.activations[i], |g, a| g * (1.0 - a * a));
        }
        unreachable!("loop returns at i == 0");
    }
}

/// Exponential-smoothing update of `target` toward `source`:
/// θ_target ← tau·θ_source + (1 − tau)·θ_target.
pub fn soft_update(target: &mut Mlp, source: &Mlp, tau: f64) {
    assert_eq!(target.layers.len(), source.layers.len());
    for (t, s) in target.layers.iter_mut().zip(&source.layers) {
        t.w.zip_apply(&s.w, |t, s| *t = tau * s + (1.0 - tau) * *t);
        t.b.zip_apply(&s.b, |t, s| *t = tau * s + (1.0 - tau) * *t);
    }
}

/// Adam with bias correction; one instance per network.
#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    m: Vec<Layer>,
    v: Vec<Layer>,
}

impl Adam {
    pub fn new(model: &Mlp, lr: f64) -> Self {
        let zeros: Vec<Layer> = model.layers.iter().map(Layer::zeros_like).collect();
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn step(&mut self, model: &mut Mlp, grads: &MlpGrads) {
        assert_eq!(model.layers.len(), grads.layers.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..model.layers.len() {
            self.update_slice(
                model.layers[i].w.as_mut_slice(),
                grads.layers[i].w.as_slice(),
                i,
                true,
                bc1,
                bc2,
            );
            self.update_slice(
                model.layers[i].b.as_mut_slice(),
                grads.layers[i].b.as_slice(),
                i,
                false,
                bc1,
                bc2,
            );
        }
    }

    fn update_slice(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        layer: usize,
        weights: bool,
        bc1: f64,
        bc2: f64,
    ) {
        let (m, v) = if weights {
            (
                self.m[layer].w.as_mut_slice(),
                self.v[layer].w.as_mut_slice(),
            )
        } else {
            (
                self.m[layer].b.as_mut_slice(),
                self.v[layer].b.as_mut_slice(),
            )
        };
        for k in 0..params.len() {
            m[k] = self.beta1 * m[k] + (1.0 - self.beta1) * grads[k];
            v[k] = self.beta2 * v[k] + (1.0 - self.beta2) * grads[k] * grads[k];
            params[k] -= self.lr * (m[k] / bc1) / ((v[k] / bc2).sqrt() + self.eps);
        }
    }
}
