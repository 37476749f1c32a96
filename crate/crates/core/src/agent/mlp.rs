//! Multilayer perceptron with a two-unit (V, A) output, stored as one flat
//! parameter vector so the optimizer and checkpoints see a single array.
//!
//! Weights are input-major (`W[i][o]` at `i * out + o`). With sparse inputs
//! the first layer then touches one contiguous row per non-zero entry.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::environment::SparseVector;

/// Network input: a molecule's sparse features plus the fraction of steps
/// remaining, which occupies index `body.dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub body: Arc<SparseVector>,
    pub steps_fraction: f32,
}

impl Candidate {
    pub fn dim(&self) -> usize {
        self.body.dim + 1
    }

    fn entries(&self) -> impl Iterator<Item = (usize, f32)> + '_ {
        self.body
            .indices
            .iter()
            .zip(&self.body.values)
            .map(|(&i, &v)| (i as usize, v))
            .chain(std::iter::once((self.body.dim, self.steps_fraction)))
    }

    /// From a dense vector whose last entry is the step fraction.
    pub fn from_dense(dense: &[f64]) -> Self {
        let (body, last) = dense.split_at(dense.len() - 1);
        Candidate {
            body: Arc::new(SparseVector::from_dense(body)),
            steps_fraction: last[0] as f32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    params: Vec<f64>,
    log_inputs: bool,
}

/// Per-candidate activations kept for the backward pass.
pub struct Activations {
    layers: Vec<Vec<f64>>,
}

impl Activations {
    pub fn value(&self) -> f64 {
        self.layers.last().unwrap()[0]
    }

    pub fn advantage(&self) -> f64 {
        self.layers.last().unwrap()[1]
    }
}

impl Mlp {
    /// He-uniform hidden weights, Glorot-uniform heads, zero biases.
    pub fn new(input: usize, hidden: &[usize], log_inputs: bool, rng: &mut ChaCha8Rng) -> Self {
        let mut sizes = vec![input];
        sizes.extend_from_slice(hidden);
        sizes.push(2);
        let mut mlp = Mlp::zeros(sizes, log_inputs);
        let layers = mlp.sizes.len() - 1;
        for l in 0..layers {
            let (fan_in, fan_out) = (mlp.sizes[l], mlp.sizes[l + 1]);
            let limit = if l + 1 == layers {
                (6.0 / (fan_in + fan_out) as f64).sqrt()
            } else {
                (6.0 / fan_in as f64).sqrt()
            };
            let w = mlp.offsets[l];
            for p in &mut mlp.params[w..w + fan_in * fan_out] {
                *p = rng.gen_range(-limit..limit);
            }
        }
        mlp
    }

    pub fn zeros(sizes: Vec<usize>, log_inputs: bool) -> Self {
        assert!(
            sizes.len() >= 2 && *sizes.last().unwrap() == 2,
            "output layer must have V and A units"
        );
        let mut offsets = Vec::with_capacity(sizes.len() - 1);
        let mut total = 0;
        for l in 0..sizes.len() - 1 {
            offsets.push(total);
            total += sizes[l] * sizes[l + 1] + sizes[l + 1];
        }
        Mlp {
            sizes,
            offsets,
            params: vec![0.0; total],
            log_inputs,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn log_inputs(&self) -> bool {
        self.log_inputs
    }

    /// `(weights, bias)` ranges of layer `l` in the flat vector.
    pub fn layer_ranges(&self, l: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let w = self.offsets[l];
        let n = self.sizes[l] * self.sizes[l + 1];
        (w..w + n, w + n..w + n + self.sizes[l + 1])
    }

    #[inline]
    fn transform(&self, x: f32) -> f64 {
        if self.log_inputs {
            (x as f64).ln_1p()
        } else {
            x as f64
        }
    }

    pub fn forward(&self, x: &Candidate) -> Activations {
        debug_assert_eq!(x.dim(), self.sizes[0]);
        let layers = self.sizes.len() - 1;
        let mut acts = Vec::with_capacity(layers + 1);
        acts.push(Vec::new());
        for l in 0..layers {
            let out = self.sizes[l + 1];
            let (w, b) = self.layer_ranges(l);
            let mut z = self.params[b].to_vec();
            if l == 0 {
                for (i, v) in x.entries() {
                    let v = self.transform(v);
                    if v == 0.0 {
                        continue;
                    }
                    let row = &self.params[w.start + i * out..w.start + (i + 1) * out];
                    for (zo, &wo) in z.iter_mut().zip(row) {
                        *zo += v * wo;
                    }
                }
            } else {
                for (i, &a) in acts[l].iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    let row = &self.params[w.start + i * out..w.start + (i + 1) * out];
                    for (zo, &wo) in z.iter_mut().zip(row) {
                        *zo += a * wo;
                    }
                }
            }
            if l + 1 < layers {
                for zo in &mut z {
                    *zo = zo.max(0.0);
                }
            }
            acts.push(z);
        }
        Activations { layers: acts }
    }

    /// Adds dL/dθ to `grad` given dL/dv and dL/da for one forward pass.
    pub fn backward(&self, x: &Candidate, acts: &Activations, dv: f64, da: f64, grad: &mut [f64]) {
        let layers = self.sizes.len() - 1;
        let mut delta = vec![dv, da];
        for l in (0..layers).rev() {
            let out = self.sizes[l + 1];
            let (w, b) = self.layer_ranges(l);
            for (g, d) in grad[b].iter_mut().zip(&delta) {
                *g += d;
            }
            if l == 0 {
                for (i, v) in x.entries() {
                    let v = self.transform(v);
                    if v == 0.0 {
                        continue;
                    }
                    let row = &mut grad[w.start + i * out..w.start + (i + 1) * out];
                    for (g, d) in row.iter_mut().zip(&delta) {
                        *g += v * d;
                    }
                }
                break;
            }
            let input = &acts.layers[l];
            let mut prev = vec![0.0; input.len()];
            for (i, &a) in input.iter().enumerate() {
                // ReLU: inactive units pass no gradient and add no weight gradient
                if a <= 0.0 {
                    continue;
                }
                let base = w.start + i * out;
                let mut acc = 0.0;
                for o in 0..out {
                    grad[base + o] += a * delta[o];
                    acc += self.params[base + o] * delta[o];
                }
                prev[i] = acc;
            }
            delta = prev;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for k in 0..params.len() {
            let g = grad[k];
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
            let mh = self.m[k] / c1;
            let vh = self.v[k] / c2;
            params[k] -= lr * mh / (vh.sqrt() + self.eps);
        }
    }
}
