//! Feedforward network `f_φ(s)` defining the diagonal operator
//! `f̂(φ) = Σ_s f_φ(s)|s⟩⟨s|`.
//!
//! Inputs are the bits of `s` mapped to ±1, hidden layers use `tanh`, and the
//! scalar output passes through `exp`, so `f > 0` and a zeroed last layer
//! gives `f ≡ 1`.

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::statevector::StateVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    n_in: usize,
    n_out: usize,
    /// Row-major `n_out × n_in`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            weights: vec![0.0; n_in * n_out],
            bias: vec![0.0; n_out],
        }
    }

    fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn affine(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_out)
            .map(|o| {
                let row = &self.weights[o * self.n_in..(o + 1) * self.n_in];
                self.bias[o] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }
}

/// Network parameters `φ = {W_j, b_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    layers: Vec<Layer>,
}

/// Default layer widths `[N, N, ⌊N/2⌋, 1]` (hidden widths at least one).
pub fn default_widths(n_qubits: usize) -> Vec<usize> {
    vec![n_qubits, n_qubits.max(1), (n_qubits / 2).max(1), 1]
}

impl MlpParams {
    pub fn zeros(widths: &[usize]) -> Result<Self> {
        if widths.len() < 2 || *widths.last().unwrap() != 1 || widths.contains(&0) {
            return Err(Error::Argument(format!(
                "layer widths {widths:?} must be positive and end in a single output"
            )));
        }
        Ok(Self {
            layers: widths.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.n_inputs())
            .chain(self.layers.iter().map(|l| l.n_out))
            .collect()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Layer::n_params).sum()
    }

    /// Index of the output bias in the flat parameter vector.
    pub fn last_bias_index(&self) -> usize {
        self.n_params() - 1
    }

    /// Layer-major flat record: `W_0` (row-major), `b_0`, `W_1`, `b_1`, ….
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        check_dim(self.n_params(), flat.len())?;
        let mut rest = flat;
        for l in &mut self.layers {
            let (w, tail) = rest.split_at(l.weights.len());
            let (b, tail) = tail.split_at(l.bias.len());
            l.weights.copy_from_slice(w);
            l.bias.copy_from_slice(b);
            rest = tail;
        }
        Ok(())
    }

    pub fn from_flat(widths: &[usize], flat: &[f64]) -> Result<Self> {
        let mut p = Self::zeros(widths)?;
        p.set_flat(flat)?;
        Ok(p)
    }

    fn input(&self, s: usize) -> Vec<f64> {
        let n = self.n_inputs();
        (0..n)
            .map(|q| if (s >> (n - 1 - q)) & 1 == 1 { 1.0 } else { -1.0 })
            .collect()
    }

    /// Activations of every layer; the last entry is the output pre-activation.
    fn activations(&self, s: usize) -> Vec<Vec<f64>> {
        let mut acts = vec![self.input(s)];
        let last = self.layers.len() - 1;
        for (k, l) in self.layers.iter().enumerate() {
            let z = l.affine(acts.last().unwrap());
            acts.push(if k == last {
                z
            } else {
                z.into_iter().map(f64::tanh).collect()
            });
        }
        acts
    }

    /// `f_φ(s)`.
    pub fn forward(&self, s: usize) -> f64 {
        self.activations(s).last().unwrap()[0].exp()
    }

    /// `∂f_φ(s)/∂φ` in flat layer-major order.
    pub fn gradient(&self, s: usize) -> Vec<f64> {
        let acts = self.activations(s);
        let f = acts.last().unwrap()[0].exp();
        let mut grad = vec![0.0; self.n_params()];
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut off = 0;
        for l in &self.layers {
            offsets.push(off);
            off += l.n_params();
        }
        // d f / d(pre-activation) of the current layer's outputs
        let mut delta = vec![f];
        for (k, l) in self.layers.iter().enumerate().rev() {
            let x = &acts[k];
            let base = offsets[k];
            for o in 0..l.n_out {
                for i in 0..l.n_in {
                    grad[base + o * l.n_in + i] = delta[o] * x[i];
                }
                grad[base + l.weights.len() + o] = delta[o];
            }
            if k > 0 {
                delta = (0..l.n_in)
                    .map(|i| {
                        let back: f64 = (0..l.n_out).map(|o| l.weights[o * l.n_in + i] * delta[o]).sum();
                        back * (1.0 - x[i] * x[i])
                    })
                    .collect();
            }
        }
        grad
    }

    /// `f_φ(s)` for every basis state of the register.
    pub fn values(&self) -> Vec<f64> {
        (0..1usize << self.n_inputs()).map(|s| self.forward(s)).collect()
    }

    /// Rows of `∂f_φ(s)/∂φ`, one per basis state.
    pub fn gradient_table(&self) -> Vec<Vec<f64>> {
        (0..1usize << self.n_inputs()).map(|s| self.gradient(s)).collect()
    }

    /// `f̂(φ)|ψ⟩`, generally unnormalized.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.n_inputs(), psi.n_qubits())?;
        let amps = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(s, a)| a * self.forward(s))
            .collect();
        StateVector::new(psi.n_qubits(), amps)
    }
}

pub fn nn_forward(phi: &MlpParams, s: usize) -> f64 {
    phi.forward(s)
}

pub fn nn_gradient(phi: &MlpParams, s: usize) -> Vec<f64> {
    phi.gradient(s)
}

pub fn apply_f(phi: &MlpParams, psi: &StateVector) -> Result<StateVector> {
    phi.apply(psi)
}

/// Multiplies amplitude `s` by `weights[s]`.
pub fn apply_diagonal(weights: &[f64], psi: &StateVector) -> Result<StateVector> {
    check_dim(psi.dim(), weights.len())?;
    let amps = psi
        .amplitudes()
        .iter()
        .zip(weights)
        .map(|(a, &w)| a * Complex64::from(w))
        .collect();
    StateVector::new(psi.n_qubits(), amps)
}

/// Random hidden layers (uniform on `±1/√fan_in`) and a zeroed output layer.
pub fn init_params(seed: u64, n_qubits: usize) -> MlpParams {
    init_params_with_widths(seed, &default_widths(n_qubits)).expect("default widths are valid")
}

pub fn init_params_with_widths(seed: u64, widths: &[usize]) -> Result<MlpParams> {
    let mut params = MlpParams::zeros(widths)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden = params.layers.len() - 1;
    for l in &mut params.layers[..hidden] {
        let bound = (l.n_in as f64).sqrt().recip();
        let dist = Uniform::new_inclusive(-bound, bound);
        l.weights.iter_mut().for_each(|w| *w = dist.sample(&mut rng));
        l.bias.iter_mut().for_each(|b| *b = dist.sample(&mut rng));
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::initial_plus_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_widths_and_count() {
        assert_eq!(default_widths(6), vec![6, 6, 3, 1]);
        let p = init_params(1, 6);
        assert_eq!(p.n_params(), 6 * 6 + 6 + 6 * 3 + 3 + 3 + 1);
    }

    #[test]
    fn zero_network_is_identity() {
        let p = MlpParams::zeros(&default_widths(4)).unwrap();
        for s in 0..16 {
            assert_eq!(p.forward(s), 1.0);
        }
    }

    #[test]
    fn fresh_params_give_identity_operator() {
        for seed in 0..5 {
            let p = init_params(seed, 5);
            assert!(p.values().iter().all(|&f| f == 1.0));
        }
    }

    #[test]
    fn init_is_seed_deterministic() {
        assert_eq!(init_params(7, 4), init_params(7, 4));
        assert_ne!(init_params(7, 4).to_flat(), init_params(8, 4).to_flat());
    }

    #[test]
    fn init_respects_fan_in_bound() {
        let p = init_params(3, 6);
        for l in &p.layers()[..2] {
            let bound = (l.n_in as f64).sqrt().recip();
            assert!(l.weights().iter().chain(l.bias()).all(|v| v.abs() <= bound));
        }
        let last = p.layers().last().unwrap();
        assert!(last.weights().iter().chain(last.bias()).all(|&v| v == 0.0));
    }

    #[test]
    fn zero_last_layer_gradient() {
        let p = init_params(11, 4);
        let g = p.gradient(0b0110);
        assert_eq!(g[p.last_bias_index()], 1.0);
        let last_len = p.layers().last().unwrap().n_params();
        let earlier = &g[..g.len() - last_len];
        assert!(earlier.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flat_round_trip() {
        let p = init_params(5, 4);
        let q = MlpParams::from_flat(&p.widths(), &p.to_flat()).unwrap();
        assert_eq!(p, q);
        assert!(MlpParams::from_flat(&p.widths(), &[0.0; 3]).is_err());
    }

    #[test]
    fn identity_network_leaves_state_alone() {
        let psi = initial_plus_state(3);
        let out = init_params(2, 3).apply(&psi).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn bad_widths_rejected() {
        assert!(MlpParams::zeros(&[3, 2]).is_err());
        assert!(MlpParams::zeros(&[3, 0, 1]).is_err());
        assert!(MlpParams::zeros(&[3]).is_err());
    }

    #[test]
    fn output_is_positive() {
        let mut p = init_params(9, 3);
        let flat: Vec<f64> = p
            .to_flat()
            .iter()
            .enumerate()
            .map(|(k, v)| v + 0.3 * (k as f64).sin())
            .collect();
        p.set_flat(&flat).unwrap();
        assert!(p.values().iter().all(|&f| f > 0.0));
        assert_abs_diff_eq!(p.forward(5), p.forward(5));
    }
}
