//! Browser bindings: fidelity curves for VITE and VQNHITE, the exact
//! imaginary-time curve, and the spectrum of a small chain.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use vqnhite_core::{
    build_heisenberg, exact_ite, expectation, fidelity, initial_plus_state, vite_evolve, vqnhite_evolve, AnsatzCircuit,
    EvolutionConfig, HybridConfig, Layout, PauliSum, SpectralDecomposition, Trajectory,
};
use wasm_bindgen::prelude::*;

/// Largest chain the page offers; VQNHITE at n = 6 takes well under a second.
pub const MAX_QUBITS: usize = 6;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn hamiltonian(coupling: f64, fields: &[f64]) -> Result<PauliSum, JsError> {
    if fields.is_empty() || fields.len() > MAX_QUBITS {
        return Err(err(format!("need 1..={MAX_QUBITS} field values, got {}", fields.len())));
    }
    build_heisenberg(fields.len(), coupling, fields).map_err(err)
}

#[wasm_bindgen]
pub struct Curves {
    beta: Vec<f64>,
    vite: Vec<f64>,
    vqnhite: Vec<f64>,
}

#[wasm_bindgen]
impl Curves {
    pub fn beta(&self) -> Vec<f64> {
        self.beta.clone()
    }

    pub fn vite(&self) -> Vec<f64> {
        self.vite.clone()
    }

    pub fn vqnhite(&self) -> Vec<f64> {
        self.vqnhite.clone()
    }
}

fn fidelities(t: &Trajectory) -> Vec<f64> {
    t.points.iter().map(|p| p.fidelity).collect()
}

/// Fidelity with the exact state along β for both methods on one instance.
/// `layout` is `"nn"` or `"all"`.
#[wasm_bindgen]
pub fn compare(
    fields: &[f64],
    coupling: f64,
    layout: &str,
    dbeta: f64,
    beta_max: f64,
    seed: u32,
) -> Result<Curves, JsError> {
    let h = hamiltonian(coupling, fields)?;
    let n = fields.len();
    let layout: Layout = layout.parse().map_err(err)?;
    let ansatz = AnsatzCircuit::new(layout, n, 2).map_err(err)?;
    let evolution = EvolutionConfig {
        dbeta,
        beta_max,
        ..Default::default()
    };
    let psi0 = initial_plus_state(n);
    let vite = vite_evolve(&evolution, &ansatz, &h, &psi0).map_err(err)?;
    let hybrid = HybridConfig {
        evolution,
        ..Default::default()
    };
    let vq = vqnhite_evolve(&hybrid, &ansatz, &h, &psi0, seed.into()).map_err(err)?;
    Ok(Curves {
        beta: vite.points.iter().map(|p| p.beta).collect(),
        vite: fidelities(&vite),
        vqnhite: fidelities(&vq),
    })
}

/// Exact ITE from `|+…+⟩`: rows of `[β, F(ψ(β), ground), ⟨H⟩]`, flattened.
#[wasm_bindgen]
pub fn exact_curve(fields: &[f64], coupling: f64, dbeta: f64, beta_max: f64) -> Result<Vec<f64>, JsError> {
    let h = hamiltonian(coupling, fields)?;
    if !(dbeta > 0.0) || !(beta_max >= dbeta) {
        return Err(err("need 0 < dbeta ≤ beta_max"));
    }
    let sd = SpectralDecomposition::of_sum(&h).map_err(err)?;
    let ground = sd.ground_state();
    let psi0 = initial_plus_state(fields.len());
    let steps = (beta_max / dbeta - 1e-9).ceil() as usize;
    let mut out = Vec::with_capacity(3 * (steps + 1));
    for k in 0..=steps {
        let beta = k as f64 * dbeta;
        let psi = exact_ite(&h, &psi0, beta).map_err(err)?;
        out.extend([
            beta,
            fidelity(&ground, &psi).map_err(err)?,
            expectation(&h, &psi).map_err(err)?.re,
        ]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    gap: f64,
    overlap: f64,
}

#[wasm_bindgen]
impl Spectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// `|⟨ground|+…+⟩|²`
    #[wasm_bindgen(getter)]
    pub fn overlap(&self) -> f64 {
        self.overlap
    }
}

#[wasm_bindgen]
pub fn spectrum(fields: &[f64], coupling: f64) -> Result<Spectrum, JsError> {
    let h = hamiltonian(coupling, fields)?;
    let sd = SpectralDecomposition::of_sum(&h).map_err(err)?;
    let overlap = fidelity(&sd.ground_state(), &initial_plus_state(fields.len())).map_err(err)?;
    Ok(Spectrum {
        eigenvalues: sd.eigenvalues().to_vec(),
        gap: sd.gap(),
        overlap,
    })
}
