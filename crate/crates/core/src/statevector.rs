//! Dense state vectors and the RY/CZ ansatz circuits.
//!
//! Amplitude index `s` encodes the computational basis state with qubit 0 as
//! the most significant bit. Parameter indices are zero-based.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_dim(1 << n_qubits, amps.len())?;
        Ok(Self { n_qubits, amps })
    }

    pub fn from_real(n_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::new(n_qubits, amps.iter().map(|&a| Complex64::from(a)).collect())
    }

    pub fn zeros(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            amps: vec![Complex64::default(); 1 << n_qubits],
        }
    }

    pub fn basis(n_qubits: usize, s: usize) -> Self {
        let mut v = Self::zeros(n_qubits);
        v.amps[s] = Complex64::from(1.0);
        v
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Degenerate(format!("cannot normalize a state of norm {norm}")));
        }
        Ok(self.scaled(Complex64::from(1.0 / norm)))
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * k).collect(),
        }
    }

    /// `self += k · other`
    pub fn axpy(&mut self, k: Complex64, other: &StateVector) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        self.amps.iter_mut().zip(&other.amps).for_each(|(a, b)| *a += k * b);
        Ok(())
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        check_dim(self.n_qubits, p.n_qubits())?;
        let mut out = Self::zeros(self.n_qubits);
        for (s, a) in self.amps.iter().enumerate() {
            let (phase, t) = p.apply_unchecked(s);
            out.amps[t] = phase * a;
        }
        Ok(out)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match gate {
            Gate::Ry { qubit, angle } => {
                self.check_qubit(*qubit)?;
                apply_ry(&mut self.amps, self.n_qubits, *qubit, *angle);
            }
            Gate::Cz { a, b } => {
                self.check_qubit(*a)?;
                self.check_qubit(*b)?;
                apply_cz(&mut self.amps, self.n_qubits, *a, *b);
            }
            Gate::Pauli(p) => *self = self.apply_pauli(p)?,
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits
            )))
        }
    }
}

/// Inner product `⟨a|b⟩`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner(b)
}

/// `|+…+⟩`, the default starting state.
pub fn initial_plus_state(n: usize) -> StateVector {
    let dim = 1usize << n;
    let amp = Complex64::from((dim as f64).sqrt().recip());
    StateVector {
        n_qubits: n,
        amps: vec![amp; dim],
    }
}

fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

fn apply_ry(amps: &mut [Complex64], n: usize, q: usize, angle: f64) {
    let (s, c) = (angle / 2.0).sin_cos();
    let m = bit(n, q);
    for i in 0..amps.len() {
        if i & m == 0 {
            let (a0, a1) = (amps[i], amps[i | m]);
            amps[i] = a0 * c - a1 * s;
            amps[i | m] = a0 * s + a1 * c;
        }
    }
}

fn apply_cz(amps: &mut [Complex64], n: usize, a: usize, b: usize) {
    let m = bit(n, a) | bit(n, b);
    amps.iter_mut()
        .enumerate()
        .filter(|(i, _)| i & m == m)
        .for_each(|(_, x)| *x = -*x);
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `exp(-i·angle·Y/2)`
    Ry {
        qubit: usize,
        angle: f64,
    },
    Cz {
        a: usize,
        b: usize,
    },
    Pauli(PauliString),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    NearestNeighbor,
    AllToAll,
}

impl Layout {
    pub fn name(self) -> &'static str {
        match self {
            Layout::NearestNeighbor => "nn",
            Layout::AllToAll => "all",
        }
    }

    fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Layout::NearestNeighbor => (0..n.saturating_sub(1)).map(|j| (j, j + 1)).collect(),
            Layout::AllToAll => (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" | "nearest-neighbor" => Ok(Layout::NearestNeighbor),
            "all" | "all-to-all" => Ok(Layout::AllToAll),
            other => Err(Error::Argument(format!("unknown ansatz layout {other:?}"))),
        }
    }
}

/// One term of `∂U_j/∂θ_j = Σ_k a_{j,k} U_j u_{j,k}` with `a = r·e^{iφ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTerm {
    pub magnitude: f64,
    pub phase: f64,
    pub generator: PauliString,
}

impl DerivativeTerm {
    pub fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Rotation { qubit: usize, param: usize },
    Cz(usize, usize),
}

/// Layers of parameterized RY rotations interleaved with fixed CZ
/// entanglers: `depth` blocks of (RY layer, CZ layer) and a closing RY layer.
///
/// With an even depth the CZ layers cancel pairwise, so `U(0)` is the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    layout: Layout,
    n_qubits: usize,
    depth: usize,
    ops: Vec<Op>,
    derivatives: Vec<Vec<DerivativeTerm>>,
}

impl AnsatzCircuit {
    pub fn new(layout: Layout, n_qubits: usize, depth: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Argument("ansatz needs at least one qubit".into()));
        }
        let mut ops = Vec::new();
        let mut derivatives = Vec::new();
        let mut rotation_layer = |ops: &mut Vec<Op>| {
            for q in 0..n_qubits {
                ops.push(Op::Rotation {
                    qubit: q,
                    param: derivatives.len(),
                });
                derivatives.push(vec![DerivativeTerm {
                    magnitude: 0.5,
                    phase: -FRAC_PI_2,
                    generator: PauliString::from_sparse(n_qubits, &[(q, Pauli::Y)]).expect("qubit in range"),
                }]);
            }
        };
        for _ in 0..depth {
            rotation_layer(&mut ops);
            ops.extend(layout.pairs(n_qubits).into_iter().map(|(a, b)| Op::Cz(a, b)));
        }
        rotation_layer(&mut ops);
        Ok(Self {
            layout,
            n_qubits,
            depth,
            ops,
            derivatives,
        })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_params(&self) -> usize {
        self.derivatives.len()
    }

    /// Derivative decomposition of parameter `j`.
    pub fn derivative_terms(&self, j: usize) -> Result<&[DerivativeTerm]> {
        self.derivatives
            .get(j)
            .map(Vec::as_slice)
            .ok_or_else(|| self.param_error(j))
    }

    fn param_error(&self, j: usize) -> Error {
        Error::Argument(format!("parameter index {j} out of range (N_p = {})", self.n_params()))
    }

    /// Gate list of `U(θ)` with the generator `u_{j,k}` optionally inserted
    /// right before the rotation carrying parameter `j`.
    pub fn gates(&self, theta: &[f64], insert: Option<(usize, &PauliString)>) -> Result<Vec<Gate>> {
        check_dim(self.n_params(), theta.len())?;
        if let Some((j, _)) = insert {
            if j >= self.n_params() {
                return Err(self.param_error(j));
            }
        }
        let mut gates = Vec::with_capacity(self.ops.len() + 1);
        for op in &self.ops {
            match *op {
                Op::Rotation { qubit, param } => {
                    if let Some((j, u)) = insert {
                        if j == param {
                            gates.push(Gate::Pauli(u.clone()));
                        }
                    }
                    gates.push(Gate::Ry {
                        qubit,
                        angle: theta[param],
                    });
                }
                Op::Cz(a, b) => gates.push(Gate::Cz { a, b }),
            }
        }
        Ok(gates)
    }

    pub fn run(&self, theta: &[f64], input: &StateVector) -> Result<StateVector> {
        self.run_inserted(theta, input, None)
    }

    /// `𝒰_{j,k}|input⟩` when `insert = Some((j, u_{j,k}))`.
    pub fn run_inserted(
        &self,
        theta: &[f64],
        input: &StateVector,
        insert: Option<(usize, &PauliString)>,
    ) -> Result<StateVector> {
        check_dim(self.n_qubits, input.n_qubits())?;
        let mut out = input.clone();
        for g in self.gates(theta, insert)? {
            out.apply_gate(&g)?;
        }
        Ok(out)
    }

    /// Pairs `(a_{j,k}, 𝒰_{j,k}|input⟩)` with `Σ_k a_{j,k}𝒰_{j,k}|input⟩ = ∂_j U|input⟩`.
    pub fn derivative_states(
        &self,
        theta: &[f64],
        j: usize,
        input: &StateVector,
    ) -> Result<Vec<(Complex64, StateVector)>> {
        self.derivative_terms(j)?
            .iter()
            .map(|t| {
                let state = self.run_inserted(theta, input, Some((j, &t.generator)))?;
                Ok((t.coefficient(), state))
            })
            .collect()
    }

    /// Assembled `∂_j U(θ)|input⟩` for every parameter.
    pub fn tangent_states(&self, theta: &[f64], input: &StateVector) -> Result<Vec<StateVector>> {
        (0..self.n_params())
            .map(|j| {
                let mut acc = StateVector::zeros(self.n_qubits);
                for (a, s) in self.derivative_states(theta, j, input)? {
                    acc.axpy(a, &s)?;
                }
                Ok(acc)
            })
            .collect()
    }
}

/// `U(θ)|input⟩`.
pub fn run_circuit(ansatz: &AnsatzCircuit, theta: &[f64], input: &StateVector) -> Result<StateVector> {
    ansatz.run(theta, input)
}
