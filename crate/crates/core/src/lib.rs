//! Variational imaginary-time evolution with a circuit ansatz, optionally
//! dressed by a neural diagonal operator, plus the exact reference engines
//! and ancilla-circuit emulation used to validate it.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod hadamard;
pub mod hybrid;
pub mod neural;
pub mod pauli;
pub mod statevector;
pub mod trace;
pub mod vite;

pub use error::{Error, Result};
pub use exact::{exact_ite, expectation, fidelity, finite_diff, SpectralDecomposition};
pub use hybrid::{
    build_hybrid_state, compute_d, cost_f, cost_gradients, expectation_energy, hybrid_force, hybrid_metric,
    init_optimize, vqnhite_evolve, HybridConfig, HybridParams, HybridState, InitTarget, NormDerivatives,
};
pub use neural::{init_params, MlpParams};
pub use pauli::{build_heisenberg, taylor_ite_pauli, Pauli, PauliString, PauliSum};
pub use statevector::{initial_plus_state, AnsatzCircuit, Layout, StateVector};
pub use trace::{Method, TracePoint, Trajectory};
pub use vite::{vite_evolve, EvolutionConfig, ExpectationMode, LinearSystem};
