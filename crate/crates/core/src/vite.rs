//! Variational imaginary-time evolution of circuit parameters: assemble
//! `M θ̇ = C`, solve the ridge-regularized system and take Euler steps.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exact::{apply_sum_state, expectation, fidelity, SpectralDecomposition};
use crate::hadamard::{force_job, hadamard_test, overlap_job, CircuitContext, Shots};
use crate::pauli::PauliSum;
use crate::statevector::{AnsatzCircuit, StateVector};
use crate::trace::{Method, TracePoint, Trajectory};

/// How matrix elements are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExpectationMode {
    /// Direct state-vector algebra.
    Exact,
    /// Emulated ancilla circuits; `shots = 0` gives exact expectations.
    Hadamard { shots: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dbeta: f64,
    pub beta_max: f64,
    pub ridge: f64,
    pub mode: ExpectationMode,
    /// Master seed for shot sampling.
    pub shot_seed: u64,
    /// Keep a parameter snapshot at every recorded β.
    pub record_params: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            dbeta: 0.1,
            beta_max: 6.0,
            ridge: 1e-4,
            mode: ExpectationMode::Exact,
            shot_seed: 0,
            record_params: false,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dbeta > 0.0) || !self.dbeta.is_finite() {
            return Err(Error::Argument(format!("dbeta must be positive, got {}", self.dbeta)));
        }
        if !(self.beta_max >= self.dbeta) || !self.beta_max.is_finite() {
            return Err(Error::Argument(format!(
                "beta_max ({}) must be at least dbeta ({})",
                self.beta_max, self.dbeta
            )));
        }
        if !(self.ridge >= 0.0) {
            return Err(Error::Argument(format!(
                "ridge must be non-negative, got {}",
                self.ridge
            )));
        }
        Ok(())
    }

    /// Number of recorded steps, `⌈β_max/δβ⌉`.
    pub fn n_steps(&self) -> usize {
        ((self.beta_max / self.dbeta) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn beta_at(&self, step: usize) -> f64 {
        step as f64 * self.dbeta
    }

    pub(crate) fn shots(&self, step: usize) -> Shots {
        match self.mode {
            ExpectationMode::Exact => Shots::EXACT,
            ExpectationMode::Hadamard { shots } => Shots::new(shots, self.shot_seed).fork(step as u64),
        }
    }
}

/// `M Δθ/δβ = C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub m: DMatrix<f64>,
    pub c: DVector<f64>,
}

fn derivative_pairs(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    reference: &StateVector,
) -> Result<Vec<Vec<(Complex64, StateVector)>>> {
    (0..ansatz.n_params())
        .map(|j| ansatz.derivative_states(theta, j, reference))
        .collect()
}

/// `M_{jk} = Σ_{p,q} Re(a*_{j,p} a_{k,q} ⟨0̄|𝒰†_{j,p}𝒰_{k,q}|0̄⟩)`.
pub fn compute_m(ansatz: &AnsatzCircuit, theta: &[f64], reference: &StateVector) -> Result<DMatrix<f64>> {
    let pairs = derivative_pairs(ansatz, theta, reference)?;
    let np = ansatz.n_params();
    let mut m = DMatrix::zeros(np, np);
    for j in 0..np {
        for k in j..np {
            let mut acc = 0.0;
            for (aj, sj) in &pairs[j] {
                for (ak, sk) in &pairs[k] {
                    acc += (aj.conj() * ak * sj.inner(sk)?).re;
                }
            }
            m[(j, k)] = acc;
            m[(k, j)] = acc;
        }
    }
    Ok(m)
}

/// `M_{jk} = Re⟨∂_jφ|∂_kφ⟩` from assembled tangent vectors.
pub fn compute_m_from_tangents(ansatz: &AnsatzCircuit, theta: &[f64], reference: &StateVector) -> Result<DMatrix<f64>> {
    let t = ansatz.tangent_states(theta, reference)?;
    let np = t.len();
    let mut m = DMatrix::zeros(np, np);
    for j in 0..np {
        for k in 0..np {
            m[(j, k)] = t[j].inner(&t[k])?.re;
        }
    }
    Ok(m)
}

/// `C_j = −Re⟨φ|H|∂_jφ⟩`.
pub fn compute_c(ansatz: &AnsatzCircuit, theta: &[f64], h: &PauliSum, reference: &StateVector) -> Result<DVector<f64>> {
    check_dim(ansatz.n_qubits(), h.n_qubits())?;
    let phi = ansatz.run(theta, reference)?;
    let h_phi = apply_sum_state(h, &phi)?;
    let pairs = derivative_pairs(ansatz, theta, reference)?;
    let mut c = DVector::zeros(ansatz.n_params());
    for (j, terms) in pairs.iter().enumerate() {
        let mut acc = 0.0;
        for (a, s) in terms {
            acc += (a * h_phi.inner(s)?).re;
        }
        c[j] = -acc;
    }
    Ok(c)
}

/// `M` from the ancilla overlap circuits.
pub fn compute_m_hadamard(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    reference: &StateVector,
    shots: Shots,
) -> Result<DMatrix<f64>> {
    let ctx = CircuitContext {
        ansatz,
        theta,
        reference,
    };
    let np = ansatz.n_params();
    let mut m = DMatrix::zeros(np, np);
    let mut job_id = 0u64;
    for j in 0..np {
        for k in j..np {
            let mut acc = 0.0;
            for (p, tj) in ansatz.derivative_terms(j)?.iter().enumerate() {
                for (q, tk) in ansatz.derivative_terms(k)?.iter().enumerate() {
                    let job = overlap_job(&ctx, tk.phase - tj.phase, (j, p), (k, q))?.shots(shots.fork(job_id));
                    job_id += 1;
                    acc += tj.magnitude * tk.magnitude * hadamard_test(&job)?.value;
                }
            }
            m[(j, k)] = acc;
            m[(k, j)] = acc;
        }
    }
    Ok(m)
}

/// `C` from the ancilla force circuits, one per (parameter, term, Pauli).
pub fn compute_c_hadamard(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    h: &PauliSum,
    reference: &StateVector,
    shots: Shots,
) -> Result<DVector<f64>> {
    check_dim(ansatz.n_qubits(), h.n_qubits())?;
    let ctx = CircuitContext {
        ansatz,
        theta,
        reference,
    };
    let mut c = DVector::zeros(ansatz.n_params());
    let mut job_id = 0u64;
    for j in 0..ansatz.n_params() {
        let mut acc = 0.0;
        for (k, t) in ansatz.derivative_terms(j)?.iter().enumerate() {
            for (coef, p) in h.real_terms() {
                let job = force_job(&ctx, t.phase, p, (j, k))?.shots(shots.fork(job_id));
                job_id += 1;
                acc += t.magnitude * coef * hadamard_test(&job)?.value;
            }
        }
        c[j] = -acc;
    }
    Ok(c)
}

pub fn assemble_system(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    h: &PauliSum,
    reference: &StateVector,
    mode: ExpectationMode,
    shots: Shots,
) -> Result<LinearSystem> {
    match mode {
        ExpectationMode::Exact => Ok(LinearSystem {
            m: compute_m(ansatz, theta, reference)?,
            c: compute_c(ansatz, theta, h, reference)?,
        }),
        ExpectationMode::Hadamard { .. } => Ok(LinearSystem {
            m: compute_m_hadamard(ansatz, theta, reference, shots.fork(0))?,
            c: compute_c_hadamard(ansatz, theta, h, reference, shots.fork(1))?,
        }),
    }
}

/// `Δθ = (M + λI)⁻¹ C δβ`.
pub fn solve_update(sys: &LinearSystem, dbeta: f64, ridge: f64) -> Result<DVector<f64>> {
    let n = sys.m.nrows();
    check_dim(n, sys.c.len())?;
    if !(ridge >= 0.0) {
        return Err(Error::Argument(format!("ridge must be non-negative, got {ridge}")));
    }
    let a = &sys.m + DMatrix::identity(n, n) * ridge;
    if ridge == 0.0 {
        let min = SymmetricEigen::new(a.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let scale = sys.m.amax().max(1.0);
        if min <= 1e-12 * scale {
            return Err(Error::Singular { min_eigenvalue: min });
        }
    }
    let x = match a.clone().cholesky() {
        Some(ch) => ch.solve(&sys.c),
        None => a.lu().solve(&sys.c).ok_or(Error::Singular {
            min_eigenvalue: f64::NAN,
        })?,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite parameter velocity".into()));
    }
    Ok(x * dbeta)
}

/// Runs VITE from `θ = 0`, recording fidelity against the exact state and
/// the energy at `β = δβ, 2δβ, …`.
pub fn vite_evolve(
    config: &EvolutionConfig,
    ansatz: &AnsatzCircuit,
    h: &PauliSum,
    psi0: &StateVector,
) -> Result<Trajectory> {
    config.validate()?;
    let spectrum = SpectralDecomposition::of_sum(h)?;
    let mut theta = vec![0.0; ansatz.n_params()];
    let mut points = Vec::with_capacity(config.n_steps());
    let mut snapshots = Vec::new();
    for step in 1..=config.n_steps() {
        let beta = config.beta_at(step);
        let sys =
            assemble_system(ansatz, &theta, h, psi0, config.mode, config.shots(step)).map_err(|e| e.at_beta(beta))?;
        let dtheta = solve_update(&sys, config.dbeta, config.ridge).map_err(|e| e.at_beta(beta))?;
        theta.iter_mut().zip(dtheta.iter()).for_each(|(t, d)| *t += d);
        let phi = ansatz.run(&theta, psi0)?;
        let exact = spectrum.evolve(psi0, beta).map_err(|e| e.at_beta(beta))?;
        points.push(TracePoint {
            beta,
            fidelity: fidelity(&exact, &phi)?,
            energy: expectation(h, &phi)?.re,
        });
        if config.record_params {
            snapshots.push(theta.clone());
        }
    }
    Ok(Trajectory {
        method: Method::Vite,
        points,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::build_heisenberg;
    use crate::statevector::{initial_plus_state, Layout};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_rotation_metric_is_a_quarter() {
        let ansatz = AnsatzCircuit::new(Layout::NearestNeighbor, 1, 0).unwrap();
        for theta in [0.0, 0.7, -2.1] {
            let m = compute_m(&ansatz, &[theta], &initial_plus_state(1)).unwrap();
            assert_abs_diff_eq!(m[(0, 0)], 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_hamiltonian_has_zero_force() {
        let ansatz = AnsatzCircuit::new(Layout::AllToAll, 3, 2).unwrap();
        let theta: Vec<f64> = (0..9).map(|k| 0.1 * k as f64).collect();
        let c = compute_c(&ansatz, &theta, &PauliSum::zero(3), &initial_plus_state(3)).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_metric_update() {
        let sys = LinearSystem {
            m: DMatrix::identity(3, 3),
            c: DVector::from_vec(vec![1.0, -2.0, 0.5]),
        };
        let (dbeta, ridge) = (0.1, 1e-3);
        let d = solve_update(&sys, dbeta, ridge).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(d[k], sys.c[k] * dbeta / (1.0 + ridge), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_force_zero_update() {
        let sys = LinearSystem {
            m: DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
            c: DVector::zeros(2),
        };
        assert!(solve_update(&sys, 0.1, 1e-6).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn singular_without_ridge() {
        let sys = LinearSystem {
            m: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            c: DVector::from_vec(vec![1.0, 1.0]),
        };
        assert!(matches!(solve_update(&sys, 0.1, 0.0), Err(Error::Singular { .. })));
        assert!(solve_update(&sys, 0.1, 1e-6).is_ok());
    }

    #[test]
    fn zero_hamiltonian_keeps_fidelity() {
        let ansatz = AnsatzCircuit::new(Layout::NearestNeighbor, 2, 2).unwrap();
        let config = EvolutionConfig {
            beta_max: 1.0,
            ..Default::default()
        };
        let trace = vite_evolve(&config, &ansatz, &PauliSum::zero(2), &initial_plus_state(2)).unwrap();
        assert_eq!(trace.points.len(), 10);
        for p in &trace.points {
            assert_abs_diff_eq!(p.fidelity, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn step_count_rounding() {
        let c = EvolutionConfig::default();
        assert_eq!(c.n_steps(), 60);
        let c = EvolutionConfig { dbeta: 0.05, ..c };
        assert_eq!(c.n_steps(), 120);
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            EvolutionConfig {
                dbeta: 0.0,
                ..Default::default()
            },
            EvolutionConfig {
                beta_max: 0.01,
                ..Default::default()
            },
            EvolutionConfig {
                ridge: -1.0,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn heisenberg_run_is_deterministic() {
        let ansatz = AnsatzCircuit::new(Layout::AllToAll, 2, 2).unwrap();
        let h = build_heisenberg(2, -1.0, &[0.3, -0.6]).unwrap();
        let config = EvolutionConfig {
            beta_max: 0.5,
            ..Default::default()
        };
        let a = vite_evolve(&config, &ansatz, &h, &initial_plus_state(2)).unwrap();
        let b = vite_evolve(&config, &ansatz, &h, &initial_plus_state(2)).unwrap();
        assert_eq!(a, b);
    }
}
