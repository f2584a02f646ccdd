//! Joint evolution of circuit parameters `θ` and network parameters `φ` for
//! the state `|Φ⟩ = C f̂(φ)U(θ)|0̄⟩`, `C = ⟨φ̃|φ̃⟩^{-1/2}`.
//!
//! Every matrix element is assembled from the unnormalized quantities
//!
//! * `N = ⟨φ̃|φ̃⟩`, `D_a = Re⟨φ̃|∂_aφ̃⟩`,
//! * the raw Gram matrix `Re⟨∂_aφ̃|∂_bφ̃⟩`,
//! * `⟨φ̃|H|φ̃⟩` and `Re⟨∂_aφ̃|H|φ̃⟩`,
//!
//! which either come from state-vector algebra or from ancilla circuits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exact::{apply_sum_state, fidelity, SpectralDecomposition};
use crate::hadamard::{
    basis_probs, diagonal_sign, pm_table, AppendixElement, CircuitContext, MeasurementBasisV, Shots,
};
use crate::neural::{default_widths, init_params_with_widths, MlpParams};
use crate::pauli::{taylor_ite_pauli, PauliSum};
use crate::statevector::{AnsatzCircuit, StateVector};
use crate::trace::{Method, TracePoint, Trajectory};
use crate::vite::{solve_update, EvolutionConfig, ExpectationMode, LinearSystem};

/// Combined parameters, flattened as `[θ | φ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridParams {
    pub theta: Vec<f64>,
    pub phi: MlpParams,
}

impl HybridParams {
    pub fn new(theta: Vec<f64>, phi: MlpParams) -> Self {
        Self { theta, phi }
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.n_params()
    }

    pub fn len(&self) -> usize {
        self.n_theta() + self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.theta.clone();
        out.extend(self.phi.to_flat());
        out
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        check_dim(self.len(), flat.len())?;
        let (t, p) = flat.split_at(self.n_theta());
        self.theta.copy_from_slice(t);
        self.phi.set_flat(p)
    }

    /// Same shapes as `self`, values from `flat`.
    pub fn with_flat(&self, flat: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        out.set_flat(flat)?;
        Ok(out)
    }

    fn check(&self, ansatz: &AnsatzCircuit) -> Result<()> {
        check_dim(ansatz.n_params(), self.n_theta())?;
        check_dim(ansatz.n_qubits(), self.phi.n_inputs())
    }
}

/// `|φ̃⟩ = f̂(φ)U(θ)|0̄⟩` together with its normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub raw: StateVector,
    pub norm_const: f64,
}

impl HybridState {
    pub fn normalized(&self) -> StateVector {
        self.raw.scaled(Complex64::from(self.norm_const))
    }
}

pub fn build_hybrid_state(
    params: &HybridParams,
    ansatz: &AnsatzCircuit,
    reference: &StateVector,
) -> Result<HybridState> {
    params.check(ansatz)?;
    let raw = params.phi.apply(&ansatz.run(&params.theta, reference)?)?;
    let norm = raw.norm();
    if !(norm > 1e-300) || !norm.is_finite() {
        return Err(Error::Degenerate(format!("hybrid state has norm {norm}")));
    }
    Ok(HybridState {
        raw,
        norm_const: norm.recip(),
    })
}

/// `D_a = ½ ∂_a⟨φ̃|φ̃⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormDerivatives {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl NormDerivatives {
    pub fn flatten(&self) -> Vec<f64> {
        self.theta.iter().chain(&self.phi).copied().collect()
    }
}

/// Circuit state, tangents and network tables at one parameter point.
struct Expansion {
    circuit: Vec<Complex64>,
    tangents: Vec<Vec<Complex64>>,
    f: Vec<f64>,
    /// `df[s][k] = ∂f(s)/∂φ_k`
    df: Vec<Vec<f64>>,
}

impl Expansion {
    fn new(params: &HybridParams, ansatz: &AnsatzCircuit, reference: &StateVector) -> Result<Self> {
        params.check(ansatz)?;
        Ok(Self {
            circuit: ansatz.run(&params.theta, reference)?.into_amplitudes(),
            tangents: ansatz
                .tangent_states(&params.theta, reference)?
                .into_iter()
                .map(StateVector::into_amplitudes)
                .collect(),
            f: params.phi.values(),
            df: params.phi.gradient_table(),
        })
    }

    fn probs(&self) -> Vec<f64> {
        self.circuit.iter().map(|a| a.norm_sqr()).collect()
    }

    fn raw(&self) -> Vec<Complex64> {
        self.circuit.iter().zip(&self.f).map(|(a, f)| a * f).collect()
    }

    fn norm(&self) -> f64 {
        self.probs().iter().zip(&self.f).map(|(p, f)| f * f * p).sum()
    }

    fn d(&self) -> NormDerivatives {
        let probs = self.probs();
        let n_phi = self.df.first().map_or(0, Vec::len);
        let theta = self
            .tangents
            .iter()
            .map(|t| {
                (0..self.f.len())
                    .map(|s| (self.f[s] * self.f[s] * self.circuit[s].conj() * t[s]).re)
                    .sum()
            })
            .collect();
        let phi = (0..n_phi)
            .map(|k| (0..self.f.len()).map(|s| self.f[s] * self.df[s][k] * probs[s]).sum())
            .collect();
        NormDerivatives { theta, phi }
    }

    fn n_theta(&self) -> usize {
        self.tangents.len()
    }

    fn n_phi(&self) -> usize {
        self.df.first().map_or(0, Vec::len)
    }

    /// `Re⟨∂_aφ̃|∂_bφ̃⟩` block by block.
    fn raw_gram(&self) -> DMatrix<f64> {
        let (nt, np) = (self.n_theta(), self.n_phi());
        let dim = self.f.len();
        let probs = self.probs();
        let mut g = DMatrix::zeros(nt + np, nt + np);
        for j in 0..nt {
            for k in j..nt {
                let v: f64 = (0..dim)
                    .map(|s| (self.tangents[j][s].conj() * self.f[s] * self.f[s] * self.tangents[k][s]).re)
                    .sum();
                g[(j, k)] = v;
                g[(k, j)] = v;
            }
            for k in 0..np {
                let v: f64 = (0..dim)
                    .map(|s| (self.tangents[j][s].conj() * self.f[s] * self.df[s][k] * self.circuit[s]).re)
                    .sum();
                g[(j, nt + k)] = v;
                g[(nt + k, j)] = v;
            }
        }
        for j in 0..np {
            for k in j..np {
                let v: f64 = (0..dim).map(|s| self.df[s][j] * self.df[s][k] * probs[s]).sum();
                g[(nt + j, nt + k)] = v;
                g[(nt + k, nt + j)] = v;
            }
        }
        g
    }

    /// `(⟨φ̃|H|φ̃⟩, Re⟨∂_aφ̃|H|φ̃⟩)`.
    fn energy_terms(&self, h: &PauliSum, n_qubits: usize) -> Result<(f64, Vec<f64>)> {
        let raw = StateVector::new(n_qubits, self.raw())?;
        let h_raw = apply_sum_state(h, &raw)?;
        let hr = h_raw.amplitudes();
        let total = raw.inner(&h_raw)?.re;
        let mut grad = Vec::with_capacity(self.n_theta() + self.n_phi());
        for t in &self.tangents {
            grad.push((0..hr.len()).map(|s| (t[s].conj() * self.f[s] * hr[s]).re).sum());
        }
        for k in 0..self.n_phi() {
            grad.push(
                (0..hr.len())
                    .map(|s| (self.circuit[s].conj() * self.df[s][k] * hr[s]).re)
                    .sum(),
            );
        }
        Ok((total, grad))
    }
}

/// Unnormalized building blocks of the metric and force.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridBlocks {
    pub norm: f64,
    pub d: NormDerivatives,
    pub raw_gram: DMatrix<f64>,
    /// `⟨φ̃|H|φ̃⟩`, absent when no Hamiltonian was supplied.
    pub raw_energy: Option<f64>,
    /// `Re⟨∂_aφ̃|H|φ̃⟩`
    pub raw_energy_grad: Option<Vec<f64>>,
}

impl HybridBlocks {
    pub fn exact(
        params: &HybridParams,
        ansatz: &AnsatzCircuit,
        h: Option<&PauliSum>,
        reference: &StateVector,
    ) -> Result<Self> {
        let ex = Expansion::new(params, ansatz, reference)?;
        let (raw_energy, raw_energy_grad) = match h {
            Some(h) => {
                check_dim(ansatz.n_qubits(), h.n_qubits())?;
                let (e, g) = ex.energy_terms(h, ansatz.n_qubits())?;
                (Some(e), Some(g))
            }
            None => (None, None),
        };
        Ok(Self {
            norm: ex.norm(),
            d: ex.d(),
            raw_gram: ex.raw_gram(),
            raw_energy,
            raw_energy_grad,
        })
    }

    /// Blocks estimated from ancilla circuits and computational/`V`-basis
    /// sampling of `U(θ)|0̄⟩`; network values are evaluated classically.
    pub fn hadamard(
        params: &HybridParams,
        ansatz: &AnsatzCircuit,
        h: Option<&PauliSum>,
        reference: &StateVector,
        shots: Shots,
    ) -> Result<Self> {
        params.check(ansatz)?;
        let ctx = CircuitContext {
            ansatz,
            theta: &params.theta,
            reference,
        };
        let (nt, np) = (params.n_theta(), params.n_phi());
        let f = params.phi.values();
        let df = params.phi.gradient_table();
        let dim = f.len();
        let circuit = ansatz.run(&params.theta, reference)?;
        let probs = basis_probs(&circuit, shots.fork(0));
        let mut next = 1u64;
        let mut fork = || {
            next += 1;
            shots.fork(next)
        };

        let norm: f64 = (0..dim).map(|s| f[s] * f[s] * probs[s]).sum();
        let f2 = f.iter().map(|x| x * x).collect::<Vec<_>>();
        let f_df: Vec<Vec<f64>> = (0..np).map(|k| (0..dim).map(|s| f[s] * df[s][k]).collect()).collect();
        let mut d_theta = vec![0.0; nt];
        let d_phi: Vec<f64> = (0..np).map(|k| (0..dim).map(|s| f_df[k][s] * probs[s]).sum()).collect();
        let mut g = DMatrix::zeros(nt + np, nt + np);

        // Hamiltonian split into a diagonal weight and non-diagonal strings.
        let mut diag_weight = vec![0.0; dim];
        let mut offdiag = Vec::new();
        if let Some(h) = h {
            check_dim(ansatz.n_qubits(), h.n_qubits())?;
            for (c, p) in h.real_terms() {
                if p.is_diagonal() {
                    for (s, w) in diag_weight.iter_mut().enumerate() {
                        *w += c * diagonal_sign(p, s);
                    }
                } else {
                    offdiag.push((c, MeasurementBasisV::build(p)?));
                }
            }
        }
        let mut grad = vec![0.0; nt + np];

        for j in 0..nt {
            for (l, term) in ansatz.derivative_terms(j)?.iter().enumerate() {
                let r = term.magnitude;
                let record = AppendixElement::Fig5a1 { j, l, weights: &f2 }
                    .job(&ctx)?
                    .shots(fork())
                    .run()?;
                d_theta[j] += r * record.estimate(Some(&f2))?.value;
                for k in 0..np {
                    let v = r * record.estimate(Some(&f_df[k]))?.value;
                    g[(j, nt + k)] += v;
                    g[(nt + k, j)] += v;
                }
                if h.is_some() {
                    let w: Vec<f64> = (0..dim).map(|s| f2[s] * diag_weight[s]).collect();
                    grad[j] += r * record.estimate(Some(&w))?.value;
                    for (c, v) in &offdiag {
                        let w: Vec<f64> = (0..dim).map(|t| v.outcome_sign(t) * f[t] * f[v.partner(t)]).collect();
                        let el = AppendixElement::Fig5a2 {
                            j,
                            l,
                            pauli: v.pauli(),
                            weights: &w,
                        };
                        grad[j] += c * r * el.job(&ctx)?.shots(fork()).run()?.estimate(Some(&w))?.value;
                    }
                }
            }
            for k in j..nt {
                let mut acc = 0.0;
                for (l1, t1) in ansatz.derivative_terms(j)?.iter().enumerate() {
                    for (l2, t2) in ansatz.derivative_terms(k)?.iter().enumerate() {
                        let el = AppendixElement::Fig5b {
                            j,
                            l1,
                            k,
                            l2,
                            weights: &f2,
                        };
                        acc += t1.magnitude * t2.magnitude * el.evaluate(&ctx, fork())?.value.re;
                    }
                }
                g[(j, k)] = acc;
                g[(k, j)] = acc;
            }
        }
        for a in 0..np {
            for b in a..np {
                let v: f64 = (0..dim).map(|s| df[s][a] * df[s][b] * probs[s]).sum();
                g[(nt + a, nt + b)] = v;
                g[(nt + b, nt + a)] = v;
            }
        }

        let (raw_energy, raw_energy_grad) = if h.is_some() {
            let mut energy: f64 = (0..dim).map(|s| f2[s] * diag_weight[s] * probs[s]).sum();
            for k in 0..np {
                grad[nt + k] = (0..dim).map(|s| f_df[k][s] * diag_weight[s] * probs[s]).sum();
            }
            for (c, v) in &offdiag {
                let table = pm_table(v, &circuit, fork())?;
                for row in &table {
                    let diff = row.plus - row.minus;
                    energy += c * diff * f[row.s] * f[row.partner];
                    for k in 0..np {
                        let sym = 0.5 * (df[row.s][k] * f[row.partner] + f[row.s] * df[row.partner][k]);
                        grad[nt + k] += c * diff * sym;
                    }
                }
            }
            (Some(energy), Some(grad))
        } else {
            (None, None)
        };

        Ok(Self {
            norm,
            d: NormDerivatives {
                theta: d_theta,
                phi: d_phi,
            },
            raw_gram: g,
            raw_energy,
            raw_energy_grad,
        })
    }

    fn check_norm(&self) -> Result<()> {
        if !(self.norm > 0.0) || !self.norm.is_finite() {
            return Err(Error::Degenerate(format!(
                "hybrid state has squared norm {}",
                self.norm
            )));
        }
        Ok(())
    }

    /// `Re⟨∂_aΦ|∂_bΦ⟩ = C²Re⟨∂_aφ̃|∂_bφ̃⟩ − C⁴D_aD_b`.
    pub fn metric(&self) -> Result<DMatrix<f64>> {
        self.check_norm()?;
        let d = DVector::from_vec(self.d.flatten());
        let c2 = self.norm.recip();
        Ok(&self.raw_gram * c2 - &d * d.transpose() * (c2 * c2))
    }

    /// `E = ⟨Φ|H|Φ⟩`.
    pub fn energy(&self) -> Result<f64> {
        self.check_norm()?;
        let e = self
            .raw_energy
            .ok_or_else(|| Error::Argument("blocks were built without a Hamiltonian".into()))?;
        Ok(e / self.norm)
    }

    /// `−Re⟨∂_aΦ|H|Φ⟩ = −C²Re⟨∂_aφ̃|H|φ̃⟩ + C²D_a E`.
    pub fn force(&self) -> Result<DVector<f64>> {
        let e = self.energy()?;
        let grad = self.raw_energy_grad.as_ref().expect("set together with raw_energy");
        let c2 = self.norm.recip();
        Ok(DVector::from_iterator(
            grad.len(),
            grad.iter().zip(self.d.flatten()).map(|(g, d)| -c2 * g + c2 * d * e),
        ))
    }
}

pub fn compute_d(params: &HybridParams, ansatz: &AnsatzCircuit, reference: &StateVector) -> Result<NormDerivatives> {
    Ok(Expansion::new(params, ansatz, reference)?.d())
}

pub fn hybrid_metric(params: &HybridParams, ansatz: &AnsatzCircuit, reference: &StateVector) -> Result<DMatrix<f64>> {
    HybridBlocks::exact(params, ansatz, None, reference)?.metric()
}

pub fn hybrid_force(
    params: &HybridParams,
    ansatz: &AnsatzCircuit,
    h: &PauliSum,
    reference: &StateVector,
) -> Result<DVector<f64>> {
    HybridBlocks::exact(params, ansatz, Some(h), reference)?.force()
}

/// `E = Σ_j h_j⟨φ̃|P_j|φ̃⟩ / ⟨φ̃|φ̃⟩`.
pub fn expectation_energy(
    params: &HybridParams,
    ansatz: &AnsatzCircuit,
    h: &PauliSum,
    reference: &StateVector,
) -> Result<f64> {
    let state = build_hybrid_state(params, ansatz, reference)?;
    let raw_h = apply_sum_state(h, &state.raw)?;
    Ok(state.raw.inner(&raw_h)?.re * state.norm_const * state.norm_const)
}

/// `F_cost = 1 − |⟨target|Φ⟩|²`.
pub fn cost_f(
    params: &HybridParams,
    ansatz: &AnsatzCircuit,
    reference: &StateVector,
    target: &StateVector,
) -> Result<f64> {
    let state = build_hybrid_state(params, ansatz, reference)?;
    let o = target.inner(&state.raw)?;
    Ok(1.0 - o.norm_sqr() * state.norm_const * state.norm_const)
}

/// `∂_a F_cost = 2C⁴D_a|o|² − 2C²Re(o*∂_a o)` with `o = ⟨target|φ̃⟩`.
pub fn cost_gradients(
    params: &HybridParams,
    ansatz: &AnsatzCircuit,
    reference: &StateVector,
    target: &StateVector,
) -> Result<Vec<f64>> {
    check_dim(ansatz.n_qubits(), target.n_qubits())?;
    let ex = Expansion::new(params, ansatz, reference)?;
    let norm = ex.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!("hybrid state has squared norm {norm}")));
    }
    let psi = target.amplitudes();
    let dim = psi.len();
    let o: Complex64 = (0..dim).map(|s| psi[s].conj() * ex.f[s] * ex.circuit[s]).sum();
    let d = ex.d().flatten();
    let mut d_o: Vec<Complex64> = ex
        .tangents
        .iter()
        .map(|t| (0..dim).map(|s| psi[s].conj() * ex.f[s] * t[s]).sum())
        .collect();
    d_o.extend((0..ex.n_phi()).map(|k| {
        (0..dim)
            .map(|s| psi[s].conj() * ex.df[s][k] * ex.circuit[s])
            .sum::<Complex64>()
    }));
    let c2 = norm.recip();
    Ok(d_o
        .iter()
        .zip(&d)
        .map(|(dox, dx)| 2.0 * c2 * c2 * dx * o.norm_sqr() - 2.0 * c2 * (o.conj() * dox).re)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitOutcome {
    pub params: HybridParams,
    /// `F_cost` before each step and after the last one.
    pub history: Vec<f64>,
}

/// Plain gradient descent `x ← x − η∇F_cost` for exactly `iters` steps.
pub fn init_optimize(
    start: &HybridParams,
    ansatz: &AnsatzCircuit,
    reference: &StateVector,
    target: &StateVector,
    iters: usize,
    learning_rate: f64,
) -> Result<InitOutcome> {
    let diverged = |iteration: usize, reason: String| Error::Divergence { iteration, reason };
    let mut params = start.clone();
    let mut x = params.flatten();
    let mut history = Vec::with_capacity(iters + 1);
    for it in 0..=iters {
        let cost = cost_f(&params, ansatz, reference, target).map_err(|e| diverged(it, e.to_string()))?;
        if !cost.is_finite() {
            return Err(diverged(it, format!("cost is {cost}")));
        }
        history.push(cost);
        if it == iters {
            break;
        }
        let grad = cost_gradients(&params, ansatz, reference, target).map_err(|e| diverged(it, e.to_string()))?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(diverged(it, "non-finite gradient".into()));
        }
        x.iter_mut().zip(&grad).for_each(|(xi, g)| *xi -= learning_rate * g);
        params.set_flat(&x)?;
    }
    Ok(InitOutcome { params, history })
}

/// Target state of the initialization stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitTarget {
    /// `exp(−Hδβ)|0̄⟩` normalized, from diagonalization.
    #[default]
    Exact,
    /// Second-order Pauli expansion of `exp(−Hδβ)` applied to `|0̄⟩`.
    TaylorTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub evolution: EvolutionConfig,
    pub init_iters: usize,
    pub learning_rate: f64,
    pub init_target: InitTarget,
    /// Network widths; `None` uses the default `[N, N, ⌊N/2⌋, 1]`.
    pub widths: Option<Vec<usize>>,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            evolution: EvolutionConfig::default(),
            init_iters: 50,
            learning_rate: 0.1,
            init_target: InitTarget::Exact,
            widths: None,
        }
    }
}

pub fn init_target_state(target: InitTarget, h: &PauliSum, reference: &StateVector, dbeta: f64) -> Result<StateVector> {
    match target {
        InitTarget::Exact => SpectralDecomposition::of_sum(h)?.evolve(reference, dbeta),
        InitTarget::TaylorTarget => apply_sum_state(&taylor_ite_pauli(h, dbeta, 2)?, reference)?.normalized(),
    }
}

/// Metric and force at `params` in the configured expectation mode.
pub fn hybrid_system(
    params: &HybridParams,
    ansatz: &AnsatzCircuit,
    h: &PauliSum,
    reference: &StateVector,
    mode: ExpectationMode,
    shots: Shots,
) -> Result<LinearSystem> {
    let blocks = match mode {
        ExpectationMode::Exact => HybridBlocks::exact(params, ansatz, Some(h), reference)?,
        ExpectationMode::Hadamard { .. } => HybridBlocks::hadamard(params, ansatz, Some(h), reference, shots)?,
    };
    Ok(LinearSystem {
        m: blocks.metric()?,
        c: blocks.force()?,
    })
}

/// Initialization at `β = δβ` followed by joint Euler steps over `[θ | φ]`.
pub fn vqnhite_evolve(
    config: &HybridConfig,
    ansatz: &AnsatzCircuit,
    h: &PauliSum,
    reference: &StateVector,
    seed: u64,
) -> Result<Trajectory> {
    let ev = &config.evolution;
    ev.validate()?;
    check_dim(ansatz.n_qubits(), h.n_qubits())?;
    let widths = config
        .widths
        .clone()
        .unwrap_or_else(|| default_widths(ansatz.n_qubits()));
    let start = HybridParams::new(vec![0.0; ansatz.n_params()], init_params_with_widths(seed, &widths)?);
    let spectrum = SpectralDecomposition::of_sum(h)?;
    let first = ev.beta_at(1);
    let target = init_target_state(config.init_target, h, reference, ev.dbeta).map_err(|e| e.at_beta(first))?;
    let mut params = init_optimize(
        &start,
        ansatz,
        reference,
        &target,
        config.init_iters,
        config.learning_rate,
    )
    .map_err(|e| e.at_beta(first))?
    .params;

    let mut points = Vec::with_capacity(ev.n_steps());
    let mut snapshots = Vec::new();
    let mut record = |params: &HybridParams, beta: f64| -> Result<()> {
        let state = build_hybrid_state(params, ansatz, reference)?;
        let phi = state.normalized();
        let exact = spectrum.evolve(reference, beta)?;
        let raw_h = apply_sum_state(h, &phi)?;
        points.push(TracePoint {
            beta,
            fidelity: fidelity(&exact, &phi)?,
            energy: phi.inner(&raw_h)?.re,
        });
        if ev.record_params {
            snapshots.push(params.flatten());
        }
        Ok(())
    };
    record(&params, first).map_err(|e| e.at_beta(first))?;
    let mut x = params.flatten();
    for step in 2..=ev.n_steps() {
        let beta = ev.beta_at(step);
        let step_result = (|| {
            let sys = hybrid_system(&params, ansatz, h, reference, ev.mode, ev.shots(step))?;
            let dx = solve_update(&sys, ev.dbeta, ev.ridge)?;
            x.iter_mut().zip(dx.iter()).for_each(|(xi, d)| *xi += d);
            params.set_flat(&x)?;
            record(&params, beta)
        })();
        step_result.map_err(|e| e.at_beta(beta))?;
    }
    Ok(Trajectory {
        method: Method::Vqnhite,
        points,
        snapshots,
    })
}
