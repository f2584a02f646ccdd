//! Ancilla-assisted estimation of matrix elements, emulated on an explicit
//! `n + 1` qubit register.
//!
//! The ancilla is qubit 0 of the register. It starts in
//! `(|0⟩ + e^{iφ}|1⟩)/√2`, the system in the reference state `|0̄⟩`; gates are
//! applied unconditionally or controlled on the ancilla value, an optional
//! basis change `V` acts on the system, and the ancilla is read out in the X
//! or Y basis together with the system bits. For branch states `|A⟩`
//! (ancilla 0) and `|B⟩` (ancilla 1) the joint statistics give
//! `Σ_t w(t) [P(0,t) - P(1,t)] = Re/Im(e^{iφ} Σ_t w(t) ⟨A|t⟩⟨t|B⟩)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::statevector::{AnsatzCircuit, Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Always,
    /// Applied when the ancilla is `|0⟩`.
    Zero,
    /// Applied when the ancilla is `|1⟩`.
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaBasis {
    /// Hadamard then Z readout: real part.
    X,
    /// `S†`, Hadamard, then Z readout: imaginary part.
    Y,
}

/// Sampling budget for an estimate; zero shots means the exact expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shots {
    pub count: u64,
    pub seed: u64,
}

impl Shots {
    pub const EXACT: Shots = Shots { count: 0, seed: 0 };

    pub fn new(count: u64, seed: u64) -> Self {
        Self { count, seed }
    }

    pub fn is_exact(&self) -> bool {
        self.count == 0
    }

    /// Independent stream for sub-job `id`.
    pub fn fork(&self, id: u64) -> Shots {
        Shots {
            count: self.count,
            seed: splitmix(self.seed ^ splitmix(id.wrapping_add(0x9e37_79b9_7f4a_7c15))),
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct AncillaJob {
    pub reference: StateVector,
    pub phase: f64,
    pub ops: Vec<(Control, Gate)>,
    pub basis: AncillaBasis,
    pub measurement: Option<MeasurementBasisV>,
    /// Post-processing weight per system outcome; `None` reads only the ancilla.
    pub weights: Option<Vec<f64>>,
    pub shots: Shots,
}

impl AncillaJob {
    pub fn new(reference: StateVector, phase: f64) -> Self {
        Self {
            reference,
            phase,
            ops: Vec::new(),
            basis: AncillaBasis::X,
            measurement: None,
            weights: None,
            shots: Shots::EXACT,
        }
    }

    pub fn push(mut self, control: Control, gate: Gate) -> Self {
        self.ops.push((control, gate));
        self
    }

    pub fn extend(mut self, control: Control, gates: impl IntoIterator<Item = Gate>) -> Self {
        self.ops.extend(gates.into_iter().map(|g| (control, g)));
        self
    }

    pub fn basis(mut self, basis: AncillaBasis) -> Self {
        self.basis = basis;
        self
    }

    pub fn measure_with(mut self, v: MeasurementBasisV) -> Self {
        self.measurement = Some(v);
        self
    }

    pub fn weights(mut self, w: Vec<f64>) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn shots(mut self, shots: Shots) -> Self {
        self.shots = shots;
        self
    }

    pub fn n_system(&self) -> usize {
        self.reference.n_qubits()
    }

    /// Runs the circuit and returns the joint readout statistics.
    pub fn run(&self) -> Result<AncillaRecord> {
        let n = self.n_system();
        let dim = 1usize << n;
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        let mut reg = StateVector::zeros(n + 1);
        {
            let amps = reg.amplitudes_mut();
            let e = Complex64::from_polar(amp, self.phase);
            for (s, a) in self.reference.amplitudes().iter().enumerate() {
                amps[s] = a * amp;
                amps[dim + s] = a * e;
            }
        }
        for (control, gate) in &self.ops {
            for &half in halves(*control) {
                apply_to_half(&mut reg, half, dim, |sv| sv.apply_gate(gate))?;
            }
        }
        if let Some(v) = &self.measurement {
            check_dim(n, v.n_qubits())?;
            for half in [0, 1] {
                apply_to_half(&mut reg, half, dim, |sv| {
                    *sv = v.apply(sv)?;
                    Ok(())
                })?;
            }
        }
        let amps = reg.amplitudes_mut();
        if self.basis == AncillaBasis::Y {
            amps[dim..].iter_mut().for_each(|a| *a *= Complex64::new(0.0, -1.0));
        }
        for s in 0..dim {
            let (a0, a1) = (amps[s], amps[dim + s]);
            amps[s] = (a0 + a1) * amp;
            amps[dim + s] = (a0 - a1) * amp;
        }
        let probs: Vec<f64> = reg.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        AncillaRecord::from_probabilities(n, probs, self.shots)
    }
}

fn halves(control: Control) -> &'static [usize] {
    match control {
        Control::Always => &[0, 1],
        Control::Zero => &[0],
        Control::One => &[1],
    }
}

fn apply_to_half(
    reg: &mut StateVector,
    half: usize,
    dim: usize,
    f: impl FnOnce(&mut StateVector) -> Result<()>,
) -> Result<()> {
    let n = reg.n_qubits() - 1;
    let slice = &mut reg.amplitudes_mut()[half * dim..(half + 1) * dim];
    let mut sv = StateVector::new(n, slice.to_vec())?;
    f(&mut sv)?;
    slice.copy_from_slice(sv.amplitudes());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Joint ancilla/system outcome statistics: exact probabilities, or empirical
/// frequencies when sampled.
#[derive(Debug, Clone)]
pub struct AncillaRecord {
    n_system: usize,
    /// Index `a·2^n + t`.
    frequencies: Vec<f64>,
    shots: u64,
}

impl AncillaRecord {
    fn from_probabilities(n_system: usize, probs: Vec<f64>, shots: Shots) -> Result<Self> {
        let frequencies = if shots.is_exact() {
            probs
        } else {
            sample_frequencies(&probs, shots)
        };
        Ok(Self {
            n_system,
            frequencies,
            shots: shots.count,
        })
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    /// `Σ_t w(t)·(±1)` averaged over the outcome statistics.
    pub fn estimate(&self, weights: Option<&[f64]>) -> Result<Estimate> {
        let dim = 1usize << self.n_system;
        if let Some(w) = weights {
            check_dim(dim, w.len())?;
        }
        let w = |t: usize| weights.map_or(1.0, |w| w[t]);
        let (mut mean, mut second) = (0.0, 0.0);
        for t in 0..dim {
            let (p0, p1) = (self.frequencies[t], self.frequencies[dim + t]);
            let wt = w(t);
            mean += wt * (p0 - p1);
            second += wt * wt * (p0 + p1);
        }
        let std_error = if self.shots == 0 {
            0.0
        } else {
            let var = (second - mean * mean).max(0.0);
            // unbiased sample variance
            let n = self.shots as f64;
            (var * n / (n - 1.0).max(1.0) / n).sqrt()
        };
        Ok(Estimate { value: mean, std_error })
    }
}

fn sample_frequencies(probs: &[f64], shots: Shots) -> Vec<f64> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(shots.seed);
    let uniform = Uniform::new(0.0, total);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots.count {
        let u = uniform.sample(&mut rng);
        let k = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        counts[k] += 1;
    }
    counts.into_iter().map(|c| c as f64 / shots.count as f64).collect()
}

/// Runs the job and post-processes with its own weights.
pub fn hadamard_test(job: &AncillaJob) -> Result<Estimate> {
    job.run()?.estimate(job.weights.as_deref())
}

/// Basis change mapping the `±1` eigenvectors of a non-diagonal Pauli string
/// onto computational states: `V†|s⟩ = |+,s⟩` and `V†|s̃⟩ = |−,s⟩` for every
/// `s` whose pivot bit is 0, where `s̃` is the partner `P` maps `s` to and
/// the pivot is the first qubit carrying `X` or `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasisV {
    pauli: PauliString,
    pivot: usize,
    /// `P|s⟩ = phase[s]·|s̃⟩`.
    phases: Vec<Complex64>,
    dense: DMatrix<Complex64>,
}

impl MeasurementBasisV {
    pub fn build(p: &PauliString) -> Result<Self> {
        let pivot = p
            .first_offdiagonal_qubit()
            .ok_or_else(|| Error::Argument(format!("{p} is diagonal; use computational-basis readout")))?;
        let n = p.n_qubits();
        let dim = 1usize << n;
        let pivot_bit = 1usize << (n - 1 - pivot);
        let phases: Vec<Complex64> = (0..dim).map(|s| p.apply_unchecked(s).0).collect();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut v_dag = DMatrix::zeros(dim, dim);
        for s in (0..dim).filter(|s| s & pivot_bit == 0) {
            let partner = s ^ p.flip_mask();
            let alpha = phases[s];
            // |±,s⟩ = (|s⟩ ± α|s̃⟩)/√2 with P|s⟩ = α|s̃⟩
            v_dag[(s, s)] = Complex64::from(r);
            v_dag[(partner, s)] = alpha * r;
            v_dag[(s, partner)] = Complex64::from(r);
            v_dag[(partner, partner)] = -alpha * r;
        }
        Ok(Self {
            pauli: p.clone(),
            pivot,
            phases,
            dense: v_dag.adjoint(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.pauli.n_qubits()
    }

    pub fn pauli(&self) -> &PauliString {
        &self.pauli
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn phase_table(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn pivot_bit(&self) -> usize {
        1 << (self.n_qubits() - 1 - self.pivot)
    }

    /// Partner bitstring `s̃`.
    pub fn partner(&self, s: usize) -> usize {
        s ^ self.pauli.flip_mask()
    }

    /// `+1` for outcomes labelling `|+,s⟩`, `-1` for `|−,s⟩`.
    pub fn outcome_sign(&self, t: usize) -> f64 {
        if t & self.pivot_bit() == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.dense
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.dense.ncols(), psi.dim())?;
        let v = &self.dense * nalgebra::DVector::from_column_slice(psi.amplitudes());
        StateVector::new(psi.n_qubits(), v.iter().copied().collect())
    }

    /// `|+,s⟩` or `|−,s⟩` for a pivot-zero `s`.
    pub fn eigenstate(&self, s: usize, plus: bool) -> StateVector {
        let col = if plus { s } else { self.partner(s) };
        let dag = self.dense.adjoint();
        StateVector::new(self.n_qubits(), dag.column(col).iter().copied().collect()).expect("square basis change")
    }
}

pub fn build_v(p: &PauliString) -> Result<MeasurementBasisV> {
    MeasurementBasisV::build(p)
}

/// One row of the `|φ±,s|²` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmRow {
    pub s: usize,
    pub partner: usize,
    pub plus: f64,
    pub minus: f64,
}

/// Probabilities `|⟨±,s|ψ⟩|²` read off after applying `V`, for every
/// pivot-zero `s`.
pub fn estimate_pm_probs(psi: &StateVector, p: &PauliString, shots: Shots) -> Result<Vec<PmRow>> {
    let v = MeasurementBasisV::build(p)?;
    pm_table(&v, psi, shots)
}

pub fn pm_table(v: &MeasurementBasisV, psi: &StateVector, shots: Shots) -> Result<Vec<PmRow>> {
    let rotated = v.apply(psi)?;
    let probs: Vec<f64> = rotated.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let freq = if shots.is_exact() {
        probs
    } else {
        sample_frequencies(&probs, shots)
    };
    Ok((0..psi.dim())
        .filter(|s| s & v.pivot_bit() == 0)
        .map(|s| {
            let partner = v.partner(s);
            PmRow {
                s,
                partner,
                plus: freq[s],
                minus: freq[partner],
            }
        })
        .collect())
}

/// Computational-basis outcome frequencies of `ψ`.
pub fn basis_probs(psi: &StateVector, shots: Shots) -> Vec<f64> {
    let probs: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    if shots.is_exact() {
        probs
    } else {
        sample_frequencies(&probs, shots)
    }
}

/// `⟨φ̃|P|φ̃⟩` for non-diagonal `P` from the `V`-basis table and the network
/// values: `Σ_s (|φ+,s|² − |φ−,s|²) f(s) f(s̃)`.
pub fn nondiagonal_expectation(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    f_values: &[f64],
    reference: &StateVector,
    p: &PauliString,
    shots: Shots,
) -> Result<f64> {
    let psi = ansatz.run(theta, reference)?;
    check_dim(psi.dim(), f_values.len())?;
    let table = estimate_pm_probs(&psi, p, shots)?;
    Ok(table
        .iter()
        .map(|r| (r.plus - r.minus) * f_values[r.s] * f_values[r.partner])
        .sum())
}

/// Circuit state shared by the appendix matrix elements.
#[derive(Debug, Clone, Copy)]
pub struct CircuitContext<'a> {
    pub ansatz: &'a AnsatzCircuit,
    pub theta: &'a [f64],
    pub reference: &'a StateVector,
}

impl CircuitContext<'_> {
    fn gates(&self, insert: Option<(usize, &PauliString)>) -> Result<Vec<Gate>> {
        self.ansatz.gates(self.theta, insert)
    }

    fn generator(&self, j: usize, l: usize) -> Result<(f64, &PauliString)> {
        let term = self
            .ansatz
            .derivative_terms(j)?
            .get(l)
            .ok_or_else(|| Error::Argument(format!("no derivative term {l} for parameter {j}")))?;
        Ok((term.phase, &term.generator))
    }

    /// Gates of `U(θ)` shared by both branches, with the generator of each
    /// branch (if any) inserted under ancilla control at its gate position.
    fn interleaved(
        &self,
        phase: f64,
        zero: Option<(usize, &PauliString)>,
        one: Option<(usize, &PauliString)>,
    ) -> Result<AncillaJob> {
        let mut job = AncillaJob::new(self.reference.clone(), phase);
        let plain = self.gates(None)?;
        let with0 = self.gates(zero)?;
        let with1 = self.gates(one)?;
        // Each list is `plain` plus at most one Pauli; walk them together.
        let (mut i0, mut i1) = (0, 0);
        for g in &plain {
            if with0[i0] != *g {
                job = job.push(Control::Zero, with0[i0].clone());
                i0 += 1;
            }
            if with1[i1] != *g {
                job = job.push(Control::One, with1[i1].clone());
                i1 += 1;
            }
            job = job.push(Control::Always, g.clone());
            i0 += 1;
            i1 += 1;
        }
        Ok(job)
    }
}

/// `Re(e^{iφ}⟨0̄|𝒰†_{j,p}𝒰_{k,q}|0̄⟩)`, the overlap circuit behind `M_{jk}`.
pub fn overlap_job(ctx: &CircuitContext, phase: f64, jp: (usize, usize), kq: (usize, usize)) -> Result<AncillaJob> {
    let (_, u_jp) = ctx.generator(jp.0, jp.1)?;
    let (_, u_kq) = ctx.generator(kq.0, kq.1)?;
    ctx.interleaved(phase, Some((jp.0, u_jp)), Some((kq.0, u_kq)))
}

/// `Re(e^{iφ}⟨0̄|U†P𝒰_{j,k}|0̄⟩)`, the force circuit behind `C_j`.
pub fn force_job(ctx: &CircuitContext, phase: f64, p: &PauliString, jk: (usize, usize)) -> Result<AncillaJob> {
    let (_, u) = ctx.generator(jk.0, jk.1)?;
    Ok(ctx
        .interleaved(phase, None, Some((jk.0, u)))?
        .push(Control::Zero, Gate::Pauli(p.clone())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Fig5a1,
    Fig5a2,
    Fig5b,
    Fig5c,
    Fig5d,
}

impl ElementKind {
    pub const ALL: [ElementKind; 5] = [
        ElementKind::Fig5a1,
        ElementKind::Fig5a2,
        ElementKind::Fig5b,
        ElementKind::Fig5c,
        ElementKind::Fig5d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Fig5a1 => "fig5a1",
            ElementKind::Fig5a2 => "fig5a2",
            ElementKind::Fig5b => "fig5b",
            ElementKind::Fig5c => "fig5c",
            ElementKind::Fig5d => "fig5d",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ElementKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown appendix element kind {s:?}")))
    }
}

/// Matrix elements of the derivative circuits, each a weighted sum over
/// system outcomes `s`. Amplitudes `r` of derivative coefficients are left to
/// the caller; their phases enter the ancilla preparation.
#[derive(Debug, Clone)]
pub enum AppendixElement<'w> {
    /// `Re Σ_s w(s) e^{iφ_{j,l}} ⟨φ|s⟩⟨s|𝒰_{j,l}|0̄⟩`
    Fig5a1 { j: usize, l: usize, weights: &'w [f64] },
    /// `Re Σ_t w(t) e^{iφ_{j,l}} ⟨φ|t_V⟩⟨t_V|𝒰_{j,l}|0̄⟩` with `⟨t_V| = ⟨t|V`
    Fig5a2 {
        j: usize,
        l: usize,
        pauli: &'w PauliString,
        weights: &'w [f64],
    },
    /// `Re Σ_s w(s) e^{i(φ_{k,l2} − φ_{j,l1})} ⟨0̄|𝒰†_{j,l1}|s⟩⟨s|𝒰_{k,l2}|0̄⟩`
    Fig5b {
        j: usize,
        l1: usize,
        k: usize,
        l2: usize,
        weights: &'w [f64],
    },
    /// `Σ_s w(s) ⟨0̄|P|s⟩⟨s|φ⟩`, real and imaginary parts
    Fig5c { pauli: &'w PauliString, weights: &'w [f64] },
    /// `Σ_s w(s) e^{iφ_{j,l}} ⟨0̄|P|s⟩⟨s|𝒰_{j,l}|0̄⟩`, real and imaginary parts
    Fig5d {
        j: usize,
        l: usize,
        pauli: &'w PauliString,
        weights: &'w [f64],
    },
}

impl AppendixElement<'_> {
    pub fn kind(&self) -> ElementKind {
        match self {
            AppendixElement::Fig5a1 { .. } => ElementKind::Fig5a1,
            AppendixElement::Fig5a2 { .. } => ElementKind::Fig5a2,
            AppendixElement::Fig5b { .. } => ElementKind::Fig5b,
            AppendixElement::Fig5c { .. } => ElementKind::Fig5c,
            AppendixElement::Fig5d { .. } => ElementKind::Fig5d,
        }
    }

    /// Circuit realising the element (X-basis readout).
    pub fn job(&self, ctx: &CircuitContext) -> Result<AncillaJob> {
        let job = match *self {
            AppendixElement::Fig5a1 { j, l, weights } => {
                let (phase, u) = ctx.generator(j, l)?;
                ctx.interleaved(phase, None, Some((j, u)))?.weights(weights.to_vec())
            }
            AppendixElement::Fig5a2 { j, l, pauli, weights } => {
                let (phase, u) = ctx.generator(j, l)?;
                ctx.interleaved(phase, None, Some((j, u)))?
                    .measure_with(MeasurementBasisV::build(pauli)?)
                    .weights(weights.to_vec())
            }
            AppendixElement::Fig5b { j, l1, k, l2, weights } => {
                let (p1, _) = ctx.generator(j, l1)?;
                let (p2, _) = ctx.generator(k, l2)?;
                overlap_job(ctx, p2 - p1, (j, l1), (k, l2))?.weights(weights.to_vec())
            }
            AppendixElement::Fig5c { pauli, weights } => AncillaJob::new(ctx.reference.clone(), 0.0)
                .push(Control::Zero, Gate::Pauli(pauli.clone()))
                .extend(Control::One, ctx.gates(None)?)
                .weights(weights.to_vec()),
            AppendixElement::Fig5d { j, l, pauli, weights } => {
                let (phase, u) = ctx.generator(j, l)?;
                AncillaJob::new(ctx.reference.clone(), phase)
                    .push(Control::Zero, Gate::Pauli(pauli.clone()))
                    .extend(Control::One, ctx.gates(Some((j, u)))?)
                    .weights(weights.to_vec())
            }
        };
        Ok(job)
    }

    fn has_imaginary_part(&self) -> bool {
        matches!(self, AppendixElement::Fig5c { .. } | AppendixElement::Fig5d { .. })
    }

    /// Evaluates the element. Real-only kinds return a zero imaginary part.
    pub fn evaluate(&self, ctx: &CircuitContext, shots: Shots) -> Result<ComplexEstimate> {
        let job = self.job(ctx)?.shots(shots.fork(0));
        let re = hadamard_test(&job)?;
        let im = if self.has_imaginary_part() {
            hadamard_test(&job.basis(AncillaBasis::Y).shots(shots.fork(1)))?
        } else {
            Estimate {
                value: 0.0,
                std_error: 0.0,
            }
        };
        Ok(ComplexEstimate {
            value: Complex64::new(re.value, im.value),
            std_error: Complex64::new(re.std_error, im.std_error),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub value: Complex64,
    pub std_error: Complex64,
}

pub fn appendix_element(element: &AppendixElement, ctx: &CircuitContext, shots: Shots) -> Result<ComplexEstimate> {
    element.evaluate(ctx, shots)
}

/// Eigenvalue `±1` of a diagonal string on basis state `s`.
pub fn diagonal_sign(p: &PauliString, s: usize) -> f64 {
    if (s & p.sign_mask()).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `Σ_j e_j ⟨0̄|P_j …` helper: the Taylor-surrogate overlap
/// `⟨ψ(δβ)|φ̃⟩ = Σ_j e_j Σ_s f(s) ⟨0̄|P_j|s⟩⟨s|φ⟩` through fig5c circuits.
pub fn taylor_overlap(
    ctx: &CircuitContext,
    propagator: &PauliSum,
    f_values: &[f64],
    shots: Shots,
) -> Result<Complex64> {
    let mut total = Complex64::default();
    for (k, (e, p)) in propagator.terms().iter().enumerate() {
        let el = AppendixElement::Fig5c {
            pauli: p,
            weights: f_values,
        };
        total += e * el.evaluate(ctx, shots.fork(k as u64))?.value;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{initial_plus_state, Layout};
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_job_reads_one() {
        let job = AncillaJob::new(initial_plus_state(2), 0.0);
        let e = hadamard_test(&job).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-15);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn phase_shift_by_pi_flips_sign() {
        let job = AncillaJob::new(initial_plus_state(1), 0.3).push(Control::One, Gate::Ry { qubit: 0, angle: 0.7 });
        let a = hadamard_test(&job).unwrap().value;
        let b = hadamard_test(&AncillaJob {
            phase: 0.3 + std::f64::consts::PI,
            ..job
        })
        .unwrap()
        .value;
        assert_abs_diff_eq!(a, -b, epsilon = 1e-14);
    }

    #[test]
    fn v_for_single_x_is_hadamard() {
        let v = build_v(&"X".parse().unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let m = v.matrix();
        assert_abs_diff_eq!((m[(0, 0)] - r).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m[(0, 1)] - r).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m[(1, 0)] - r).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m[(1, 1)] + r).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn v_conjugates_z_pivot_into_pauli() {
        let p: PauliString = "XYZ".parse().unwrap();
        let v = build_v(&p).unwrap();
        let z0 = "ZII".parse::<PauliString>().unwrap().to_dense().unwrap();
        let lhs = v.matrix().adjoint() * z0 * v.matrix();
        assert!((lhs - p.to_dense().unwrap()).norm() < 1e-12);
    }

    #[test]
    fn diagonal_string_has_no_v() {
        assert!(matches!(build_v(&"ZIZ".parse().unwrap()), Err(Error::Argument(_))));
    }

    #[test]
    fn plus_eigenstate_puts_all_weight_on_plus_rows() {
        let p: PauliString = "ZX".parse().unwrap();
        let v = build_v(&p).unwrap();
        let psi = v.eigenstate(0b00, true);
        let table = pm_table(&v, &psi, Shots::EXACT).unwrap();
        let plus: f64 = table.iter().map(|r| r.plus).sum();
        assert_abs_diff_eq!(plus, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn element_kind_parsing() {
        assert_eq!("fig5b".parse::<ElementKind>().unwrap(), ElementKind::Fig5b);
        assert!(matches!("fig6".parse::<ElementKind>(), Err(Error::Argument(_))));
    }

    #[test]
    fn overlap_job_matches_direct_algebra() {
        let ansatz = AnsatzCircuit::new(Layout::NearestNeighbor, 1, 1).unwrap();
        let theta = [0.4, -1.1];
        let reference = initial_plus_state(1);
        let ctx = CircuitContext {
            ansatz: &ansatz,
            theta: &theta,
            reference: &reference,
        };
        let phase = 0.9;
        let got = hadamard_test(&overlap_job(&ctx, phase, (0, 0), (1, 0)).unwrap())
            .unwrap()
            .value;
        let a = ansatz.derivative_states(&theta, 0, &reference).unwrap();
        let b = ansatz.derivative_states(&theta, 1, &reference).unwrap();
        let direct = (Complex64::from_polar(1.0, phase) * a[0].1.inner(&b[0].1).unwrap()).re;
        assert_abs_diff_eq!(got, direct, epsilon = 1e-12);
    }
}
