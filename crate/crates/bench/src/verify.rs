//! Invariant suites run by `vqnhite verify <suite>`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vqnhite_core::exact::finite_diff;
use vqnhite_core::hadamard::{build_v, AppendixElement, CircuitContext, ElementKind, Shots};
use vqnhite_core::vite::{compute_c, compute_c_hadamard, compute_m, compute_m_from_tangents, compute_m_hadamard};
use vqnhite_core::*;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Gradients,
    Oracles,
    Hadamard,
    Convergence,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Gradients, Suite::Oracles, Suite::Hadamard, Suite::Convergence];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gradients => "gradients",
            Suite::Oracles => "oracles",
            Suite::Hadamard => "hadamard",
            Suite::Convergence => "convergence",
        }
    }
}

impl FromStr for Suite {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            BenchError::Config(format!(
                "unknown suite {s:?}; expected one of gradients, oracles, hadamard, convergence"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Worst observed error (or measured quantity).
    pub value: f64,
    pub tolerance: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.3e} (tolerance {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance
        )
    }
}

fn below(name: impl Into<String>, value: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        value,
        tolerance: format!("≤ {tol:e}"),
        passed: value <= tol,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-3)
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Gradients => gradients(),
        Suite::Oracles => oracles(),
        Suite::Hadamard => hadamard(),
        Suite::Convergence => convergence(),
    }
}

struct Instance {
    ansatz: AnsatzCircuit,
    params: HybridParams,
    h: PauliSum,
    reference: StateVector,
}

fn instance(n: usize, layout: Layout, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Uniform::new_inclusive(-1.0, 1.0);
    let ansatz = AnsatzCircuit::new(layout, n, 2)?;
    let theta = (0..ansatz.n_params()).map(|_| 3.0 * u.sample(&mut rng)).collect();
    let mut phi = init_params(seed, n);
    let flat: Vec<f64> = phi.to_flat().iter().map(|v| v + 0.5 * u.sample(&mut rng)).collect();
    phi.set_flat(&flat)?;
    let fields: Vec<f64> = (0..n).map(|_| u.sample(&mut rng)).collect();
    Ok(Instance {
        ansatz,
        params: HybridParams::new(theta, phi),
        h: build_heisenberg(n, -1.0, &fields)?,
        reference: initial_plus_state(n),
    })
}

fn gradients() -> Result<Vec<Check>> {
    let (mut nn, mut cost, mut d) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let layout = if seed % 2 == 0 {
            Layout::NearestNeighbor
        } else {
            Layout::AllToAll
        };
        let inst = instance(n, layout, seed)?;
        let p = &inst.params;
        let x = p.flatten();

        let s = (seed as usize * 7) % (1 << n);
        let widths = p.phi.widths();
        let flat = p.phi.to_flat();
        let fd: Vec<f64> = finite_diff(|y| Ok(MlpParams::from_flat(&widths, y)?.forward(s)), &flat, 1e-6)?;
        let g = p.phi.gradient(s);
        nn = g.iter().zip(&fd).map(|(a, b)| rel(*a, *b)).fold(nn, f64::max);

        let target = exact_ite(&inst.h, &inst.reference, 0.1)?;
        let fd: Vec<f64> = finite_diff(
            |y| cost_f(&p.with_flat(y)?, &inst.ansatz, &inst.reference, &target),
            &x,
            1e-6,
        )?;
        let g = cost_gradients(p, &inst.ansatz, &inst.reference, &target)?;
        cost = g.iter().zip(&fd).map(|(a, b)| rel(*a, *b)).fold(cost, f64::max);

        let fd: Vec<f64> = finite_diff(
            |y| {
                Ok(build_hybrid_state(&p.with_flat(y)?, &inst.ansatz, &inst.reference)?
                    .raw
                    .norm_sqr())
            },
            &x,
            1e-6,
        )?;
        let dv = compute_d(p, &inst.ansatz, &inst.reference)?.flatten();
        d = dv.iter().zip(&fd).map(|(a, b)| rel(2.0 * a, *b)).fold(d, f64::max);
    }
    Ok(vec![
        below("nn_gradient vs finite differences, 50 instances (relative)", nn, 1e-5),
        below(
            "cost_gradients vs finite differences, 50 instances (relative)",
            cost,
            1e-5,
        ),
        below(
            "2·compute_D vs finite differences of ⟨φ̃|φ̃⟩, 50 instances (relative)",
            d,
            1e-5,
        ),
    ])
}

fn oracles() -> Result<Vec<Check>> {
    let (mut metric, mut force) = (0.0f64, 0.0f64);
    let (mut m_err, mut c_err, mut routes) = (0.0f64, 0.0f64, 0.0f64);
    for (seed, n, layout) in [
        (1, 2, Layout::AllToAll),
        (2, 3, Layout::NearestNeighbor),
        (3, 3, Layout::AllToAll),
    ] {
        let inst = instance(n, layout, seed)?;
        let p = &inst.params;
        let x = p.flatten();
        let tangents: Vec<StateVector> = finite_diff(
            |y| Ok(build_hybrid_state(&p.with_flat(y)?, &inst.ansatz, &inst.reference)?.normalized()),
            &x,
            1e-5,
        )?;
        let m = hybrid_metric(p, &inst.ansatz, &inst.reference)?;
        for a in 0..x.len() {
            for b in 0..x.len() {
                metric = metric.max((m[(a, b)] - tangents[a].inner(&tangents[b])?.re).abs());
            }
        }
        let grad: Vec<f64> = finite_diff(
            |y| expectation_energy(&p.with_flat(y)?, &inst.ansatz, &inst.h, &inst.reference),
            &x,
            1e-5,
        )?;
        let f = hybrid_force(p, &inst.ansatz, &inst.h, &inst.reference)?;
        force = grad
            .iter()
            .zip(f.iter())
            .map(|(g, f)| (f + 0.5 * g).abs())
            .fold(force, f64::max);

        let theta = &p.theta;
        let run = |t: &[f64]| inst.ansatz.run(t, &inst.reference);
        let dstates: Vec<StateVector> = finite_diff(run, theta, 1e-5)?;
        let mm = compute_m(&inst.ansatz, theta, &inst.reference)?;
        for j in 0..theta.len() {
            for k in 0..theta.len() {
                m_err = m_err.max(rel(mm[(j, k)], dstates[j].inner(&dstates[k])?.re));
            }
        }
        let e_grad: Vec<f64> = finite_diff(|t| Ok(expectation(&inst.h, &run(t)?)?.re), theta, 1e-5)?;
        let c = compute_c(&inst.ansatz, theta, &inst.h, &inst.reference)?;
        c_err = c
            .iter()
            .zip(&e_grad)
            .map(|(c, g)| rel(*c, -0.5 * g))
            .fold(c_err, f64::max);
        routes = routes.max((mm - compute_m_from_tangents(&inst.ansatz, theta, &inst.reference)?).amax());
    }
    Ok(vec![
        below(
            "hybrid_metric vs finite-difference Gram matrix (absolute)",
            metric,
            1e-4,
        ),
        below("hybrid_force vs −½∇E by finite differences (absolute)", force, 1e-4),
        below("VITE M vs finite-difference overlaps (relative)", m_err, 1e-6),
        below("VITE C vs −½∇⟨H⟩ by finite differences (relative)", c_err, 1e-6),
        below("VITE M unitary-sandwich route vs tangent inner products", routes, 1e-10),
    ])
}

/// Direct-algebra value of an appendix element.
pub fn element_direct(ctx: &CircuitContext, el: &AppendixElement) -> Result<Complex64> {
    let phi = ctx.ansatz.run(ctx.theta, ctx.reference)?;
    let branch = |j: usize, l: usize| -> Result<(f64, StateVector)> {
        let t = &ctx.ansatz.derivative_terms(j)?[l];
        Ok((
            t.phase,
            ctx.ansatz
                .run_inserted(ctx.theta, ctx.reference, Some((j, &t.generator)))?,
        ))
    };
    let sum = |w: &[f64], bra: &StateVector, ket: &StateVector| -> Complex64 {
        (0..w.len())
            .map(|s| w[s] * bra.amplitudes()[s].conj() * ket.amplitudes()[s])
            .sum()
    };
    let value = match *el {
        AppendixElement::Fig5a1 { j, l, weights } => {
            let (ph, u) = branch(j, l)?;
            Complex64::from((Complex64::from_polar(1.0, ph) * sum(weights, &phi, &u)).re)
        }
        AppendixElement::Fig5a2 { j, l, pauli, weights } => {
            let (ph, u) = branch(j, l)?;
            let v = build_v(pauli)?;
            Complex64::from((Complex64::from_polar(1.0, ph) * sum(weights, &v.apply(&phi)?, &v.apply(&u)?)).re)
        }
        AppendixElement::Fig5b { j, l1, k, l2, weights } => {
            let (p1, u1) = branch(j, l1)?;
            let (p2, u2) = branch(k, l2)?;
            Complex64::from((Complex64::from_polar(1.0, p2 - p1) * sum(weights, &u1, &u2)).re)
        }
        AppendixElement::Fig5c { pauli, weights } => sum(weights, &ctx.reference.apply_pauli(pauli)?, &phi),
        AppendixElement::Fig5d { j, l, pauli, weights } => {
            let (ph, u) = branch(j, l)?;
            Complex64::from_polar(1.0, ph) * sum(weights, &ctx.reference.apply_pauli(pauli)?, &u)
        }
    };
    Ok(value)
}

pub fn sample_element<'w>(kind: ElementKind, pauli: &'w PauliString, weights: &'w [f64]) -> AppendixElement<'w> {
    match kind {
        ElementKind::Fig5a1 => AppendixElement::Fig5a1 { j: 1, l: 0, weights },
        ElementKind::Fig5a2 => AppendixElement::Fig5a2 {
            j: 2,
            l: 0,
            pauli,
            weights,
        },
        ElementKind::Fig5b => AppendixElement::Fig5b {
            j: 0,
            l1: 0,
            k: 3,
            l2: 0,
            weights,
        },
        ElementKind::Fig5c => AppendixElement::Fig5c { pauli, weights },
        ElementKind::Fig5d => AppendixElement::Fig5d {
            j: 4,
            l: 0,
            pauli,
            weights,
        },
    }
}

fn hadamard() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let inst = instance(3, Layout::AllToAll, 5)?;
    let ctx = CircuitContext {
        ansatz: &inst.ansatz,
        theta: &inst.params.theta,
        reference: &inst.reference,
    };
    let weights = inst.params.phi.values();
    let pauli: PauliString = "XYZ".parse()?;
    for kind in ElementKind::ALL {
        let el = sample_element(kind, &pauli, &weights);
        let got = el.evaluate(&ctx, Shots::EXACT)?.value;
        let want = element_direct(&ctx, &el)?;
        checks.push(below(
            format!("{kind} exact mode vs direct algebra"),
            (got - want).norm(),
            1e-10,
        ));
    }

    let m = compute_m(&inst.ansatz, ctx.theta, ctx.reference)?;
    let mh = compute_m_hadamard(&inst.ansatz, ctx.theta, ctx.reference, Shots::EXACT)?;
    let c = compute_c(&inst.ansatz, ctx.theta, &inst.h, ctx.reference)?;
    let ch = compute_c_hadamard(&inst.ansatz, ctx.theta, &inst.h, ctx.reference, Shots::EXACT)?;
    checks.push(below(
        "VITE M and C, circuit route vs algebra",
        (m - mh).amax().max((c - ch).amax()),
        1e-10,
    ));

    let small = instance(2, Layout::AllToAll, 6)?;
    let ctx = CircuitContext {
        ansatz: &small.ansatz,
        theta: &small.params.theta,
        reference: &small.reference,
    };
    let weights = small.params.phi.values();
    let pauli: PauliString = "XY".parse()?;
    let trials = 40;
    let mut inside = 0;
    for t in 0..trials {
        let kind = [ElementKind::Fig5a1, ElementKind::Fig5a2, ElementKind::Fig5b][t % 3];
        let job = sample_element(kind, &pauli, &weights).job(&ctx)?;
        let exact = vqnhite_core::hadamard::hadamard_test(&job)?.value;
        let est = vqnhite_core::hadamard::hadamard_test(&job.shots(Shots::new(10_000, t as u64)))?;
        if (est.value - exact).abs() <= 5.0 * est.std_error {
            inside += 1;
        }
    }
    let frac = inside as f64 / trials as f64;
    checks.push(Check {
        name: format!("10⁴-shot estimates within 5 standard errors ({inside}/{trials})"),
        value: frac,
        tolerance: "≥ 0.99".into(),
        passed: frac >= 0.99,
    });
    Ok(checks)
}

/// Spectral norm of `T(δβ) − exp(−Hδβ)` for the second-order expansion.
pub fn taylor_error(h: &PauliSum, dbeta: f64) -> Result<f64> {
    let dense = h.to_dense()?;
    let eig = nalgebra::SymmetricEigen::new(dense);
    let d = nalgebra::DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from((-e * dbeta).exp())));
    let exact = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
    let t = taylor_ite_pauli(h, dbeta, 2)?.to_dense()?;
    Ok((t - exact).svd(false, false).singular_values.max())
}

/// `1 − F(β_max)` of a VITE run against the exact state.
pub fn vite_deficit(h: &PauliSum, ansatz: &AnsatzCircuit, dbeta: f64, beta_max: f64) -> Result<f64> {
    let config = EvolutionConfig {
        dbeta,
        beta_max,
        ..Default::default()
    };
    let trace = vite_evolve(&config, ansatz, h, &initial_plus_state(ansatz.n_qubits()))?;
    Ok(1.0 - trace.final_point().expect("at least one step").fidelity)
}

fn convergence() -> Result<Vec<Check>> {
    let h = build_heisenberg(2, -1.0, &[0.7, -0.3])?;
    let taylor = (taylor_error(&h, 0.1)? / taylor_error(&h, 0.05)?).log2();

    let ansatz = AnsatzCircuit::new(Layout::AllToAll, 2, 2)?;
    let h = build_heisenberg(2, -1.0, &[0.3, -0.6])?;
    let d1 = vite_deficit(&h, &ansatz, 0.1, 6.0)?;
    let d2 = vite_deficit(&h, &ansatz, 0.05, 6.0)?;
    // √(1 − F) is the distance between pure states; it is what a first-order
    // integrator makes linear in δβ.
    let euler = (d1.sqrt() / d2.sqrt()).log2();
    Ok(vec![
        Check {
            name: "Taylor expansion error order in δβ".into(),
            value: taylor,
            tolerance: "3 ± 20%".into(),
            passed: (taylor - 3.0).abs() <= 0.6,
        },
        Check {
            name: "VITE Euler state-distance order in δβ".into(),
            value: euler,
            tolerance: "1 ± 20%".into(),
            passed: (euler - 1.0).abs() <= 0.2,
        },
    ])
}
