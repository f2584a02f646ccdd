use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vqnhite_core::exact::{apply_sum_state, finite_diff};
use vqnhite_core::hadamard::Shots;
use vqnhite_core::hybrid::HybridBlocks;
use vqnhite_core::neural::init_params;
use vqnhite_core::*;

fn random_instance(n: usize, layout: Layout, seed: u64) -> (AnsatzCircuit, HybridParams, PauliSum) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Uniform::new_inclusive(-1.0, 1.0);
    let ansatz = AnsatzCircuit::new(layout, n, 2).unwrap();
    let theta = (0..ansatz.n_params()).map(|_| 3.0 * u.sample(&mut rng)).collect();
    let mut phi = init_params(seed, n);
    let flat: Vec<f64> = phi.to_flat().iter().map(|v| v + 0.5 * u.sample(&mut rng)).collect();
    phi.set_flat(&flat).unwrap();
    let fields: Vec<f64> = (0..n).map(|_| u.sample(&mut rng)).collect();
    let h = build_heisenberg(n, -1.0, &fields).unwrap();
    (ansatz, HybridParams::new(theta, phi), h)
}

fn normalized_state(p: &HybridParams, ansatz: &AnsatzCircuit, x: &[f64]) -> Result<StateVector> {
    Ok(build_hybrid_state(&p.with_flat(x)?, ansatz, &initial_plus_state(ansatz.n_qubits()))?.normalized())
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-3)
}

#[test]
fn metric_matches_finite_difference_gram() {
    for (seed, layout) in [
        (1, Layout::NearestNeighbor),
        (2, Layout::AllToAll),
        (3, Layout::NearestNeighbor),
    ] {
        let n = if seed == 3 { 2 } else { 3 };
        let (ansatz, p, _) = random_instance(n, layout, seed);
        let x = p.flatten();
        let tangents: Vec<StateVector> = finite_diff(|y| normalized_state(&p, &ansatz, y), &x, 1e-5).unwrap();
        let m = hybrid_metric(&p, &ansatz, &initial_plus_state(n)).unwrap();
        for a in 0..x.len() {
            for b in 0..x.len() {
                let oracle = tangents[a].inner(&tangents[b]).unwrap().re;
                assert!(
                    (m[(a, b)] - oracle).abs() < 1e-4,
                    "seed {seed} ({a},{b}): {} vs {oracle}",
                    m[(a, b)]
                );
            }
        }
        assert!((&m - m.transpose()).amax() < 1e-10);
    }
}

#[test]
fn force_is_minus_half_energy_gradient() {
    for seed in 10..13 {
        let (ansatz, p, h) = random_instance(3, Layout::AllToAll, seed);
        let reference = initial_plus_state(3);
        let x = p.flatten();
        let grad: Vec<f64> = finite_diff(
            |y| expectation_energy(&p.with_flat(y)?, &ansatz, &h, &reference),
            &x,
            1e-5,
        )
        .unwrap();
        let force = hybrid_force(&p, &ansatz, &h, &reference).unwrap();
        for a in 0..x.len() {
            assert!((force[a] + 0.5 * grad[a]).abs() < 1e-4, "seed {seed} param {a}");
        }
    }
}

#[test]
fn d_is_half_norm_gradient() {
    for seed in 20..25 {
        let (ansatz, p, _) = random_instance(3, Layout::NearestNeighbor, seed);
        let reference = initial_plus_state(3);
        let x = p.flatten();
        let norm_sq = |y: &[f64]| -> Result<f64> {
            Ok(build_hybrid_state(&p.with_flat(y)?, &ansatz, &reference)?
                .raw
                .norm_sqr())
        };
        let fd: Vec<f64> = finite_diff(norm_sq, &x, 1e-6).unwrap();
        let d = compute_d(&p, &ansatz, &reference).unwrap().flatten();
        for a in 0..x.len() {
            assert!(
                rel_err(2.0 * d[a], fd[a]) < 1e-5,
                "seed {seed} param {a}: {} vs {}",
                2.0 * d[a],
                fd[a]
            );
        }
        // ∂C = −C³D
        let c_of =
            |y: &[f64]| -> Result<f64> { Ok(build_hybrid_state(&p.with_flat(y)?, &ansatz, &reference)?.norm_const) };
        let dc: Vec<f64> = finite_diff(c_of, &x, 1e-6).unwrap();
        let c = build_hybrid_state(&p, &ansatz, &reference).unwrap().norm_const;
        for a in 0..x.len() {
            assert!((dc[a] + c.powi(3) * d[a]).abs() < 1e-5);
        }
    }
}

#[test]
fn cost_gradient_matches_finite_difference() {
    for seed in 30..35 {
        let (ansatz, p, h) = random_instance(3, Layout::NearestNeighbor, seed);
        let reference = initial_plus_state(3);
        let target = exact_ite(&h, &reference, 0.1).unwrap();
        let x = p.flatten();
        let fd: Vec<f64> = finite_diff(|y| cost_f(&p.with_flat(y)?, &ansatz, &reference, &target), &x, 1e-6).unwrap();
        let g = cost_gradients(&p, &ansatz, &reference, &target).unwrap();
        for a in 0..x.len() {
            assert!(
                rel_err(g[a], fd[a]) < 1e-5,
                "seed {seed} param {a}: {} vs {}",
                g[a],
                fd[a]
            );
        }
    }
}

#[test]
fn cost_matches_direct_overlap() {
    let (ansatz, p, h) = random_instance(3, Layout::AllToAll, 40);
    let reference = initial_plus_state(3);
    let target = exact_ite(&h, &reference, 0.7).unwrap();
    let phi = build_hybrid_state(&p, &ansatz, &reference).unwrap().normalized();
    let direct: Complex64 = target
        .amplitudes()
        .iter()
        .zip(phi.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .sum();
    let cost = cost_f(&p, &ansatz, &reference, &target).unwrap();
    assert!((cost - (1.0 - direct.norm_sqr())).abs() < 1e-12);
    let orth = {
        let mut amps = phi.amplitudes().to_vec();
        amps.swap(0, 1);
        amps[0] = -amps[0];
        let s = StateVector::new(3, amps).unwrap();
        // remove the component along phi
        let overlap = phi.inner(&s).unwrap();
        let mut s = s;
        s.axpy(-overlap, &phi).unwrap();
        s.normalized().unwrap()
    };
    assert!((cost_f(&p, &ansatz, &reference, &orth).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn energy_respects_variational_bound_and_gauge() {
    for seed in 50..55 {
        let (ansatz, p, h) = random_instance(3, Layout::NearestNeighbor, seed);
        let reference = initial_plus_state(3);
        let e = expectation_energy(&p, &ansatz, &h, &reference).unwrap();
        let e0 = SpectralDecomposition::of_sum(&h).unwrap().ground_energy();
        assert!(e >= e0 - 1e-12);

        let mut shifted = p.clone();
        let mut flat = shifted.phi.to_flat();
        let last = shifted.phi.last_bias_index();
        flat[last] += 1.7;
        shifted.phi.set_flat(&flat).unwrap();
        let e_shift = expectation_energy(&shifted, &ansatz, &h, &reference).unwrap();
        assert!((e - e_shift).abs() < 1e-10);
        let m = hybrid_metric(&p, &ansatz, &reference).unwrap();
        let m_shift = hybrid_metric(&shifted, &ansatz, &reference).unwrap();
        assert!((m - m_shift).amax() < 1e-10);
    }
}

#[test]
fn identity_network_energy_is_circuit_energy() {
    let (ansatz, mut p, h) = random_instance(3, Layout::AllToAll, 60);
    p.phi = init_params(60, 3);
    let reference = initial_plus_state(3);
    let circuit = ansatz.run(&p.theta, &reference).unwrap();
    let e = expectation(&h, &circuit).unwrap().re;
    assert!((expectation_energy(&p, &ansatz, &h, &reference).unwrap() - e).abs() < 1e-12);
}

#[test]
fn diagonal_energy_by_enumeration() {
    let (ansatz, p, _) = random_instance(3, Layout::NearestNeighbor, 61);
    let h = PauliSum::from_terms(
        3,
        vec![
            (Complex64::from(0.4), "ZIZ".parse().unwrap()),
            (Complex64::from(-1.3), "IZI".parse().unwrap()),
        ],
    )
    .unwrap();
    let reference = initial_plus_state(3);
    let raw = build_hybrid_state(&p, &ansatz, &reference).unwrap().raw;
    let (mut num, mut den) = (0.0, 0.0);
    for (s, a) in raw.amplitudes().iter().enumerate() {
        let bit = |q: usize| if (s >> (2 - q)) & 1 == 1 { -1.0 } else { 1.0 };
        num += a.norm_sqr() * (0.4 * bit(0) * bit(2) - 1.3 * bit(1));
        den += a.norm_sqr();
    }
    assert!((expectation_energy(&p, &ansatz, &h, &reference).unwrap() - num / den).abs() < 1e-12);
}

#[test]
fn force_vanishes_at_embedded_ground_state() {
    // A single-qubit field has ground state |1⟩, reached by RY(π) from |0⟩.
    let ansatz = AnsatzCircuit::new(Layout::NearestNeighbor, 1, 0).unwrap();
    let h = PauliSum::from_terms(1, vec![(Complex64::from(1.0), "Z".parse().unwrap())]).unwrap();
    let p = HybridParams::new(vec![std::f64::consts::PI], init_params(0, 1));
    let f = hybrid_force(&p, &ansatz, &h, &StateVector::basis(1, 0)).unwrap();
    assert!(f.iter().all(|v| v.abs() < 1e-8));
}

#[test]
fn hadamard_blocks_match_algebra_in_exact_mode() {
    for (seed, layout) in [(70, Layout::NearestNeighbor), (71, Layout::AllToAll)] {
        let (ansatz, p, h) = random_instance(3, layout, seed);
        let reference = initial_plus_state(3);
        let a = HybridBlocks::exact(&p, &ansatz, Some(&h), &reference).unwrap();
        let b = HybridBlocks::hadamard(&p, &ansatz, Some(&h), &reference, Shots::EXACT).unwrap();
        assert!((a.norm - b.norm).abs() < 1e-10);
        assert!((a.metric().unwrap() - b.metric().unwrap()).amax() < 1e-10);
        assert!((a.force().unwrap() - b.force().unwrap()).amax() < 1e-10);
        assert!((a.energy().unwrap() - b.energy().unwrap()).abs() < 1e-10);
    }
}

#[test]
fn init_stage_keeps_reachable_target() {
    let (ansatz, p, _) = random_instance(2, Layout::AllToAll, 80);
    let reference = initial_plus_state(2);
    let target = build_hybrid_state(&p, &ansatz, &reference).unwrap().normalized();
    let out = init_optimize(&p, &ansatz, &reference, &target, 20, 0.1).unwrap();
    assert_eq!(out.history.len(), 21);
    assert!(out.history.iter().all(|&c| c.abs() < 1e-12));
}

#[test]
fn init_stage_mostly_reduces_cost() {
    let n = 4;
    let ansatz = AnsatzCircuit::new(Layout::NearestNeighbor, n, 2).unwrap();
    let h = build_heisenberg(n, -1.0, &[0.3, -0.8, 0.5, 0.1]).unwrap();
    let reference = initial_plus_state(n);
    let target = exact_ite(&h, &reference, 0.1).unwrap();
    let improved = (0..100)
        .filter(|&seed| {
            let p = HybridParams::new(vec![0.0; ansatz.n_params()], init_params(seed, n));
            let out = init_optimize(&p, &ansatz, &reference, &target, 50, 0.1).unwrap();
            out.history.last().unwrap() <= &out.history[0]
        })
        .count();
    assert!(improved >= 95, "{improved}/100");
}

#[test]
fn zero_hamiltonian_run_stays_on_target() {
    let ansatz = AnsatzCircuit::new(Layout::NearestNeighbor, 2, 2).unwrap();
    let config = HybridConfig {
        evolution: EvolutionConfig {
            beta_max: 1.0,
            ..Default::default()
        },
        ..Default::default()
    };
    let trace = vqnhite_evolve(&config, &ansatz, &PauliSum::zero(2), &initial_plus_state(2), 4).unwrap();
    assert_eq!(trace.points.len(), 10);
    assert!(trace.points.iter().all(|p| (p.fidelity - 1.0).abs() < 1e-9));
}

#[test]
fn hybrid_run_is_reproducible() {
    let ansatz = AnsatzCircuit::new(Layout::AllToAll, 2, 2).unwrap();
    let h = build_heisenberg(2, -1.0, &[0.4, -0.2]).unwrap();
    let config = HybridConfig {
        evolution: EvolutionConfig {
            beta_max: 1.0,
            record_params: true,
            ..Default::default()
        },
        ..Default::default()
    };
    let a = vqnhite_evolve(&config, &ansatz, &h, &initial_plus_state(2), 9).unwrap();
    let b = vqnhite_evolve(&config, &ansatz, &h, &initial_plus_state(2), 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.snapshots.len(), 10);
    for p in &a.points {
        assert!((0.0..=1.0).contains(&p.fidelity));
    }
}

#[test]
fn recorded_state_is_normalized() {
    let (ansatz, p, h) = random_instance(3, Layout::NearestNeighbor, 90);
    let reference = initial_plus_state(3);
    let phi = build_hybrid_state(&p, &ansatz, &reference).unwrap().normalized();
    assert!((phi.norm() - 1.0).abs() < 1e-12);
    let e = apply_sum_state(&h, &phi).unwrap();
    assert!(phi.inner(&e).unwrap().im.abs() < 1e-10);
}
