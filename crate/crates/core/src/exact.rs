//! Reference engines: dense diagonalization, exact normalized imaginary-time
//! evolution, fidelity, and central finite differences.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n_qubits: usize,
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors.
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn of_sum(h: &PauliSum) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::Argument("spectral decomposition needs a Hermitian sum".into()));
        }
        Self::of_matrix(h.n_qubits(), h.to_dense()?)
    }

    pub fn of_matrix(n_qubits: usize, m: DMatrix<Complex64>) -> Result<Self> {
        check_dim(1 << n_qubits, m.nrows())?;
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        Ok(Self {
            n_qubits,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> StateVector {
        self.eigenvector(0)
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        let amps = self.eigenvectors.column(k).iter().copied().collect();
        StateVector::new(self.n_qubits, amps).expect("square decomposition")
    }

    /// Gap between the two lowest eigenvalues.
    pub fn gap(&self) -> f64 {
        self.eigenvalues
            .get(1)
            .map_or(f64::INFINITY, |e1| e1 - self.eigenvalues[0])
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let v = &self.eigenvectors;
        let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&e| Complex64::from(e)),
        ));
        v * lambda * v.adjoint()
    }

    /// `exp(-Hβ)|ψ0⟩` normalized. The factor `e^{E_min β}` is pulled out
    /// before exponentiating so large β cannot overflow.
    pub fn evolve(&self, psi0: &StateVector, beta: f64) -> Result<StateVector> {
        check_dim(self.eigenvectors.nrows(), psi0.dim())?;
        if !(beta >= 0.0) {
            return Err(Error::Argument(format!(
                "imaginary time must be non-negative, got {beta}"
            )));
        }
        let e0 = self.ground_energy();
        let psi = DVector::from_column_slice(psi0.amplitudes());
        let coeffs = self.eigenvectors.adjoint() * psi;
        let weighted = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.eigenvalues)
                .map(|(c, &e)| c * (-(e - e0) * beta).exp()),
        );
        let out = &self.eigenvectors * weighted;
        let state = StateVector::new(self.n_qubits, out.iter().copied().collect())?;
        if state.norm() < 1e-300 {
            return Err(Error::Degenerate(
                "initial state has no weight on any retained eigencomponent".into(),
            ));
        }
        state.normalized()
    }
}

/// Exact normalized imaginary-time state `exp(-Hβ)|ψ0⟩ / ‖·‖`.
pub fn exact_ite(h: &PauliSum, psi0: &StateVector, beta: f64) -> Result<StateVector> {
    SpectralDecomposition::of_sum(h)?.evolve(psi0, beta)
}

/// `|⟨a|b⟩|²` for unit vectors.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    for (label, v) in [("first", a), ("second", b)] {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Contract(format!("{label} state has norm {norm}, expected 1")));
        }
    }
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// `⟨ψ|H|ψ⟩` for a Pauli sum (real part for Hermitian sums).
pub fn expectation(h: &PauliSum, psi: &StateVector) -> Result<Complex64> {
    Ok(apply_sum(h, psi)?
        .iter()
        .zip(psi.amplitudes())
        .map(|(x, a)| a.conj() * x)
        .sum())
}

/// `H|ψ⟩` as raw amplitudes.
pub fn apply_sum(h: &PauliSum, psi: &StateVector) -> Result<Vec<Complex64>> {
    check_dim(h.n_qubits(), psi.n_qubits())?;
    let mut out = vec![Complex64::default(); psi.dim()];
    for (c, p) in h.terms() {
        for (s, a) in psi.amplitudes().iter().enumerate() {
            let (phase, t) = p.apply(s)?;
            out[t] += c * phase * a;
        }
    }
    Ok(out)
}

/// `H|ψ⟩` as a state vector.
pub fn apply_sum_state(h: &PauliSum, psi: &StateVector) -> Result<StateVector> {
    StateVector::new(psi.n_qubits(), apply_sum(h, psi)?)
}

/// Values that central differences can be taken of.
pub trait Differentiable: Sized {
    /// `(plus - minus) / (2h)`
    fn central(plus: &Self, minus: &Self, h: f64) -> Self;
}

impl Differentiable for f64 {
    fn central(plus: &Self, minus: &Self, h: f64) -> Self {
        (plus - minus) / (2.0 * h)
    }
}

impl Differentiable for Complex64 {
    fn central(plus: &Self, minus: &Self, h: f64) -> Self {
        (plus - minus) / (2.0 * h)
    }
}

impl Differentiable for Vec<f64> {
    fn central(plus: &Self, minus: &Self, h: f64) -> Self {
        plus.iter().zip(minus).map(|(p, m)| (p - m) / (2.0 * h)).collect()
    }
}

impl Differentiable for StateVector {
    fn central(plus: &Self, minus: &Self, h: f64) -> Self {
        let amps = plus
            .amplitudes()
            .iter()
            .zip(minus.amplitudes())
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect();
        StateVector::new(plus.n_qubits(), amps).expect("matching dimensions")
    }
}

/// Componentwise central differences of `f` at `x` with step `h`.
pub fn finite_diff<T, F>(f: F, x: &[f64], h: f64) -> Result<Vec<T>>
where
    T: Differentiable,
    F: Fn(&[f64]) -> Result<T>,
{
    if !(h > 0.0) {
        return Err(Error::Argument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            probe[k] = x[k] + h;
            let plus = f(&probe)?;
            probe[k] = x[k] - h;
            let minus = f(&probe)?;
            probe[k] = x[k];
            Ok(T::central(&plus, &minus, h))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::build_heisenberg;
    use crate::statevector::initial_plus_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_time_returns_input() {
        let h = build_heisenberg(3, -1.0, &[0.1, 0.5, -0.3]).unwrap();
        let psi = initial_plus_state(3);
        let out = exact_ite(&h, &psi, 0.0).unwrap();
        assert_abs_diff_eq!(fidelity(&out, &psi).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_level_closed_form() {
        let h = PauliSum::from_terms(1, vec![(Complex64::from(1.0), "Z".parse().unwrap())]).unwrap();
        let beta = 0.37;
        let out = exact_ite(&h, &initial_plus_state(1), beta).unwrap();
        let (a, b) = ((-beta).exp(), beta.exp());
        let norm = (a * a + b * b).sqrt();
        assert_abs_diff_eq!(out.amplitudes()[0].norm(), a / norm, epsilon = 1e-12);
        assert_abs_diff_eq!(out.amplitudes()[1].norm(), b / norm, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_properties() {
        let psi = initial_plus_state(2);
        assert_abs_diff_eq!(fidelity(&psi, &psi).unwrap(), 1.0, epsilon = 1e-15);
        let a = StateVector::basis(2, 0);
        let b = StateVector::basis(2, 3);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let rotated = psi.scaled(Complex64::from_polar(1.0, 0.83));
        assert_abs_diff_eq!(fidelity(&psi, &rotated).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_rejects_unnormalized() {
        let psi = initial_plus_state(2).scaled(Complex64::from(2.0));
        assert!(matches!(fidelity(&psi, &psi), Err(Error::Contract(_))));
    }

    #[test]
    fn finite_diff_linear_and_sine() {
        let d = finite_diff(|x: &[f64]| Ok(3.0 * x[0] - 2.0 * x[1]), &[0.4, -1.2], 0.3).unwrap();
        assert_abs_diff_eq!(d[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], -2.0, epsilon = 1e-12);
        let s = finite_diff(|x: &[f64]| Ok(x[0].sin()), &[0.0], 1e-5).unwrap();
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn finite_diff_rejects_nonpositive_step() {
        assert!(finite_diff(|x: &[f64]| Ok(x[0]), &[0.0], 0.0).is_err());
    }

    #[test]
    fn reconstruction_and_ordering() {
        let h = build_heisenberg(3, -1.0, &[0.2, -0.7, 0.4]).unwrap();
        let spec = SpectralDecomposition::of_sum(&h).unwrap();
        assert!(spec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        assert!((spec.reconstruct() - h.to_dense().unwrap()).norm() < 1e-10);
    }
}
