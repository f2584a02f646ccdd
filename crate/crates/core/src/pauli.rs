//! Pauli strings, weighted Pauli sums and the truncated imaginary-time
//! propagator expanded in the Pauli basis.
//!
//! Bitstrings are plain `usize` indices with qubit 0 as the most significant
//! bit, so `0b011` on three qubits is `s = (s0, s1, s2) = (0, 1, 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest register for which dense matrices are built.
pub const DENSE_LIMIT: usize = 12;

/// Coefficients below this magnitude are dropped when a sum is merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const IM: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-qubit product `self · other = phase · result`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (IM, Z),
            (Y, Z) => (IM, X),
            (Z, X) => (IM, Y),
            (Y, X) => (-IM, Z),
            (Z, Y) => (-IM, X),
            (X, Z) => (-IM, Y),
            _ => unreachable!(),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, one letter per qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Argument("a Pauli string needs at least one qubit".into()));
        }
        Ok(Self { letters })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n.max(1)],
        }
    }

    /// Identity everywhere except the listed `(qubit, letter)` factors.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(q, letter) in factors {
            if q >= n {
                return Err(Error::Argument(format!("qubit {q} out of range for {n} qubits")));
            }
            p.letters[q] = letter;
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// True when the string contains only `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|&p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// First qubit carrying an `X` or `Y`.
    pub fn first_offdiagonal_qubit(&self) -> Option<usize> {
        self.letters.iter().position(|&p| matches!(p, Pauli::X | Pauli::Y))
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.letters.len() - 1 - q)
    }

    /// Bits flipped by the string (positions of `X` and `Y`).
    pub fn flip_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::X | Pauli::Y))
    }

    /// Bits contributing a sign (positions of `Y` and `Z`).
    pub fn sign_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::Y | Pauli::Z))
    }

    fn mask(&self, pred: impl Fn(Pauli) -> bool) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| pred(p))
            .fold(0, |m, (q, _)| m | self.bit(q))
    }

    fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count()
    }

    /// `P|s⟩ = phase · |s̃⟩`.
    pub fn apply(&self, s: usize) -> Result<(Complex64, usize)> {
        let n = self.n_qubits();
        if s >> n != 0 {
            return Err(Error::Argument(format!("bitstring {s:#b} has more than {n} bits")));
        }
        Ok(self.apply_unchecked(s))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, s: usize) -> (Complex64, usize) {
        // Y|b⟩ = i(-1)^b |b̄⟩ and Z|b⟩ = (-1)^b |b⟩
        let phase = i_pow(self.y_count());
        let phase = if (s & self.sign_mask()).count_ones() % 2 == 1 {
            -phase
        } else {
            phase
        };
        (phase, s ^ self.flip_mask())
    }

    /// `A · B = phase · C`.
    pub fn mul(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        check_dim(self.n_qubits(), other.n_qubits())?;
        let mut phase = ONE;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (p, c) = a.mul(b);
                phase *= p;
                c
            })
            .collect();
        Ok((phase, PauliString { letters }))
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        PauliSum::from_terms(self.n_qubits(), vec![(ONE, self.clone())])?.to_dense()
    }
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => IM,
        2 => -ONE,
        _ => -IM,
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Argument(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters)
    }
}

/// Parses a bitstring such as `"011"` into an index (qubit 0 leftmost).
pub fn parse_bits(s: &str) -> Result<usize> {
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::Argument(format!("invalid bit {other:?}"))),
    })
}

pub fn format_bits(s: usize, n: usize) -> String {
    (0..n)
        .map(|q| if (s >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Weighted sum of Pauli strings in merged canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        Self {
            n_qubits: n,
            terms: Vec::new(),
        }
    }

    /// Merges duplicate strings and drops negligible coefficients.
    pub fn from_terms(n: usize, terms: Vec<(Complex64, PauliString)>) -> Result<Self> {
        let mut merged: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (c, p) in terms {
            check_dim(n, p.n_qubits())?;
            *merged.entry(p).or_default() += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.norm() >= MERGE_TOLERANCE)
            .map(|(p, c)| (c, p))
            .collect();
        Ok(Self { n_qubits: n, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms
            .iter()
            .find(|(_, q)| q == p)
            .map(|(c, _)| *c)
            .unwrap_or_default()
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.im.abs() < MERGE_TOLERANCE)
    }

    /// Real coefficients `h_j` of a Hermitian sum.
    pub fn real_terms(&self) -> impl Iterator<Item = (f64, &PauliString)> {
        self.terms.iter().map(|(c, p)| (c.re, p))
    }

    pub fn scale(&self, k: Complex64) -> PauliSum {
        let terms = self.terms.iter().map(|(c, p)| (c * k, p.clone())).collect();
        PauliSum::from_terms(self.n_qubits, terms).expect("same register")
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        check_dim(self.n_qubits, other.n_qubits)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        PauliSum::from_terms(self.n_qubits, terms)
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        check_dim(self.n_qubits, other.n_qubits)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (a, pa) in &self.terms {
            for (b, pb) in &other.terms {
                let (phase, p) = pa.mul(pb)?;
                terms.push((a * b * phase, p));
            }
        }
        PauliSum::from_terms(self.n_qubits, terms)
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.to_dense_with_limit(DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, limit: usize) -> Result<DMatrix<Complex64>> {
        let n = self.n_qubits;
        if n > limit {
            return Err(Error::DenseLimit { n, limit });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            for s in 0..dim {
                let (phase, t) = p.apply_unchecked(s);
                m[(t, s)] += c * phase;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, p)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}·{}", c.re, p)?;
            } else {
                write!(f, "({})·{}", c, p)?;
            }
        }
        Ok(())
    }
}

/// Open-boundary Heisenberg chain with a longitudinal field:
/// `J Σ (X_j X_{j+1} + Y_j Y_{j+1} + Z_j Z_{j+1}) + Σ h_j Z_j`.
pub fn build_heisenberg(n: usize, coupling: f64, fields: &[f64]) -> Result<PauliSum> {
    if n == 0 {
        return Err(Error::Argument("the chain needs at least one site".into()));
    }
    if fields.len() != n {
        return Err(Error::Argument(format!(
            "field vector has {} entries for {n} sites",
            fields.len()
        )));
    }
    let mut terms = Vec::with_capacity(3 * n + n);
    for j in 0..n.saturating_sub(1) {
        for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
            let p = PauliString::from_sparse(n, &[(j, letter), (j + 1, letter)])?;
            terms.push((Complex64::from(coupling), p));
        }
    }
    for (j, &h) in fields.iter().enumerate() {
        terms.push((Complex64::from(h), PauliString::from_sparse(n, &[(j, Pauli::Z)])?));
    }
    PauliSum::from_terms(n, terms)
}

/// Truncated series of `exp(-H δβ)` in the Pauli basis, `Σ e_j P_j`.
///
/// `order` 1 keeps `I - Hδβ`; order 2 adds `(Hδβ)²/2`.
pub fn taylor_ite_pauli(h: &PauliSum, dbeta: f64, order: u32) -> Result<PauliSum> {
    if !(dbeta >= 0.0) || !dbeta.is_finite() {
        return Err(Error::Argument(format!("step must be non-negative, got {dbeta}")));
    }
    if !matches!(order, 1 | 2) {
        return Err(Error::Argument(format!("unsupported Taylor order {order}")));
    }
    if !h.is_hermitian() {
        return Err(Error::Argument("Taylor propagator needs a Hermitian sum".into()));
    }
    let n = h.n_qubits();
    let identity = PauliSum::from_terms(n, vec![(ONE, PauliString::identity(n))])?;
    let hd = h.scale(Complex64::from(dbeta));
    let mut series = identity.add(&hd.scale(-ONE))?;
    if order == 2 {
        series = series.add(&hd.mul(&hd)?.scale(Complex64::from(0.5)))?;
    }
    // Hermitian input makes every coefficient real; strip rounding residue.
    let terms = series
        .terms
        .into_iter()
        .map(|(c, p)| (Complex64::from(c.re), p))
        .collect();
    PauliSum::from_terms(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn apply_flips_x_and_y_positions() {
        let (phase, t) = ps("XYZ").apply(parse_bits("011").unwrap()).unwrap();
        assert_eq!(format_bits(t, 3), "101");
        assert_abs_diff_eq!(phase.re, 0.0);
        assert_abs_diff_eq!(phase.im, 1.0);
    }

    #[test]
    fn identity_leaves_bitstring_alone() {
        for s in 0..8 {
            assert_eq!(ps("III").apply(s).unwrap(), (ONE, s));
        }
    }

    #[test]
    fn apply_rejects_oversized_bitstring() {
        assert!(ps("XZ").apply(0b100).is_err());
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(ps("X").mul(&ps("Y")).unwrap(), (IM, ps("Z")));
        assert_eq!(ps("Y").mul(&ps("X")).unwrap(), (-IM, ps("Z")));
        assert_eq!(ps("XZY").mul(&ps("XZY")).unwrap(), (ONE, ps("III")));
    }

    #[test]
    fn mul_length_mismatch_is_an_error() {
        assert!(matches!(ps("X").mul(&ps("XX")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        let (phase, c) = ps("XZ").mul(&ps("YZ")).unwrap();
        assert_eq!(c, ps("ZI"));
        assert_eq!(phase, IM);
        let lhs = ps("XZ").to_dense().unwrap() * ps("YZ").to_dense().unwrap();
        let rhs = ps("ZI").to_dense().unwrap() * phase;
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0);
    }

    #[test]
    fn heisenberg_two_sites() {
        let h = build_heisenberg(2, -1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(h.len(), 3);
        for s in ["XX", "YY", "ZZ"] {
            assert_eq!(h.coefficient(&ps(s)), Complex64::from(-1.0));
        }
    }

    #[test]
    fn heisenberg_single_site() {
        let h = build_heisenberg(1, 0.0, &[0.5]).unwrap();
        assert_eq!(h.terms(), &[(Complex64::from(0.5), ps("Z"))]);
    }

    #[test]
    fn heisenberg_rejects_bad_field_length() {
        assert!(matches!(
            build_heisenberg(3, -1.0, &[0.1, 0.2]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn heisenberg_term_count() {
        let h = build_heisenberg(5, -1.0, &[0.3, 0.0, -0.2, 0.0, 0.9]).unwrap();
        assert_eq!(h.len(), 3 * 4 + 3);
    }

    #[test]
    fn dense_single_qubit() {
        let z = ps("Z").to_dense().unwrap();
        assert_eq!(z[(0, 0)], ONE);
        assert_eq!(z[(1, 1)], -ONE);
        let x = ps("X").to_dense().unwrap();
        assert_eq!(x[(0, 1)], ONE);
        assert_eq!(x[(1, 0)], ONE);
        assert_eq!(x[(0, 0)], Complex64::default());
    }

    #[test]
    fn dense_limit_enforced() {
        let h = PauliSum::zero(4);
        assert!(matches!(h.to_dense_with_limit(3), Err(Error::DenseLimit { .. })));
    }

    #[test]
    fn taylor_scalar_case() {
        let (hz, db) = (0.7, 0.1);
        let h = PauliSum::from_terms(1, vec![(Complex64::from(hz), ps("Z"))]).unwrap();
        let t = taylor_ite_pauli(&h, db, 2).unwrap();
        assert_eq!(t.len(), 2);
        assert_abs_diff_eq!(
            t.coefficient(&ps("I")).re,
            1.0 + hz * hz * db * db / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(t.coefficient(&ps("Z")).re, -hz * db, epsilon = 1e-15);
    }

    #[test]
    fn taylor_zero_step_is_identity() {
        let h = build_heisenberg(3, -1.0, &[0.2, -0.4, 0.9]).unwrap();
        let t = taylor_ite_pauli(&h, 0.0, 2).unwrap();
        assert_eq!(t.terms(), &[(ONE, PauliString::identity(3))]);
    }

    #[test]
    fn taylor_rejects_order_three() {
        let h = build_heisenberg(2, -1.0, &[0.0, 0.0]).unwrap();
        assert!(matches!(taylor_ite_pauli(&h, 0.1, 3), Err(Error::Argument(_))));
    }

    #[test]
    fn taylor_coefficients_are_real() {
        let h = build_heisenberg(3, -1.0, &[0.2, -0.4, 0.9]).unwrap();
        let t = taylor_ite_pauli(&h, 0.1, 2).unwrap();
        assert!(t.terms().iter().all(|(c, _)| c.im == 0.0));
    }
}
