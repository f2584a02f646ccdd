use vqnhite_wasm::{compare, exact_curve, spectrum};

#[test]
fn compare_returns_aligned_curves() {
    let c = compare(&[0.3, -0.2, 0.5], -1.0, "all", 0.1, 1.0, 4).unwrap_or_else(|_| panic!("compare failed"));
    assert_eq!(c.beta().len(), 10);
    assert_eq!(c.vite().len(), 10);
    assert_eq!(c.vqnhite().len(), 10);
    assert!(c.vqnhite().iter().all(|f| (0.0..=1.0 + 1e-12).contains(f)));
}

#[test]
fn exact_curve_starts_at_the_initial_state() {
    let rows = exact_curve(&[0.3, -0.2], -1.0, 0.5, 2.0).unwrap_or_else(|_| panic!("exact_curve failed"));
    assert_eq!(rows.len(), 3 * 5);
    assert_eq!(rows[0], 0.0);
    // energy never increases under imaginary-time evolution
    assert!(rows
        .chunks(3)
        .zip(rows.chunks(3).skip(1))
        .all(|(a, b)| b[2] <= a[2] + 1e-12));
}

#[test]
fn spectrum_of_a_ferromagnetic_pair() {
    // J = −1: triplet at −1 ± field splitting, singlet at +3
    let s = spectrum(&[0.0, 0.0], -1.0).unwrap_or_else(|_| panic!("spectrum failed"));
    let e = s.eigenvalues();
    assert!((e[0] + 1.0).abs() < 1e-12 && (e[3] - 3.0).abs() < 1e-12);
}
