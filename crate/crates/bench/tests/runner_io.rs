use std::fs;

use proptest::prelude::*;
use vqnhite_bench::runner::{read_summary, Record};
use vqnhite_bench::*;
use vqnhite_core::Method;

fn small(samples: usize, seed: u64) -> RunConfig {
    RunConfig {
        n_qubits: 2,
        samples,
        seed,
        ..Default::default()
    }
}

#[test]
fn one_sample_gives_sixty_points_per_method() {
    let trace = run_benchmark(&small(1, 0)).unwrap();
    assert!(trace.metadata.failures.is_empty());
    assert_eq!(trace.records.len(), 2 * 60);
    for m in [Method::Vite, Method::Vqnhite] {
        let betas: Vec<f64> = trace.records.iter().filter(|r| r.method == m).map(|r| r.beta).collect();
        assert_eq!(betas.len(), 60);
        assert!((betas[0] - 0.1).abs() < 1e-12 && (betas[59] - 6.0).abs() < 1e-9);
    }
}

#[test]
fn runs_are_deterministic_across_worker_counts() {
    let a = run_benchmark(&small(3, 7)).unwrap();
    let b = run_benchmark(&RunConfig {
        workers: 3,
        ..small(3, 7)
    })
    .unwrap();
    assert_eq!(a.records, b.records);
    assert_ne!(a.records, run_benchmark(&small(3, 8)).unwrap().records);
}

#[test]
fn persisted_trace_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let trace = run_benchmark(&small(2, 1)).unwrap();
    persist(&trace, dir.path()).unwrap();
    let back = load(dir.path()).unwrap();
    assert_eq!(back.records, trace.records);
    assert_eq!(back.metadata, trace.metadata);
    let header = fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert!(header.starts_with("beta,method,sample,fidelity,energy\n"));
}

#[test]
fn summary_file_matches_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let trace = run_benchmark(&small(3, 2)).unwrap();
    persist(&trace, dir.path()).unwrap();
    let rows = read_summary(&dir.path().join("summary.csv")).unwrap();
    assert_eq!(rows.len(), 120);
    for row in &rows {
        let xs: Vec<f64> = trace
            .records
            .iter()
            .filter(|r| r.method == row.method && (r.beta - row.beta).abs() < 1e-9)
            .map(|r| r.fidelity)
            .collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert_eq!(row.count, 3);
        assert!((row.mean - mean).abs() < 1e-14);
        assert!((row.std_error - (var / n).sqrt()).abs() < 1e-14);
    }
}

#[test]
fn plot_has_a_series_per_method() {
    let dir = tempfile::tempdir().unwrap();
    persist(&run_benchmark(&small(2, 3)).unwrap(), dir.path()).unwrap();
    let svg = dir.path().join("f.svg");
    emit_plot(&dir.path().join("data.csv"), &svg).unwrap();
    let text = fs::read_to_string(svg).unwrap();
    assert_eq!(text.matches(r#"class="series""#).count(), 2);
    assert!(text.contains("N = 2"));

    let only_vite = RunConfig {
        method: MethodChoice::Vite,
        ..small(1, 3)
    };
    let dir = tempfile::tempdir().unwrap();
    persist(&run_benchmark(&only_vite).unwrap(), dir.path()).unwrap();
    let svg = dir.path().join("f.svg");
    emit_plot(dir.path(), &svg).unwrap();
    assert_eq!(fs::read_to_string(svg).unwrap().matches(r#"class="series""#).count(), 1);
}

#[test]
fn empty_trace_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let trace = FidelityTrace {
        records: Vec::new(),
        ..run_benchmark(&small(1, 0)).unwrap()
    };
    persist(&trace, dir.path()).unwrap();
    assert!(matches!(
        emit_plot(dir.path(), &dir.path().join("f.svg")),
        Err(BenchError::EmptyTrace(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summary_mean_is_bounded_by_samples(xs in prop::collection::vec(0.0f64..=1.0, 1..12)) {
        let records: Vec<Record> = xs
            .iter()
            .enumerate()
            .map(|(k, &f)| Record { beta: 0.5, method: Method::Vqnhite, sample: k, fidelity: f, energy: 0.0 })
            .collect();
        let rows = summarize(&records);
        prop_assert_eq!(rows.len(), 1);
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(rows[0].mean >= lo - 1e-15 && rows[0].mean <= hi + 1e-15);
        prop_assert!(rows[0].std_error >= 0.0);
    }
}
