use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vqnhite_core::{
    build_heisenberg, initial_plus_state, vite_evolve, vqnhite_evolve, AnsatzCircuit, Method, PauliSum, Trajectory,
};

use crate::config::{FieldMode, FieldSpec, RunConfig};
use crate::error::{io_err, BenchError, Result};

pub const DATA_FILE: &str = "data.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_FILE: &str = "config.toml";

/// `n` i.i.d. draws from `Unif[−1, 1]`.
pub fn sample_fields(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Uniform::new_inclusive(-1.0, 1.0);
    (0..n).map(|_| u.sample(&mut rng)).collect()
}

/// Seed for stream `stream` of sample `sample` (splitmix64 finalizer),
/// kept to 63 bits so it fits a TOML integer.
pub fn derive_seed(master: u64, stream: u64, sample: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(sample.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) >> 1
}

const NETWORK_STREAM: u64 = 1;
const SHOT_STREAM: u64 = 2;
const FIELD_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub beta: f64,
    pub method: Method,
    pub sample: usize,
    pub fidelity: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub beta: f64,
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub sample: usize,
    pub network_seed: u64,
    pub shot_seed: u64,
    pub fields: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub sample: usize,
    pub method: Method,
    pub error: String,
}

/// Everything persisted next to the data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub code_version: String,
    pub config: RunConfig,
    pub samples: Vec<SampleInfo>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub records: Vec<Record>,
    pub metadata: Metadata,
}

impl FidelityTrace {
    pub fn summary(&self) -> Vec<SummaryRow> {
        summarize(&self.records)
    }

    pub fn failed_fraction(&self) -> f64 {
        let failed: std::collections::BTreeSet<usize> = self.metadata.failures.iter().map(|f| f.sample).collect();
        failed.len() as f64 / self.metadata.config.samples as f64
    }
}

/// Per-(method, β) mean and standard error of the mean.
pub fn summarize(records: &[Record]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Method, i64), (f64, Vec<f64>)> = BTreeMap::new();
    for r in records {
        // β values sit on a grid; key on the rounded value to keep float order stable
        let key = (r.method, (r.beta * 1e9).round() as i64);
        groups.entry(key).or_insert((r.beta, Vec::new())).1.push(r.fidelity);
    }
    groups
        .into_iter()
        .map(|((method, _), (beta, xs))| {
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let std_error = if xs.len() > 1 {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                method,
                beta,
                mean,
                std_error,
                count: xs.len(),
            }
        })
        .collect()
}

pub fn hamiltonian(config: &RunConfig, fields: &[f64]) -> Result<PauliSum> {
    Ok(build_heisenberg(config.n_qubits, config.coupling, fields)?)
}

/// Fields and seeds of every sample.
pub fn plan_samples(config: &RunConfig) -> Vec<SampleInfo> {
    let shared = match &config.fields {
        FieldSpec::Explicit { values } => values.clone(),
        FieldSpec::Uniform { seed } => sample_fields(*seed, config.n_qubits),
    };
    (0..config.samples)
        .map(|k| {
            let fields = match (&config.fields, config.field_mode) {
                (FieldSpec::Uniform { seed }, FieldMode::PerSample) => {
                    sample_fields(derive_seed(*seed, FIELD_STREAM, k as u64), config.n_qubits)
                }
                _ => shared.clone(),
            };
            SampleInfo {
                sample: k,
                network_seed: derive_seed(config.seed, NETWORK_STREAM, k as u64),
                shot_seed: derive_seed(config.seed, SHOT_STREAM, k as u64),
                fields,
            }
        })
        .collect()
}

/// Runs one method for one sample.
pub fn run_sample(config: &RunConfig, ansatz: &AnsatzCircuit, info: &SampleInfo, method: Method) -> Result<Trajectory> {
    let h = hamiltonian(config, &info.fields)?;
    let psi0 = initial_plus_state(config.n_qubits);
    let trace = match method {
        Method::Vite => vite_evolve(&config.evolution(info.shot_seed), ansatz, &h, &psi0)?,
        Method::Vqnhite => vqnhite_evolve(&config.hybrid(info.shot_seed), ansatz, &h, &psi0, info.network_seed)?,
    };
    Ok(trace)
}

/// Runs every (sample, method) pair on a worker pool and merges the results
/// in sample order. Failed runs are recorded and skipped.
pub fn run_benchmark(config: &RunConfig) -> Result<FidelityTrace> {
    config.validate()?;
    // Both methods share this circuit (and so its depth) and each sample's Hamiltonian.
    let ansatz = AnsatzCircuit::new(config.layout, config.n_qubits, config.depth)?;
    let samples = plan_samples(config);
    let jobs: Vec<(usize, Method)> = samples
        .iter()
        .flat_map(|s| config.method.methods().iter().map(move |&m| (s.sample, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| BenchError::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<(usize, Method, Result<Trajectory>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(k, m)| (k, m, run_sample(config, &ansatz, &samples[k], m)))
            .collect()
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (sample, method, outcome) in outcomes {
        match outcome {
            Ok(trace) => records.extend(trace.points.iter().map(|p| Record {
                beta: p.beta,
                method,
                sample,
                fidelity: p.fidelity,
                energy: p.energy,
            })),
            Err(e) => failures.push(Failure {
                sample,
                method,
                error: e.to_string(),
            }),
        }
    }
    Ok(FidelityTrace {
        records,
        metadata: Metadata {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            samples,
            failures,
        },
    })
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<Record>, _>>()?)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<SummaryRow>, _>>()?)
}

/// Writes `data.csv`, `summary.csv` and `config.toml` into `dir`.
pub fn persist(trace: &FidelityTrace, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let data = dir.join(DATA_FILE);
    let summary = dir.join(SUMMARY_FILE);
    let meta = dir.join(CONFIG_FILE);
    write_records(&data, &trace.records)?;
    write_summary(&summary, &trace.summary())?;
    fs::write(&meta, toml::to_string(&trace.metadata)?).map_err(io_err(&meta))?;
    Ok(vec![data, summary, meta])
}

/// Loads a persisted trace from its directory or its data file.
pub fn load(path: &Path) -> Result<FidelityTrace> {
    let dir = if path.is_dir() {
        path
    } else {
        path.parent().unwrap_or(Path::new("."))
    };
    let data = if path.is_dir() {
        dir.join(DATA_FILE)
    } else {
        path.to_path_buf()
    };
    let meta_path = dir.join(CONFIG_FILE);
    let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
    Ok(FidelityTrace {
        records: read_records(&data)?,
        metadata: toml::from_str(&text)?,
    })
}
