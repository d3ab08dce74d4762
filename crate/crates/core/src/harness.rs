//! Instance generators, the experiment driver, and empirical
//! competitive-ratio reports.

use serde::{Deserialize, Serialize};

use crate::algo::pd::PdMode;
use crate::algo::runner::{run_with_mode, Algorithm};
use crate::algo::AlgoError;
use crate::instance::{validate_instance, Instance, InstanceError};
use crate::reductions::{
    run_both, run_perturbed, run_snapped, ReductionConfig, ReductionError, ReductionMode,
};
use crate::rng::mix_seed;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Random integer gaps in [1, 10]; requests sample server positions.
    Uniform,
    /// Tight unit-gap clusters separated by wide gaps; requests favor the
    /// lower servers of each cluster, with repeats.
    Clustered,
    /// Gaps 1, 2, 4, ..., 2^(n-2); a doubled request near the left end then
    /// chases its own displacement up the gap ladder, keeping the offline
    /// optimum tiny while distance-proportional rules drift into ever
    /// larger gaps.
    #[serde(alias = "geometric-gaps")]
    GeometricGaps,
    /// Unit-spaced servers with every request at the second-leftmost one.
    #[serde(alias = "harmonic-adversary")]
    HarmonicAdversary,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::Uniform,
        GeneratorKind::Clustered,
        GeneratorKind::GeometricGaps,
        GeneratorKind::HarmonicAdversary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::Clustered => "clustered",
            GeneratorKind::GeometricGaps => "geometric-gaps",
            GeneratorKind::HarmonicAdversary => "harmonic-adversary",
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(GeneratorKind::Uniform),
            "clustered" => Ok(GeneratorKind::Clustered),
            "geometric-gaps" | "geometric" => Ok(GeneratorKind::GeometricGaps),
            "harmonic-adversary" | "adversary" => Ok(GeneratorKind::HarmonicAdversary),
            other => Err(format!("unknown generator '{other}'")),
        }
    }
}

#[derive(Debug)]
pub enum HarnessError {
    BadParams(String),
    Instance(InstanceError),
    Algo(AlgoError),
    Reduction(ReductionError),
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::BadParams(msg) => write!(f, "bad parameters: {msg}"),
            HarnessError::Instance(e) => write!(f, "{e}"),
            HarnessError::Algo(e) => write!(f, "{e}"),
            HarnessError::Reduction(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<InstanceError> for HarnessError {
    fn from(e: InstanceError) -> Self {
        HarnessError::Instance(e)
    }
}

impl From<AlgoError> for HarnessError {
    fn from(e: AlgoError) -> Self {
        HarnessError::Algo(e)
    }
}

impl From<ReductionError> for HarnessError {
    fn from(e: ReductionError) -> Self {
        HarnessError::Reduction(e)
    }
}

/// Generates a strict-mode-valid instance: unit-or-larger gaps, requests at
/// server locations, one request per server. Deterministic in `seed`.
pub fn generate_instance(
    kind: GeneratorKind,
    n: usize,
    seed: u64,
) -> Result<Instance, HarnessError> {
    if n < 2 {
        return Err(HarnessError::BadParams(format!(
            "generator needs n >= 2, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match kind {
        GeneratorKind::Uniform => {
            let mut servers = vec![0.0];
            for _ in 1..n {
                let last = *servers.last().unwrap();
                servers.push(last + rng.random_range(1..=10) as f64);
            }
            let requests = (0..n).map(|_| servers[rng.random_range(0..n)]).collect();
            Instance::new(servers, requests)
        }
        GeneratorKind::Clustered => {
            let cluster_size = 4.min(n);
            let mut servers = Vec::with_capacity(n);
            let mut base = 0.0;
            while servers.len() < n {
                let size = cluster_size.min(n - servers.len());
                for k in 0..size {
                    servers.push(base + k as f64);
                }
                base += size as f64 + rng.random_range(50..=200) as f64;
            }
            let requests = (0..n)
                .map(|_| {
                    let cluster = rng.random_range(0..servers.len() / cluster_size.max(1) + 1);
                    let lo = (cluster * cluster_size).min(n - 1);
                    let hi = (lo + cluster_size).min(n);
                    // favor the low servers of the cluster
                    let a = rng.random_range(0..hi - lo);
                    let b = rng.random_range(0..hi - lo);
                    servers[(lo + a.min(b)).min(n - 1)]
                })
                .collect();
            Instance::new(servers, requests)
        }
        GeneratorKind::GeometricGaps => {
            let mut servers = Vec::with_capacity(n);
            let mut pos = 0.0;
            servers.push(pos);
            for k in 0..n - 1 {
                pos += (2.0f64).powi(k as i32);
                servers.push(pos);
            }
            // anchor low, double there, then chase the ladder upward;
            // servers below the anchor are requested first, the leftmost
            // server stays free
            let anchor = rng.random_range(1..=3.min(n - 1));
            let mut requests = Vec::with_capacity(n);
            requests.extend_from_slice(&servers[1..anchor]);
            requests.push(servers[anchor]);
            requests.push(servers[anchor]);
            requests.extend_from_slice(&servers[anchor + 1..]);
            Instance::new(servers, requests)
        }
        GeneratorKind::HarmonicAdversary => {
            let servers: Vec<f64> = (0..n).map(|k| k as f64).collect();
            let requests = vec![servers[1]; n];
            Instance::new(servers, requests)
        }
    };
    Ok(inst)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorKind,
    pub sizes: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub pd_mode: PdMode,
    #[serde(default)]
    pub reduction: Option<ReductionConfig>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.trials < 1 {
            return Err(HarnessError::BadParams("trials must be >= 1".into()));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(HarnessError::BadParams(
                "sizes must be nonempty with every n >= 2".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::BadParams("no algorithms selected".into()));
        }
        Ok(())
    }
}

/// Ledger summary of one phase of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub estimate: f64,
    pub assigned_total: f64,
    pub imaginary_total: f64,
    pub simulated_total: f64,
    pub trigger_cost: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRow {
    pub generator: String,
    pub n: usize,
    pub trial: u64,
    pub algorithm: String,
    pub instance_digest: String,
    pub online_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
    pub phases: Vec<PhaseSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: String,
    pub n: usize,
    pub trials: u64,
    pub mean_ratio: f64,
    pub max_ratio: f64,
}

/// Least-squares fit of mean ratio against log2(n), per algorithm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeRow {
    pub algorithm: String,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<AggregateRow>,
    pub slopes: Vec<SlopeRow>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Fixed columns: generator,n,trial,algorithm,digest,online_cost,opt_cost,ratio,phase_count
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("generator,n,trial,algorithm,digest,online_cost,opt_cost,ratio,phase_count\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.generator,
                row.n,
                row.trial,
                row.algorithm,
                row.instance_digest,
                row.online_cost,
                row.opt_cost,
                row.ratio,
                row.phases.len()
            ));
        }
        out
    }

    pub fn aggregate(&self, algorithm: Algorithm, n: usize) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.algorithm == algorithm.as_str() && a.n == n)
    }
}

/// Runs every selected algorithm over `trials` generated instances per
/// size, recording per-trial costs and per-phase ledger summaries.
/// Deterministic in the config.
pub fn experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        for trial in 0..cfg.trials {
            let instance_seed = mix_seed(cfg.seed, mix_seed(n as u64, trial));
            let inst = generate_instance(cfg.generator, n, instance_seed)?;
            let digest = inst.digest();
            let validated = validate_instance(&inst, false)?.0;
            for (ai, &algorithm) in cfg.algorithms.iter().enumerate() {
                let run_seed = mix_seed(instance_seed, 0x0a11_0000 + ai as u64);
                let (online_cost, opt_cost, phases) = match &cfg.reduction {
                    None => {
                        let tr = run_with_mode(&validated, algorithm, run_seed, cfg.pd_mode)?;
                        let phases = tr
                            .phases
                            .iter()
                            .map(|p| PhaseSummary {
                                estimate: p.estimate,
                                assigned_total: p.assigned_total,
                                imaginary_total: p.imaginary_total,
                                simulated_total: p.simulated_total,
                                trigger_cost: p
                                    .trigger_edge
                                    .map(|e| e.length())
                                    .unwrap_or(0.0),
                            })
                            .collect();
                        (tr.total_cost, tr.opt_cost, phases)
                    }
                    Some(red) => {
                        let wrapped = match red.mode {
                            ReductionMode::PerturbColocated => {
                                run_perturbed(&inst, algorithm, run_seed, cfg.pd_mode, red.epsilon)?
                            }
                            ReductionMode::SnapRequests => {
                                run_snapped(&inst, algorithm, run_seed, cfg.pd_mode)?
                            }
                            ReductionMode::Both => {
                                run_both(&inst, algorithm, run_seed, cfg.pd_mode, red.epsilon)?
                            }
                        };
                        (wrapped.outer_cost, wrapped.outer_opt, Vec::new())
                    }
                };
                let ratio = if opt_cost > 0.0 {
                    online_cost / opt_cost
                } else {
                    1.0
                };
                rows.push(TrialRow {
                    generator: cfg.generator.as_str().to_string(),
                    n,
                    trial,
                    algorithm: algorithm.as_str().to_string(),
                    instance_digest: digest.clone(),
                    online_cost,
                    opt_cost,
                    ratio,
                    phases,
                });
            }
        }
    }

    let mut aggregates = Vec::new();
    for &algorithm in &cfg.algorithms {
        for &n in &cfg.sizes {
            let ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm.as_str() && r.n == n)
                .map(|r| r.ratio)
                .collect();
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            aggregates.push(AggregateRow {
                algorithm: algorithm.as_str().to_string(),
                n,
                trials: ratios.len() as u64,
                mean_ratio: mean,
                max_ratio: max,
            });
        }
    }

    let mut slopes = Vec::new();
    for &algorithm in &cfg.algorithms {
        let points: Vec<(f64, f64)> = aggregates
            .iter()
            .filter(|a| a.algorithm == algorithm.as_str())
            .map(|a| ((a.n as f64).log2(), a.mean_ratio))
            .collect();
        if points.len() >= 2 {
            let (slope, intercept) = least_squares(&points);
            slopes.push(SlopeRow {
                algorithm: algorithm.as_str().to_string(),
                slope,
                intercept,
            });
        }
    }

    Ok(Report {
        config: cfg.clone(),
        rows,
        aggregates,
        slopes,
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return (0.0, sy / n);
    }
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}
