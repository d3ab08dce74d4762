//! Wrappers removing the two simplifying assumptions the core algorithms
//! make: that no two servers share a location, and that requests arrive at
//! server locations.
//!
//! The co-location wrapper runs the inner algorithm on an instance whose
//! duplicate servers are spread right by at most epsilon and forwards each
//! request either to an available server in the same epsilon-window or to
//! its own arrival location. The snapping wrapper forwards each request to
//! the nearest server location (ties left) and copies the inner
//! algorithm's choice.

use serde::{Deserialize, Serialize};

use crate::algo::pd::PdMode;
use crate::algo::runner::{Algorithm, OnlineRunner};
use crate::algo::AlgoError;
use crate::instance::Instance;
use crate::matching::optimal_partial_cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMode {
    PerturbColocated,
    SnapRequests,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    /// Perturbation radius; defaults to `1 / (5 n)` when absent.
    pub epsilon: Option<f64>,
    pub mode: ReductionMode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionError {
    /// Distinct server locations closer than 1; rescale first.
    DistinctGapBelowOne { left: f64, right: f64 },
    BadEpsilon { epsilon: f64, max: f64 },
    EmptyServers,
    Algo(AlgoError),
}

impl std::fmt::Display for ReductionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReductionError::DistinctGapBelowOne { left, right } => write!(
                f,
                "distinct server locations {left} and {right} are closer than 1; rescale first"
            ),
            ReductionError::BadEpsilon { epsilon, max } => {
                write!(f, "epsilon {epsilon} outside (0, {max}]")
            }
            ReductionError::EmptyServers => write!(f, "no servers"),
            ReductionError::Algo(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ReductionError {}

impl From<AlgoError> for ReductionError {
    fn from(e: AlgoError) -> Self {
        ReductionError::Algo(e)
    }
}

/// Rescales so the minimum gap between distinct server locations is 1.
/// Returns the scaled instance and the factor applied (1 when no scaling
/// was needed); costs in original units are scaled costs divided by it.
pub fn normalize_scale(inst: &Instance) -> (Instance, f64) {
    let mut servers = inst.servers.clone();
    servers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min_gap = servers
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_gap.is_finite() || min_gap >= 1.0 {
        return (Instance::new(servers, inst.requests.clone()), 1.0);
    }
    let factor = 1.0 / min_gap;
    (
        Instance::new(
            servers.iter().map(|s| s * factor).collect(),
            inst.requests.iter().map(|r| r * factor).collect(),
        ),
        factor,
    )
}

/// Correspondence between original and perturbed server positions, index
/// by index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositionMap {
    pub original: Vec<f64>,
    pub perturbed: Vec<f64>,
    pub epsilon: f64,
}

/// Spreads co-located servers to the right at spacing `epsilon / k` for a
/// group of `k` duplicates, so that all positions become distinct while no
/// server moves by epsilon or more. Requires distinct locations to be at
/// least 1 apart.
pub fn lift_colocated(
    inst: &Instance,
    epsilon: Option<f64>,
) -> Result<(Instance, PositionMap), ReductionError> {
    if inst.servers.is_empty() {
        return Err(ReductionError::EmptyServers);
    }
    let mut servers = inst.servers.clone();
    servers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in servers.windows(2) {
        let gap = w[1] - w[0];
        if gap > 0.0 && gap < 1.0 {
            return Err(ReductionError::DistinctGapBelowOne {
                left: w[0],
                right: w[1],
            });
        }
    }
    let n = servers.len();
    let eps_max = 1.0 / (5.0 * n as f64);
    let epsilon = epsilon.unwrap_or(eps_max);
    if epsilon <= 0.0 || epsilon > eps_max {
        return Err(ReductionError::BadEpsilon {
            epsilon,
            max: eps_max,
        });
    }
    let mut perturbed = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && servers[j] == servers[i] {
            j += 1;
        }
        let k = j - i;
        for offset in 0..k {
            perturbed.push(servers[i] + offset as f64 * epsilon / k as f64);
        }
        i = j;
    }
    Ok((
        Instance::new(perturbed.clone(), inst.requests.clone()),
        PositionMap {
            original: servers,
            perturbed,
            epsilon,
        },
    ))
}

/// Cost accounting for one wrapped run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WrappedRun {
    /// Cost paid by the wrapper on the outer instance.
    pub outer_cost: f64,
    /// Cost paid by the inner algorithm on its own instance.
    pub inner_cost: f64,
    /// Offline optimum of the outer instance.
    pub outer_opt: f64,
    /// Offline optimum of the inner instance (the forwarded requests).
    pub inner_opt: f64,
    pub epsilon: f64,
    /// Outer assignment, as indices into the sorted server array.
    pub assignments: Vec<usize>,
}

/// Live co-location wrapper: serves requests at original server locations
/// by forwarding to the perturbed instance, either at an available server
/// in the same epsilon-window or at the arrival location itself.
pub struct PerturbRunner {
    inner: OnlineRunner,
    map: PositionMap,
    forwarded: Vec<f64>,
    outer_cost: f64,
}

impl PerturbRunner {
    pub fn new(
        inst: &Instance,
        algorithm: Algorithm,
        seed: u64,
        mode: PdMode,
        epsilon: Option<f64>,
    ) -> Result<Self, ReductionError> {
        let (inner_instance, map) = lift_colocated(inst, epsilon)?;
        Ok(PerturbRunner {
            inner: OnlineRunner::new(inner_instance.servers, algorithm, seed, mode),
            map,
            forwarded: Vec::new(),
            outer_cost: 0.0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.map.epsilon
    }

    /// Original (outer) positions of the servers, index by index.
    pub fn original_positions(&self) -> &[f64] {
        &self.map.original
    }

    pub fn serve(&mut self, r: f64) -> Result<usize, ReductionError> {
        // an available server in the epsilon-window of r, if any
        let window = self
            .map
            .original
            .iter()
            .enumerate()
            .filter(|(_, &orig)| orig == r)
            .find(|&(i, _)| self.inner.state().available().contains(&i));
        let forward_at = match window {
            Some((i, _)) => self.map.perturbed[i],
            None => r,
        };
        self.forwarded.push(forward_at);
        let assigned = self.inner.serve(forward_at)?;
        self.outer_cost += (self.map.original[assigned] - r).abs();
        Ok(assigned)
    }
}

/// Runs `algorithm` behind the co-location wrapper: the inner algorithm
/// sees the perturbed instance, the wrapper pays original-position costs.
/// Requests must arrive at (original) server locations.
pub fn run_perturbed(
    inst: &Instance,
    algorithm: Algorithm,
    seed: u64,
    mode: PdMode,
    epsilon: Option<f64>,
) -> Result<WrappedRun, ReductionError> {
    let mut wrapper = PerturbRunner::new(inst, algorithm, seed, mode, epsilon)?;
    let mut assignments = Vec::with_capacity(inst.requests.len());
    for &r in &inst.requests {
        assignments.push(wrapper.serve(r)?);
    }
    let outer_opt = optimal_partial_cost(&inst.requests, &wrapper.map.original)
        .map_err(AlgoError::Matching)?;
    let inner_opt = optimal_partial_cost(&wrapper.forwarded, &wrapper.map.perturbed)
        .map_err(AlgoError::Matching)?;
    Ok(WrappedRun {
        outer_cost: wrapper.outer_cost,
        inner_cost: wrapper.inner.total_cost(),
        outer_opt,
        inner_opt,
        epsilon: wrapper.map.epsilon,
        assignments,
    })
}

/// Nearest server location to `x`, ties broken left.
pub fn snap_point(servers: &[f64], x: f64) -> f64 {
    debug_assert!(!servers.is_empty());
    let k = servers.partition_point(|&s| s < x);
    let right = servers.get(k).copied();
    let left = k.checked_sub(1).map(|k| servers[k]);
    match (left, right) {
        (Some(l), Some(r)) => {
            if x - l <= r - x {
                l
            } else {
                r
            }
        }
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (None, None) => unreachable!("nonempty servers"),
    }
}

/// Runs `algorithm` behind the snapping wrapper: each request is forwarded
/// to the nearest server location and assigned wherever the inner
/// algorithm sends the forwarded request. Lifts the requests-at-servers
/// assumption.
pub fn run_snapped(
    inst: &Instance,
    algorithm: Algorithm,
    seed: u64,
    mode: PdMode,
) -> Result<WrappedRun, ReductionError> {
    if inst.servers.is_empty() {
        return Err(ReductionError::EmptyServers);
    }
    let mut servers = inst.servers.clone();
    servers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut inner = OnlineRunner::new(servers.clone(), algorithm, seed, mode);
    let mut forwarded = Vec::with_capacity(inst.requests.len());
    let mut assignments = Vec::with_capacity(inst.requests.len());
    let mut outer_cost = 0.0;
    for &r in &inst.requests {
        let snapped = snap_point(&servers, r);
        forwarded.push(snapped);
        let assigned = inner.serve(snapped)?;
        assignments.push(assigned);
        outer_cost += (servers[assigned] - r).abs();
    }
    let outer_opt =
        optimal_partial_cost(&inst.requests, &servers).map_err(AlgoError::Matching)?;
    let inner_opt = optimal_partial_cost(&forwarded, &servers).map_err(AlgoError::Matching)?;
    Ok(WrappedRun {
        outer_cost,
        inner_cost: inner.total_cost(),
        outer_opt,
        inner_opt,
        epsilon: 0.0,
        assignments,
    })
}

/// Full composition for arbitrary instances (co-located servers permitted,
/// requests anywhere): snap each request to the nearest distinct server
/// location, then serve it through the co-location wrapper.
pub fn run_both(
    inst: &Instance,
    algorithm: Algorithm,
    seed: u64,
    mode: PdMode,
    epsilon: Option<f64>,
) -> Result<WrappedRun, ReductionError> {
    let mut wrapper = PerturbRunner::new(inst, algorithm, seed, mode, epsilon)?;
    let mut locations: Vec<f64> = wrapper.original_positions().to_vec();
    locations.dedup();
    let mut snapped = Vec::with_capacity(inst.requests.len());
    let mut assignments = Vec::with_capacity(inst.requests.len());
    let mut outer_cost = 0.0;
    let originals = wrapper.original_positions().to_vec();
    for &r in &inst.requests {
        let at = snap_point(&locations, r);
        snapped.push(at);
        let assigned = wrapper.serve(at)?;
        assignments.push(assigned);
        outer_cost += (originals[assigned] - r).abs();
    }
    let outer_opt =
        optimal_partial_cost(&inst.requests, &originals).map_err(AlgoError::Matching)?;
    let inner_opt = optimal_partial_cost(&snapped, &originals).map_err(AlgoError::Matching)?;
    Ok(WrappedRun {
        outer_cost,
        inner_cost: wrapper.outer_cost,
        outer_opt,
        inner_opt,
        epsilon: wrapper.epsilon(),
        assignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lift_spreads_duplicates_right() {
        let inst = Instance::new(vec![0.0, 0.0, 5.0], vec![0.0, 0.0, 5.0]);
        let (lifted, map) = lift_colocated(&inst, None).unwrap();
        assert_eq!(map.epsilon, 1.0 / 15.0);
        assert_eq!(lifted.servers[0], 0.0);
        assert!(lifted.servers[1] > 0.0 && lifted.servers[1] <= 1.0 / 15.0);
        assert_eq!(lifted.servers[2], 5.0);
        // distinct already: identity
        let inst = Instance::new(vec![0.0, 5.0], vec![]);
        let (lifted, map) = lift_colocated(&inst, None).unwrap();
        assert_eq!(lifted.servers, map.original);
    }

    #[test]
    fn lift_rejects_tight_distinct_gaps() {
        let inst = Instance::new(vec![0.0, 0.5], vec![]);
        assert!(matches!(
            lift_colocated(&inst, None),
            Err(ReductionError::DistinctGapBelowOne { .. })
        ));
        let (scaled, factor) = normalize_scale(&inst);
        assert_eq!(factor, 2.0);
        assert!(lift_colocated(&scaled, None).is_ok());
    }

    #[test]
    fn snap_points_tie_left() {
        let servers = [0.0, 5.0];
        assert_eq!(snap_point(&servers, 2.4), 0.0);
        assert_eq!(snap_point(&servers, 2.5), 0.0);
        assert_eq!(snap_point(&servers, 2.6), 5.0);
        assert_eq!(snap_point(&servers, 5.0), 5.0);
        assert_eq!(snap_point(&servers, -3.0), 0.0);
        assert_eq!(snap_point(&servers, 9.0), 5.0);
    }

    #[test]
    fn perturbed_run_cost_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..50u64 {
            let groups = rng.random_range(2..=5usize);
            let mut servers = Vec::new();
            let mut base = 0.0;
            for _ in 0..groups {
                let copies = rng.random_range(1..=3usize);
                for _ in 0..copies {
                    servers.push(base);
                }
                base += rng.random_range(1..=6) as f64;
            }
            let n = servers.len();
            let requests: Vec<f64> = (0..n).map(|_| servers[rng.random_range(0..n)]).collect();
            let inst = Instance::new(servers, requests);
            let run = run_perturbed(
                &inst,
                Algorithm::ModifiedDoubledHarmonic,
                1000 + trial,
                PdMode::Clamped,
                None,
            )
            .unwrap();
            let slack = inst.n() as f64 * run.epsilon + 1e-9;
            assert!(
                run.outer_cost <= run.inner_cost + slack,
                "trial {trial}: outer {} inner {}",
                run.outer_cost,
                run.inner_cost
            );
            assert!(run.outer_opt >= run.inner_opt - slack, "trial {trial}");
        }
    }

    #[test]
    fn combined_wrapper_handles_fully_general_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for trial in 0..40u64 {
            let groups = rng.random_range(2..=5usize);
            let mut servers = Vec::new();
            let mut base = 0.0;
            for _ in 0..groups {
                for _ in 0..rng.random_range(1..=3usize) {
                    servers.push(base);
                }
                base += rng.random_range(1..=5) as f64;
            }
            let n = servers.len();
            let span = base;
            let requests: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..span)).collect();
            let inst = Instance::new(servers, requests);
            let run = run_both(
                &inst,
                Algorithm::ModifiedDoubledHarmonic,
                3000 + trial,
                PdMode::Clamped,
                None,
            )
            .unwrap();
            // snapping-level accounting over the co-location wrapper
            assert!(
                run.outer_cost <= run.inner_cost + run.outer_opt + 1e-9,
                "trial {trial}: {run:?}"
            );
            assert!(run.outer_opt >= run.inner_opt / 2.0 - 1e-9, "trial {trial}");
        }
    }

    #[test]
    fn snapped_run_cost_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for trial in 0..50u64 {
            let n = rng.random_range(3..=10usize);
            let mut servers = vec![0.0];
            for _ in 1..n {
                let last = *servers.last().unwrap();
                servers.push(last + rng.random_range(1.0..5.0));
            }
            let span = *servers.last().unwrap();
            let requests: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..span + 1.0)).collect();
            let inst = Instance::new(servers, requests);
            let run = run_snapped(
                &inst,
                Algorithm::ModifiedDoubledHarmonic,
                2000 + trial,
                PdMode::Clamped,
            )
            .unwrap();
            assert!(
                run.outer_cost <= run.inner_cost + run.outer_opt + 1e-9,
                "trial {trial}"
            );
            assert!(run.outer_opt >= run.inner_opt / 2.0 - 1e-9, "trial {trial}");
        }
    }
}
