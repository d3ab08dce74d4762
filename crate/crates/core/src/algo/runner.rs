//! Drives a full online run over an instance and records a transcript:
//! per-request traces, the per-phase ledger of assigned edges, imaginary
//! moves and simulated assignments, and the running potential.

use serde::{Deserialize, Serialize};

use super::dh::dh_step;
use super::mdh::mdh_step;
use super::pd::PdMode;
use super::state::AlgoState;
use super::{AlgoError, CaseId};
use crate::instance::ValidatedInstance;
use crate::matching::optimal_partial_cost;
use crate::rng::{DrawSource, SeededDraws};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Greedy,
    Harmonic,
    #[serde(alias = "dh")]
    DoubledHarmonic,
    #[serde(alias = "mdh")]
    ModifiedDoubledHarmonic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Greedy,
        Algorithm::Harmonic,
        Algorithm::DoubledHarmonic,
        Algorithm::ModifiedDoubledHarmonic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Harmonic => "harmonic",
            Algorithm::DoubledHarmonic => "dh",
            Algorithm::ModifiedDoubledHarmonic => "mdh",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "greedy" => Ok(Algorithm::Greedy),
            "harmonic" => Ok(Algorithm::Harmonic),
            "dh" | "doubled-harmonic" => Ok(Algorithm::DoubledHarmonic),
            "mdh" | "modified-doubled-harmonic" => Ok(Algorithm::ModifiedDoubledHarmonic),
            other => Err(format!(
                "unknown algorithm '{other}' (expected greedy, harmonic, dh, or mdh)"
            )),
        }
    }
}

/// Nearest available server, ties broken towards the left.
pub fn greedy_step(state: &AlgoState, x: f64) -> Result<usize, AlgoError> {
    state.nearest_available(x).ok_or(AlgoError::NoAvailableServer)
}

/// The harmonic rule: a request at an available server takes it; otherwise
/// it picks the first available server on its left or right with
/// probability inversely proportional to the plain distances.
pub fn harmonic_step(
    state: &AlgoState,
    x: f64,
    draws: &mut dyn DrawSource,
) -> Result<usize, AlgoError> {
    if let Some(server) = state.available_at(x) {
        return Ok(server);
    }
    let left = state.first_available_left(x);
    let right = state.first_available_right(x);
    match (left, right) {
        (None, Some(r)) => Ok(r),
        (Some(l), None) => Ok(l),
        (Some(l), Some(r)) => {
            let d_left = x - state.position(l);
            let d_right = state.position(r) - x;
            let p_right = d_left / (d_left + d_right);
            Ok(if draws.choose_right(p_right) { r } else { l })
        }
        (None, None) => Err(AlgoError::NoAvailableServer),
    }
}

/// An assigned or imagined edge, as positions on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub request: f64,
    pub server: f64,
}

impl Edge {
    pub fn length(&self) -> f64 {
        (self.request - self.server).abs()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepTrace {
    pub index: usize,
    pub request: f64,
    /// Phase the request arrived in (triggers close their phase).
    pub phase: usize,
    pub case: CaseId,
    pub assigned_server: usize,
    pub assigned_position: f64,
    pub cost: f64,
    pub was_trigger: bool,
    pub estimate_before: f64,
    pub estimate_after: f64,
    pub opt_after: f64,
    /// Imaginary move target (doubled harmonic) or consumed imaginary
    /// server (modified doubled harmonic).
    pub imaginary_choice: Option<f64>,
    /// Corrective move target (doubled harmonic only).
    pub corrective_target: Option<f64>,
    /// Imaginary neighbor drawn for a trigger after its adjustment.
    pub trigger_imaginary: Option<f64>,
    pub y_left: Option<f64>,
    pub y_right: Option<f64>,
    pub mimic_point: Option<f64>,
    /// Optimal matching cost between available and imaginary servers at arrival.
    pub matching_cost_before: Option<f64>,
    /// Running potential at arrival: matching cost plus the accumulated
    /// (assigned minus imaginary) cost differences within the phase.
    pub potential_before: Option<f64>,
    /// Draws consumed from the run's primary stream by this step.
    pub draws: u64,
}

/// Ledger of one phase: the requests served under one estimate value, the
/// trigger that closed it, and the simulated assignments of the adjustment
/// that trigger ran.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseLedger {
    pub index: usize,
    pub estimate: f64,
    /// Largest request count whose optimal cost stays below the estimate.
    pub tau: Option<u64>,
    pub assigned_edges: Vec<Edge>,
    pub imaginary_moves: Vec<Edge>,
    pub trigger_edge: Option<Edge>,
    pub trigger_imaginary_move: Option<Edge>,
    pub simulated_assignments: Vec<Edge>,
    pub assigned_total: f64,
    pub imaginary_total: f64,
    pub simulated_total: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTranscript {
    pub algorithm: String,
    pub pd_mode: String,
    pub seed: u64,
    pub servers: Vec<f64>,
    pub requests: Vec<f64>,
    pub steps: Vec<StepTrace>,
    pub phases: Vec<PhaseLedger>,
    pub total_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
}

impl RunTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialization cannot fail")
    }
}

/// Runs `algorithm` over the instance's request sequence with the given
/// seed. Deterministic: identical inputs produce identical transcripts.
pub fn run(
    instance: &ValidatedInstance,
    algorithm: Algorithm,
    seed: u64,
) -> Result<RunTranscript, AlgoError> {
    run_with_mode(instance, algorithm, seed, PdMode::Clamped)
}

pub fn run_with_mode(
    instance: &ValidatedInstance,
    algorithm: Algorithm,
    seed: u64,
    mode: PdMode,
) -> Result<RunTranscript, AlgoError> {
    let mut state = AlgoState::new(instance.servers().to_vec());
    let mut draws = SeededDraws::new(seed);
    let mut steps: Vec<StepTrace> = Vec::with_capacity(instance.requests().len());
    // simulated assignments of the adjustment closing each phase
    let mut phase_adjustments: Vec<(usize, Vec<Edge>)> = Vec::new();
    let mut phase_estimates: Vec<f64> = vec![1.0];
    let mut phase_delta = 0.0;

    for (index, &x) in instance.requests().iter().enumerate() {
        let draws_before = draws.draws();
        let phase_before = state.phase();
        let estimate_before = state.estimate();
        let (matching_cost_before, potential_before) = if state.initialized() {
            let d = state.matching_cost();
            (Some(d), Some(d + phase_delta))
        } else {
            (None, None)
        };

        let trace = match algorithm {
            Algorithm::Greedy => {
                let server = greedy_step(&state, x)?;
                state.push_request(x);
                state.assign(server, x);
                let opt_after = optimal_partial_cost(state.requests(), state.servers())?;
                state.set_opt_to_date(opt_after);
                bare_trace(&state, index, x, CaseId::Greedy, server, opt_after)
            }
            Algorithm::Harmonic => {
                let server = harmonic_step(&state, x, &mut draws)?;
                state.push_request(x);
                state.assign(server, x);
                let opt_after = optimal_partial_cost(state.requests(), state.servers())?;
                state.set_opt_to_date(opt_after);
                bare_trace(&state, index, x, CaseId::Harmonic, server, opt_after)
            }
            Algorithm::DoubledHarmonic => {
                let step = dh_step(&mut state, x, mode, &mut draws)?;
                if let Some(adj) = &step.adjustment {
                    let edges = adj
                        .simulated_moves
                        .iter()
                        .map(|m| Edge {
                            request: m.request,
                            server: m.imaginary_target,
                        })
                        .collect();
                    phase_adjustments.push((phase_before, edges));
                }
                StepTrace {
                    index,
                    request: x,
                    phase: phase_before,
                    case: step.case,
                    assigned_server: step.assigned,
                    assigned_position: state.position(step.assigned),
                    cost: (state.position(step.assigned) - x).abs(),
                    was_trigger: step.was_trigger,
                    estimate_before,
                    estimate_after: state.estimate(),
                    opt_after: step.opt_after,
                    imaginary_choice: step.imaginary_choice,
                    corrective_target: step.corrective_target,
                    trigger_imaginary: if step.was_trigger {
                        step.imaginary_choice
                    } else {
                        None
                    },
                    y_left: None,
                    y_right: None,
                    mimic_point: None,
                    matching_cost_before,
                    potential_before,
                    draws: 0,
                }
            }
            Algorithm::ModifiedDoubledHarmonic => {
                let step = mdh_step(&mut state, x, mode, &mut draws)?;
                if let Some(adj) = &step.adjustment {
                    let edges = adj
                        .simulated_moves
                        .iter()
                        .map(|m| Edge {
                            request: m.request,
                            server: m.imaginary_target,
                        })
                        .collect();
                    phase_adjustments.push((phase_before, edges));
                }
                StepTrace {
                    index,
                    request: x,
                    phase: phase_before,
                    case: step.case,
                    assigned_server: step.assigned,
                    assigned_position: state.position(step.assigned),
                    cost: (state.position(step.assigned) - x).abs(),
                    was_trigger: step.was_trigger,
                    estimate_before,
                    estimate_after: state.estimate(),
                    opt_after: step.opt_after,
                    imaginary_choice: step.gamma,
                    corrective_target: None,
                    trigger_imaginary: step.trigger_imaginary,
                    y_left: step.y_left,
                    y_right: step.y_right,
                    mimic_point: step.mimic,
                    matching_cost_before,
                    potential_before,
                    draws: 0,
                }
            }
        };

        let mut trace = trace;
        trace.draws = draws.draws() - draws_before;

        if trace.was_trigger {
            phase_delta = 0.0;
            phase_estimates.push(state.estimate());
        } else if let Some(gamma) = trace.imaginary_choice {
            phase_delta += trace.cost - (x - gamma).abs();
        }
        steps.push(trace);
    }

    let opt_cost = optimal_partial_cost(instance.requests(), instance.servers())?;
    let total_cost = state.total_cost();
    let ratio = if opt_cost > 0.0 { total_cost / opt_cost } else { 1.0 };

    let phases = match algorithm {
        Algorithm::Greedy | Algorithm::Harmonic => Vec::new(),
        _ => build_ledger(&steps, &phase_estimates, &phase_adjustments),
    };

    Ok(RunTranscript {
        algorithm: algorithm.as_str().to_string(),
        pd_mode: mode.as_str().to_string(),
        seed,
        servers: instance.servers().to_vec(),
        requests: instance.requests().to_vec(),
        steps,
        phases,
        total_cost,
        opt_cost,
        ratio,
    })
}

fn bare_trace(
    state: &AlgoState,
    index: usize,
    x: f64,
    case: CaseId,
    server: usize,
    opt_after: f64,
) -> StepTrace {
    StepTrace {
        index,
        request: x,
        phase: 0,
        case,
        assigned_server: server,
        assigned_position: state.position(server),
        cost: (state.position(server) - x).abs(),
        was_trigger: false,
        estimate_before: 1.0,
        estimate_after: 1.0,
        opt_after,
        imaginary_choice: None,
        corrective_target: None,
        trigger_imaginary: None,
        y_left: None,
        y_right: None,
        mimic_point: None,
        matching_cost_before: None,
        potential_before: None,
        draws: 0,
    }
}

fn build_ledger(
    steps: &[StepTrace],
    phase_estimates: &[f64],
    phase_adjustments: &[(usize, Vec<Edge>)],
) -> Vec<PhaseLedger> {
    let phase_count = steps.last().map(|s| s.phase + 1).unwrap_or(1);
    let mut ledger: Vec<PhaseLedger> = (0..phase_count)
        .map(|index| {
            let estimate = phase_estimates.get(index).copied().unwrap_or(1.0);
            let tau = steps
                .iter()
                .rev()
                .find(|s| s.opt_after < estimate)
                .map(|s| s.index as u64 + 1);
            PhaseLedger {
                index,
                estimate,
                tau,
                assigned_edges: Vec::new(),
                imaginary_moves: Vec::new(),
                trigger_edge: None,
                trigger_imaginary_move: None,
                simulated_assignments: Vec::new(),
                assigned_total: 0.0,
                imaginary_total: 0.0,
                simulated_total: 0.0,
            }
        })
        .collect();

    for step in steps {
        let entry = &mut ledger[step.phase];
        let edge = Edge {
            request: step.request,
            server: step.assigned_position,
        };
        if step.was_trigger {
            entry.trigger_edge = Some(edge);
            entry.trigger_imaginary_move = step.trigger_imaginary.map(|pos| Edge {
                request: step.request,
                server: pos,
            });
        } else {
            entry.assigned_edges.push(edge);
            if let Some(gamma) = step.imaginary_choice {
                entry.imaginary_moves.push(Edge {
                    request: step.request,
                    server: gamma,
                });
            }
        }
    }
    for (phase, edges) in phase_adjustments {
        ledger[*phase].simulated_assignments = edges.clone();
    }
    for entry in &mut ledger {
        entry.assigned_total = entry.assigned_edges.iter().map(Edge::length).sum();
        entry.imaginary_total = entry.imaginary_moves.iter().map(Edge::length).sum();
        entry.simulated_total = entry.simulated_assignments.iter().map(Edge::length).sum();
    }
    ledger
}

/// Minimal stepping facade over one algorithm: serve requests one at a
/// time and get back the assigned server index. Used by the reduction
/// wrappers, which must interleave their own bookkeeping with the run.
pub struct OnlineRunner {
    state: AlgoState,
    algorithm: Algorithm,
    mode: PdMode,
    draws: SeededDraws,
}

impl OnlineRunner {
    pub fn new(sorted_servers: Vec<f64>, algorithm: Algorithm, seed: u64, mode: PdMode) -> Self {
        OnlineRunner {
            state: AlgoState::new(sorted_servers),
            algorithm,
            mode,
            draws: SeededDraws::new(seed),
        }
    }

    pub fn state(&self) -> &AlgoState {
        &self.state
    }

    /// Serves one request, returning the index of the assigned server.
    pub fn serve(&mut self, x: f64) -> Result<usize, AlgoError> {
        match self.algorithm {
            Algorithm::Greedy => {
                let server = greedy_step(&self.state, x)?;
                self.state.push_request(x);
                self.state.assign(server, x);
                Ok(server)
            }
            Algorithm::Harmonic => {
                let server = harmonic_step(&self.state, x, &mut self.draws)?;
                self.state.push_request(x);
                self.state.assign(server, x);
                Ok(server)
            }
            Algorithm::DoubledHarmonic => {
                Ok(dh_step(&mut self.state, x, self.mode, &mut self.draws)?.assigned)
            }
            Algorithm::ModifiedDoubledHarmonic => {
                Ok(mdh_step(&mut self.state, x, self.mode, &mut self.draws)?.assigned)
            }
        }
    }

    pub fn total_cost(&self) -> f64 {
        self.state.total_cost()
    }
}

/// Runs modified doubled harmonic over the first `prefix` requests and
/// returns the live state, for inspecting reachable configurations.
pub fn mdh_state_after_prefix(
    instance: &ValidatedInstance,
    seed: u64,
    prefix: usize,
    mode: PdMode,
) -> Result<AlgoState, AlgoError> {
    let mut state = AlgoState::new(instance.servers().to_vec());
    let mut draws = SeededDraws::new(seed);
    for &x in instance.requests().iter().take(prefix) {
        mdh_step(&mut state, x, mode, &mut draws)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate_instance, Instance};

    fn small_instance() -> ValidatedInstance {
        let inst = Instance::new(vec![0.0, 4.0, 11.0, 31.0], vec![4.0, 4.0, 4.0, 0.0]);
        validate_instance(&inst, false).unwrap().0
    }

    #[test]
    fn zero_cost_run_has_ratio_one() {
        let inst = Instance::new(vec![0.0, 5.0, 10.0], vec![5.0, 0.0, 10.0]);
        let v = validate_instance(&inst, false).unwrap().0;
        for algo in Algorithm::ALL {
            let tr = run(&v, algo, 3).unwrap();
            assert_eq!(tr.total_cost, 0.0, "{algo}");
            assert_eq!(tr.opt_cost, 0.0);
            assert_eq!(tr.ratio, 1.0);
            assert!(tr.phases.iter().all(|p| p.trigger_edge.is_none()));
        }
    }

    #[test]
    fn greedy_picks_nearest_and_ties_left() {
        let state = AlgoState::new(vec![0.0, 11.0]);
        assert_eq!(greedy_step(&state, 4.0).unwrap(), 0); // 4 < 7
        assert_eq!(greedy_step(&state, 11.0).unwrap(), 1); // at a server
        assert_eq!(greedy_step(&state, 5.5).unwrap(), 0); // exact midpoint
        let inst = Instance::new(vec![0.0, 11.0], vec![5.5, 4.0]);
        let v = validate_instance(&inst, false).unwrap().0;
        let tr = run(&v, Algorithm::Greedy, 0).unwrap();
        assert_eq!(tr.steps[0].assigned_server, 0);
    }

    #[test]
    fn transcripts_are_deterministic() {
        let inst = small_instance();
        for algo in Algorithm::ALL {
            let a = run(&inst, algo, 42).unwrap().to_json();
            let b = run(&inst, algo, 42).unwrap().to_json();
            assert_eq!(a, b, "{algo}");
        }
    }

    #[test]
    fn online_cost_dominates_opt() {
        let inst = small_instance();
        for algo in Algorithm::ALL {
            for seed in 0..20 {
                let tr = run(&inst, algo, seed).unwrap();
                assert!(tr.total_cost >= tr.opt_cost - 1e-9, "{algo} seed {seed}");
            }
        }
    }

    #[test]
    fn ledger_accounts_every_step() {
        let inst = small_instance();
        let tr = run(&inst, Algorithm::ModifiedDoubledHarmonic, 12).unwrap();
        let in_ledger: usize = tr
            .phases
            .iter()
            .map(|p| p.assigned_edges.len() + p.trigger_edge.is_some() as usize)
            .sum();
        assert_eq!(in_ledger, tr.steps.len());
        let ledger_cost: f64 = tr
            .phases
            .iter()
            .map(|p| {
                p.assigned_total + p.trigger_edge.map(|e| e.length()).unwrap_or(0.0)
            })
            .sum();
        assert!((ledger_cost - tr.total_cost).abs() < 1e-9);
    }
}
