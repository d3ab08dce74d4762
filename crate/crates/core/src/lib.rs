#![forbid(unsafe_code)]

//! Online metric matching on the line.
//!
//! Servers sit at fixed points on the real line; requests arrive one at a
//! time and each must be irrevocably assigned to a free server, paying the
//! distance between them. This crate implements the modified doubled
//! harmonic algorithm together with the greedy, harmonic and doubled
//! harmonic baselines, the island decomposition and trigger machinery they
//! rest on, exact per-request assignment distributions, wrappers that lift
//! the co-located-server and on-server-request assumptions, an executable
//! verification battery for the structural properties the algorithms are
//! designed around, and an experiment harness for empirical competitive
//! ratios.

pub mod algo;
pub mod harness;
pub mod instance;
pub mod islands;
pub mod matching;
pub mod reductions;
pub mod rng;
pub mod trigger;
pub mod verify;

pub use algo::dh::{adjustment_operation, dh_step, AdjustmentOutcome, SimulatedMove};
pub use algo::mdh::{mdh_next_distribution, mdh_step, MdhStep};
pub use algo::pd::{neighbor_probs, point_to_server, pseudo_distance, PdMode};
pub use algo::runner::{
    greedy_step, harmonic_step, mdh_state_after_prefix, run, run_with_mode, Algorithm, Edge,
    PhaseLedger, RunTranscript, StepTrace,
};
pub use algo::state::{AlgoState, Assignment};
pub use algo::{AlgoError, AssignmentDistribution, CaseId};
pub use instance::{validate_instance, Instance, InstanceError, ValidatedInstance};
pub use islands::{classify_point, decompose_islands, IslandKind, IslandPartition};
pub use matching::{
    brute_force_matching, dpq_bound_check, optimal_matching_cost, optimal_partial_cost,
    partial_opt_table, MatchingError, MatchingResult, PartialOptTable,
};
pub use trigger::{
    is_trigger_point, linear_map, normalized_cost, trigger_boundaries, trigger_intervals,
    TriggerContext, TriggerError,
};
