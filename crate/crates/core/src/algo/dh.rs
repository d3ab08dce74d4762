//! The doubled harmonic algorithm.
//!
//! Requests are served at their own location while one is available. The
//! first arrival at a location without an available server instantiates the
//! estimate and the imaginary server set. From then on each request makes
//! an imaginary move (to a co-located imaginary server, the only side with
//! imaginary servers, or a pseudo-distance-weighted random neighbor) and
//! then a corrective move to the available server matched to it. A request
//! that pushes the optimal cost to date past the estimate first raises the
//! estimate and rebuilds the imaginary set by re-simulating the algorithm
//! from scratch on the preceding requests with fresh randomness.

use serde::{Deserialize, Serialize};

use super::pd::{neighbor_probs, point_to_server, PdMode};
use super::state::AlgoState;
use super::{AlgoError, CaseId};
use crate::matching::optimal_partial_cost;
use crate::rng::DrawSource;

/// Result of selecting an imaginary server for a request at `x`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MoveChoice {
    pub slot: usize,
    pub server: usize,
    pub case: CaseId,
}

/// The imaginary-move rule: co-located imaginary server first, then the
/// forced one-sided moves, then the randomized neighbor choice.
pub(crate) fn choose_imaginary_move(
    state: &AlgoState,
    x: f64,
    mode: PdMode,
    draws: &mut dyn DrawSource,
) -> Result<MoveChoice, AlgoError> {
    if let Some((slot, server)) = state.imaginary_at(x) {
        return Ok(MoveChoice {
            slot,
            server,
            case: CaseId::DhColocated,
        });
    }
    let left = state.first_imaginary_left(x);
    let right = state.first_imaginary_right(x);
    match (left, right) {
        (None, Some((slot, server))) => Ok(MoveChoice {
            slot,
            server,
            case: CaseId::DhForcedRight,
        }),
        (Some((slot, server)), None) => Ok(MoveChoice {
            slot,
            server,
            case: CaseId::DhForcedLeft,
        }),
        (Some((ls, li)), Some((rs, ri))) => {
            let n = state.n();
            let z = state.estimate();
            let pd_l = point_to_server(state.servers(), x, li, z, n, mode);
            let pd_r = point_to_server(state.servers(), x, ri, z, n, mode);
            let (_, p_right) = neighbor_probs(pd_l, pd_r)?;
            let (slot, server) = if draws.choose_right(p_right) {
                (rs, ri)
            } else {
                (ls, li)
            };
            Ok(MoveChoice {
                slot,
                server,
                case: CaseId::DhDraw,
            })
        }
        (None, None) => Err(AlgoError::NoImaginaryServer),
    }
}

/// One simulated request inside an adjustment: the imaginary server it
/// moved to (its own location for requests served before the estimate
/// existed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulatedMove {
    pub request: f64,
    pub imaginary_target: f64,
}

/// Output of re-simulating the algorithm on a request prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentOutcome {
    /// Servers free at the end of the simulation, ascending.
    pub imaginary: Vec<usize>,
    pub simulated_moves: Vec<SimulatedMove>,
}

/// Simulates doubled harmonic from scratch on `prefix` with its own evolving
/// estimate, drawing from `draws`. The caller's imaginary set becomes the
/// servers free at the end of the simulation; the sorted-order matching to
/// the caller's available servers is implicit.
pub fn adjustment_operation(
    servers: &[f64],
    prefix: &[f64],
    mode: PdMode,
    draws: &mut dyn DrawSource,
) -> Result<AdjustmentOutcome, AlgoError> {
    let mut sim = AlgoState::new(servers.to_vec());
    let mut simulated_moves = Vec::with_capacity(prefix.len());
    for &r in prefix {
        let step = dh_step(&mut sim, r, mode, draws)?;
        simulated_moves.push(SimulatedMove {
            request: r,
            imaginary_target: step.imaginary_choice.unwrap_or(r),
        });
    }
    Ok(AdjustmentOutcome {
        imaginary: sim.available().to_vec(),
        simulated_moves,
    })
}

#[derive(Debug, Clone)]
pub struct DhStep {
    pub assigned: usize,
    pub case: CaseId,
    pub was_trigger: bool,
    /// Position of the imaginary server the request moved to.
    pub imaginary_choice: Option<f64>,
    /// Position of the matched available server it was corrected to.
    pub corrective_target: Option<f64>,
    pub adjustment: Option<AdjustmentOutcome>,
    pub opt_after: f64,
}

/// Serves one request under doubled harmonic, mutating `state`.
pub fn dh_step(
    state: &mut AlgoState,
    x: f64,
    mode: PdMode,
    draws: &mut dyn DrawSource,
) -> Result<DhStep, AlgoError> {
    if state.available().is_empty() {
        return Err(AlgoError::NoAvailableServer);
    }
    state.push_request(x);
    let t = state.requests().len();
    let opt_after = optimal_partial_cost(state.requests(), state.servers())?;

    if !state.initialized() {
        if let Some(server) = state.available_at(x) {
            state.assign(server, x);
            state.set_opt_to_date(opt_after);
            return Ok(DhStep {
                assigned: server,
                case: CaseId::PreEstimate,
                was_trigger: false,
                imaginary_choice: None,
                corrective_target: None,
                adjustment: None,
                opt_after,
            });
        }
        if opt_after <= 0.0 {
            return Err(AlgoError::ZeroOptimalAtSetup);
        }
        state.set_estimate(AlgoState::next_estimate(opt_after));
        state.set_imaginary(state.available().to_vec());
        state.bump_phase();
        let adjustment = AdjustmentOutcome {
            imaginary: state.available().to_vec(),
            simulated_moves: state.requests()[..t - 1]
                .iter()
                .map(|&r| SimulatedMove {
                    request: r,
                    imaginary_target: r,
                })
                .collect(),
        };
        let mv = choose_imaginary_move(state, x, mode, draws)?;
        let partner = state.matching_partner(mv.slot);
        state.remove_imaginary_slot(mv.slot);
        state.assign(partner, x);
        state.set_opt_to_date(opt_after);
        return Ok(DhStep {
            assigned: partner,
            case: CaseId::Init,
            was_trigger: true,
            imaginary_choice: Some(state.position(mv.server)),
            corrective_target: Some(state.position(partner)),
            adjustment: Some(adjustment),
            opt_after,
        });
    }

    let was_trigger = opt_after >= state.estimate();
    let mut adjustment = None;
    if was_trigger {
        state.set_estimate(AlgoState::next_estimate(opt_after));
        let mut child = draws.child(t as u64);
        let adj = adjustment_operation(
            state.servers(),
            &state.requests()[..t - 1],
            mode,
            child.as_mut(),
        )?;
        drop(child);
        debug_assert_eq!(adj.imaginary.len(), state.available().len());
        state.set_imaginary(adj.imaginary.clone());
        state.bump_phase();
        adjustment = Some(adj);
    }

    let mv = choose_imaginary_move(state, x, mode, draws)?;
    let partner = state.matching_partner(mv.slot);
    state.remove_imaginary_slot(mv.slot);
    state.assign(partner, x);
    state.set_opt_to_date(opt_after);
    Ok(DhStep {
        assigned: partner,
        case: mv.case,
        was_trigger,
        imaginary_choice: Some(state.position(mv.server)),
        corrective_target: Some(state.position(partner)),
        adjustment,
        opt_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{enumerate_branches, SeededDraws};

    fn counterexample_servers() -> Vec<f64> {
        vec![0.0, 4.0, 11.0, 31.0]
    }

    #[test]
    fn pre_estimate_requests_take_their_server() {
        let mut state = AlgoState::new(counterexample_servers());
        let mut draws = SeededDraws::new(0);
        let step = dh_step(&mut state, 4.0, PdMode::Clamped, &mut draws).unwrap();
        assert_eq!(step.assigned, 1);
        assert_eq!(step.case, CaseId::PreEstimate);
        assert!(!state.initialized());
        assert_eq!(state.estimate(), 1.0);
    }

    #[test]
    fn first_blocked_arrival_instantiates_the_estimate() {
        // r_1 and r_2 at the second server: the estimate becomes 10 and the
        // imaginary move weighs gaps 4 and 7, going left with probability 7/11.
        let mut state = AlgoState::new(counterexample_servers());
        let mut draws = SeededDraws::new(0);
        dh_step(&mut state, 4.0, PdMode::Clamped, &mut draws).unwrap();
        let leaves = enumerate_branches(|tape| {
            let mut s = state.clone();
            let step = dh_step(&mut s, 4.0, PdMode::Clamped, tape).unwrap();
            (step.assigned, s.estimate())
        });
        assert_eq!(leaves.len(), 2);
        for leaf in &leaves {
            assert_eq!(leaf.outcome.1, 10.0);
            let expect = if leaf.outcome.0 == 0 { 7.0 / 11.0 } else { 4.0 / 11.0 };
            assert!((leaf.probability - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn adjustment_after_single_request_frees_the_rest() {
        let servers = counterexample_servers();
        let mut draws = SeededDraws::new(5);
        let adj = adjustment_operation(&servers, &[4.0], PdMode::Clamped, &mut draws).unwrap();
        assert_eq!(adj.imaginary, vec![0, 2, 3]);
        assert_eq!(adj.simulated_moves.len(), 1);
        assert_eq!(adj.simulated_moves[0].imaginary_target, 4.0);
    }

    #[test]
    fn adjustment_distribution_matches_branch_enumeration() {
        // simulating [4, 4] on the counterexample servers: r_1 takes the server at
        // 4, r_2 instantiates z = 10 and moves left w.p. 7/11, right w.p. 4/11
        let servers = counterexample_servers();
        let leaves = enumerate_branches(|tape| {
            adjustment_operation(&servers, &[4.0, 4.0], PdMode::Clamped, tape)
                .unwrap()
                .imaginary
        });
        assert_eq!(leaves.len(), 2);
        let p_of = |free: &[usize]| {
            leaves
                .iter()
                .filter(|l| l.outcome == free)
                .map(|l| l.probability)
                .sum::<f64>()
        };
        // left branch: r_2 ends on server 0, so 2 and 3 stay free
        assert!((p_of(&[2, 3]) - 7.0 / 11.0).abs() < 1e-12);
        // right branch: r_2 ends on server 2 (position 11)
        assert!((p_of(&[0, 3]) - 4.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn determinism_per_seed() {
        let servers = counterexample_servers();
        let run = |seed: u64| {
            let mut state = AlgoState::new(servers.clone());
            let mut draws = SeededDraws::new(seed);
            let mut picks = Vec::new();
            for &r in &[4.0, 4.0, 4.0, 0.0] {
                picks.push(dh_step(&mut state, r, PdMode::Clamped, &mut draws).unwrap().assigned);
            }
            picks
        };
        assert_eq!(run(9), run(9));
    }
}
