//! The modified doubled harmonic algorithm.
//!
//! Requests at an available server take it. Requests outside the hull of
//! the available servers take the nearest extreme one. A non-triggering
//! request strictly inside goes to the first available server on its left
//! in a left island, on its right in a right island, and in a stationary
//! island it picks a direction between its imaginary neighbors with
//! probability inversely proportional to the pseudo-distances and stops at
//! the first available server that way. A triggering request is served as
//! if it had arrived at a nearby boundary point where it would not have
//! been triggering (choosing the side by the rules below), and only then is
//! the estimate raised and the imaginary set rebuilt by re-simulating
//! doubled harmonic on the whole prefix.
//!
//! Every decision here is available in two forms: an exact distribution
//! over the (at most two) candidate servers, and a sampling step that draws
//! from that same distribution. After each non-triggering request the
//! imaginary server the underlying doubled harmonic reasoning would have
//! consumed is removed from the imaginary set.

use super::dh::{adjustment_operation, choose_imaginary_move, AdjustmentOutcome};
use super::pd::{neighbor_probs, point_to_server, PdMode};
use super::state::AlgoState;
use super::{AlgoError, AssignmentDistribution, CaseId};
use crate::islands::{classify_point, decompose_islands, IslandKind, IslandPartition};
use crate::matching::optimal_partial_cost;
use crate::rng::DrawSource;
use crate::trigger::{trigger_boundaries, TriggerContext};

/// Fully resolved behavior for a prospective request at one position:
/// the exact assignment distribution plus everything needed to trace it.
#[derive(Debug, Clone)]
pub(crate) struct MdhResolution {
    pub case: CaseId,
    pub distribution: AssignmentDistribution,
    pub was_trigger: bool,
    pub opt_with_request: f64,
    pub y_left: Option<f64>,
    pub y_right: Option<f64>,
    pub mimic: Option<f64>,
    pub islands: Option<IslandPartition>,
}

fn simple(case: CaseId, distribution: AssignmentDistribution, was_trigger: bool, opt: f64) -> MdhResolution {
    MdhResolution {
        case,
        distribution,
        was_trigger,
        opt_with_request: opt,
        y_left: None,
        y_right: None,
        mimic: None,
        islands: None,
    }
}

/// Probability that a request treated as non-triggering at `y` (strictly
/// between the available servers `h_left` and `h_right`, or at one of them)
/// is assigned to `h_right`.
fn nontrigger_right_prob(
    state: &AlgoState,
    y: f64,
    h_left: usize,
    h_right: usize,
    islands: &IslandPartition,
    mode: PdMode,
) -> Result<(f64, CaseId), AlgoError> {
    if y == state.position(h_right) {
        return Ok((1.0, CaseId::Case1));
    }
    if y == state.position(h_left) {
        return Ok((0.0, CaseId::Case1));
    }
    if let Some((slot, _)) = state.imaginary_at(y) {
        // an imaginary server exactly at y: a zero-length imaginary move
        // whose corrective direction points at its matched available server
        let partner = state.matching_partner(slot);
        let p = if state.position(partner) < y { 0.0 } else { 1.0 };
        return Ok((p, CaseId::Case4Colocated));
    }
    match classify_point(islands, y) {
        IslandKind::Left => Ok((0.0, CaseId::Case4Left)),
        IslandKind::Right => Ok((1.0, CaseId::Case4Right)),
        IslandKind::Stationary => {
            let (_, left_im) = state
                .first_imaginary_left(y)
                .ok_or(AlgoError::NoImaginaryServer)?;
            let (_, right_im) = state
                .first_imaginary_right(y)
                .ok_or(AlgoError::NoImaginaryServer)?;
            let z = state.estimate();
            let n = state.n();
            let pd_l = point_to_server(state.servers(), y, left_im, z, n, mode);
            let pd_r = point_to_server(state.servers(), y, right_im, z, n, mode);
            let (_, p_right) = neighbor_probs(pd_l, pd_r)?;
            Ok((p_right, CaseId::Case4Stationary))
        }
    }
}

/// Resolves the exact assignment behavior for a request at `x` without
/// consuming randomness or touching the state.
pub(crate) fn resolve(state: &AlgoState, x: f64, mode: PdMode) -> Result<MdhResolution, AlgoError> {
    if state.available().is_empty() {
        return Err(AlgoError::NoAvailableServer);
    }
    let mut with_request = state.requests().to_vec();
    with_request.push(x);
    let opt_with = optimal_partial_cost(&with_request, state.servers())?;

    if !state.initialized() {
        if let Some(server) = state.available_at(x) {
            return Ok(simple(
                CaseId::PreEstimate,
                AssignmentDistribution::certain(server),
                false,
                opt_with,
            ));
        }
        // instantiating arrival: the imaginary set coincides with the
        // available set, so the move lands directly on an available server
        if opt_with <= 0.0 {
            return Err(AlgoError::ZeroOptimalAtSetup);
        }
        let z = AlgoState::next_estimate(opt_with);
        let left = state.first_available_left(x);
        let right = state.first_available_right(x);
        let distribution = match (left, right) {
            (None, Some(r)) => AssignmentDistribution::certain(r),
            (Some(l), None) => AssignmentDistribution::certain(l),
            (Some(l), Some(r)) => {
                let n = state.n();
                let pd_l = point_to_server(state.servers(), x, l, z, n, mode);
                let pd_r = point_to_server(state.servers(), x, r, z, n, mode);
                let (_, p_right) = neighbor_probs(pd_l, pd_r)?;
                AssignmentDistribution::split(l, r, p_right)
            }
            (None, None) => unreachable!("available set is nonempty"),
        };
        return Ok(simple(CaseId::Init, distribution, true, opt_with));
    }

    let was_trigger = opt_with >= state.estimate();
    if let Some(server) = state.available_at(x) {
        return Ok(simple(
            CaseId::Case1,
            AssignmentDistribution::certain(server),
            was_trigger,
            opt_with,
        ));
    }
    let leftmost = state.available()[0];
    let rightmost = *state.available().last().unwrap();
    if x < state.position(leftmost) {
        return Ok(simple(
            CaseId::Case2,
            AssignmentDistribution::certain(leftmost),
            was_trigger,
            opt_with,
        ));
    }
    if x > state.position(rightmost) {
        return Ok(simple(
            CaseId::Case3,
            AssignmentDistribution::certain(rightmost),
            was_trigger,
            opt_with,
        ));
    }

    // strictly inside the hull, not on an available server
    let islands = decompose_islands(&state.imaginary_positions(), &state.available_positions())?;
    let h_left = state
        .first_available_left(x)
        .expect("inside the available hull");
    let h_right = state
        .first_available_right(x)
        .expect("inside the available hull");

    if !was_trigger {
        let (p_right, case) = nontrigger_right_prob(state, x, h_left, h_right, &islands, mode)?;
        return Ok(MdhResolution {
            case,
            distribution: AssignmentDistribution::split(h_left, h_right, p_right),
            was_trigger: false,
            opt_with_request: opt_with,
            y_left: None,
            y_right: None,
            mimic: None,
            islands: Some(islands),
        });
    }

    // triggering strictly inside: serve as a nearby non-trigger point would be
    let ctx = TriggerContext {
        prior_requests: state.requests(),
        servers: state.servers(),
        estimate: state.estimate(),
        left_available: state.position(h_left),
        right_available: state.position(h_right),
    };
    let (y_left, y_right) = trigger_boundaries(&ctx, x)?;
    let (p_left, _) = nontrigger_right_prob(state, y_left, h_left, h_right, &islands, mode)?;
    let (p_right, _) = nontrigger_right_prob(state, y_right, h_left, h_right, &islands, mode)?;
    let midpoint = ctx.midpoint();
    let (case, mimic, p) = if p_right < 0.5 {
        (CaseId::Case5A, y_right, p_right)
    } else if p_left > 0.5 {
        (CaseId::Case5B, y_left, p_left)
    } else if x < midpoint {
        (CaseId::Case5C, y_left, p_left)
    } else {
        (CaseId::Case5D, y_right, p_right)
    };
    Ok(MdhResolution {
        case,
        distribution: AssignmentDistribution::split(h_left, h_right, p),
        was_trigger: true,
        opt_with_request: opt_with,
        y_left: Some(y_left),
        y_right: Some(y_right),
        mimic: Some(mimic),
        islands: Some(islands),
    })
}

/// Exact probability over the servers [`mdh_step`] could assign a request
/// arriving at `x` to, computed analytically. Consumes no randomness.
pub fn mdh_next_distribution(
    state: &AlgoState,
    x: f64,
    mode: PdMode,
) -> Result<AssignmentDistribution, AlgoError> {
    resolve(state, x, mode).map(|r| r.distribution)
}

/// The imaginary server consumed by a non-triggering request: a co-located
/// imaginary server if one exists; in a left or right island the server the
/// underlying doubled harmonic move would pick; in a stationary island the
/// first imaginary server in the direction of the assignment (falling back
/// to the rank-matched partner when the request sat on the assigned server).
fn gamma_slot(
    state: &AlgoState,
    islands: &IslandPartition,
    x: f64,
    assigned: usize,
    mode: PdMode,
    draws: &mut dyn DrawSource,
) -> Result<usize, AlgoError> {
    if let Some((slot, _)) = state.imaginary_at(x) {
        return Ok(slot);
    }
    match classify_point(islands, x) {
        IslandKind::Left | IslandKind::Right => {
            match choose_imaginary_move(state, x, mode, draws) {
                Ok(mv) => Ok(mv.slot),
                // both neighbors infinitely far in pseudo-distance: the
                // weighted pick is undefined, but the imaginary set must
                // still shrink by a neighbor; take the nearer one
                Err(AlgoError::DisconnectedPseudoMetric) => {
                    let left = state.first_imaginary_left(x);
                    let right = state.first_imaginary_right(x);
                    match (left, right) {
                        (Some((ls, li)), Some((rs, ri))) => {
                            if x - state.position(li) <= state.position(ri) - x {
                                Ok(ls)
                            } else {
                                Ok(rs)
                            }
                        }
                        (Some((ls, _)), None) => Ok(ls),
                        (None, Some((rs, _))) => Ok(rs),
                        (None, None) => Err(AlgoError::NoImaginaryServer),
                    }
                }
                Err(e) => Err(e),
            }
        }
        IslandKind::Stationary => {
            let sigma = state.position(assigned);
            let directed = if sigma > x {
                state.first_imaginary_right(x)
            } else if sigma < x {
                state.first_imaginary_left(x)
            } else {
                let slot = state
                    .available()
                    .iter()
                    .position(|&i| i == assigned)
                    .expect("assigned server is available");
                return Ok(slot);
            };
            directed
                .or_else(|| {
                    if sigma > x {
                        state.first_imaginary_left(x)
                    } else {
                        state.first_imaginary_right(x)
                    }
                })
                .map(|(slot, _)| slot)
                .ok_or(AlgoError::NoImaginaryServer)
        }
    }
}

#[derive(Debug, Clone)]
pub struct MdhStep {
    pub assigned: usize,
    pub case: CaseId,
    pub was_trigger: bool,
    /// Position of the imaginary server removed for a non-triggering request.
    pub gamma: Option<f64>,
    /// Position of the imaginary neighbor drawn after a trigger's adjustment.
    pub trigger_imaginary: Option<f64>,
    pub y_left: Option<f64>,
    pub y_right: Option<f64>,
    pub mimic: Option<f64>,
    pub adjustment: Option<AdjustmentOutcome>,
    pub opt_after: f64,
}

/// Serves one request under modified doubled harmonic, mutating `state`.
pub fn mdh_step(
    state: &mut AlgoState,
    x: f64,
    mode: PdMode,
    draws: &mut dyn DrawSource,
) -> Result<MdhStep, AlgoError> {
    let res = resolve(state, x, mode)?;
    state.push_request(x);
    let t = state.requests().len();
    let assigned = res.distribution.sample(draws);

    let mut gamma = None;
    let mut trigger_imaginary = None;
    let mut adjustment = None;

    match res.case {
        CaseId::PreEstimate => {
            state.assign(assigned, x);
        }
        CaseId::Init => {
            state.set_estimate(AlgoState::next_estimate(res.opt_with_request));
            let imaginary_before: Vec<usize> = state.available().to_vec();
            adjustment = Some(AdjustmentOutcome {
                imaginary: imaginary_before.clone(),
                simulated_moves: state.requests()[..t - 1]
                    .iter()
                    .map(|&r| super::dh::SimulatedMove {
                        request: r,
                        imaginary_target: r,
                    })
                    .collect(),
            });
            let imaginary: Vec<usize> = imaginary_before
                .into_iter()
                .filter(|&i| i != assigned)
                .collect();
            state.assign(assigned, x);
            state.set_imaginary(imaginary);
            state.bump_phase();
            trigger_imaginary = Some(state.position(assigned));
        }
        _ if !res.was_trigger => {
            // non-triggering cases 1-4: consume the imaginary server the
            // doubled harmonic reasoning would have moved to
            let islands = match &res.islands {
                Some(p) => p.clone(),
                None => decompose_islands(
                    &state.imaginary_positions(),
                    &state.available_positions(),
                )?,
            };
            let slot = gamma_slot(state, &islands, x, assigned, mode, draws)?;
            let gamma_server = state.remove_imaginary_slot(slot);
            gamma = Some(state.position(gamma_server));
            state.assign(assigned, x);
        }
        _ => {
            // triggering cases 1, 2, 3 and 5: assign, then raise the
            // estimate and rebuild the imaginary set from a fresh simulation
            state.assign(assigned, x);
            state.set_estimate(AlgoState::next_estimate(res.opt_with_request));
            let adj = {
                let mut child = draws.child(t as u64);
                adjustment_operation(state.servers(), &state.requests()[..t], mode, child.as_mut())?
            };
            debug_assert_eq!(adj.imaginary.len(), state.available().len());
            state.set_imaginary(adj.imaginary.clone());
            state.bump_phase();
            adjustment = Some(adj);
            // ledger-only draw of the post-adjustment imaginary neighbor;
            // absent when the final request emptied the imaginary set or
            // the pseudo-metric is disconnected at x
            trigger_imaginary = choose_imaginary_move(state, x, mode, draws)
                .ok()
                .map(|mv| state.position(mv.server));
        }
    }

    state.set_opt_to_date(res.opt_with_request);
    Ok(MdhStep {
        assigned,
        case: res.case,
        was_trigger: res.was_trigger,
        gamma,
        trigger_imaginary,
        y_left: res.y_left,
        y_right: res.y_right,
        mimic: res.mimic,
        adjustment,
        opt_after: res.opt_with_request,
    })
}
