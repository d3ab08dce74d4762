//! Executable checks for the structural properties the algorithms are
//! built around: monotone assignment probabilities, the non-increasing
//! within-phase potential, the normalized-cost facts, the matching oracles,
//! the reduction inequalities, and the four-server instance on which the
//! unmodified doubled harmonic rule fails to be monotone.

use serde::{Deserialize, Serialize};

use crate::algo::dh::dh_step;
use crate::algo::mdh::mdh_next_distribution;
use crate::algo::pd::PdMode;
use crate::algo::runner::{mdh_state_after_prefix, run_with_mode, Algorithm, RunTranscript};
use crate::algo::state::AlgoState;
use crate::algo::AlgoError;
use crate::harness::{generate_instance, GeneratorKind};
use crate::instance::{validate_instance, Instance};
use crate::matching::{
    brute_force_matching, brute_force_partial_cost, dpq_bound_check, optimal_matching_cost,
    optimal_partial_cost,
};
use crate::reductions::{run_perturbed, run_snapped};
use crate::rng::{enumerate_branches, mix_seed, SeededDraws};
use crate::trigger::{normalized_cost, trigger_intervals, TriggerContext};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Outcome of one check: how many samples ran, how many violated the
/// property (each violation carries a description in `details`), and the
/// smallest slack observed before violation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: u64,
    pub violations: u64,
    pub worst_margin: f64,
    pub details: Vec<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            trials: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            details: Vec::new(),
        }
    }

    fn observe(&mut self, margin: f64, describe: impl FnOnce() -> String) {
        if margin < self.worst_margin {
            self.worst_margin = margin;
        }
        if margin < 0.0 {
            self.violations += 1;
            self.details.push(describe());
        }
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Normalized-cost facts: for `alpha, beta, gamma` in the unit interval,
/// (a) `alpha <= beta`, `gamma <= 1/2` implies `N(alpha, gamma) <= N(beta, gamma)`;
/// (b) the mirrored statement; (c) `beta <= alpha <= 1/2`, `gamma <= 1/2`
/// implies `N(alpha, gamma) <= 2 max(alpha, N(beta, gamma))`; (d) mirrored.
pub fn check_n_facts(samples: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("n_facts");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-12;
    let unit = |rng: &mut ChaCha8Rng| rng.random::<f64>();
    for _ in 0..samples {
        // (a)
        let (u, v) = (unit(&mut rng), unit(&mut rng));
        let (alpha, beta) = (u.min(v), u.max(v));
        let gamma = unit(&mut rng) * 0.5;
        let lhs = normalized_cost(alpha, gamma).unwrap();
        let rhs = normalized_cost(beta, gamma).unwrap();
        report.trials += 1;
        report.observe(rhs - lhs + tol, || {
            format!("fact (a): N({alpha}, {gamma}) = {lhs} > N({beta}, {gamma}) = {rhs}")
        });

        // (b)
        let (u, v) = (unit(&mut rng), unit(&mut rng));
        let (beta, alpha) = (u.min(v), u.max(v));
        let gamma = 0.5 + unit(&mut rng) * 0.5;
        let lhs = normalized_cost(alpha, gamma).unwrap();
        let rhs = normalized_cost(beta, gamma).unwrap();
        report.trials += 1;
        report.observe(rhs - lhs + tol, || {
            format!("fact (b): N({alpha}, {gamma}) = {lhs} > N({beta}, {gamma}) = {rhs}")
        });

        // (c)
        let (u, v) = (unit(&mut rng) * 0.5, unit(&mut rng) * 0.5);
        let (beta, alpha) = (u.min(v), u.max(v));
        let gamma = unit(&mut rng) * 0.5;
        let lhs = normalized_cost(alpha, gamma).unwrap();
        let bound = 2.0 * alpha.max(normalized_cost(beta, gamma).unwrap());
        report.trials += 1;
        report.observe(bound - lhs + tol, || {
            format!("fact (c): N({alpha}, {gamma}) = {lhs} > {bound}")
        });

        // (d)
        let (u, v) = (0.5 + unit(&mut rng) * 0.5, 0.5 + unit(&mut rng) * 0.5);
        let (alpha, beta) = (u.min(v), u.max(v));
        let gamma = 0.5 + unit(&mut rng) * 0.5;
        let lhs = normalized_cost(alpha, gamma).unwrap();
        let bound = 2.0 * (1.0 - alpha).max(normalized_cost(beta, gamma).unwrap());
        report.trials += 1;
        report.observe(bound - lhs + tol, || {
            format!("fact (d): N({alpha}, {gamma}) = {lhs} > {bound}")
        });
    }
    report
}

/// Sorted pairing vs permutation brute force, the partial DP vs exhaustive
/// injections, and the deletion bound, each over `trials` random inputs.
pub fn check_matching_oracles(trials: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("matching_oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..trials {
        let len = rng.random_range(1..=8usize);
        let p: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
        let q: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
        let fast = optimal_matching_cost(&p, &q).unwrap().cost;
        let slow = brute_force_matching(&p, &q).unwrap().cost;
        report.trials += 1;
        report.observe(1e-12 - (fast - slow).abs(), || {
            format!("sorted pairing {fast} != brute force {slow} on p={p:?} q={q:?}")
        });
    }

    for _ in 0..trials {
        let n = rng.random_range(1..=8usize);
        let t = rng.random_range(0..=n.min(6));
        let mut servers: Vec<f64> = (0..n).map(|_| rng.random_range(-30.0..30.0)).collect();
        servers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let requests: Vec<f64> = (0..t).map(|_| rng.random_range(-30.0..30.0)).collect();
        let dp = optimal_partial_cost(&requests, &servers).unwrap();
        let brute = brute_force_partial_cost(&requests, &servers).unwrap();
        report.trials += 1;
        report.observe(1e-9 - (dp - brute).abs(), || {
            format!("partial DP {dp} != injections {brute} on r={requests:?} s={servers:?}")
        });
    }

    for _ in 0..trials {
        let len = rng.random_range(1..=8usize);
        let mut p: Vec<f64> = (0..len).map(|_| rng.random_range(-25.0..25.0)).collect();
        let mut q: Vec<f64> = (0..len).map(|_| rng.random_range(-25.0..25.0)).collect();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        q.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let g = rng.random_range(0..len);
        let h = rng.random_range(0..len);
        let r = dpq_bound_check(&p, &q, g, h).unwrap();
        report.trials += 1;
        report.observe(r.bound - r.delta + 1e-9, || {
            format!("deletion bound failed: delta {} > bound {} on p={p:?} q={q:?} g={g} h={h}", r.delta, r.bound)
        });
    }
    report
}

fn random_reachable_state(
    rng: &mut ChaCha8Rng,
    n_max: usize,
) -> Result<Option<AlgoState>, AlgoError> {
    let n = rng.random_range(4..=n_max.max(4));
    let kind = if rng.random::<f64>() < 0.5 {
        GeneratorKind::Uniform
    } else {
        GeneratorKind::Clustered
    };
    let inst = generate_instance(kind, n, rng.random::<u64>()).expect("n >= 2");
    let validated = validate_instance(&inst, false).expect("generated instances validate").0;
    let prefix = rng.random_range(1..=n);
    let state = mdh_state_after_prefix(&validated, rng.random::<u64>(), prefix, PdMode::Clamped)?;
    if state.initialized() && state.available().len() >= 2 {
        Ok(Some(state))
    } else {
        Ok(None)
    }
}

/// Monotonicity of the right-assignment probability across one interval of
/// adjacent available servers: evaluated on `grid` interior points plus the
/// endpoints, midpoint, island boundaries, interior servers and trigger
/// interval endpoints; requires non-decreasing values with slack 1e-10, and
/// constancy on maximal trigger subintervals lying on one side of the
/// midpoint.
pub fn check_monotonicity(
    state: &AlgoState,
    gap_index: usize,
    grid: usize,
    mode: PdMode,
    report: &mut CheckReport,
) -> Result<(), AlgoError> {
    let left = state.available()[gap_index];
    let right = state.available()[gap_index + 1];
    let (a, b) = (state.position(left), state.position(right));
    debug_assert!(a < b);
    let midpoint = 0.5 * (a + b);

    let mut xs: Vec<f64> = Vec::with_capacity(grid + 16);
    for k in 0..=grid {
        xs.push(a + (b - a) * k as f64 / grid as f64);
    }
    xs.push(midpoint);
    for &s in state.servers() {
        if s > a && s < b {
            xs.push(s);
        }
    }
    let islands = crate::islands::decompose_islands(
        &state.imaginary_positions(),
        &state.available_positions(),
    )?;
    for island in &islands.intervals {
        for endpoint in [island.lo, island.hi] {
            if endpoint > a && endpoint < b {
                xs.push(endpoint);
            }
        }
    }
    let ctx = TriggerContext {
        prior_requests: state.requests(),
        servers: state.servers(),
        estimate: state.estimate(),
        left_available: a,
        right_available: b,
    };
    let spans = trigger_intervals(&ctx, a, b);
    for &(lo, hi) in &spans {
        for p in [lo, hi] {
            if p > a && p < b {
                xs.push(p);
            }
        }
    }
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    xs.dedup();

    let mut previous: Option<(f64, f64)> = None;
    for &x in &xs {
        let p = mdh_next_distribution(state, x, mode)?.probability_of(right);
        report.trials += 1;
        if let Some((px, pp)) = previous {
            report.observe(p - pp + 1e-10, || {
                format!("P({x}) = {p} < P({px}) = {pp} on ({a}, {b}), estimate {}", state.estimate())
            });
        }
        previous = Some((x, p));
    }

    // constancy on one-sided maximal trigger subintervals
    for &(lo, hi) in &spans {
        for (lo, hi) in [(lo.max(a), hi.min(midpoint)), (lo.max(midpoint), hi.min(b))] {
            if hi - lo <= 0.0 {
                continue;
            }
            let mut values = Vec::new();
            for k in 1..12 {
                let x = lo + (hi - lo) * k as f64 / 12.0;
                values.push(mdh_next_distribution(state, x, mode)?.probability_of(right));
            }
            let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - values.iter().copied().fold(f64::INFINITY, f64::min);
            report.trials += 1;
            report.observe(1e-10 - spread, || {
                format!("trigger-side probability varies by {spread} on ({lo}, {hi})")
            });
        }
    }
    Ok(())
}

/// Runs [`check_monotonicity`] over `states` random reachable states with a
/// random adjacent available pair each.
pub fn monotonicity_suite(states: usize, grid: usize, n_max: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("monotonicity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut skipped = 0u64;
    while checked < states {
        match random_reachable_state(&mut rng, n_max) {
            Ok(Some(state)) => {
                let gap = rng.random_range(0..state.available().len() - 1);
                match check_monotonicity(&state, gap, grid, PdMode::Clamped, &mut report) {
                    Ok(()) => checked += 1,
                    Err(AlgoError::DisconnectedPseudoMetric) => skipped += 1,
                    Err(e) => {
                        report.violations += 1;
                        report.details.push(format!("state check failed: {e}"));
                        checked += 1;
                    }
                }
            }
            Ok(None) => {}
            Err(AlgoError::DisconnectedPseudoMetric) => skipped += 1,
            Err(e) => {
                report.violations += 1;
                report.details.push(format!("state sampling failed: {e}"));
                checked += 1;
            }
        }
        if skipped > 10_000 {
            report.details.push("excessive skips while sampling".into());
            break;
        }
    }
    report
}

/// Within every phase of an mdh transcript the potential (matching cost
/// between available and imaginary servers plus accumulated assigned-minus-
/// imaginary cost differences) must be non-increasing, with slack 1e-9.
pub fn check_potential(tr: &RunTranscript, report: &mut CheckReport) {
    let mut previous: Option<(usize, f64)> = None;
    for step in &tr.steps {
        let Some(g) = step.potential_before else {
            previous = None;
            continue;
        };
        if let Some((phase, prev)) = previous {
            if phase == step.phase {
                report.trials += 1;
                report.observe(prev - g + 1e-9, || {
                    format!(
                        "potential rose from {prev} to {g} at step {} (phase {phase}, seed {})",
                        step.index, tr.seed
                    )
                });
            }
        }
        previous = Some((step.phase, g));
    }
}

/// Potential check over `runs` random instances served by modified doubled
/// harmonic.
pub fn potential_suite(runs: usize, n_max: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("potential");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..runs {
        let n = rng.random_range(4..=n_max.max(4));
        let kind = if k % 2 == 0 {
            GeneratorKind::Uniform
        } else {
            GeneratorKind::Clustered
        };
        let inst = generate_instance(kind, n, rng.random::<u64>()).expect("n >= 2");
        let validated = validate_instance(&inst, false).expect("valid").0;
        match run_with_mode(
            &validated,
            Algorithm::ModifiedDoubledHarmonic,
            rng.random::<u64>(),
            PdMode::Clamped,
        ) {
            Ok(tr) => check_potential(&tr, &mut report),
            // a disconnected pseudo-metric is a legitimate refusal, not a
            // property violation
            Err(AlgoError::DisconnectedPseudoMetric) => {}
            Err(e) => {
                report.violations += 1;
                report.details.push(format!("run failed: {e}"));
            }
        }
    }
    report
}

/// Monte Carlo agreement between `mdh_step` and `mdh_next_distribution`:
/// for random reachable states and request positions, the empirical
/// frequency over `trials` sampled steps must sit within three standard
/// errors of the exact probability, and nothing outside the support may
/// ever be assigned.
pub fn distribution_consistency_suite(
    cases: usize,
    trials: u64,
    seed: u64,
) -> CheckReport {
    let mut report = CheckReport::new("distribution_consistency");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < cases {
        let Ok(Some(state)) = random_reachable_state(&mut rng, 10) else {
            continue;
        };
        let lo = state.servers().first().copied().unwrap() - 2.0;
        let hi = state.servers().last().copied().unwrap() + 2.0;
        let x = if rng.random::<f64>() < 0.4 {
            state.servers()[rng.random_range(0..state.n())]
        } else {
            rng.random_range(lo..hi)
        };
        let Ok(dist) = mdh_next_distribution(&state, x, PdMode::Clamped) else {
            continue;
        };
        let mut counts = vec![0u64; state.n()];
        let mut failed = false;
        for trial in 0..trials {
            let mut clone = state.clone();
            let mut draws = SeededDraws::new(mix_seed(seed, ((done as u64) << 32) | trial));
            match crate::algo::mdh::mdh_step(&mut clone, x, PdMode::Clamped, &mut draws) {
                Ok(step) => counts[step.assigned] += 1,
                Err(e) => {
                    // the exact distribution existed, so the sampler must
                    // not refuse the same request
                    report.violations += 1;
                    report.details.push(format!("step failed: {e}"));
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            done += 1;
            continue;
        }
        for (server, &count) in counts.iter().enumerate() {
            let p = dist.probability_of(server);
            let freq = count as f64 / trials as f64;
            report.trials += 1;
            if p == 0.0 {
                report.observe(if count == 0 { 0.0 } else { -1.0 }, || {
                    format!(
                        "server {server} outside the support was assigned {count} times at x={x}"
                    )
                });
            } else {
                let sigma = (p * (1.0 - p) / trials as f64).sqrt();
                let slack = 3.0 * sigma + 1e-9;
                report.observe(slack - (freq - p).abs(), || {
                    format!("frequency {freq} vs exact {p} (3 sigma {slack}) at x={x}")
                });
            }
        }
        done += 1;
    }
    report
}

/// Reduction inequality checks: the perturbation wrapper must satisfy
/// `outer <= inner + n eps` and `opt_outer >= opt_inner - n eps`; the
/// snapping wrapper `outer <= inner + opt_outer` and `opt_outer >=
/// opt_inner / 2`. Each over `instances` random instances.
pub fn reduction_suite(instances: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("reduction_inequalities");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for trial in 0..instances {
        // co-located groups, requests at original locations
        let groups = rng.random_range(2..=6usize);
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
        match run_perturbed(
            &inst,
            Algorithm::ModifiedDoubledHarmonic,
            mix_seed(seed, trial as u64),
            PdMode::Clamped,
            None,
        ) {
            Ok(run) => {
                let slack = n as f64 * run.epsilon;
                report.trials += 2;
                report.observe(run.inner_cost + slack + 1e-9 - run.outer_cost, || {
                    format!(
                        "perturbed: outer {} > inner {} + n*eps {slack}",
                        run.outer_cost, run.inner_cost
                    )
                });
                report.observe(run.outer_opt - (run.inner_opt - slack) + 1e-9, || {
                    format!(
                        "perturbed: opt outer {} < opt inner {} - n*eps {slack}",
                        run.outer_opt, run.inner_opt
                    )
                });
            }
            Err(e) => {
                report.violations += 1;
                report.details.push(format!("perturbed run failed: {e}"));
            }
        }
    }

    for trial in 0..instances {
        // distinct servers, requests anywhere on the segment
        let n = rng.random_range(3..=12usize);
        let mut servers = vec![0.0];
        for _ in 1..n {
            let last = *servers.last().unwrap();
            servers.push(last + rng.random_range(1..=6) as f64);
        }
        let span = *servers.last().unwrap();
        let requests: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-2.0..span + 2.0))
            .collect();
        let inst = Instance::new(servers, requests);
        match run_snapped(
            &inst,
            Algorithm::ModifiedDoubledHarmonic,
            mix_seed(seed, 0x5aa5 + trial as u64),
            PdMode::Clamped,
        ) {
            Ok(run) => {
                report.trials += 2;
                report.observe(
                    run.inner_cost + run.outer_opt + 1e-9 - run.outer_cost,
                    || {
                        format!(
                            "snapped: outer {} > inner {} + opt {}",
                            run.outer_cost, run.inner_cost, run.outer_opt
                        )
                    },
                );
                report.observe(run.outer_opt - run.inner_opt / 2.0 + 1e-9, || {
                    format!(
                        "snapped: opt outer {} < opt inner {} / 2",
                        run.outer_opt, run.inner_opt
                    )
                });
            }
            Err(e) => {
                report.violations += 1;
                report.details.push(format!("snapped run failed: {e}"));
            }
        }
    }
    report
}

/// Exact branch analysis of the four-server instance (gaps 4, 7, 20) on
/// which doubled harmonic is not monotone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    /// Probability, inside the adjustment triggered by the third request at
    /// the second server, that the simulation sent the second request right.
    pub adjustment_branch_probability: f64,
    /// Probability the third request lands on the third server when it
    /// arrives at the first server (conditioned on the second request
    /// having gone left).
    pub pr_s3_given_r3_at_s1: f64,
    pub pr_s3_given_r3_at_s2_clamped: f64,
    pub pr_s4_given_r3_at_s2_clamped: f64,
    pub pr_s3_given_r3_at_s2_raw: f64,
    pub pr_s4_given_r3_at_s2_raw: f64,
    /// Whether the monotonicity violation is exhibited: arriving closer to
    /// the third server lowers the probability of being assigned there.
    pub monotone_violated: bool,
    pub pass: bool,
}

/// One enumerated run: per-request assignments, the imaginary target the
/// closing adjustment simulated for the second request, and the branch
/// probability.
type DhBranch = (Vec<usize>, Option<f64>, f64);

fn dh_branches(r3: f64, mode: PdMode) -> Vec<DhBranch> {
    let servers = vec![0.0, 4.0, 11.0, 31.0];
    enumerate_branches(|tape| {
        let mut state = AlgoState::new(servers.clone());
        let mut assigned = Vec::new();
        let mut sim_second_target = None;
        for &r in &[4.0, 4.0, r3] {
            let step = dh_step(&mut state, r, mode, tape).expect("dh step");
            assigned.push(step.assigned);
            if let Some(adj) = &step.adjustment {
                if adj.simulated_moves.len() == 2 {
                    sim_second_target = Some(adj.simulated_moves[1].imaginary_target);
                }
            }
        }
        (assigned, sim_second_target)
    })
    .into_iter()
    .map(|b| (b.outcome.0, b.outcome.1, b.probability))
    .collect()
}

/// Reproduces the non-monotonicity of doubled harmonic by exhaustive branch
/// enumeration, conditioning on the second request having been served by
/// the leftmost server.
pub fn reproduce_dh_counterexample() -> CounterexampleReport {
    let conditional = |branches: &[DhBranch], event: &dyn Fn(&DhBranch) -> bool| {
        let total: f64 = branches.iter().filter(|b| b.0[1] == 0).map(|b| b.2).sum();
        let hit: f64 = branches
            .iter()
            .filter(|b| b.0[1] == 0 && event(b))
            .map(|b| b.2)
            .sum();
        hit / total
    };

    // third request at the first server: never triggering, always corrected
    // onto the third server
    let at_s1 = dh_branches(0.0, PdMode::Clamped);
    let pr_s3_given_r3_at_s1 = conditional(&at_s1, &|b| b.0[2] == 2);
    let s1_always_s3 = at_s1.iter().filter(|b| b.0[1] == 0).all(|b| b.0[2] == 2);

    // third request at the second server: triggering; the adjustment may
    // free the first server, after which the move can drift to the fourth
    let at_s2_clamped = dh_branches(4.0, PdMode::Clamped);
    let at_s2_raw = dh_branches(4.0, PdMode::Raw);
    let pr_s3_given_r3_at_s2_clamped = conditional(&at_s2_clamped, &|b| b.0[2] == 2);
    let pr_s4_given_r3_at_s2_clamped = conditional(&at_s2_clamped, &|b| b.0[2] == 3);
    let pr_s3_given_r3_at_s2_raw = conditional(&at_s2_raw, &|b| b.0[2] == 2);
    let pr_s4_given_r3_at_s2_raw = conditional(&at_s2_raw, &|b| b.0[2] == 3);
    let adjustment_branch_probability =
        conditional(&at_s2_clamped, &|b| b.1 == Some(11.0));

    let monotone_violated = pr_s3_given_r3_at_s1 > pr_s3_given_r3_at_s2_clamped
        && pr_s3_given_r3_at_s1 > pr_s3_given_r3_at_s2_raw;
    let pass = s1_always_s3
        && (pr_s3_given_r3_at_s1 - 1.0).abs() < 1e-12
        && (adjustment_branch_probability - 4.0 / 11.0).abs() < 1e-12
        && pr_s3_given_r3_at_s2_clamped < 1.0
        && pr_s3_given_r3_at_s2_raw < 1.0
        && (pr_s4_given_r3_at_s2_raw - (4.0 / 11.0) * (4.0 / 31.0)).abs() < 1e-12
        && (pr_s4_given_r3_at_s2_clamped - (4.0 / 11.0) * (6.25 / 33.25)).abs() < 1e-12
        && monotone_violated;

    CounterexampleReport {
        adjustment_branch_probability,
        pr_s3_given_r3_at_s1,
        pr_s3_given_r3_at_s2_clamped,
        pr_s4_given_r3_at_s2_clamped,
        pr_s3_given_r3_at_s2_raw,
        pr_s4_given_r3_at_s2_raw,
        monotone_violated,
        pass,
    }
}

/// [`reproduce_dh_counterexample`] as a standard check report.
pub fn counterexample_check() -> CheckReport {
    let mut report = CheckReport::new("counterexample");
    let result = reproduce_dh_counterexample();
    report.trials = 1;
    report.observe(if result.pass { 0.0 } else { -1.0 }, || {
        format!("counterexample reproduction failed: {result:?}")
    });
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatteryLevel {
    /// Small sample counts for fast feedback.
    Quick,
    /// The full sample counts used by the acceptance suite.
    Full,
}

/// Runs every check with the battery's sample counts. Deterministic in the
/// seed; reports come back in a fixed order.
pub fn standard_battery(level: BatteryLevel, seed: u64) -> Vec<CheckReport> {
    let full = level == BatteryLevel::Full;
    vec![
        counterexample_check(),
        check_matching_oracles(if full { 200 } else { 50 }, mix_seed(seed, 1)),
        check_n_facts(if full { 100_000 } else { 5_000 }, mix_seed(seed, 2)),
        monotonicity_suite(
            if full { 500 } else { 25 },
            if full { 1000 } else { 120 },
            32,
            mix_seed(seed, 3),
        ),
        potential_suite(if full { 10_000 } else { 400 }, 32, mix_seed(seed, 4)),
        distribution_consistency_suite(
            if full { 100 } else { 8 },
            if full { 100_000 } else { 20_000 },
            mix_seed(seed, 5),
        ),
        reduction_suite(if full { 200 } else { 40 }, mix_seed(seed, 6)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_fact_spot_values() {
        // N(0.2, 0.3) = 0.38 <= N(0.5, 0.3) = 0.5
        assert!((normalized_cost(0.2, 0.3).unwrap() - 0.38).abs() < 1e-15);
        assert!((normalized_cost(0.5, 0.3).unwrap() - 0.5).abs() < 1e-15);
        // fact (c) at the boundary
        let n = normalized_cost(0.5, 0.5).unwrap();
        assert!(n <= 2.0 * 0.5f64.max(n));
        let report = check_n_facts(2_000, 9);
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn oracle_battery_passes() {
        let report = check_matching_oracles(60, 5);
        assert!(report.pass(), "{report:?}");
        assert_eq!(report.trials, 180);
    }

    #[test]
    fn counterexample_probabilities() {
        let r = reproduce_dh_counterexample();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.pr_s3_given_r3_at_s1, 1.0);
        assert!((r.adjustment_branch_probability - 4.0 / 11.0).abs() < 1e-12);
        assert!((r.pr_s4_given_r3_at_s2_raw - 16.0 / 341.0).abs() < 1e-12);
        // 7/11 + (4/11)(27/33.25)
        assert!((r.pr_s3_given_r3_at_s2_clamped - (7.0 / 11.0 + (4.0 / 11.0) * (27.0 / 33.25))).abs() < 1e-12);
    }

    #[test]
    fn quick_monotonicity_and_potential() {
        let mono = monotonicity_suite(8, 150, 16, 31);
        assert!(mono.pass(), "{:?}", mono.details);
        let pot = potential_suite(150, 16, 32);
        assert!(pot.pass(), "{:?}", pot.details);
    }

    #[test]
    fn quick_distribution_consistency() {
        let report = distribution_consistency_suite(4, 20_000, 33);
        assert!(report.pass(), "{:?}", report.details);
    }
}
