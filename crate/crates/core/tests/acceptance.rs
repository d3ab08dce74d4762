//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test --release --test acceptance -- --nocapture`
//! to see the lines and timings.

use std::time::Instant;

use linematch::harness::{experiment, ExperimentConfig, GeneratorKind};
use linematch::verify::{
    check_matching_oracles, check_n_facts, distribution_consistency_suite, monotonicity_suite,
    potential_suite, reduction_suite, reproduce_dh_counterexample, standard_battery, BatteryLevel,
};
use linematch::{run, validate_instance, Algorithm, Instance, PdMode};

fn report(criterion: &str, pass: bool, detail: &str, started: Instant) {
    println!(
        "criterion {criterion}: {} - {detail} ({:.2?})",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed()
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: the four-server counterexample, by exhaustive branch
/// enumeration, with the adjustment-internal branch probability 4/11.
#[test]
fn criterion_1_counterexample() {
    let t = Instant::now();
    let r = reproduce_dh_counterexample();
    let pass = r.pass
        && r.pr_s3_given_r3_at_s1 == 1.0
        && (r.adjustment_branch_probability - 4.0 / 11.0).abs() < 1e-12
        && r.pr_s3_given_r3_at_s2_clamped < 1.0
        && r.pr_s3_given_r3_at_s2_raw < 1.0
        && t.elapsed().as_secs_f64() < 1.0;
    report(
        "1 (counterexample)",
        pass,
        &format!(
            "Pr[s3|r3=s1]={}, Pr[s3|r3=s2]={:.6} (clamped) / {:.6} (raw), adjustment branch={:.6}",
            r.pr_s3_given_r3_at_s1,
            r.pr_s3_given_r3_at_s2_clamped,
            r.pr_s3_given_r3_at_s2_raw,
            r.adjustment_branch_probability
        ),
        t,
    );
}

/// Criterion 2: monotone right-assignment probability over 500 reachable
/// states, 1000 grid points per interval plus analytic breakpoints, slack
/// 1e-10, including trigger-subinterval constancy.
#[test]
fn criterion_2_monotonicity() {
    let t = Instant::now();
    let r = monotonicity_suite(500, 1000, 32, 0xACC2);
    let pass = r.pass() && t.elapsed().as_secs_f64() < 120.0;
    report(
        "2 (monotonicity)",
        pass,
        &format!(
            "{} evaluations, {} violations, worst margin {:.2e}",
            r.trials, r.violations, r.worst_margin
        ),
        t,
    );
}

/// Criterion 3: within-phase potential non-increasing over 10^4 runs at
/// slack 1e-9.
#[test]
fn criterion_3_potential() {
    let t = Instant::now();
    let r = potential_suite(10_000, 32, 0xACC3);
    let pass = r.pass() && t.elapsed().as_secs_f64() < 300.0;
    report(
        "3 (potential)",
        pass,
        &format!(
            "{} comparisons, {} violations, worst margin {:.2e}",
            r.trials, r.violations, r.worst_margin
        ),
        t,
    );
}

/// Criterion 4: sorted pairing vs brute force, partial DP vs exhaustive
/// injections, and the deletion bound, 200 random cases each.
#[test]
fn criterion_4_oracles() {
    let t = Instant::now();
    let r = check_matching_oracles(200, 0xACC4);
    let pass = r.pass() && r.trials == 600 && t.elapsed().as_secs_f64() < 30.0;
    report(
        "4 (matching oracles)",
        pass,
        &format!("{} comparisons, {} violations", r.trials, r.violations),
        t,
    );
}

/// Criterion 5: the four normalized-cost facts over 10^5 constrained
/// triples each at tolerance 1e-12.
#[test]
fn criterion_5_n_facts() {
    let t = Instant::now();
    let r = check_n_facts(100_000, 0xACC5);
    let pass = r.pass() && r.trials == 400_000 && t.elapsed().as_secs_f64() < 10.0;
    report(
        "5 (normalized-cost facts)",
        pass,
        &format!("{} checks, {} violations", r.trials, r.violations),
        t,
    );
}

/// Criterion 6: Monte Carlo frequencies over 10^5 sampled steps match the
/// exact distribution within three standard errors, for 100 cases.
#[test]
fn criterion_6_distribution_consistency() {
    let t = Instant::now();
    let r = distribution_consistency_suite(100, 100_000, 0xACC6);
    let pass = r.pass() && t.elapsed().as_secs_f64() < 120.0;
    report(
        "6 (distribution consistency)",
        pass,
        &format!(
            "{} support comparisons, {} violations, worst margin {:.2e}",
            r.trials, r.violations, r.worst_margin
        ),
        t,
    );
}

/// Criterion 7: empirical scaling on the geometric-gaps and
/// harmonic-adversary families; mean ratios finite and the ratio at n=256
/// at most four times the ratio at n=16.
#[test]
fn criterion_7_scaling() {
    let t = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for generator in [GeneratorKind::GeometricGaps, GeneratorKind::HarmonicAdversary] {
        let cfg = ExperimentConfig {
            generator,
            sizes: vec![16, 32, 64, 128, 256],
            trials: 50,
            seed: 0xACC7,
            algorithms: vec![Algorithm::ModifiedDoubledHarmonic],
            pd_mode: PdMode::Clamped,
            reduction: None,
        };
        let report = experiment(&cfg).unwrap();
        let at = |n: usize| {
            report
                .aggregate(Algorithm::ModifiedDoubledHarmonic, n)
                .unwrap()
                .mean_ratio
        };
        let finite = report.aggregates.iter().all(|a| a.mean_ratio.is_finite());
        let bounded = at(256) <= 4.0 * at(16);
        let slope = report.slopes[0].slope;
        pass &= finite && bounded && slope.is_finite();
        detail.push_str(&format!(
            "{generator}: mean ratio {:.3} (n=16) -> {:.3} (n=256), slope {:.3}; ",
            at(16),
            at(256),
            slope
        ));
    }
    pass &= t.elapsed().as_secs_f64() < 600.0;
    report("7 (empirical scaling)", pass, detail.trim_end(), t);
}

/// Criterion 8: per-run reduction inequalities over 200 random instances
/// for each wrapper.
#[test]
fn criterion_8_reductions() {
    let t = Instant::now();
    let r = reduction_suite(200, 0xACC8);
    let pass = r.pass() && t.elapsed().as_secs_f64() < 60.0;
    report(
        "8 (reduction inequalities)",
        pass,
        &format!("{} inequalities, {} violations", r.trials, r.violations),
        t,
    );
}

/// Criterion 9: repeated invocations with identical inputs produce
/// byte-identical outputs for runs, sweeps and the verification battery.
#[test]
fn criterion_9_determinism() {
    let t = Instant::now();
    // run:
    let inst = Instance::new(
        vec![0.0, 4.0, 11.0, 31.0, 45.0, 46.0],
        vec![4.0, 4.0, 4.0, 45.0, 46.0, 0.0],
    );
    let v = validate_instance(&inst, false).unwrap().0;
    let mut pass = true;
    for algo in Algorithm::ALL {
        let a = run(&v, algo, 999).unwrap().to_json();
        let b = run(&v, algo, 999).unwrap().to_json();
        pass &= a == b;
    }
    // sweep:
    let cfg = ExperimentConfig {
        generator: GeneratorKind::Uniform,
        sizes: vec![8, 16],
        trials: 10,
        seed: 7,
        algorithms: vec![Algorithm::ModifiedDoubledHarmonic, Algorithm::Greedy],
        pd_mode: PdMode::Clamped,
        reduction: None,
    };
    let ra = experiment(&cfg).unwrap();
    let rb = experiment(&cfg).unwrap();
    pass &= ra.to_json() == rb.to_json() && ra.to_csv() == rb.to_csv();
    // verify battery:
    let ba: Vec<String> = standard_battery(BatteryLevel::Quick, 5)
        .iter()
        .map(|r| r.to_json())
        .collect();
    let bb: Vec<String> = standard_battery(BatteryLevel::Quick, 5)
        .iter()
        .map(|r| r.to_json())
        .collect();
    pass &= ba == bb;
    report(
        "9 (determinism)",
        pass,
        "run, sweep and verify outputs byte-identical across repeats",
        t,
    );
}
