//! Acceptance suite: one test per headline guarantee, each printing a
//! PASS/FAIL line with its runtime. Tolerances are fixed here, not tuned.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use qmargin_core::classical::{delta_family, delta_range, marginalize, JointDistribution};
use qmargin_core::matrix::{Complex64, ComplexMatrix};
use qmargin_core::maxent::{
    irreducible_correlation, marginal_feasibility, maxent_from_marginals, maxent_two_party,
    MarginalSet, SolverConfig,
};
use qmargin_core::pauli::PauliExpansion;
use qmargin_core::rng::{haar_pure_state, random_density, random_unitary, Rng};
use qmargin_core::state::{
    log_on_support, partial_trace, trace_distance, von_neumann_entropy, PureState,
};
use qmargin_core::uniqueness::{
    classify, ghz_counterexample, ghz_state, uniqueness_search, SearchConfig, VerdictKind,
    DEFAULT_CLASSIFIER_TOL,
};

/// Numeric floor of the summed squared marginal residual for the three-singlet
/// set, pinned from the first oracle run and kept as a regression constant.
const THREE_SINGLET_RESIDUAL_FLOOR: f64 = 1.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(number: usize, name: &str, started: Instant, budget: Duration, failures: Vec<String>) {
    let elapsed = started.elapsed();
    let verdict = if failures.is_empty() && elapsed <= budget {
        "PASS"
    } else {
        "FAIL"
    };
    println!(
        "ACCEPTANCE {number} {name}: {verdict} ({:.2} s, budget {:.0} s)",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    for f in &failures {
        println!("  - {f}");
    }
    assert!(failures.is_empty(), "criterion {number} failed");
    assert!(
        elapsed <= budget,
        "criterion {number} exceeded its runtime budget"
    );
}

#[test]
fn criterion_1_two_party_closed_form() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = Rng::seed_from(1001);

    for trial in 0..100 {
        let a = random_density(&mut rng, &[2], 0.0);
        let b = random_density(&mut rng, &[2], 0.0);
        let joint = maxent_two_party(&a, &b);
        if joint.matrix().max_abs_diff(&a.matrix().kron(b.matrix())) != 0.0 {
            failures.push(format!("trial {trial}: product is not exact"));
        }
    }

    for trial in 0..100 {
        let rho = random_density(&mut rng, &[2, 2], 0.0);
        let a = partial_trace(&rho, &[0]).unwrap();
        let b = partial_trace(&rho, &[1]).unwrap();
        let tilde = maxent_two_party(&a, &b);
        let gap = von_neumann_entropy(&tilde).unwrap() - von_neumann_entropy(&rho).unwrap();
        let mutual = von_neumann_entropy(&a).unwrap() + von_neumann_entropy(&b).unwrap()
            - von_neumann_entropy(&rho).unwrap();
        if (gap - mutual).abs() > 1e-9 {
            failures.push(format!(
                "trial {trial}: entropy gap {gap} differs from mutual information {mutual}"
            ));
        }
    }

    report(
        1,
        "two-party closed form",
        started,
        Duration::from_secs(1),
        failures,
    );
}

/// Criteria 2, 3, and 9 share one battery: 2 exercises Haar-random states,
/// 3 exercises the exceptional class, and 9 demands the classifier and the
/// search oracle never contradict each other across both.
#[test]
fn criteria_2_3_9_genericity_exceptional_class_cross_validation() {
    let mut cross_failures: Vec<String> = Vec::new();

    // Criterion 2: Haar-random three-qubit states.
    let started2 = Instant::now();
    let mut failures2 = Vec::new();
    let mut rng = Rng::seed_from(1002);
    for trial in 0..200 {
        let psi = haar_pure_state(&mut rng, &[2, 2, 2]);
        let verdict = classify(&psi, DEFAULT_CLASSIFIER_TOL).unwrap();
        let cfg = SearchConfig {
            restarts: 20,
            seed: 42 + trial as u64,
            ..SearchConfig::default()
        };
        let search = uniqueness_search(&psi, &cfg).unwrap();
        match verdict.kind {
            VerdictKind::UniqueGeneric => {
                if search.alternative_found {
                    failures2.push(format!(
                        "trial {trial}: search found an alternative (distance {:.3e}, \
                         residual {:.3e}) for a generic state",
                        search.trace_distance_to_input, search.marginal_residual
                    ));
                    cross_failures.push(format!(
                        "haar trial {trial}: unique verdict contradicted by the search"
                    ));
                }
            }
            other => {
                // A measure-zero event: investigate rather than auto-fail.
                // The verdict stands only if the search corroborates it.
                if !search.alternative_found {
                    failures2.push(format!(
                        "trial {trial}: verdict {other:?} not corroborated by the search"
                    ));
                    cross_failures.push(format!(
                        "haar trial {trial}: exceptional verdict contradicted by the search"
                    ));
                }
            }
        }
    }
    report(
        2,
        "headline genericity",
        started2,
        Duration::from_secs(300),
        failures2,
    );

    // Criterion 3: the exceptional class under random local rotations.
    let started3 = Instant::now();
    let mut failures3 = Vec::new();
    let mut rng = Rng::seed_from(1003);
    for trial in 0..20 {
        // Random coefficients with both moduli at least 0.1.
        let (a, b) = loop {
            let a = rng.complex_normal();
            let b = rng.complex_normal();
            let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let a = a / c(norm, 0.0);
            let b = b / c(norm, 0.0);
            if a.norm() >= 0.1 && b.norm() >= 0.1 {
                break (a, b);
            }
        };
        let base = ghz_state(a, b).unwrap();
        let us: Vec<ComplexMatrix> = (0..3).map(|_| random_unitary(&mut rng, 2)).collect();
        let rotated = base.apply_local_unitaries(&us).unwrap();

        let verdict = classify(&rotated, DEFAULT_CLASSIFIER_TOL).unwrap();
        if verdict.kind != VerdictKind::SchmidtGhzClass {
            failures3.push(format!(
                "trial {trial}: rotated exceptional state classified {:?}",
                verdict.kind
            ));
        }

        let (pure, mixed) = ghz_counterexample(a, b).unwrap();
        let mut marginal_dev = 0.0f64;
        for pair in [[0usize, 1], [0, 2], [1, 2]] {
            let x = partial_trace(&pure, &pair).unwrap();
            let y = partial_trace(&mixed, &pair).unwrap();
            marginal_dev = marginal_dev.max(x.matrix().max_abs_diff(y.matrix()));
        }
        if marginal_dev > 1e-14 {
            failures3.push(format!(
                "trial {trial}: counterexample marginals deviate by {marginal_dev:.3e}"
            ));
        }
        let distance = trace_distance(&pure, &mixed).unwrap();
        let expected = a.norm() * b.norm();
        if (distance - expected).abs() > 1e-10 {
            failures3.push(format!(
                "trial {trial}: trace distance {distance} differs from |ab| = {expected}"
            ));
        }

        let cfg = SearchConfig {
            restarts: 10,
            seed: 4200 + trial as u64,
            ..SearchConfig::default()
        };
        let search = uniqueness_search(&rotated, &cfg).unwrap();
        if !search.alternative_found {
            failures3.push(format!(
                "trial {trial}: no alternative found (distance {:.3e}, residual {:.3e})",
                search.trace_distance_to_input, search.marginal_residual
            ));
            cross_failures.push(format!(
                "exceptional trial {trial}: class verdict contradicted by the search"
            ));
        }
    }
    report(
        3,
        "exceptional class",
        started3,
        Duration::from_secs(120),
        failures3,
    );

    // Criterion 9: no contradictions across the combined battery.
    println!(
        "ACCEPTANCE 9 classifier-oracle cross-validation: {}",
        if cross_failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        }
    );
    for f in &cross_failures {
        println!("  - {f}");
    }
    assert!(cross_failures.is_empty(), "criterion 9 failed");
}

#[test]
fn criterion_4_irreducible_correlation_values() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let cfg = SolverConfig {
        restarts: 3,
        ..SolverConfig::default()
    };

    // GHZ via the penalty path.
    let s = 0.5f64.sqrt();
    let ghz = ghz_state(c(s, 0.0), c(s, 0.0)).unwrap().to_density();
    let ghz_report = irreducible_correlation(&ghz, 2, &cfg).unwrap();
    if !ghz_report.used_penalty {
        failures.push("GHZ reconstruction did not use the penalty path".into());
    }
    if (ghz_report.correlation_bits - 1.0).abs() > 0.005 {
        failures.push(format!(
            "GHZ correlation {} outside 1.000 +- 0.005",
            ghz_report.correlation_bits
        ));
    }

    // A random product pure state carries none.
    let mut rng = Rng::seed_from(1004);
    let product = haar_pure_state(&mut rng, &[2])
        .tensor(&haar_pure_state(&mut rng, &[2]))
        .tensor(&haar_pure_state(&mut rng, &[2]));
    let product_report = irreducible_correlation(&product.to_density(), 2, &cfg).unwrap();
    if product_report.correlation_bits.abs() > 0.005 {
        failures.push(format!(
            "product-state correlation {} exceeds 0.005",
            product_report.correlation_bits
        ));
    }

    // Bell pair, two parties, singleton marginals.
    let bell = PureState::new(
        vec![2, 2],
        vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
    )
    .unwrap()
    .to_density();
    let bell_report = irreducible_correlation(&bell, 1, &cfg).unwrap();
    if (bell_report.correlation_bits - 2.0).abs() > 0.001 {
        failures.push(format!(
            "Bell correlation {} outside 2.000 +- 0.001",
            bell_report.correlation_bits
        ));
    }

    report(
        4,
        "irreducible correlation values",
        started,
        Duration::from_secs(60),
        failures,
    );
}

#[test]
fn criterion_5_maxent_structure() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = Rng::seed_from(1005);
    let cfg = SolverConfig {
        dual_tolerance: 1e-6,
        ..SolverConfig::default()
    };

    for trial in 0..50 {
        let rho = random_density(&mut rng, &[2, 2, 2], 0.2);
        let targets = MarginalSet::from_state(&rho, 2).unwrap();
        let result = maxent_from_marginals(&targets, &cfg).unwrap();
        if !result.converged || result.residual > 1e-6 {
            failures.push(format!(
                "trial {trial}: residual {:.3e}, converged {}",
                result.residual, result.converged
            ));
            continue;
        }
        let log = log_on_support(&result.state).unwrap();
        let q = PauliExpansion::of_hermitian(&log).unwrap().max_three_body();
        if q > 1e-5 {
            failures.push(format!(
                "trial {trial}: three-body term {q:.3e} in the log"
            ));
        }
    }

    report(
        5,
        "max-entropy structure",
        started,
        Duration::from_secs(300),
        failures,
    );
}

#[test]
fn criterion_6_infeasibility_detection() {
    let started = Instant::now();
    let mut failures = Vec::new();

    let s = 0.5f64.sqrt();
    let singlet = PureState::new(
        vec![2, 2],
        vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)],
    )
    .unwrap()
    .to_density();
    let targets = MarginalSet::new(
        vec![2, 2, 2],
        vec![
            (vec![0, 1], singlet.clone()),
            (vec![0, 2], singlet.clone()),
            (vec![1, 2], singlet),
        ],
    )
    .unwrap();

    let cfg = SolverConfig {
        restarts: 20,
        ..SolverConfig::default()
    };
    let report_f = marginal_feasibility(&targets, &cfg).unwrap();
    if report_f.feasible {
        failures.push("three singlets reported feasible".into());
    }
    if report_f.best_residual <= 10.0 * cfg.feasibility_tolerance {
        failures.push(format!(
            "best residual {:.3e} does not exceed 10x the tolerance",
            report_f.best_residual
        ));
    }
    if (report_f.best_residual - THREE_SINGLET_RESIDUAL_FLOOR).abs() > 1e-3 {
        failures.push(format!(
            "best residual {:.6} drifted from the pinned floor {THREE_SINGLET_RESIDUAL_FLOOR}",
            report_f.best_residual
        ));
    }

    report(
        6,
        "infeasibility detection",
        started,
        Duration::from_secs(60),
        failures,
    );
}

#[test]
fn criterion_7_four_qubit_family() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = Rng::seed_from(1007);

    for trial in 0..10 {
        // a|0001> + b|0010> + c|0100> + d|1000> with random complex draws.
        let coeffs: Vec<Complex64> = (0..4).map(|_| rng.complex_normal()).collect();
        let mut amps = vec![c(0.0, 0.0); 16];
        amps[0b0001] = coeffs[0];
        amps[0b0010] = coeffs[1];
        amps[0b0100] = coeffs[2];
        amps[0b1000] = coeffs[3];
        let psi = PureState::normalized(vec![2, 2, 2, 2], amps).unwrap();

        let cfg = SearchConfig {
            restarts: 10,
            env_dim: Some(16),
            seed: 9000 + trial as u64,
            ..SearchConfig::default()
        };
        let search = uniqueness_search(&psi, &cfg).unwrap();
        if search.alternative_found {
            failures.push(format!(
                "trial {trial}: alternative found (distance {:.3e}, residual {:.3e})",
                search.trace_distance_to_input, search.marginal_residual
            ));
        }
    }

    report(
        7,
        "four-qubit family",
        started,
        Duration::from_secs(600),
        failures,
    );
}

#[test]
fn criterion_8_classical_non_uniqueness() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = Rng::seed_from(1008);

    // Dyadic probabilities make the parity-shift arithmetic exact in IEEE
    // doubles: every cell is a multiple of 2^-30 bounded by 2, so additions
    // carry at most 32 significand bits.
    const GRID: f64 = 1.0 / (1u64 << 30) as f64;
    for trial in 0..100 {
        let total: u64 = 1 << 30;
        let floor: u64 = 1 << 18;
        let mut units = [floor; 8];
        let mut remaining = total - 8 * floor;
        for cell in units.iter_mut().take(7) {
            let share = (rng.uniform() * remaining as f64) as u64;
            *cell += share;
            remaining -= share;
        }
        units[7] += remaining;
        let probs: Vec<f64> = units.iter().map(|&u| u as f64 * GRID).collect();
        let p = JointDistribution::new(3, probs).unwrap();

        let (lo, hi) = delta_range(&p).unwrap();
        let delta_pos = (0.9 * hi / GRID).floor() * GRID;
        let delta_neg = -((0.9 * (-lo) / GRID).floor()) * GRID;
        for delta in [delta_pos, delta_neg] {
            if delta == 0.0 {
                failures.push(format!("trial {trial}: degenerate admissible range"));
                continue;
            }
            let q = delta_family(&p, delta).unwrap();
            if q.probs() == p.probs() {
                failures.push(format!("trial {trial}: shift left the joint unchanged"));
            }
            for pair in [[0usize, 1], [0, 2], [1, 2]] {
                let a = marginalize(&q, &pair).unwrap();
                let b = marginalize(&p, &pair).unwrap();
                if a.probs() != b.probs() {
                    failures.push(format!(
                        "trial {trial}: pair {pair:?} marginal not exactly preserved"
                    ));
                }
            }
        }
    }

    report(
        8,
        "classical non-uniqueness",
        started,
        Duration::from_secs(1),
        failures,
    );
}
