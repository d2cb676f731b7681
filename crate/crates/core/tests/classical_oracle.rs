//! The classical module against an independent penalty-method oracle on the
//! probability simplex, plus the quantum-classical bridge.

use qmargin_core::classical::{
    classical_maxent_ipf, delta_family, delta_range, diagonal_density, marginalize, IpfConfig,
    JointDistribution,
};
use qmargin_core::maxent::{irreducible_correlation, SolverConfig};
use qmargin_core::rng::Rng;

const PAIRS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

fn random_distribution(rng: &mut Rng, floor: f64) -> JointDistribution {
    let mut probs: Vec<f64> = (0..8).map(|_| floor + rng.uniform()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    // Push the rounding drift into one cell so the sum lands within 1e-15.
    let drift: f64 = probs.iter().sum::<f64>() - 1.0;
    probs[0] -= drift;
    JointDistribution::new(3, probs).unwrap()
}

/// Independent maximum-entropy oracle: projected gradient ascent of
/// H(q) - mu * sum of squared pair-marginal mismatches over the softmax
/// parametrization q = softmax(theta), mu stepped up geometrically.
fn penalty_oracle(targets: &[JointDistribution; 3]) -> JointDistribution {
    let mut theta = [0.0f64; 8];
    let q_of = |theta: &[f64; 8]| -> Vec<f64> {
        let m = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = theta.iter().map(|&t| (t - m).exp()).collect();
        let z: f64 = w.iter().sum();
        w.iter().map(|&x| x / z).collect()
    };
    let value_of = |q: &[f64], mu: f64| -> f64 {
        let mut h = 0.0;
        for &p in q {
            if p > 0.0 {
                h -= p * p.ln();
            }
        }
        let dist = JointDistribution::new(3, q.to_vec()).unwrap();
        let mut penalty = 0.0;
        for (pair, target) in PAIRS.iter().zip(targets.iter()) {
            let m = marginalize(&dist, pair).unwrap();
            for (a, b) in m.probs().iter().zip(target.probs().iter()) {
                penalty += (a - b) * (a - b);
            }
        }
        h - mu * penalty
    };

    for mu in [1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8] {
        let mut step = 1.0f64;
        for _ in 0..4000 {
            let q = q_of(&theta);
            let value = value_of(&q, mu);
            // Gradient of the objective with respect to theta via finite
            // differences keeps this oracle independent of any analytic
            // gradient conventions in the library.
            let mut grad = [0.0f64; 8];
            let eps = 1e-7;
            for i in 0..8 {
                let mut shifted = theta;
                shifted[i] += eps;
                grad[i] = (value_of(&q_of(&shifted), mu) - value) / eps;
            }
            let norm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm < 1e-10 {
                break;
            }
            let mut accepted = false;
            for _ in 0..30 {
                let mut candidate = theta;
                for i in 0..8 {
                    candidate[i] += step * grad[i];
                }
                if value_of(&q_of(&candidate), mu) >= value {
                    theta = candidate;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step = (step * 2.0).min(1.0);
        }
    }
    JointDistribution::new(3, q_of(&theta)).unwrap()
}

#[test]
fn ipf_matches_penalty_oracle_on_random_instances() {
    let mut rng = Rng::seed_from(401);
    for trial in 0..5 {
        let source = random_distribution(&mut rng, 0.02);
        let targets = [
            marginalize(&source, &[0, 1]).unwrap(),
            marginalize(&source, &[0, 2]).unwrap(),
            marginalize(&source, &[1, 2]).unwrap(),
        ];
        let fit = classical_maxent_ipf(&targets, &IpfConfig::default()).unwrap();
        assert!(fit.converged, "trial {trial}");
        let oracle = penalty_oracle(&targets);
        // The oracle confirms both the entropy level and the distribution.
        assert!(
            (fit.joint.entropy_bits() - oracle.entropy_bits()).abs() <= 1e-4,
            "trial {trial}: IPF entropy {} vs oracle {}",
            fit.joint.entropy_bits(),
            oracle.entropy_bits()
        );
        for (a, b) in fit.joint.probs().iter().zip(oracle.probs().iter()) {
            assert!((a - b).abs() <= 1e-3, "trial {trial}");
        }
        // And the fit dominates the source entropy.
        assert!(fit.joint.entropy_bits() >= source.entropy_bits() - 1e-9);
    }
}

#[test]
fn ipf_entropy_dominates_source_on_random_instances() {
    let mut rng = Rng::seed_from(402);
    for _ in 0..50 {
        let source = random_distribution(&mut rng, 0.0);
        let targets = [
            marginalize(&source, &[0, 1]).unwrap(),
            marginalize(&source, &[0, 2]).unwrap(),
            marginalize(&source, &[1, 2]).unwrap(),
        ];
        let fit = classical_maxent_ipf(&targets, &IpfConfig::default()).unwrap();
        assert!(fit.converged);
        assert!(
            fit.joint.entropy_bits() >= source.entropy_bits() - 1e-9,
            "IPF entropy {} below source {}",
            fit.joint.entropy_bits(),
            source.entropy_bits()
        );
    }
}

/// Probabilities on a dyadic grid make every delta-family operation exact in
/// IEEE arithmetic: all cells are multiples of 2^-30 bounded by 2, so sums
/// and differences carry at most 32 significand bits.
fn random_dyadic_distribution(rng: &mut Rng) -> JointDistribution {
    const GRID: f64 = 1.0 / (1u64 << 30) as f64;
    let total_units: u64 = 1 << 30;
    let min_units: u64 = 1 << 20;
    // Draw positive weights summing to the full grid.
    let mut units = [min_units; 8];
    let mut remaining = total_units - 8 * min_units;
    for i in 0..7 {
        let share = (rng.uniform() * remaining as f64) as u64;
        units[i] += share;
        remaining -= share;
    }
    units[7] += remaining;
    let probs: Vec<f64> = units.iter().map(|&u| u as f64 * GRID).collect();
    JointDistribution::new(3, probs).unwrap()
}

#[test]
fn delta_family_marginals_are_exactly_preserved_on_dyadic_grid() {
    const GRID: f64 = 1.0 / (1u64 << 30) as f64;
    let mut rng = Rng::seed_from(403);
    for _ in 0..50 {
        let p = random_dyadic_distribution(&mut rng);
        let (lo, hi) = delta_range(&p).unwrap();
        // Largest grid point at or below 0.9 * delta_max (and mirrored).
        let delta_pos = ((0.9 * hi / GRID).floor()) * GRID;
        let delta_neg = -((0.9 * (-lo) / GRID).floor()) * GRID;
        for delta in [delta_pos, delta_neg] {
            assert!(delta != 0.0, "grid floor collapsed the shift");
            let q = delta_family(&p, delta).unwrap();
            assert!(q.probs() != p.probs(), "shift must change the joint");
            for pair in PAIRS {
                let a = marginalize(&q, &pair).unwrap();
                let b = marginalize(&p, &pair).unwrap();
                assert_eq!(a.probs(), b.probs(), "marginals must match exactly");
            }
        }
    }
}

#[test]
fn quantum_correlation_of_diagonal_embedding_matches_classical_gap() {
    let mut rng = Rng::seed_from(404);
    let cfg = SolverConfig {
        restarts: 2,
        ..SolverConfig::default()
    };
    for _ in 0..3 {
        let source = random_distribution(&mut rng, 0.05);
        let targets = [
            marginalize(&source, &[0, 1]).unwrap(),
            marginalize(&source, &[0, 2]).unwrap(),
            marginalize(&source, &[1, 2]).unwrap(),
        ];
        let classical_gap = classical_maxent_ipf(&targets, &IpfConfig::default())
            .unwrap()
            .joint
            .entropy_bits()
            - source.entropy_bits();

        let rho = diagonal_density(&source);
        let quantum = irreducible_correlation(&rho, 2, &cfg).unwrap();
        assert!(
            (quantum.correlation_bits - classical_gap).abs() <= 1e-4,
            "quantum {} vs classical {}",
            quantum.correlation_bits,
            classical_gap
        );
    }
}
