//! Decides whether a three-qubit pure state is uniquely determined by its
//! two-party reduced states, generates the exceptional-class counterexamples,
//! and provides a numerical uniqueness search over purifications.
//!
//! For each way of keeping a qubit pair and purifying against the remaining
//! qubit plus an environment, three complex invariants (alpha, beta, gamma)
//! of the amplitude tensor govern solvability of the environment-vector
//! orthonormality system. The system admits only the trivial solution -- and
//! the state is uniquely determined -- unless |alpha| = |beta| and
//! conj(gamma)^2 alpha beta is real and non-negative for every grouping.
//! States passing all three groupings are exactly those locally equivalent to
//! a|000> + b|111>, which do admit distinct states with identical pair
//! marginals.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::matrix::{Complex64, ComplexMatrix, C_ZERO};
use crate::maxent::MarginalSet;
use crate::state::{
    density_from_pure, partial_trace, trace_distance_matrix, DensityMatrix, PureState,
};

/// Default relative tolerance of the classifier conditions.
pub const DEFAULT_CLASSIFIER_TOL: f64 = 1e-8;

/// Absolute floor guarding the relative tolerances near all-zero invariants.
const INVARIANT_FLOOR: f64 = 1e-12;

/// Purity threshold above which a single-qubit marginal counts as pure.
const PRODUCT_PURITY: f64 = 1.0 - 1e-10;

/// Which qubit pair is kept; the environment purifies against the remaining
/// qubit. Invariants are built from the two amplitude-tensor slices along
/// that remaining qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Keep qubits A, B; slice along C.
    PairAB,
    /// Keep qubits A, C; slice along B.
    PairAC,
    /// Keep qubits B, C; slice along A.
    PairBC,
}

impl Grouping {
    pub const ALL: [Grouping; 3] = [Grouping::PairAB, Grouping::PairAC, Grouping::PairBC];

    /// The qubit sliced over (the one purified together with the environment).
    pub fn sliced_qubit(self) -> usize {
        match self {
            Grouping::PairAB => 2,
            Grouping::PairAC => 1,
            Grouping::PairBC => 0,
        }
    }

    /// The kept pair, in original subsystem order.
    pub fn kept_pair(self) -> [usize; 2] {
        match self {
            Grouping::PairAB => [0, 1],
            Grouping::PairAC => [0, 2],
            Grouping::PairBC => [1, 2],
        }
    }
}

/// The invariants of one grouping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairInvariants {
    pub grouping: Grouping,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

/// Outcome of the two determinant conditions for one grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DConditions {
    /// |alpha| == |beta| within tolerance.
    pub modulus_match: bool,
    /// conj(gamma)^2 alpha beta real and non-negative within tolerance.
    pub phase_real_nonneg: bool,
}

impl DConditions {
    pub fn both(self) -> bool {
        self.modulus_match && self.phase_real_nonneg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    /// At least one grouping violates a condition: the state is uniquely
    /// determined by its two-party reduced states.
    UniqueGeneric,
    /// A single-qubit factor splits off; both factors are fixed by the
    /// marginals, so the state is uniquely determined.
    ProductSplit,
    /// Locally equivalent to a|000> + b|111>: distinct states with the same
    /// two-party marginals exist.
    SchmidtGhzClass,
}

/// Classification outcome with the invariant evidence attached.
#[derive(Debug, Clone)]
pub struct ClassificationVerdict {
    pub kind: VerdictKind,
    pub invariants: [PairInvariants; 3],
    pub d_conditions: [DConditions; 3],
    /// Index of the detached qubit when `kind == ProductSplit`.
    pub product_cut: Option<usize>,
    /// All nine invariants vanished, so the conditions held vacuously.
    pub degenerate: bool,
}

fn require_three_qubits(state: &PureState) -> Result<()> {
    if state.dims() != [2, 2, 2] {
        return Err(Error::UnsupportedDims {
            expected: vec![2, 2, 2],
            got: state.dims().to_vec(),
        });
    }
    Ok(())
}

/// The two 2x2 slices of the amplitude tensor along `sliced` (kept qubits in
/// original order index the rows and columns).
fn tensor_slices(amps: &[Complex64], sliced: usize) -> [[[Complex64; 2]; 2]; 2] {
    let kept: Vec<usize> = (0..3).filter(|&q| q != sliced).collect();
    let mut slices = [[[C_ZERO; 2]; 2]; 2];
    for (k, slice) in slices.iter_mut().enumerate() {
        for (r, row) in slice.iter_mut().enumerate() {
            for (col, value) in row.iter_mut().enumerate() {
                let mut digits = [0usize; 3];
                digits[sliced] = k;
                digits[kept[0]] = r;
                digits[kept[1]] = col;
                *value = amps[(digits[0] << 2) | (digits[1] << 1) | digits[2]];
            }
        }
    }
    slices
}

fn det2(m: &[[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Mixed determinant term: coefficient of x in det(M0 + x M1).
fn mixed_det(m0: &[[Complex64; 2]; 2], m1: &[[Complex64; 2]; 2]) -> Complex64 {
    m0[0][0] * m1[1][1] + m1[0][0] * m0[1][1] - m0[0][1] * m1[1][0] - m1[0][1] * m0[1][0]
}

/// Invariants of all three groupings.
///
/// For the kept pair AB these reduce to the closed forms
/// alpha = a011 a101 - a111 a001, beta = a000 a110 - a100 a010,
/// gamma = a000 a111 + a001 a110 - a100 a011 - a101 a010 in the amplitude
/// tensor a_ijk; the other groupings apply the same forms to the tensor with
/// the sliced index moved, which fixes the index permutation left open for
/// the B,C pair (validated against the numerical search oracle).
pub fn pair_invariants(state: &PureState) -> Result<[PairInvariants; 3]> {
    require_three_qubits(state)?;
    let amps = state.amplitudes();
    let mut out = [PairInvariants {
        grouping: Grouping::PairAB,
        alpha: C_ZERO,
        beta: C_ZERO,
        gamma: C_ZERO,
    }; 3];
    for (slot, &grouping) in Grouping::ALL.iter().enumerate() {
        let slices = tensor_slices(amps, grouping.sliced_qubit());
        out[slot] = PairInvariants {
            grouping,
            alpha: -det2(&slices[1]),
            beta: det2(&slices[0]),
            gamma: mixed_det(&slices[0], &slices[1]),
        };
    }
    Ok(out)
}

fn d_conditions(inv: &PairInvariants, tol: f64) -> DConditions {
    let na = inv.alpha.norm();
    let nb = inv.beta.norm();
    let ng = inv.gamma.norm();
    let modulus_match = fmath::abs(na - nb) <= tol * na.max(nb).max(INVARIANT_FLOOR);
    let w = inv.gamma.conj() * inv.gamma.conj() * inv.alpha * inv.beta;
    let bound = tol * ng * ng * na * nb + INVARIANT_FLOOR;
    let phase_real_nonneg = fmath::abs(w.im) <= bound && w.re >= -bound;
    DConditions {
        modulus_match,
        phase_real_nonneg,
    }
}

/// Decide whether a three-qubit pure state is uniquely determined by its
/// two-party reduced states. `tol` is the relative tolerance of the
/// conditions; [`DEFAULT_CLASSIFIER_TOL`] suits double precision.
pub fn classify(state: &PureState, tol: f64) -> Result<ClassificationVerdict> {
    require_three_qubits(state)?;
    let invariants = pair_invariants(state)?;
    let d_conditions = [
        d_conditions(&invariants[0], tol),
        d_conditions(&invariants[1], tol),
        d_conditions(&invariants[2], tol),
    ];
    let degenerate = invariants.iter().all(|inv| {
        inv.alpha.norm() <= INVARIANT_FLOOR
            && inv.beta.norm() <= INVARIANT_FLOOR
            && inv.gamma.norm() <= INVARIANT_FLOOR
    });

    let rho = density_from_pure(state);
    let mut product_cut = None;
    for q in 0..3 {
        let marginal = partial_trace(&rho, &[q])?;
        if marginal.purity() >= PRODUCT_PURITY {
            product_cut = Some(q);
            break;
        }
    }

    let kind = if product_cut.is_some() {
        VerdictKind::ProductSplit
    } else if d_conditions.iter().all(|d| d.both()) {
        VerdictKind::SchmidtGhzClass
    } else {
        VerdictKind::UniqueGeneric
    };

    Ok(ClassificationVerdict {
        kind,
        invariants,
        d_conditions,
        product_cut,
        degenerate,
    })
}

/// a|000> + b|111>.
pub fn ghz_state(a: Complex64, b: Complex64) -> Result<PureState> {
    let mut amps = vec![C_ZERO; 8];
    amps[0b000] = a;
    amps[0b111] = b;
    PureState::new(vec![2, 2, 2], amps)
}

/// The five-coefficient canonical family
/// a|000> + b|001> + c|010> + d|100> + e|111>.
pub fn five_term_state(coeffs: [Complex64; 5]) -> Result<PureState> {
    let mut amps = vec![C_ZERO; 8];
    amps[0b000] = coeffs[0];
    amps[0b001] = coeffs[1];
    amps[0b010] = coeffs[2];
    amps[0b100] = coeffs[3];
    amps[0b111] = coeffs[4];
    PureState::new(vec![2, 2, 2], amps)
}

/// The exceptional-class counterexample: the projector of a|000> + b|111>
/// and the mixture |a|^2 |000><000| + |b|^2 |111><111| share every two-party
/// reduced state yet differ by trace distance |a b|.
pub fn ghz_counterexample(
    a: Complex64,
    b: Complex64,
) -> Result<(DensityMatrix, DensityMatrix)> {
    if a.norm() <= INVARIANT_FLOOR || b.norm() <= INVARIANT_FLOOR {
        return Err(Error::DegenerateCoefficients);
    }
    let state = ghz_state(a, b)?;
    let pure = state.to_density();
    // Build the mixture from the normalized amplitudes so its diagonal is
    // bit-identical to the projector's and the marginals agree exactly.
    let mut mixed = ComplexMatrix::zeros(8, 8);
    mixed.set(0, 0, pure.matrix().get(0, 0));
    mixed.set(7, 7, pure.matrix().get(7, 7));
    let mixed = DensityMatrix::new(vec![2, 2, 2], mixed)?;
    Ok((pure, mixed))
}

/// Tunables of [`uniqueness_search`].
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Random restarts.
    pub restarts: usize,
    /// Environment dimension; default 2 for three qubits (no state matching
    /// all pair marginals ever uses more) and 16 for four (full
    /// purification).
    pub env_dim: Option<usize>,
    /// Acceptance threshold on the summed squared marginal residual.
    pub tolerance: f64,
    /// Trace distance below which a candidate does not count as distinct.
    pub distinctness: f64,
    /// Iteration cap per penalty stage.
    pub stage_iterations: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            env_dim: None,
            tolerance: 1e-8,
            distinctness: 1e-3,
            stage_iterations: 400,
            seed: 42,
        }
    }
}

/// Outcome of the numerical uniqueness search.
#[derive(Debug, Clone)]
pub struct SearchReport {
    /// A state distinct from the input with matching pair marginals exists.
    pub alternative_found: bool,
    /// The found state; present only when `alternative_found`.
    pub alternative: Option<DensityMatrix>,
    /// Trace distance between the best candidate and the input state.
    pub trace_distance_to_input: f64,
    /// Summed squared marginal residual of the best candidate.
    pub marginal_residual: f64,
    /// Restarts performed.
    pub restarts: usize,
}

const SEARCH_MU_STAGES: [f64; 6] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

/// Search for a global state of (qubits x environment) whose qubit marginals
/// reproduce all pair marginals of `state` while its qubit reduced state
/// stays away from the input.
///
/// Each restart runs a penalty-scheduled gradient ascent over purifications
/// (distance from the input rewarded, marginal mismatch penalized with
/// increasing weight), then polishes the marginal residual alone. The ascent
/// maximizes squared Frobenius distance, which is smooth; the verdict is
/// taken in trace distance.
pub fn uniqueness_search(state: &PureState, cfg: &SearchConfig) -> Result<SearchReport> {
    let n = state.dims().len();
    if !(state.dims().iter().all(|&d| d == 2) && (n == 3 || n == 4)) {
        return Err(Error::UnsupportedDims {
            expected: vec![2, 2, 2],
            got: state.dims().to_vec(),
        });
    }
    let env_dim = cfg.env_dim.unwrap_or(if n == 3 { 2 } else { 16 }).max(1);
    let qubit_dim = 1usize << n;

    let rho_in = density_from_pure(state);
    let targets = MarginalSet::from_state(&rho_in, 2)?;
    let rho_matrix = rho_in.matrix().clone();

    struct Candidate {
        meets_tolerance: bool,
        trace_distance: f64,
        residual: f64,
        omega: ComplexMatrix,
    }

    let root = crate::rng::Rng::seed_from(cfg.seed);
    let restarts = cfg.restarts.max(1);
    let mut best: Option<Candidate> = None;

    for restart in 0..restarts {
        let mut rng = root.substream(restart as u64);
        let mut psi = rng.gaussian_matrix(qubit_dim, env_dim);
        let norm = psi.frobenius_norm();
        psi = psi.scale(1.0 / norm);

        for stage in 0..=SEARCH_MU_STAGES.len() {
            let polish = stage == SEARCH_MU_STAGES.len();
            let mu = if polish { 1.0 } else { SEARCH_MU_STAGES[stage] };
            ascend_purification(
                &mut psi,
                &rho_matrix,
                &targets,
                mu,
                polish,
                cfg.stage_iterations,
            )?;
        }

        let omega = psi.matmul(&psi.adjoint()).hermitize();
        let residual = targets.residual_sq(&omega);
        let dist = trace_distance_matrix(&omega, &rho_matrix)?;
        let meets = residual <= cfg.tolerance;
        let candidate = Candidate {
            meets_tolerance: meets,
            trace_distance: dist,
            residual,
            omega,
        };
        let better = match &best {
            None => true,
            Some(b) => match (candidate.meets_tolerance, b.meets_tolerance) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => candidate.trace_distance > b.trace_distance,
                (false, false) => candidate.residual < b.residual,
            },
        };
        if better {
            best = Some(candidate);
        }
    }

    let best = best.expect("at least one restart runs");
    let alternative_found =
        best.meets_tolerance && best.trace_distance >= cfg.distinctness;
    Ok(SearchReport {
        alternative_found,
        alternative: alternative_found.then(|| {
            DensityMatrix::new_unchecked(state.dims().to_vec(), best.omega.clone())
        }),
        trace_distance_to_input: best.trace_distance,
        marginal_residual: best.residual,
        restarts,
    })
}

/// Gradient ascent over the normalized purification matrix. `polish` drops
/// the distance reward and descends the marginal residual alone.
fn ascend_purification(
    psi: &mut ComplexMatrix,
    rho_in: &ComplexMatrix,
    targets: &MarginalSet,
    mu: f64,
    polish: bool,
    cap: usize,
) -> Result<()> {
    let objective = |omega: &ComplexMatrix| -> f64 {
        let r = targets.residual_sq(omega);
        if polish {
            -r
        } else {
            let d = omega.frobenius_dist(rho_in);
            d * d - mu * r
        }
    };

    // Cap how far a single accepted step may move the unit-norm iterate.
    // Large penalty gradients otherwise teleport it across the feasible set
    // into the basin of the input state, which is a stationary point of the
    // distance reward.
    const TRUST_RADIUS: f64 = 0.2;

    let mut omega = psi.matmul(&psi.adjoint());
    let mut value = objective(&omega);
    let mut step = 0.5f64;
    let mut stall = 0usize;

    for _ in 0..cap {
        let mut w = targets.residual_sq_gradient(&omega).scale(-1.0);
        if !polish {
            w = w.scale(mu);
            w = w.add_scaled(&omega.sub(rho_in), 2.0);
        }
        let grad = w.matmul(psi);
        // Project onto the tangent space of the unit Frobenius sphere.
        let radial: f64 = grad
            .data
            .iter()
            .zip(psi.data.iter())
            .map(|(g, p)| (p.conj() * g).re)
            .sum();
        let z = grad.sub(&psi.scale(radial));
        let z_norm = z.frobenius_norm();
        if z_norm <= 1e-11 {
            break;
        }

        let mut trial = step.min(TRUST_RADIUS / z_norm);
        let mut accepted = false;
        for _ in 0..40 {
            let mut candidate = psi.add_scaled(&z, trial);
            let norm = candidate.frobenius_norm();
            if !(norm.is_finite() && norm > 0.0) {
                trial *= 0.5;
                continue;
            }
            candidate = candidate.scale(1.0 / norm);
            let omega_new = candidate.matmul(&candidate.adjoint());
            let value_new = objective(&omega_new);
            if value_new >= value - 1e-14 * (1.0 + fmath::abs(value)) {
                if value_new - value <= 1e-13 * (1.0 + fmath::abs(value)) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                *psi = candidate;
                omega = omega_new;
                value = value_new;
                accepted = true;
                break;
            }
            trial *= 0.5;
        }
        if !accepted || stall >= 25 {
            break;
        }
        step = (trial * 2.0).min(0.5);
    }
    if !value.is_finite() {
        return Err(Error::Numerical("search objective became non-finite"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::von_neumann_entropy;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real5(v: [f64; 5]) -> [Complex64; 5] {
        [
            c(v[0], 0.0),
            c(v[1], 0.0),
            c(v[2], 0.0),
            c(v[3], 0.0),
            c(v[4], 0.0),
        ]
    }

    fn generic_state() -> PureState {
        let n = 55f64.sqrt();
        five_term_state(real5([1.0 / n, 2.0 / n, 3.0 / n, 4.0 / n, 5.0 / n])).unwrap()
    }

    #[test]
    fn ghz_invariants_for_kept_ab() {
        let s = 0.5f64.sqrt();
        let psi = ghz_state(c(s, 0.0), c(s, 0.0)).unwrap();
        let inv = pair_invariants(&psi).unwrap();
        assert!(inv[0].alpha.norm() < 1e-15);
        assert!(inv[0].beta.norm() < 1e-15);
        assert!((inv[0].gamma - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn generic_state_invariants_match_closed_forms() {
        // alpha = -e b, beta = -d c, gamma = a e for the five-term family.
        let inv = pair_invariants(&generic_state()).unwrap();
        assert!((inv[0].alpha - c(-10.0 / 55.0, 0.0)).norm() < 1e-14);
        assert!((inv[0].beta - c(-12.0 / 55.0, 0.0)).norm() < 1e-14);
        assert!((inv[0].gamma - c(5.0 / 55.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn basis_state_has_all_zero_invariants() {
        let psi = PureState::basis(vec![2, 2, 2], 0).unwrap();
        for inv in pair_invariants(&psi).unwrap() {
            assert!(inv.alpha.norm() < 1e-15);
            assert!(inv.beta.norm() < 1e-15);
            assert!(inv.gamma.norm() < 1e-15);
        }
    }

    #[test]
    fn ghz_classifies_as_schmidt_class() {
        let s = 0.5f64.sqrt();
        let psi = ghz_state(c(s, 0.0), c(s, 0.0)).unwrap();
        let verdict = classify(&psi, DEFAULT_CLASSIFIER_TOL).unwrap();
        assert_eq!(verdict.kind, VerdictKind::SchmidtGhzClass);
        assert!(!verdict.degenerate);
    }

    #[test]
    fn generic_state_classifies_as_unique() {
        let verdict = classify(&generic_state(), DEFAULT_CLASSIFIER_TOL).unwrap();
        assert_eq!(verdict.kind, VerdictKind::UniqueGeneric);
        assert!(!verdict.d_conditions[0].modulus_match);
    }

    #[test]
    fn product_state_classifies_as_product_split() {
        let s = 0.5f64.sqrt();
        let mut amps = vec![C_ZERO; 8];
        amps[0b000] = c(s, 0.0);
        amps[0b011] = c(s, 0.0);
        let psi = PureState::new(vec![2, 2, 2], amps).unwrap();
        let verdict = classify(&psi, DEFAULT_CLASSIFIER_TOL).unwrap();
        assert_eq!(verdict.kind, VerdictKind::ProductSplit);
        assert_eq!(verdict.product_cut, Some(0));
    }

    #[test]
    fn counterexample_marginals_agree_exactly() {
        let (pure, mixed) = ghz_counterexample(c(0.9f64.sqrt(), 0.0), c(0.1f64.sqrt(), 0.0)).unwrap();
        for pair in [[0usize, 1], [0, 2], [1, 2]] {
            let a = partial_trace(&pure, &pair).unwrap();
            let b = partial_trace(&mixed, &pair).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-14);
        }
        let d = crate::state::trace_distance(&pure, &mixed).unwrap();
        assert!((d - 0.3).abs() < 1e-10, "distance {d}");
    }

    #[test]
    fn counterexample_balanced_distance_is_half() {
        let s = 0.5f64.sqrt();
        let (pure, mixed) = ghz_counterexample(c(s, 0.0), c(s, 0.0)).unwrap();
        let d = crate::state::trace_distance(&pure, &mixed).unwrap();
        assert!((d - 0.5).abs() < 1e-10);
        // The mixture has one bit of entropy, the pure state none.
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-10);
        assert!(von_neumann_entropy(&pure).unwrap() < 1e-10);
    }

    #[test]
    fn counterexample_rejects_degenerate_coefficients() {
        assert!(matches!(
            ghz_counterexample(c(1.0, 0.0), C_ZERO).unwrap_err(),
            Error::DegenerateCoefficients
        ));
    }

    #[test]
    fn search_finds_ghz_alternative() {
        let s = 0.5f64.sqrt();
        let psi = ghz_state(c(s, 0.0), c(s, 0.0)).unwrap();
        let cfg = SearchConfig {
            restarts: 4,
            ..SearchConfig::default()
        };
        let report = uniqueness_search(&psi, &cfg).unwrap();
        assert!(report.alternative_found, "residual {} distance {}",
            report.marginal_residual, report.trace_distance_to_input);
        // The found state really does share the pair marginals.
        let alt = report.alternative.unwrap();
        let rho = psi.to_density();
        for pair in [[0usize, 1], [0, 2], [1, 2]] {
            let a = partial_trace(&alt, &pair).unwrap();
            let b = partial_trace(&rho, &pair).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-6);
        }
    }

    #[test]
    fn search_finds_nothing_for_generic_state() {
        let cfg = SearchConfig {
            restarts: 6,
            ..SearchConfig::default()
        };
        let report = uniqueness_search(&generic_state(), &cfg).unwrap();
        assert!(
            !report.alternative_found,
            "distance {} residual {}",
            report.trace_distance_to_input, report.marginal_residual
        );
    }

    #[test]
    fn search_rejects_unsupported_sizes() {
        let psi = PureState::basis(vec![2, 2], 0).unwrap();
        assert!(uniqueness_search(&psi, &SearchConfig::default()).is_err());
    }
}
