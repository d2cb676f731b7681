//! Maximum-entropy reconstruction from marginal sets, the irreducible
//! n-party correlation measure, and marginal-set feasibility testing.
//!
//! Two solvers cooperate here:
//!
//! * a dual gradient descent on g(L) = ln Tr exp(sum_p L_p (x) 1) - sum_p
//!   Tr(L_p t_p), whose gradient with respect to each multiplier is
//!   marginal(rho(L)) - target_p. It is exact for full-rank reconstructions
//!   but the multipliers diverge when the targets force rank deficiency;
//! * a primal penalty ascent maximizing S(rho) - mu * residual(rho) by
//!   entropic mirror steps, with mu stepped up geometrically and a final
//!   feasibility polish. It reaches rank-deficient optima and serves as the
//!   fallback (and as an independent oracle for the dual).
//!
//! Feasibility testing minimizes the residual alone over the factorized
//! parametrization rho = G G^dagger / Tr(G G^dagger).

use alloc::vec::Vec;

use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::fmath;
use crate::matrix::ComplexMatrix;
use crate::state::{
    embed_operator, normalize_subset, partial_trace, partial_trace_matrix, trace_distance,
    von_neumann_entropy, DensityMatrix, SUPPORT_CUTOFF,
};

/// Penalty weights for the primal oracle, stepped up geometrically. The tail
/// beyond 1e6 is needed when the optimum is rank deficient along directions
/// where the marginal map has small curvature; the leftover eigenvalue mass
/// scales like 1/mu.
const MU_STAGES: [f64; 9] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9];

/// Tunables shared by the solvers in this module.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Total iteration budget per solve.
    pub max_iterations: usize,
    /// Base gradient step; backtracking halves it on objective regression.
    pub step_size: f64,
    /// Dual convergence target: max Frobenius distance between achieved and
    /// requested marginals.
    pub dual_tolerance: f64,
    /// Feasibility threshold on the summed squared marginal residual; also
    /// the convergence target of the primal penalty solver.
    pub feasibility_tolerance: f64,
    /// Random restarts for the primal solvers.
    pub restarts: usize,
    /// Seed for restart initialization.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step_size: 1.0,
            dual_tolerance: 1e-8,
            feasibility_tolerance: 1e-6,
            restarts: 5,
            seed: 42,
        }
    }
}

/// A collection of reduced density matrices, each labeled by the subsystem
/// subset it describes. Construction enforces pairwise overlap consistency.
#[derive(Debug, Clone)]
pub struct MarginalSet {
    dims: Vec<usize>,
    parts: Vec<(Vec<usize>, DensityMatrix)>,
}

/// Max-entry tolerance for the overlap-consistency requirement.
pub const OVERLAP_TOL: f64 = 1e-8;

impl MarginalSet {
    pub fn new(dims: Vec<usize>, parts: Vec<(Vec<usize>, DensityMatrix)>) -> Result<Self> {
        let count = dims.len();
        let mut normalized = Vec::with_capacity(parts.len());
        for (subset, marginal) in parts {
            let subset = normalize_subset(&subset, count)?;
            let expected: Vec<usize> = subset.iter().map(|&s| dims[s]).collect();
            if marginal.dims() != expected.as_slice() {
                return Err(Error::UnsupportedDims {
                    expected,
                    got: marginal.dims().to_vec(),
                });
            }
            normalized.push((subset, marginal));
        }
        let set = Self {
            dims,
            parts: normalized,
        };
        set.check_overlaps()?;
        Ok(set)
    }

    /// All arity-sized marginals of a state.
    pub fn from_state(rho: &DensityMatrix, arity: usize) -> Result<Self> {
        let n = rho.subsystem_count();
        if arity == 0 || arity >= n {
            return Err(Error::DimensionMismatch {
                expected: n.saturating_sub(1),
                got: arity,
            });
        }
        let mut parts = Vec::new();
        for subset in subsets_of_size(n, arity) {
            let marginal = partial_trace(rho, &subset)?;
            parts.push((subset, marginal));
        }
        Self::new(rho.dims().to_vec(), parts)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parts(&self) -> &[(Vec<usize>, DensityMatrix)] {
        &self.parts
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_overlaps(&self) -> Result<()> {
        for i in 0..self.parts.len() {
            for j in (i + 1)..self.parts.len() {
                let (sa, ma) = &self.parts[i];
                let (sb, mb) = &self.parts[j];
                let common: Vec<usize> =
                    sa.iter().copied().filter(|s| sb.contains(s)).collect();
                if common.is_empty() {
                    continue;
                }
                let pos_a: Vec<usize> = common
                    .iter()
                    .map(|s| sa.iter().position(|x| x == s).unwrap())
                    .collect();
                let pos_b: Vec<usize> = common
                    .iter()
                    .map(|s| sb.iter().position(|x| x == s).unwrap())
                    .collect();
                let ra = partial_trace(ma, &pos_a)?;
                let rb = partial_trace(mb, &pos_b)?;
                let deviation = ra.matrix().max_abs_diff(rb.matrix());
                if deviation > OVERLAP_TOL {
                    return Err(Error::OverlapInconsistent {
                        a: sa.clone(),
                        b: sb.clone(),
                        deviation,
                    });
                }
            }
        }
        Ok(())
    }

    /// Max Frobenius distance between the marginals of `matrix` and the
    /// targets.
    pub(crate) fn residual_max(&self, matrix: &ComplexMatrix) -> f64 {
        let mut worst = 0.0f64;
        for (subset, target) in &self.parts {
            let got = partial_trace_matrix(matrix, &self.dims, subset);
            worst = worst.max(got.frobenius_dist(target.matrix()));
        }
        worst
    }

    /// Sum of squared Frobenius distances between marginals and targets.
    pub(crate) fn residual_sq(&self, matrix: &ComplexMatrix) -> f64 {
        let mut acc = 0.0f64;
        for (subset, target) in &self.parts {
            let got = partial_trace_matrix(matrix, &self.dims, subset);
            let d = got.frobenius_dist(target.matrix());
            acc += d * d;
        }
        acc
    }

    /// Gradient of `residual_sq` with respect to the full matrix:
    /// 2 sum_p embed(marginal_p - target_p).
    pub(crate) fn residual_sq_gradient(&self, matrix: &ComplexMatrix) -> ComplexMatrix {
        let dim = self.total_dim();
        let mut grad = ComplexMatrix::zeros(dim, dim);
        for (subset, target) in &self.parts {
            let diff = partial_trace_matrix(matrix, &self.dims, subset).sub(target.matrix());
            let lifted = embed_operator(&diff, subset, &self.dims)
                .expect("subset validated at construction");
            grad = grad.add_scaled(&lifted, 2.0);
        }
        grad
    }
}

/// All size-k subsets of 0..n, lexicographic.
pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for s in start..n {
            current.push(s);
            recurse(n, k, s + 1, current, out);
            current.pop();
        }
    }
    recurse(n, k, 0, &mut current, &mut out);
    out
}

/// Result of a max-entropy reconstruction.
#[derive(Debug, Clone)]
pub struct MaxEntResult {
    /// The reconstructed state.
    pub state: DensityMatrix,
    /// Lagrange multipliers per subset; empty for the penalty path, which
    /// carries none.
    pub multipliers: Vec<(Vec<usize>, ComplexMatrix)>,
    /// Max Frobenius distance between achieved and requested marginals.
    pub residual: f64,
    /// Gradient steps consumed.
    pub iterations: usize,
    /// Whether the residual target was met.
    pub converged: bool,
}

/// Closed-form two-party maximum-entropy state: the tensor product of the
/// marginals. Its reduced states equal the inputs exactly and its entropy is
/// the sum of theirs.
pub fn maxent_two_party(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> DensityMatrix {
    rho_a.tensor(rho_b)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = values.iter().map(|&v| fmath::exp(v - m)).sum();
    m + fmath::ln(sum)
}

/// Dual gradient descent for the exponential-family maximum-entropy state
/// exp(sum_p L_p (x) 1 - ln Z) matching the target marginals.
///
/// When the targets force a rank-deficient optimum the multipliers diverge;
/// the solve then stops at the iteration cap and reports `converged = false`
/// with the honestly achieved residual. Use [`maxent_primal`] for those.
pub fn maxent_from_marginals(targets: &MarginalSet, cfg: &SolverConfig) -> Result<MaxEntResult> {
    let dims = targets.dims().to_vec();
    let dim = targets.total_dim();
    let parts = targets.parts();

    let mut lambdas: Vec<ComplexMatrix> = parts
        .iter()
        .map(|(subset, _)| {
            let d: usize = subset.iter().map(|&s| dims[s]).product();
            ComplexMatrix::zeros(d, d)
        })
        .collect();

    let build = |lams: &[ComplexMatrix]| -> Result<ComplexMatrix> {
        let mut h = ComplexMatrix::zeros(dim, dim);
        for ((subset, _), lam) in parts.iter().zip(lams.iter()) {
            h = h.add(&embed_operator(lam, subset, &dims)?);
        }
        Ok(h)
    };

    // Dual value and the Gibbs state of the current multipliers.
    let evaluate = |lams: &[ComplexMatrix]| -> Result<(f64, ComplexMatrix)> {
        let h = build(lams)?;
        let eig = eigh(&h)?;
        let ln_z = log_sum_exp(&eig.values);
        let rho = eig.apply(|v| fmath::exp(v - ln_z));
        let mut dual = ln_z;
        for ((_, target), lam) in parts.iter().zip(lams.iter()) {
            dual -= lam.trace_product(target.matrix()).re;
        }
        if !dual.is_finite() {
            return Err(Error::Numerical("dual objective became non-finite"));
        }
        Ok((dual, rho))
    };

    let (mut dual, mut rho) = evaluate(&lambdas)?;
    let mut step = cfg.step_size;
    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        let grads: Vec<ComplexMatrix> = parts
            .iter()
            .map(|(subset, target)| {
                partial_trace_matrix(&rho, &dims, subset).sub(target.matrix())
            })
            .collect();
        let residual = grads.iter().map(|g| g.frobenius_norm()).fold(0.0, f64::max);
        if !residual.is_finite() {
            return Err(Error::Numerical("marginal residual became non-finite"));
        }
        if residual <= cfg.dual_tolerance {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iterations {
            break;
        }

        // Backtracking: halve the step until the dual stops increasing.
        let mut accepted = false;
        for _ in 0..40 {
            let candidate: Vec<ComplexMatrix> = lambdas
                .iter()
                .zip(grads.iter())
                .map(|(lam, g)| lam.add_scaled(g, -step))
                .collect();
            let (dual_new, rho_new) = evaluate(&candidate)?;
            if dual_new <= dual + 1e-14 * (1.0 + fmath::abs(dual)) {
                lambdas = candidate;
                dual = dual_new;
                rho = rho_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
        step = (step * 2.0).min(cfg.step_size);
    }

    let residual = targets.residual_max(&rho);
    let state = DensityMatrix::new_unchecked(dims.clone(), rho.hermitize());
    let multipliers: Vec<(Vec<usize>, ComplexMatrix)> = parts
        .iter()
        .zip(lambdas)
        .map(|((subset, _), lam)| (subset.clone(), lam.hermitize()))
        .collect();
    Ok(MaxEntResult {
        state,
        multipliers,
        residual,
        iterations,
        converged,
    })
}

/// Gradient descent of the squared marginal residual over the factorized
/// parametrization rho = G G^dagger / Tr(G G^dagger). Returns iterations
/// consumed.
fn factored_residual_descent(
    targets: &MarginalSet,
    g: &mut ComplexMatrix,
    cfg: &SolverConfig,
    cap: usize,
) -> Result<usize> {
    let normalize = |g: &ComplexMatrix| -> Result<(ComplexMatrix, f64)> {
        let gg = g.matmul(&g.adjoint());
        let n = gg.trace().re;
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical("factor matrix degenerated"));
        }
        Ok((gg.scale(1.0 / n).hermitize(), n))
    };

    let (mut rho, mut norm) = normalize(g)?;
    let mut value = -targets.residual_sq(&rho);
    let mut step = cfg.step_size;
    let mut iterations = 0usize;
    let mut stall = 0usize;

    while iterations < cap {
        let w = targets.residual_sq_gradient(&rho).scale(-1.0);
        // Lift to the factor: d/dG of F(G G^dagger / n).
        let wg = w.matmul(g);
        let inner = w.trace_product(&rho).re;
        let z = wg.sub(&g.scale(inner)).scale(1.0 / norm);
        let z_norm = z.frobenius_norm();
        if z_norm <= 1e-10 * (1.0 + g.frobenius_norm()) {
            break;
        }

        let mut accepted = false;
        for _ in 0..40 {
            let candidate = g.add_scaled(&z, step);
            if !candidate.all_finite() {
                step *= 0.5;
                continue;
            }
            let (rho_new, norm_new) = normalize(&candidate)?;
            let value_new = -targets.residual_sq(&rho_new);
            if value_new >= value - 1e-14 * (1.0 + fmath::abs(value)) {
                if value_new - value <= 1e-13 * (1.0 + fmath::abs(value)) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                *g = candidate;
                rho = rho_new;
                norm = norm_new;
                value = value_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted || stall >= 25 {
            break;
        }
        step = (step * 2.0).min(cfg.step_size);
    }
    Ok(iterations)
}

/// State of the entropic mirror ascent: the density matrix together with its
/// exact logarithm (both derive from the same exponent, so no clamping is
/// ever needed after initialization).
struct MirrorIterate {
    rho: ComplexMatrix,
    log_rho: ComplexMatrix,
    entropy_nats: f64,
}

impl MirrorIterate {
    fn from_exponent(exponent: &ComplexMatrix) -> Result<Self> {
        let eig = eigh(exponent)?;
        let ln_z = log_sum_exp(&eig.values);
        let rho = eig.apply(|v| fmath::exp(v - ln_z));
        let log_rho = eig.apply(|v| v - ln_z);
        let entropy_nats = -eig
            .values
            .iter()
            .map(|&v| fmath::exp(v - ln_z) * (v - ln_z))
            .sum::<f64>();
        if !entropy_nats.is_finite() {
            return Err(Error::Numerical("mirror iterate became non-finite"));
        }
        Ok(Self {
            rho,
            log_rho,
            entropy_nats,
        })
    }

    fn uniform(dim: usize) -> Self {
        let d = dim as f64;
        Self {
            rho: ComplexMatrix::identity(dim).scale(1.0 / d),
            log_rho: ComplexMatrix::identity(dim).scale(-fmath::ln(d)),
            entropy_nats: fmath::ln(d),
        }
    }
}

/// One penalty stage of entropic mirror ascent on F = S(rho) - mu R(rho)
/// (or -R alone when `entropy` is false): each step moves to
/// exp(ln rho + eta * grad F - ln Z), which lets eigenvalues decay
/// exponentially toward rank-deficient optima.
fn mirror_stage(
    targets: &MarginalSet,
    iterate: &mut MirrorIterate,
    mu: f64,
    entropy: bool,
    cap: usize,
) -> Result<usize> {
    let value_of = |it: &MirrorIterate| -> f64 {
        let r = targets.residual_sq(&it.rho);
        if entropy {
            it.entropy_nats - mu * r
        } else {
            -r
        }
    };

    let mut value = value_of(iterate);
    let mut step = 1.0f64;
    let mut iterations = 0usize;
    let mut stall = 0usize;

    while iterations < cap {
        // grad F = -(ln rho + I) - mu grad R; the identity shift is absorbed
        // by the normalization, so only the structured parts matter.
        let penalty = targets.residual_sq_gradient(&iterate.rho).scale(mu);
        let grad = if entropy {
            iterate.log_rho.scale(-1.0).sub(&penalty)
        } else {
            penalty.scale(-1.0 / mu)
        };

        let mut accepted = false;
        for _ in 0..60 {
            let exponent = iterate.log_rho.add_scaled(&grad, step);
            let candidate = MirrorIterate::from_exponent(&exponent)?;
            let value_new = value_of(&candidate);
            if value_new >= value - 1e-14 * (1.0 + fmath::abs(value)) {
                if value_new - value <= 1e-13 * (1.0 + fmath::abs(value)) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                *iterate = candidate;
                value = value_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted || stall >= 25 {
            break;
        }
        step = (step * 2.0).min(1.0);
    }
    Ok(iterations)
}

/// Primal penalty oracle: maximize S(rho) - mu * residual(rho) with mu
/// stepped up geometrically, followed by a pure feasibility polish. Reaches
/// the rank-deficient optima the dual cannot represent.
///
/// `warm_start` seeds the first restart, ideally with a state already
/// matching the targets (the source state, or a feasibility witness); the
/// objective is concave in rho, so the start affects speed, not the optimum.
/// Mirror ascent moves eigenvalues quickly but rotates eigenvectors slowly,
/// which makes a feasible start worth having when the optimum is rank
/// deficient.
pub fn maxent_primal(
    targets: &MarginalSet,
    cfg: &SolverConfig,
    warm_start: Option<&DensityMatrix>,
) -> Result<MaxEntResult> {
    let dims = targets.dims().to_vec();
    let dim = targets.total_dim();
    let restarts = cfg.restarts.max(1);
    let cap = (cfg.max_iterations / (MU_STAGES.len() + 1)).max(150);
    let root = crate::rng::Rng::seed_from(cfg.seed);

    enum Start {
        /// From a state that already matches the targets: skip the wandering
        /// low-penalty stages, which would move it off its support and run
        /// into the slow eigenvector dynamics on the way back.
        Warm,
        Uniform,
        Random(u64),
    }
    let mut starts = Vec::with_capacity(restarts);
    if warm_start.is_some() {
        starts.push(Start::Warm);
    }
    starts.push(Start::Uniform);
    let mut index = 1u64;
    while starts.len() < restarts {
        starts.push(Start::Random(index));
        index += 1;
    }
    starts.truncate(restarts.max(1));

    let mut total_iterations = 0usize;
    let mut best: Option<(f64, f64, ComplexMatrix)> = None; // (entropy, residual_max, rho)
    for start in starts {
        let (mut iterate, stages): (MirrorIterate, &[f64]) = match start {
            Start::Warm => {
                let rho = warm_start.expect("warm start present");
                // Keep kernel modes representable but deeply suppressed.
                let eig = eigh(rho.matrix())?;
                let iterate =
                    MirrorIterate::from_exponent(&eig.apply(|v| fmath::ln(v.max(1e-15))))?;
                (iterate, &MU_STAGES[5..])
            }
            Start::Uniform => (MirrorIterate::uniform(dim), &MU_STAGES[..]),
            Start::Random(index) => {
                let g = root.substream(index).gaussian_matrix(dim, dim);
                let gg = g.matmul(&g.adjoint());
                let mixed = gg
                    .scale(0.5 / gg.trace().re)
                    .add(&ComplexMatrix::identity(dim).scale(0.5 / dim as f64));
                let eig = eigh(&mixed)?;
                (
                    MirrorIterate::from_exponent(&eig.apply(fmath::ln))?,
                    &MU_STAGES[..],
                )
            }
        };
        for &mu in stages {
            total_iterations += mirror_stage(targets, &mut iterate, mu, true, cap)?;
        }
        total_iterations += mirror_stage(targets, &mut iterate, 1.0, false, cap)?;

        let rho = iterate.rho.hermitize();
        let residual = targets.residual_max(&rho);
        let mut entropy = 0.0;
        for &lam in &eigh(&rho)?.values {
            if lam > SUPPORT_CUTOFF {
                entropy -= lam * fmath::log2(lam);
            }
        }

        let better = match &best {
            None => true,
            Some((best_entropy, best_residual, _)) => {
                let ok = residual <= cfg.feasibility_tolerance;
                let best_ok = *best_residual <= cfg.feasibility_tolerance;
                match (ok, best_ok) {
                    (true, false) => true,
                    (false, true) => false,
                    (true, true) => entropy > *best_entropy,
                    (false, false) => residual < *best_residual,
                }
            }
        };
        if better {
            best = Some((entropy, residual, rho));
        }
    }

    let (_, residual, rho) = best.expect("at least one restart runs");
    Ok(MaxEntResult {
        state: DensityMatrix::new_unchecked(dims, rho),
        multipliers: Vec::new(),
        residual,
        iterations: total_iterations,
        converged: residual <= cfg.feasibility_tolerance,
    })
}

/// Outcome of [`irreducible_correlation`].
#[derive(Debug, Clone)]
pub struct CorrelationReport {
    /// S(rho_tilde) - S(rho) in bits.
    pub correlation_bits: f64,
    /// Entropy of the reconstruction, bits.
    pub reconstruction_entropy_bits: f64,
    /// Entropy of the input state, bits.
    pub state_entropy_bits: f64,
    /// The max-entropy reconstruction.
    pub reconstruction: DensityMatrix,
    /// Auxiliary distance between reconstruction and input; reported without
    /// endorsing it as the canonical correlation distance.
    pub trace_distance: f64,
    /// Marginal residual (max Frobenius) of the reconstruction.
    pub residual: f64,
    /// Whether the solver met its residual target.
    pub converged: bool,
    /// True when the penalty fallback produced the reconstruction.
    pub used_penalty: bool,
}

/// Irreducible correlation: the entropy gap between the maximum-entropy state
/// consistent with all arity-sized marginals of `rho` and `rho` itself.
///
/// The dual solver runs first; if its multipliers diverge (rank-deficient
/// targets), the primal penalty oracle takes over and the `used_penalty`
/// flag records that.
pub fn irreducible_correlation(
    rho: &DensityMatrix,
    arity: usize,
    cfg: &SolverConfig,
) -> Result<CorrelationReport> {
    let targets = MarginalSet::from_state(rho, arity)?;
    let dual = maxent_from_marginals(&targets, cfg)?;
    let (result, used_penalty) = if dual.converged {
        (dual, false)
    } else {
        let primal = maxent_primal(&targets, cfg, Some(rho))?;
        if primal.converged || primal.residual < dual.residual {
            (primal, true)
        } else {
            (dual, false)
        }
    };

    let s_tilde = von_neumann_entropy(&result.state)?;
    let s_rho = von_neumann_entropy(rho)?;
    Ok(CorrelationReport {
        correlation_bits: s_tilde - s_rho,
        reconstruction_entropy_bits: s_tilde,
        state_entropy_bits: s_rho,
        trace_distance: trace_distance(&result.state, rho)?,
        residual: result.residual,
        converged: result.converged,
        used_penalty,
        reconstruction: result.state,
    })
}

/// Numerical evidence for whether a marginal set is realizable by any global
/// state.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    /// True when some state matches all targets within tolerance.
    pub feasible: bool,
    /// Smallest summed squared marginal residual found.
    pub best_residual: f64,
    /// The state achieving `best_residual`.
    pub witness: DensityMatrix,
    /// Restarts performed.
    pub restarts_used: usize,
}

/// Minimize residual(rho) = sum_p ||marginal_p(rho) - target_p||_F^2 over
/// density matrices via the factorized parametrization, with random restarts.
///
/// The factored descent orients the support quickly but approaches
/// rank-deficient optima only polynomially, so each restart finishes with a
/// mirror-descent polish that suppresses stray eigenvalues exponentially.
pub fn marginal_feasibility(targets: &MarginalSet, cfg: &SolverConfig) -> Result<FeasibilityReport> {
    let dims = targets.dims().to_vec();
    let dim = targets.total_dim();
    let restarts = cfg.restarts.max(1);
    let cap = cfg.max_iterations.max(300);
    let root = crate::rng::Rng::seed_from(cfg.seed);

    let mut best: Option<(f64, ComplexMatrix)> = None;
    for restart in 0..restarts {
        let mut g = if restart == 0 {
            ComplexMatrix::identity(dim)
        } else {
            root.substream(restart as u64).gaussian_matrix(dim, dim)
        };
        factored_residual_descent(targets, &mut g, cfg, cap)?;
        let gg = g.matmul(&g.adjoint());
        let coarse = gg.scale(1.0 / gg.trace().re).hermitize();
        let eig = eigh(&coarse)?;
        let mut iterate =
            MirrorIterate::from_exponent(&eig.apply(|v| fmath::ln(v.max(1e-18))))?;
        mirror_stage(targets, &mut iterate, 1.0, false, cap / 2)?;
        let rho = iterate.rho.hermitize();
        let residual = targets.residual_sq(&rho);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, rho));
        }
    }

    let (best_residual, rho) = best.expect("at least one restart runs");
    Ok(FeasibilityReport {
        feasible: best_residual <= cfg.feasibility_tolerance,
        best_residual,
        witness: DensityMatrix::new_unchecked(dims, rho),
        restarts_used: restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{Complex64, C_ZERO};
    use crate::rng::{random_density, Rng};
    use crate::state::PureState;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_state() -> PureState {
        let s = 0.5f64.sqrt();
        PureState::new(vec![2, 2], vec![c(s, 0.0), C_ZERO, C_ZERO, c(s, 0.0)]).unwrap()
    }

    #[test]
    fn two_party_product_of_maximally_mixed() {
        let a = DensityMatrix::maximally_mixed(vec![2]);
        let b = DensityMatrix::maximally_mixed(vec![2]);
        let ab = maxent_two_party(&a, &b);
        let expected = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(ab.matrix().max_abs_diff(expected.matrix()) < 1e-15);
    }

    #[test]
    fn two_party_pure_factors() {
        let zero = PureState::basis(vec![2], 0).unwrap().to_density();
        let s = 0.5f64.sqrt();
        let plus = PureState::new(vec![2], vec![c(s, 0.0), c(s, 0.0)])
            .unwrap()
            .to_density();
        let joint = maxent_two_party(&zero, &plus);
        // Marginals equal the inputs exactly.
        let back_a = partial_trace(&joint, &[0]).unwrap();
        let back_b = partial_trace(&joint, &[1]).unwrap();
        assert!(back_a.matrix().max_abs_diff(zero.matrix()) < 1e-15);
        assert!(back_b.matrix().max_abs_diff(plus.matrix()) < 1e-15);
    }

    #[test]
    fn two_party_entropy_gap_for_bell_is_two_bits() {
        let rho = bell_state().to_density();
        let a = partial_trace(&rho, &[0]).unwrap();
        let b = partial_trace(&rho, &[1]).unwrap();
        let tilde = maxent_two_party(&a, &b);
        let expected = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(tilde.matrix().max_abs_diff(expected.matrix()) < 1e-12);
        let gap = von_neumann_entropy(&tilde).unwrap() - von_neumann_entropy(&rho).unwrap();
        assert!((gap - 2.0).abs() < 1e-9);
    }

    #[test]
    fn dual_recovers_product_state_from_marginals() {
        let mut rng = Rng::seed_from(31);
        let a = random_density(&mut rng, &[2], 0.1);
        let b = random_density(&mut rng, &[2], 0.1);
        let cq = random_density(&mut rng, &[2], 0.1);
        let product = a.tensor(&b).tensor(&cq);
        let targets = MarginalSet::from_state(&product, 2).unwrap();
        let cfg = SolverConfig::default();
        let result = maxent_from_marginals(&targets, &cfg).unwrap();
        assert!(result.converged, "residual {}", result.residual);
        assert!(result.residual <= 1e-8);
        assert!(result.state.matrix().max_abs_diff(product.matrix()) < 1e-6);
    }

    #[test]
    fn dual_on_maximally_mixed_marginals_returns_identity() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2, 2]);
        let targets = MarginalSet::from_state(&rho, 2).unwrap();
        let cfg = SolverConfig::default();
        let result = maxent_from_marginals(&targets, &cfg).unwrap();
        assert!(result.converged);
        assert!(result.residual <= 1e-12);
        assert!(result
            .state
            .matrix()
            .max_abs_diff(rho.matrix()) < 1e-10);
        for (_, lam) in &result.multipliers {
            assert!(lam.max_abs_entry() < 1e-12);
        }
    }

    #[test]
    fn marginal_set_rejects_overlap_inconsistency() {
        let zero = PureState::basis(vec![2], 0).unwrap().to_density();
        let one = PureState::basis(vec![2], 1).unwrap().to_density();
        let ab = zero.tensor(&zero);
        let ac = one.tensor(&zero);
        let err = MarginalSet::new(
            vec![2, 2, 2],
            vec![(vec![0, 1], ab), (vec![0, 2], ac)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OverlapInconsistent { .. }));
    }

    #[test]
    fn feasibility_accepts_marginals_of_actual_state() {
        let mut rng = Rng::seed_from(33);
        let rho = random_density(&mut rng, &[2, 2, 2], 0.05);
        let targets = MarginalSet::from_state(&rho, 2).unwrap();
        let cfg = SolverConfig {
            restarts: 2,
            ..SolverConfig::default()
        };
        let report = marginal_feasibility(&targets, &cfg).unwrap();
        assert!(report.feasible, "best residual {}", report.best_residual);
        assert!(report.best_residual <= 1e-8);
        // Witness residual matches the reported value.
        let recomputed = targets.residual_sq(report.witness.matrix());
        assert!((recomputed - report.best_residual).abs() <= 1e-10);
    }

    #[test]
    fn feasibility_accepts_single_pair_with_free_subsystem() {
        let bell = bell_state().to_density();
        let targets = MarginalSet::new(vec![2, 2, 2], vec![(vec![0, 1], bell)]).unwrap();
        let cfg = SolverConfig {
            restarts: 2,
            ..SolverConfig::default()
        };
        let report = marginal_feasibility(&targets, &cfg).unwrap();
        assert!(report.feasible, "best residual {}", report.best_residual);
    }

    #[test]
    fn product_pure_state_has_no_irreducible_correlation() {
        let psi = PureState::basis(vec![2, 2, 2], 0).unwrap();
        let cfg = SolverConfig {
            restarts: 2,
            ..SolverConfig::default()
        };
        let report = irreducible_correlation(&psi.to_density(), 2, &cfg).unwrap();
        assert!(
            report.correlation_bits.abs() < 5e-3,
            "correlation {}",
            report.correlation_bits
        );
    }

    #[test]
    fn rejects_bad_arity() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(irreducible_correlation(&rho, 2, &SolverConfig::default()).is_err());
        assert!(MarginalSet::from_state(&rho, 0).is_err());
    }
}
