//! Classical analogues on bit strings: joint distributions, marginalization,
//! the parity family showing that pairwise marginals never pin down a generic
//! three-bit distribution, and an iterative-proportional-fitting baseline for
//! maximum-entropy reconstruction.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::matrix::ComplexMatrix;
use crate::state::{normalize_subset, DensityMatrix};

/// Tolerance on total probability.
const SUM_TOL: f64 = 1e-12;

/// Probability distribution over n binary variables, big-endian indexing
/// (the first variable is the most significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: probs.len(),
            });
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidDistribution { deviation: -1.0 });
        }
        let total: f64 = probs.iter().sum();
        let deviation = fmath::abs(total - 1.0);
        if deviation > SUM_TOL {
            return Err(Error::InvalidDistribution { deviation });
        }
        Ok(Self { n, probs })
    }

    pub fn uniform(n: usize) -> Self {
        let len = 1usize << n;
        Self {
            n,
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        let len = 1usize << n;
        if index >= len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: index,
            });
        }
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Ok(Self { n, probs })
    }

    pub fn variables(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        let mut s = 0.0;
        for &p in &self.probs {
            if p > 0.0 {
                s -= p * fmath::log2(p);
            }
        }
        s
    }
}

/// Sum out every variable not in `keep` (order preserved).
pub fn marginalize(p: &JointDistribution, keep: &[usize]) -> Result<JointDistribution> {
    let keep = normalize_subset(keep, p.n)?;
    let k = keep.len();
    let mut probs = vec![0.0f64; 1 << k];
    for (index, &value) in p.probs.iter().enumerate() {
        let mut reduced = 0usize;
        for &var in &keep {
            let bit = (index >> (p.n - 1 - var)) & 1;
            reduced = (reduced << 1) | bit;
        }
        probs[reduced] += value;
    }
    Ok(JointDistribution { n: k, probs })
}

/// Parity of a three-bit index.
#[inline]
fn parity(index: usize) -> u32 {
    (index as u32).count_ones() & 1
}

/// The parity family q_ijk = p_ijk + delta * (-1)^parity(ijk). Every
/// two-variable marginal of q equals that of p because the two cells merged
/// by a marginal sum always carry opposite parity signs.
pub fn delta_family(p: &JointDistribution, delta: f64) -> Result<JointDistribution> {
    if p.n != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: p.n,
        });
    }
    let mut probs = vec![0.0f64; 8];
    for (index, &value) in p.probs.iter().enumerate() {
        let signed = if parity(index) == 0 { delta } else { -delta };
        let q = value + signed;
        if q < 0.0 {
            return Err(Error::DeltaOutOfRange { delta, index });
        }
        probs[index] = q;
    }
    Ok(JointDistribution { n: 3, probs })
}

/// Admissible interval for [`delta_family`]: the most positive delta is the
/// smallest odd-parity cell, the most negative is minus the smallest
/// even-parity cell.
pub fn delta_range(p: &JointDistribution) -> Result<(f64, f64)> {
    if p.n != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: p.n,
        });
    }
    let mut min_even = f64::INFINITY;
    let mut min_odd = f64::INFINITY;
    for (index, &value) in p.probs.iter().enumerate() {
        if parity(index) == 0 {
            min_even = min_even.min(value);
        } else {
            min_odd = min_odd.min(value);
        }
    }
    Ok((-min_even, min_odd))
}

/// Iterative proportional fitting configuration.
#[derive(Debug, Clone)]
pub struct IpfConfig {
    /// Full cycles over the three pair constraints.
    pub max_cycles: usize,
    /// Convergence target: max absolute pair-marginal mismatch.
    pub tolerance: f64,
}

impl Default for IpfConfig {
    fn default() -> Self {
        Self {
            max_cycles: 10_000,
            tolerance: 1e-10,
        }
    }
}

/// Outcome of [`classical_maxent_ipf`].
#[derive(Debug, Clone)]
pub struct IpfResult {
    pub joint: JointDistribution,
    /// Max absolute mismatch against the three pair targets.
    pub residual: f64,
    pub cycles: usize,
    pub converged: bool,
}

/// The three variable pairs in fixed fitting order.
const PAIRS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

/// Maximum-entropy three-bit distribution with the given pair marginals
/// (order XY, XZ, YZ), via iterative proportional fitting from the uniform
/// start. Zero cells stay zero. Inconsistent targets surface as a positive
/// residual with `converged = false`, never as an error.
pub fn classical_maxent_ipf(
    pair_targets: &[JointDistribution; 3],
    cfg: &IpfConfig,
) -> Result<IpfResult> {
    for t in pair_targets {
        if t.n != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: t.n,
            });
        }
    }

    let mut joint = JointDistribution::uniform(3);
    let mut cycles = 0usize;
    let mut residual = pair_residual(&joint, pair_targets)?;

    while residual > cfg.tolerance && cycles < cfg.max_cycles {
        for (pair, target) in PAIRS.iter().zip(pair_targets.iter()) {
            let current = marginalize(&joint, pair)?;
            for (index, value) in joint.probs.iter_mut().enumerate() {
                if *value == 0.0 {
                    continue;
                }
                let cell = pair_cell(index, pair);
                let cur = current.probs[cell];
                if cur > 0.0 {
                    *value *= target.probs[cell] / cur;
                } else if target.probs[cell] == 0.0 {
                    *value = 0.0;
                }
                // cur == 0 with a positive target cannot be scaled into
                // existence; the residual stays positive and is reported.
            }
        }
        cycles += 1;
        residual = pair_residual(&joint, pair_targets)?;
        if !residual.is_finite() {
            return Err(Error::Numerical("fitting residual became non-finite"));
        }
    }

    Ok(IpfResult {
        converged: residual <= cfg.tolerance,
        joint,
        residual,
        cycles,
    })
}

fn pair_cell(index: usize, pair: &[usize; 2]) -> usize {
    let hi = (index >> (2 - pair[0])) & 1;
    let lo = (index >> (2 - pair[1])) & 1;
    (hi << 1) | lo
}

fn pair_residual(
    joint: &JointDistribution,
    pair_targets: &[JointDistribution; 3],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (pair, target) in PAIRS.iter().zip(pair_targets.iter()) {
        let current = marginalize(joint, pair)?;
        for (a, b) in current.probs.iter().zip(target.probs.iter()) {
            worst = worst.max(fmath::abs(a - b));
        }
    }
    Ok(worst)
}

/// Embed a distribution as the diagonal density matrix on qubits; classical
/// and quantum entropy measures agree on this family.
pub fn diagonal_density(p: &JointDistribution) -> DensityMatrix {
    let dim = 1usize << p.n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, &v) in p.probs.iter().enumerate() {
        m.set(i, i, crate::matrix::Complex64::new(v, 0.0));
    }
    DensityMatrix::new_unchecked(vec![2; p.n], m)
}
