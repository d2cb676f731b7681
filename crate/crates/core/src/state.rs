//! Quantum-state primitives: pure states, density matrices, partial trace,
//! operator embedding, entropy, and the support-restricted logarithm.
//!
//! Subsystem indices are encoded big-endian: the first subsystem is the most
//! significant digit of a basis index, so for three qubits index 5 = binary
//! 101 labels |1>|0>|1>.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::{eigh, HermitianEigen};
use crate::error::{Error, Result};
use crate::fmath;
use crate::matrix::{Complex64, ComplexMatrix, C_ZERO};

/// Eigenvalues below this cutoff count as kernel for logs and entropies.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Tolerance on Hermiticity, trace, and positivity of a density matrix.
pub const DENSITY_TOL: f64 = 1e-10;

/// Largest accepted normalization drift for pure-state input.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Normalized amplitude vector over a list of subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Build from amplitudes that are already normalized; drift beyond
    /// 1e-9 in the squared norm is rejected, smaller drift is divided out.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::UnsupportedDims {
                expected: vec![2],
                got: dims,
            });
        }
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let drift = fmath::abs(norm_sq - 1.0);
        if drift > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { drift });
        }
        let scale = 1.0 / fmath::sqrt(norm_sq);
        let amplitudes = amplitudes
            .into_iter()
            .map(|a| a * Complex64::new(scale, 0.0))
            .collect();
        Ok(Self { dims, amplitudes })
    }

    /// Build from any nonzero amplitude vector, normalizing it.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::NotNormalized { drift: 1.0 });
        }
        let scale = 1.0 / fmath::sqrt(norm_sq);
        let amplitudes = amplitudes
            .into_iter()
            .map(|a| a * Complex64::new(scale, 0.0))
            .collect();
        Self::new(dims, amplitudes)
    }

    /// Computational basis state |index> in big-endian digit encoding.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amplitudes = vec![C_ZERO; dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(dims, amplitudes)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Tensor product self (x) other.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { dims, amplitudes }
    }

    /// Apply one single-subsystem unitary per subsystem.
    pub fn apply_local_unitaries(&self, unitaries: &[ComplexMatrix]) -> Result<Self> {
        if unitaries.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                got: unitaries.len(),
            });
        }
        let mut full = ComplexMatrix::identity(1);
        for u in unitaries {
            full = full.kron(u);
        }
        let amplitudes = full.matvec(&self.amplitudes);
        Self::new(self.dims.clone(), amplitudes)
    }

    /// The projector |psi><psi| as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        density_from_pure(self)
    }
}

/// Hermitian, positive semidefinite, unit-trace operator with subsystem
/// dimension list.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate Hermiticity, unit trace, and positivity (each to 1e-10).
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.check_square()?;
        let dim: usize = dims.iter().product();
        if dim != n {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: n,
            });
        }
        let herm = matrix.hermiticity_deviation();
        if herm > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = matrix.trace();
        let tr_dev = fmath::hypot(tr.re - 1.0, tr.im);
        if tr_dev > DENSITY_TOL {
            return Err(Error::InvalidTrace { deviation: tr_dev });
        }
        let min = eigh(&matrix)?.min_value();
        if min < -DENSITY_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Skip validation for matrices that are valid by construction
    /// (spectral reconstructions, partial traces of valid states, ...).
    pub(crate) fn new_unchecked(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Self { dims, matrix }
    }

    /// I/d on the given subsystems.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let dim: usize = dims.iter().product();
        Self {
            dims,
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Tensor product self (x) other.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// |psi><psi| from a normalized pure state; rank 1 by construction.
pub fn density_from_pure(state: &PureState) -> DensityMatrix {
    DensityMatrix::new_unchecked(
        state.dims.clone(),
        ComplexMatrix::outer(&state.amplitudes),
    )
}

/// Mixed-radix strides for big-endian subsystem digits.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Validate a subsystem subset: in range, deduplicated, sorted ascending.
pub(crate) fn normalize_subset(subset: &[usize], count: usize) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut keep: Vec<usize> = subset.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &s in &keep {
        if s >= count {
            return Err(Error::SubsystemOutOfRange {
                index: s,
                count,
            });
        }
    }
    Ok(keep)
}

/// Index tables splitting each full basis index into (kept digits, traced
/// digits), both packed as mixed-radix integers.
fn split_labels(dims: &[usize], keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize) {
    let stride = strides(dims);
    let dim: usize = dims.iter().product();
    let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let kept_dim: usize = kept_dims.iter().product();

    let mut keep_label = vec![0usize; dim];
    let mut trace_label = vec![0usize; dim];
    for index in 0..dim {
        let mut k = 0usize;
        let mut t = 0usize;
        for (s, (&d, &st)) in dims.iter().zip(stride.iter()).enumerate() {
            let digit = (index / st) % d;
            if keep.contains(&s) {
                k = k * d + digit;
            } else {
                t = t * d + digit;
            }
        }
        keep_label[index] = k;
        trace_label[index] = t;
    }
    (keep_label, trace_label, kept_dim)
}

/// Partial trace at the raw-matrix level.
pub(crate) fn partial_trace_matrix(
    matrix: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> ComplexMatrix {
    let (keep_label, trace_label, kept_dim) = split_labels(dims, keep);
    let dim = matrix.rows;
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for i in 0..dim {
        for j in 0..dim {
            if trace_label[i] == trace_label[j] {
                let v = matrix.get(i, j);
                if v != C_ZERO {
                    out.data[keep_label[i] * kept_dim + keep_label[j]] += v;
                }
            }
        }
    }
    out
}

/// Reduce a state to the subsystems in `keep` (order preserved); `keep` equal
/// to the full set returns the input.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = normalize_subset(keep, rho.dims.len())?;
    if keep.len() == rho.dims.len() {
        return Ok(rho.clone());
    }
    let matrix = partial_trace_matrix(&rho.matrix, &rho.dims, &keep);
    let dims: Vec<usize> = keep.iter().map(|&s| rho.dims[s]).collect();
    Ok(DensityMatrix::new_unchecked(dims, matrix))
}

/// Adjoint of the partial trace: place an operator living on `subset` into
/// the full space, acting as identity elsewhere.
pub fn embed_operator(
    op: &ComplexMatrix,
    subset: &[usize],
    dims: &[usize],
) -> Result<ComplexMatrix> {
    let subset = normalize_subset(subset, dims.len())?;
    let (keep_label, trace_label, kept_dim) = split_labels(dims, &subset);
    if op.rows != kept_dim || op.cols != kept_dim {
        return Err(Error::DimensionMismatch {
            expected: kept_dim,
            got: op.rows,
        });
    }
    let dim: usize = dims.iter().product();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if trace_label[i] == trace_label[j] {
                out.data[i * dim + j] = op.get(keep_label[i], keep_label[j]);
            }
        }
    }
    Ok(out)
}

fn checked_eigenvalues(rho: &DensityMatrix) -> Result<HermitianEigen> {
    let e = eigh(&rho.matrix)?;
    let min = e.min_value();
    if min < -1e-8 {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    Ok(e)
}

/// Von Neumann entropy in bits: -sum lambda log2 lambda over the support.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let e = checked_eigenvalues(rho)?;
    let mut s = 0.0;
    for &v in &e.values {
        if v > SUPPORT_CUTOFF {
            s -= v * fmath::log2(v);
        }
    }
    Ok(s.max(0.0))
}

/// Matrix logarithm restricted to the support: ln(lambda) on eigenvalues
/// above the cutoff, 0 on the kernel.
pub fn log_on_support(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let e = checked_eigenvalues(rho)?;
    Ok(e.apply(|v| if v > SUPPORT_CUTOFF { fmath::ln(v) } else { 0.0 }))
}

/// Projector onto the support of rho (eigenvalues above the cutoff).
pub fn support_projector(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let e = checked_eigenvalues(rho)?;
    Ok(e.apply(|v| if v > SUPPORT_CUTOFF { 1.0 } else { 0.0 }))
}

/// Trace distance: half the sum of absolute eigenvalues of a - b.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    trace_distance_matrix(&a.matrix, &b.matrix)
}

pub(crate) fn trace_distance_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a.sub(b);
    let e = eigh(&diff)?;
    Ok(0.5 * e.values.iter().map(|&v| fmath::abs(v)).sum::<f64>())
}
