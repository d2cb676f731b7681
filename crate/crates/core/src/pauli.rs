//! Pauli-basis expansion of three-qubit operators.
//!
//! Any 8x8 Hermitian M decomposes as M = (1/8) sum_s c_s P_s over the 64
//! Pauli strings P_s, with real coefficients c_s = Tr(M P_s). For a density
//! matrix the identity-string coefficient is exactly 1.

use crate::error::{Error, Result};
use crate::fmath;
use crate::matrix::{Complex64, ComplexMatrix, C_ZERO};
use crate::state::DensityMatrix;

/// Imaginary parts of extracted coefficients beyond this are an error.
const REALITY_TOL: f64 = 1e-10;

/// Real coefficients of a three-qubit operator in the Pauli string basis,
/// grouped by which qubits the string acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliExpansion {
    /// Coefficient of the identity string (1 for density matrices).
    pub identity: f64,
    /// One-body coefficients for qubit A: sigma_i (x) 1 (x) 1.
    pub a: [f64; 3],
    /// One-body coefficients for qubit B.
    pub b: [f64; 3],
    /// One-body coefficients for qubit C.
    pub c: [f64; 3],
    /// Two-body tensor on qubits A, B.
    pub ab: [[f64; 3]; 3],
    /// Two-body tensor on qubits A, C.
    pub ac: [[f64; 3]; 3],
    /// Two-body tensor on qubits B, C.
    pub bc: [[f64; 3]; 3],
    /// Three-body tensor.
    pub abc: [[[f64; 3]; 3]; 3],
}

/// Action of a Pauli string on basis state |col>, big-endian qubit order.
/// Labels: 0 = identity, 1 = x, 2 = y, 3 = z. Returns (row, phase) such that
/// P|col> = phase |row>.
fn string_action(labels: [u8; 3], col: usize) -> (usize, Complex64) {
    let mut row = col;
    let mut phase = Complex64::new(1.0, 0.0);
    for (qubit, &label) in labels.iter().enumerate() {
        let shift = 2 - qubit;
        let bit = (col >> shift) & 1;
        match label {
            0 => {}
            1 => row ^= 1 << shift,
            2 => {
                row ^= 1 << shift;
                phase *= if bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
            }
            3 => {
                if bit == 1 {
                    phase = -phase;
                }
            }
            _ => unreachable!(),
        }
    }
    (row, phase)
}

/// Tr(M P) for the string with the given labels; P has one entry per column.
fn string_trace(m: &ComplexMatrix, labels: [u8; 3]) -> Complex64 {
    let mut acc = C_ZERO;
    for col in 0..8 {
        let (row, phase) = string_action(labels, col);
        acc += m.get(col, row) * phase;
    }
    acc
}

impl PauliExpansion {
    /// Expand an arbitrary 8x8 Hermitian matrix.
    pub fn of_hermitian(m: &ComplexMatrix) -> Result<Self> {
        if m.rows != 8 || m.cols != 8 {
            return Err(Error::DimensionMismatch {
                expected: 8,
                got: m.rows,
            });
        }
        let mut out = Self {
            identity: 0.0,
            a: [0.0; 3],
            b: [0.0; 3],
            c: [0.0; 3],
            ab: [[0.0; 3]; 3],
            ac: [[0.0; 3]; 3],
            bc: [[0.0; 3]; 3],
            abc: [[[0.0; 3]; 3]; 3],
        };
        for la in 0..4u8 {
            for lb in 0..4u8 {
                for lc in 0..4u8 {
                    let coeff = string_trace(m, [la, lb, lc]);
                    if fmath::abs(coeff.im) > REALITY_TOL {
                        return Err(Error::Numerical(
                            "Pauli coefficient has a non-negligible imaginary part",
                        ));
                    }
                    out.store([la, lb, lc], coeff.re);
                }
            }
        }
        Ok(out)
    }

    fn store(&mut self, labels: [u8; 3], value: f64) {
        let [la, lb, lc] = labels;
        match (la, lb, lc) {
            (0, 0, 0) => self.identity = value,
            (i, 0, 0) => self.a[i as usize - 1] = value,
            (0, j, 0) => self.b[j as usize - 1] = value,
            (0, 0, k) => self.c[k as usize - 1] = value,
            (i, j, 0) => self.ab[i as usize - 1][j as usize - 1] = value,
            (i, 0, k) => self.ac[i as usize - 1][k as usize - 1] = value,
            (0, j, k) => self.bc[j as usize - 1][k as usize - 1] = value,
            (i, j, k) => self.abc[i as usize - 1][j as usize - 1][k as usize - 1] = value,
        }
    }

    fn coefficient(&self, labels: [u8; 3]) -> f64 {
        let [la, lb, lc] = labels;
        match (la, lb, lc) {
            (0, 0, 0) => self.identity,
            (i, 0, 0) => self.a[i as usize - 1],
            (0, j, 0) => self.b[j as usize - 1],
            (0, 0, k) => self.c[k as usize - 1],
            (i, j, 0) => self.ab[i as usize - 1][j as usize - 1],
            (i, 0, k) => self.ac[i as usize - 1][k as usize - 1],
            (0, j, k) => self.bc[j as usize - 1][k as usize - 1],
            (i, j, k) => self.abc[i as usize - 1][j as usize - 1][k as usize - 1],
        }
    }

    /// Rebuild the 8x8 matrix (1/8) sum_s c_s P_s.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(8, 8);
        for la in 0..4u8 {
            for lb in 0..4u8 {
                for lc in 0..4u8 {
                    let coeff = self.coefficient([la, lb, lc]);
                    if coeff == 0.0 {
                        continue;
                    }
                    let w = Complex64::new(coeff / 8.0, 0.0);
                    for col in 0..8 {
                        let (row, phase) = string_action([la, lb, lc], col);
                        m.data[row * 8 + col] += w * phase;
                    }
                }
            }
        }
        m
    }

    /// Largest |Q_ijk| entry of the three-body tensor.
    pub fn max_three_body(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    worst = worst.max(fmath::abs(self.abc[i][j][k]));
                }
            }
        }
        worst
    }
}

/// Pauli expansion of a three-qubit density matrix.
pub fn pauli_expansion(rho: &DensityMatrix) -> Result<PauliExpansion> {
    if rho.dims() != [2, 2, 2] {
        return Err(Error::UnsupportedDims {
            expected: alloc::vec![2, 2, 2],
            got: rho.dims().to_vec(),
        });
    }
    PauliExpansion::of_hermitian(rho.matrix())
}
