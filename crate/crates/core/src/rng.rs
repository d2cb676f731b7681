//! Small deterministic random generator (xoshiro256**, SplitMix64 seeding)
//! plus samplers for the state ensembles used by the solvers and tests.
//!
//! A hand-rolled generator keeps seeded runs bit-identical across platforms
//! and feature sets, which the restartable solvers rely on.

use alloc::vec::Vec;

use crate::fmath;
use crate::matrix::{Complex64, ComplexMatrix};
use crate::state::{DensityMatrix, PureState};

#[derive(Debug, Clone)]
pub struct Rng {
    state: [u64; 4],
    cached_normal: Option<f64>,
}

impl Rng {
    /// Build a generator from a 64-bit seed.
    pub fn seed_from(seed: u64) -> Self {
        // SplitMix64 expansion of the seed into the xoshiro state.
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = x;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^ (z >> 31)
        };
        let state = [next(), next(), next(), next()];
        Self {
            state,
            cached_normal: None,
        }
    }

    /// Derive an independent stream, e.g. one per solver restart.
    pub fn substream(&self, index: u64) -> Self {
        let mut mix = Rng::seed_from(self.state[0] ^ self.state[2].rotate_left(17));
        let a = mix.next_u64();
        Rng::seed_from(a ^ index.wrapping_mul(0xA24BAED4963EE407))
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.cached_normal.take() {
            return v;
        }
        let mut u1 = self.uniform();
        if u1 <= 0.0 {
            u1 = f64::MIN_POSITIVE;
        }
        let u2 = self.uniform();
        let r = fmath::sqrt(-2.0 * fmath::ln(u1));
        let theta = core::f64::consts::TAU * u2;
        self.cached_normal = Some(r * fmath::sin(theta));
        r * fmath::cos(theta)
    }

    /// Standard complex normal (independent real and imaginary parts).
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let data: Vec<Complex64> = (0..rows * cols).map(|_| self.complex_normal()).collect();
        ComplexMatrix::new(rows, cols, data)
    }
}

/// Haar-random pure state: normalized vector of independent standard complex
/// Gaussian amplitudes.
pub fn haar_pure_state(rng: &mut Rng, dims: &[usize]) -> PureState {
    let dim: usize = dims.iter().product();
    let amps: Vec<Complex64> = (0..dim).map(|_| rng.complex_normal()).collect();
    PureState::normalized(dims.to_vec(), amps).expect("gaussian amplitudes are nonzero")
}

/// Hilbert-Schmidt random density matrix G G^dagger / Tr, optionally mixed
/// toward the maximally mixed state to keep it well conditioned.
pub fn random_density(rng: &mut Rng, dims: &[usize], mix_identity: f64) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let g = rng.gaussian_matrix(dim, dim);
    let gg = g.matmul(&g.adjoint());
    let tr = gg.trace().re;
    let mut rho = gg.scale((1.0 - mix_identity) / tr);
    if mix_identity > 0.0 {
        rho = rho.add(&ComplexMatrix::identity(dim).scale(mix_identity / dim as f64));
    }
    DensityMatrix::new(dims.to_vec(), rho.hermitize()).expect("construction is valid")
}

/// Haar-random unitary via Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut Rng, n: usize) -> ComplexMatrix {
    let g = rng.gaussian_matrix(n, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| g.get(i, j)).collect())
        .collect();
    for j in 0..n {
        for k in 0..j {
            let mut proj = Complex64::new(0.0, 0.0);
            for i in 0..n {
                proj += cols[k][i].conj() * cols[j][i];
            }
            for i in 0..n {
                let delta = proj * cols[k][i];
                cols[j][i] -= delta;
            }
        }
        let norm = fmath::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum());
        for i in 0..n {
            cols[j][i] /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            u.set(i, j, cols[j][i]);
        }
    }
    u
}
