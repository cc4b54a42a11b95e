//! Random physical states and symplectic maps with bounded parameters.
//!
//! Used by the test suites and benchmarks to sweep generic Gaussian inputs:
//! every covariance produced here is physical by construction (a symplectic
//! congruence of a diagonal of symplectic eigenvalues >= 1/2), and the
//! parameter bounds keep quadrature oracles convergent.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;

use crate::gaussian::{GaussianState, SymplecticMatrix, VACUUM_VARIANCE};

/// Parameter bounds for [`random_state`].
#[derive(Debug, Clone, Copy)]
pub struct StateEnsemble {
    /// Each symplectic eigenvalue is drawn from [1/2, 1/2 + max_extra_thermal].
    pub max_extra_thermal: f64,
    /// Squeeze parameters of the scrambling symplectic lie in [-max, max].
    pub max_squeeze: f64,
    /// Mean components are drawn from [-max, max]; 0 gives centered states.
    pub max_displacement: f64,
}

impl Default for StateEnsemble {
    fn default() -> Self {
        StateEnsemble {
            max_extra_thermal: 1.5,
            max_squeeze: 0.5,
            max_displacement: 1.0,
        }
    }
}

impl StateEnsemble {
    pub fn centered() -> Self {
        StateEnsemble {
            max_displacement: 0.0,
            ..StateEnsemble::default()
        }
    }
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

fn local_block<R: Rng + ?Sized>(max_squeeze: f64, rng: &mut R) -> Matrix2<f64> {
    let z: f64 = if max_squeeze > 0.0 {
        rng.random_range(-max_squeeze..max_squeeze)
    } else {
        0.0
    };
    let squeeze = Matrix2::new(z.exp(), 0.0, 0.0, (-z).exp());
    rotation(rng.random_range(0.0..std::f64::consts::TAU))
        * squeeze
        * rotation(rng.random_range(0.0..std::f64::consts::TAU))
}

/// Rotation by theta in the (q_i, q_j) and (p_i, p_j) planes jointly; the
/// orthogonal-symplectic mixer used to couple mode pairs.
fn mixer(n_modes: usize, i: usize, j: usize, theta: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let (s, c) = theta.sin_cos();
    for off in 0..2 {
        m[(2 * i + off, 2 * i + off)] = c;
        m[(2 * j + off, 2 * j + off)] = c;
        m[(2 * i + off, 2 * j + off)] = s;
        m[(2 * j + off, 2 * i + off)] = -s;
    }
    m
}

/// A random n-mode symplectic map: two rounds of per-mode
/// rotation-squeeze-rotation blocks interleaved with pairwise mixers.
pub fn random_symplectic<R: Rng + ?Sized>(
    n_modes: usize,
    max_squeeze: f64,
    rng: &mut R,
) -> SymplecticMatrix {
    assert!(n_modes >= 1, "need at least one mode");
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for _ in 0..2 {
        let mut locals = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            locals
                .view_mut((2 * k, 2 * k), (2, 2))
                .copy_from(&local_block(max_squeeze, rng));
        }
        m = locals * m;
        for k in 0..n_modes.saturating_sub(1) {
            m = mixer(n_modes, k, k + 1, rng.random_range(0.0..std::f64::consts::TAU)) * m;
        }
    }
    SymplecticMatrix::new(m).expect("product of symplectic factors")
}

/// A random physical n-mode state within the ensemble's bounds.
pub fn random_state<R: Rng + ?Sized>(
    n_modes: usize,
    ensemble: &StateEnsemble,
    rng: &mut R,
) -> GaussianState {
    let s = random_symplectic(n_modes, ensemble.max_squeeze, rng);
    let mut diag = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        let nu = VACUUM_VARIANCE + rng.random_range(0.0..=ensemble.max_extra_thermal);
        diag[(2 * k, 2 * k)] = nu;
        diag[(2 * k + 1, 2 * k + 1)] = nu;
    }
    let cov = s.matrix() * diag * s.matrix().transpose();
    let mean = DVector::from_fn(2 * n_modes, |_, _| {
        if ensemble.max_displacement > 0.0 {
            rng.random_range(-ensemble.max_displacement..ensemble.max_displacement)
        } else {
            0.0
        }
    });
    GaussianState::new(mean, cov).expect("symplectic congruence of a physical diagonal")
}
