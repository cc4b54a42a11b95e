//! Gaussian states of n bosonic modes and the symplectic maps that act on them.
//!
//! Conventions, fixed once for the whole crate:
//! - quadratures q = (a + a*)/sqrt(2), p = (a - a*)/(i sqrt(2)), hbar = 1,
//!   so the vacuum variance of each quadrature is 1/2;
//! - mean and covariance are stored in the interleaved ordering
//!   (q1, p1, q2, p2, ...);
//! - the characteristic function is chi(lambda) = Tr[rho D(lambda_1) ... D(lambda_n)]
//!   with D(a) = exp(a a* - conj(a) a), which for a Gaussian state evaluates to
//!   exp(i u.d - u.V.u / 2) where u_k = sqrt(2) (Im lambda_k, -Re lambda_k).

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Variance of each vacuum quadrature in this convention.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Relative tolerance for covariance symmetry checks.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// Eigenvalue floor for the uncertainty-relation check: cov + (i/2) J must
/// have min eigenvalue >= -PHYSICALITY_FLOOR_TOL, scaled by the largest
/// covariance entry when that exceeds 1 so that boundary states with huge
/// variances are not rejected over eigensolver rounding.
pub const PHYSICALITY_FLOOR_TOL: f64 = 1e-10;

/// Entrywise tolerance for S^T J S = J.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Symplectic form J = direct sum of [[0, 1], [-1, 0]] over modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// Outcome of the uncertainty-relation test on a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalityCheck {
    pub physical: bool,
    /// Smallest eigenvalue of cov + (i/2) J; >= 0 up to rounding for states.
    pub min_eigenvalue: f64,
}

fn check_symmetric(m: &DMatrix<f64>, rtol: f64) -> Result<()> {
    let scale = m.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let mut max_asym = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            max_asym = max_asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if max_asym > rtol * scale {
        return Err(Error::NotSymmetric {
            max_asymmetry: max_asym,
        });
    }
    Ok(())
}

/// Tests the bona fide condition cov + (i/2) J >= 0 and reports the smallest
/// eigenvalue of that Hermitian matrix as a diagnostic.
///
/// The input must be square with even dimension and symmetric to within
/// [`SYMMETRY_RTOL`].
pub fn check_physical(cov: &DMatrix<f64>) -> Result<PhysicalityCheck> {
    if cov.nrows() != cov.ncols() || cov.nrows() == 0 || cov.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: cov.nrows() + cov.nrows() % 2,
            got: cov.ncols(),
        });
    }
    check_symmetric(cov, SYMMETRY_RTOL)?;
    let n_modes = cov.nrows() / 2;
    let j = symplectic_form(n_modes);
    let herm = DMatrix::from_fn(cov.nrows(), cov.ncols(), |r, c| {
        C64::new(cov[(r, c)], 0.5 * j[(r, c)])
    });
    let eigs = herm.symmetric_eigenvalues();
    let min_eigenvalue = eigs.iter().fold(f64::INFINITY, |acc, e| acc.min(*e));
    let scale = cov.amax().max(1.0);
    Ok(PhysicalityCheck {
        physical: min_eigenvalue >= -PHYSICALITY_FLOOR_TOL * scale,
        min_eigenvalue,
    })
}

#[derive(Deserialize)]
struct GaussianStateRaw {
    n_modes: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl TryFrom<GaussianStateRaw> for GaussianState {
    type Error = Error;

    fn try_from(raw: GaussianStateRaw) -> Result<Self> {
        let dim = 2 * raw.n_modes;
        if raw.mean.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: raw.mean.len(),
            });
        }
        if raw.cov.len() != dim || raw.cov.iter().any(|row| row.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: raw.cov.iter().map(|r| r.len()).chain([raw.cov.len()]).min().unwrap_or(0),
            });
        }
        let mean = DVector::from_vec(raw.mean);
        let cov = DMatrix::from_fn(dim, dim, |r, c| raw.cov[r][c]);
        GaussianState::new(mean, cov)
    }
}

/// A Gaussian state, fully described by its quadrature mean vector and
/// covariance matrix in the interleaved (q1, p1, q2, p2, ...) ordering.
///
/// Construction always validates the two invariants: the covariance is
/// symmetric, and cov + (i/2) J is positive semidefinite to within
/// [`PHYSICALITY_FLOOR_TOL`]. The stored covariance is the symmetrized
/// (cov + cov^T)/2 of the accepted input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianStateRaw")]
pub struct GaussianState {
    n_modes: usize,
    #[serde(serialize_with = "serialize_mean")]
    mean: DVector<f64>,
    #[serde(serialize_with = "serialize_cov")]
    cov: DMatrix<f64>,
}

fn serialize_mean<S: serde::Serializer>(v: &DVector<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().copied().collect::<Vec<f64>>().serialize(s)
}

fn serialize_cov<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect();
    rows.serialize(s)
}

impl GaussianState {
    /// Builds a state from raw moments, enforcing symmetry and physicality.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if mean.len() == 0 || mean.len() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: mean.len() + mean.len() % 2,
                got: mean.len(),
            });
        }
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: cov.nrows().max(cov.ncols()),
            });
        }
        let check = check_physical(&cov)?;
        if !check.physical {
            return Err(Error::Unphysical {
                min_eigenvalue: check.min_eigenvalue,
            });
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self {
            n_modes: mean.len() / 2,
            mean,
            cov,
        })
    }

    /// Vacuum of `n_modes` modes: zero mean, covariance I/2.
    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "need at least one mode");
        Self {
            n_modes,
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM_VARIANCE,
        }
    }

    /// Single-mode coherent state |alpha>: vacuum covariance, mean
    /// (sqrt(2) Re alpha, sqrt(2) Im alpha).
    pub fn coherent(alpha: C64) -> Self {
        let sqrt2 = std::f64::consts::SQRT_2;
        Self {
            n_modes: 1,
            mean: DVector::from_vec(vec![sqrt2 * alpha.re, sqrt2 * alpha.im]),
            cov: DMatrix::identity(2, 2) * VACUUM_VARIANCE,
        }
    }

    /// Two-mode squeezed vacuum with squeezing parameter `r >= 0`.
    ///
    /// Diagonal blocks cosh(2r)/2 I, off-diagonal sinh(2r)/2 diag(1, -1);
    /// r = 0 is the two-mode vacuum.
    pub fn two_mode_squeezed_vacuum(r: f64) -> Result<Self> {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::NegativeParameter {
                name: "squeezing parameter r",
                value: r,
            });
        }
        let c = 0.5 * (2.0 * r).cosh();
        let s = 0.5 * (2.0 * r).sinh();
        let mut cov = DMatrix::zeros(4, 4);
        cov[(0, 0)] = c;
        cov[(1, 1)] = c;
        cov[(2, 2)] = c;
        cov[(3, 3)] = c;
        cov[(0, 2)] = s;
        cov[(2, 0)] = s;
        cov[(1, 3)] = -s;
        cov[(3, 1)] = -s;
        Ok(Self {
            n_modes: 2,
            mean: DVector::zeros(4),
            cov,
        })
    }

    /// Single-mode thermal state with mean photon number `nbar >= 0`:
    /// covariance (nbar + 1/2) I.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if nbar < 0.0 || !nbar.is_finite() {
            return Err(Error::NegativeParameter {
                name: "mean photon number nbar",
                value: nbar,
            });
        }
        Ok(Self {
            n_modes: 1,
            mean: DVector::zeros(2),
            cov: DMatrix::identity(2, 2) * (nbar + VACUUM_VARIANCE),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Runs the uncertainty-relation check on this state's covariance.
    pub fn check_physical(&self) -> PhysicalityCheck {
        check_physical(&self.cov).expect("stored covariance is square and symmetric")
    }

    /// chi(lambda) = Tr[rho D(lambda_1) ... D(lambda_n)], one argument per mode.
    pub fn characteristic_function(&self, lambdas: &[C64]) -> Result<C64> {
        if lambdas.len() != self.n_modes {
            return Err(Error::ModeCountMismatch {
                expected: self.n_modes,
                got: lambdas.len(),
            });
        }
        let u = cf_wave_vector(lambdas);
        let quad = (&self.cov * &u).dot(&u);
        let phase = u.dot(&self.mean);
        Ok(C64::new(-0.5 * quad, phase).exp())
    }

    /// Applies D(alpha_1) x ... x D(alpha_n): shifts each mode's mean by
    /// (sqrt(2) Re alpha_k, sqrt(2) Im alpha_k); the covariance is unchanged.
    pub fn displace(&self, alphas: &[C64]) -> Result<Self> {
        if alphas.len() != self.n_modes {
            return Err(Error::ModeCountMismatch {
                expected: self.n_modes,
                got: alphas.len(),
            });
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut mean = self.mean.clone();
        for (k, a) in alphas.iter().enumerate() {
            mean[2 * k] += sqrt2 * a.re;
            mean[2 * k + 1] += sqrt2 * a.im;
        }
        Ok(Self {
            n_modes: self.n_modes,
            mean,
            cov: self.cov.clone(),
        })
    }

    /// mean -> S mean, cov -> S cov S^T. Physicality is preserved exactly;
    /// the congruence is not re-validated.
    pub fn apply_symplectic(&self, s: &SymplecticMatrix) -> Result<Self> {
        if s.n_modes() != self.n_modes {
            return Err(Error::ModeCountMismatch {
                expected: self.n_modes,
                got: s.n_modes(),
            });
        }
        let m = s.matrix();
        Ok(Self {
            n_modes: self.n_modes,
            mean: m * &self.mean,
            cov: m * &self.cov * m.transpose(),
        })
    }

    /// Product state: block-diagonal covariance, concatenated means.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let n = self.n_modes + other.n_modes;
        let d1 = 2 * self.n_modes;
        let dim = 2 * n;
        let mut mean = DVector::zeros(dim);
        mean.rows_mut(0, d1).copy_from(&self.mean);
        mean.rows_mut(d1, 2 * other.n_modes).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(dim, dim);
        cov.view_mut((0, 0), (d1, d1)).copy_from(&self.cov);
        cov.view_mut((d1, d1), (2 * other.n_modes, 2 * other.n_modes))
            .copy_from(&other.cov);
        GaussianState {
            n_modes: n,
            mean,
            cov,
        }
    }
}

/// Real wave vector u with u_k = sqrt(2) (Im lambda_k, -Re lambda_k), the
/// coordinate form of sum_k (lambda_k a_k* - conj(lambda_k) a_k) = i u . R.
pub(crate) fn cf_wave_vector(lambdas: &[C64]) -> DVector<f64> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut u = DVector::zeros(2 * lambdas.len());
    for (k, l) in lambdas.iter().enumerate() {
        u[2 * k] = sqrt2 * l.im;
        u[2 * k + 1] = -sqrt2 * l.re;
    }
    u
}

/// A linear map on quadratures that preserves the symplectic form:
/// S^T J S = J to within [`SYMPLECTIC_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    matrix: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Validates S^T J S = J entrywise and wraps the matrix.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 || matrix.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows() + matrix.nrows() % 2,
                got: matrix.ncols(),
            });
        }
        let j = symplectic_form(matrix.nrows() / 2);
        let residual = matrix.transpose() * &j * &matrix - &j;
        let max_deviation = residual.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if max_deviation > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { max_deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Balanced beamsplitter mixing modes `i` and `j` of an `n_modes` register:
    /// mode i picks up (x_i - x_j)/sqrt(2) and mode j (x_i + x_j)/sqrt(2) for
    /// both quadratures, so the difference q and the sum p live on separate
    /// output modes and commute.
    pub fn beamsplitter_50_50(i: usize, j: usize, n_modes: usize) -> Result<Self> {
        if i >= n_modes {
            return Err(Error::ModeOutOfRange {
                index: i,
                n_modes,
            });
        }
        if j >= n_modes {
            return Err(Error::ModeOutOfRange {
                index: j,
                n_modes,
            });
        }
        if i == j {
            return Err(Error::EqualModes(i));
        }
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for off in 0..2 {
            let (ri, rj) = (2 * i + off, 2 * j + off);
            m[(ri, ri)] = inv_sqrt2;
            m[(ri, rj)] = -inv_sqrt2;
            m[(rj, ri)] = inv_sqrt2;
            m[(rj, rj)] = inv_sqrt2;
        }
        Ok(Self { matrix: m })
    }

    /// Block-diagonal composition acting independently on two registers.
    pub fn direct_sum(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        let d1 = self.matrix.nrows();
        let d2 = other.matrix.nrows();
        let mut m = DMatrix::zeros(d1 + d2, d1 + d2);
        m.view_mut((0, 0), (d1, d1)).copy_from(&self.matrix);
        m.view_mut((d1, d1), (d2, d2)).copy_from(&other.matrix);
        SymplecticMatrix { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }
}
