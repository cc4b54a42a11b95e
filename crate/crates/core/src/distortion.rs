//! The distorting field: the one-mode state whose convolution with the input
//! is exactly the teleportation channel of a given two-mode resource.
//!
//! Its normally ordered characteristic function equals the resource's
//! characteristic function on the conjugate diagonal,
//! chi_D^(N)(lambda) = chi_AB(conj(lambda), lambda), which pins the moments:
//! the annihilation-operator mean is <a2> - conj(<a1>), so in quadratures the
//! mean is (-<Q>, <P>) and the normally ordered covariance is the central
//! (Q, P) covariance with the QP cross term negated. The reflection
//! disappears for the usual zero-mean, symmetric resources.
//!
//! Because (Q, P) commute, that covariance is PSD for every physical
//! resource: the distorting field is always a classical (positive-P) state.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::epr::{epr_moments, EprMoments};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, C64, VACUUM_VARIANCE};

/// Min eigenvalue of the normally ordered covariance below which the P
/// function is treated as a delta-like distributional limit.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A one-mode Gaussian state together with the EPR moments of the resource
/// it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortingFieldState {
    state: GaussianState,
    source_epr: EprMoments,
}

/// Builds the distorting field of a two-mode resource state.
pub fn distorting_field(resource: &GaussianState) -> Result<DistortingFieldState> {
    let epr = epr_moments(resource)?;
    let n = noise_matrix_from_epr(&epr);
    let mean = nalgebra::DVector::from_vec(vec![-epr.mean_q, epr.mean_p]);
    let cov = nalgebra::DMatrix::from_fn(2, 2, |r, c| {
        n[(r, c)] + if r == c { VACUUM_VARIANCE } else { 0.0 }
    });
    let state = GaussianState::new(mean, cov)?;
    Ok(DistortingFieldState {
        state,
        source_epr: epr,
    })
}

/// Normally ordered covariance of the distorting field: the central (Q, P)
/// covariance reflected through q -> -q.
pub(crate) fn noise_matrix_from_epr(epr: &EprMoments) -> Matrix2<f64> {
    let c = epr.central_cov();
    Matrix2::new(c[(0, 0)], -c[(0, 1)], -c[(0, 1)], c[(1, 1)])
}

impl DistortingFieldState {
    /// The distorting field as an ordinary one-mode Gaussian state.
    pub fn state(&self) -> &GaussianState {
        &self.state
    }

    /// EPR moments of the resource this field was derived from.
    pub fn source_epr(&self) -> &EprMoments {
        &self.source_epr
    }

    /// Mean vector (q, p) of the field.
    pub fn mean(&self) -> Vector2<f64> {
        Vector2::new(self.state.mean()[0], self.state.mean()[1])
    }

    /// Normally ordered covariance N = cov - I/2; the channel adds exactly
    /// this matrix to the input covariance.
    pub fn noise_matrix(&self) -> Matrix2<f64> {
        let v = self.state.cov();
        Matrix2::new(
            v[(0, 0)] - VACUUM_VARIANCE,
            v[(0, 1)],
            v[(1, 0)],
            v[(1, 1)] - VACUUM_VARIANCE,
        )
    }

    /// chi_D^(N)(lambda) = exp(|lambda|^2 / 2) chi_D(lambda); equals the
    /// resource characteristic function at (conj(lambda), lambda).
    pub fn normally_ordered_cf(&self, lambda: C64) -> C64 {
        let chi = self
            .state
            .characteristic_function(&[lambda])
            .expect("field state is one mode");
        (0.5 * lambda.norm_sqr()).exp() * chi
    }

    /// Glauber-Sudarshan P density at the phase-space point alpha, normalized
    /// so that the integral over the alpha plane is 1.
    ///
    /// Refused when the normally ordered covariance is degenerate: the P
    /// distribution then collapses to a delta-like limit with no density.
    pub fn p_function(&self, alpha: C64) -> Result<f64> {
        let n = self.noise_matrix();
        let min_eig = min_eig_2x2(&n);
        let scale = n.amax().max(1.0);
        if min_eig <= DEGENERACY_TOL * scale {
            return Err(Error::DegenerateDistribution {
                min_eigenvalue: min_eig,
            });
        }
        let det = n.determinant();
        let inv = n.try_inverse().expect("non-degenerate by the check above");
        let eta = phase_point(alpha) - self.mean();
        let quad = eta.dot(&(inv * eta));
        Ok((-0.5 * quad).exp() / (std::f64::consts::PI * det.sqrt()))
    }

    /// Husimi Q density (1/pi) <beta| rho |beta>, normalized to 1 over the
    /// beta plane.
    pub fn q_function(&self, beta: C64) -> f64 {
        let m = self.noise_matrix() + Matrix2::identity();
        let det = m.determinant();
        let inv = m.try_inverse().expect("I + N is positive definite");
        let delta = phase_point(beta) - self.mean();
        let quad = delta.dot(&(inv * delta));
        (-0.5 * quad).exp() / (std::f64::consts::PI * det.sqrt())
    }

    /// Glauber R function, the entire generating function of the Fock matrix:
    /// R(x, y) = sum_{l,m} rho_lm x^l y^m / sqrt(l! m!) evaluated in closed
    /// form; x and y are independent complex arguments (conj(beta), beta')
    /// of the smoothed expansion.
    pub fn r_function(&self, x: C64, y: C64) -> C64 {
        let q = self.r_quadratic();
        (q.a * x * x + q.b * y * y + q.c * x * y + q.d * x + q.e * y).exp() * q.k
    }

    /// Coefficients of the quadratic exponent of R(x, y) = k exp(a x^2 +
    /// b y^2 + c x y + d x + e y).
    fn r_quadratic(&self) -> RQuadratic {
        let n = self.noise_matrix();
        // in (Re lambda, Im lambda) coordinates the CF exponent quadratic is
        // I + W with W the 90-degree rotation conjugate of N
        let m = Matrix2::new(
            1.0 + n[(1, 1)],
            -n[(0, 1)],
            -n[(0, 1)],
            1.0 + n[(0, 0)],
        );
        let inv = m.try_inverse().expect("I + W is positive definite");
        let minv = |u: Vector2<C64>, v: Vector2<C64>| -> C64 {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..2 {
                for c in 0..2 {
                    acc += C64::new(inv[(r, c)], 0.0) * u[r] * v[c];
                }
            }
            acc
        };
        let i = C64::new(0.0, 1.0);
        let sqrt2 = std::f64::consts::SQRT_2;
        let mean = self.mean();
        let c0 = Vector2::new(-i * sqrt2 * mean[1], i * sqrt2 * mean[0]);
        let cx = Vector2::new(C64::new(-1.0, 0.0), -i);
        let cy = Vector2::new(C64::new(1.0, 0.0), -i);
        RQuadratic {
            a: 0.25 * minv(cx, cx),
            b: 0.25 * minv(cy, cy),
            c: C64::new(1.0, 0.0) + 0.5 * minv(cx, cy),
            d: 0.5 * minv(c0, cx),
            e: 0.5 * minv(c0, cy),
            k: (0.25 * minv(c0, c0)).exp() / m.determinant().sqrt(),
        }
    }

    /// Fock matrix elements <l| rho |m> for l, m = 0..=cutoff, generated by
    /// the exact two-index Taylor recursion of R; entries are bounded so the
    /// recursion is stable at any cutoff.
    pub fn fock_matrix(&self, cutoff: usize) -> Result<FockMatrix> {
        if cutoff < 1 {
            return Err(Error::InvalidCutoff);
        }
        let q = self.r_quadratic();
        let dim = cutoff + 1;
        let mut rho = nalgebra::DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        rho[(0, 0)] = q.k;
        // rho_{l+1,m} sqrt(l+1) = 2a sqrt(l) rho_{l-1,m} + c sqrt(m) rho_{l,m-1} + d rho_{l,m}
        for l in 0..cutoff {
            let mut t = q.d * rho[(l, 0)];
            if l >= 1 {
                t += 2.0 * q.a * (l as f64).sqrt() * rho[(l - 1, 0)];
            }
            rho[(l + 1, 0)] = t / ((l + 1) as f64).sqrt();
        }
        for m in 0..cutoff {
            for l in 0..dim {
                let mut t = q.e * rho[(l, m)];
                if m >= 1 {
                    t += 2.0 * q.b * (m as f64).sqrt() * rho[(l, m - 1)];
                }
                if l >= 1 {
                    t += q.c * (l as f64).sqrt() * rho[(l - 1, m)];
                }
                rho[(l, m + 1)] = t / ((m + 1) as f64).sqrt();
            }
        }
        let trace: f64 = (0..dim).map(|l| rho[(l, l)].re).sum();
        // the exact trace never exceeds 1; clamp rounding residue
        let deficit = (1.0 - trace).max(0.0);
        Ok(FockMatrix {
            cutoff,
            entries: rho,
            deficit,
        })
    }

    /// Like [`fock_matrix`](Self::fock_matrix) but fails if the truncation
    /// deficit exceeds `bound`, reporting the deficit that was achieved.
    pub fn fock_matrix_with_deficit_bound(&self, cutoff: usize, bound: f64) -> Result<FockMatrix> {
        let fock = self.fock_matrix(cutoff)?;
        if fock.deficit >= bound {
            return Err(Error::TruncationDeficit {
                achieved: fock.deficit,
                bound,
            });
        }
        Ok(fock)
    }

    /// Photon-number distribution p_l = <l| rho |l> for l = 0..=cutoff.
    pub fn photon_distribution(&self, cutoff: usize) -> Result<Vec<f64>> {
        let fock = self.fock_matrix(cutoff)?;
        Ok((0..=cutoff).map(|l| fock.entries[(l, l)].re).collect())
    }

    /// Moment generating function G(s) = <exp((s - 1) Delta)> of the EPR
    /// operator, defined for |s| <= 1; G(0) is the coherent-state fidelity
    /// and G(1) = 1.
    pub fn generating_function(&self, s: f64) -> Result<f64> {
        if !(s.is_finite() && s.abs() <= 1.0) {
            return Err(Error::GeneratingArgOutOfRange(s));
        }
        let t = 1.0 - s;
        let sigma = self.source_epr.central_cov();
        let m = Matrix2::identity() + sigma * t;
        let det = m.determinant();
        if det <= 0.0 {
            return Err(Error::Unphysical {
                min_eigenvalue: det,
            });
        }
        let mu = self.source_epr.mean();
        let inv = m.try_inverse().expect("positive determinant checked above");
        let quad = mu.dot(&(inv * mu));
        Ok((-0.5 * t * quad).exp() / det.sqrt())
    }

    /// Normally ordered correlation <(a*)^l a^m> of the field, evaluated by
    /// the Gaussian (Isserlis) moment recursion on the pair (a*, a) with the
    /// normally ordered covariances. For l = m this is <Delta^l> of the
    /// resource.
    pub fn correlation_function(&self, l: usize, m: usize) -> C64 {
        let n = self.noise_matrix();
        let mean = self.mean();
        let i = C64::new(0.0, 1.0);
        let a_mean = (C64::new(mean[0], 0.0) + i * mean[1]) / std::f64::consts::SQRT_2;
        // classical complex-Gaussian stand-ins: X ~ a*, Y ~ a
        let xbar = a_mean.conj();
        let ybar = a_mean;
        let cyy = C64::new(0.5 * (n[(0, 0)] - n[(1, 1)]), n[(0, 1)]);
        let cxx = cyy.conj();
        let cxy = C64::new(0.5 * (n[(0, 0)] + n[(1, 1)]), 0.0);
        let mut table = vec![vec![C64::new(0.0, 0.0); m + 1]; l + 1];
        for li in 0..=l {
            for mi in 0..=m {
                table[li][mi] = if li == 0 && mi == 0 {
                    C64::new(1.0, 0.0)
                } else if li == 0 {
                    let mut t = ybar * table[0][mi - 1];
                    if mi >= 2 {
                        t += ((mi - 1) as f64) * cyy * table[0][mi - 2];
                    }
                    t
                } else {
                    let mut t = xbar * table[li - 1][mi];
                    if li >= 2 {
                        t += ((li - 1) as f64) * cxx * table[li - 2][mi];
                    }
                    if mi >= 1 {
                        t += (mi as f64) * cxy * table[li - 1][mi - 1];
                    }
                    t
                };
            }
        }
        table[l][m]
    }
}

struct RQuadratic {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
    e: C64,
    k: C64,
}

fn phase_point(alpha: C64) -> Vector2<f64> {
    let sqrt2 = std::f64::consts::SQRT_2;
    Vector2::new(sqrt2 * alpha.re, sqrt2 * alpha.im)
}

fn min_eig_2x2(m: &Matrix2<f64>) -> f64 {
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let disc = (0.25 * (m[(0, 0)] - m[(1, 1)]).powi(2) + m[(0, 1)] * m[(1, 0)]).max(0.0);
    half_tr - disc.sqrt()
}

#[derive(Serialize, Deserialize)]
struct FockMatrixRaw {
    cutoff: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    deficit: f64,
}

/// Truncated Fock-basis density matrix of the distorting field.
///
/// Entries form a Hermitian PSD matrix with trace 1 - deficit; the deficit is
/// the probability weight above the cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FockMatrixRaw", into = "FockMatrixRaw")]
pub struct FockMatrix {
    cutoff: usize,
    entries: nalgebra::DMatrix<C64>,
    deficit: f64,
}

impl FockMatrix {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn entry(&self, l: usize, m: usize) -> C64 {
        self.entries[(l, m)]
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn trace(&self) -> f64 {
        (0..=self.cutoff).map(|l| self.entries[(l, l)].re).sum()
    }

    /// Smallest eigenvalue of the truncated matrix; >= 0 up to rounding.
    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, e| acc.min(*e))
    }
}

impl From<FockMatrix> for FockMatrixRaw {
    fn from(f: FockMatrix) -> Self {
        let dim = f.cutoff + 1;
        let grid = |sel: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..dim)
                .map(|l| (0..dim).map(|m| sel(&f.entries[(l, m)])).collect())
                .collect()
        };
        FockMatrixRaw {
            cutoff: f.cutoff,
            re: grid(|z| z.re),
            im: grid(|z| z.im),
            deficit: f.deficit,
        }
    }
}

impl TryFrom<FockMatrixRaw> for FockMatrix {
    type Error = Error;

    fn try_from(raw: FockMatrixRaw) -> Result<Self> {
        let dim = raw.cutoff + 1;
        if raw.cutoff < 1 {
            return Err(Error::InvalidCutoff);
        }
        for grid in [&raw.re, &raw.im] {
            if grid.len() != dim || grid.iter().any(|row| row.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: grid.len(),
                });
            }
        }
        if !(0.0..=1.0).contains(&raw.deficit) {
            return Err(Error::TruncationDeficit {
                achieved: raw.deficit,
                bound: 1.0,
            });
        }
        let entries = nalgebra::DMatrix::from_fn(dim, dim, |l, m| {
            C64::new(raw.re[l][m], raw.im[l][m])
        });
        let mut max_dev = 0.0f64;
        for l in 0..dim {
            for m in 0..dim {
                max_dev = max_dev.max((entries[(l, m)] - entries[(m, l)].conj()).norm());
            }
        }
        if max_dev > 1e-10 {
            return Err(Error::NotSymmetric {
                max_asymmetry: max_dev,
            });
        }
        let fock = FockMatrix {
            cutoff: raw.cutoff,
            entries,
            deficit: raw.deficit,
        };
        if fock.min_eigenvalue() < -1e-9 {
            return Err(Error::Unphysical {
                min_eigenvalue: fock.min_eigenvalue(),
            });
        }
        Ok(fock)
    }
}
