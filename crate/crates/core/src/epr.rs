//! Statistics of the EPR operator pair on a two-mode state.
//!
//! Q = q1 - q2 and P = p1 + p2 commute, so they carry a genuine joint
//! distribution. Their combined second moment Delta = (Q^2 + P^2)/2 measures
//! how far the state is from the ideal EPR point Q = P = 0: any separable
//! state has <Delta> >= 1, so <Delta> < 1 certifies inseparability.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

/// First and second moments of (Q, P) = (q1 - q2, p1 + p2).
///
/// `var_qq`, `var_pp` and `cov_qp` are the raw (non-central) second moments
/// <Q^2>, <P^2>, <QP>, so displaced resources contribute quadratically
/// through their means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EprMoments {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_qq: f64,
    pub var_pp: f64,
    pub cov_qp: f64,
    /// <Delta> = (<Q^2> + <P^2>)/2.
    pub delta_mean: f64,
}

impl EprMoments {
    /// <Delta> < 1 certifies an inseparable resource.
    pub fn inseparable(&self) -> bool {
        self.delta_mean < 1.0
    }

    /// Central covariance matrix of (Q, P).
    pub fn central_cov(&self) -> Matrix2<f64> {
        Matrix2::new(
            self.var_qq - self.mean_q * self.mean_q,
            self.cov_qp - self.mean_q * self.mean_p,
            self.cov_qp - self.mean_q * self.mean_p,
            self.var_pp - self.mean_p * self.mean_p,
        )
    }

    pub fn mean(&self) -> Vector2<f64> {
        Vector2::new(self.mean_q, self.mean_p)
    }
}

/// Computes the (Q, P) moments of a two-mode state from its mean and
/// covariance in the (q1, p1, q2, p2) ordering.
pub fn epr_moments(state: &GaussianState) -> Result<EprMoments> {
    if state.n_modes() != 2 {
        return Err(Error::ModeCountMismatch {
            expected: 2,
            got: state.n_modes(),
        });
    }
    let d = state.mean();
    let v = state.cov();
    let mean_q = d[0] - d[2];
    let mean_p = d[1] + d[3];
    let var_qq = v[(0, 0)] + v[(2, 2)] - 2.0 * v[(0, 2)] + mean_q * mean_q;
    let var_pp = v[(1, 1)] + v[(3, 3)] + 2.0 * v[(1, 3)] + mean_p * mean_p;
    let cov_qp = v[(0, 1)] + v[(0, 3)] - v[(2, 1)] - v[(2, 3)] + mean_q * mean_p;
    Ok(EprMoments {
        mean_q,
        mean_p,
        var_qq,
        var_pp,
        cov_qp,
        delta_mean: 0.5 * (var_qq + var_pp),
    })
}

/// <Delta> of the resource; equals the channel's added thermal noise.
pub fn epr_uncertainty(state: &GaussianState) -> Result<f64> {
    Ok(epr_moments(state)?.delta_mean)
}

/// <exp(-Delta)>, the Gaussian average of exp(-(Q^2 + P^2)/2) over the joint
/// (Q, P) distribution, evaluated in closed form:
/// exp(-mu^T (I + Sigma)^{-1} mu / 2) / sqrt(det(I + Sigma)).
///
/// This is also the coherent-state teleportation fidelity of the resource.
pub fn exp_neg_delta(state: &GaussianState) -> Result<f64> {
    let moments = epr_moments(state)?;
    exp_neg_delta_from_moments(&moments)
}

pub(crate) fn exp_neg_delta_from_moments(moments: &EprMoments) -> Result<f64> {
    let m = Matrix2::identity() + moments.central_cov();
    let det = m.determinant();
    if det <= 0.0 {
        // a divergent integral can only come from a non-PSD covariance
        return Err(Error::Unphysical {
            min_eigenvalue: det,
        });
    }
    let mu = moments.mean();
    let inv = m.try_inverse().expect("positive determinant checked above");
    let quad = mu.dot(&(inv * mu));
    Ok((-0.5 * quad).exp() / det.sqrt())
}
