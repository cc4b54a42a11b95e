//! The teleportation channel in closed form.
//!
//! Averaged over measurement outcomes, teleporting through a two-mode
//! resource is a Gaussian channel: the mean picks up the distorting field's
//! mean and the covariance gains its normally ordered covariance. For a
//! strictly classical field the same channel is literally a P-weighted
//! average of displacements, which [`channel_as_displacement_average`]
//! evaluates by Gauss-Hermite quadrature as an independent route.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;

use crate::distortion::{distorting_field, DistortingFieldState};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::quadrature::gauss_hermite;

/// Min eigenvalue of the normally ordered covariance required for the
/// displacement-average route; below it the P weight degenerates toward a
/// delta and the closed form [`teleport`] is the meaningful object.
pub const STRICT_CLASSICALITY_TOL: f64 = 1e-10;

/// Output state and scalar figures of merit of one teleportation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub output: GaussianState,
    /// Mean photon number of the distorting field; 1 at the classical
    /// boundary, 0 only in the ideal-EPR limit.
    pub added_noise: f64,
    /// Fidelity the channel would achieve on any coherent-state input.
    pub fidelity_coherent: f64,
    /// Whether the resource violates the separability bound added_noise >= 1.
    pub inseparable: bool,
}

/// Teleports a one-mode Gaussian state through a two-mode resource.
pub fn teleport(input: &GaussianState, resource: &GaussianState) -> Result<GaussianState> {
    let field = distorting_field(resource)?;
    teleport_through(input, &field)
}

fn teleport_through(input: &GaussianState, field: &DistortingFieldState) -> Result<GaussianState> {
    if input.n_modes() != 1 {
        return Err(Error::ModeCountMismatch {
            expected: 1,
            got: input.n_modes(),
        });
    }
    let fm = field.mean();
    let n = field.noise_matrix();
    let mean = DVector::from_vec(vec![input.mean()[0] + fm[0], input.mean()[1] + fm[1]]);
    let cov = DMatrix::from_fn(2, 2, |r, c| input.cov()[(r, c)] + n[(r, c)]);
    GaussianState::new(mean, cov)
}

/// Teleports and reports the channel's figures of merit alongside the output.
pub fn teleport_report(input: &GaussianState, resource: &GaussianState) -> Result<ChannelReport> {
    let field = distorting_field(resource)?;
    let output = teleport_through(input, &field)?;
    Ok(ChannelReport {
        output,
        added_noise: field.correlation_function(1, 1).re,
        fidelity_coherent: fidelity_from_field(&field),
        inseparable: field.source_epr().inseparable(),
    })
}

/// Mean photon number the channel adds to the input, evaluated on the
/// distorting field; equals the EPR uncertainty of the resource.
pub fn added_noise(resource: &GaussianState) -> Result<f64> {
    Ok(distorting_field(resource)?.correlation_function(1, 1).re)
}

/// Teleportation fidelity for coherent-state inputs: pi times the Husimi Q
/// density of the distorting field at the origin, independent of the input
/// amplitude.
pub fn fidelity_coherent(resource: &GaussianState) -> Result<f64> {
    Ok(fidelity_from_field(&distorting_field(resource)?))
}

fn fidelity_from_field(field: &DistortingFieldState) -> f64 {
    std::f64::consts::PI * field.q_function(crate::gaussian::C64::new(0.0, 0.0))
}

/// Hilbert-Schmidt overlap Tr[rho_a rho_b] of two Gaussian states with the
/// same mode count; for pure states this is the fidelity |<a|b>|^2.
pub fn state_overlap(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.n_modes() != b.n_modes() {
        return Err(Error::ModeCountMismatch {
            expected: a.n_modes(),
            got: b.n_modes(),
        });
    }
    let sum = a.cov() + b.cov();
    let det = sum.determinant();
    if det <= 0.0 {
        return Err(Error::Unphysical {
            min_eigenvalue: det,
        });
    }
    let delta = a.mean() - b.mean();
    let inv = sum.try_inverse().expect("positive determinant");
    let quad = delta.dot(&(inv * &delta));
    Ok((-0.5 * quad).exp() / det.sqrt())
}

/// Evaluates the channel as a P-weighted average of displaced inputs on an
/// n_nodes x n_nodes Gauss-Hermite grid. Exact (to rounding) for any
/// n_nodes >= 2 because the averaged moments are quadratics.
///
/// Requires a strictly classical distorting field; at the boundary the
/// weight degenerates to a delta and [`teleport`] should be used directly.
pub fn channel_as_displacement_average(
    input: &GaussianState,
    resource: &GaussianState,
    n_nodes: usize,
) -> Result<GaussianState> {
    if input.n_modes() != 1 {
        return Err(Error::ModeCountMismatch {
            expected: 1,
            got: input.n_modes(),
        });
    }
    if n_nodes < 2 {
        return Err(Error::InvalidCutoff);
    }
    let field = distorting_field(resource)?;
    let n = field.noise_matrix();
    let eig = nalgebra::linalg::SymmetricEigen::new(n);
    let min_eig = eig.eigenvalues.min();
    if min_eig <= STRICT_CLASSICALITY_TOL {
        return Err(Error::NotStrictlyClassical {
            min_eigenvalue: min_eig,
        });
    }
    let (nodes, weights) = gauss_hermite(n_nodes);
    // columns of the eigenbasis scaled to unit-Gaussian coordinates
    let axes: Vec<Vector2<f64>> = (0..2)
        .map(|k| eig.eigenvectors.column(k).into_owned() * (2.0 * eig.eigenvalues[k]).sqrt())
        .collect();
    let base = Vector2::new(input.mean()[0], input.mean()[1]) + field.mean();
    let mut total_w = 0.0;
    let mut mean_acc = Vector2::zeros();
    let mut second_acc = Matrix2::zeros();
    for (xi, wi) in nodes.iter().zip(&weights) {
        for (xj, wj) in nodes.iter().zip(&weights) {
            let w = wi * wj / std::f64::consts::PI;
            let m = base + axes[0] * *xi + axes[1] * *xj;
            total_w += w;
            mean_acc += m * w;
            second_acc += m * m.transpose() * w;
        }
    }
    let mean = mean_acc / total_w;
    let spread = second_acc / total_w - mean * mean.transpose();
    let cov = DMatrix::from_fn(2, 2, |r, c| input.cov()[(r, c)] + spread[(r, c)]);
    GaussianState::new(DVector::from_vec(vec![mean[0], mean[1]]), cov)
}
