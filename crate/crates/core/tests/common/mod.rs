//! Independent quadrature oracles. Every closed form in the library is
//! re-derived here from a defining integral so the two routes can be
//! compared; nothing in this module calls the closed-form code it checks.

#![allow(dead_code)]

use cvteleport::quadrature::{gauss_hermite, gauss_legendre};
use cvteleport::random::StateEnsemble;
use cvteleport::{DistortingFieldState, GaussianState, C64};

/// Nodes per axis for the Gauss-Hermite phase-space integrals; sized so the
/// slowest-converging oracle (Fock inversion at weak noise) clears the
/// acceptance tolerance with two orders of margin.
pub const GH_NODES: usize = 128;

/// Bounds that keep every quadrature oracle comfortably convergent.
pub fn bounded_ensemble() -> StateEnsemble {
    StateEnsemble {
        max_extra_thermal: 1.0,
        max_squeeze: 0.4,
        max_displacement: 0.8,
    }
}

/// Associated Laguerre polynomial L_k^{(a)}(x) by the three-term recurrence.
fn laguerre(k: usize, a: usize, x: f64) -> f64 {
    let a = a as f64;
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// <l| D(lambda) |m> with the factor exp(-|lambda|^2 / 2) stripped, leaving
/// the polynomial-times-power part; indices here are small, so the factorial
/// ratio is a short product rather than a log-gamma difference.
pub fn bare_displacement_element(l: usize, m: usize, lambda: C64) -> C64 {
    if l < m {
        return bare_displacement_element(m, l, -lambda).conj();
    }
    let mut ratio = 1.0;
    for k in (m + 1)..=l {
        ratio /= k as f64;
    }
    let coeff = ratio.sqrt();
    lambda.powu((l - m) as u32) * coeff * laguerre(m, l - m, lambda.norm_sqr())
}

/// Fock element <l| rho |m> by inverting the characteristic function:
/// rho_lm = (1/pi) Int d^2lambda chi(lambda) <l| D(-lambda) |m>, with the
/// two Gaussian factors absorbed into the Gauss-Hermite weight.
pub fn fock_by_cf_inversion(field: &DistortingFieldState, l: usize, m: usize) -> C64 {
    let (xs, ws) = gauss_hermite(GH_NODES);
    let mut acc = C64::new(0.0, 0.0);
    for (x, wx) in xs.iter().zip(&ws) {
        for (y, wy) in xs.iter().zip(&ws) {
            let lambda = C64::new(*x, *y);
            acc += wx * wy
                * field.normally_ordered_cf(lambda)
                * bare_displacement_element(l, m, -lambda);
        }
    }
    acc / std::f64::consts::PI
}

/// R(x, y) by its defining integral
/// e^{xy} (1/pi) Int d^2lambda e^{-|lambda|^2} chi^N(lambda) e^{-x lambda + y lambda*}.
pub fn r_by_integral(field: &DistortingFieldState, x: C64, y: C64) -> C64 {
    let (nodes, ws) = gauss_hermite(GH_NODES);
    let mut acc = C64::new(0.0, 0.0);
    for (a, wa) in nodes.iter().zip(&ws) {
        for (b, wb) in nodes.iter().zip(&ws) {
            let lambda = C64::new(*a, *b);
            acc += wa * wb
                * field.normally_ordered_cf(lambda)
                * (-x * lambda + y * lambda.conj()).exp();
        }
    }
    (x * y).exp() * acc / std::f64::consts::PI
}

/// Q(beta) by smoothing the P density with the coherent-state kernel:
/// Q(beta) = (1/pi) Int d^2alpha P(alpha) e^{-|beta - alpha|^2}, on a
/// Gauss-Legendre box covering the P mass. Requires a strictly classical
/// field (P exists as a density).
pub fn q_by_p_smoothing(field: &DistortingFieldState, beta: C64) -> f64 {
    let n = field.noise_matrix();
    let mean = field.mean();
    let sqrt2 = std::f64::consts::SQRT_2;
    let center = (mean[0] / sqrt2, mean[1] / sqrt2);
    // alpha-plane spread of P: covariance N/2, so 8 sigma of the widest axis
    let half = 8.0 * ((n[(0, 0)] + n[(1, 1)]) / 2.0).sqrt().max(0.05);
    let (xs, wx) = gauss_legendre(GH_NODES, center.0 - half, center.0 + half);
    let (ys, wy) = gauss_legendre(GH_NODES, center.1 - half, center.1 + half);
    let mut acc = 0.0;
    for (x, wa) in xs.iter().zip(&wx) {
        for (y, wb) in ys.iter().zip(&wy) {
            let alpha = C64::new(*x, *y);
            let kernel = (-(beta - alpha).norm_sqr()).exp();
            acc += wa * wb * field.p_function(alpha).expect("strictly classical") * kernel;
        }
    }
    acc / std::f64::consts::PI
}

/// Coherent-state fidelity by the resource-side integral
/// (1/pi) Int d^2lambda e^{-|lambda|^2} chi_AB(lambda*, lambda).
pub fn fidelity_by_cf_integral(resource: &GaussianState) -> f64 {
    let (nodes, ws) = gauss_hermite(GH_NODES);
    let mut acc = C64::new(0.0, 0.0);
    for (a, wa) in nodes.iter().zip(&ws) {
        for (b, wb) in nodes.iter().zip(&ws) {
            let lambda = C64::new(*a, *b);
            acc += wa * wb
                * resource
                    .characteristic_function(&[lambda.conj(), lambda])
                    .unwrap();
        }
    }
    (acc / std::f64::consts::PI).re
}
