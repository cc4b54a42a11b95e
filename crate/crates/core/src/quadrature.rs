//! Gaussian quadrature rules, generated by the Golub-Welsch eigenvalue method
//! from the three-term recurrence of the orthogonal polynomial family.

use nalgebra::DMatrix;

/// Nodes and weights from the symmetric tridiagonal Jacobi matrix with zero
/// diagonal and off-diagonal `betas`; `mu0` is the total mass of the weight.
fn golub_welsch(betas: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = betas.len() + 1;
    let mut jacobi = DMatrix::zeros(n, n);
    for (k, b) in betas.iter().enumerate() {
        jacobi[(k, k + 1)] = *b;
        jacobi[(k + 1, k)] = *b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gauss-Hermite rule: integral of exp(-x^2) f(x) dx ~ sum w_i f(x_i).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let betas: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&betas, std::f64::consts::PI.sqrt())
}

/// Gauss-Legendre rule on [a, b]: integral of f(x) dx ~ sum w_i f(x_i).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let betas: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (nodes, weights) = golub_welsch(&betas, 2.0);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        nodes.into_iter().map(|x| mid + half * x).collect(),
        weights.into_iter().map(|w| half * w).collect(),
    )
}
